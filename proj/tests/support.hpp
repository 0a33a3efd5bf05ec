#pragma once

// Test-only helpers: independent brute-force oracles for the statistical
// kernels plus small fixture utilities. These deliberately re-derive every
// quantity from first principles and share no code with the library paths
// they check.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "imputeforge/dataset.hpp"
#include "imputeforge/rng.hpp"

namespace testsupport {

// ---- association oracles ---------------------------------------------------

inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    if (n < 2) return 0.0;
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / double(n), my = sy / double(n);
    double num = 0, dx2 = 0, dy2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - mx) * (y[i] - my);
        dx2 += (x[i] - mx) * (x[i] - mx);
        dy2 += (y[i] - my) * (y[i] - my);
    }
    if (dx2 == 0.0 || dy2 == 0.0) return 0.0;
    double r = num / (std::sqrt(dx2) * std::sqrt(dy2));
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

inline double oracle_cramers_v(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
    std::size_t n = a.size();
    if (n < 2) return 0.0;
    std::set<std::string> cats_a(a.begin(), a.end());
    std::set<std::string> cats_b(b.begin(), b.end());
    std::size_t r = cats_a.size(), c = cats_b.size();
    if (r < 2 || c < 2) return 0.0;

    std::map<std::pair<std::string, std::string>, double> cell;
    std::map<std::string, double> row_tot, col_tot;
    for (std::size_t i = 0; i < n; ++i) {
        cell[{a[i], b[i]}] += 1.0;
        row_tot[a[i]] += 1.0;
        col_tot[b[i]] += 1.0;
    }
    double chi2 = 0.0;
    for (const auto& ca : cats_a) {
        for (const auto& cb : cats_b) {
            double expected = row_tot[ca] * col_tot[cb] / double(n);
            double observed = 0.0;
            auto it = cell.find({ca, cb});
            if (it != cell.end()) observed = it->second;
            if (expected > 0.0) chi2 += (observed - expected) * (observed - expected) / expected;
        }
    }
    double v = std::sqrt(chi2 / (double(n) * double(std::min(r, c) - 1)));
    return std::min(v, 1.0);
}

inline double oracle_eta(const std::vector<std::string>& groups, const std::vector<double>& y) {
    std::size_t n = y.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= double(n);
    double ss_total = 0.0;
    for (double v : y) ss_total += (v - mean) * (v - mean);
    if (ss_total == 0.0) return 0.0;

    std::map<std::string, std::vector<double>> by_group;
    for (std::size_t i = 0; i < n; ++i) by_group[groups[i]].push_back(y[i]);
    double ss_between = 0.0;
    for (const auto& [g, vals] : by_group) {
        double gm = 0.0;
        for (double v : vals) gm += v;
        gm /= double(vals.size());
        ss_between += double(vals.size()) * (gm - mean) * (gm - mean);
    }
    return std::min(std::sqrt(ss_between / ss_total), 1.0);
}

// ---- AUC oracle: exhaustive positive/negative pair enumeration -------------

inline double oracle_auc(const std::vector<int>& labels, const std::vector<double>& scores) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] == 1) continue;
            ++pairs;
            if (scores[i] > scores[j]) {
                wins += 1.0;
            } else if (scores[i] == scores[j]) {
                wins += 0.5;
            }
        }
    }
    if (pairs == 0) return 0.0;
    return wins / double(pairs);
}

// ---- elbow oracle: geometric point-to-line distance via projection ---------

struct OracleElbow {
    std::size_t index = 0;
    bool fallback = false;
};

inline OracleElbow oracle_elbow(const std::vector<double>& values) {
    std::size_t m = values.size();
    double ax = 1.0, ay = values.front();
    double bx = double(m), by = values.back();
    double abx = bx - ax, aby = by - ay;
    double ab2 = abx * abx + aby * aby;

    std::size_t best = 0;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
        double px = double(i + 1), py = values[i];
        double t = ((px - ax) * abx + (py - ay) * aby) / ab2;
        double fx = ax + t * abx, fy = ay + t * aby;  // foot of the perpendicular
        double dist = std::hypot(px - fx, py - fy);
        if (dist > best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    if (best_dist < 1e-9) return {(m - 1) / 2, true};
    return {best, false};
}

// ---- random mixed-type dataset generation ----------------------------------

inline imputeforge::Dataset random_mixed_dataset(std::mt19937_64& gen, std::size_t max_rows = 50,
                                                 std::size_t max_cols = 6) {
    using namespace imputeforge;
    std::uniform_int_distribution<std::size_t> rows_dist(4, max_rows);
    std::uniform_int_distribution<std::size_t> cols_dist(2, max_cols);
    std::size_t n = rows_dist(gen);
    std::size_t m = cols_dist(gen);

    std::vector<ColumnSchema> schema;
    for (std::size_t c = 0; c < m; ++c) {
        ColumnSchema col;
        col.name = "c" + std::to_string(c);
        col.description = "column " + std::to_string(c);
        if (c == 0) {
            col.role = ColumnRole::Target;
            col.kind = ColumnKind::Categorical;
        } else {
            col.role = ColumnRole::Feature;
            col.kind = gen() % 2 == 0 ? ColumnKind::Categorical : ColumnKind::Numerical;
        }
        schema.push_back(col);
    }

    static const std::vector<std::string> cats{"red", "green", "blue", "cyan"};
    std::vector<std::vector<std::string>> rows(n, std::vector<std::string>(m));
    std::vector<std::vector<bool>> missing(n, std::vector<bool>(m, false));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            if (c == 0) {
                rows[r][c] = r < n / 2 ? "a" : (gen() % 2 ? "a" : "b");
                continue;
            }
            if (gen() % 10 == 0) {  // sprinkle missing cells on features
                missing[r][c] = true;
                continue;
            }
            if (schema[c].kind == ColumnKind::Categorical) {
                rows[r][c] = cats[gen() % cats.size()];
            } else {
                std::uniform_real_distribution<double> val(-5.0, 5.0);
                rows[r][c] = format_number(std::round(val(gen) * 100.0) / 100.0);
            }
        }
    }
    // Guarantee both classes appear.
    rows[0][0] = "a";
    rows[n - 1][0] = "b";
    return Dataset(schema, rows, missing, "generated");
}

// ---- misc -------------------------------------------------------------------

inline std::filesystem::path make_temp_dir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    static std::atomic<unsigned> counter{0};
    auto dir = base / ("imputeforge_" + tag + "_" + std::to_string(::getpid()) + "_" +
                       std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void spit(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace testsupport

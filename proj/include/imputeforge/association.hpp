#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "imputeforge/dataset.hpp"
#include "imputeforge/errors.hpp"

namespace imputeforge {

enum class AssociationMeasure { PearsonR, CramersV, EtaRatio };

inline const char* measure_name(AssociationMeasure m) {
    switch (m) {
        case AssociationMeasure::PearsonR: return "pearson_r";
        case AssociationMeasure::CramersV: return "cramers_v";
        case AssociationMeasure::EtaRatio: return "eta_ratio";
    }
    return "unknown";
}

/// Measure selection is a pure function of the two column kinds.
inline AssociationMeasure dispatch_measure(ColumnKind a, ColumnKind b) {
    if (a == ColumnKind::Numerical && b == ColumnKind::Numerical) {
        return AssociationMeasure::PearsonR;
    }
    if (a == ColumnKind::Categorical && b == ColumnKind::Categorical) {
        return AssociationMeasure::CramersV;
    }
    return AssociationMeasure::EtaRatio;
}

struct MeasureResult {
    double value = 0.0;
    bool degenerate = false;  // constant column, single category, or n < 2
};

/// Pearson's r, signed.  r = Σ(xᵢ−x̄)(yᵢ−ȳ) / √(Σ(xᵢ−x̄)²·Σ(yᵢ−ȳ)²),
/// clamped to [−1, 1]. Degenerate inputs yield 0 with the warning flag set.
inline MeasureResult pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatch("pearson_r: series lengths differ");
    std::size_t n = x.size();
    if (n < 2) return {0.0, true};
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return {0.0, true};
    double r = sxy / std::sqrt(sxx * syy);
    return {std::clamp(r, -1.0, 1.0), false};
}

/// Cramér's V from the χ² statistic of the contingency table, no continuity
/// correction. V = √(χ² / (n · min(r−1, c−1))); a single observed category on
/// either side yields 0 with the warning flag set.
inline MeasureResult cramers_v(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
    if (a.size() != b.size()) throw LengthMismatch("cramers_v: series lengths differ");
    std::size_t n = a.size();
    if (n < 2) return {0.0, true};

    std::map<std::string, std::size_t> ra, cb;
    for (const auto& v : a) ra.emplace(v, ra.size());
    for (const auto& v : b) cb.emplace(v, cb.size());
    std::size_t r = ra.size(), c = cb.size();
    if (r < 2 || c < 2) return {0.0, true};

    std::vector<double> table(r * c, 0.0), row_tot(r, 0.0), col_tot(c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t ri = ra[a[i]], ci = cb[b[i]];
        table[ri * c + ci] += 1.0;
        row_tot[ri] += 1.0;
        col_tot[ci] += 1.0;
    }
    double chi2 = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            double expected = row_tot[i] * col_tot[j] / static_cast<double>(n);
            if (expected > 0.0) {
                double diff = table[i * c + j] - expected;
                chi2 += diff * diff / expected;
            }
        }
    }
    double denom = static_cast<double>(n) * static_cast<double>(std::min(r, c) - 1);
    double v = std::sqrt(chi2 / denom);
    return {std::clamp(v, 0.0, 1.0), false};
}

/// Correlation ratio η = √(Σ_g n_g(ȳ_g−ȳ)² / Σᵢ(yᵢ−ȳ)²). Constant y or a
/// single group yields 0 with the warning flag set.
inline MeasureResult eta_ratio(const std::vector<std::string>& groups,
                               const std::vector<double>& y) {
    if (groups.size() != y.size()) throw LengthMismatch("eta_ratio: series lengths differ");
    std::size_t n = y.size();
    if (n < 2) return {0.0, true};

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);

    std::map<std::string, std::pair<double, double>> stats;  // label -> (sum, count)
    for (std::size_t i = 0; i < n; ++i) {
        auto& s = stats[groups[i]];
        s.first += y[i];
        s.second += 1.0;
    }
    double ss_total = 0.0;
    for (double v : y) ss_total += (v - mean) * (v - mean);
    if (ss_total <= 0.0) return {0.0, true};

    double ss_between = 0.0;
    for (const auto& [label, s] : stats) {
        double gm = s.first / s.second;
        ss_between += s.second * (gm - mean) * (gm - mean);
    }
    double eta = std::sqrt(ss_between / ss_total);
    return {std::clamp(eta, 0.0, 1.0), false};
}

struct AssociationMatrix {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> values;    // absolute association in [0, 1]
    std::vector<std::vector<AssociationMeasure>> measures;
    std::vector<std::vector<std::size_t>> support;  // pairwise-complete row counts
    std::vector<std::vector<bool>> degenerate;

    std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) return i;
        }
        throw UnknownColumn(std::string(name));
    }
};

/// Pairwise association across all columns. Each pair is computed on the rows
/// where both columns are observed (pairwise-complete deletion); Pearson is
/// stored as an absolute value. Summation order within a pair is row-index
/// ascending, so concurrent and sequential evaluation agree bit for bit.
inline AssociationMatrix association_matrix(const Dataset& d) {
    std::size_t m = d.column_count();
    if (m < 2) throw InvalidSchema("association matrix needs at least 2 columns");

    AssociationMatrix out;
    for (const auto& col : d.schema()) out.columns.push_back(col.name);
    out.values.assign(m, std::vector<double>(m, 0.0));
    out.measures.assign(m, std::vector<AssociationMeasure>(m, AssociationMeasure::PearsonR));
    out.support.assign(m, std::vector<std::size_t>(m, 0));
    out.degenerate.assign(m, std::vector<bool>(m, false));

    for (std::size_t i = 0; i < m; ++i) {
        std::size_t observed = 0;
        for (std::size_t r = 0; r < d.row_count(); ++r) observed += d.missing(r, i) ? 0 : 1;
        out.values[i][i] = 1.0;
        out.support[i][i] = observed;
        out.measures[i][i] = dispatch_measure(d.effective_kind(i), d.effective_kind(i));
    }

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            ColumnKind ki = d.effective_kind(i);
            ColumnKind kj = d.effective_kind(j);
            AssociationMeasure measure = dispatch_measure(ki, kj);

            std::vector<std::size_t> rows;
            for (std::size_t r = 0; r < d.row_count(); ++r) {
                if (!d.missing(r, i) && !d.missing(r, j)) rows.push_back(r);
            }

            MeasureResult res;
            switch (measure) {
                case AssociationMeasure::PearsonR: {
                    std::vector<double> x, y;
                    x.reserve(rows.size());
                    y.reserve(rows.size());
                    for (std::size_t r : rows) {
                        x.push_back(d.number(r, i));
                        y.push_back(d.number(r, j));
                    }
                    res = pearson_r(x, y);
                    res.value = std::fabs(res.value);
                    break;
                }
                case AssociationMeasure::CramersV: {
                    std::vector<std::string> a, b;
                    a.reserve(rows.size());
                    b.reserve(rows.size());
                    for (std::size_t r : rows) {
                        a.push_back(d.value(r, i));
                        b.push_back(d.value(r, j));
                    }
                    res = cramers_v(a, b);
                    break;
                }
                case AssociationMeasure::EtaRatio: {
                    // The categorical side provides the groups.
                    std::size_t cat = ki == ColumnKind::Categorical ? i : j;
                    std::size_t num = ki == ColumnKind::Categorical ? j : i;
                    std::vector<std::string> g;
                    std::vector<double> y;
                    g.reserve(rows.size());
                    y.reserve(rows.size());
                    for (std::size_t r : rows) {
                        g.push_back(d.value(r, cat));
                        y.push_back(d.number(r, num));
                    }
                    res = eta_ratio(g, y);
                    break;
                }
            }
            out.values[i][j] = out.values[j][i] = res.value;
            out.measures[i][j] = out.measures[j][i] = measure;
            out.support[i][j] = out.support[j][i] = rows.size();
            out.degenerate[i][j] = out.degenerate[j][i] = res.degenerate;
        }
    }
    return out;
}

struct AssociationProfile {
    std::string feature;
    std::vector<std::pair<std::string, double>> entries;  // sorted descending by strength
};

/// All candidate predictors of `feature` (every other column, the target
/// included), sorted descending by absolute strength; ties keep column order.
inline AssociationProfile association_profile(const AssociationMatrix& m,
                                              std::string_view feature) {
    std::size_t f = m.index_of(feature);
    AssociationProfile p;
    p.feature = std::string(feature);
    for (std::size_t j = 0; j < m.columns.size(); ++j) {
        if (j == f) continue;
        p.entries.emplace_back(m.columns[j], m.values[f][j]);
    }
    std::stable_sort(p.entries.begin(), p.entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return p;
}

}  // namespace imputeforge

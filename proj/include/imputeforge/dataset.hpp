#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "imputeforge/csv.hpp"
#include "imputeforge/errors.hpp"
#include "imputeforge/rng.hpp"
#include "imputeforge/util.hpp"

namespace imputeforge {

enum class ColumnKind { Categorical, Numerical };
enum class ColumnRole { Target, Feature };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::Categorical;
    std::string description;  // rendered as one prompt line; must not contain newlines
    ColumnRole role = ColumnRole::Feature;
};

inline const std::vector<std::string>& default_sentinels() {
    static const std::vector<std::string> s{"", "?", "NA", "No Record"};
    return s;
}

/// Mixed-type table with an explicit per-cell missing mask. Values are stored
/// as canonical text; numerical cells additionally cache their parsed value.
/// Instances are treated as immutable once shared: operations return copies.
class Dataset {
public:
    Dataset() = default;

    Dataset(std::vector<ColumnSchema> schema, std::vector<std::vector<std::string>> rows,
            std::vector<std::vector<bool>> missing, std::string provenance = "",
            std::vector<std::string> sentinels = default_sentinels())
        : schema_(std::move(schema)),
          rows_(std::move(rows)),
          missing_(std::move(missing)),
          provenance_(std::move(provenance)),
          sentinels_(std::move(sentinels)) {
        source_rows_.resize(rows_.size());
        std::iota(source_rows_.begin(), source_rows_.end(), std::size_t{0});
        rebuild_numeric_cache();
        validate();
    }

    const std::vector<ColumnSchema>& schema() const { return schema_; }
    std::size_t row_count() const { return rows_.size(); }
    std::size_t column_count() const { return schema_.size(); }
    const std::string& provenance() const { return provenance_; }
    const std::vector<std::string>& sentinels() const { return sentinels_; }

    std::size_t column_index(std::string_view name) const {
        for (std::size_t i = 0; i < schema_.size(); ++i) {
            if (schema_[i].name == name) return i;
        }
        throw UnknownColumn(std::string(name));
    }

    std::size_t target_index() const {
        for (std::size_t i = 0; i < schema_.size(); ++i) {
            if (schema_[i].role == ColumnRole::Target) return i;
        }
        throw InvalidSchema("schema has no target column");
    }

    /// Targets are class labels regardless of their declared kind.
    ColumnKind effective_kind(std::size_t col) const {
        return schema_[col].role == ColumnRole::Target ? ColumnKind::Categorical
                                                       : schema_[col].kind;
    }

    bool missing(std::size_t row, std::size_t col) const { return missing_[row][col]; }

    /// Canonical cell text; empty string when missing.
    const std::string& value(std::size_t row, std::size_t col) const { return rows_[row][col]; }

    /// Parsed numeric value; NaN when missing or categorical.
    double number(std::size_t row, std::size_t col) const { return numeric_[row][col]; }

    bool row_complete(std::size_t row) const {
        for (std::size_t c = 0; c < schema_.size(); ++c) {
            if (missing_[row][c]) return false;
        }
        return true;
    }

    std::size_t missing_count(std::size_t col) const {
        std::size_t n = 0;
        for (std::size_t r = 0; r < rows_.size(); ++r) n += missing_[r][col] ? 1 : 0;
        return n;
    }

    /// Row index this row had in the dataset it was loaded from or split off.
    std::size_t source_row(std::size_t row) const { return source_rows_[row]; }

    /// Distinct observed values of a column, in first-appearance order.
    std::vector<std::string> observed_domain(std::size_t col) const {
        std::vector<std::string> out;
        std::set<std::string> seen;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (missing_[r][col]) continue;
            if (seen.insert(rows_[r][col]).second) out.push_back(rows_[r][col]);
        }
        return out;
    }

    /// Overwrites a cell and clears its missing flag. Datasets are value
    /// types: callers mutate their own copy, never a shared instance.
    void set_cell(std::size_t row, std::size_t col, const std::string& text) {
        if (schema_[col].kind == ColumnKind::Numerical) {
            auto v = parse_number(text);
            if (!v) throw UnparsableNumeric(row, col, text);
            rows_[row][col] = format_number(*v);
            numeric_[row][col] = *v;
        } else {
            rows_[row][col] = text;
        }
        missing_[row][col] = false;
    }

    Dataset subset(const std::vector<std::size_t>& row_indices) const {
        Dataset out;
        out.schema_ = schema_;
        out.provenance_ = provenance_;
        out.sentinels_ = sentinels_;
        out.rows_.reserve(row_indices.size());
        for (std::size_t r : row_indices) {
            out.rows_.push_back(rows_[r]);
            out.missing_.push_back(missing_[r]);
            out.numeric_.push_back(numeric_[r]);
            out.source_rows_.push_back(source_rows_[r]);
        }
        return out;
    }

private:
    void rebuild_numeric_cache() {
        numeric_.assign(rows_.size(), std::vector<double>(schema_.size(),
                                                          std::numeric_limits<double>::quiet_NaN()));
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            for (std::size_t c = 0; c < schema_.size(); ++c) {
                if (missing_[r][c] || schema_[c].kind != ColumnKind::Numerical) continue;
                auto v = parse_number(rows_[r][c]);
                if (!v) throw UnparsableNumeric(r, c, rows_[r][c]);
                numeric_[r][c] = *v;
            }
        }
    }

    void validate() const {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (rows_[r].size() != schema_.size() || missing_[r].size() != schema_.size()) {
                throw InvalidSchema("row " + std::to_string(r) +
                                    " has a cell count different from the schema length");
            }
        }
    }

    std::vector<ColumnSchema> schema_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::vector<bool>> missing_;
    std::vector<std::vector<double>> numeric_;
    std::vector<std::size_t> source_rows_;
    std::string provenance_;
    std::vector<std::string> sentinels_ = default_sentinels();
};

struct ClassPartition {
    std::string majority_label;
    std::string minority_label;
    std::map<std::string, std::vector<std::size_t>> row_indices_by_label;

    const std::vector<std::size_t>& rows(const std::string& label) const {
        auto it = row_indices_by_label.find(label);
        if (it == row_indices_by_label.end()) throw UnknownColumn("class label " + label);
        return it->second;
    }
};

struct MissingnessSpec {
    std::string feature;
    std::map<std::string, std::size_t> per_class_count;
    std::uint64_t seed = 0;
};

struct AuditRecord {
    std::size_t row_index;
    std::string column;
    std::string original_value;
};

struct InjectionResult {
    Dataset dataset;
    std::vector<AuditRecord> audit;  // ground truth; never consulted by the imputation path
};

// ---- schema file --------------------------------------------------------

inline std::vector<ColumnSchema> load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open schema file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidSchema("schema file is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_array()) throw InvalidSchema("schema file must be a JSON array");

    std::vector<ColumnSchema> schema;
    std::size_t targets = 0;
    for (const auto& item : doc) {
        ColumnSchema col;
        try {
            col.name = item.at("name").get<std::string>();
            std::string kind = item.at("kind").get<std::string>();
            if (kind == "categorical") {
                col.kind = ColumnKind::Categorical;
            } else if (kind == "numerical") {
                col.kind = ColumnKind::Numerical;
            } else {
                throw InvalidSchema("unknown column kind '" + kind + "' for " + col.name);
            }
            col.description = item.at("description").get<std::string>();
            std::string role = item.at("role").get<std::string>();
            if (role == "target") {
                col.role = ColumnRole::Target;
                ++targets;
            } else if (role == "feature") {
                col.role = ColumnRole::Feature;
            } else {
                throw InvalidSchema("unknown column role '" + role + "' for " + col.name);
            }
        } catch (const nlohmann::json::exception& e) {
            throw InvalidSchema("malformed schema entry: " + std::string(e.what()));
        }
        if (col.description.empty() || col.description.find('\n') != std::string::npos) {
            throw InvalidSchema("description of column '" + col.name +
                                "' must be a non-empty single line");
        }
        schema.push_back(std::move(col));
    }
    if (targets != 1) {
        throw InvalidSchema("schema must declare exactly one target column, found " +
                            std::to_string(targets));
    }
    return schema;
}

// ---- operations ----------------------------------------------------------

inline Dataset load_csv(const std::string& path, const std::vector<ColumnSchema>& schema,
                        const std::vector<std::string>& sentinels = default_sentinels()) {
    auto raw = csv::parse_file(path);
    if (raw.empty()) throw EmptyDataset("file has no header row: " + path);

    const auto& header = raw.front();
    if (header.size() != schema.size()) {
        throw SchemaMismatch("header has " + std::to_string(header.size()) +
                             " columns, schema has " + std::to_string(schema.size()));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (trim(header[c]) != schema[c].name) {
            throw SchemaMismatch("header column " + std::to_string(c) + " is '" +
                                 trim(header[c]) + "', schema expects '" + schema[c].name + "'");
        }
    }
    if (raw.size() == 1) throw EmptyDataset("file has no data rows: " + path);

    auto is_sentinel = [&](const std::string& cell) {
        for (const auto& s : sentinels) {
            if (cell == s) return true;
        }
        return false;
    };

    std::size_t target = schema.size();
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (schema[c].role == ColumnRole::Target) target = c;
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<bool>> missing;
    rows.reserve(raw.size() - 1);
    for (std::size_t r = 1; r < raw.size(); ++r) {
        if (raw[r].size() != schema.size()) {
            throw SchemaMismatch("row " + std::to_string(r - 1) + " has " +
                                 std::to_string(raw[r].size()) + " cells, expected " +
                                 std::to_string(schema.size()));
        }
        std::vector<std::string> row(schema.size());
        std::vector<bool> miss(schema.size(), false);
        for (std::size_t c = 0; c < schema.size(); ++c) {
            std::string cell = trim(raw[r][c]);
            if (is_sentinel(cell)) {
                if (c == target) throw MissingTarget(r - 1);
                miss[c] = true;
                row[c] = "";
                continue;
            }
            if (schema[c].kind == ColumnKind::Numerical) {
                auto v = parse_number(cell);
                if (!v) throw UnparsableNumeric(r - 1, c, cell);
                cell = format_number(*v);
            }
            row[c] = std::move(cell);
        }
        rows.push_back(std::move(row));
        missing.push_back(std::move(miss));
    }

    Dataset d(schema, std::move(rows), std::move(missing), path, sentinels);

    std::set<std::string> labels;
    for (std::size_t r = 0; r < d.row_count(); ++r) labels.insert(d.value(r, target));
    if (labels.size() != 2) {
        throw NonBinaryTarget("target column '" + schema[target].name + "' has " +
                              std::to_string(labels.size()) + " distinct values, expected 2");
    }
    return d;
}

inline void write_csv(const Dataset& d, const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(d.row_count() + 1);
    std::vector<std::string> header;
    for (const auto& col : d.schema()) header.push_back(col.name);
    rows.push_back(std::move(header));
    const std::string& missing_sentinel = d.sentinels().empty() ? std::string() : d.sentinels()[0];
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        std::vector<std::string> row(d.column_count());
        for (std::size_t c = 0; c < d.column_count(); ++c) {
            row[c] = d.missing(r, c) ? missing_sentinel : d.value(r, c);
        }
        rows.push_back(std::move(row));
    }
    csv::write_file(path, rows);
}

inline std::pair<Dataset, Dataset> split_complete_incomplete(const Dataset& d) {
    std::vector<std::size_t> complete;
    std::vector<std::size_t> incomplete;
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        (d.row_complete(r) ? complete : incomplete).push_back(r);
    }
    return {d.subset(complete), d.subset(incomplete)};
}

inline ClassPartition class_partition(const Dataset& d) {
    std::size_t target = d.target_index();
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        if (d.missing(r, target)) throw MissingTarget(r);
        by_label[d.value(r, target)].push_back(r);
    }
    if (by_label.size() != 2) {
        throw NonBinaryTarget("expected exactly 2 classes, found " +
                              std::to_string(by_label.size()));
    }
    auto it = by_label.begin();
    const auto& a = *it;
    const auto& b = *std::next(it);
    ClassPartition p;
    // Majority by count; ties go to the lexicographically smaller label.
    if (a.second.size() >= b.second.size()) {
        p.majority_label = a.first;
        p.minority_label = b.first;
    } else {
        p.majority_label = b.first;
        p.minority_label = a.first;
    }
    p.row_indices_by_label = std::move(by_label);
    return p;
}

inline InjectionResult inject_missingness(const Dataset& d, const MissingnessSpec& spec) {
    std::size_t col = d.column_index(spec.feature);
    if (d.schema()[col].role != ColumnRole::Feature) {
        throw InvalidSchema("cannot inject missingness into the target column");
    }
    ClassPartition partition = class_partition(d);

    std::vector<AuditRecord> audit;
    std::vector<std::pair<std::size_t, std::size_t>> cells;  // (row, col) to clear
    Rng rng(spec.seed);
    // Classes processed in label order so the result depends on the seed only.
    for (const auto& [label, rows] : partition.row_indices_by_label) {
        auto it = spec.per_class_count.find(label);
        std::size_t want = it == spec.per_class_count.end() ? 0 : it->second;
        if (want == 0) continue;
        std::vector<std::size_t> observed;
        for (std::size_t r : rows) {
            if (!d.missing(r, col)) observed.push_back(r);
        }
        if (want > observed.size()) {
            throw InfeasibleCount("class '" + label + "' has " +
                                  std::to_string(observed.size()) + " observed cells in '" +
                                  spec.feature + "', cannot mark " + std::to_string(want));
        }
        auto picks = rng.sample_without_replacement(observed.size(), want);
        for (std::size_t p : picks) cells.emplace_back(observed[p], col);
    }

    // Rebuild through the constructor so caches stay consistent.
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<bool>> missing;
    rows.reserve(d.row_count());
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        std::vector<std::string> row(d.column_count());
        std::vector<bool> miss(d.column_count());
        for (std::size_t c = 0; c < d.column_count(); ++c) {
            row[c] = d.missing(r, c) ? "" : d.value(r, c);
            miss[c] = d.missing(r, c);
        }
        rows.push_back(std::move(row));
        missing.push_back(std::move(miss));
    }
    for (const auto& [r, c] : cells) {
        audit.push_back({r, spec.feature, rows[r][c]});
        rows[r][c] = "";
        missing[r][c] = true;
    }
    return {Dataset(d.schema(), std::move(rows), std::move(missing), d.provenance(),
                    d.sentinels()),
            std::move(audit)};
}

/// One prompt's worth of in-context example rows, keyed by class label.
struct ExampleSet {
    std::map<std::string, std::vector<std::size_t>> rows_by_label;
};

/// Draws `num_sets` example sets of `k_per_group` rows per class. Rows are
/// sampled without replacement across all sets, so one prompt never repeats
/// an example row. The partition's index lists must point at complete rows
/// of `complete`.
inline std::vector<ExampleSet> sample_examples(const Dataset& complete,
                                               const ClassPartition& partition,
                                               std::size_t k_per_group, std::size_t num_sets,
                                               std::uint64_t seed) {
    std::vector<ExampleSet> sets(num_sets);
    Rng rng(seed);
    for (const auto& [label, rows] : partition.row_indices_by_label) {
        std::size_t need = k_per_group * num_sets;
        if (rows.size() < need) {
            throw InsufficientCompleteRows("class '" + label + "' has " +
                                           std::to_string(rows.size()) +
                                           " complete rows, need " + std::to_string(need));
        }
        auto picks = rng.sample_without_replacement(rows.size(), need);
        for (std::size_t s = 0; s < num_sets; ++s) {
            auto& dst = sets[s].rows_by_label[label];
            for (std::size_t i = 0; i < k_per_group; ++i) {
                std::size_t row = rows[picks[s * k_per_group + i]];
                if (!complete.row_complete(row)) {
                    throw InsufficientCompleteRows("example pool row " + std::to_string(row) +
                                                   " is not complete");
                }
                dst.push_back(row);
            }
        }
    }
    return sets;
}

inline void write_audit(const std::vector<AuditRecord>& audit, const std::string& path) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& rec : audit) {
        doc.push_back({{"row_index", rec.row_index},
                       {"column", rec.column},
                       {"original_value", rec.original_value}});
    }
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open audit file for writing: " + path);
    out << doc.dump(2) << '\n';
}

}  // namespace imputeforge

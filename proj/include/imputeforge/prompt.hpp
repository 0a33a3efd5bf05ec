#pragma once

#include <map>
#include <string>
#include <vector>

#include "imputeforge/dataset.hpp"
#include "imputeforge/errors.hpp"
#include "imputeforge/threshold.hpp"
#include "imputeforge/util.hpp"

namespace imputeforge {

enum class PromptStyle { Grouped, Ungrouped };

struct GroupSpec {
    std::string class_value;    // raw target value as it appears in the dataset
    std::string display_label;  // human-readable name used in logs and reports
};

inline std::string group_letter(std::size_t index) {
    return std::string(1, static_cast<char>('A' + index)) + ".";
}

inline const std::string& default_instruction_template() {
    static const std::string t =
        "Your task is to fill in the missing values of the '{feature_name}' column in the "
        "incomplete records below by analyzing the completed samples. Output only the imputed "
        "'{feature_name}' column: exactly {missing_count} values, one value per line, in the "
        "order the incomplete records appear. Do not output anything else.";
    return t;
}

struct PromptConfig {
    std::size_t num_example_sets = 2;
    std::size_t examples_per_group = 10;
    std::vector<GroupSpec> groups;  // group A. is the first entry
    std::string missing_display = "No Record";
    PromptStyle style = PromptStyle::Grouped;
    std::string instruction_template = default_instruction_template();
};

/// Everything the offline mock backend needs to answer a prompt without
/// seeing the text: example feature values per class and the class of each
/// missing record, in manifest order.
struct MockContext {
    std::map<std::string, std::vector<std::string>> examples_by_class;
    std::vector<std::string> row_classes;
    ColumnKind feature_kind = ColumnKind::Categorical;
};

struct RenderedPrompt {
    std::string text;
    std::vector<std::size_t> manifest;  // dataset row index per missing-block position
    std::size_t estimated_tokens = 0;
    std::vector<std::string> included_columns;
    std::vector<std::string> warnings;
    MockContext mock;
};

struct ParsedResponse {
    std::vector<std::string> values;
    std::vector<std::string> diagnostics;
};

/// ceil(bytes / 4); a deliberately model-agnostic estimate, monotone in
/// text length.
inline std::size_t estimate_tokens(std::string_view text) {
    return (text.size() + 3) / 4;
}

namespace detail {

inline std::string substitute(std::string templ, std::string_view key, std::string_view value) {
    const std::string needle = "{" + std::string(key) + "}";
    std::size_t pos = 0;
    while ((pos = templ.find(needle, pos)) != std::string::npos) {
        templ.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return templ;
}

/// Included columns: target first, then the remaining predictors in their
/// descending-strength order, the imputation feature last.
inline std::vector<std::string> included_columns(const PredictorSet& set,
                                                 const std::string& target) {
    std::vector<std::string> cols{target};
    for (const auto& p : set.predictors) {
        if (p != target) cols.push_back(p);
    }
    cols.push_back(set.feature);
    return cols;
}

inline std::string join_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ", ";
        out += cells[i];
    }
    return out;
}

}  // namespace detail

/// Renders the group-wise CSV-style prompt:
///   1. instruction block (task, output-only-the-column, exact missing count,
///      per-group counts),
///   2. one-line descriptions of every included column,
///   3. `num_example_sets` sets, each a header line followed by lettered
///      class groups of example rows,
///   4. the bridge sentence,
///   5. the missing records in the same grouped layout, masked cells shown
///      as `missing_display`.
/// Only predictor-set columns plus the target and the imputation feature
/// appear anywhere in the text.
inline RenderedPrompt render_grouped(
    const Dataset& d, const std::vector<ExampleSet>& examples,
    const std::map<std::string, std::vector<std::size_t>>& missing_by_class,
    const PromptConfig& cfg, const PredictorSet& predictor_set) {
    const std::string& target = d.schema()[d.target_index()].name;
    const std::string& feature = predictor_set.feature;
    std::size_t feature_col = d.column_index(feature);

    for (const auto& category : d.observed_domain(feature_col)) {
        if (ci_equal(category, cfg.missing_display)) {
            throw ColumnCollision("missing display '" + cfg.missing_display +
                                  "' collides with a category of '" + feature + "'");
        }
    }

    RenderedPrompt out;
    out.included_columns = detail::included_columns(predictor_set, target);
    out.mock.feature_kind = d.schema()[feature_col].kind;

    std::vector<std::size_t> col_idx;
    for (const auto& name : out.included_columns) col_idx.push_back(d.column_index(name));

    auto render_example_row = [&](std::size_t r) {
        std::vector<std::string> cells;
        for (std::size_t c : col_idx) {
            if (d.missing(r, c)) {
                throw IncompleteExample("example row " + std::to_string(r) +
                                        " is missing column '" + d.schema()[c].name + "'");
            }
            cells.push_back(d.value(r, c));
        }
        return detail::join_row(cells);
    };

    auto render_missing_row = [&](std::size_t r) {
        std::vector<std::string> cells;
        for (std::size_t c : col_idx) {
            if (c == feature_col) {
                cells.push_back(cfg.missing_display);
            } else if (d.missing(r, c)) {
                cells.push_back(cfg.missing_display);
                out.warnings.push_back("row " + std::to_string(r) + ": predictor '" +
                                       d.schema()[c].name +
                                       "' is itself missing; shown as missing display");
            } else {
                cells.push_back(d.value(r, c));
            }
        }
        return detail::join_row(cells);
    };

    // Missing-block composition and per-group counts, in configured order.
    std::vector<std::pair<std::size_t, const std::vector<std::size_t>*>> present_groups;
    std::size_t total_missing = 0;
    for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
        auto it = missing_by_class.find(cfg.groups[g].class_value);
        if (it == missing_by_class.end() || it->second.empty()) continue;
        present_groups.emplace_back(g, &it->second);
        total_missing += it->second.size();
    }

    std::vector<std::string> blocks;

    std::string instruction =
        detail::substitute(detail::substitute(cfg.instruction_template, "feature_name", feature),
                           "missing_count", std::to_string(total_missing));
    if (!present_groups.empty()) {
        std::string counts_line = "The incomplete records below are grouped:";
        for (std::size_t i = 0; i < present_groups.size(); ++i) {
            const auto& [g, rows] = present_groups[i];
            counts_line += (i ? "," : "") + std::string(" ") + group_letter(g) + " contains " +
                           std::to_string(rows->size()) + " records";
        }
        counts_line += ".";
        instruction += "\n" + counts_line;
    }
    blocks.push_back(std::move(instruction));

    std::string descriptions;
    for (std::size_t i = 0; i < out.included_columns.size(); ++i) {
        const auto& col = d.schema()[col_idx[i]];
        if (i) descriptions += "\n";
        descriptions += col.name + ": " + col.description + ",";
    }
    blocks.push_back(descriptions);

    std::string header = detail::join_row(out.included_columns);
    for (const auto& set : examples) {
        std::string block = header;
        for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
            auto it = set.rows_by_label.find(cfg.groups[g].class_value);
            block += "\n" + group_letter(g);
            if (it == set.rows_by_label.end()) continue;
            for (std::size_t r : it->second) {
                block += "\n" + render_example_row(r);
                out.mock.examples_by_class[cfg.groups[g].class_value].push_back(
                    d.value(r, feature_col));
            }
        }
        blocks.push_back(std::move(block));
    }

    std::string bridge = "Given the above data, fill in the missing values in the data sample below:";
    for (const auto& [g, rows] : present_groups) {
        bridge += "\n" + group_letter(g);
        for (std::size_t r : *rows) {
            bridge += "\n" + render_missing_row(r);
            out.manifest.push_back(r);
            out.mock.row_classes.push_back(cfg.groups[g].class_value);
        }
    }
    blocks.push_back(std::move(bridge));

    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i) out.text += "\n\n";
        out.text += blocks[i];
    }
    out.text += "\n";
    out.estimated_tokens = estimate_tokens(out.text);
    return out;
}

/// The ungrouped ablation variant: identical layout minus the group letter
/// lines; example rows appear in sampled order, missing rows in the given
/// flat order.
inline RenderedPrompt render_ungrouped(const Dataset& d,
                                       const std::vector<std::vector<std::size_t>>& example_sets,
                                       const std::vector<std::size_t>& missing_rows,
                                       const PromptConfig& cfg,
                                       const PredictorSet& predictor_set) {
    const std::string& target = d.schema()[d.target_index()].name;
    const std::string& feature = predictor_set.feature;
    std::size_t feature_col = d.column_index(feature);
    std::size_t target_col = d.target_index();

    for (const auto& category : d.observed_domain(feature_col)) {
        if (ci_equal(category, cfg.missing_display)) {
            throw ColumnCollision("missing display '" + cfg.missing_display +
                                  "' collides with a category of '" + feature + "'");
        }
    }

    RenderedPrompt out;
    out.included_columns = detail::included_columns(predictor_set, target);
    out.mock.feature_kind = d.schema()[feature_col].kind;

    std::vector<std::size_t> col_idx;
    for (const auto& name : out.included_columns) col_idx.push_back(d.column_index(name));

    std::vector<std::string> blocks;

    std::string instruction =
        detail::substitute(detail::substitute(cfg.instruction_template, "feature_name", feature),
                           "missing_count", std::to_string(missing_rows.size()));
    blocks.push_back(std::move(instruction));

    std::string descriptions;
    for (std::size_t i = 0; i < out.included_columns.size(); ++i) {
        const auto& col = d.schema()[col_idx[i]];
        if (i) descriptions += "\n";
        descriptions += col.name + ": " + col.description + ",";
    }
    blocks.push_back(descriptions);

    std::string header = detail::join_row(out.included_columns);
    for (const auto& set : example_sets) {
        std::string block = header;
        for (std::size_t r : set) {
            std::vector<std::string> cells;
            for (std::size_t c : col_idx) {
                if (d.missing(r, c)) {
                    throw IncompleteExample("example row " + std::to_string(r) +
                                            " is missing column '" + d.schema()[c].name + "'");
                }
                cells.push_back(d.value(r, c));
            }
            block += "\n" + detail::join_row(cells);
            out.mock.examples_by_class[d.value(r, target_col)].push_back(
                d.value(r, feature_col));
        }
        blocks.push_back(std::move(block));
    }

    std::string bridge = "Given the above data, fill in the missing values in the data sample below:";
    for (std::size_t r : missing_rows) {
        std::vector<std::string> cells;
        for (std::size_t c : col_idx) {
            if (c == feature_col) {
                cells.push_back(cfg.missing_display);
            } else if (d.missing(r, c)) {
                cells.push_back(cfg.missing_display);
                out.warnings.push_back("row " + std::to_string(r) + ": predictor '" +
                                       d.schema()[c].name +
                                       "' is itself missing; shown as missing display");
            } else {
                cells.push_back(d.value(r, c));
            }
        }
        bridge += "\n" + detail::join_row(cells);
        out.manifest.push_back(r);
        out.mock.row_classes.push_back(d.value(r, target_col));
    }
    blocks.push_back(std::move(bridge));

    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i) out.text += "\n\n";
        out.text += blocks[i];
    }
    out.text += "\n";
    out.estimated_tokens = estimate_tokens(out.text);
    return out;
}

/// Validates and canonicalizes a completion into exactly `expected` values.
/// Accepts one value per line or a comma-separated list; group letter lines
/// and blank lines are ignored; categorical values are matched against the
/// domain case-insensitively and returned in the dataset's spelling.
inline ParsedResponse parse_response(const std::string& raw, std::size_t expected,
                                     ColumnKind feature_kind,
                                     const std::vector<std::string>& domain) {
    if (expected == 0) throw Error("parse_response: expected count must be positive");

    auto is_group_marker = [](const std::string& s) {
        return s.size() == 2 && s[0] >= 'A' && s[0] <= 'Z' && s[1] == '.';
    };

    std::vector<std::string> lines;
    std::string current;
    auto flush_line = [&] {
        std::string t = trim(current);
        current.clear();
        if (t.empty() || is_group_marker(t)) return;
        lines.push_back(std::move(t));
    };
    for (char c : raw) {
        if (c == '\n') {
            flush_line();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    flush_line();

    ParsedResponse out;
    std::vector<std::string> values;
    if (lines.size() == expected) {
        values = std::move(lines);
        // Tolerate trailing commas on line-per-value output.
        for (auto& v : values) {
            if (!v.empty() && v.back() == ',') v = trim(v.substr(0, v.size() - 1));
        }
    } else {
        for (const auto& line : lines) {
            std::string piece;
            for (char c : line) {
                if (c == ',') {
                    std::string t = trim(piece);
                    if (!t.empty()) values.push_back(std::move(t));
                    piece.clear();
                } else {
                    piece.push_back(c);
                }
            }
            std::string t = trim(piece);
            if (!t.empty()) values.push_back(std::move(t));
        }
        if (values.size() != expected) throw CountMismatch(values.size(), expected);
        out.diagnostics.push_back("values recovered by splitting on commas");
    }

    for (std::size_t i = 0; i < values.size(); ++i) {
        std::string v = values[i];
        if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                              (v.front() == '\'' && v.back() == '\''))) {
            v = trim(v.substr(1, v.size() - 2));
        }
        if (feature_kind == ColumnKind::Categorical) {
            bool matched = false;
            for (const auto& canonical : domain) {
                if (ci_equal(v, canonical)) {
                    v = canonical;
                    matched = true;
                    break;
                }
            }
            if (!matched) throw DomainViolation(i, v);
        } else {
            auto num = parse_number(v);
            if (!num) throw NumericParseFailure(i, v);
            v = format_number(*num);
        }
        values[i] = std::move(v);
    }
    out.values = std::move(values);
    return out;
}

}  // namespace imputeforge

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "imputeforge/dataset.hpp"
#include "imputeforge/errors.hpp"
#include "imputeforge/rng.hpp"

namespace imputeforge {

struct EncodedMatrix {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;  // 1 = positive (minority class), 0 = negative
    std::vector<std::string> dimension_names;
    std::string positive_label;
    std::string negative_label;
    std::vector<std::string> warnings;

    std::size_t dimensions() const { return dimension_names.size(); }
};

/// One-hot encodes categorical columns over the categories observed in the
/// train split (fit on train only); numerical columns pass through unscaled.
/// Test categories unseen in training map to the all-zeros block with a
/// warning.
inline std::pair<EncodedMatrix, EncodedMatrix> encode(const Dataset& train, const Dataset& test) {
    if (train.column_count() != test.column_count()) {
        throw SchemaMismatch("train and test column counts differ");
    }
    for (std::size_t c = 0; c < train.column_count(); ++c) {
        if (train.schema()[c].name != test.schema()[c].name ||
            train.schema()[c].kind != test.schema()[c].kind) {
            throw SchemaMismatch("train and test schemas differ at column " + std::to_string(c));
        }
    }
    for (std::size_t r = 0; r < train.row_count(); ++r) {
        if (!train.row_complete(r)) throw Error("encode: train rows must be fully observed");
    }
    for (std::size_t r = 0; r < test.row_count(); ++r) {
        if (!test.row_complete(r)) throw Error("encode: test rows must be fully observed");
    }

    std::size_t target = train.target_index();
    ClassPartition partition = class_partition(train);

    struct ColumnCoding {
        std::size_t col;
        bool numerical;
        std::vector<std::string> categories;  // sorted; empty for numerical
    };
    std::vector<ColumnCoding> codings;
    EncodedMatrix tr, te;
    tr.positive_label = te.positive_label = partition.minority_label;
    tr.negative_label = te.negative_label = partition.majority_label;

    for (std::size_t c = 0; c < train.column_count(); ++c) {
        if (c == target) continue;
        if (train.schema()[c].kind == ColumnKind::Numerical) {
            codings.push_back({c, true, {}});
            tr.dimension_names.push_back(train.schema()[c].name);
        } else {
            auto cats = train.observed_domain(c);
            std::sort(cats.begin(), cats.end());
            for (const auto& cat : cats) {
                tr.dimension_names.push_back(train.schema()[c].name + "=" + cat);
            }
            codings.push_back({c, false, std::move(cats)});
        }
    }
    te.dimension_names = tr.dimension_names;

    auto encode_rows = [&](const Dataset& d, EncodedMatrix& m, bool warn_unseen) {
        std::set<std::string> warned;
        for (std::size_t r = 0; r < d.row_count(); ++r) {
            std::vector<double> row;
            row.reserve(m.dimension_names.size());
            for (const auto& coding : codings) {
                if (coding.numerical) {
                    row.push_back(d.number(r, coding.col));
                    continue;
                }
                const std::string& v = d.value(r, coding.col);
                auto it = std::lower_bound(coding.categories.begin(), coding.categories.end(), v);
                bool found = it != coding.categories.end() && *it == v;
                for (std::size_t k = 0; k < coding.categories.size(); ++k) {
                    row.push_back(found && coding.categories[k] == v ? 1.0 : 0.0);
                }
                if (!found && warn_unseen) {
                    std::string key = d.schema()[coding.col].name + "=" + v;
                    if (warned.insert(key).second) {
                        m.warnings.push_back("unseen category in test split: " + key);
                    }
                }
            }
            m.rows.push_back(std::move(row));
            m.labels.push_back(d.value(r, target) == m.positive_label ? 1 : 0);
        }
    };
    encode_rows(train, tr, false);
    encode_rows(test, te, true);
    return {std::move(tr), std::move(te)};
}

enum class ForestMode { RandomForest, GradientStub };

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t max_depth = 0;  // 0 = unbounded (GradientStub defaults to 6)
    std::size_t min_samples_leaf = 1;
    bool bootstrap = true;
    std::uint64_t seed = 0;
    ForestMode mode = ForestMode::RandomForest;
};

inline const char* forest_mode_name(ForestMode m) {
    return m == ForestMode::RandomForest ? "random_forest" : "gradient_stub";
}

namespace detail {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t pos = 0;
    std::size_t neg = 0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    bool leaf_votes_positive(int node) const {
        return nodes[static_cast<std::size_t>(node)].pos >=
               nodes[static_cast<std::size_t>(node)].neg;
    }

    bool predict(const std::vector<double>& row) const {
        int node = 0;
        while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
            const auto& n = nodes[static_cast<std::size_t>(node)];
            node = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        return leaf_votes_positive(node);
    }
};

inline double gini(std::size_t pos, std::size_t neg) {
    double n = static_cast<double>(pos + neg);
    if (n == 0.0) return 0.0;
    double p = static_cast<double>(pos) / n;
    double q = static_cast<double>(neg) / n;
    return 1.0 - p * p - q * q;
}

class TreeBuilder {
public:
    TreeBuilder(const EncodedMatrix& m, std::size_t max_depth, std::size_t min_samples_leaf,
                std::size_t features_per_split, Rng& rng)
        : m_(m),
          max_depth_(max_depth),
          min_leaf_(min_samples_leaf),
          per_split_(features_per_split),
          rng_(rng) {}

    Tree build(std::vector<std::size_t> indices) {
        Tree tree;
        grow(tree, std::move(indices), 0);
        return tree;
    }

private:
    int grow(Tree& tree, std::vector<std::size_t> indices, std::size_t depth) {
        std::size_t pos = 0;
        for (std::size_t i : indices) pos += m_.labels[i] == 1 ? 1 : 0;
        std::size_t neg = indices.size() - pos;

        int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[static_cast<std::size_t>(id)].pos = pos;
        tree.nodes[static_cast<std::size_t>(id)].neg = neg;

        bool can_split = pos != 0 && neg != 0 && indices.size() >= 2 * min_leaf_ &&
                         (max_depth_ == 0 || depth < max_depth_);
        if (!can_split) return id;

        double parent_impurity = gini(pos, neg);
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = parent_impurity - 1e-12;  // require strict improvement

        auto candidates = rng_.sample_without_replacement(m_.dimensions(), per_split_);
        std::vector<std::pair<double, int>> ordered;  // (value, label)
        for (std::size_t f : candidates) {
            ordered.clear();
            ordered.reserve(indices.size());
            for (std::size_t i : indices) ordered.emplace_back(m_.rows[i][f], m_.labels[i]);
            std::sort(ordered.begin(), ordered.end());

            std::size_t left_pos = 0, left_n = 0;
            for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
                left_pos += ordered[i].second == 1 ? 1 : 0;
                ++left_n;
                if (ordered[i].first == ordered[i + 1].first) continue;
                std::size_t right_n = ordered.size() - left_n;
                if (left_n < min_leaf_ || right_n < min_leaf_) continue;
                std::size_t right_pos = pos - left_pos;
                double weighted =
                    (static_cast<double>(left_n) * gini(left_pos, left_n - left_pos) +
                     static_cast<double>(right_n) * gini(right_pos, right_n - right_pos)) /
                    static_cast<double>(ordered.size());
                if (weighted < best_score) {
                    best_score = weighted;
                    best_feature = static_cast<int>(f);
                    best_threshold = ordered[i].first +
                                     (ordered[i + 1].first - ordered[i].first) / 2.0;
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::size_t> left, right;
        for (std::size_t i : indices) {
            (m_.rows[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right)
                .push_back(i);
        }
        if (left.empty() || right.empty()) return id;

        indices.clear();
        indices.shrink_to_fit();
        tree.nodes[static_cast<std::size_t>(id)].feature = best_feature;
        tree.nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
        int l = grow(tree, std::move(left), depth + 1);
        int r = grow(tree, std::move(right), depth + 1);
        tree.nodes[static_cast<std::size_t>(id)].left = l;
        tree.nodes[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    const EncodedMatrix& m_;
    std::size_t max_depth_;
    std::size_t min_leaf_;
    std::size_t per_split_;
    Rng& rng_;
};

}  // namespace detail

/// Bagged CART ensemble with Gini splits and per-node random feature
/// subsets (floor(sqrt(d))). Per-tree seeds derive from the run seed, so
/// training is reproducible and parallelizable without changing results.
class Forest {
public:
    Forest() = default;

    static Forest train(const EncodedMatrix& m, const ForestConfig& cfg) {
        if (m.rows.empty()) throw SingleClassTraining("empty training matrix");
        bool has_pos = false, has_neg = false;
        for (int l : m.labels) (l == 1 ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg) {
            throw SingleClassTraining("training labels contain a single class");
        }

        Forest forest;
        forest.dimensions_ = m.dimensions();
        forest.mode_ = cfg.mode;
        std::size_t depth = cfg.max_depth;
        if (depth == 0 && cfg.mode == ForestMode::GradientStub) depth = 6;
        std::size_t per_split = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m.dimensions())))));

        for (std::size_t t = 0; t < cfg.n_trees; ++t) {
            Rng rng(tree_seed(cfg, t));
            std::vector<std::size_t> indices;
            indices.reserve(m.rows.size());
            if (cfg.bootstrap) {
                for (std::size_t i = 0; i < m.rows.size(); ++i) {
                    indices.push_back(static_cast<std::size_t>(rng.bounded(m.rows.size())));
                }
            } else {
                for (std::size_t i = 0; i < m.rows.size(); ++i) indices.push_back(i);
            }
            detail::TreeBuilder builder(m, depth, cfg.min_samples_leaf, per_split, rng);
            forest.trees_.push_back(builder.build(std::move(indices)));
        }
        return forest;
    }

    /// Fraction of trees voting the positive class, one entry per row.
    std::vector<double> predict_proba(const EncodedMatrix& m) const {
        if (m.dimensions() != dimensions_) {
            throw DimensionMismatch("matrix has " + std::to_string(m.dimensions()) +
                                    " dimensions, model expects " + std::to_string(dimensions_));
        }
        std::vector<double> out;
        out.reserve(m.rows.size());
        for (const auto& row : m.rows) {
            std::size_t votes = 0;
            for (const auto& tree : trees_) votes += tree.predict(row) ? 1 : 0;
            out.push_back(static_cast<double>(votes) / static_cast<double>(trees_.size()));
        }
        return out;
    }

    /// Probability ≥ 0.5 predicts the positive class (ties to positive).
    std::vector<int> predict(const EncodedMatrix& m) const {
        std::vector<int> out;
        for (double p : predict_proba(m)) out.push_back(p >= 0.5 ? 1 : 0);
        return out;
    }

    std::size_t tree_count() const { return trees_.size(); }

    /// Read access to the fitted trees for inspection and audits.
    const std::vector<detail::Tree>& trees() const { return trees_; }

private:
    static std::uint64_t tree_seed(const ForestConfig& cfg, std::size_t t) {
        if (cfg.mode == ForestMode::RandomForest) return cfg.seed + t;
        return splitmix64(cfg.seed ^ 0xA02BDBF7BB3C0A7Aull) + t;
    }

    std::vector<detail::Tree> trees_;
    std::size_t dimensions_ = 0;
    ForestMode mode_ = ForestMode::RandomForest;
};

inline Forest train_forest(const EncodedMatrix& m, const ForestConfig& cfg) {
    return Forest::train(m, cfg);
}

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvaluationReport {
    std::map<std::string, ClassMetrics> per_class;
    std::map<std::string, std::size_t> support;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    double balanced_accuracy = 0.0;
    double roc_auc = 0.0;
    std::vector<std::string> warnings;
    std::string model_tag;
    std::string threshold_tag;
    std::optional<double> feature_space_reduction_pct;
    std::optional<std::size_t> total_prompt_tokens;
    std::optional<double> token_reduction_pct;  // versus the zero-threshold variant
};

/// AUC by the rank statistic with average ranks for ties; identical to the
/// pairwise definition P(score⁺ > score⁻) + ½·P(tie).
inline double rank_auc(const std::vector<int>& labels, const std::vector<double>& scores,
                       std::vector<std::string>* warnings = nullptr) {
    std::size_t n = labels.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double pos_rank_sum = 0.0;
    std::size_t pos = 0, neg = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                pos_rank_sum += avg_rank;
                ++pos;
            } else {
                ++neg;
            }
        }
        i = j;
    }
    if (pos == 0 || neg == 0) {
        if (warnings != nullptr) warnings->push_back("roc_auc undefined: one class absent");
        return 0.0;
    }
    double p = static_cast<double>(pos);
    return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

/// Per-class precision/recall/F1, macro and support-weighted F1, balanced
/// accuracy and ROC AUC. Zero-denominator cells report 0 with a warning so
/// the report stays total.
inline EvaluationReport classification_report(const std::vector<std::string>& truth,
                                              const std::vector<std::string>& predicted,
                                              const std::vector<double>& positive_scores,
                                              const std::string& positive_label,
                                              const std::string& negative_label) {
    if (truth.size() != predicted.size() || truth.size() != positive_scores.size()) {
        throw LengthMismatch("classification_report: input lengths differ");
    }
    if (truth.empty()) throw LengthMismatch("classification_report: empty inputs");

    EvaluationReport report;
    auto metrics_for = [&](const std::string& label) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            bool t = truth[i] == label;
            bool p = predicted[i] == label;
            if (t && p) ++tp;
            if (!t && p) ++fp;
            if (t && !p) ++fn;
        }
        ClassMetrics m;
        if (tp + fp == 0) {
            report.warnings.push_back("precision undefined for class '" + label + "', reported 0");
        } else {
            m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        }
        if (tp + fn == 0) {
            report.warnings.push_back("recall undefined for class '" + label + "', reported 0");
        } else {
            m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        }
        if (m.precision + m.recall > 0.0) {
            m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        }
        report.per_class[label] = m;
        report.support[label] = tp + fn;
        return m;
    };

    ClassMetrics mp = metrics_for(positive_label);
    ClassMetrics mn = metrics_for(negative_label);
    report.balanced_accuracy = (mp.recall + mn.recall) / 2.0;
    report.macro_f1 = (mp.f1 + mn.f1) / 2.0;
    std::size_t total = report.support[positive_label] + report.support[negative_label];
    if (total > 0) {
        report.weighted_f1 = (mp.f1 * static_cast<double>(report.support[positive_label]) +
                              mn.f1 * static_cast<double>(report.support[negative_label])) /
                             static_cast<double>(total);
    }

    std::vector<int> labels01;
    labels01.reserve(truth.size());
    for (const auto& t : truth) labels01.push_back(t == positive_label ? 1 : 0);
    report.roc_auc = rank_auc(labels01, positive_scores, &report.warnings);
    return report;
}

/// Trains on the complete rows of `original`, tests on the imputed rows, and
/// reports the full metric suite.
inline EvaluationReport evaluate_imputation(const Dataset& original, const Dataset& imputed_rows,
                                            const ForestConfig& cfg) {
    auto [complete, incomplete] = split_complete_incomplete(original);
    if (complete.row_count() == 0) throw SingleClassTraining("no complete rows to train on");

    auto [train_m, test_m] = encode(complete, imputed_rows);
    Forest forest = Forest::train(train_m, cfg);
    std::vector<double> scores = forest.predict_proba(test_m);
    std::vector<int> pred01 = forest.predict(test_m);

    std::size_t target = imputed_rows.target_index();
    std::vector<std::string> truth, predicted;
    for (std::size_t r = 0; r < imputed_rows.row_count(); ++r) {
        truth.push_back(imputed_rows.value(r, target));
        predicted.push_back(pred01[r] == 1 ? test_m.positive_label : test_m.negative_label);
    }
    EvaluationReport report = classification_report(truth, predicted, scores,
                                                    test_m.positive_label, test_m.negative_label);
    report.model_tag = forest_mode_name(cfg.mode);
    for (const auto& w : test_m.warnings) report.warnings.push_back(w);
    return report;
}

}  // namespace imputeforge

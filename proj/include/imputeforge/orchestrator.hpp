#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imputeforge/backend.hpp"
#include "imputeforge/dataset.hpp"
#include "imputeforge/errors.hpp"
#include "imputeforge/prompt.hpp"
#include "imputeforge/rng.hpp"
#include "imputeforge/threshold.hpp"

namespace imputeforge {

/// One prompt's worth of missing records, grouped by class in prompt-group
/// order. Trailing chunks may be unbalanced or single-class.
struct ChunkSpec {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> rows_by_class;

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& [label, rows] : rows_by_class) n += rows.size();
        return n;
    }
};

struct ImputationPlan {
    std::vector<std::string> ordered_features;
    std::map<std::string, PredictorSet> predictor_sets;
    std::map<std::string, std::vector<ChunkSpec>> chunks;
    PromptConfig prompt_config;
    std::uint64_t seed = 0;
};

struct ChunkLogEntry {
    std::string feature;
    std::size_t chunk_index = 0;
    std::size_t row_count = 0;
    std::size_t prompt_tokens = 0;
    std::size_t completion_calls = 0;  // completion attempts, parse retries included
    bool fallback_used = false;
    std::string style;
    std::vector<std::string> warnings;
};

struct ImputationLog {
    std::vector<ChunkLogEntry> entries;
};

struct RunResult {
    Dataset imputed;
    ImputationLog log;
};

/// Features that other imputation features rely on go first:
/// score(f) = |{g ≠ f : f ∈ predictors(g)}|, descending; ties by ascending
/// missing-cell count, then schema order.
inline std::vector<std::string> relevance_order(
    const std::vector<std::string>& imputation_features,
    const std::map<std::string, PredictorSet>& predictor_sets,
    const std::map<std::string, std::size_t>& missing_counts) {
    struct Entry {
        std::string feature;
        std::size_t score;
        std::size_t missing;
        std::size_t schema_pos;
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < imputation_features.size(); ++i) {
        const auto& f = imputation_features[i];
        std::size_t score = 0;
        for (const auto& g : imputation_features) {
            if (g == f) continue;
            auto it = predictor_sets.find(g);
            if (it != predictor_sets.end() && it->second.contains(f)) ++score;
        }
        auto mit = missing_counts.find(f);
        std::size_t miss = mit == missing_counts.end() ? 0 : mit->second;
        entries.push_back({f, score, miss, i});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.missing != b.missing) return a.missing < b.missing;
        return a.schema_pos < b.schema_pos;
    });
    std::vector<std::string> out;
    for (const auto& e : entries) out.push_back(e.feature);
    return out;
}

/// Splits each class's missing rows into consecutive runs of at most
/// `k_per_group` (original row order) and zips the runs together. Every
/// missing row lands in exactly one chunk; empty class blocks are omitted.
inline std::vector<ChunkSpec> chunk_missing(
    const std::vector<std::pair<std::string, std::vector<std::size_t>>>& missing_by_class,
    std::size_t k_per_group) {
    if (k_per_group == 0) throw InvalidSchema("chunk size must be at least 1");
    std::size_t n_chunks = 0;
    for (const auto& [label, rows] : missing_by_class) {
        n_chunks = std::max(n_chunks, (rows.size() + k_per_group - 1) / k_per_group);
    }
    std::vector<ChunkSpec> chunks(n_chunks);
    for (const auto& [label, rows] : missing_by_class) {
        for (std::size_t c = 0; c * k_per_group < rows.size(); ++c) {
            std::size_t begin = c * k_per_group;
            std::size_t end = std::min(begin + k_per_group, rows.size());
            chunks[c].rows_by_class.emplace_back(
                label, std::vector<std::size_t>(rows.begin() + begin, rows.begin() + end));
        }
    }
    return chunks;
}

/// Builds the full plan for a dataset: relevance ordering over the given
/// predictor sets plus per-feature chunking of the missing rows.
inline ImputationPlan build_plan(const Dataset& d,
                                 const std::map<std::string, PredictorSet>& predictor_sets,
                                 const PromptConfig& prompt_config, std::uint64_t seed) {
    ImputationPlan plan;
    plan.predictor_sets = predictor_sets;
    plan.prompt_config = prompt_config;
    plan.seed = seed;

    std::vector<std::string> features;
    for (const auto& col : d.schema()) {
        if (predictor_sets.count(col.name)) features.push_back(col.name);
    }
    std::map<std::string, std::size_t> missing_counts;
    for (const auto& f : features) missing_counts[f] = d.missing_count(d.column_index(f));
    plan.ordered_features = relevance_order(features, predictor_sets, missing_counts);

    for (const auto& f : features) {
        std::size_t col = d.column_index(f);
        std::vector<std::pair<std::string, std::vector<std::size_t>>> by_class;
        for (const auto& group : prompt_config.groups) by_class.emplace_back(group.class_value, std::vector<std::size_t>{});
        std::size_t target = d.target_index();
        for (std::size_t r = 0; r < d.row_count(); ++r) {
            if (!d.missing(r, col)) continue;
            const std::string& label = d.value(r, target);
            bool placed = false;
            for (auto& [l, rows] : by_class) {
                if (l == label) {
                    rows.push_back(r);
                    placed = true;
                    break;
                }
            }
            if (!placed) throw NonBinaryTarget("row class '" + label + "' is not a configured group");
        }
        plan.chunks[f] = chunk_missing(by_class, prompt_config.examples_per_group);
    }
    return plan;
}

namespace detail {

inline std::vector<std::vector<std::size_t>> flat_example_sets(
    const std::vector<std::size_t>& pool, std::size_t per_set, std::size_t num_sets,
    std::uint64_t seed) {
    std::size_t need = per_set * num_sets;
    if (pool.size() < need) {
        throw InsufficientCompleteRows("need " + std::to_string(need) +
                                       " complete example rows, have " +
                                       std::to_string(pool.size()));
    }
    Rng rng(seed);
    auto picks = rng.sample_without_replacement(pool.size(), need);
    std::vector<std::vector<std::size_t>> sets(num_sets);
    for (std::size_t s = 0; s < num_sets; ++s) {
        for (std::size_t i = 0; i < per_set; ++i) sets[s].push_back(pool[picks[s * per_set + i]]);
    }
    return sets;
}

}  // namespace detail

/// Executes the plan: features strictly in order, fresh seeded examples per
/// chunk, grouped (or ungrouped) prompts restricted to each feature's
/// predictor set, backend completion, response validation, and write-back.
/// A completed feature column becomes context for the features after it.
/// Parse failures retry the completion up to max_retries, then fall back to
/// the offline mock with the fallback flag set.
inline RunResult run(const ImputationPlan& plan, const Dataset& dataset,
                     const BackendConfig& backend_cfg, const std::string& dump_dir = "",
                     const std::atomic<bool>* interrupt = nullptr,
                     ImputationLog* partial_log = nullptr) {
    Dataset working = dataset;
    ImputationLog log;
    Backend backend(backend_cfg);
    const PromptConfig& cfg = plan.prompt_config;
    bool grouped = cfg.style == PromptStyle::Grouped;

    // Example pool: rows complete in the input dataset, keyed by class.
    ClassPartition pool;
    {
        ClassPartition full = class_partition(dataset);
        pool.majority_label = full.majority_label;
        pool.minority_label = full.minority_label;
        for (const auto& [label, rows] : full.row_indices_by_label) {
            auto& dst = pool.row_indices_by_label[label];
            for (std::size_t r : rows) {
                if (dataset.row_complete(r)) dst.push_back(r);
            }
        }
    }
    std::vector<std::size_t> flat_pool;
    for (std::size_t r = 0; r < dataset.row_count(); ++r) {
        if (dataset.row_complete(r)) flat_pool.push_back(r);
    }

    if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);
    std::size_t dump_counter = 0;

    for (std::size_t fi = 0; fi < plan.ordered_features.size(); ++fi) {
        const std::string& feature = plan.ordered_features[fi];
        std::size_t feature_col = working.column_index(feature);
        ColumnKind kind = working.schema()[feature_col].kind;
        std::vector<std::string> domain = working.observed_domain(feature_col);
        const PredictorSet& predictors = plan.predictor_sets.at(feature);
        const auto& chunks = plan.chunks.at(feature);

        for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
            if (interrupt != nullptr && interrupt->load()) {
                if (partial_log != nullptr) *partial_log = log;
                throw Interrupted();
            }
            const ChunkSpec& chunk = chunks[ci];
            std::uint64_t chunk_seed = derive_seed(plan.seed, fi, ci);

            RenderedPrompt prompt;
            if (grouped) {
                auto examples = sample_examples(working, pool, cfg.examples_per_group,
                                                cfg.num_example_sets, chunk_seed);
                std::map<std::string, std::vector<std::size_t>> missing_by_class;
                for (const auto& [label, rows] : chunk.rows_by_class) missing_by_class[label] = rows;
                prompt = render_grouped(working, examples, missing_by_class, cfg, predictors);
            } else {
                std::size_t per_set = cfg.examples_per_group * cfg.groups.size();
                auto sets = detail::flat_example_sets(flat_pool, per_set, cfg.num_example_sets,
                                                      chunk_seed);
                std::vector<std::size_t> missing_rows;
                for (const auto& [label, rows] : chunk.rows_by_class) {
                    missing_rows.insert(missing_rows.end(), rows.begin(), rows.end());
                }
                std::sort(missing_rows.begin(), missing_rows.end());
                prompt = render_ungrouped(working, sets, missing_rows, cfg, predictors);
            }

            if (!dump_dir.empty()) {
                char name[32];
                std::snprintf(name, sizeof(name), "%03zu", dump_counter++);
                std::string stem = dump_dir + "/" + name + "_" + feature;
                std::ofstream txt(stem + ".txt", std::ios::binary);
                txt << prompt.text;
                nlohmann::json manifest{{"feature", feature},
                                        {"chunk", ci},
                                        {"rows", prompt.manifest},
                                        {"expected_values", prompt.manifest.size()}};
                std::ofstream mf(stem + ".manifest.json");
                mf << manifest.dump(2) << '\n';
            }

            ChunkLogEntry entry;
            entry.feature = feature;
            entry.chunk_index = ci;
            entry.row_count = prompt.manifest.size();
            entry.prompt_tokens = prompt.estimated_tokens;
            entry.style = grouped ? "grouped" : "ungrouped";
            entry.warnings = prompt.warnings;

            ParsedResponse parsed;
            bool have_values = false;
            for (std::size_t attempt = 0; attempt <= backend_cfg.max_retries && !have_values;
                 ++attempt) {
                ++entry.completion_calls;
                try {
                    CompletionExchange ex = backend.complete(prompt);
                    parsed = parse_response(ex.response_text, prompt.manifest.size(), kind, domain);
                    have_values = true;
                } catch (const AuthMissing&) {
                    throw;  // precondition failure; the fallback must not mask it
                } catch (const Error& e) {
                    entry.warnings.push_back("attempt " + std::to_string(attempt + 1) +
                                             " failed: " + e.what());
                }
            }
            if (!have_values) {
                entry.fallback_used = true;
                parsed = parse_response(mock_impute(prompt.mock), prompt.manifest.size(), kind,
                                        domain);
            }

            for (std::size_t i = 0; i < prompt.manifest.size(); ++i) {
                working.set_cell(prompt.manifest[i], feature_col, parsed.values[i]);
            }
            log.entries.push_back(std::move(entry));
        }
    }
    return {std::move(working), std::move(log)};
}

/// Grouped-versus-ungrouped comparison run with equalized sampling: the
/// ungrouped style draws the same number of example rows per prompt, just
/// without class separation.
inline RunResult ablation_run(const Dataset& dataset,
                              const std::map<std::string, PredictorSet>& predictor_sets,
                              const BackendConfig& backend_cfg, PromptStyle style,
                              PromptConfig prompt_config, std::uint64_t seed,
                              const std::string& dump_dir = "") {
    prompt_config.style = style;
    ImputationPlan plan = build_plan(dataset, predictor_sets, prompt_config, seed);
    return run(plan, dataset, backend_cfg, dump_dir);
}

// ---- manifest serialization ----------------------------------------------

inline nlohmann::json plan_to_json(const ImputationPlan& plan) {
    nlohmann::json sets = nlohmann::json::object();
    for (const auto& [feature, set] : plan.predictor_sets) {
        sets[feature] = {{"threshold", set.threshold},
                         {"predictors", set.predictors},
                         {"candidates", set.candidate_count},
                         {"removed", set.removed_count},
                         {"reduction_ratio", set.reduction_ratio}};
    }
    nlohmann::json chunks = nlohmann::json::object();
    for (const auto& [feature, feature_chunks] : plan.chunks) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& chunk : feature_chunks) {
            nlohmann::json c = nlohmann::json::object();
            for (const auto& [label, rows] : chunk.rows_by_class) c[label] = rows;
            arr.push_back(c);
        }
        chunks[feature] = arr;
    }
    return {{"ordered_features", plan.ordered_features},
            {"predictor_sets", sets},
            {"chunks", chunks},
            {"seed", plan.seed}};
}

inline nlohmann::json log_to_json(const ImputationLog& log) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : log.entries) {
        arr.push_back({{"feature", e.feature},
                       {"chunk", e.chunk_index},
                       {"rows", e.row_count},
                       {"prompt_tokens", e.prompt_tokens},
                       {"completion_calls", e.completion_calls},
                       {"fallback_used", e.fallback_used},
                       {"style", e.style},
                       {"warnings", e.warnings}});
    }
    return arr;
}

}  // namespace imputeforge

#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imputeforge/backend.hpp"
#include "imputeforge/dataset.hpp"
#include "imputeforge/errors.hpp"
#include "imputeforge/prompt.hpp"
#include "imputeforge/threshold.hpp"
#include "imputeforge/util.hpp"

namespace imputeforge {

/// Declarative description of one pipeline run. Loaded from JSON; individual
/// command-line flags override file values.
struct RunConfig {
    std::string dataset_path;
    std::string schema_path;
    std::vector<std::string> sentinels = default_sentinels();
    std::vector<std::string> imputation_features;  // empty = auto (columns with gaps)
    PolicyMode policy_mode = PolicyMode::Fixed;
    std::vector<double> thresholds{0.2};  // used by Fixed mode, one variant each
    PromptConfig prompt;
    BackendConfig backend;
    std::size_t eval_trees = 100;
    std::size_t eval_max_depth = 0;
    std::uint64_t seed = 7;
    std::string out_dir = "out";
    bool groups_configured = false;  // set when the config file pins group order
};

inline const char* policy_mode_name(PolicyMode m) {
    switch (m) {
        case PolicyMode::PerFeature: return "elbow";
        case PolicyMode::GlobalMin: return "global-min";
        case PolicyMode::Fixed: return "fixed";
    }
    return "unknown";
}

inline PolicyMode parse_policy_mode(const std::string& name) {
    if (name == "elbow" || name == "per-feature") return PolicyMode::PerFeature;
    if (name == "global-min") return PolicyMode::GlobalMin;
    if (name == "fixed") return PolicyMode::Fixed;
    throw InvalidSchema("unknown policy mode: " + name);
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidSchema("config file is not valid JSON: " + std::string(e.what()));
    }

    RunConfig cfg;
    try {
        if (doc.contains("dataset")) cfg.dataset_path = doc["dataset"].get<std::string>();
        if (doc.contains("schema")) cfg.schema_path = doc["schema"].get<std::string>();
        if (doc.contains("sentinels")) {
            cfg.sentinels = doc["sentinels"].get<std::vector<std::string>>();
        }
        if (doc.contains("imputation_features")) {
            const auto& f = doc["imputation_features"];
            if (f.is_string() && f.get<std::string>() != "auto") {
                throw InvalidSchema("imputation_features must be \"auto\" or a list");
            }
            if (f.is_array()) cfg.imputation_features = f.get<std::vector<std::string>>();
        }
        if (doc.contains("policy")) {
            const auto& p = doc["policy"];
            if (p.contains("mode")) cfg.policy_mode = parse_policy_mode(p["mode"].get<std::string>());
            if (p.contains("thresholds")) {
                cfg.thresholds = p["thresholds"].get<std::vector<double>>();
            }
        }
        if (doc.contains("prompt")) {
            const auto& p = doc["prompt"];
            if (p.contains("num_example_sets")) {
                cfg.prompt.num_example_sets = p["num_example_sets"].get<std::size_t>();
            }
            if (p.contains("examples_per_group")) {
                cfg.prompt.examples_per_group = p["examples_per_group"].get<std::size_t>();
            }
            if (p.contains("missing_display")) {
                cfg.prompt.missing_display = p["missing_display"].get<std::string>();
            }
            if (p.contains("instruction_template")) {
                cfg.prompt.instruction_template = p["instruction_template"].get<std::string>();
            }
            if (p.contains("style")) {
                std::string style = p["style"].get<std::string>();
                if (style == "grouped") {
                    cfg.prompt.style = PromptStyle::Grouped;
                } else if (style == "ungrouped") {
                    cfg.prompt.style = PromptStyle::Ungrouped;
                } else {
                    throw InvalidSchema("unknown prompt style: " + style);
                }
            }
            if (p.contains("groups")) {
                for (const auto& g : p["groups"]) {
                    GroupSpec spec;
                    spec.class_value = g.at("class").get<std::string>();
                    spec.display_label = g.contains("label") ? g["label"].get<std::string>()
                                                             : spec.class_value;
                    cfg.prompt.groups.push_back(std::move(spec));
                }
                cfg.groups_configured = !cfg.prompt.groups.empty();
            }
        }
        if (doc.contains("backend")) {
            const auto& b = doc["backend"];
            if (b.contains("kind")) {
                std::string kind = b["kind"].get<std::string>();
                if (kind == "mock") {
                    cfg.backend.kind = BackendKind::MockMode;
                } else if (kind == "http") {
                    cfg.backend.kind = BackendKind::HttpChat;
                } else {
                    throw InvalidSchema("unknown backend kind: " + kind);
                }
            }
            if (b.contains("endpoint")) cfg.backend.endpoint = b["endpoint"].get<std::string>();
            if (b.contains("model")) cfg.backend.model = b["model"].get<std::string>();
            if (b.contains("temperature")) cfg.backend.temperature = b["temperature"].get<double>();
            if (b.contains("max_output_tokens")) {
                cfg.backend.max_output_tokens = b["max_output_tokens"].get<std::size_t>();
            }
            if (b.contains("timeout_s")) cfg.backend.timeout_s = b["timeout_s"].get<double>();
            if (b.contains("max_retries")) {
                cfg.backend.max_retries = b["max_retries"].get<std::size_t>();
            }
            if (b.contains("api_key_env")) {
                cfg.backend.api_key_env = b["api_key_env"].get<std::string>();
            }
            if (b.contains("max_in_flight")) {
                cfg.backend.max_in_flight = b["max_in_flight"].get<std::size_t>();
            }
            if (b.contains("backoff_base_ms")) {
                cfg.backend.backoff_base_ms = b["backoff_base_ms"].get<std::size_t>();
            }
        }
        if (doc.contains("evaluation")) {
            const auto& e = doc["evaluation"];
            if (e.contains("n_trees")) cfg.eval_trees = e["n_trees"].get<std::size_t>();
            if (e.contains("max_depth")) cfg.eval_max_depth = e["max_depth"].get<std::size_t>();
        }
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("out")) cfg.out_dir = doc["out"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidSchema("malformed config: " + std::string(e.what()));
    }
    return cfg;
}

/// Canonical JSON view of the resolved configuration; hashed into manifests
/// so a run can be replayed and checked.
inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : cfg.prompt.groups) {
        groups.push_back({{"class", g.class_value}, {"label", g.display_label}});
    }
    return {
        {"dataset", cfg.dataset_path},
        {"schema", cfg.schema_path},
        {"sentinels", cfg.sentinels},
        {"imputation_features",
         cfg.imputation_features.empty() ? nlohmann::json("auto")
                                         : nlohmann::json(cfg.imputation_features)},
        {"policy", {{"mode", policy_mode_name(cfg.policy_mode)}, {"thresholds", cfg.thresholds}}},
        {"prompt",
         {{"num_example_sets", cfg.prompt.num_example_sets},
          {"examples_per_group", cfg.prompt.examples_per_group},
          {"missing_display", cfg.prompt.missing_display},
          {"style", cfg.prompt.style == PromptStyle::Grouped ? "grouped" : "ungrouped"},
          {"instruction_template", cfg.prompt.instruction_template},
          {"groups", groups}}},
        {"backend",
         {{"kind", cfg.backend.kind == BackendKind::MockMode ? "mock" : "http"},
          {"endpoint", cfg.backend.endpoint},
          {"model", cfg.backend.model},
          {"temperature", cfg.backend.temperature},
          {"max_output_tokens", cfg.backend.max_output_tokens},
          {"timeout_s", cfg.backend.timeout_s},
          {"max_retries", cfg.backend.max_retries},
          {"api_key_env", cfg.backend.api_key_env},
          {"max_in_flight", cfg.backend.max_in_flight}}},
        {"evaluation", {{"n_trees", cfg.eval_trees}, {"max_depth", cfg.eval_max_depth}}},
        {"seed", cfg.seed},
        {"out", cfg.out_dir},
    };
}

inline std::string run_config_hash(const RunConfig& cfg) {
    return hex64(fnv1a64(run_config_to_json(cfg).dump()));
}

/// Default group order: minority class first (group A), majority second.
inline void ensure_groups(RunConfig& cfg, const Dataset& d) {
    if (cfg.groups_configured && !cfg.prompt.groups.empty()) return;
    ClassPartition p = class_partition(d);
    cfg.prompt.groups = {{p.minority_label, p.minority_label},
                         {p.majority_label, p.majority_label}};
}

}  // namespace imputeforge

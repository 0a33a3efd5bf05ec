// imputeforge: impute missing values in class-imbalanced tabular datasets by
// prompting a completion backend with group-wise CSV-style prompts whose
// context is pruned to strongly associated predictors.
//
// Subcommands: analyze, impute, evaluate, ablation, inject.
// Exit codes: 0 success, 1 usage, 2 data/schema, 3 backend/auth,
//             4 parse exhaustion with failed fallback, 130 interrupted.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "imputeforge/imputeforge.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace imputeforge;

namespace {

std::atomic<bool> g_interrupted{false};

void handle_sigint(int) { g_interrupted.store(true); }

struct FlagOverrides {
    std::optional<std::string> dataset;
    std::optional<std::string> schema;
    std::vector<double> thresholds;
    std::optional<std::string> policy;
    std::optional<std::string> backend;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> features;
};

void add_common_options(CLI::App* cmd, std::string& config_path, FlagOverrides& flags) {
    cmd->add_option("--config", config_path, "JSON run configuration file");
    cmd->add_option("--dataset", flags.dataset, "dataset CSV path (overrides config)");
    cmd->add_option("--schema", flags.schema, "schema JSON path (overrides config)");
    cmd->add_option("--threshold", flags.thresholds,
                    "fixed correlation threshold, repeatable (overrides config)");
    cmd->add_option("--policy", flags.policy, "threshold policy: elbow, fixed or global-min")
        ->check(CLI::IsMember({"elbow", "fixed", "global-min"}));
    cmd->add_option("--backend", flags.backend, "completion backend: http or mock")
        ->check(CLI::IsMember({"http", "mock"}));
    cmd->add_option("--seed", flags.seed, "run seed (overrides config)");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--features", flags.features,
                    "imputation feature, repeatable (default: columns with missing cells)");
}

RunConfig resolve_config(const std::string& config_path, const FlagOverrides& flags) {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (flags.dataset) cfg.dataset_path = *flags.dataset;
    if (flags.schema) cfg.schema_path = *flags.schema;
    if (!flags.thresholds.empty()) {
        cfg.thresholds = flags.thresholds;
        if (!flags.policy) cfg.policy_mode = PolicyMode::Fixed;
    }
    if (flags.policy) cfg.policy_mode = parse_policy_mode(*flags.policy);
    if (flags.backend) {
        cfg.backend.kind = *flags.backend == "mock" ? BackendKind::MockMode : BackendKind::HttpChat;
    }
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out) cfg.out_dir = *flags.out;
    if (!flags.features.empty()) cfg.imputation_features = flags.features;
    if (cfg.dataset_path.empty() || cfg.schema_path.empty()) {
        throw InvalidSchema("a dataset and a schema are required (flags or config file)");
    }
    if (cfg.policy_mode == PolicyMode::Fixed && cfg.thresholds.empty()) {
        throw InvalidSchema("fixed policy needs at least one --threshold");
    }
    return cfg;
}

struct LoadedInputs {
    RunConfig cfg;
    Dataset dataset;
    std::vector<std::string> features;  // imputation features in schema order
};

LoadedInputs load_inputs(RunConfig cfg) {
    auto schema = load_schema(cfg.schema_path);
    Dataset dataset = load_csv(cfg.dataset_path, schema, cfg.sentinels);
    ensure_groups(cfg, dataset);

    std::vector<std::string> features;
    if (cfg.imputation_features.empty()) {
        for (std::size_t c = 0; c < dataset.column_count(); ++c) {
            if (dataset.schema()[c].role == ColumnRole::Feature && dataset.missing_count(c) > 0) {
                features.push_back(dataset.schema()[c].name);
            }
        }
    } else {
        for (const auto& name : cfg.imputation_features) {
            std::size_t c = dataset.column_index(name);
            if (dataset.schema()[c].role != ColumnRole::Feature) {
                throw InvalidSchema("imputation feature '" + name + "' must have role feature");
            }
            features.push_back(name);
        }
    }
    return {std::move(cfg), std::move(dataset), std::move(features)};
}

struct Variant {
    std::string tag;
    std::map<std::string, double> thresholds;
    std::map<std::string, PredictorSet> sets;
    double reduction_pct = 0.0;
};

struct Analysis {
    AssociationMatrix matrix;
    std::map<std::string, AssociationProfile> profiles;
    std::map<std::string, ElbowResult> elbows;
    std::map<std::string, double> resolved;  // per-feature elbow policy resolution
    std::vector<Variant> variants;
};

Variant make_variant(const std::string& tag, const std::map<std::string, double>& thresholds,
                     const Analysis& a, const std::string& target) {
    Variant v;
    v.tag = tag;
    v.thresholds = thresholds;
    std::vector<PredictorSet> sets;
    std::size_t baseline = 0;
    for (const auto& [feature, profile] : a.profiles) {
        PredictorSet set = select_predictors(profile, thresholds.at(feature), target);
        baseline += set.candidate_count;
        v.sets[feature] = set;
        sets.push_back(std::move(set));
    }
    v.reduction_pct = baseline == 0 ? 0.0 : feature_space_reduction(sets, baseline);
    return v;
}

Analysis analyze_inputs(const LoadedInputs& in) {
    Analysis a;
    a.matrix = association_matrix(in.dataset);
    for (const auto& feature : in.features) {
        a.profiles[feature] = association_profile(a.matrix, feature);
        a.elbows[feature] = detect_elbow(a.profiles[feature]);
    }
    const std::string& target = in.dataset.schema()[in.dataset.target_index()].name;

    SelectionPolicy elbow_policy{PolicyMode::PerFeature, 0.0, {}};
    a.resolved = resolve_policy(a.profiles, elbow_policy);

    if (in.cfg.policy_mode == PolicyMode::Fixed) {
        for (double t : in.cfg.thresholds) {
            std::map<std::string, double> thresholds;
            for (const auto& feature : in.features) thresholds[feature] = t;
            a.variants.push_back(make_variant(format_number(t), thresholds, a, target));
        }
    } else {
        SelectionPolicy policy{in.cfg.policy_mode, 0.0, {}};
        auto resolved = resolve_policy(a.profiles, policy);
        a.variants.push_back(
            make_variant(policy_mode_name(in.cfg.policy_mode), resolved, a, target));
    }
    return a;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json variant_to_json(const Variant& v) {
    json sets = json::object();
    json retained = json::object();
    for (const auto& [feature, set] : v.sets) {
        sets[feature] = {{"threshold", set.threshold},
                         {"predictors", set.predictors},
                         {"candidates", set.candidate_count},
                         {"removed", set.removed_count},
                         {"reduction_ratio", set.reduction_ratio}};
        retained[feature] = {set.candidate_count - set.removed_count, set.candidate_count};
    }
    return {{"tag", v.tag},
            {"thresholds", v.thresholds},
            {"predictor_sets", sets},
            {"retained", retained},
            {"reduction_pct", v.reduction_pct}};
}

void write_analysis(const LoadedInputs& in, const Analysis& a, const fs::path& out_dir) {
    fs::path dir = out_dir / "analysis";

    json matrix;
    matrix["columns"] = a.matrix.columns;
    matrix["values"] = a.matrix.values;
    json measures = json::array();
    for (const auto& row : a.matrix.measures) {
        json r = json::array();
        for (auto m : row) r.push_back(measure_name(m));
        measures.push_back(r);
    }
    matrix["measures"] = measures;
    matrix["support"] = a.matrix.support;
    write_json(dir / "association.json", matrix);

    json profiles = json::object();
    std::string csv_text = "feature,rank,predictor,strength,measure,support\n";
    for (const auto& [feature, profile] : a.profiles) {
        json entries = json::array();
        std::size_t fi = a.matrix.index_of(feature);
        for (std::size_t rank = 0; rank < profile.entries.size(); ++rank) {
            const auto& [name, strength] = profile.entries[rank];
            std::size_t pi = a.matrix.index_of(name);
            entries.push_back({{"predictor", name},
                               {"strength", strength},
                               {"measure", measure_name(a.matrix.measures[fi][pi])},
                               {"support", a.matrix.support[fi][pi]}});
            csv_text += feature + "," + std::to_string(rank + 1) + "," + csv::escape(name) + "," +
                        format_number(strength) + "," + measure_name(a.matrix.measures[fi][pi]) +
                        "," + std::to_string(a.matrix.support[fi][pi]) + "\n";
        }
        profiles[feature] = entries;
    }
    write_json(dir / "profiles.json", profiles);
    write_text(dir / "profiles.csv", csv_text);

    json thresholds = json::object();
    for (const auto& [feature, elbow] : a.elbows) {
        const std::string& target = in.dataset.schema()[in.dataset.target_index()].name;
        PredictorSet at_resolved =
            select_predictors(a.profiles.at(feature), a.resolved.at(feature), target);
        thresholds[feature] = {{"elbow_value", elbow.elbow_value},
                               {"elbow_index", elbow.elbow_index},
                               {"elbow_method", elbow.method},
                               {"fallback_used", elbow.fallback_used},
                               {"resolved_threshold", a.resolved.at(feature)},
                               {"predictors", at_resolved.predictors},
                               {"reduction_ratio", at_resolved.reduction_ratio}};
    }
    write_json(dir / "thresholds.json", thresholds);

    json retention = json::array();
    std::string retention_csv = "tag,feature,threshold,retained,candidates,reduction_pct\n";
    for (const auto& v : a.variants) {
        retention.push_back(variant_to_json(v));
        for (const auto& [feature, set] : v.sets) {
            retention_csv += v.tag + "," + feature + "," + format_number(set.threshold) + "," +
                             std::to_string(set.candidate_count - set.removed_count) + "/" +
                             std::to_string(set.candidate_count) + "," +
                             std::to_string(set.candidate_count) + "," +
                             format_fixed(v.reduction_pct, 2) + "\n";
        }
    }
    write_json(dir / "retention.json", retention);
    write_text(dir / "retention.csv", retention_csv);
}

void write_manifest(const fs::path& out_dir, const std::string& command, const RunConfig& cfg,
                    const json& extra, const std::string& status) {
    json manifest{{"command", command},
                  {"config", run_config_to_json(cfg)},
                  {"config_hash", run_config_hash(cfg)},
                  {"status", status}};
    for (auto it = extra.begin(); it != extra.end(); ++it) manifest[it.key()] = it.value();
    write_json(out_dir / "manifest.json", manifest);
}

// ---- subcommands ------------------------------------------------------------

int cmd_analyze(const std::string& config_path, const FlagOverrides& flags,
                const std::string& emit_thresholds) {
    LoadedInputs in = load_inputs(resolve_config(config_path, flags));
    fs::path out_dir(in.cfg.out_dir);
    if (in.features.empty()) {
        std::cout << "no imputation features: dataset has no missing cells\n";
        write_manifest(out_dir, "analyze", in.cfg, {{"imputation_features", json::array()}},
                       "complete");
        return 0;
    }
    Analysis a = analyze_inputs(in);
    write_analysis(in, a, out_dir);
    if (!emit_thresholds.empty()) {
        fs::copy_file(out_dir / "analysis" / "thresholds.json", emit_thresholds,
                      fs::copy_options::overwrite_existing);
    }
    json extra{{"imputation_features", in.features},
               {"outputs",
                {"analysis/association.json", "analysis/profiles.json", "analysis/profiles.csv",
                 "analysis/thresholds.json", "analysis/retention.json", "analysis/retention.csv"}}};
    write_manifest(out_dir, "analyze", in.cfg, extra, "complete");

    for (const auto& v : a.variants) {
        std::cout << "variant " << v.tag << ": reduction " << format_fixed(v.reduction_pct, 2)
                  << "%\n";
    }
    for (const auto& [feature, elbow] : a.elbows) {
        std::cout << "elbow " << feature << ": value " << format_number(elbow.elbow_value)
                  << " at rank " << elbow.elbow_index + 1 << "\n";
    }
    return 0;
}

int cmd_impute(const std::string& config_path, const FlagOverrides& flags,
               const std::string& dump_prompts) {
    LoadedInputs in = load_inputs(resolve_config(config_path, flags));
    fs::path out_dir(in.cfg.out_dir);
    if (in.features.empty()) {
        std::cout << "nothing to impute: dataset has no missing cells\n";
        write_manifest(out_dir, "impute", in.cfg, {{"variants", json::array()}}, "complete");
        return 0;
    }
    Analysis a = analyze_inputs(in);
    write_analysis(in, a, out_dir);

    json variants = json::array();
    std::string status = "complete";
    std::string current_tag;
    ImputationLog partial;
    try {
        for (const auto& v : a.variants) {
            current_tag = v.tag;
            partial.entries.clear();
            ImputationPlan plan = build_plan(in.dataset, v.sets, in.cfg.prompt, in.cfg.seed);
            std::string dump_dir;
            if (!dump_prompts.empty()) dump_dir = (fs::path(dump_prompts) / v.tag).string();
            RunResult result =
                run(plan, in.dataset, in.cfg.backend, dump_dir, &g_interrupted, &partial);

            fs::path csv_path = out_dir / "imputed" / ("imputed_" + v.tag + ".csv");
            fs::create_directories(csv_path.parent_path());
            write_csv(result.imputed, csv_path.string());

            std::size_t tokens = 0;
            bool any_fallback = false;
            for (const auto& e : result.log.entries) {
                tokens += e.prompt_tokens;
                any_fallback = any_fallback || e.fallback_used;
            }
            variants.push_back({{"tag", v.tag},
                                {"thresholds", v.thresholds},
                                {"reduction_pct", v.reduction_pct},
                                {"plan", plan_to_json(plan)},
                                {"log", log_to_json(result.log)},
                                {"imputed_csv", "imputed/imputed_" + v.tag + ".csv"},
                                {"total_prompt_tokens", tokens},
                                {"fallback_used", any_fallback}});
            std::cout << "variant " << v.tag << ": " << result.log.entries.size()
                      << " prompts, " << tokens << " estimated tokens\n";
        }
    } catch (const Interrupted&) {
        variants.push_back({{"tag", current_tag},
                            {"interrupted", true},
                            {"log", log_to_json(partial)}});
        write_manifest(out_dir, "impute", in.cfg, {{"variants", variants}}, "incomplete");
        std::cerr << "interrupted; partial manifest written\n";
        return 130;
    }
    write_manifest(out_dir, "impute", in.cfg, {{"variants", variants}}, status);
    return 0;
}

int cmd_evaluate(const std::string& config_path, const FlagOverrides& flags,
                 const std::vector<std::string>& imputed_specs, const std::string& manifest_path) {
    LoadedInputs in = load_inputs(resolve_config(config_path, flags));
    fs::path out_dir(in.cfg.out_dir);
    auto schema = in.dataset.schema();

    std::vector<std::size_t> incomplete_rows;
    for (std::size_t r = 0; r < in.dataset.row_count(); ++r) {
        if (!in.dataset.row_complete(r)) incomplete_rows.push_back(r);
    }
    if (incomplete_rows.empty()) throw InvalidSchema("original dataset has no incomplete rows");

    json token_by_tag = json::object();
    json reduction_by_tag = json::object();
    if (!manifest_path.empty()) {
        std::ifstream mf(manifest_path);
        if (!mf) throw IoFailure("cannot open manifest: " + manifest_path);
        json manifest;
        mf >> manifest;
        for (const auto& v : manifest.value("variants", json::array())) {
            token_by_tag[v.at("tag").get<std::string>()] = v.value("total_prompt_tokens", 0);
            reduction_by_tag[v.at("tag").get<std::string>()] = v.value("reduction_pct", 0.0);
        }
    }

    std::string summary =
        "model,tag,minority_precision,minority_recall,minority_f1,majority_precision,"
        "majority_recall,majority_f1,macro_f1,weighted_f1,balanced_accuracy,roc_auc\n";
    json reports = json::array();
    for (const auto& spec : imputed_specs) {
        std::string path = spec;
        std::string tag;
        auto eq = spec.rfind('=');
        if (eq != std::string::npos) {
            path = spec.substr(0, eq);
            tag = spec.substr(eq + 1);
        } else {
            tag = fs::path(path).stem().string();
        }
        Dataset imputed = load_csv(path, schema, in.cfg.sentinels);
        if (imputed.row_count() != in.dataset.row_count()) {
            throw SchemaMismatch("imputed dataset row count differs from the original");
        }
        Dataset test_rows = imputed.subset(incomplete_rows);

        for (ForestMode mode : {ForestMode::RandomForest, ForestMode::GradientStub}) {
            ForestConfig fc;
            fc.n_trees = in.cfg.eval_trees;
            fc.max_depth = in.cfg.eval_max_depth;
            fc.seed = in.cfg.seed;
            fc.mode = mode;
            EvaluationReport report = evaluate_imputation(in.dataset, test_rows, fc);
            report.threshold_tag = tag;
            if (token_by_tag.contains(tag)) {
                double tokens = token_by_tag[tag].get<double>();
                report.total_prompt_tokens = static_cast<std::size_t>(tokens);
                if (token_by_tag.contains("0") && token_by_tag["0"].get<double>() > 0.0) {
                    report.token_reduction_pct =
                        100.0 * (1.0 - tokens / token_by_tag["0"].get<double>());
                }
            }
            if (reduction_by_tag.contains(tag)) {
                report.feature_space_reduction_pct = reduction_by_tag[tag].get<double>();
            }

            ClassPartition p = class_partition(in.dataset);
            const auto& minority = report.per_class.at(p.minority_label);
            const auto& majority = report.per_class.at(p.majority_label);
            json rj{{"model", report.model_tag},
                    {"tag", tag},
                    {"per_class",
                     {{p.minority_label,
                       {{"precision", minority.precision},
                        {"recall", minority.recall},
                        {"f1", minority.f1}}},
                      {p.majority_label,
                       {{"precision", majority.precision},
                        {"recall", majority.recall},
                        {"f1", majority.f1}}}}},
                    {"support", report.support},
                    {"macro_f1", report.macro_f1},
                    {"weighted_f1", report.weighted_f1},
                    {"balanced_accuracy", report.balanced_accuracy},
                    {"roc_auc", report.roc_auc},
                    {"warnings", report.warnings}};
            if (report.feature_space_reduction_pct) {
                rj["feature_space_reduction_pct"] = *report.feature_space_reduction_pct;
            }
            if (report.total_prompt_tokens) rj["total_prompt_tokens"] = *report.total_prompt_tokens;
            if (report.token_reduction_pct) rj["token_reduction_pct"] = *report.token_reduction_pct;
            write_json(out_dir / "reports" / ("report_" + report.model_tag + "_" + tag + ".json"),
                       rj);
            reports.push_back(rj);

            summary += report.model_tag + "," + tag + "," + format_fixed(minority.precision, 4) +
                       "," + format_fixed(minority.recall, 4) + "," +
                       format_fixed(minority.f1, 4) + "," + format_fixed(majority.precision, 4) +
                       "," + format_fixed(majority.recall, 4) + "," +
                       format_fixed(majority.f1, 4) + "," + format_fixed(report.macro_f1, 4) +
                       "," + format_fixed(report.weighted_f1, 4) + "," +
                       format_fixed(report.balanced_accuracy, 4) + "," +
                       format_fixed(report.roc_auc, 4) + "\n";
            std::cout << report.model_tag << " @" << tag
                      << ": bal_acc=" << format_fixed(report.balanced_accuracy, 3)
                      << " macro_f1=" << format_fixed(report.macro_f1, 3)
                      << " auc=" << format_fixed(report.roc_auc, 3) << "\n";
        }
    }
    write_text(out_dir / "reports" / "summary.csv", summary);
    write_manifest(out_dir, "evaluate", in.cfg, {{"reports", reports}}, "complete");
    return 0;
}

int cmd_ablation(const std::string& config_path, const FlagOverrides& flags) {
    LoadedInputs in = load_inputs(resolve_config(config_path, flags));
    fs::path out_dir(in.cfg.out_dir);
    if (in.features.empty()) throw InvalidSchema("ablation needs a dataset with missing cells");

    Analysis a = analyze_inputs(in);
    const Variant& variant = a.variants.front();

    struct StyleResult {
        std::string name;
        bool ok = false;
        std::string note;
        EvaluationReport report;
    };
    std::vector<StyleResult> results;

    for (PromptStyle style : {PromptStyle::Grouped, PromptStyle::Ungrouped}) {
        StyleResult sr;
        sr.name = style == PromptStyle::Grouped ? "grouped" : "ungrouped";
        try {
            std::string dump_dir = (out_dir / "prompts" / sr.name).string();
            RunResult result = ablation_run(in.dataset, variant.sets, in.cfg.backend, style,
                                            in.cfg.prompt, in.cfg.seed, dump_dir);
            fs::path csv_path = out_dir / "imputed" / ("imputed_" + sr.name + ".csv");
            fs::create_directories(csv_path.parent_path());
            write_csv(result.imputed, csv_path.string());

            std::vector<std::size_t> incomplete_rows;
            for (std::size_t r = 0; r < in.dataset.row_count(); ++r) {
                if (!in.dataset.row_complete(r)) incomplete_rows.push_back(r);
            }
            ForestConfig fc;
            fc.n_trees = in.cfg.eval_trees;
            fc.max_depth = in.cfg.eval_max_depth;
            fc.seed = in.cfg.seed;
            sr.report = evaluate_imputation(in.dataset, result.imputed.subset(incomplete_rows), fc);
            sr.ok = true;
        } catch (const Error& e) {
            sr.note = e.what();
        }
        results.push_back(std::move(sr));
    }

    ClassPartition p = class_partition(in.dataset);
    std::string table =
        "style,status,minority_precision,minority_recall,minority_f1,macro_f1,weighted_f1,note\n";
    json doc = json::array();
    bool any_ok = false;
    for (const auto& sr : results) {
        if (sr.ok) {
            any_ok = true;
            const auto& m = sr.report.per_class.at(p.minority_label);
            table += sr.name + ",ok," + format_fixed(m.precision, 4) + "," +
                     format_fixed(m.recall, 4) + "," + format_fixed(m.f1, 4) + "," +
                     format_fixed(sr.report.macro_f1, 4) + "," +
                     format_fixed(sr.report.weighted_f1, 4) + ",\n";
            doc.push_back({{"style", sr.name},
                           {"status", "ok"},
                           {"minority",
                            {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}}},
                           {"macro_f1", sr.report.macro_f1},
                           {"weighted_f1", sr.report.weighted_f1},
                           {"balanced_accuracy", sr.report.balanced_accuracy},
                           {"roc_auc", sr.report.roc_auc}});
        } else {
            table += sr.name + ",failed,-,-,-,-,-," + csv::escape(sr.note) + "\n";
            doc.push_back({{"style", sr.name}, {"status", "failed"}, {"note", sr.note}});
        }
    }
    write_text(out_dir / "reports" / "ablation.csv", table);
    write_json(out_dir / "reports" / "ablation.json", doc);
    write_manifest(out_dir, "ablation", in.cfg, {{"styles", doc}}, "complete");
    std::cout << table;
    return any_ok ? 0 : 3;
}

int cmd_inject(const std::string& config_path, const FlagOverrides& flags,
               const std::string& feature, std::size_t count_per_class,
               const std::vector<std::string>& per_class, std::uint64_t inject_seed,
               const std::string& out_file, std::string audit_file) {
    LoadedInputs in = load_inputs(resolve_config(config_path, flags));

    MissingnessSpec spec;
    spec.feature = feature;
    spec.seed = inject_seed;
    ClassPartition p = class_partition(in.dataset);
    if (count_per_class > 0) {
        spec.per_class_count[p.majority_label] = count_per_class;
        spec.per_class_count[p.minority_label] = count_per_class;
    }
    for (const auto& entry : per_class) {
        auto eq = entry.rfind('=');
        if (eq == std::string::npos) {
            throw InvalidSchema("--count expects LABEL=N, got '" + entry + "'");
        }
        spec.per_class_count[entry.substr(0, eq)] =
            static_cast<std::size_t>(std::stoull(entry.substr(eq + 1)));
    }
    if (spec.per_class_count.empty()) {
        throw InvalidSchema("inject needs --count-per-class or --count LABEL=N");
    }

    InjectionResult result = inject_missingness(in.dataset, spec);
    fs::path out_path(out_file);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    write_csv(result.dataset, out_file);
    if (audit_file.empty()) audit_file = out_file + ".audit.json";
    write_audit(result.audit, audit_file);
    std::cout << "masked " << result.audit.size() << " cells of '" << feature << "' -> "
              << out_file << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, handle_sigint);

    CLI::App app{"group-wise prompt imputation for class-imbalanced tabular data"};
    app.require_subcommand(1);

    std::string config_path;
    FlagOverrides flags;

    auto* analyze = app.add_subcommand("analyze", "association profiles, elbows and retention");
    std::string emit_thresholds;
    add_common_options(analyze, config_path, flags);
    analyze->add_option("--emit-thresholds", emit_thresholds,
                        "also copy thresholds.json to this path");

    auto* impute = app.add_subcommand("impute", "plan and execute the imputation pipeline");
    std::string dump_prompts;
    add_common_options(impute, config_path, flags);
    impute->add_option("--dump-prompts", dump_prompts, "write each rendered prompt under DIR");

    auto* evaluate = app.add_subcommand("evaluate", "score imputed datasets with ensemble models");
    std::vector<std::string> imputed_specs;
    std::string manifest_path;
    add_common_options(evaluate, config_path, flags);
    evaluate->add_option("--imputed", imputed_specs, "imputed CSV path, optionally PATH=TAG")
        ->required();
    evaluate->add_option("--manifest", manifest_path,
                         "impute manifest to echo token/reduction stats from");

    auto* ablation = app.add_subcommand("ablation", "grouped versus ungrouped prompt comparison");
    add_common_options(ablation, config_path, flags);

    auto* inject = app.add_subcommand("inject", "mask observed cells to create missingness");
    std::string feature, out_file, audit_file;
    std::size_t count_per_class = 0;
    std::vector<std::string> per_class_counts;
    std::uint64_t inject_seed = 7;
    add_common_options(inject, config_path, flags);
    inject->add_option("--feature", feature, "feature column to mask")->required();
    inject->add_option("--count-per-class", count_per_class, "cells to mask in each class");
    inject->add_option("--count", per_class_counts, "per-class count as LABEL=N, repeatable");
    inject->add_option("--inject-seed", inject_seed, "seed for the masking draw");
    inject->add_option("--out-file", out_file, "path of the masked CSV")->required();
    inject->add_option("--audit", audit_file, "audit sidecar path (default: <out-file>.audit.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(config_path, flags, emit_thresholds);
        if (app.got_subcommand(impute)) return cmd_impute(config_path, flags, dump_prompts);
        if (app.got_subcommand(evaluate)) {
            return cmd_evaluate(config_path, flags, imputed_specs, manifest_path);
        }
        if (app.got_subcommand(ablation)) return cmd_ablation(config_path, flags);
        if (app.got_subcommand(inject)) {
            return cmd_inject(config_path, flags, feature, count_per_class, per_class_counts,
                              inject_seed, out_file, audit_file);
        }
    } catch (const AuthMissing& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Timeout& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const RateLimited& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const MalformedProviderResponse& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NoExamplesForClass& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const Interrupted&) {
        std::cerr << "interrupted\n";
        return 130;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

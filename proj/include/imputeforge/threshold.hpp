#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "imputeforge/association.hpp"
#include "imputeforge/errors.hpp"

namespace imputeforge {

struct ElbowResult {
    std::size_t elbow_index = 0;  // position in the sorted profile, 0-based
    double elbow_value = 0.0;
    std::string method;
    bool fallback_used = false;
};

/// Kneedle-style elbow: the profile entry with the largest perpendicular
/// distance to the chord from the first to the last point. Ties go to the
/// smaller index. A collinear profile (max distance < 1e-9) falls back to
/// the median index.
inline ElbowResult detect_elbow(const AssociationProfile& profile) {
    std::size_t m = profile.entries.size();
    if (m < 2) throw ProfileTooShort("elbow detection needs at least 2 profile entries");

    double x1 = 1.0, y1 = profile.entries.front().second;
    double x2 = static_cast<double>(m), y2 = profile.entries.back().second;
    double dx = x2 - x1, dy = y2 - y1;
    double chord = std::sqrt(dx * dx + dy * dy);

    std::size_t best = 0;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
        double xi = static_cast<double>(i + 1);
        double yi = profile.entries[i].second;
        double cross = dx * (yi - y1) - dy * (xi - x1);
        double dist = std::fabs(cross) / chord;
        if (dist > best_dist) {
            best_dist = dist;
            best = i;
        }
    }

    if (best_dist < 1e-9) {
        std::size_t median = (m - 1) / 2;
        return {median, profile.entries[median].second, "median-fallback", true};
    }
    return {best, profile.entries[best].second, "max-perpendicular-distance", false};
}

enum class PolicyMode { PerFeature, GlobalMin, Fixed };

struct SelectionPolicy {
    PolicyMode mode = PolicyMode::PerFeature;
    double fixed_threshold = 0.0;  // used by Fixed only; must be in [0, 1]
    std::map<std::string, double> threshold_by_feature;  // populated by resolve_policy
};

namespace detail {

// Smallest multiple of 0.05 at or above v (with a little slack so that a
// value sitting on a multiple stays put).
inline double round_up_to_step(double v, double step = 0.05) {
    double k = std::ceil(v / step - 1e-6);
    return k * step;
}

}  // namespace detail

/// Resolves per-feature thresholds. PerFeature keeps each feature's elbow
/// value, GlobalMin applies the minimum elbow value everywhere, Fixed applies
/// a constant. When every elbow value lies within 0.05 of the others, both
/// elbow-based modes collapse to one shared threshold: the minimum rounded up
/// to the nearest 0.05.
inline std::map<std::string, double> resolve_policy(
    const std::map<std::string, AssociationProfile>& profiles, SelectionPolicy& policy) {
    std::map<std::string, double> out;
    if (policy.mode == PolicyMode::Fixed) {
        if (policy.fixed_threshold < 0.0 || policy.fixed_threshold > 1.0) {
            throw InvalidSchema("fixed threshold must lie in [0, 1]");
        }
        for (const auto& [feature, profile] : profiles) out[feature] = policy.fixed_threshold;
        policy.threshold_by_feature = out;
        return out;
    }

    std::map<std::string, double> elbows;
    double lo = 1.0, hi = 0.0;
    for (const auto& [feature, profile] : profiles) {
        double e = detect_elbow(profile).elbow_value;
        elbows[feature] = e;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (!elbows.empty() && hi - lo <= 0.05) {
        double shared = detail::round_up_to_step(lo);
        for (auto& [feature, e] : elbows) e = shared;
        out = elbows;
    } else if (policy.mode == PolicyMode::GlobalMin) {
        for (auto& [feature, e] : elbows) e = lo;
        out = elbows;
    } else {
        out = elbows;
    }
    policy.threshold_by_feature = out;
    return out;
}

struct PredictorSet {
    std::string feature;
    double threshold = 0.0;
    std::vector<std::string> predictors;  // descending strength; always contains the target
    std::size_t candidate_count = 0;
    std::size_t removed_count = 0;
    double reduction_ratio = 0.0;  // removed / total candidates

    bool contains(std::string_view name) const {
        return std::find(predictors.begin(), predictors.end(), name) != predictors.end();
    }
};

/// Keeps the candidates whose association strictly exceeds the threshold.
/// The target column is always retained so group-wise prompts can carry the
/// class label even when its own association falls below the cut.
inline PredictorSet select_predictors(const AssociationProfile& profile, double threshold,
                                      const std::string& target) {
    if (threshold < 0.0 || threshold > 1.0) throw InvalidSchema("threshold must lie in [0, 1]");
    PredictorSet set;
    set.feature = profile.feature;
    set.threshold = threshold;
    set.candidate_count = profile.entries.size();
    bool has_target = false;
    for (const auto& [name, strength] : profile.entries) {
        if (strength > threshold) {
            set.predictors.push_back(name);
            if (name == target) has_target = true;
        }
    }
    if (!has_target) set.predictors.push_back(target);
    set.removed_count = set.candidate_count >= set.predictors.size()
                            ? set.candidate_count - set.predictors.size()
                            : 0;
    set.reduction_ratio = set.candidate_count == 0
                              ? 0.0
                              : static_cast<double>(set.removed_count) /
                                    static_cast<double>(set.candidate_count);
    return set;
}

/// Pooled reduction percentage across all imputation features:
/// 100 · Σ removed / Σ baseline candidates.
inline double feature_space_reduction(const std::vector<PredictorSet>& sets,
                                      std::size_t baseline_total) {
    if (baseline_total == 0) throw InvalidSchema("baseline candidate count must be positive");
    std::size_t removed = 0;
    for (const auto& s : sets) removed += s.removed_count;
    return 100.0 * static_cast<double>(removed) / static_cast<double>(baseline_total);
}

}  // namespace imputeforge

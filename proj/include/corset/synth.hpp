#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "corset/dataset.hpp"
#include "corset/rules.hpp"

namespace corset {

enum class CoverageMode { uniform, skewed };

struct GeneratorConfig {
    int n_records = 1000;
    int n_features = 100;
    int n_labels = 100;
    /// Negative means the default floor(min(|F|, |L|) / 3).
    int n_rules = -1;
    int features_per_rule = 3;
    int labels_per_rule = 3;
    CoverageMode mode = CoverageMode::uniform;
    /// Uniform mode: per-rule support fraction drawn from this range.
    double support_fraction_min = 0.05;
    double support_fraction_max = 0.15;
    /// Skewed mode: support fractions proportional to rank^(-exponent),
    /// normalized to the same total mass as the uniform default.
    double skew_exponent = 2.0;
    double noise = 0.01;  // independent flip probability per cell, both matrices
    std::uint64_t seed = 0;

    [[nodiscard]] int resolved_n_rules() const;
    void validate() const;
};

struct PlantedRule {
    IdSet features;
    IdSet labels;
    IdSet support;  // record ids the rule was planted on
};

struct PlantedGroundTruth {
    GeneratorConfig config;
    std::vector<PlantedRule> rules;
};

/// Plants each rule's features and labels on its sampled support over
/// initially all-zero matrices, then flips every cell of both matrices
/// independently with the noise probability.
std::pair<Dataset, PlantedGroundTruth> generate(const GeneratorConfig& config);

/// Fraction of planted rules matched by some learned rule within Jaccard
/// coverage distance 0.2 on the given dataset.
double recovery_score(const Dataset& dataset, const PlantedGroundTruth& truth,
                      const std::vector<Rule>& learned);

void save_ground_truth(const std::string& path, const PlantedGroundTruth& truth);
PlantedGroundTruth load_ground_truth(const std::string& path);

}  // namespace corset

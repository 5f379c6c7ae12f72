#pragma once

#include <string>
#include <utility>
#include <vector>

#include "corset/learner.hpp"

namespace corset {

/// Serialized form of a trained model: enough to predict and to rebuild
/// rule coverage against any compatible dataset.
struct StoredModel {
    double lambda = 1.0;
    std::string variant = "gh";
    std::uint64_t seed = 0;
    int n_features = 0;
    int n_labels = 0;
    double objective = 0.0;
    std::string stop_reason;
    std::vector<std::pair<IdSet, IdSet>> rules;  // (head, tail)

    [[nodiscard]] std::vector<Rule> build_rules(const Dataset& dataset) const;
};

StoredModel to_stored(const RuleSetModel& model, const Dataset& dataset);

void save_model(const std::string& path, const RuleSetModel& model, const Dataset& dataset);
void save_model(const std::string& path, const StoredModel& model);
StoredModel load_model(const std::string& path);

}  // namespace corset

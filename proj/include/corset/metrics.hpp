#pragma once

#include <string>
#include <utility>
#include <vector>

#include "corset/rules.hpp"

namespace corset {

/// Union of tails of rules whose head is contained in the instance.
IdSet predict(const std::vector<std::pair<IdSet, IdSet>>& rules, const IdSet& features);

std::vector<IdSet> predict_dataset(const std::vector<std::pair<IdSet, IdSet>>& rules,
                                   const Dataset& dataset);

/// Pooled F1 over all (instance, label) decisions.
double micro_f1(const std::vector<IdSet>& gold, const std::vector<IdSet>& predicted);

/// Unweighted mean of per-label F1. Labels with no gold and no predicted
/// positives contribute 0 unless ignore_absent excludes them.
double macro_f1(const std::vector<IdSet>& gold, const std::vector<IdSet>& predicted,
                int n_labels, bool ignore_absent = false);

/// 1 - fraction of mismatched (instance, label) cells.
double hamming_score(const std::vector<IdSet>& gold, const std::vector<IdSet>& predicted,
                     int n_labels);

/// Mean coverage intersection over unordered rule pairs; 0 below two rules.
double avg_pairwise_overlap(const std::vector<Rule>& rules);

struct MetricReport {
    double micro_f1 = 0.0;
    double macro_f1 = 0.0;
    double hamming_score = 0.0;
    double avg_pairwise_overlap = 0.0;
    std::size_t rule_count = 0;

    [[nodiscard]] std::string to_table() const;
};

/// Predicts over the dataset and scores against its labels; overlap is
/// computed from rule coverages rebuilt on the same dataset.
MetricReport evaluate(const std::vector<std::pair<IdSet, IdSet>>& rules,
                      const Dataset& dataset, bool ignore_absent = false);

}  // namespace corset

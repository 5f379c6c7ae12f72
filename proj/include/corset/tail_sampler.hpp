#pragma once

#include <map>
#include <optional>

#include "corset/label_space.hpp"
#include "corset/random.hpp"
#include "corset/rules.hpp"

namespace corset {

/// Labels of a record covered by a rule: L_D ∩ T when the rule matches,
/// otherwise the empty set.
IdSet record_specific_coverage(const DataRecord& record, const Rule& rule);

/// Union of the per-rule record-specific coverages.
IdSet record_specific_coverage(const DataRecord& record, const std::vector<Rule>& rules);

/// Marginal coverage of a tail on a record: (L_D ∩ T) \ cov_D(ruleset).
IdSet marginal_coverage(const DataRecord& record, const IdSet& tail, const RuleSet& ruleset);

/// First-stage record weights for tail sampling. In the full power-set space
/// w(D) = |uncov_D| * 2^(|L_D|-1); in the reduced space w(D) is the sum of
/// |S \ cov_D| over members S of I[D]. Snapshots a rule set; rebuild after
/// every insertion.
class TailWeights {
public:
    enum class Space { full, reduced };

    [[nodiscard]] Space space() const { return space_; }
    [[nodiscard]] long double total() const { return categorical_.total(); }
    [[nodiscard]] bool all_zero() const { return categorical_.empty(); }
    [[nodiscard]] long double weight(RecordId record) const {
        return weights_[static_cast<std::size_t>(record)];
    }
    /// Uncovered labels of a record (full-space stage 2 needs them).
    [[nodiscard]] const IdSet& uncovered(RecordId record) const {
        return uncovered_[static_cast<std::size_t>(record)];
    }

    RecordId draw_record(Rng& rng) const { return static_cast<RecordId>(categorical_.draw(rng)); }

    friend TailWeights compute_weights_full(const Dataset&, const RuleSet&);
    friend TailWeights compute_weights_reduced(const Dataset&, const ContainmentIndex&,
                                               const RuleSet&);

private:
    Space space_ = Space::full;
    std::vector<long double> weights_;
    std::vector<IdSet> uncovered_;
    Categorical categorical_;
};

TailWeights compute_weights_full(const Dataset& dataset, const RuleSet& ruleset);
TailWeights compute_weights_reduced(const Dataset& dataset, const ContainmentIndex& index,
                                    const RuleSet& ruleset);

/// Draws T ⊆ L_D with P(T) ∝ |T ∩ uncov_D|: one uncovered label is made
/// mandatory, every other label of L_D joins with probability 1/2.
/// Empty optional means every label occurrence is already covered.
std::optional<IdSet> sample_tail_full(const Dataset& dataset, const TailWeights& weights,
                                      Rng& rng);
std::optional<IdSet> sample_tail_full(const Dataset& dataset, const RuleSet& ruleset,
                                      Rng& rng);

/// Reduced-space variant: record ∝ w(D), then S ∈ I[D] ∝ |S \ cov_D|,
/// giving P(S) ∝ uncovered area of S restricted to the interpretable space.
std::optional<IdSet> sample_tail_reduced(const Dataset& dataset, const ContainmentIndex& index,
                                         const RuleSet& ruleset, const TailWeights& weights,
                                         Rng& rng);
std::optional<IdSet> sample_tail_reduced(const Dataset& dataset, const ContainmentIndex& index,
                                         const RuleSet& ruleset, Rng& rng);

/// Brute-force normalized uncovered-area distribution over all tails (or the
/// members of a space when given). Test oracle; refuses instances with more
/// than 2^20 enumerable tails.
std::map<IdSet, double> exact_tail_distribution(const Dataset& dataset, const RuleSet& ruleset,
                                                const InterpretableSpace* space = nullptr);

}  // namespace corset

#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "corset/dataset.hpp"
#include "corset/sets.hpp"

namespace corset {

/// Set of (record, label) pairs, the currency of area and diversity.
/// Stored as a sorted vector of packed 64-bit keys.
class CoverageSet {
public:
    static std::uint64_t encode(RecordId record, LabelId label) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(record)) << 32) |
               static_cast<std::uint32_t>(label);
    }
    static RecordId record_of(std::uint64_t pair) { return static_cast<RecordId>(pair >> 32); }
    static LabelId label_of(std::uint64_t pair) { return static_cast<LabelId>(pair & 0xffffffffu); }

    CoverageSet() = default;
    explicit CoverageSet(std::vector<std::uint64_t> pairs) : pairs_(std::move(pairs)) {
        std::sort(pairs_.begin(), pairs_.end());
        pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
    }

    [[nodiscard]] const std::vector<std::uint64_t>& pairs() const { return pairs_; }
    [[nodiscard]] std::size_t size() const { return pairs_.size(); }
    [[nodiscard]] bool empty() const { return pairs_.empty(); }

    [[nodiscard]] std::size_t intersection_size(const CoverageSet& other) const;

private:
    std::vector<std::uint64_t> pairs_;
};

/// Conjunctive rule H -> T with its supports and coverage cached against the
/// dataset it was built on. |coverage| == |support| * |tail| by construction.
struct Rule {
    IdSet head;
    IdSet tail;
    IdSet head_support;  // D[H]
    IdSet support;       // D[R] = D[H] ∩ D[T]
    CoverageSet coverage;
    double accuracy = 0.0;  // adjusted accuracy; 0 when the head matches nothing

    static Rule build(const Dataset& dataset, IdSet head, IdSet tail);

    [[nodiscard]] bool matches(const IdSet& features, const IdSet& labels) const {
        return is_subset(head, features) && is_subset(tail, labels);
    }

    friend bool operator==(const Rule& a, const Rule& b) {
        return a.head == b.head && a.tail == b.tail;
    }
};

/// Coverage of a bare tail: pairs (i, k) with T ⊆ L_{D_i} and k ∈ T.
CoverageSet tail_coverage(const Dataset& dataset, const IdSet& tail);

/// I(R) * KL(Bernoulli(P_DR) || Bernoulli(P_D)), natural log, probabilities
/// clamped to [1e-12, 1-1e-12]. I(R) = 1 iff precision strictly exceeds the
/// base rate. Throws when the head support is empty (undefined precision).
double adjusted_accuracy(const Dataset& dataset, const Rule& rule);

/// Jaccard distance between coverages; 1 when both coverages are empty.
double jaccard_distance(const Rule& a, const Rule& b);

struct ObjectiveParams {
    double lambda = 1.0;  // diversity weight, >= 0
};

/// Ordered set of selected rules with union coverage, pairwise diversity and
/// the objective value maintained incrementally. Insertion is exclusive;
/// all queries are const and safe to run concurrently.
class RuleSet {
public:
    explicit RuleSet(const Dataset& dataset) : dataset_(&dataset) {}

    void insert(Rule rule);

    [[nodiscard]] const std::vector<Rule>& rules() const { return rules_; }
    [[nodiscard]] std::size_t size() const { return rules_.size(); }
    [[nodiscard]] bool empty() const { return rules_.empty(); }
    [[nodiscard]] const Dataset& dataset() const { return *dataset_; }

    [[nodiscard]] bool covers(RecordId record, LabelId label) const {
        return multiplicity_.count(CoverageSet::encode(record, label)) != 0;
    }
    [[nodiscard]] std::size_t union_coverage_size() const { return multiplicity_.size(); }

    /// Labels of record i covered by the selected rules (sorted).
    [[nodiscard]] const IdSet& covered_labels(RecordId record) const;

    /// |cov \ union_coverage| for an arbitrary coverage set.
    [[nodiscard]] std::int64_t uncovered_area(const CoverageSet& cov) const;

    /// Sum of Jaccard distances from a candidate to every selected rule.
    [[nodiscard]] double diversity_sum(const Rule& candidate) const;

    /// Exact objective change of inserting a candidate:
    /// q(cand; rules) + λ Σ d(cand, ·) minus the quality other rules lose
    /// on pairs they no longer cover uniquely.
    [[nodiscard]] double insertion_delta(const Rule& candidate,
                                         const ObjectiveParams& params) const;

    /// Objective f = Σ_R q(R; rest) + λ Σ_{i<j} d(R_i, R_j), maintained
    /// incrementally; equals objective_value_scratch at all times.
    [[nodiscard]] double objective_value(const ObjectiveParams& params) const;

    /// From-scratch recomputation used by tests and the second greedy pass.
    static double objective_value_scratch(const std::vector<Rule>& rules,
                                          const ObjectiveParams& params);

private:
    const Dataset* dataset_;
    std::vector<Rule> rules_;
    // pair -> (how many selected rules cover it, index of the sole coverer
    // while the count is 1)
    struct PairInfo {
        std::int32_t count = 0;
        std::int32_t sole_owner = -1;
    };
    std::unordered_map<std::uint64_t, PairInfo> multiplicity_;
    std::vector<std::int64_t> unique_pairs_;  // per rule: pairs only it covers
    std::vector<IdSet> covered_by_record_;
    double quality_sum_ = 0.0;    // Σ_R a(R) * unique_pairs_[R]
    double diversity_sum_ = 0.0;  // Σ_{i<j} d(R_i, R_j)
};

/// Uncovered area of a rule or tail coverage against a rule set.
std::int64_t uncovered_area(const Rule& rule, const RuleSet& ruleset);
std::int64_t uncovered_area(const CoverageSet& cov, const RuleSet& ruleset);

/// q(R; ruleset) = uncovered_area * adjusted_accuracy.
double quality(const Dataset& dataset, const Rule& rule, const RuleSet& ruleset);

/// Marginal gain of adding a candidate: q(R; ruleset) + λ Σ d(R, R_j).
double marginal_gain(const Dataset& dataset, const Rule& candidate,
                     const RuleSet& ruleset, const ObjectiveParams& params);

/// Deterministic candidate order: larger gain first, then larger coverage,
/// then lexicographically smaller (head, tail).
bool better_candidate(double gain_a, const Rule& a, double gain_b, const Rule& b);

}  // namespace corset

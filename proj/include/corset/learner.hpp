#pragma once

#include <memory>
#include <optional>
#include <string>

#include "corset/head_sampler.hpp"
#include "corset/label_space.hpp"
#include "corset/rules.hpp"
#include "corset/tail_sampler.hpp"

namespace corset {

/// Head generation variant: reduced-sample-space sampling (surs) or the
/// greedy heuristic (gh).
enum class HeadVariant { surs, gh };

std::string to_string(HeadVariant variant);
HeadVariant head_variant_from_string(const std::string& name);

struct LearnerConfig {
    double lambda = 1.0;
    /// Tolerance stopping: stop once the newly covered fraction c drops to
    /// tau or below. When unset, max_rules alone drives stopping.
    std::optional<double> tau;
    int max_rules = 150;  // hard cap, always active
    int pool_size = 500;  // 150 is the usual tuning-mode setting
    HeadVariant variant = HeadVariant::gh;
    bool two_pass = false;

    double theta = 0.2;        // clique probability threshold for M⁻
    int max_itemset_size = 5;  // itemset size cap for M⁻
    std::uint64_t clique_node_budget = 1u << 22;

    GreedyParams greedy;  // gamma, epsilon for the gh variant
    std::uint64_t cftp_step_cap = 1u << 20;

    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

struct IterationLog {
    int iteration = 0;
    int pool_size = 0;        // candidates surviving dedup this iteration
    int dead_candidates = 0;  // candidates with zero adjusted accuracy, kept but unselectable by quality
    IdSet head;
    IdSet tail;
    double gain = 0.0;
    double coverage_ratio = 0.0;  // c in the stopping rule
    double objective = 0.0;       // cumulative accepted gains, non-decreasing
};

struct RuleSetModel {
    std::vector<Rule> rules;
    std::vector<IterationLog> trace;
    LearnerConfig config;
    double objective = 0.0;  // f of the returned set, recomputed from scratch
    std::string stop_reason;
};

/// Candidate factory: owns the interpretable spaces and containment indexes,
/// which do not depend on the evolving rule set. Pools draw tails from the
/// reduced label space and heads per the configured variant; slots use
/// disjoint RNG streams so multi-threaded pools are reproducible.
class CandidateGenerator {
public:
    CandidateGenerator(const Dataset& dataset, const LearnerConfig& config);
    ~CandidateGenerator();
    CandidateGenerator(CandidateGenerator&&) noexcept;
    CandidateGenerator& operator=(CandidateGenerator&&) noexcept;

    /// Deduplicated candidate pool against the current rule set; empty when
    /// every label occurrence is covered (the stop signal). `attempt`
    /// distinguishes the refill draw within one iteration.
    [[nodiscard]] std::vector<Rule> generate(const RuleSet& ruleset, int iteration,
                                             int attempt = 0) const;

    [[nodiscard]] const ContainmentIndex& label_containment() const;
    [[nodiscard]] const InterpretableSpace& label_space() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper matching the candidate-generation contract.
std::vector<Rule> gen_cand_rules(const Dataset& dataset, const RuleSet& ruleset,
                                 const CandidateGenerator& generator, int iteration);

/// Greedy argmax-insertion over a fixed pool for `budget` steps; exposed
/// separately so the 2-approximation property is testable against brute
/// force.
std::vector<Rule> greedy_over_pool(const Dataset& dataset, const std::vector<Rule>& pool,
                                   int budget, double lambda);

/// The full training loop: pool generation, greedy selection by marginal
/// gain, tolerance/cap stopping, optional second greedy pass over the
/// accumulated candidate archive, best-of-two result.
RuleSetModel fit(const Dataset& dataset, const LearnerConfig& config);

}  // namespace corset

#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "corset/label_space.hpp"
#include "corset/random.hpp"
#include "corset/rules.hpp"

namespace corset {

/// Records split by a tail: positives contain every label of T, the rest
/// are negatives. Disjoint, union = dataset.
struct Bipartition {
    IdSet positives;
    IdSet negatives;

    static Bipartition split(const Dataset& dataset, const IdSet& tail);
};

/// q_disc(H; T) = |D⁺_T[H]| * |D⁻_T \ D⁻_T[H]|.
std::int64_t discriminativity(const Dataset& dataset, const IdSet& head, const IdSet& tail);
std::int64_t discriminativity(const Dataset& dataset, const Bipartition& bipartition,
                              const IdSet& head);

/// Pair weight functions, in natural log (-inf encodes weight 0).
/// n_pos / n_common are the feature counts |F_{D⁺}| and |F_{D⁺} ∩ F_{D⁻}|.
///
/// discriminativity: 2^|F⁺| - 2^|F⁺∩F⁻| - |F⁺ \ F⁻|, the number of heads of
/// size >= 2 contained in F⁺ but not in F⁻.
/// head_count:       2^|F⁺| - 2^|F⁺∩F⁻|, the number of all non-empty heads
/// contained in F⁺ but not in F⁻ — exactly the outcomes of the pair-to-head
/// draw, which makes the composite head distribution proportional to q_disc.
enum class PairTarget { discriminativity, head_count };

long double log_weight_discriminativity(std::size_t n_pos, std::size_t n_common);
long double log_weight_head_count(std::size_t n_pos, std::size_t n_common);

/// Proposal components. w1(D⁺) = 2^|F⁺| - |F⁺| - 1 with w2 ≡ 1 is the tight
/// upper bound used by default; the original sqrt(w1 * w2) proposal with
/// w2(D⁻) = 2^|F| - 2^|F⁻| - |F⁻| - 1 is kept for convergence comparisons.
long double log_weight_w1(std::size_t n_pos);
long double log_weight_w1_nonempty(std::size_t n_pos);  // 2^|F⁺| - 1
long double log_weight_w2_original(std::size_t n_features, std::size_t n_neg);

enum class PairProposal { tight, boley_sqrt };

struct PairSample {
    RecordId positive = -1;
    RecordId negative = -1;
};

enum class HeadSampleStatus { ok, unlearnable, timeout };

struct CftpResult {
    HeadSampleStatus status = HeadSampleStatus::unlearnable;
    PairSample pair;
    std::uint64_t steps = 0;  // total backward updates until coalescence
};

struct CftpOptions {
    PairTarget target = PairTarget::discriminativity;
    PairProposal proposal = PairProposal::tight;
    std::uint64_t step_cap = 1u << 20;
};

/// Coupling-from-the-past over (positive, negative) record pairs. Simulates
/// an independence Metropolis chain backwards with doubling horizons; the
/// randomness (u_t, C_t) at each time index is drawn once and reused across
/// horizons, which is what makes the returned pair an exact draw from the
/// target. The bottom state ⊥ accepts a proposal exactly when every concrete
/// state would, so tracking ⊥ alone detects coalescence.
CftpResult cftp_sample_pair(const Dataset& dataset, const Bipartition& bipartition,
                            Rng& rng, const CftpOptions& options = {});

/// Algorithm step after the pair: H1 uniform over non-empty subsets of
/// F⁺ \ F⁻, H2 uniform over subsets of F⁺ ∩ F⁻, head = H1 ∪ H2.
IdSet sample_head_from_pair(const Dataset& dataset, const PairSample& pair, Rng& rng);

/// Support-proportional fallback: head ∼ |D⁺[H]| over non-empty subsets,
/// used when a tail has no negatives or no discriminating head exists.
/// Empty optional when every positive record has an empty feature set.
std::optional<IdSet> sample_head_support(const Dataset& dataset, const IdSet& positives,
                                         Rng& rng);

struct HeadResult {
    HeadSampleStatus status = HeadSampleStatus::unlearnable;
    IdSet head;
};

/// Full-space head sampler: CFTP pair with the head_count target followed by
/// the pair-to-head draw; the composite head distribution is exactly
/// proportional to discriminativity over all non-empty heads. Falls back to
/// the support sampler when discriminativity is identically zero.
HeadResult sample_head_full(const Dataset& dataset, const Bipartition& bipartition,
                            Rng& rng, std::uint64_t step_cap = 1u << 20);

/// Reduced-space head sampler (the SURS variant): CFTP over pairs weighted
/// by the number of interpretable feature sets contained in F⁺ but not F⁻,
/// then a uniform qualifying member. Exactly proportional to q_disc
/// restricted to the feature space M⁻.
HeadResult sample_head_reduced(const Dataset& dataset, const Bipartition& bipartition,
                               const ContainmentIndex& feature_index, Rng& rng,
                               std::uint64_t step_cap = 1u << 20);

/// Draws a pair directly from the proposal distribution (no exactness);
/// used to seed the greedy heuristic after a CFTP timeout.
std::optional<PairSample> proposal_pair(const Dataset& dataset, const Bipartition& bipartition,
                                        Rng& rng);

struct GreedyParams {
    double gamma = 0.5;    // negative-support penalty, > 0
    double epsilon = 0.05; // early-stop support fraction, in (0, 1)
};

/// Greedy feature selection over F⁺ \ F⁻ maximizing marginal gains of
/// φ(H) = |D[H] ∩ D⁺| - γ |D[H] ∩ D⁻|, early-stopped when |D[H]| drops
/// below ε |D⁺|; returns the prefix with the best recorded φ.
/// Throws when the candidate pool is empty (caller resamples the pair).
IdSet greedy_head(const Dataset& dataset, const Bipartition& bipartition,
                  const PairSample& pair, const GreedyParams& params);

/// Brute-force q_disc normalization over all non-empty heads (test oracle).
std::map<IdSet, double> exact_head_distribution(const Dataset& dataset, const IdSet& tail);
/// Same, restricted to the members of an interpretable feature space.
std::map<IdSet, double> exact_head_distribution_reduced(const Dataset& dataset,
                                                        const IdSet& tail,
                                                        const InterpretableSpace& space);
/// Normalized pair distribution for a target weight (test oracle).
std::map<std::pair<RecordId, RecordId>, double> exact_pair_distribution(
    const Dataset& dataset, const Bipartition& bipartition, PairTarget target);

}  // namespace corset

#include "corset/head_sampler.hpp"

#include <cassert>
#include <cmath>
#include <functional>
#include <limits>

namespace corset {

namespace {

constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
const long double kLn2 = std::log(2.0L);

}  // namespace

Bipartition Bipartition::split(const Dataset& dataset, const IdSet& tail) {
    Bipartition bp;
    bp.positives = dataset.tail_support(tail);
    IdSet all(dataset.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<RecordId>(i);
    bp.negatives = set_difference(all, bp.positives);
    return bp;
}

std::int64_t discriminativity(const Dataset& dataset, const Bipartition& bipartition,
                              const IdSet& head) {
    const IdSet support = dataset.head_support(head);
    const std::size_t pos_hits = intersect_size(support, bipartition.positives);
    const std::size_t neg_hits = intersect_size(support, bipartition.negatives);
    return static_cast<std::int64_t>(pos_hits) *
           static_cast<std::int64_t>(bipartition.negatives.size() - neg_hits);
}

std::int64_t discriminativity(const Dataset& dataset, const IdSet& head, const IdSet& tail) {
    return discriminativity(dataset, Bipartition::split(dataset, tail), head);
}

// log(2^m - 2^a - b), -inf when the value is <= 0
long double log_weight_discriminativity(std::size_t n_pos, std::size_t n_common) {
    const auto m = static_cast<int>(n_pos);
    if (n_pos < 2 || n_common == n_pos) return kNegInf;
    const auto b = static_cast<long double>(n_pos - n_common);
    const long double deficit =
        std::ldexp(1.0L, static_cast<int>(n_common) - m) + b * std::ldexp(1.0L, -m);
    if (deficit >= 1.0L) return kNegInf;
    return static_cast<long double>(m) * kLn2 + std::log1p(-deficit);
}

long double log_weight_head_count(std::size_t n_pos, std::size_t n_common) {
    const auto m = static_cast<int>(n_pos);
    if (n_pos == 0 || n_common == n_pos) return kNegInf;
    const long double deficit = std::ldexp(1.0L, static_cast<int>(n_common) - m);
    return static_cast<long double>(m) * kLn2 + std::log1p(-deficit);
}

long double log_weight_w1(std::size_t n_pos) {
    const auto m = static_cast<int>(n_pos);
    if (n_pos < 2) return kNegInf;
    const long double deficit =
        static_cast<long double>(n_pos + 1) * std::ldexp(1.0L, -m);
    return static_cast<long double>(m) * kLn2 + std::log1p(-deficit);
}

long double log_weight_w1_nonempty(std::size_t n_pos) {
    const auto m = static_cast<int>(n_pos);
    if (n_pos == 0) return kNegInf;
    return static_cast<long double>(m) * kLn2 + std::log1p(-std::ldexp(1.0L, -m));
}

long double log_weight_w2_original(std::size_t n_features, std::size_t n_neg) {
    const auto f = static_cast<int>(n_features);
    const long double deficit =
        std::ldexp(1.0L, static_cast<int>(n_neg) - f) +
        static_cast<long double>(n_neg + 1) * std::ldexp(1.0L, -f);
    if (deficit >= 1.0L) return kNegInf;
    return static_cast<long double>(f) * kLn2 + std::log1p(-deficit);
}

namespace {

// Categorical over indices from log weights; underflow against the maximum
// is the genuine probability of such entries to double precision.
Categorical categorical_from_logs(const std::vector<long double>& logs) {
    long double max_log = kNegInf;
    for (long double l : logs) max_log = std::max(max_log, l);
    std::vector<long double> weights(logs.size(), 0.0L);
    if (max_log == kNegInf) return Categorical(weights);
    for (std::size_t i = 0; i < logs.size(); ++i)
        if (logs[i] != kNegInf) weights[i] = std::exp(logs[i] - max_log);
    return Categorical(weights);
}

struct PairModel {
    const IdSet* positives;
    const IdSet* negatives;
    std::function<long double(std::size_t, std::size_t)> log_target;  // by index
    std::vector<long double> log_prop_pos;
    std::vector<long double> log_prop_neg;
    // w <= w̄ must hold pointwise for coalescence detection; the original
    // sqrt proposal only guarantees it on sparse instances, so the check is
    // optional there.
    bool check_domination = true;
};

struct CachedStep {
    double u;
    std::int32_t pos, neg;           // proposal C_t, by index
    long double log_t, log_p;        // target/proposal logs of C_t
};

CftpResult cftp_engine(const PairModel& model, Rng& rng, std::uint64_t step_cap) {
    CftpResult result;
    const Categorical prop_pos = categorical_from_logs(model.log_prop_pos);
    const Categorical prop_neg = categorical_from_logs(model.log_prop_neg);
    if (prop_pos.empty() || prop_neg.empty()) return result;  // unlearnable

    // the chain can only coalesce if some pair has positive target weight
    bool feasible = false;
    for (std::size_t p = 0; p < model.positives->size() && !feasible; ++p) {
        if (model.log_prop_pos[p] == kNegInf) continue;
        for (std::size_t n = 0; n < model.negatives->size() && !feasible; ++n)
            feasible = model.log_target(p, n) != kNegInf;
    }
    if (!feasible) return result;

    std::vector<CachedStep> cache;
    auto draw_step = [&]() {
        CachedStep step;
        step.u = uniform_real01(rng);
        step.pos = static_cast<std::int32_t>(prop_pos.draw(rng));
        step.neg = static_cast<std::int32_t>(prop_neg.draw(rng));
        step.log_t = model.log_target(static_cast<std::size_t>(step.pos),
                                      static_cast<std::size_t>(step.neg));
        step.log_p = model.log_prop_pos[static_cast<std::size_t>(step.pos)] +
                     model.log_prop_neg[static_cast<std::size_t>(step.neg)];
        assert(!model.check_domination || step.log_t <= step.log_p + 1e-9L);
        return step;
    };

    std::uint64_t total_steps = 0;
    for (int i = 1;; ++i) {
        const std::uint64_t horizon = 1ull << i;
        while (cache.size() < horizon + 1) cache.push_back(draw_step());

        bool coalesced = false;
        std::size_t state_pos = 0, state_neg = 0;
        long double state_log_t = 0.0L, state_log_p = 0.0L;

        for (std::uint64_t t = horizon + 1; t-- > 0;) {
            if (++total_steps > step_cap) {
                result.status = HeadSampleStatus::timeout;
                result.steps = total_steps;
                return result;
            }
            const CachedStep& step = cache[t];
            if (step.log_t == kNegInf) continue;  // zero-weight proposal: nobody moves
            bool accept;
            if (!coalesced) {
                // ⊥ accepts iff u <= w(C)/w̄(C), i.e. iff every state accepts
                accept = std::log(static_cast<long double>(step.u)) <= step.log_t - step.log_p;
            } else {
                const long double log_ratio = (state_log_p - state_log_t) + (step.log_t - step.log_p);
                accept = std::log(static_cast<long double>(step.u)) <= log_ratio;
            }
            if (accept) {
                coalesced = true;
                state_pos = static_cast<std::size_t>(step.pos);
                state_neg = static_cast<std::size_t>(step.neg);
                state_log_t = step.log_t;
                state_log_p = step.log_p;
            }
        }
        if (coalesced) {
            result.status = HeadSampleStatus::ok;
            result.pair.positive = (*model.positives)[state_pos];
            result.pair.negative = (*model.negatives)[state_neg];
            result.steps = total_steps;
            return result;
        }
    }
}

std::size_t features_of(const Dataset& dataset, RecordId r) {
    return dataset.record(r).features.size();
}

PairModel make_pair_model(const Dataset& dataset, const Bipartition& bipartition,
                          const CftpOptions& options) {
    PairModel model;
    model.positives = &bipartition.positives;
    model.negatives = &bipartition.negatives;

    const bool sqrt_proposal = options.proposal == PairProposal::boley_sqrt;
    model.check_domination = !sqrt_proposal;
    model.log_prop_pos.resize(bipartition.positives.size());
    for (std::size_t p = 0; p < bipartition.positives.size(); ++p) {
        const std::size_t m = features_of(dataset, bipartition.positives[p]);
        long double lw = options.target == PairTarget::head_count
                             ? log_weight_w1_nonempty(m)
                             : log_weight_w1(m);
        if (sqrt_proposal && lw != kNegInf) lw *= 0.5L;
        model.log_prop_pos[p] = lw;
    }
    model.log_prop_neg.resize(bipartition.negatives.size(), 0.0L);
    if (sqrt_proposal) {
        const auto n_features = static_cast<std::size_t>(dataset.n_features());
        for (std::size_t n = 0; n < bipartition.negatives.size(); ++n) {
            const long double lw =
                log_weight_w2_original(n_features, features_of(dataset, bipartition.negatives[n]));
            model.log_prop_neg[n] = lw == kNegInf ? kNegInf : 0.5L * lw;
        }
    }

    const PairTarget target = options.target;
    const Dataset* ds = &dataset;
    const Bipartition* bp = &bipartition;
    model.log_target = [ds, bp, target](std::size_t p, std::size_t n) {
        const IdSet& fp = ds->record(bp->positives[p]).features;
        const IdSet& fn = ds->record(bp->negatives[n]).features;
        const std::size_t common = intersect_size(fp, fn);
        return target == PairTarget::head_count
                   ? log_weight_head_count(fp.size(), common)
                   : log_weight_discriminativity(fp.size(), common);
    };
    return model;
}

}  // namespace

CftpResult cftp_sample_pair(const Dataset& dataset, const Bipartition& bipartition,
                            Rng& rng, const CftpOptions& options) {
    if (bipartition.positives.empty() || bipartition.negatives.empty())
        return CftpResult{};  // unlearnable
    return cftp_engine(make_pair_model(dataset, bipartition, options), rng, options.step_cap);
}

IdSet sample_head_from_pair(const Dataset& dataset, const PairSample& pair, Rng& rng) {
    const IdSet& fp = dataset.record(pair.positive).features;
    const IdSet& fn = dataset.record(pair.negative).features;
    const IdSet diff = set_difference(fp, fn);
    const IdSet inter = intersect(fp, fn);
    if (diff.empty())
        throw std::invalid_argument("sample_head_from_pair: F(D+) \\ F(D-) is empty");

    IdSet h1;
    do {
        h1.clear();
        for (FeatureId f : diff)
            if (coin(rng)) h1.push_back(f);
    } while (h1.empty());

    IdSet head = std::move(h1);
    for (FeatureId f : inter)
        if (coin(rng)) head.push_back(f);
    sort_unique(head);
    return head;
}

std::optional<IdSet> sample_head_support(const Dataset& dataset, const IdSet& positives,
                                         Rng& rng) {
    std::vector<long double> logs(positives.size());
    for (std::size_t p = 0; p < positives.size(); ++p)
        logs[p] = log_weight_w1_nonempty(dataset.record(positives[p]).features.size());
    const Categorical cat = categorical_from_logs(logs);
    if (cat.empty()) return std::nullopt;
    const IdSet& features = dataset.record(positives[cat.draw(rng)]).features;
    IdSet head;
    do {
        head.clear();
        for (FeatureId f : features)
            if (coin(rng)) head.push_back(f);
    } while (head.empty());
    return head;
}

HeadResult sample_head_full(const Dataset& dataset, const Bipartition& bipartition,
                            Rng& rng, std::uint64_t step_cap) {
    HeadResult result;
    auto support_fallback = [&]() {
        auto head = sample_head_support(dataset, bipartition.positives, rng);
        if (head) {
            result.status = HeadSampleStatus::ok;
            result.head = std::move(*head);
        }
        return result;
    };
    if (bipartition.negatives.empty()) return support_fallback();

    CftpOptions options;
    options.target = PairTarget::head_count;
    options.step_cap = step_cap;
    const CftpResult pair = cftp_sample_pair(dataset, bipartition, rng, options);
    switch (pair.status) {
        case HeadSampleStatus::ok:
            result.status = HeadSampleStatus::ok;
            result.head = sample_head_from_pair(dataset, pair.pair, rng);
            return result;
        case HeadSampleStatus::unlearnable:
            // discriminativity is identically zero; fall back to support
            return support_fallback();
        case HeadSampleStatus::timeout:
            result.status = HeadSampleStatus::timeout;
            return result;
    }
    return result;
}

HeadResult sample_head_reduced(const Dataset& dataset, const Bipartition& bipartition,
                               const ContainmentIndex& feature_index, Rng& rng,
                               std::uint64_t step_cap) {
    (void)dataset;  // the containment index already carries the feature sets
    HeadResult result;
    auto restricted_support_fallback = [&]() {
        std::vector<long double> logs(bipartition.positives.size(), kNegInf);
        for (std::size_t p = 0; p < bipartition.positives.size(); ++p) {
            const std::size_t n = feature_index.members_of(bipartition.positives[p]).size();
            if (n > 0) logs[p] = std::log(static_cast<long double>(n));
        }
        const Categorical cat = categorical_from_logs(logs);
        if (cat.empty()) return result;  // unlearnable
        const auto& members = feature_index.members_of(
            bipartition.positives[cat.draw(rng)]);
        result.status = HeadSampleStatus::ok;
        result.head = feature_index.member(members[uniform_index(rng, members.size())]).items;
        return result;
    };
    if (bipartition.negatives.empty()) return restricted_support_fallback();

    PairModel model;
    model.positives = &bipartition.positives;
    model.negatives = &bipartition.negatives;
    model.log_prop_pos.resize(bipartition.positives.size(), kNegInf);
    for (std::size_t p = 0; p < bipartition.positives.size(); ++p) {
        const std::size_t n = feature_index.members_of(bipartition.positives[p]).size();
        if (n > 0) model.log_prop_pos[p] = std::log(static_cast<long double>(n));
    }
    model.log_prop_neg.resize(bipartition.negatives.size(), 0.0L);
    const Bipartition* bp = &bipartition;
    const ContainmentIndex* index = &feature_index;
    model.log_target = [bp, index](std::size_t p, std::size_t n) {
        const auto& in_pos = index->members_of(bp->positives[p]);
        const auto& in_neg = index->members_of(bp->negatives[n]);
        const std::size_t qualifying = in_pos.size() - intersect_size(in_pos, in_neg);
        return qualifying == 0 ? kNegInf : std::log(static_cast<long double>(qualifying));
    };

    const CftpResult pair = cftp_engine(model, rng, step_cap);
    switch (pair.status) {
        case HeadSampleStatus::ok: {
            const auto& in_pos = feature_index.members_of(pair.pair.positive);
            const auto& in_neg = feature_index.members_of(pair.pair.negative);
            std::vector<std::int32_t> qualifying;
            std::set_difference(in_pos.begin(), in_pos.end(), in_neg.begin(), in_neg.end(),
                                std::back_inserter(qualifying));
            result.status = HeadSampleStatus::ok;
            result.head =
                feature_index.member(qualifying[uniform_index(rng, qualifying.size())]).items;
            return result;
        }
        case HeadSampleStatus::unlearnable:
            return restricted_support_fallback();
        case HeadSampleStatus::timeout:
            result.status = HeadSampleStatus::timeout;
            return result;
    }
    return result;
}

std::optional<PairSample> proposal_pair(const Dataset& dataset, const Bipartition& bipartition,
                                        Rng& rng) {
    if (bipartition.negatives.empty() || bipartition.positives.empty()) return std::nullopt;
    std::vector<long double> logs(bipartition.positives.size());
    for (std::size_t p = 0; p < bipartition.positives.size(); ++p)
        logs[p] = log_weight_w1_nonempty(dataset.record(bipartition.positives[p]).features.size());
    const Categorical cat = categorical_from_logs(logs);
    if (cat.empty()) return std::nullopt;
    PairSample pair;
    pair.positive = bipartition.positives[cat.draw(rng)];
    pair.negative = bipartition.negatives[uniform_index(rng, bipartition.negatives.size())];
    return pair;
}

IdSet greedy_head(const Dataset& dataset, const Bipartition& bipartition,
                  const PairSample& pair, const GreedyParams& params) {
    if (params.gamma <= 0.0) throw std::invalid_argument("greedy_head: gamma must be > 0");
    if (params.epsilon <= 0.0 || params.epsilon >= 1.0)
        throw std::invalid_argument("greedy_head: epsilon must be in (0, 1)");

    IdSet pool = set_difference(dataset.record(pair.positive).features,
                                dataset.record(pair.negative).features);
    if (pool.empty())
        throw std::invalid_argument("greedy_head: empty candidate pool F(D+) \\ F(D-)");

    const double min_support =
        params.epsilon * static_cast<double>(bipartition.positives.size());

    IdSet support;  // D[H]; D[∅] is every record
    support.resize(dataset.size());
    for (std::size_t i = 0; i < support.size(); ++i) support[i] = static_cast<RecordId>(i);

    auto phi_of = [&](const IdSet& sup) {
        const auto pos = static_cast<double>(intersect_size(sup, bipartition.positives));
        const auto neg = static_cast<double>(sup.size()) - pos;
        return pos - params.gamma * neg;
    };

    IdSet chosen;
    std::vector<double> phi_trace;
    double phi_current = phi_of(support);
    while (!pool.empty()) {
        // maximizing the marginal gain of phi is maximizing phi itself here,
        // since the baseline is shared by every candidate
        double best_phi = -std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        IdSet best_support;
        for (std::size_t k = 0; k < pool.size(); ++k) {
            IdSet sup = intersect(support, dataset.feature_index(pool[k]));
            const double phi = phi_of(sup);
            if (phi > best_phi) {
                best_phi = phi;
                best_idx = k;
                best_support = std::move(sup);
            }
        }
        chosen.push_back(pool[best_idx]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best_idx));
        support = std::move(best_support);
        phi_current = best_phi;
        phi_trace.push_back(phi_current);
        if (static_cast<double>(support.size()) < min_support) break;
    }

    std::size_t best_prefix = 0;
    for (std::size_t i = 1; i < phi_trace.size(); ++i)
        if (phi_trace[i] > phi_trace[best_prefix]) best_prefix = i;
    IdSet head(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(best_prefix + 1));
    sort_unique(head);
    return head;
}

std::map<IdSet, double> exact_head_distribution(const Dataset& dataset, const IdSet& tail) {
    const Bipartition bp = Bipartition::split(dataset, tail);
    IdSet universe;
    for (RecordId r : bp.positives) universe = set_union(universe, dataset.record(r).features);
    if (universe.size() > 20)
        throw std::invalid_argument("exact_head_distribution: too many features to enumerate");

    std::map<IdSet, double> out;
    long double total = 0.0L;
    const std::size_t u = universe.size();
    for (std::uint64_t mask = 1; mask < (1ull << u); ++mask) {
        IdSet head;
        for (std::size_t b = 0; b < u; ++b)
            if (mask & (1ull << b)) head.push_back(universe[b]);
        const auto q = static_cast<long double>(discriminativity(dataset, bp, head));
        if (q > 0.0L) {
            out[head] = static_cast<double>(q);
            total += q;
        }
    }
    for (auto& [head, p] : out) p = static_cast<double>(static_cast<long double>(p) / total);
    return out;
}

std::map<IdSet, double> exact_head_distribution_reduced(const Dataset& dataset,
                                                        const IdSet& tail,
                                                        const InterpretableSpace& space) {
    const Bipartition bp = Bipartition::split(dataset, tail);
    std::map<IdSet, double> out;
    long double total = 0.0L;
    for (const auto& entry : space.members) {
        const auto q = static_cast<long double>(discriminativity(dataset, bp, entry.items));
        if (q > 0.0L) {
            out[entry.items] = static_cast<double>(q);
            total += q;
        }
    }
    for (auto& [head, p] : out) p = static_cast<double>(static_cast<long double>(p) / total);
    return out;
}

std::map<std::pair<RecordId, RecordId>, double> exact_pair_distribution(
    const Dataset& dataset, const Bipartition& bipartition, PairTarget target) {
    std::map<std::pair<RecordId, RecordId>, double> out;
    long double total = 0.0L;
    for (RecordId p : bipartition.positives) {
        const IdSet& fp = dataset.record(p).features;
        for (RecordId n : bipartition.negatives) {
            const IdSet& fn = dataset.record(n).features;
            const std::size_t common = intersect_size(fp, fn);
            const long double lw = target == PairTarget::head_count
                                       ? log_weight_head_count(fp.size(), common)
                                       : log_weight_discriminativity(fp.size(), common);
            if (lw == kNegInf) continue;
            const long double w = std::exp(lw);
            out[{p, n}] = static_cast<double>(w);
            total += w;
        }
    }
    for (auto& [pair, prob] : out)
        prob = static_cast<double>(static_cast<long double>(prob) / total);
    return out;
}

}  // namespace corset

#include "corset/tail_sampler.hpp"

#include <cmath>

namespace corset {

IdSet record_specific_coverage(const DataRecord& record, const Rule& rule) {
    if (!rule.matches(record.features, record.labels)) return {};
    return intersect(record.labels, rule.tail);
}

IdSet record_specific_coverage(const DataRecord& record, const std::vector<Rule>& rules) {
    IdSet covered;
    for (const Rule& rule : rules)
        covered = set_union(covered, record_specific_coverage(record, rule));
    return covered;
}

IdSet marginal_coverage(const DataRecord& record, const IdSet& tail, const RuleSet& ruleset) {
    return set_difference(intersect(record.labels, tail),
                          record_specific_coverage(record, ruleset.rules()));
}

TailWeights compute_weights_full(const Dataset& dataset, const RuleSet& ruleset) {
    TailWeights w;
    w.space_ = TailWeights::Space::full;
    w.weights_.resize(dataset.size(), 0.0L);
    w.uncovered_.resize(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& record = dataset.record(static_cast<RecordId>(i));
        w.uncovered_[i] = set_difference(record.labels,
                                         ruleset.covered_labels(static_cast<RecordId>(i)));
        if (w.uncovered_[i].empty()) continue;
        // w(D) = |uncov_D| * 2^(|L_D| - 1)
        w.weights_[i] = std::ldexp(static_cast<long double>(w.uncovered_[i].size()),
                                   static_cast<int>(record.labels.size()) - 1);
    }
    w.categorical_ = Categorical(w.weights_);
    return w;
}

TailWeights compute_weights_reduced(const Dataset& dataset, const ContainmentIndex& index,
                                    const RuleSet& ruleset) {
    TailWeights w;
    w.space_ = TailWeights::Space::reduced;
    w.weights_.resize(dataset.size(), 0.0L);
    w.uncovered_.resize(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto rec_id = static_cast<RecordId>(i);
        const IdSet& covered = ruleset.covered_labels(rec_id);
        w.uncovered_[i] = set_difference(dataset.record(rec_id).labels, covered);
        long double sum = 0.0L;
        for (std::int32_t member_id : index.members_of(rec_id)) {
            const IdSet& items = index.member(member_id).items;
            sum += static_cast<long double>(items.size() - intersect_size(items, covered));
        }
        w.weights_[i] = sum;
    }
    w.categorical_ = Categorical(w.weights_);
    return w;
}

std::optional<IdSet> sample_tail_full(const Dataset& dataset, const TailWeights& weights,
                                      Rng& rng) {
    if (weights.all_zero()) return std::nullopt;
    const RecordId rec = weights.draw_record(rng);
    const IdSet& uncovered = weights.uncovered(rec);
    const IdSet& labels = dataset.record(rec).labels;
    const LabelId mandatory = uncovered[uniform_index(rng, uncovered.size())];
    IdSet tail;
    tail.reserve(labels.size());
    for (LabelId l : labels) {
        if (l == mandatory) tail.push_back(l);
        else if (coin(rng)) tail.push_back(l);
    }
    return tail;
}

std::optional<IdSet> sample_tail_full(const Dataset& dataset, const RuleSet& ruleset,
                                      Rng& rng) {
    return sample_tail_full(dataset, compute_weights_full(dataset, ruleset), rng);
}

std::optional<IdSet> sample_tail_reduced(const Dataset& dataset, const ContainmentIndex& index,
                                         const RuleSet& ruleset, const TailWeights& weights,
                                         Rng& rng) {
    if (weights.all_zero()) return std::nullopt;
    const RecordId rec = weights.draw_record(rng);
    const IdSet& covered = ruleset.covered_labels(rec);
    const auto& member_ids = index.members_of(rec);
    std::vector<long double> member_weights(member_ids.size());
    for (std::size_t m = 0; m < member_ids.size(); ++m) {
        const IdSet& items = index.member(member_ids[m]).items;
        member_weights[m] =
            static_cast<long double>(items.size() - intersect_size(items, covered));
    }
    const Categorical stage2(member_weights);
    (void)dataset;
    return index.member(member_ids[stage2.draw(rng)]).items;
}

std::optional<IdSet> sample_tail_reduced(const Dataset& dataset, const ContainmentIndex& index,
                                         const RuleSet& ruleset, Rng& rng) {
    return sample_tail_reduced(dataset, index, ruleset,
                               compute_weights_reduced(dataset, index, ruleset), rng);
}

std::map<IdSet, double> exact_tail_distribution(const Dataset& dataset, const RuleSet& ruleset,
                                                const InterpretableSpace* space) {
    // rarea(T) = sum over records containing T of |(L_D ∩ T) \ cov_D|
    auto rarea = [&](const IdSet& tail) {
        long double area = 0.0L;
        for (RecordId rec : dataset.tail_support(tail))
            area += static_cast<long double>(
                marginal_coverage(dataset.record(rec), tail, ruleset).size());
        return area;
    };

    std::map<IdSet, long double> unnormalized;
    if (space != nullptr) {
        for (const auto& entry : space->members) {
            const long double area = rarea(entry.items);
            if (area > 0.0L) unnormalized[entry.items] = area;
        }
    } else {
        long double total_tails = 0.0L;
        for (const auto& record : dataset.records())
            total_tails += std::ldexp(1.0L, static_cast<int>(record.labels.size()));
        if (total_tails > static_cast<long double>(1u << 20))
            throw std::invalid_argument("exact_tail_distribution: instance too large to enumerate");
        for (const auto& record : dataset.records()) {
            const auto& labels = record.labels;
            const std::size_t m = labels.size();
            for (std::uint64_t mask = 1; mask < (1ull << m); ++mask) {
                IdSet tail;
                for (std::size_t b = 0; b < m; ++b)
                    if (mask & (1ull << b)) tail.push_back(labels[b]);
                if (unnormalized.count(tail)) continue;
                const long double area = rarea(tail);
                if (area > 0.0L) unnormalized[tail] = area;
            }
        }
    }

    long double total = 0.0L;
    for (const auto& [tail, area] : unnormalized) total += area;
    std::map<IdSet, double> distribution;
    if (total <= 0.0L) return distribution;
    for (const auto& [tail, area] : unnormalized)
        distribution[tail] = static_cast<double>(area / total);
    return distribution;
}

}  // namespace corset

#include "corset/rules.hpp"

#include <cmath>
#include <stdexcept>

namespace corset {

namespace {

constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) {
    if (p < kProbClamp) return kProbClamp;
    if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
    return p;
}

double bernoulli_kl(double p, double q) {
    p = clamp_prob(p);
    q = clamp_prob(q);
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

CoverageSet coverage_from(const IdSet& support, const IdSet& tail) {
    std::vector<std::uint64_t> pairs;
    pairs.reserve(support.size() * tail.size());
    for (RecordId i : support)
        for (LabelId k : tail) pairs.push_back(CoverageSet::encode(i, k));
    return CoverageSet(std::move(pairs));
}

}  // namespace

std::size_t CoverageSet::intersection_size(const CoverageSet& other) const {
    std::size_t n = 0;
    auto i = pairs_.begin();
    auto j = other.pairs_.begin();
    while (i != pairs_.end() && j != other.pairs_.end()) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else { ++n; ++i; ++j; }
    }
    return n;
}

Rule Rule::build(const Dataset& dataset, IdSet head, IdSet tail) {
    sort_unique(head);
    sort_unique(tail);
    if (head.empty()) throw std::invalid_argument("Rule: head must be non-empty");
    if (tail.empty()) throw std::invalid_argument("Rule: tail must be non-empty");
    Rule rule;
    rule.head = std::move(head);
    rule.tail = std::move(tail);
    rule.head_support = dataset.head_support(rule.head);
    rule.support = intersect(rule.head_support, dataset.tail_support(rule.tail));
    rule.coverage = coverage_from(rule.support, rule.tail);
    rule.accuracy = rule.head_support.empty() ? 0.0 : adjusted_accuracy(dataset, rule);
    return rule;
}

CoverageSet tail_coverage(const Dataset& dataset, const IdSet& tail) {
    return coverage_from(dataset.tail_support(tail), tail);
}

double adjusted_accuracy(const Dataset& dataset, const Rule& rule) {
    if (rule.head_support.empty())
        throw std::domain_error("adjusted_accuracy: undefined precision (empty head support)");
    const double precision = static_cast<double>(rule.support.size()) /
                             static_cast<double>(rule.head_support.size());
    const double base_rate = static_cast<double>(dataset.tail_support(rule.tail).size()) /
                             static_cast<double>(dataset.size());
    if (!(precision > base_rate)) return 0.0;
    return bernoulli_kl(precision, base_rate);
}

double jaccard_distance(const Rule& a, const Rule& b) {
    const std::size_t inter = a.coverage.intersection_size(b.coverage);
    const std::size_t uni = a.coverage.size() + b.coverage.size() - inter;
    if (uni == 0) return 1.0;  // two dead rules are maximally diverse
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

void RuleSet::insert(Rule rule) {
    const auto new_index = static_cast<std::int32_t>(rules_.size());
    for (const Rule& existing : rules_) diversity_sum_ += jaccard_distance(rule, existing);

    std::int64_t unique_count = 0;
    for (std::uint64_t pair : rule.coverage.pairs()) {
        PairInfo& info = multiplicity_[pair];
        ++info.count;
        if (info.count == 1) {
            info.sole_owner = new_index;
            ++unique_count;
        } else if (info.count == 2) {
            // the previous sole coverer loses this pair from its quality
            const auto owner = static_cast<std::size_t>(info.sole_owner);
            --unique_pairs_[owner];
            quality_sum_ -= rules_[owner].accuracy;
            info.sole_owner = -1;
        }
    }
    unique_pairs_.push_back(unique_count);
    quality_sum_ += rule.accuracy * static_cast<double>(unique_count);

    if (covered_by_record_.size() < dataset_->size())
        covered_by_record_.resize(dataset_->size());
    for (RecordId rec : rule.support) {
        auto& covered = covered_by_record_[static_cast<std::size_t>(rec)];
        covered = set_union(covered, rule.tail);
    }
    rules_.push_back(std::move(rule));
}

const IdSet& RuleSet::covered_labels(RecordId record) const {
    static const IdSet kEmpty;
    const auto idx = static_cast<std::size_t>(record);
    if (idx >= covered_by_record_.size()) return kEmpty;
    return covered_by_record_[idx];
}

std::int64_t RuleSet::uncovered_area(const CoverageSet& cov) const {
    std::int64_t n = 0;
    for (std::uint64_t pair : cov.pairs())
        if (multiplicity_.count(pair) == 0) ++n;
    return n;
}

double RuleSet::diversity_sum(const Rule& candidate) const {
    double sum = 0.0;
    for (const Rule& rule : rules_) sum += jaccard_distance(candidate, rule);
    return sum;
}

double RuleSet::insertion_delta(const Rule& candidate, const ObjectiveParams& params) const {
    std::int64_t new_pairs = 0;
    double damage = 0.0;
    for (std::uint64_t pair : candidate.coverage.pairs()) {
        const auto it = multiplicity_.find(pair);
        if (it == multiplicity_.end()) {
            ++new_pairs;
        } else if (it->second.count == 1) {
            // the sole coverer loses this pair from its leave-one-out quality
            damage += rules_[static_cast<std::size_t>(it->second.sole_owner)].accuracy;
        }
    }
    return candidate.accuracy * static_cast<double>(new_pairs) +
           params.lambda * diversity_sum(candidate) - damage;
}

double RuleSet::objective_value(const ObjectiveParams& params) const {
    return quality_sum_ + params.lambda * diversity_sum_;
}

double RuleSet::objective_value_scratch(const std::vector<Rule>& rules,
                                        const ObjectiveParams& params) {
    double quality_sum = 0.0;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        std::int64_t unique = 0;
        for (std::uint64_t pair : rules[i].coverage.pairs()) {
            bool covered_elsewhere = false;
            for (std::size_t j = 0; j < rules.size() && !covered_elsewhere; ++j)
                if (j != i)
                    covered_elsewhere = std::binary_search(rules[j].coverage.pairs().begin(),
                                                           rules[j].coverage.pairs().end(), pair);
            if (!covered_elsewhere) ++unique;
        }
        quality_sum += rules[i].accuracy * static_cast<double>(unique);
    }
    double diversity = 0.0;
    for (std::size_t i = 0; i < rules.size(); ++i)
        for (std::size_t j = i + 1; j < rules.size(); ++j)
            diversity += jaccard_distance(rules[i], rules[j]);
    return quality_sum + params.lambda * diversity;
}

std::int64_t uncovered_area(const Rule& rule, const RuleSet& ruleset) {
    return ruleset.uncovered_area(rule.coverage);
}

std::int64_t uncovered_area(const CoverageSet& cov, const RuleSet& ruleset) {
    return ruleset.uncovered_area(cov);
}

double quality(const Dataset& dataset, const Rule& rule, const RuleSet& ruleset) {
    (void)dataset;
    const std::int64_t area = ruleset.uncovered_area(rule.coverage);
    if (area == 0) return 0.0;
    return static_cast<double>(area) * rule.accuracy;
}

double marginal_gain(const Dataset& dataset, const Rule& candidate,
                     const RuleSet& ruleset, const ObjectiveParams& params) {
    return quality(dataset, candidate, ruleset) +
           params.lambda * ruleset.diversity_sum(candidate);
}

bool better_candidate(double gain_a, const Rule& a, double gain_b, const Rule& b) {
    if (gain_a != gain_b) return gain_a > gain_b;
    if (a.coverage.size() != b.coverage.size()) return a.coverage.size() > b.coverage.size();
    if (a.head != b.head) return a.head < b.head;
    return a.tail < b.tail;
}

}  // namespace corset

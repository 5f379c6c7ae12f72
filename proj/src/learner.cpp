#include "corset/learner.hpp"

#include <map>
#include <stdexcept>
#include <thread>

namespace corset {

std::string to_string(HeadVariant variant) {
    return variant == HeadVariant::surs ? "surs" : "gh";
}

HeadVariant head_variant_from_string(const std::string& name) {
    if (name == "surs") return HeadVariant::surs;
    if (name == "gh") return HeadVariant::gh;
    throw std::invalid_argument("unknown head variant '" + name + "' (expected surs|gh)");
}

void LearnerConfig::validate() const {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    if (tau && (*tau < 0.0 || *tau > 1.0))
        throw std::invalid_argument("tau must be in [0, 1]");
    if (max_rules < 1) throw std::invalid_argument("max_rules must be >= 1");
    if (pool_size < 1) throw std::invalid_argument("pool_size must be >= 1");
    if (theta <= 0.0 || theta > 1.0) throw std::invalid_argument("theta must be in (0, 1]");
    if (max_itemset_size < 1) throw std::invalid_argument("max itemset size must be >= 1");
    if (greedy.gamma <= 0.0) throw std::invalid_argument("gamma must be > 0");
    if (greedy.epsilon <= 0.0 || greedy.epsilon >= 1.0)
        throw std::invalid_argument("epsilon must be in (0, 1)");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

struct CandidateGenerator::Impl {
    const Dataset* dataset;
    LearnerConfig config;
    InterpretableSpace label_space;
    std::unique_ptr<ContainmentIndex> label_index;
    InterpretableSpace feature_space;               // surs only
    std::unique_ptr<ContainmentIndex> feature_index;  // surs only

    std::optional<Rule> draw_candidate(const RuleSet& ruleset, const TailWeights& weights,
                                       Rng& rng) const;
};

CandidateGenerator::CandidateGenerator(const Dataset& dataset, const LearnerConfig& config)
    : impl_(std::make_unique<Impl>()) {
    config.validate();
    impl_->dataset = &dataset;
    impl_->config = config;
    impl_->label_space = enumerate_probable_cliques(
        build_label_graph(dataset), config.theta, config.max_itemset_size,
        config.clique_node_budget);
    impl_->label_index = std::make_unique<ContainmentIndex>(
        build_containment_index(dataset, impl_->label_space));
    if (config.variant == HeadVariant::surs) {
        impl_->feature_space = build_feature_space(dataset, config.theta,
                                                   config.max_itemset_size,
                                                   config.clique_node_budget);
        impl_->feature_index = std::make_unique<ContainmentIndex>(
            build_feature_containment_index(dataset, impl_->feature_space));
    }
}

CandidateGenerator::~CandidateGenerator() = default;
CandidateGenerator::CandidateGenerator(CandidateGenerator&&) noexcept = default;
CandidateGenerator& CandidateGenerator::operator=(CandidateGenerator&&) noexcept = default;

const ContainmentIndex& CandidateGenerator::label_containment() const {
    return *impl_->label_index;
}

const InterpretableSpace& CandidateGenerator::label_space() const {
    return impl_->label_space;
}

// One candidate: reduced-space tail, then a head per the configured variant.
// Returns nullopt when the slot's tail turned out unlearnable.
std::optional<Rule> CandidateGenerator::Impl::draw_candidate(const RuleSet& ruleset,
                                                             const TailWeights& weights,
                                                             Rng& rng) const {
    const Dataset& ds = *dataset;
    auto tail = sample_tail_reduced(ds, *label_index, ruleset, weights, rng);
    if (!tail) return std::nullopt;

    const Bipartition bipartition = Bipartition::split(ds, *tail);
    IdSet head;
    if (config.variant == HeadVariant::surs) {
        HeadResult res =
            sample_head_reduced(ds, bipartition, *feature_index, rng, config.cftp_step_cap);
        if (res.status == HeadSampleStatus::timeout) {
            // liveness over the guarantee for this one candidate
            auto pair = proposal_pair(ds, bipartition, rng);
            if (!pair) return std::nullopt;
            try {
                head = greedy_head(ds, bipartition, *pair, config.greedy);
            } catch (const std::invalid_argument&) {
                return std::nullopt;
            }
        } else if (res.status == HeadSampleStatus::ok) {
            head = std::move(res.head);
        } else {
            return std::nullopt;
        }
    } else {
        CftpOptions options;
        options.target = PairTarget::discriminativity;
        options.step_cap = config.cftp_step_cap;
        CftpResult pair = cftp_sample_pair(ds, bipartition, rng, options);
        if (pair.status == HeadSampleStatus::ok) {
            head = greedy_head(ds, bipartition, pair.pair, config.greedy);
        } else {
            std::optional<PairSample> fallback;
            if (pair.status == HeadSampleStatus::timeout)
                fallback = proposal_pair(ds, bipartition, rng);
            if (fallback) {
                try {
                    head = greedy_head(ds, bipartition, *fallback, config.greedy);
                } catch (const std::invalid_argument&) {
                    return std::nullopt;
                }
            } else {
                auto supported = sample_head_support(ds, bipartition.positives, rng);
                if (!supported) return std::nullopt;
                head = std::move(*supported);
            }
        }
    }
    return Rule::build(ds, std::move(head), std::move(*tail));
}

std::vector<Rule> CandidateGenerator::generate(const RuleSet& ruleset, int iteration,
                                               int attempt) const {
    const Impl& impl = *impl_;
    const TailWeights weights =
        compute_weights_reduced(*impl.dataset, *impl.label_index, ruleset);
    if (weights.all_zero()) return {};  // fully covered

    const int pool_size = impl.config.pool_size;
    std::vector<std::optional<Rule>> slots(static_cast<std::size_t>(pool_size));
    auto run_slot = [&](int slot) {
        Rng rng = make_rng(impl.config.seed, static_cast<std::uint64_t>(iteration),
                           static_cast<std::uint64_t>(attempt),
                           static_cast<std::uint64_t>(slot));
        slots[static_cast<std::size_t>(slot)] = impl.draw_candidate(ruleset, weights, rng);
    };

    const int threads = std::min(impl.config.threads, pool_size);
    if (threads <= 1) {
        for (int s = 0; s < pool_size; ++s) run_slot(s);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w)
            workers.emplace_back([&, w] {
                for (int s = w; s < pool_size; s += threads) run_slot(s);
            });
        for (auto& worker : workers) worker.join();
    }

    std::vector<Rule> pool;
    std::map<std::pair<IdSet, IdSet>, bool> seen;
    for (auto& slot : slots) {
        if (!slot) continue;
        auto key = std::make_pair(slot->head, slot->tail);
        if (seen.emplace(std::move(key), true).second) pool.push_back(std::move(*slot));
    }
    return pool;
}

std::vector<Rule> gen_cand_rules(const Dataset& dataset, const RuleSet& ruleset,
                                 const CandidateGenerator& generator, int iteration) {
    (void)dataset;
    return generator.generate(ruleset, iteration);
}

std::vector<Rule> greedy_over_pool(const Dataset& dataset, const std::vector<Rule>& pool,
                                   int budget, double lambda) {
    std::vector<Rule> candidates;
    {
        std::map<std::pair<IdSet, IdSet>, bool> seen;
        for (const Rule& rule : pool)
            if (seen.emplace(std::make_pair(rule.head, rule.tail), true).second)
                candidates.push_back(rule);
    }
    // argmax over the exact objective change f(S ∪ {r}) - f(S); unlike the
    // q + λΣd surrogate it accounts for the quality other rules lose when
    // their uniquely covered pairs get shadowed
    const ObjectiveParams params{lambda};
    RuleSet selected(dataset);
    std::vector<bool> used(candidates.size(), false);
    for (int step = 0; step < budget; ++step) {
        int best = -1;
        double best_delta = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (used[i]) continue;
            const double delta = selected.insertion_delta(candidates[i], params);
            if (best < 0 || better_candidate(delta, candidates[i], best_delta,
                                             candidates[static_cast<std::size_t>(best)])) {
                best = static_cast<int>(i);
                best_delta = delta;
            }
        }
        if (best < 0) break;  // pool exhausted
        used[static_cast<std::size_t>(best)] = true;
        selected.insert(candidates[static_cast<std::size_t>(best)]);
    }
    return selected.rules();
}

RuleSetModel fit(const Dataset& dataset, const LearnerConfig& config) {
    config.validate();
    if (dataset.size() == 0) throw std::invalid_argument("fit: dataset is empty");

    const CandidateGenerator generator(dataset, config);
    const ObjectiveParams params{config.lambda};
    const auto label_norm = static_cast<double>(dataset.total_label_occurrences());

    RuleSet selected(dataset);
    std::vector<Rule> archive;
    std::map<std::pair<IdSet, IdSet>, bool> archived;
    RuleSetModel model;
    model.config = config;
    double cumulative_gain = 0.0;
    std::string stop_reason;

    for (int iteration = 0; static_cast<int>(selected.size()) < config.max_rules;
         ++iteration) {
        const Rule* best = nullptr;
        double best_gain = 0.0;
        int pool_count = 0;
        int dead_count = 0;
        std::vector<Rule> pool;

        // one refill is allowed when every candidate is pure dead weight
        for (int attempt = 0; attempt < 2 && best == nullptr; ++attempt) {
            pool = generator.generate(selected, iteration, attempt);
            if (pool.empty() && attempt == 0) {
                stop_reason = "no candidates (fully covered or unlearnable)";
                break;
            }
            pool_count = static_cast<int>(pool.size());
            dead_count = 0;
            for (const Rule& rule : pool)
                if (rule.accuracy == 0.0) ++dead_count;
            for (const Rule& rule : pool) {
                if (!archived.emplace(std::make_pair(rule.head, rule.tail), true).second)
                    continue;
                archive.push_back(rule);
            }
            for (const Rule& candidate : pool) {
                const double q = quality(dataset, candidate, selected);
                const double div = config.lambda * selected.diversity_sum(candidate);
                if (q == 0.0 && div == 0.0) continue;  // dead candidate, skipped
                const double gain = q + div;
                if (best == nullptr ||
                    better_candidate(gain, candidate, best_gain, *best)) {
                    best = &candidate;
                    best_gain = gain;
                }
            }
        }
        if (best == nullptr) {
            if (stop_reason.empty()) stop_reason = "no eligible candidates";
            break;
        }

        // newly predicted label occurrences of the chosen rule, relative to ‖L‖
        const double c =
            label_norm == 0.0
                ? 0.0
                : static_cast<double>(uncovered_area(*best, selected)) / label_norm;
        cumulative_gain += best_gain;

        IterationLog log;
        log.iteration = iteration;
        log.pool_size = pool_count;
        log.dead_candidates = dead_count;
        log.head = best->head;
        log.tail = best->tail;
        log.gain = best_gain;
        log.coverage_ratio = c;
        log.objective = cumulative_gain;
        model.trace.push_back(std::move(log));

        selected.insert(*best);

        if (config.tau && c <= *config.tau) {
            stop_reason = "tolerance reached";
            break;
        }
    }
    if (stop_reason.empty()) stop_reason = "rule cap reached";

    model.rules = selected.rules();
    model.objective = RuleSet::objective_value_scratch(model.rules, params);
    model.stop_reason = stop_reason;

    if (config.two_pass && !model.rules.empty()) {
        std::vector<Rule> second =
            greedy_over_pool(dataset, archive, static_cast<int>(model.rules.size()),
                             config.lambda);
        const double second_objective = RuleSet::objective_value_scratch(second, params);
        if (second_objective > model.objective) {
            model.rules = std::move(second);
            model.objective = second_objective;
            model.stop_reason += "; second pass won";
        }
    }
    return model;
}

}  // namespace corset

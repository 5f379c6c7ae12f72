#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "corset/learner.hpp"
#include "corset/random.hpp"
#include "corset/synth.hpp"

using namespace corset;

namespace {

Dataset random_dataset(Rng& rng, int n_records, int n_features, int n_labels,
                       double density = 0.5) {
    std::vector<DataRecord> records(static_cast<std::size_t>(n_records));
    for (auto& rec : records) {
        for (int f = 0; f < n_features; ++f)
            if (uniform_real01(rng) < density) rec.features.push_back(f);
        for (int l = 0; l < n_labels; ++l)
            if (uniform_real01(rng) < density) rec.labels.push_back(l);
    }
    return Dataset(std::move(records), n_features, n_labels);
}

std::vector<Rule> random_pool(Rng& rng, const Dataset& ds, int size) {
    std::vector<Rule> pool;
    int guard = 0;
    while (static_cast<int>(pool.size()) < size && ++guard < 500) {
        const auto rec_id = static_cast<RecordId>(uniform_index(rng, ds.size()));
        const DataRecord& rec = ds.record(rec_id);
        if (rec.features.empty() || rec.labels.empty()) continue;
        IdSet head, tail;
        for (FeatureId f : rec.features)
            if (coin(rng)) head.push_back(f);
        for (LabelId l : rec.labels)
            if (coin(rng)) tail.push_back(l);
        if (head.empty() || tail.empty()) continue;
        pool.push_back(Rule::build(ds, head, tail));
    }
    return pool;
}

// exhaustive best subset of exactly `budget` rules
double brute_force_best(const Dataset& ds, const std::vector<Rule>& pool, int budget,
                        double lambda) {
    std::vector<Rule> deduped;
    for (const Rule& rule : pool) {
        bool seen = false;
        for (const Rule& kept : deduped)
            if (kept == rule) seen = true;
        if (!seen) deduped.push_back(rule);
    }
    (void)ds;
    const ObjectiveParams params{lambda};
    const std::size_t n = deduped.size();
    double best = 0.0;
    std::vector<std::size_t> chosen;
    auto recurse = [&](auto&& self, std::size_t start, int remaining) -> void {
        if (remaining == 0) {
            std::vector<Rule> subset;
            for (std::size_t idx : chosen) subset.push_back(deduped[idx]);
            best = std::max(best, RuleSet::objective_value_scratch(subset, params));
            return;
        }
        for (std::size_t i = start; i + static_cast<std::size_t>(remaining) <= n; ++i) {
            chosen.push_back(i);
            self(self, i + 1, remaining - 1);
            chosen.pop_back();
        }
    };
    recurse(recurse, 0, std::min<int>(budget, static_cast<int>(n)));
    return best;
}

std::string fingerprint(const RuleSetModel& model) {
    std::ostringstream os;
    for (const Rule& rule : model.rules) {
        for (auto f : rule.head) os << f << ',';
        os << "->";
        for (auto l : rule.tail) os << l << ',';
        os << ';';
    }
    os << '|' << model.trace.size();
    for (const auto& entry : model.trace) os << ':' << entry.gain << '/' << entry.coverage_ratio;
    return os.str();
}

}  // namespace

TEST_CASE("config validation") {
    LearnerConfig config;
    config.lambda = -1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = LearnerConfig{};
    config.tau = 1.5;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = LearnerConfig{};
    config.pool_size = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = LearnerConfig{};
    config.greedy.epsilon = 1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("candidate pools") {
    GeneratorConfig gen;
    gen.n_records = 60;
    gen.n_features = 12;
    gen.n_labels = 12;
    gen.n_rules = 1;
    gen.features_per_rule = 3;
    gen.labels_per_rule = 3;
    gen.noise = 0.0;
    gen.seed = 3;
    gen.support_fraction_min = 0.4;
    gen.support_fraction_max = 0.6;
    const auto [ds, truth] = generate(gen);

    LearnerConfig config;
    config.variant = HeadVariant::surs;
    config.pool_size = 60;
    config.theta = 0.1;
    config.seed = 5;
    const CandidateGenerator generator(ds, config);

    SUBCASE("planted rule appears in most pools") {
        const RuleSet empty(ds);
        int hits = 0;
        const int rounds = 10;
        for (int r = 0; r < rounds; ++r) {
            const auto pool = generator.generate(empty, r);
            for (const Rule& rule : pool)
                if (rule.head == truth.rules[0].features && rule.tail == truth.rules[0].labels) {
                    ++hits;
                    break;
                }
        }
        CHECK(hits > rounds / 2);
    }

    SUBCASE("fully covered data yields an empty pool") {
        RuleSet covering(ds);
        // one rule per record's full label set, heads from its features
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto& rec = ds.record(static_cast<RecordId>(i));
            if (rec.labels.empty() || rec.features.empty()) continue;
            covering.insert(Rule::build(ds, rec.features, rec.labels));
        }
        const auto pool = generator.generate(covering, 0);
        CHECK(pool.empty());
    }

    SUBCASE("pool size one yields at most one candidate") {
        LearnerConfig tiny = config;
        tiny.pool_size = 1;
        const CandidateGenerator small(ds, tiny);
        const RuleSet empty(ds);
        CHECK(small.generate(empty, 0).size() <= 1);
    }
}

TEST_CASE("multi-threaded pools reproduce the single-threaded result") {
    GeneratorConfig gen;
    gen.n_records = 50;
    gen.n_features = 15;
    gen.n_labels = 15;
    gen.n_rules = 4;
    gen.noise = 0.02;
    gen.seed = 11;
    const auto [ds, truth] = generate(gen);

    LearnerConfig config;
    config.pool_size = 40;
    config.seed = 9;
    config.threads = 1;
    const CandidateGenerator serial(ds, config);
    config.threads = 4;
    const CandidateGenerator parallel(ds, config);

    const RuleSet empty(ds);
    const auto pool_a = serial.generate(empty, 0);
    const auto pool_b = parallel.generate(empty, 0);
    REQUIRE(pool_a.size() == pool_b.size());
    for (std::size_t i = 0; i < pool_a.size(); ++i) {
        CHECK(pool_a[i].head == pool_b[i].head);
        CHECK(pool_a[i].tail == pool_b[i].tail);
    }
}

TEST_CASE("greedy over a fixed pool achieves at least half the optimum") {
    Rng rng = make_rng(90);
    int rounds = 0;
    while (rounds < 120) {
        const Dataset ds = random_dataset(rng, 8, 5, 5, 0.5);
        const auto pool = random_pool(rng, ds, 5 + static_cast<int>(uniform_index(rng, 8)));
        if (pool.size() < 2) continue;
        const int budget = 1 + static_cast<int>(uniform_index(rng, 4));
        const double lambda = uniform_real01(rng) * 10.0;

        const auto greedy = greedy_over_pool(ds, pool, budget, lambda);
        const double greedy_value =
            RuleSet::objective_value_scratch(greedy, ObjectiveParams{lambda});
        const double optimum = brute_force_best(ds, pool, budget, lambda);
        CHECK(greedy_value >= 0.5 * optimum - 1e-9);
        ++rounds;
    }
}

TEST_CASE("fit on a planted dataset") {
    GeneratorConfig gen;
    gen.n_records = 120;
    gen.n_features = 15;
    gen.n_labels = 15;
    gen.n_rules = 3;
    gen.noise = 0.0;
    gen.seed = 21;
    const auto [ds, truth] = generate(gen);

    LearnerConfig config;
    config.variant = HeadVariant::gh;
    config.pool_size = 80;
    config.max_rules = 10;
    config.lambda = 0.5;
    config.seed = 1;

    const RuleSetModel model = fit(ds, config);
    REQUIRE(!model.rules.empty());
    CHECK(model.rules.size() <= 10);

    SUBCASE("coverage ratio stays within [0, 1] and the gain trace is non-decreasing") {
        double last_objective = 0.0;
        for (const auto& entry : model.trace) {
            CHECK(entry.coverage_ratio >= 0.0);
            CHECK(entry.coverage_ratio <= 1.0);
            CHECK(entry.objective >= last_objective - 1e-12);
            last_objective = entry.objective;
        }
    }

    SUBCASE("identical config and seed reproduce the model") {
        const RuleSetModel again = fit(ds, config);
        CHECK(fingerprint(model) == fingerprint(again));
    }

    SUBCASE("tau = 1 stops after the first rule") {
        LearnerConfig tight = config;
        tight.tau = 1.0;
        const RuleSetModel one = fit(ds, tight);
        CHECK(one.rules.size() == 1);
    }

    SUBCASE("tau = 0 still terminates through the cap") {
        LearnerConfig zero = config;
        zero.tau = 0.0;
        zero.max_rules = 4;
        const RuleSetModel capped = fit(ds, zero);
        CHECK(capped.rules.size() <= 4);
    }
}

TEST_CASE("two-pass never returns a worse objective") {
    GeneratorConfig gen;
    gen.n_records = 80;
    gen.n_features = 12;
    gen.n_labels = 12;
    gen.n_rules = 4;
    gen.noise = 0.02;
    gen.seed = 33;
    const auto [ds, truth] = generate(gen);

    LearnerConfig config;
    config.variant = HeadVariant::gh;
    config.pool_size = 40;
    config.max_rules = 6;
    config.lambda = 1.0;
    config.seed = 2;

    const RuleSetModel single = fit(ds, config);
    config.two_pass = true;
    const RuleSetModel both = fit(ds, config);
    CHECK(both.objective >= single.objective - 1e-9);
}

TEST_CASE("surs variant trains end to end") {
    GeneratorConfig gen;
    gen.n_records = 80;
    gen.n_features = 12;
    gen.n_labels = 12;
    gen.n_rules = 3;
    gen.noise = 0.01;
    gen.seed = 41;
    const auto [ds, truth] = generate(gen);

    LearnerConfig config;
    config.variant = HeadVariant::surs;
    config.pool_size = 50;
    config.max_rules = 6;
    config.theta = 0.1;
    config.seed = 4;
    const RuleSetModel model = fit(ds, config);
    CHECK(!model.rules.empty());
    for (const Rule& rule : model.rules) {
        CHECK(!rule.head.empty());
        CHECK(!rule.tail.empty());
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "corset/random.hpp"
#include "corset/tail_sampler.hpp"

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

RuleSet random_ruleset(Rng& rng, const Dataset& ds, int max_rules) {
    RuleSet rs(ds);
    const int n = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(max_rules + 1)));
    int made = 0;
    for (int attempt = 0; attempt < 40 && made < n; ++attempt) {
        const auto rec_id = static_cast<RecordId>(uniform_index(rng, ds.size()));
        const DataRecord& rec = ds.record(rec_id);
        if (rec.features.empty() || rec.labels.empty()) continue;
        IdSet head, tail;
        for (FeatureId f : rec.features)
            if (coin(rng)) head.push_back(f);
        for (LabelId l : rec.labels)
            if (coin(rng)) tail.push_back(l);
        if (head.empty() || tail.empty()) continue;
        rs.insert(Rule::build(ds, head, tail));
        ++made;
    }
    return rs;
}

double total_variation(const std::map<IdSet, double>& exact,
                       const std::map<IdSet, std::int64_t>& counts, std::int64_t n_draws) {
    std::map<IdSet, double> empirical;
    for (const auto& [tail, count] : counts)
        empirical[tail] = static_cast<double>(count) / static_cast<double>(n_draws);
    double tv = 0.0;
    for (const auto& [tail, p] : exact) {
        const auto it = empirical.find(tail);
        tv += std::abs(p - (it == empirical.end() ? 0.0 : it->second));
    }
    for (const auto& [tail, p] : empirical)
        if (exact.find(tail) == exact.end()) tv += p;
    return 0.5 * tv;
}

// The worked configuration: record 0 with F = {0,1,2,3}, L = {a,b,c} and
// three selected rules whose record-specific coverages are {a}, {a,b}, ∅.
struct WorkedExample {
    Dataset ds;
    RuleSet ruleset;
    Rule r1, r2, r3;

    WorkedExample()
        : ds(make_dataset()), ruleset(ds),
          r1(Rule::build(ds, {0, 1}, {0})),
          r2(Rule::build(ds, {1, 2}, {0, 1})),
          r3(Rule::build(ds, {2, 4}, {0, 2})) {
        ruleset.insert(r1);
        ruleset.insert(r2);
        ruleset.insert(r3);
    }

    static Dataset make_dataset() {
        std::vector<DataRecord> records{{{0, 1, 2, 3}, {0, 1, 2}}, {{2, 4}, {0, 2}}};
        return Dataset(std::move(records), 6, 3);
    }
};

}  // namespace

TEST_CASE("record-specific coverage on the worked example") {
    const WorkedExample ex;
    const DataRecord& rec = ex.ds.record(0);
    CHECK(record_specific_coverage(rec, ex.r1) == IdSet{0});         // {a}
    CHECK(record_specific_coverage(rec, ex.r2) == IdSet{0, 1});      // {a,b}
    CHECK(record_specific_coverage(rec, ex.r3).empty());             // head misses
    CHECK(record_specific_coverage(rec, ex.ruleset.rules()) == IdSet{0, 1});
}

TEST_CASE("record-specific coverage of a ruleset equals the union of per-rule results") {
    Rng rng = make_rng(61);
    for (int round = 0; round < 30; ++round) {
        const Dataset ds = random_dataset(rng, 6, 5, 5);
        const RuleSet rs = random_ruleset(rng, ds, 4);
        for (const auto& rec : ds.records()) {
            IdSet expected;
            for (const Rule& rule : rs.rules())
                expected = set_union(expected, record_specific_coverage(rec, rule));
            CHECK(record_specific_coverage(rec, rs.rules()) == expected);
        }
    }
}

TEST_CASE("marginal coverage on the worked example") {
    const WorkedExample ex;
    const DataRecord& rec = ex.ds.record(0);
    // T = {b, c}: (L_D ∩ T) \ {a,b} = {c}
    CHECK(marginal_coverage(rec, {1, 2}, ex.ruleset) == IdSet{2});
    SUBCASE("fully covered record yields the empty set") {
        CHECK(marginal_coverage(rec, {0, 1}, ex.ruleset).empty());
    }
    SUBCASE("whole label set against no rules yields the label set") {
        RuleSet empty_rs(ex.ds);
        CHECK(marginal_coverage(rec, rec.labels, empty_rs) == rec.labels);
    }
}

TEST_CASE("full-space record weights") {
    const WorkedExample ex;
    SUBCASE("worked example: uncov = {c}, w = 1 * 2^2 = 4") {
        const TailWeights w = compute_weights_full(ex.ds, ex.ruleset);
        CHECK(w.uncovered(0) == IdSet{2});
        CHECK(static_cast<double>(w.weight(0)) == 4.0);
    }
    SUBCASE("empty rule set: w = |L_D| * 2^(|L_D|-1)") {
        RuleSet empty_rs(ex.ds);
        const TailWeights w = compute_weights_full(ex.ds, empty_rs);
        CHECK(static_cast<double>(w.weight(0)) == 12.0);  // 3 * 2^2
    }
    SUBCASE("records without labels get weight zero") {
        std::vector<DataRecord> records{{{0}, {}}, {{1}, {0}}};
        const Dataset ds(std::move(records), 2, 1);
        RuleSet rs(ds);
        const TailWeights w = compute_weights_full(ds, rs);
        CHECK(static_cast<double>(w.weight(0)) == 0.0);
        CHECK(static_cast<double>(w.weight(1)) == 1.0);
    }
}

TEST_CASE("w(D) equals the sum of tail weights over all subsets of L_D") {
    Rng rng = make_rng(62);
    for (int round = 0; round < 20; ++round) {
        const Dataset ds = random_dataset(rng, 5, 4, 6, 0.6);
        const RuleSet rs = random_ruleset(rng, ds, 3);
        const TailWeights w = compute_weights_full(ds, rs);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto& labels = ds.record(static_cast<RecordId>(i)).labels;
            REQUIRE(labels.size() <= 12);
            long double sum = 0.0L;
            for (std::uint64_t mask = 1; mask < (1ull << labels.size()); ++mask) {
                IdSet tail;
                for (std::size_t b = 0; b < labels.size(); ++b)
                    if (mask & (1ull << b)) tail.push_back(labels[b]);
                sum += static_cast<long double>(
                    marginal_coverage(ds.record(static_cast<RecordId>(i)), tail, rs).size());
            }
            CHECK(static_cast<double>(w.weight(static_cast<RecordId>(i))) ==
                  doctest::Approx(static_cast<double>(sum)));
        }
    }
}

TEST_CASE("single record with one label always yields that label") {
    std::vector<DataRecord> records{{{0}, {0}}};
    const Dataset ds(std::move(records), 1, 1);
    RuleSet rs(ds);
    Rng rng = make_rng(63);
    for (int i = 0; i < 20; ++i) {
        const auto tail = sample_tail_full(ds, rs, rng);
        REQUIRE(tail.has_value());
        CHECK(*tail == IdSet{0});
    }
}

TEST_CASE("fully covered dataset signals instead of sampling") {
    std::vector<DataRecord> records{{{0}, {0}}};
    const Dataset ds(std::move(records), 1, 1);
    RuleSet rs(ds);
    rs.insert(Rule::build(ds, {0}, {0}));
    Rng rng = make_rng(64);
    CHECK_FALSE(sample_tail_full(ds, rs, rng).has_value());

    const auto space = enumerate_probable_cliques(build_label_graph(ds), 0.5, 3);
    const ContainmentIndex index = build_containment_index(ds, space);
    CHECK_FALSE(sample_tail_reduced(ds, index, rs, rng).has_value());
}

TEST_CASE("full sampler matches the exact uncovered-area distribution") {
    Rng rng = make_rng(65);
    const int n_draws = 100000;
    for (int round = 0; round < 5; ++round) {
        const Dataset ds = random_dataset(rng, 3 + static_cast<int>(uniform_index(rng, 4)), 4,
                                          4, 0.6);
        const RuleSet rs = random_ruleset(rng, ds, 2);
        const auto exact = exact_tail_distribution(ds, rs);
        if (exact.empty()) continue;

        std::map<IdSet, std::int64_t> counts;
        const TailWeights weights = compute_weights_full(ds, rs);
        for (int d = 0; d < n_draws; ++d) {
            const auto tail = sample_tail_full(ds, weights, rng);
            REQUIRE(tail.has_value());
            ++counts[*tail];
        }
        CHECK(total_variation(exact, counts, n_draws) <= 0.02);
    }
}

TEST_CASE("drawn tails always contain an uncovered label") {
    Rng rng = make_rng(66);
    const Dataset ds = random_dataset(rng, 6, 4, 5, 0.5);
    const RuleSet rs = random_ruleset(rng, ds, 3);
    const TailWeights weights = compute_weights_full(ds, rs);
    if (weights.all_zero()) return;
    for (int d = 0; d < 2000; ++d) {
        const auto tail = sample_tail_full(ds, weights, rng);
        REQUIRE(tail.has_value());
        // some record must contribute an uncovered pair for this tail
        bool has_uncovered = false;
        for (RecordId rec : ds.tail_support(*tail))
            if (!marginal_coverage(ds.record(rec), *tail, rs).empty()) has_uncovered = true;
        CHECK(has_uncovered);
    }
}

TEST_CASE("reduced sampler: singleton space draws labels by support") {
    std::vector<DataRecord> records{{{0}, {0, 1}}, {{0}, {0}}, {{0}, {0}}};
    Dataset ds(std::move(records), 1, 2);
    InterpretableSpace space;
    space.members = {{{0}, 1.0}, {{1}, 1.0}};
    space.theta = 1.0;
    space.max_size = 1;
    const ContainmentIndex index = build_containment_index(ds, space);
    RuleSet rs(ds);
    Rng rng = make_rng(67);
    std::int64_t zero_count = 0;
    const int n_draws = 40000;
    for (int d = 0; d < n_draws; ++d) {
        const auto tail = sample_tail_reduced(ds, index, rs,
                                              compute_weights_reduced(ds, index, rs), rng);
        REQUIRE(tail.has_value());
        if (*tail == IdSet{0}) ++zero_count;
    }
    // label 0 has support 3, label 1 support 1 -> P({0}) = 3/4
    CHECK(static_cast<double>(zero_count) / n_draws == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("reduced sampler matches the restricted oracle") {
    Rng rng = make_rng(68);
    const int n_draws = 100000;
    for (int round = 0; round < 5; ++round) {
        const Dataset ds = random_dataset(rng, 3 + static_cast<int>(uniform_index(rng, 5)), 4,
                                          5, 0.5);
        const auto space = enumerate_probable_cliques(build_label_graph(ds), 0.10, 3);
        const ContainmentIndex index = build_containment_index(ds, space);
        const RuleSet rs = random_ruleset(rng, ds, 2);
        const auto exact = exact_tail_distribution(ds, rs, &space);
        if (exact.empty()) continue;

        const TailWeights weights = compute_weights_reduced(ds, index, rs);
        std::map<IdSet, std::int64_t> counts;
        for (int d = 0; d < n_draws; ++d) {
            const auto tail = sample_tail_reduced(ds, index, rs, weights, rng);
            REQUIRE(tail.has_value());
            ++counts[*tail];
        }
        CHECK(total_variation(exact, counts, n_draws) <= 0.02);
    }
}

TEST_CASE("exact distribution guard refuses huge instances") {
    std::vector<DataRecord> records(40);
    for (auto& rec : records)
        for (int l = 0; l < 20; ++l) rec.labels.push_back(l);
    const Dataset ds(std::move(records), 1, 20);
    RuleSet rs(ds);
    CHECK_THROWS_AS(exact_tail_distribution(ds, rs), std::invalid_argument);
}

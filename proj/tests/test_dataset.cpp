#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "corset/dataset.hpp"
#include "corset/random.hpp"

using namespace corset;

namespace {

std::string write_temp(const std::string& contents) {
    static int counter = 0;
    std::string path = "test_dataset_tmp_" + std::to_string(counter++) + ".txt";
    std::ofstream out(path);
    out << contents;
    return path;
}

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

// brute-force support oracle: scan every record
IdSet scan_head_support(const Dataset& ds, const IdSet& head) {
    IdSet out;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (is_subset(head, ds.record(static_cast<RecordId>(i)).features))
            out.push_back(static_cast<RecordId>(i));
    return out;
}

}  // namespace

TEST_CASE("load_sparse parses records and builds indexes") {
    const auto path = write_temp("2 4 3\n0 1 | 0\n2 3 | 1 2\n");
    const Dataset ds = Dataset::load_sparse(path);
    CHECK(ds.size() == 2);
    CHECK(ds.n_features() == 4);
    CHECK(ds.n_labels() == 3);
    CHECK(ds.record(0).features == IdSet{0, 1});
    CHECK(ds.record(1).labels == IdSet{1, 2});
    CHECK(ds.feature_index(2) == IdSet{1});
    CHECK(ds.label_index(0) == IdSet{0});
    CHECK(ds.total_feature_occurrences() == 4);
    CHECK(ds.total_label_occurrences() == 3);
    std::remove(path.c_str());
}

TEST_CASE("load_sparse accepts empty records") {
    const auto path = write_temp("1 4 3\n|\n");
    const Dataset ds = Dataset::load_sparse(path);
    CHECK(ds.record(0).features.empty());
    CHECK(ds.record(0).labels.empty());
    std::remove(path.c_str());
}

TEST_CASE("load_sparse reports line numbers on errors") {
    const auto bad_id = write_temp("1 2 2\n0 5 | 0\n");
    CHECK_THROWS_WITH_AS(Dataset::load_sparse(bad_id),
                         doctest::Contains(":2:"), std::runtime_error);
    std::remove(bad_id.c_str());

    const auto no_bar = write_temp("1 2 2\n0 1\n");
    CHECK_THROWS_AS(Dataset::load_sparse(no_bar), std::runtime_error);
    std::remove(no_bar.c_str());

    const auto bad_label = write_temp("1 2 2\n0 | x\n");
    CHECK_THROWS_AS(Dataset::load_sparse(bad_label), std::runtime_error);
    std::remove(bad_label.c_str());
}

TEST_CASE("save/load round trip") {
    Rng rng = make_rng(7);
    const Dataset ds = random_dataset(rng, 12, 6, 4);
    const auto path = write_temp("");
    ds.save_sparse(path);
    const Dataset loaded = Dataset::load_sparse(path);
    REQUIRE(loaded.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(loaded.record(static_cast<RecordId>(i)).features ==
              ds.record(static_cast<RecordId>(i)).features);
        CHECK(loaded.record(static_cast<RecordId>(i)).labels ==
              ds.record(static_cast<RecordId>(i)).labels);
    }
    std::remove(path.c_str());
}

TEST_CASE("index round trip: i in feature_index[f] iff f in F_i") {
    Rng rng = make_rng(21);
    const Dataset ds = random_dataset(rng, 30, 8, 5);
    for (int f = 0; f < ds.n_features(); ++f)
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const bool in_index = contains(ds.feature_index(f), static_cast<RecordId>(i));
            const bool in_record = contains(ds.record(static_cast<RecordId>(i)).features, f);
            CHECK(in_index == in_record);
        }
}

TEST_CASE("support sets") {
    const auto path = write_temp("3 6 4\n0 1 2 3 | 0 1 2\n1 2 | 0\n| 3\n");
    const Dataset ds = Dataset::load_sparse(path);
    std::remove(path.c_str());

    SUBCASE("empty head matches everything") {
        CHECK(ds.head_support({}) == IdSet{0, 1, 2});
    }
    SUBCASE("worked record matched by a two-feature head") {
        // F_D = {0,1,2,3} contains {1,2}
        const IdSet sup = ds.head_support({1, 2});
        CHECK(contains(sup, 0));
        CHECK(sup == IdSet{0, 1});
    }
    SUBCASE("tail and rule supports") {
        CHECK(ds.tail_support({0}) == IdSet{0, 1});
        CHECK(ds.rule_support({0, 1}, {0}) == IdSet{0});
    }
    SUBCASE("out of range ids throw") {
        CHECK_THROWS_AS(ds.head_support({6}), std::out_of_range);
        CHECK_THROWS_AS(ds.tail_support({-1}), std::out_of_range);
    }
}

TEST_CASE("support via indexes equals full scan on random datasets") {
    Rng rng = make_rng(99);
    for (int round = 0; round < 30; ++round) {
        const int n = 1 + static_cast<int>(uniform_index(rng, 64));
        const Dataset ds = random_dataset(rng, n, 6, 5, 0.4);
        IdSet head;
        for (int f = 0; f < ds.n_features(); ++f)
            if (uniform_real01(rng) < 0.3) head.push_back(f);
        CHECK(ds.head_support(head) == scan_head_support(ds, head));
    }
}

TEST_CASE("binarize_numeric nearest-rank percentile") {
    SUBCASE("column 1..10 at p=90 keeps only the max") {
        std::vector<std::vector<double>> rows;
        for (int v = 1; v <= 10; ++v) rows.push_back({static_cast<double>(v)});
        const auto bin = binarize_numeric(rows, 90.0);
        for (int i = 0; i < 9; ++i) CHECK(bin[static_cast<std::size_t>(i)][0] == 0);
        CHECK(bin[9][0] == 1);
    }
    SUBCASE("tiny positive percentile keeps every value") {
        std::vector<std::vector<double>> rows{{3.0}, {1.0}, {2.0}};
        const auto bin = binarize_numeric(rows, 1e-9);
        for (const auto& row : bin) CHECK(row[0] == 1);
    }
    SUBCASE("constant column maps to all ones (value >= threshold)") {
        std::vector<std::vector<double>> rows{{5.0}, {5.0}, {5.0}};
        const auto bin = binarize_numeric(rows, 90.0);
        for (const auto& row : bin) CHECK(row[0] == 1);
    }
    SUBCASE("percentile out of range throws") {
        std::vector<std::vector<double>> rows{{1.0}};
        CHECK_THROWS_AS(binarize_numeric(rows, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(binarize_numeric(rows, 100.5), std::invalid_argument);
    }
}

TEST_CASE("binarize_numeric is idempotent on its own output") {
    Rng rng = make_rng(5);
    for (int round = 0; round < 20; ++round) {
        const std::size_t n = 2 + uniform_index(rng, 12);
        const std::size_t cols = 1 + uniform_index(rng, 4);
        std::vector<std::vector<double>> rows(n, std::vector<double>(cols));
        for (auto& row : rows)
            for (auto& cell : row) cell = uniform_real01(rng) * 10.0;
        const double p = 1.0 + uniform_real01(rng) * 99.0;
        const auto once = binarize_numeric(rows, p);
        std::vector<std::vector<double>> as_double(n, std::vector<double>(cols));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < cols; ++c) as_double[i][c] = once[i][c];
        CHECK(binarize_numeric(as_double, p) == once);
    }
}

TEST_CASE("dense CSV import") {
    const auto feats = write_temp("1.0,5.0\n2.0,4.0\n3.0,3.0\n4.0,2.0\n");
    const auto labels = write_temp("0\n\n1\n0 1\n");
    const Dataset ds = Dataset::load_dense_csv(feats, labels, 2, 75.0);
    CHECK(ds.size() == 4);
    CHECK(ds.n_features() == 2);
    // p=75 over 4 rows: rank 4 -> threshold is the max of each column
    CHECK(ds.record(3).features == IdSet{0});
    CHECK(ds.record(0).features == IdSet{1});
    CHECK(ds.record(1).features.empty());
    CHECK(ds.record(3).labels == IdSet{0, 1});
    std::remove(feats.c_str());
    std::remove(labels.c_str());
}

TEST_CASE("split partitions deterministically") {
    Rng rng = make_rng(31);
    const Dataset ds = random_dataset(rng, 50, 5, 4);
    const auto a = split(ds, {0.6, 0.2, 0.2}, 17);
    const auto b = split(ds, {0.6, 0.2, 0.2}, 17);
    CHECK(a.train.size() == 30);
    CHECK(a.validation.size() == 10);
    CHECK(a.test.size() == 10);
    REQUIRE(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i)
        CHECK(a.train.record(static_cast<RecordId>(i)).features ==
              b.train.record(static_cast<RecordId>(i)).features);

    const auto c = split(ds, {0.6, 0.2, 0.2}, 18);
    bool identical = true;
    for (std::size_t i = 0; i < a.train.size() && identical; ++i)
        identical = a.train.record(static_cast<RecordId>(i)).features ==
                    c.train.record(static_cast<RecordId>(i)).features &&
                    a.train.record(static_cast<RecordId>(i)).labels ==
                        c.train.record(static_cast<RecordId>(i)).labels;
    CHECK_FALSE(identical);
}

TEST_CASE("split rejects bad fractions") {
    Rng rng = make_rng(32);
    const Dataset ds = random_dataset(rng, 10, 3, 3);
    CHECK_THROWS_AS(split(ds, {0.5, 0.5, 0.5}, 1), std::invalid_argument);
    CHECK_THROWS_AS(split(ds, {0.98, 0.01, 0.01}, 1), std::invalid_argument);
}

TEST_CASE("table-1 row for the bibtex benchmark when the file is available") {
    const char* env = std::getenv("CORSET_BIBTEX");
    const std::string path = env ? env : "data/bibtex.txt";
    std::ifstream probe(path);
    if (!probe) {
        MESSAGE("bibtex dataset not present, skipping");
        return;
    }
    const Dataset ds = Dataset::load_sparse(path);
    CHECK(ds.size() == 7395);
    CHECK(ds.n_features() == 1836);
    CHECK(ds.n_labels() == 159);
    CHECK(ds.label_cardinality() == doctest::Approx(2.40).epsilon(0.01));
}

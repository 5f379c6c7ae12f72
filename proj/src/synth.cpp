#include "corset/synth.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "corset/random.hpp"

namespace corset {

using nlohmann::json;

int GeneratorConfig::resolved_n_rules() const {
    if (n_rules >= 0) return n_rules;
    return std::min(n_features, n_labels) / 3;
}

void GeneratorConfig::validate() const {
    if (n_records < 1 || n_features < 1 || n_labels < 1)
        throw std::invalid_argument("generator: dimensions must be positive");
    if (features_per_rule < 1 || labels_per_rule < 1)
        throw std::invalid_argument("generator: rule sizes must be >= 1");
    if (features_per_rule > n_features || labels_per_rule > n_labels)
        throw std::invalid_argument("generator: rule sizes exceed the space dimensions");
    if (noise < 0.0 || noise > 1.0)
        throw std::invalid_argument("generator: noise must be in [0, 1]");
    if (resolved_n_rules() < 1)
        throw std::invalid_argument("generator: no rules to plant");
    if (support_fraction_min <= 0.0 || support_fraction_max > 1.0 ||
        support_fraction_min > support_fraction_max)
        throw std::invalid_argument("generator: bad support fraction range");
}

namespace {

IdSet random_subset(Rng& rng, int universe, int size) {
    // partial Fisher-Yates over 0..universe-1
    std::vector<std::int32_t> ids(static_cast<std::size_t>(universe));
    for (int i = 0; i < universe; ++i) ids[static_cast<std::size_t>(i)] = i;
    IdSet out;
    out.reserve(static_cast<std::size_t>(size));
    for (int k = 0; k < size; ++k) {
        const std::size_t j = k + uniform_index(rng, static_cast<std::size_t>(universe - k));
        std::swap(ids[static_cast<std::size_t>(k)], ids[j]);
        out.push_back(ids[static_cast<std::size_t>(k)]);
    }
    sort_unique(out);
    return out;
}

}  // namespace

std::pair<Dataset, PlantedGroundTruth> generate(const GeneratorConfig& config) {
    config.validate();
    Rng rng = make_rng(config.seed, /*salt1=*/0xc0ffee);
    const int n_rules = config.resolved_n_rules();

    // support sizes per rule
    std::vector<int> support_sizes(static_cast<std::size_t>(n_rules));
    if (config.mode == CoverageMode::uniform) {
        for (int r = 0; r < n_rules; ++r) {
            const double f = config.support_fraction_min +
                             uniform_real01(rng) *
                                 (config.support_fraction_max - config.support_fraction_min);
            support_sizes[static_cast<std::size_t>(r)] = std::max(
                1, static_cast<int>(std::ceil(f * static_cast<double>(config.n_records))));
        }
    } else {
        // rank^(-exponent), normalized to the same total mass as the uniform
        // mid-point (n_rules * mean fraction)
        const double mean_fraction =
            0.5 * (config.support_fraction_min + config.support_fraction_max);
        double norm = 0.0;
        for (int r = 1; r <= n_rules; ++r)
            norm += std::pow(static_cast<double>(r), -config.skew_exponent);
        const double total_mass = mean_fraction * static_cast<double>(n_rules);
        for (int r = 0; r < n_rules; ++r) {
            const double fraction = total_mass *
                                    std::pow(static_cast<double>(r + 1), -config.skew_exponent) /
                                    norm;
            support_sizes[static_cast<std::size_t>(r)] = std::min(
                config.n_records,
                std::max(1, static_cast<int>(std::ceil(fraction *
                                                       static_cast<double>(config.n_records)))));
        }
    }

    std::vector<std::vector<std::uint8_t>> features(
        static_cast<std::size_t>(config.n_records),
        std::vector<std::uint8_t>(static_cast<std::size_t>(config.n_features), 0));
    std::vector<std::vector<std::uint8_t>> labels(
        static_cast<std::size_t>(config.n_records),
        std::vector<std::uint8_t>(static_cast<std::size_t>(config.n_labels), 0));

    PlantedGroundTruth truth;
    truth.config = config;
    for (int r = 0; r < n_rules; ++r) {
        PlantedRule rule;
        rule.features = random_subset(rng, config.n_features, config.features_per_rule);
        rule.labels = random_subset(rng, config.n_labels, config.labels_per_rule);
        rule.support =
            random_subset(rng, config.n_records, support_sizes[static_cast<std::size_t>(r)]);
        for (RecordId rec : rule.support) {
            for (FeatureId f : rule.features)
                features[static_cast<std::size_t>(rec)][static_cast<std::size_t>(f)] = 1;
            for (LabelId l : rule.labels)
                labels[static_cast<std::size_t>(rec)][static_cast<std::size_t>(l)] = 1;
        }
        truth.rules.push_back(std::move(rule));
    }

    auto flip = [&](std::vector<std::vector<std::uint8_t>>& matrix) {
        if (config.noise == 0.0) return;
        for (auto& row : matrix)
            for (auto& cell : row)
                if (uniform_real01(rng) < config.noise) cell ^= 1;
    };
    flip(features);
    flip(labels);

    std::vector<DataRecord> records(static_cast<std::size_t>(config.n_records));
    for (int i = 0; i < config.n_records; ++i) {
        auto& rec = records[static_cast<std::size_t>(i)];
        for (int f = 0; f < config.n_features; ++f)
            if (features[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)])
                rec.features.push_back(f);
        for (int l = 0; l < config.n_labels; ++l)
            if (labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)])
                rec.labels.push_back(l);
    }
    return {Dataset(std::move(records), config.n_features, config.n_labels), std::move(truth)};
}

double recovery_score(const Dataset& dataset, const PlantedGroundTruth& truth,
                      const std::vector<Rule>& learned) {
    if (truth.rules.empty()) return 1.0;
    int recovered = 0;
    for (const PlantedRule& planted : truth.rules) {
        const Rule reference = Rule::build(dataset, planted.features, planted.labels);
        for (const Rule& rule : learned) {
            if (jaccard_distance(reference, rule) <= 0.2) {
                ++recovered;
                break;
            }
        }
    }
    return static_cast<double>(recovered) / static_cast<double>(truth.rules.size());
}

void save_ground_truth(const std::string& path, const PlantedGroundTruth& truth) {
    json j;
    j["format"] = "corset-ground-truth";
    j["seed"] = truth.config.seed;
    j["noise"] = truth.config.noise;
    j["n_records"] = truth.config.n_records;
    j["n_features"] = truth.config.n_features;
    j["n_labels"] = truth.config.n_labels;
    j["mode"] = truth.config.mode == CoverageMode::uniform ? "uniform" : "skewed";
    j["rules"] = json::array();
    for (const auto& rule : truth.rules)
        j["rules"].push_back(json{{"features", rule.features},
                                  {"labels", rule.labels},
                                  {"support", rule.support}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

PlantedGroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    if (j.value("format", "") != "corset-ground-truth")
        throw std::runtime_error(path + ": not a ground truth file");
    PlantedGroundTruth truth;
    truth.config.seed = j.value("seed", std::uint64_t{0});
    truth.config.noise = j.value("noise", 0.0);
    truth.config.n_records = j.value("n_records", 0);
    truth.config.n_features = j.value("n_features", 0);
    truth.config.n_labels = j.value("n_labels", 0);
    truth.config.mode =
        j.value("mode", "uniform") == "skewed" ? CoverageMode::skewed : CoverageMode::uniform;
    for (const auto& entry : j.at("rules")) {
        PlantedRule rule;
        rule.features = entry.at("features").get<IdSet>();
        rule.labels = entry.at("labels").get<IdSet>();
        rule.support = entry.at("support").get<IdSet>();
        truth.rules.push_back(std::move(rule));
    }
    return truth;
}

}  // namespace corset

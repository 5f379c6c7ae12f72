#include "corset/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace corset {

using nlohmann::json;

std::vector<Rule> StoredModel::build_rules(const Dataset& dataset) const {
    std::vector<Rule> out;
    out.reserve(rules.size());
    for (const auto& [head, tail] : rules) out.push_back(Rule::build(dataset, head, tail));
    return out;
}

StoredModel to_stored(const RuleSetModel& model, const Dataset& dataset) {
    StoredModel stored;
    stored.lambda = model.config.lambda;
    stored.variant = to_string(model.config.variant);
    stored.seed = model.config.seed;
    stored.n_features = dataset.n_features();
    stored.n_labels = dataset.n_labels();
    stored.objective = model.objective;
    stored.stop_reason = model.stop_reason;
    stored.rules.reserve(model.rules.size());
    for (const Rule& rule : model.rules) stored.rules.emplace_back(rule.head, rule.tail);
    return stored;
}

void save_model(const std::string& path, const StoredModel& model) {
    json j;
    j["format"] = "corset-model";
    j["version"] = 1;
    j["lambda"] = model.lambda;
    j["variant"] = model.variant;
    j["seed"] = model.seed;
    j["n_features"] = model.n_features;
    j["n_labels"] = model.n_labels;
    j["objective"] = model.objective;
    j["stop_reason"] = model.stop_reason;
    j["rules"] = json::array();
    for (const auto& [head, tail] : model.rules)
        j["rules"].push_back(json{{"head", head}, {"tail", tail}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

void save_model(const std::string& path, const RuleSetModel& model, const Dataset& dataset) {
    save_model(path, to_stored(model, dataset));
}

StoredModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    if (j.value("format", "") != "corset-model")
        throw std::runtime_error(path + ": not a model file");
    StoredModel model;
    model.lambda = j.at("lambda").get<double>();
    model.variant = j.value("variant", "gh");
    model.seed = j.value("seed", std::uint64_t{0});
    model.n_features = j.at("n_features").get<int>();
    model.n_labels = j.at("n_labels").get<int>();
    model.objective = j.value("objective", 0.0);
    model.stop_reason = j.value("stop_reason", "");
    for (const auto& entry : j.at("rules")) {
        IdSet head = entry.at("head").get<IdSet>();
        IdSet tail = entry.at("tail").get<IdSet>();
        sort_unique(head);
        sort_unique(tail);
        if (head.empty() || tail.empty())
            throw std::runtime_error(path + ": rule with empty head or tail");
        model.rules.emplace_back(std::move(head), std::move(tail));
    }
    return model;
}

}  // namespace corset

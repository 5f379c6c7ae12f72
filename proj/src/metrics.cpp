#include "corset/metrics.hpp"

#include <sstream>
#include <stdexcept>

namespace corset {

IdSet predict(const std::vector<std::pair<IdSet, IdSet>>& rules, const IdSet& features) {
    IdSet labels;
    for (const auto& [head, tail] : rules)
        if (is_subset(head, features)) labels = set_union(labels, tail);
    return labels;
}

std::vector<IdSet> predict_dataset(const std::vector<std::pair<IdSet, IdSet>>& rules,
                                   const Dataset& dataset) {
    std::vector<IdSet> out;
    out.reserve(dataset.size());
    for (const auto& record : dataset.records()) out.push_back(predict(rules, record.features));
    return out;
}

namespace {

struct Counts {
    std::int64_t tp = 0, fp = 0, fn = 0;
};

void check_sizes(const std::vector<IdSet>& gold, const std::vector<IdSet>& predicted) {
    if (gold.size() != predicted.size())
        throw std::invalid_argument("metrics: gold and predictions differ in length");
}

double f1_of(const Counts& c) {
    const std::int64_t denom = 2 * c.tp + c.fp + c.fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

}  // namespace

double micro_f1(const std::vector<IdSet>& gold, const std::vector<IdSet>& predicted) {
    check_sizes(gold, predicted);
    Counts c;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const std::size_t inter = intersect_size(gold[i], predicted[i]);
        c.tp += static_cast<std::int64_t>(inter);
        c.fp += static_cast<std::int64_t>(predicted[i].size() - inter);
        c.fn += static_cast<std::int64_t>(gold[i].size() - inter);
    }
    return f1_of(c);
}

double macro_f1(const std::vector<IdSet>& gold, const std::vector<IdSet>& predicted,
                int n_labels, bool ignore_absent) {
    check_sizes(gold, predicted);
    std::vector<Counts> per_label(static_cast<std::size_t>(n_labels));
    for (std::size_t i = 0; i < gold.size(); ++i) {
        auto g = gold[i].begin();
        auto p = predicted[i].begin();
        while (g != gold[i].end() || p != predicted[i].end()) {
            if (p == predicted[i].end() || (g != gold[i].end() && *g < *p))
                ++per_label[static_cast<std::size_t>(*g++)].fn;
            else if (g == gold[i].end() || *p < *g)
                ++per_label[static_cast<std::size_t>(*p++)].fp;
            else {
                ++per_label[static_cast<std::size_t>(*g)].tp;
                ++g; ++p;
            }
        }
    }
    double sum = 0.0;
    int counted = 0;
    for (const Counts& c : per_label) {
        if (ignore_absent && c.tp == 0 && c.fp == 0 && c.fn == 0) continue;
        sum += f1_of(c);
        ++counted;
    }
    return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

double hamming_score(const std::vector<IdSet>& gold, const std::vector<IdSet>& predicted,
                     int n_labels) {
    check_sizes(gold, predicted);
    if (gold.empty() || n_labels == 0) return 1.0;
    std::int64_t mismatches = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const std::size_t inter = intersect_size(gold[i], predicted[i]);
        // symmetric difference
        mismatches += static_cast<std::int64_t>(gold[i].size() + predicted[i].size() - 2 * inter);
    }
    const auto cells = static_cast<double>(gold.size()) * static_cast<double>(n_labels);
    return 1.0 - static_cast<double>(mismatches) / cells;
}

double avg_pairwise_overlap(const std::vector<Rule>& rules) {
    if (rules.size() < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < rules.size(); ++i)
        for (std::size_t j = i + 1; j < rules.size(); ++j)
            sum += static_cast<double>(rules[i].coverage.intersection_size(rules[j].coverage));
    const double pairs = static_cast<double>(rules.size()) *
                         static_cast<double>(rules.size() - 1) / 2.0;
    return sum / pairs;
}

std::string MetricReport::to_table() const {
    std::ostringstream os;
    os << "metric                 value\n"
       << "---------------------  ------\n";
    auto row = [&os](const char* name, double v) {
        os << name;
        for (std::size_t pad = std::string(name).size(); pad < 23; ++pad) os << ' ';
        os.setf(std::ios::fixed);
        os.precision(4);
        os << v << '\n';
    };
    row("micro_f1", micro_f1);
    row("macro_f1", macro_f1);
    row("hamming_score", hamming_score);
    row("avg_pairwise_overlap", avg_pairwise_overlap);
    os << "rule_count             " << rule_count << '\n';
    return os.str();
}

MetricReport evaluate(const std::vector<std::pair<IdSet, IdSet>>& rules,
                      const Dataset& dataset, bool ignore_absent) {
    std::vector<IdSet> gold;
    gold.reserve(dataset.size());
    for (const auto& record : dataset.records()) gold.push_back(record.labels);
    const std::vector<IdSet> predicted = predict_dataset(rules, dataset);

    MetricReport report;
    report.micro_f1 = micro_f1(gold, predicted);
    report.macro_f1 = macro_f1(gold, predicted, dataset.n_labels(), ignore_absent);
    report.hamming_score = hamming_score(gold, predicted, dataset.n_labels());
    std::vector<Rule> built;
    built.reserve(rules.size());
    for (const auto& [head, tail] : rules) built.push_back(Rule::build(dataset, head, tail));
    report.avg_pairwise_overlap = avg_pairwise_overlap(built);
    report.rule_count = rules.size();
    return report;
}

}  // namespace corset

#include "corset/dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "corset/random.hpp"

namespace corset {

namespace {

std::runtime_error parse_error(const std::string& path, std::size_t line,
                               const std::string& what) {
    std::ostringstream os;
    os << path << ":" << line << ": " << what;
    return std::runtime_error(os.str());
}

// Parses space-separated ids, validating against [0, limit).
IdSet parse_ids(const std::string& text, int limit, const std::string& path,
                std::size_t line, const char* kind) {
    IdSet out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(tok, &used);
        } catch (const std::exception&) {
            throw parse_error(path, line, std::string("bad ") + kind + " id '" + tok + "'");
        }
        if (used != tok.size())
            throw parse_error(path, line, std::string("bad ") + kind + " id '" + tok + "'");
        if (v < 0 || v >= limit)
            throw parse_error(path, line, std::string(kind) + " id " + tok +
                                              " out of declared range [0, " +
                                              std::to_string(limit) + ")");
        out.push_back(static_cast<std::int32_t>(v));
    }
    sort_unique(out);
    return out;
}

}  // namespace

Dataset::Dataset(std::vector<DataRecord> records, int n_features, int n_labels)
    : records_(std::move(records)), n_features_(n_features), n_labels_(n_labels) {
    if (n_features_ < 0 || n_labels_ < 0)
        throw std::invalid_argument("Dataset: negative dimensions");
    feature_index_.resize(static_cast<std::size_t>(n_features_));
    label_index_.resize(static_cast<std::size_t>(n_labels_));
    for (std::size_t i = 0; i < records_.size(); ++i) {
        auto& rec = records_[i];
        sort_unique(rec.features);
        sort_unique(rec.labels);
        if (!rec.features.empty() && rec.features.back() >= n_features_)
            throw std::out_of_range("Dataset: feature id out of range in record " + std::to_string(i));
        if (!rec.features.empty() && rec.features.front() < 0)
            throw std::out_of_range("Dataset: negative feature id in record " + std::to_string(i));
        if (!rec.labels.empty() && rec.labels.back() >= n_labels_)
            throw std::out_of_range("Dataset: label id out of range in record " + std::to_string(i));
        if (!rec.labels.empty() && rec.labels.front() < 0)
            throw std::out_of_range("Dataset: negative label id in record " + std::to_string(i));
        const auto id = static_cast<RecordId>(i);
        for (FeatureId f : rec.features) feature_index_[static_cast<std::size_t>(f)].push_back(id);
        for (LabelId l : rec.labels) label_index_[static_cast<std::size_t>(l)].push_back(id);
        total_features_ += static_cast<std::int64_t>(rec.features.size());
        total_labels_ += static_cast<std::int64_t>(rec.labels.size());
    }
}

Dataset Dataset::load_sparse(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw parse_error(path, 1, "missing header");
    std::istringstream header(line);
    long n_records = 0, n_features = 0, n_labels = 0;
    if (!(header >> n_records >> n_features >> n_labels) || n_records < 0 ||
        n_features < 0 || n_labels < 0)
        throw parse_error(path, 1, "header must be '<n_records> <n_features> <n_labels>'");

    std::vector<DataRecord> records;
    records.reserve(static_cast<std::size_t>(n_records));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (records.size() == static_cast<std::size_t>(n_records)) {
            // trailing blank lines are fine, anything else is not
            std::istringstream rest(line);
            std::string tok;
            if (rest >> tok) throw parse_error(path, line_no, "more records than declared");
            continue;
        }
        const auto bar = line.find('|');
        if (bar == std::string::npos) throw parse_error(path, line_no, "missing '|' separator");
        DataRecord rec;
        rec.features = parse_ids(line.substr(0, bar), static_cast<int>(n_features), path, line_no, "feature");
        rec.labels = parse_ids(line.substr(bar + 1), static_cast<int>(n_labels), path, line_no, "label");
        records.push_back(std::move(rec));
    }
    if (records.size() != static_cast<std::size_t>(n_records))
        throw parse_error(path, line_no, "expected " + std::to_string(n_records) +
                                             " records, got " + std::to_string(records.size()));
    return Dataset(std::move(records), static_cast<int>(n_features), static_cast<int>(n_labels));
}

void Dataset::save_sparse(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << records_.size() << ' ' << n_features_ << ' ' << n_labels_ << '\n';
    for (const auto& rec : records_) {
        for (std::size_t j = 0; j < rec.features.size(); ++j) {
            if (j) out << ' ';
            out << rec.features[j];
        }
        out << (rec.features.empty() ? "|" : " |");
        for (std::size_t j = 0; j < rec.labels.size(); ++j) out << ' ' << rec.labels[j];
        out << '\n';
    }
}

Dataset Dataset::from_dense(const std::vector<std::vector<double>>& rows,
                            std::vector<IdSet> labels, int n_labels,
                            double percentile) {
    if (rows.size() != labels.size())
        throw std::invalid_argument("from_dense: feature rows and label rows differ in count");
    const auto binary = binarize_numeric(rows, percentile);
    const int n_features = binary.empty() ? 0 : static_cast<int>(binary.front().size());
    std::vector<DataRecord> records(rows.size());
    for (std::size_t i = 0; i < binary.size(); ++i) {
        for (std::size_t f = 0; f < binary[i].size(); ++f)
            if (binary[i][f]) records[i].features.push_back(static_cast<FeatureId>(f));
        records[i].labels = std::move(labels[i]);
    }
    return Dataset(std::move(records), n_features, n_labels);
}

Dataset Dataset::load_dense_csv(const std::string& features_path,
                                const std::string& labels_path, int n_labels,
                                double percentile) {
    std::ifstream in(features_path);
    if (!in) throw std::runtime_error("cannot open " + features_path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream is(line);
        std::string cell;
        while (std::getline(is, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw parse_error(features_path, line_no, "bad number '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw parse_error(features_path, line_no, "ragged row");
        rows.push_back(std::move(row));
    }

    std::ifstream lin(labels_path);
    if (!lin) throw std::runtime_error("cannot open " + labels_path);
    std::vector<IdSet> labels;
    line_no = 0;
    while (std::getline(lin, line)) {
        ++line_no;
        labels.push_back(parse_ids(line, n_labels, labels_path, line_no, "label"));
    }
    if (labels.size() != rows.size())
        throw std::runtime_error(labels_path + ": " + std::to_string(labels.size()) +
                                 " label rows for " + std::to_string(rows.size()) +
                                 " feature rows");
    return from_dense(rows, std::move(labels), n_labels, percentile);
}

double Dataset::label_cardinality() const {
    if (records_.empty()) return 0.0;
    return static_cast<double>(total_labels_) / static_cast<double>(records_.size());
}

std::size_t Dataset::distinct_label_sets() const {
    std::set<IdSet> seen;
    for (const auto& rec : records_) seen.insert(rec.labels);
    return seen.size();
}

IdSet Dataset::support(const IdSet& query, const std::vector<IdSet>& index) const {
    IdSet out;
    if (query.empty()) {
        out.resize(records_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<RecordId>(i);
        return out;
    }
    // intersect posting lists, smallest first
    IdSet order = query;
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        return index[static_cast<std::size_t>(a)].size() < index[static_cast<std::size_t>(b)].size();
    });
    out = index[static_cast<std::size_t>(order.front())];
    for (std::size_t k = 1; k < order.size() && !out.empty(); ++k)
        out = intersect(out, index[static_cast<std::size_t>(order[k])]);
    return out;
}

IdSet Dataset::head_support(const IdSet& features) const {
    for (FeatureId f : features)
        if (f < 0 || f >= n_features_) throw std::out_of_range("head_support: feature id " + std::to_string(f));
    return support(features, feature_index_);
}

IdSet Dataset::tail_support(const IdSet& labels) const {
    for (LabelId l : labels)
        if (l < 0 || l >= n_labels_) throw std::out_of_range("tail_support: label id " + std::to_string(l));
    return support(labels, label_index_);
}

IdSet Dataset::rule_support(const IdSet& head, const IdSet& tail) const {
    return intersect(head_support(head), tail_support(tail));
}

std::vector<std::vector<std::uint8_t>> binarize_numeric(
    const std::vector<std::vector<double>>& rows, double percentile) {
    if (percentile <= 0.0 || percentile > 100.0)
        throw std::invalid_argument("binarize_numeric: percentile must be in (0, 100]");
    std::vector<std::vector<std::uint8_t>> out(rows.size());
    if (rows.empty()) return out;
    const std::size_t n_cols = rows.front().size();
    const std::size_t n = rows.size();
    for (auto& r : out) r.resize(n_cols, 0);

    // nearest-rank threshold: the (floor(n*p/100)+1)-th smallest, capped at n
    std::size_t rank = static_cast<std::size_t>(std::floor(static_cast<double>(n) * percentile / 100.0)) + 1;
    if (rank > n) rank = n;

    std::vector<double> column(n);
    for (std::size_t c = 0; c < n_cols; ++c) {
        for (std::size_t i = 0; i < n; ++i) column[i] = rows[i][c];
        std::vector<double> sorted = column;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
        const double threshold = sorted[rank - 1];
        for (std::size_t i = 0; i < n; ++i)
            out[i][c] = column[i] >= threshold ? 1 : 0;
    }
    return out;
}

SplitResult split(const Dataset& dataset, const std::array<double, 3>& fractions,
                  std::uint64_t seed) {
    double sum = 0.0;
    for (double f : fractions) {
        if (f <= 0.0) throw std::invalid_argument("split: fractions must be positive");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("split: fractions must sum to 1");

    const std::size_t n = dataset.size();
    std::vector<RecordId> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<RecordId>(i);
    Rng rng = make_rng(seed, /*salt1=*/0x5914);
    for (std::size_t i = n; i > 1; --i)
        std::swap(ids[i - 1], ids[uniform_index(rng, i)]);

    const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(n)));
    const auto n_valid = static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(n)));
    if (n_train == 0 || n_valid == 0 || n_train + n_valid >= n)
        throw std::invalid_argument("split: a split would be empty");

    auto take = [&](std::size_t begin, std::size_t end) {
        IdSet chosen(ids.begin() + static_cast<std::ptrdiff_t>(begin),
                     ids.begin() + static_cast<std::ptrdiff_t>(end));
        std::sort(chosen.begin(), chosen.end());  // keep original record order
        std::vector<DataRecord> records;
        records.reserve(chosen.size());
        for (RecordId id : chosen) records.push_back(dataset.record(id));
        return Dataset(std::move(records), dataset.n_features(), dataset.n_labels());
    };
    return SplitResult{take(0, n_train), take(n_train, n_train + n_valid),
                       take(n_train + n_valid, n)};
}

}  // namespace corset

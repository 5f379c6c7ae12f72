#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "corset/sets.hpp"

namespace corset {

using FeatureId = std::int32_t;
using LabelId = std::int32_t;
using RecordId = std::int32_t;

/// One transaction: the features present and the labels present.
/// Either side may be empty.
struct DataRecord {
    IdSet features;
    IdSet labels;
};

/// Immutable binary multi-label dataset with inverted indexes on both sides.
/// Record ids are stable 0-based positions in construction order; safe for
/// concurrent reads once built.
class Dataset {
public:
    Dataset(std::vector<DataRecord> records, int n_features, int n_labels);

    /// Sparse text format:
    ///   line 1: "<n_records> <n_features> <n_labels>"
    ///   then one record per line: feature ids, a literal '|', label ids.
    /// Throws std::runtime_error with the offending line number on bad input.
    static Dataset load_sparse(const std::string& path);

    /// Dense numeric rows plus explicit label sets; features are binarized
    /// at the given per-column percentile (see binarize_numeric).
    static Dataset from_dense(const std::vector<std::vector<double>>& rows,
                              std::vector<IdSet> labels, int n_labels,
                              double percentile);

    /// Dense CSV (headerless floats) with a sidecar label file whose lines
    /// use the sparse format's label syntax (space-separated ids).
    static Dataset load_dense_csv(const std::string& features_path,
                                  const std::string& labels_path,
                                  int n_labels, double percentile);

    void save_sparse(const std::string& path) const;

    [[nodiscard]] std::size_t size() const { return records_.size(); }
    [[nodiscard]] int n_features() const { return n_features_; }
    [[nodiscard]] int n_labels() const { return n_labels_; }
    [[nodiscard]] const DataRecord& record(RecordId i) const { return records_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::vector<DataRecord>& records() const { return records_; }

    [[nodiscard]] const IdSet& feature_index(FeatureId f) const { return feature_index_[static_cast<std::size_t>(f)]; }
    [[nodiscard]] const IdSet& label_index(LabelId l) const { return label_index_[static_cast<std::size_t>(l)]; }

    /// Total feature / label occurrences over all records (the norms).
    [[nodiscard]] std::int64_t total_feature_occurrences() const { return total_features_; }
    [[nodiscard]] std::int64_t total_label_occurrences() const { return total_labels_; }

    /// Average number of labels per record.
    [[nodiscard]] double label_cardinality() const;
    /// Number of distinct label sets across records.
    [[nodiscard]] std::size_t distinct_label_sets() const;

    /// Support sets: records whose features (resp. labels) contain the
    /// query. An empty query matches every record.
    [[nodiscard]] IdSet head_support(const IdSet& features) const;
    [[nodiscard]] IdSet tail_support(const IdSet& labels) const;
    [[nodiscard]] IdSet rule_support(const IdSet& head, const IdSet& tail) const;

private:
    IdSet support(const IdSet& query, const std::vector<IdSet>& index) const;

    std::vector<DataRecord> records_;
    int n_features_ = 0;
    int n_labels_ = 0;
    std::vector<IdSet> feature_index_;
    std::vector<IdSet> label_index_;
    std::int64_t total_features_ = 0;
    std::int64_t total_labels_ = 0;
};

/// Per-column percentile binarization: entry 1 iff value >= the column's
/// p-th percentile (nearest rank, computed over the given rows). p in (0,100].
std::vector<std::vector<std::uint8_t>> binarize_numeric(
    const std::vector<std::vector<double>>& rows, double percentile);

struct SplitResult {
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// Deterministic shuffled partition; fractions must be positive and sum to 1.
/// Throws if any split would be empty.
SplitResult split(const Dataset& dataset, const std::array<double, 3>& fractions,
                  std::uint64_t seed);

}  // namespace corset

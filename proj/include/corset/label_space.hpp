#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "corset/dataset.hpp"
#include "corset/sets.hpp"

namespace corset {

/// Directed co-occurrence graph. An edge (u, v) exists iff the two items
/// co-occur in some record; its weight is the conditional probability
/// |D[{u}] ∩ D[{v}]| / |D[{u}]| that v occurs given u.
class CooccurrenceGraph {
public:
    explicit CooccurrenceGraph(int n_nodes) : adjacency_(static_cast<std::size_t>(n_nodes)) {}

    [[nodiscard]] int n_nodes() const { return static_cast<int>(adjacency_.size()); }
    [[nodiscard]] bool has_edge(std::int32_t u, std::int32_t v) const;
    /// Weight p(u, v); 0 when the edge is absent.
    [[nodiscard]] double weight(std::int32_t u, std::int32_t v) const;
    [[nodiscard]] const std::vector<std::pair<std::int32_t, double>>& neighbors(std::int32_t u) const {
        return adjacency_[static_cast<std::size_t>(u)];
    }

    void add_edge(std::int32_t u, std::int32_t v, double p);
    void finalize();  // sorts adjacency lists for binary search

private:
    std::vector<std::vector<std::pair<std::int32_t, double>>> adjacency_;
};

CooccurrenceGraph build_label_graph(const Dataset& dataset);
CooccurrenceGraph build_feature_graph(const Dataset& dataset);

struct ItemsetEntry {
    IdSet items;
    double probability;  // product of all directed edge weights inside the set
};

/// The interpretable sample space: itemsets whose clique probability clears
/// the threshold, singletons always included.
struct InterpretableSpace {
    std::vector<ItemsetEntry> members;
    double theta = 0.0;
    int max_size = 0;
};

struct EnumerationBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// DFS over mutually-connected extensions; a set survives iff the product of
/// its 2*C(|S|,2) directed edge weights is >= theta and |S| <= max_size.
/// The running product is anti-monotone, so branches below theta are pruned.
/// Throws EnumerationBudgetExceeded when more than node_budget extensions
/// are visited (dense graphs blow up exponentially).
InterpretableSpace enumerate_probable_cliques(const CooccurrenceGraph& graph,
                                              double theta, int max_size,
                                              std::uint64_t node_budget = 1u << 22);

/// Interpretable feature space for reduced-space head sampling.
InterpretableSpace build_feature_space(const Dataset& dataset, double theta,
                                       int max_size,
                                       std::uint64_t node_budget = 1u << 22);

/// Per-record containment lists I[D] = { S in M⁻ : S ⊆ record items }.
class ContainmentIndex {
public:
    ContainmentIndex(const InterpretableSpace* space, std::vector<std::vector<std::int32_t>> lists)
        : space_(space), lists_(std::move(lists)) {}

    [[nodiscard]] const std::vector<std::int32_t>& members_of(RecordId record) const {
        return lists_[static_cast<std::size_t>(record)];
    }
    [[nodiscard]] const ItemsetEntry& member(std::int32_t id) const {
        return space_->members[static_cast<std::size_t>(id)];
    }
    [[nodiscard]] const InterpretableSpace& space() const { return *space_; }
    [[nodiscard]] std::size_t n_records() const { return lists_.size(); }

private:
    const InterpretableSpace* space_;
    std::vector<std::vector<std::int32_t>> lists_;
};

/// PRETTI-style evaluation: members are ordered by global item frequency,
/// grouped into a prefix tree, and posting lists are intersected once per
/// shared prefix. record_items/inverted must come from the same side
/// (labels or features) of the dataset.
ContainmentIndex build_containment_index_generic(
    const std::vector<const IdSet*>& record_items,
    const std::vector<IdSet>& inverted, const InterpretableSpace& space);

/// Containment of label-side members in each record's label set.
ContainmentIndex build_containment_index(const Dataset& dataset,
                                         const InterpretableSpace& space);

/// Containment of feature-side members in each record's feature set.
ContainmentIndex build_feature_containment_index(const Dataset& dataset,
                                                 const InterpretableSpace& space);

/// Dump for inspection: "id id id<TAB>probability" per member.
void dump_space(const InterpretableSpace& space, const std::string& path);

}  // namespace corset

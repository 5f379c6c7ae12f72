#include "corset/label_space.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace corset {

namespace {

struct EdgeLess {
    bool operator()(const std::pair<std::int32_t, double>& a, std::int32_t v) const {
        return a.first < v;
    }
};

CooccurrenceGraph build_graph(const std::vector<IdSet>& inverted) {
    const int n = static_cast<int>(inverted.size());
    CooccurrenceGraph graph(n);
    for (std::int32_t u = 0; u < n; ++u) {
        const IdSet& du = inverted[static_cast<std::size_t>(u)];
        if (du.empty()) continue;  // isolated node
        for (std::int32_t v = 0; v < n; ++v) {
            if (v == u) continue;
            const std::size_t both = intersect_size(du, inverted[static_cast<std::size_t>(v)]);
            if (both == 0) continue;
            graph.add_edge(u, v, static_cast<double>(both) / static_cast<double>(du.size()));
        }
    }
    graph.finalize();
    return graph;
}

}  // namespace

bool CooccurrenceGraph::has_edge(std::int32_t u, std::int32_t v) const {
    const auto& adj = adjacency_[static_cast<std::size_t>(u)];
    auto it = std::lower_bound(adj.begin(), adj.end(), v, EdgeLess{});
    return it != adj.end() && it->first == v;
}

double CooccurrenceGraph::weight(std::int32_t u, std::int32_t v) const {
    const auto& adj = adjacency_[static_cast<std::size_t>(u)];
    auto it = std::lower_bound(adj.begin(), adj.end(), v, EdgeLess{});
    return (it != adj.end() && it->first == v) ? it->second : 0.0;
}

void CooccurrenceGraph::add_edge(std::int32_t u, std::int32_t v, double p) {
    adjacency_[static_cast<std::size_t>(u)].emplace_back(v, p);
}

void CooccurrenceGraph::finalize() {
    for (auto& adj : adjacency_)
        std::sort(adj.begin(), adj.end());
}

CooccurrenceGraph build_label_graph(const Dataset& dataset) {
    std::vector<IdSet> inverted;
    inverted.reserve(static_cast<std::size_t>(dataset.n_labels()));
    for (int l = 0; l < dataset.n_labels(); ++l) inverted.push_back(dataset.label_index(l));
    return build_graph(inverted);
}

CooccurrenceGraph build_feature_graph(const Dataset& dataset) {
    std::vector<IdSet> inverted;
    inverted.reserve(static_cast<std::size_t>(dataset.n_features()));
    for (int f = 0; f < dataset.n_features(); ++f) inverted.push_back(dataset.feature_index(f));
    return build_graph(inverted);
}

namespace {

struct CliqueDfs {
    const CooccurrenceGraph& graph;
    double theta;
    int max_size;
    std::uint64_t budget;
    std::uint64_t visited = 0;
    std::vector<ItemsetEntry> out;

    // Extends the current set by candidates > max element, keeping the
    // running product of both edge orientations against all members.
    void grow(IdSet& current, double probability) {
        if (static_cast<int>(current.size()) >= max_size) return;
        const std::int32_t last = current.back();
        for (const auto& [v, w_out] : graph.neighbors(last)) {
            if (v <= last) continue;
            if (++visited > budget)
                throw EnumerationBudgetExceeded(
                    "clique enumeration exceeded node budget of " + std::to_string(budget) +
                    "; raise the budget or the threshold");
            double p = probability;
            bool connected = true;
            for (std::int32_t u : current) {
                const double forward = graph.weight(u, v);
                const double backward = graph.weight(v, u);
                if (forward == 0.0 || backward == 0.0) { connected = false; break; }
                p *= forward * backward;
                if (p < theta) break;  // anti-monotone prune
            }
            if (!connected || p < theta) continue;
            current.push_back(v);
            out.push_back({current, p});
            grow(current, p);
            current.pop_back();
        }
    }
};

}  // namespace

InterpretableSpace enumerate_probable_cliques(const CooccurrenceGraph& graph,
                                              double theta, int max_size,
                                              std::uint64_t node_budget) {
    if (theta <= 0.0 || theta > 1.0)
        throw std::invalid_argument("enumerate_probable_cliques: theta must be in (0, 1]");
    if (max_size < 1)
        throw std::invalid_argument("enumerate_probable_cliques: max_size must be >= 1");

    CliqueDfs dfs{graph, theta, max_size, node_budget, 0, {}};
    IdSet current;
    for (std::int32_t node = 0; node < graph.n_nodes(); ++node) {
        current.assign(1, node);
        dfs.out.push_back({current, 1.0});  // singletons always qualify
        dfs.grow(current, 1.0);
    }
    InterpretableSpace space;
    space.members = std::move(dfs.out);
    space.theta = theta;
    space.max_size = max_size;
    return space;
}

InterpretableSpace build_feature_space(const Dataset& dataset, double theta,
                                       int max_size, std::uint64_t node_budget) {
    return enumerate_probable_cliques(build_feature_graph(dataset), theta, max_size,
                                      node_budget);
}

namespace {

struct PrefixNode {
    // members (by index into the sorted member table) sharing the prefix
    std::size_t begin, end;
    std::size_t depth;
};

}  // namespace

ContainmentIndex build_containment_index_generic(
    const std::vector<const IdSet*>& record_items,
    const std::vector<IdSet>& inverted, const InterpretableSpace& space) {
    const std::size_t n_records = record_items.size();
    std::vector<std::vector<std::int32_t>> lists(n_records);

    // global order: ascending item frequency, ties by id
    std::vector<std::int32_t> rank(inverted.size());
    {
        std::vector<std::int32_t> order(inverted.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
            const auto sa = inverted[static_cast<std::size_t>(a)].size();
            const auto sb = inverted[static_cast<std::size_t>(b)].size();
            return sa != sb ? sa < sb : a < b;
        });
        for (std::size_t i = 0; i < order.size(); ++i)
            rank[static_cast<std::size_t>(order[i])] = static_cast<std::int32_t>(i);
    }

    // members reordered by rank; sorting them lexicographically groups
    // shared prefixes so each trie edge intersects its posting list once
    struct OrderedMember {
        std::vector<std::int32_t> ranked_items;
        std::int32_t id;
    };
    std::vector<OrderedMember> members;
    members.reserve(space.members.size());
    for (std::size_t m = 0; m < space.members.size(); ++m) {
        OrderedMember om;
        om.id = static_cast<std::int32_t>(m);
        om.ranked_items.reserve(space.members[m].items.size());
        for (std::int32_t item : space.members[m].items)
            om.ranked_items.push_back(rank[static_cast<std::size_t>(item)]);
        std::sort(om.ranked_items.begin(), om.ranked_items.end());
        members.push_back(std::move(om));
    }
    std::sort(members.begin(), members.end(),
              [](const OrderedMember& a, const OrderedMember& b) {
                  return a.ranked_items != b.ranked_items ? a.ranked_items < b.ranked_items
                                                          : a.id < b.id;
              });

    std::vector<std::int32_t> item_of_rank(inverted.size());
    for (std::size_t item = 0; item < inverted.size(); ++item)
        item_of_rank[static_cast<std::size_t>(rank[item])] = static_cast<std::int32_t>(item);

    IdSet all_records(n_records);
    std::iota(all_records.begin(), all_records.end(), 0);

    // recursive descent over prefix groups
    auto descend = [&](auto&& self, std::size_t begin, std::size_t end,
                       std::size_t depth, const IdSet& records) -> void {
        std::size_t i = begin;
        while (i < end) {
            if (members[i].ranked_items.size() == depth) {
                // member completed at this node: contained in every record here
                for (RecordId r : records)
                    lists[static_cast<std::size_t>(r)].push_back(members[i].id);
                ++i;
                continue;
            }
            const std::int32_t r_item = members[i].ranked_items[depth];
            std::size_t j = i;
            while (j < end && members[j].ranked_items.size() > depth &&
                   members[j].ranked_items[depth] == r_item)
                ++j;
            const IdSet& postings = inverted[static_cast<std::size_t>(item_of_rank[static_cast<std::size_t>(r_item)])];
            IdSet narrowed = intersect(records, postings);
            if (!narrowed.empty()) self(self, i, j, depth + 1, narrowed);
            i = j;
        }
    };
    descend(descend, 0, members.size(), 0, all_records);

    for (auto& list : lists) std::sort(list.begin(), list.end());
    return ContainmentIndex(&space, std::move(lists));
}

ContainmentIndex build_containment_index(const Dataset& dataset,
                                         const InterpretableSpace& space) {
    std::vector<const IdSet*> items;
    items.reserve(dataset.size());
    for (const auto& rec : dataset.records()) items.push_back(&rec.labels);
    std::vector<IdSet> inverted;
    inverted.reserve(static_cast<std::size_t>(dataset.n_labels()));
    for (int l = 0; l < dataset.n_labels(); ++l) inverted.push_back(dataset.label_index(l));
    return build_containment_index_generic(items, inverted, space);
}

ContainmentIndex build_feature_containment_index(const Dataset& dataset,
                                                 const InterpretableSpace& space) {
    std::vector<const IdSet*> items;
    items.reserve(dataset.size());
    for (const auto& rec : dataset.records()) items.push_back(&rec.features);
    std::vector<IdSet> inverted;
    inverted.reserve(static_cast<std::size_t>(dataset.n_features()));
    for (int f = 0; f < dataset.n_features(); ++f) inverted.push_back(dataset.feature_index(f));
    return build_containment_index_generic(items, inverted, space);
}

void dump_space(const InterpretableSpace& space, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& entry : space.members) {
        for (std::size_t i = 0; i < entry.items.size(); ++i) {
            if (i) out << ' ';
            out << entry.items[i];
        }
        out << '\t' << entry.probability << '\n';
    }
}

}  // namespace corset

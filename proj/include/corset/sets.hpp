#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace corset {

/// Sorted, duplicate-free vector of ids. Every feature/label/record set in
/// the library is kept in this form so set algebra is linear merges.
using IdSet = std::vector<std::int32_t>;

inline void sort_unique(IdSet& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline bool is_subset(const IdSet& a, const IdSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline IdSet intersect(const IdSet& a, const IdSet& b) {
    IdSet out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(out));
    return out;
}

inline std::size_t intersect_size(const IdSet& a, const IdSet& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else { ++n; ++i; ++j; }
    }
    return n;
}

inline IdSet set_union(const IdSet& a, const IdSet& b) {
    IdSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::back_inserter(out));
    return out;
}

inline IdSet set_difference(const IdSet& a, const IdSet& b) {
    IdSet out;
    out.reserve(a.size());
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
    return out;
}

inline bool contains(const IdSet& a, std::int32_t x) {
    return std::binary_search(a.begin(), a.end(), x);
}

}  // namespace corset

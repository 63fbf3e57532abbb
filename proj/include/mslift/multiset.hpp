#ifndef MSLIFT_MULTISET_HPP
#define MSLIFT_MULTISET_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>

namespace mslift {

/**
 * Finite multiset: a map from element to a positive multiplicity.
 *
 * Elements are kept in a sorted map, so iteration follows the element's
 * total order and is reproducible. Zero multiplicities are never stored.
 */
template <typename T, typename Compare = std::less<T>>
class Multiset {
public:
    using element_type = T;
    using map_type = std::map<T, std::size_t, Compare>;
    using const_iterator = typename map_type::const_iterator;

    Multiset() = default;

    /// Builds from (element, multiplicity) pairs; repeated elements accumulate.
    Multiset(std::initializer_list<std::pair<T, std::size_t>> entries) {
        for (const auto& [element, n] : entries) insert(element, n);
    }

    void insert(const T& element, std::size_t n = 1) {
        if (n == 0) return;
        entries_[element] += n;
        total_ += n;
    }

    /// Removes up to n copies; returns how many were actually removed.
    std::size_t erase(const T& element, std::size_t n = 1) {
        auto it = entries_.find(element);
        if (it == entries_.end()) return 0;
        std::size_t removed = std::min(n, it->second);
        it->second -= removed;
        total_ -= removed;
        if (it->second == 0) entries_.erase(it);
        return removed;
    }

    std::size_t count(const T& element) const {
        auto it = entries_.find(element);
        return it == entries_.end() ? 0 : it->second;
    }

    bool contains(const T& element) const { return entries_.count(element) != 0; }

    /// Sum of multiplicities.
    std::size_t size() const noexcept { return total_; }
    std::size_t distinct() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return total_ == 0; }

    const_iterator begin() const { return entries_.begin(); }
    const_iterator end() const { return entries_.end(); }
    const map_type& entries() const noexcept { return entries_; }

    friend bool operator==(const Multiset& a, const Multiset& b) { return a.entries_ == b.entries_; }
    friend bool operator<(const Multiset& a, const Multiset& b) { return a.entries_ < b.entries_; }

private:
    map_type entries_;
    std::size_t total_ = 0;
};

/// a ⊎ b: multiplicities add.
template <typename T, typename C>
Multiset<T, C> multiset_union(const Multiset<T, C>& a, const Multiset<T, C>& b) {
    Multiset<T, C> out = a;
    for (const auto& [element, n] : b) out.insert(element, n);
    return out;
}

/// a ∖ b with multiplicities saturating at zero.
template <typename T, typename C>
Multiset<T, C> multiset_difference(const Multiset<T, C>& a, const Multiset<T, C>& b) {
    Multiset<T, C> out = a;
    for (const auto& [element, n] : b) out.erase(element, n);
    return out;
}

/// a ⊑ b.
template <typename T, typename C>
bool is_submultiset(const Multiset<T, C>& a, const Multiset<T, C>& b) {
    for (const auto& [element, n] : a)
        if (b.count(element) < n) return false;
    return true;
}

/// Textual form ⦃n₁e₁, …, n_ke_k⦄ in canonical element order.
template <typename T, typename C, typename Format>
std::string to_string(const Multiset<T, C>& m, Format&& format) {
    std::string out = "⦃";
    bool first = true;
    for (const auto& [element, n] : m) {
        if (!first) out += ", ";
        first = false;
        out += std::to_string(n);
        out += format(element);
    }
    out += "⦄";
    return out;
}

} // namespace mslift

#endif

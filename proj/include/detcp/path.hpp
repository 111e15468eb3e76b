#ifndef DETCP_PATH_HPP
#define DETCP_PATH_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace detcp {

/// Identifies a search-tree node by the branch choices taken from the root:
/// 0 = left child, 1 = right child. The empty path is the root.
///
/// Paths carry the "leftmost" total order used everywhere in the engine:
/// DFS preorder, i.e. lexicographic on the branch bits with a strict prefix
/// ordered before its extensions.
struct PathId {
    std::vector<std::uint8_t> bits;

    PathId() = default;
    explicit PathId(std::vector<std::uint8_t> b) : bits(std::move(b)) {}
    PathId(std::initializer_list<int> b) {
        bits.reserve(b.size());
        for (int v : b) bits.push_back(static_cast<std::uint8_t>(v != 0));
    }

    std::size_t depth() const { return bits.size(); }
    bool empty() const { return bits.empty(); }

    void push(bool right) { bits.push_back(right ? 1 : 0); }
    void pop() { bits.pop_back(); }

    bool operator==(const PathId& other) const { return bits == other.bits; }
    bool operator!=(const PathId& other) const { return bits != other.bits; }

    /// "0110"-style rendering; root renders as the empty string.
    std::string to_string() const {
        std::string s;
        s.reserve(bits.size());
        for (auto b : bits) s.push_back(b ? '1' : '0');
        return s;
    }

    static PathId from_string(const std::string& s) {
        PathId p;
        p.bits.reserve(s.size());
        for (char c : s) p.bits.push_back(c == '1' ? 1 : 0);
        return p;
    }
};

enum class PathOrder { Left, Equal, Right };

/// DFS-preorder comparison: at the first differing index the path holding 0
/// is Left; if one path is a strict prefix of the other, the prefix is Left.
inline PathOrder compare_paths(const PathId& a, const PathId& b) {
    const std::size_t n = a.bits.size() < b.bits.size() ? a.bits.size() : b.bits.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (a.bits[i] != b.bits[i])
            return a.bits[i] == 0 ? PathOrder::Left : PathOrder::Right;
    }
    if (a.bits.size() == b.bits.size()) return PathOrder::Equal;
    return a.bits.size() < b.bits.size() ? PathOrder::Left : PathOrder::Right;
}

/// Strict-weak-order form of compare_paths, usable as a container comparator.
inline bool path_before(const PathId& a, const PathId& b) {
    return compare_paths(a, b) == PathOrder::Left;
}

}  // namespace detcp

#endif  // DETCP_PATH_HPP

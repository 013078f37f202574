#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace grp {

/// Identifier of a network node. Totally ordered so that every container,
/// fold and tie-break in the library is deterministic.
struct NodeId {
    std::string value;

    NodeId() = default;
    explicit NodeId(std::string v) : value(std::move(v)) {}

    auto operator<=>(const NodeId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const NodeId& id) {
    return os << id.value;
}

/// Annotation carried by a list entry. `Single` is the hello token a node
/// attaches to a neighbour that does not list it back yet; `Double` flags a
/// neighbour whose list was rejected as incompatible. Marks only travel one
/// hop: receivers strip them (except their own Single mark) on arrival.
enum class Mark : std::uint8_t {
    Plain = 0,
    Single = 1,
    Double = 2,
};

/// Higher value = more severe. Used when the same node id lands on the same
/// position of two merged lists.
inline Mark more_severe(Mark a, Mark b) { return a >= b ? a : b; }

/// Renders the mark suffix used by the canonical list syntax: "", "!", "!!".
inline const char* mark_suffix(Mark m) {
    switch (m) {
    case Mark::Single: return "!";
    case Mark::Double: return "!!";
    default: return "";
    }
}

/// Priority of a node: a logical-clock "oldness" plus the node id as a
/// tie-break. Smaller compares first and wins conflicts (older nodes have
/// smaller oldness because the clock only advances while a node is alone).
struct Priority {
    std::uint64_t oldness = 0;
    NodeId tiebreak;

    auto operator<=>(const Priority&) const = default;
};

} // namespace grp

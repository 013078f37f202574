#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grp/ids.hpp"

namespace grp {

/// One position of an ancestor list: the set of nodes believed to sit at a
/// given distance, each with its mark. A node id appears at most once per
/// set (and, by the merge rules, at most once per list).
class EntrySet {
public:
    EntrySet() = default;

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    bool contains(const NodeId& id) const { return entries_.count(id) != 0; }

    std::optional<Mark> mark_of(const NodeId& id) const {
        auto it = entries_.find(id);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    /// Inserts or raises: if the id is already present the more severe mark
    /// wins. Returns the stored mark.
    Mark insert(const NodeId& id, Mark m) {
        auto [it, fresh] = entries_.emplace(id, m);
        if (!fresh) it->second = more_severe(it->second, m);
        return it->second;
    }

    void erase(const NodeId& id) { entries_.erase(id); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    /// Ids regardless of mark.
    std::set<NodeId> all_ids() const {
        std::set<NodeId> out;
        for (const auto& [id, m] : entries_) out.insert(id);
        return out;
    }

    /// Ids carrying no mark.
    std::set<NodeId> plain_ids() const {
        std::set<NodeId> out;
        for (const auto& [id, m] : entries_) {
            if (m == Mark::Plain) out.insert(id);
        }
        return out;
    }

    bool has_plain() const {
        return std::any_of(entries_.begin(), entries_.end(),
                           [](const auto& e) { return e.second == Mark::Plain; });
    }

    bool operator==(const EntrySet&) const = default;

private:
    std::map<NodeId, Mark> entries_; // ordered: rendering is canonical
};

/// Ordered list of entry sets; position i holds the nodes believed to be at
/// distance i from the owner. Position 0 of a node's own list is always the
/// singleton {owner}.
class AncestorList {
public:
    AncestorList() = default;

    /// The one-element list ({v}): a node that knows only itself.
    static AncestorList singleton(const NodeId& v) {
        AncestorList l;
        l.sets_.emplace_back();
        l.sets_.back().insert(v, Mark::Plain);
        return l;
    }

    std::size_t length() const { return sets_.size(); } // s(list)
    bool empty() const { return sets_.empty(); }

    const EntrySet& at(std::size_t i) const { return sets_.at(i); }
    EntrySet& at(std::size_t i) { return sets_.at(i); }

    auto begin() const { return sets_.begin(); }
    auto end() const { return sets_.end(); }

    void push_back(EntrySet s) { sets_.push_back(std::move(s)); }

    /// Position of an id, scanning from the front, with its mark.
    std::optional<std::pair<std::size_t, Mark>> find(const NodeId& id) const {
        for (std::size_t i = 0; i < sets_.size(); ++i) {
            if (auto m = sets_[i].mark_of(id)) return std::make_pair(i, *m);
        }
        return std::nullopt;
    }

    bool contains(const NodeId& id) const { return find(id).has_value(); }

    bool has_empty_set() const {
        return std::any_of(sets_.begin(), sets_.end(),
                           [](const EntrySet& s) { return s.empty(); });
    }

    /// 1 + deepest position holding an unmarked entry; 0 if there is none.
    /// This is the length of the list once handshake and rejection tokens are
    /// ignored, which is what the compatibility arithmetic measures: marked
    /// entries are one-hop annotations, not believed group members.
    std::size_t effective_length() const {
        for (std::size_t i = sets_.size(); i > 0; --i) {
            if (sets_[i - 1].has_plain()) return i;
        }
        return 0;
    }

    /// All ids on the list, any mark.
    std::set<NodeId> all_ids() const {
        std::set<NodeId> out;
        for (const auto& s : sets_) {
            for (const auto& [id, m] : s) out.insert(id);
        }
        return out;
    }

    /// Unmarked ids only: the membership a stabilised list asserts.
    std::set<NodeId> plain_ids() const {
        std::set<NodeId> out;
        for (const auto& s : sets_) {
            for (const auto& [id, m] : s) {
                if (m == Mark::Plain) out.insert(id);
            }
        }
        return out;
    }

    void drop_trailing_empty() {
        while (!sets_.empty() && sets_.back().empty()) sets_.pop_back();
    }

    bool operator==(const AncestorList&) const = default;

private:
    std::vector<EntrySet> sets_;
};

/// merge (⊕): position-wise union, then every id is kept only at its minimal
/// position. When both operands hold an id at that same minimal position the
/// more severe mark survives. Empty sets produced at the tail are dropped;
/// an empty set left in the middle stays (receivers will reject such a list
/// as not good until the gap is filled or washed out).
inline AncestorList merge(const AncestorList& a, const AncestorList& b) {
    const std::size_t n = std::max(a.length(), b.length());

    // Minimal position of every id across both operands.
    std::map<NodeId, std::size_t> min_pos;
    auto scan = [&](const AncestorList& l) {
        for (std::size_t i = 0; i < l.length(); ++i) {
            for (const auto& [id, m] : l.at(i)) {
                auto it = min_pos.find(id);
                if (it == min_pos.end() || i < it->second) min_pos[id] = i;
            }
        }
    };
    scan(a);
    scan(b);

    AncestorList out;
    for (std::size_t i = 0; i < n; ++i) {
        EntrySet s;
        auto take = [&](const AncestorList& l) {
            if (i >= l.length()) return;
            for (const auto& [id, m] : l.at(i)) {
                if (min_pos[id] == i) s.insert(id, m);
            }
        };
        take(a);
        take(b);
        out.push_back(std::move(s));
    }
    out.drop_trailing_empty();
    return out;
}

/// r: shift one position away by prepending an empty set.
inline AncestorList shift(const AncestorList& l) {
    AncestorList out;
    out.push_back(EntrySet{});
    for (const auto& s : l) out.push_back(s);
    return out;
}

/// ant: how a received list looks from one hop away, folded into own
/// knowledge: own ⊕ r(incoming).
inline AncestorList ant(const AncestorList& own, const AncestorList& incoming) {
    return merge(own, shift(incoming));
}

/// Canonical rendering: "({v},{a,b!},{c!!})". Sets in list order, ids sorted,
/// marks as suffixes; an empty set renders as "{}" and the empty list as "()".
inline std::string to_string(const AncestorList& l) {
    std::ostringstream os;
    os << '(';
    bool first_set = true;
    for (const auto& s : l) {
        if (!first_set) os << ',';
        first_set = false;
        os << '{';
        bool first_entry = true;
        for (const auto& [id, m] : s) {
            if (!first_entry) os << ',';
            first_entry = false;
            os << id.value << mark_suffix(m);
        }
        os << '}';
    }
    os << ')';
    return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const AncestorList& l) {
    return os << to_string(l);
}

/// Configuration for the compatibility test. The connective between the two
/// per-position bounds is where published variants of the test differ; all
/// variants share the length-sum shortcut and the containment premise.
enum class CompatVariant {
    /// min(s + s' + 1 - i, s' + 1 + i/2) <= dmax  (pseudocode constants)
    Pseudocode,
    /// min(s + s' - 1 - i, s' + i/2) <= dmax      (analysis constants)
    Proposition,
    /// max(s - i + s', i/2 + 1 + s' - 1) <= dmax  with both bounds required:
    /// the distance reachable through the deepest own member AND through the
    /// far half of the matched set must both fit. The min-connective variants
    /// accept at i = 0 merges whose union provably exceeds dmax (two paths of
    /// effective length 3 at dmax = 4 join into a diameter-5 chain), which
    /// later fractures an established group; the protocol therefore runs this
    /// variant by default.
    Sound,
};

inline const char* to_string(CompatVariant v) {
    switch (v) {
    case CompatVariant::Pseudocode: return "pseudocode";
    case CompatVariant::Proposition: return "proposition";
    default: return "sound";
    }
}

inline std::optional<CompatVariant> parse_compat_variant(const std::string& s) {
    if (s == "pseudocode") return CompatVariant::Pseudocode;
    if (s == "proposition") return CompatVariant::Proposition;
    if (s == "sound") return CompatVariant::Sound;
    return std::nullopt;
}

/// Decides whether `incoming` (an announced list, exactly as received) can be
/// adopted by the owner of `own` without the united group exceeding diameter
/// dmax. Pass the raw list: marked entries at position 1 are still adjacency
/// evidence for the containment premise even though they carry no depth.
///
/// Depths are effective: marked entries are transient one-hop tokens and do
/// not count. Writing p = eff(own) - 1 and q for the incoming depth, the
/// test accepts when
///
///   (a) p + q + 1 <= dmax: the two believed chains plus the connecting hop
///       fit outright, or
///   (b) some own position i (0 <= i <= p) has all its unmarked members
///       listed at position 1 of `incoming` (the sender's neighbourhood),
///       and the variant-dependent positional bound at i holds.
///
/// The published variants take q over every unmarked incoming entry. The
/// sound variant takes q over unmarked incoming entries that `own` does not
/// already hold: entries both sides list add no new distance (their bounds
/// are covered by the legality of the own group), and counting them rejects
/// a member re-approaching its own group after a missed handshake.
///
/// Degenerate cases: an own list with no unmarked entry accepts nothing; an
/// incoming list with no unmarked (respectively no foreign unmarked) entry
/// has depth 0.
inline bool compatible_list(const AncestorList& own, const AncestorList& incoming,
                            std::size_t dmax,
                            CompatVariant variant = CompatVariant::Pseudocode) {
    const std::size_t es = own.effective_length();
    if (es == 0) return false;
    const std::size_t p = es - 1;

    std::size_t q = 0;
    if (variant == CompatVariant::Sound) {
        const std::set<NodeId> own_plain = own.plain_ids();
        for (std::size_t i = 0; i < incoming.length(); ++i) {
            for (const auto& [id, m] : incoming.at(i)) {
                if (m == Mark::Plain && !own_plain.count(id)) q = std::max(q, i);
            }
        }
    } else {
        const std::size_t es_in = incoming.effective_length();
        q = es_in == 0 ? 0 : es_in - 1;
    }

    if (p + q + 1 <= dmax) return true;
    if (incoming.length() < 2) return false;

    const std::set<NodeId> sender_hood = incoming.at(1).all_ids();
    for (std::size_t i = 0; i <= p; ++i) {
        const std::set<NodeId> members = own.at(i).plain_ids();
        if (members.empty()) continue; // only marked tokens here: nothing to match
        if (!std::includes(sender_hood.begin(), sender_hood.end(),
                           members.begin(), members.end()))
            continue;
        bool ok = false;
        switch (variant) {
        case CompatVariant::Pseudocode:
            ok = std::min((p + 1) + (q + 1) + 1 - i, (q + 1) + 1 + i / 2) <= dmax;
            break;
        case CompatVariant::Proposition:
            ok = std::min((p + 1) + (q + 1) - 1 - i, (q + 1) + i / 2) <= dmax;
            break;
        case CompatVariant::Sound:
            // Own members at depth >= i reach the sender through layer i in
            // p-i+1 hops; members at depth < i may need to run back through
            // the receiver, up to i hops. Either way plus q on the far side.
            ok = std::max(p - i + 1 + q, i + q) <= dmax;
            break;
        }
        if (ok) return true;
    }
    return false;
}

} // namespace grp

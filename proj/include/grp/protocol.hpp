#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grp/ancestor_list.hpp"
#include "grp/ids.hpp"

namespace grp {

/// Announcement sent by a node to all current neighbours: its ancestor list
/// plus the oldness values it knows, so receivers can resolve conflicts
/// against groups they have never met.
struct GrpMessage {
    NodeId sender;
    AncestorList list;
    std::map<NodeId, std::uint64_t> oldness; // per known node

    bool operator==(const GrpMessage&) const = default;
};

/// Wire rendering: "GRP <sender> <list> PRIO <id>:<oldness>,...".
inline std::string to_string(const GrpMessage& m) {
    std::ostringstream os;
    os << "GRP " << m.sender.value << ' ' << to_string(m.list) << " PRIO ";
    bool first = true;
    for (const auto& [id, old] : m.oldness) {
        if (!first) os << ',';
        first = false;
        os << id.value << ':' << old;
    }
    return os.str();
}

/// Static protocol parameters shared by every node of a run.
struct ProtocolConfig {
    std::size_t dmax = 2;
    CompatVariant variant = CompatVariant::Sound;
};

/// A list is good for receiver v when it proves the sender is a live
/// neighbour that acknowledges v: v must appear unmarked or hello-marked at
/// position 1, the list must fit the diameter bound and contain no gap.
/// One-set lists (no position 1) are never good.
inline bool good_list(const AncestorList& list, const NodeId& receiver, std::size_t dmax) {
    if (list.length() < 2) return false;
    if (list.length() > dmax + 1) return false;
    if (list.has_empty_set()) return false;
    auto m = list.at(1).mark_of(receiver);
    return m.has_value() && *m != Mark::Double;
}

/// Full per-node protocol state. The simulator owns topology and timing;
/// this class owns everything the protocol text manipulates.
class NodeState {
public:
    NodeState() = default;
    NodeState(NodeId id, const ProtocolConfig& cfg)
        : id_(std::move(id)), cfg_(cfg), list_(AncestorList::singleton(id_)) {
        view_.insert(id_);
    }

    const NodeId& id() const { return id_; }
    const AncestorList& list() const { return list_; }
    const std::set<NodeId>& view() const { return view_; }
    const std::map<NodeId, std::uint32_t>& quarantine() const { return quarantine_; }
    const std::map<NodeId, std::uint64_t>& oldness() const { return oldness_; }
    std::uint64_t own_oldness() const {
        auto it = oldness_.find(id_);
        return it == oldness_.end() ? 0 : it->second;
    }

    /// Test hooks and corrupted-start injection: states are plain data.
    void set_list(AncestorList l) { list_ = std::move(l); }
    void set_view(std::set<NodeId> v) { view_ = std::move(v); }
    void set_quarantine(std::map<NodeId, std::uint32_t> q) { quarantine_ = std::move(q); }
    void set_oldness(std::map<NodeId, std::uint64_t> o) { oldness_ = std::move(o); }

    /// Latest message per sender since the previous compute.
    void receive(const GrpMessage& m) { msg_set_[m.sender] = m; }
    const std::map<NodeId, GrpMessage>& pending() const { return msg_set_; }

    /// The announcement for the current state: own list plus the oldness of
    /// everyone on it.
    GrpMessage announcement() const {
        GrpMessage m;
        m.sender = id_;
        m.list = list_;
        m.oldness[id_] = own_oldness();
        for (const NodeId& x : list_.all_ids()) {
            auto it = oldness_.find(x);
            if (it != oldness_.end()) m.oldness[x] = it->second;
        }
        return m;
    }

    /// One protocol round: digest the stored messages into a fresh list,
    /// resolve any diameter conflict, advance quarantine, derive the view and
    /// age the priority clock. Clears the message set.
    void compute() {
        // -- per-message screening ------------------------------------------
        // Each stored message yields a contribution to the fold: the sender's
        // sanitised list if accepted, a hello mark if the list is not good, a
        // rejection mark if it is good but incompatible. Marks on foreign
        // entries are the sender's one-hop annotations and are dropped; marks
        // on ourself are kept (they carry the handshake).
        //
        // Newcomers (good lists from senders we do not hold as members) are
        // admitted one at a time, in id order, each tested against the
        // standing members plus the newcomers already let in this round.
        // A newcomer enters when the round's evidence certifies the united
        // group: every believed distance is backed by some real path —
        // through this node (reach sums) or through a single announcer
        // (position sums) — and pairs listed plain together by one believer
        // stand on that group's own commitment. One exchange at a time
        // cannot see this: two groups touching on several edges make every
        // single list look too long even though the union is tight, while
        // the lists side by side prove it. The test is per newcomer, not
        // over the whole message set at once, so an unrelated sender that
        // genuinely cannot join (and stays marked) does not block the ones
        // that can. A newcomer the evidence does not certify falls back to
        // the pairwise test on its raw list — the optimistic accept — and
        // is rejected outright when that fails too.
        std::map<NodeId, AncestorList> contributions;
        struct Pending {
            NodeId sender;
            const GrpMessage* msg;
            AncestorList clean;
        };
        std::vector<Pending> pending;
        for (const auto& [sender, msg] : msg_set_) {
            absorb_oldness(msg.oldness);
            AncestorList in = sanitize(msg.list);
            if (!good_list(in, id_, cfg_.dmax)) {
                contributions[sender] = marked_singleton(sender, Mark::Single);
                continue;
            }
            if (!is_plain_listed(sender)) {
                pending.push_back({sender, &msg, std::move(in)});
                contributions[sender] = marked_singleton(sender, Mark::Single);
            } else {
                contributions[sender] = std::move(in);
            }
        }
        std::set<NodeId> rejected;
        for (Pending& p : pending) {
            AncestorList& slot = contributions[p.sender];
            slot = p.clean;
            if (certified_union(fold(contributions))) continue;
            if (!compatible_list(list_, p.msg->list, cfg_.dmax, cfg_.variant)) {
                slot = marked_singleton(p.sender, Mark::Double);
                rejected.insert(p.sender);
            }
        }

        // -- belief consistency ----------------------------------------------
        // A sender folded in plain keeps announcing its own membership
        // belief. When that belief contains, as a plain member, a node this
        // round's gate has rejected — a verdict the gate renews every round
        // the rejected node's announcements keep failing it — the two group
        // beliefs cannot both be ours: whichever of us is right, a group
        // cannot contain both of us. Nothing positional ever exposes this
        // (the rejected node's relayed entries lose to the local mark), so
        // left alone the two sides believe different groups forever. The
        // sender is rejected once the contradiction has stood three rounds;
        // fewer can be announcement lag, since a mid-merge retraction takes
        // up to two round boundaries to become visible here. Only the
        // round's own verdicts count: a standing mark whose owner the gate
        // is readmitting right now is no rejection at all.
        std::map<NodeId, std::uint32_t> clash;
        for (auto& [sender, l] : contributions) {
            bool contradicted = false;
            for (const NodeId& x : l.plain_ids()) {
                if (x != sender && rejected.count(x)) {
                    contradicted = true;
                    break;
                }
            }
            if (!contradicted) continue;
            auto it = belief_clash_.find(sender);
            const std::uint32_t seen = it == belief_clash_.end() ? 0 : it->second;
            if (seen >= 2) {
                l = marked_singleton(sender, Mark::Double);
            } else {
                clash[sender] = seen + 1;
            }
        }
        belief_clash_ = std::move(clash);

#ifdef GRP_DEBUG_TRACE
        if (const char* t = std::getenv("GRP_TRACE"); t && id_.value == t) {
            auto fmt = [](const AncestorList& l) {
                std::string s = "(";
                for (std::size_t i = 0; i < l.length(); ++i) {
                    if (i) s += ",";
                    s += "{";
                    bool first = true;
                    for (const auto& [x, m] : l.at(i)) {
                        if (!first) s += ",";
                        first = false;
                        s += x.value;
                        if (m == Mark::Single) s += "!";
                        if (m == Mark::Double) s += "!!";
                    }
                    s += "}";
                }
                return s + ")";
            };
            std::cerr << "[trace " << id_.value << "] own=" << fmt(list_);
            for (const auto& [sender, msg] : msg_set_)
                std::cerr << " raw[" << sender.value << "]=" << fmt(msg.list)
                          << " contrib=" << fmt(contributions.at(sender));
            std::cerr << " fold=" << fmt(fold(contributions)) << "\n";
        }
#endif
        // -- fold -----------------------------------------------------------
        AncestorList fresh = fold(contributions);

        // -- conflict -------------------------------------------------------
        // Good lists have at most dmax+1 sets, so a fold reaches dmax+2 sets
        // at most; entries at position dmax+1 are one hop too far.
        if (fresh.length() == cfg_.dmax + 2) {
            fresh = resolve_conflict(std::move(fresh), contributions);
        } else {
            conflict_streak_.clear();
        }

        // A fold can leave an empty distance ring with entries beyond it,
        // when a relay's stale deep positions survive a round in which the
        // near evidence did not. Entries past such a gap contradict the
        // position reading — a neighbour chain cannot skip a distance — and
        // a list with a hole is not announceable anyway, so keep the
        // consistent prefix and let the rest be re-evidenced.
        for (std::size_t i = 0; i < fresh.length(); ++i) {
            if (!fresh.at(i).empty()) continue;
            AncestorList cut;
            for (std::size_t k = 0; k < i; ++k) cut.push_back(fresh.at(k));
            fresh = std::move(cut);
            break;
        }

        // -- quarantine -----------------------------------------------------
        // Countdown per unmarked foreign entry. A node newly unmarked starts
        // at dmax; a node that stays unmarked counts down once per round; a
        // node that left (or got marked again) is forgotten, so a later
        // reappearance starts over.
        const std::set<NodeId> now_plain = fresh.plain_ids();
        const std::set<NodeId> was_plain = list_.plain_ids();
        std::map<NodeId, std::uint32_t> q;
        for (const NodeId& x : now_plain) {
            if (x == id_) continue;
            if (!was_plain.count(x)) {
                if (cfg_.dmax > 0) q[x] = static_cast<std::uint32_t>(cfg_.dmax);
            } else {
                auto it = quarantine_.find(x);
                if (it != quarantine_.end() && it->second > 1) q[x] = it->second - 1;
            }
        }
        quarantine_ = std::move(q);

        // -- view and priority clock ----------------------------------------
        view_.clear();
        for (const NodeId& x : now_plain) {
            if (x == id_ || !quarantine_.count(x)) view_.insert(x);
        }
        view_.insert(id_);
        if (view_.size() == 1) oldness_[id_] += 1;

        list_ = std::move(fresh);
        prune_oldness();
        msg_set_.clear();
    }

private:
    AncestorList sanitize(const AncestorList& in) const {
        AncestorList out;
        for (const auto& s : in) {
            EntrySet kept;
            for (const auto& [x, m] : s) {
                if (m == Mark::Plain || x == id_) kept.insert(x, m);
            }
            out.push_back(std::move(kept));
        }
        out.drop_trailing_empty();
        return out;
    }

    static AncestorList marked_singleton(const NodeId& x, Mark m) {
        AncestorList l;
        EntrySet s;
        s.insert(x, m);
        l.push_back(std::move(s));
        return l;
    }

    bool is_plain_listed(const NodeId& x) const {
        auto pos = list_.find(x);
        return pos && pos->second == Mark::Plain;
    }

    AncestorList fold(const std::map<NodeId, AncestorList>& contributions) const {
        AncestorList acc = AncestorList::singleton(id_);
        for (const auto& [sender, l] : contributions) acc = ant(acc, l);
        return acc;
    }

    /// A list read as distance claims about its owner: a plain entry at
    /// position i claims "within i of the owner", a marked entry claims
    /// adjacency only (marks are one-hop annotations, their depth says
    /// nothing beyond the edge they ride on).
    static std::map<NodeId, std::size_t> position_claims(const AncestorList& l) {
        std::map<NodeId, std::size_t> claims;
        for (std::size_t i = 0; i < l.length(); ++i) {
            for (const auto& [x, m] : l.at(i)) {
                if (m != Mark::Plain && i > 1) continue;
                auto it = claims.find(x);
                if (it == claims.end() || it->second > i) claims[x] = i;
            }
        }
        return claims;
    }

    /// One believer's list read as evidence: its distance claims, and the
    /// membership it commits to (its plain entries).
    struct Source {
        std::map<NodeId, std::size_t> claims;
        std::set<NodeId> plains;
    };

    /// The round's evidence: our own standing list first, then every stored
    /// announcement, each as claims about its own believer.
    std::vector<Source> gather_sources() const {
        std::vector<Source> sources;
        sources.push_back({position_claims(list_), list_.plain_ids()});
        for (const auto& [sender, msg] : msg_set_)
            sources.push_back({position_claims(msg.list), msg.list.plain_ids()});
        return sources;
    }

    /// Best demonstrated distance from us to each node: our own claims, or
    /// an announcer's claim plus the hop the announcement arrived on.
    static std::map<NodeId, std::size_t> reach_with_hop(
        const std::vector<Source>& sources) {
        std::map<NodeId, std::size_t> reach = sources.front().claims;
        for (std::size_t k = 1; k < sources.size(); ++k) {
            for (const auto& [x, d] : sources[k].claims) {
                auto it = reach.find(x);
                if (it == reach.end() || it->second > d + 1) reach[x] = d + 1;
            }
        }
        return reach;
    }

    /// Whether the evidence bounds the pair inside the diameter: a believer
    /// that commits to both, the two legs through us, or both positions
    /// inside one announced list.
    bool pair_proven(const NodeId& a, const NodeId& b,
                     const std::vector<Source>& sources,
                     const std::map<NodeId, std::size_t>& reach) const {
        for (const Source& s : sources) {
            if (s.plains.count(a) && s.plains.count(b)) return true;
        }
        auto ra = reach.find(a);
        auto rb = reach.find(b);
        if (ra != reach.end() && rb != reach.end() &&
            ra->second + rb->second <= cfg_.dmax)
            return true;
        for (const Source& s : sources) {
            auto ia = s.claims.find(a);
            auto ib = s.claims.find(b);
            if (ia != s.claims.end() && ib != s.claims.end() &&
                ia->second + ib->second <= cfg_.dmax)
                return true;
        }
        return false;
    }

    /// Whether the round's evidence proves the trial fold safe: every member
    /// must sit within dmax of us by some claim, and every pair of members
    /// must fit the diameter bound via a demonstrated path. Two bounds are
    /// available per pair: the legs of both members to us (own claims, or a
    /// claim of an adjacent announcer plus the connecting hop), and the two
    /// positions inside one announced list. A pair listed plain together by
    /// one believer — ourselves or any announcer — is that believer's own
    /// commitment and is not retried here: every believer screens its fold
    /// before adopting it, so a co-listing is a pairing that once carried
    /// evidence, and unpicking a committed group is the conflict rule's
    /// charge. Admission answers only for the pairs it newly creates.
    /// The radius test reads claims rather than fold positions: a fold
    /// position is the length of one particular relay route and can run a
    /// hop long while the direct evidence is sitting in the same message
    /// set (a co-arriving newcomer still marked from last round relays its
    /// groupmates deep even though its own announcement puts it next door).
    bool certified_union(const AncestorList& trial) const {
        const std::vector<Source> sources = gather_sources();
        const std::map<NodeId, std::size_t> reach = reach_with_hop(sources);

        std::vector<NodeId> members;
        for (const NodeId& x : trial.plain_ids())
            if (x != id_) members.push_back(x);

        for (const NodeId& x : members) {
            auto rx = reach.find(x);
            if (rx == reach.end() || rx->second > cfg_.dmax) {
#ifdef GRP_DEBUG_TRACE
                if (const char* t = std::getenv("GRP_TRACE"); t && id_.value == t)
                    std::cerr << "[cert " << id_.value << "] radius fail "
                              << x.value << "\n";
#endif
                return false;
            }
        }

        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                if (pair_proven(members[a], members[b], sources, reach))
                    continue;
#ifdef GRP_DEBUG_TRACE
                if (const char* t = std::getenv("GRP_TRACE"); t && id_.value == t)
                    std::cerr << "[cert " << id_.value << "] pair fail "
                              << members[a].value << "," << members[b].value
                              << "\n";
#endif
                return false;
            }
        }
        return true;
    }

    /// Remove hearsay pairings from a fold before adopting it. Entries that
    /// arrive through different senders get united by the fold without any
    /// believer having committed to the pair, and admission never examines
    /// them — it gates senders, and these ride along inside contributions
    /// that were accepted on their own merits. When no evidence bounds such
    /// a new pairing, the endpoint with the weaker standing is left out of
    /// this round's list; the relay brings it back next round, where it is
    /// screened against fresh evidence. Without this, two believers can
    /// confirm an impossible pair to each other forever, each re-relaying
    /// the half the other lacks.
    AncestorList screen_new_pairs(AncestorList fresh) const {
        std::vector<NodeId> members;
        for (const NodeId& x : fresh.plain_ids())
            if (x != id_) members.push_back(x);
        if (members.size() < 2) return fresh;

        const std::vector<Source> sources = gather_sources();
        const std::map<NodeId, std::size_t> reach = reach_with_hop(sources);
        const std::set<NodeId> standing = list_.plain_ids();

        std::set<NodeId> dropped;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                if (dropped.count(members[a]) || dropped.count(members[b]))
                    continue;
                if (pair_proven(members[a], members[b], sources, reach))
                    continue;
                const bool a_standing = standing.count(members[a]) != 0;
                const bool b_standing = standing.count(members[b]) != 0;
                const NodeId* victim = nullptr;
                if (a_standing != b_standing) {
                    victim = a_standing ? &members[b] : &members[a];
                } else {
                    constexpr auto inf = std::numeric_limits<std::size_t>::max();
                    auto it = reach.find(members[a]);
                    const std::size_t ra = it == reach.end() ? inf : it->second;
                    it = reach.find(members[b]);
                    const std::size_t rb = it == reach.end() ? inf : it->second;
                    victim = std::tie(rb, members[b]) > std::tie(ra, members[a])
                                 ? &members[b]
                                 : &members[a];
                }
#ifdef GRP_DEBUG_TRACE
                if (const char* t = std::getenv("GRP_TRACE"); t && id_.value == t)
                    std::cerr << "[screen " << id_.value << "] pair "
                              << members[a].value << "," << members[b].value
                              << " drop " << victim->value << "\n";
#endif
                dropped.insert(*victim);
            }
        }
        if (dropped.empty()) return fresh;

        AncestorList out;
        for (std::size_t i = 0; i < fresh.length(); ++i) {
            EntrySet kept;
            for (const auto& [x, m] : fresh.at(i)) {
                if (!dropped.count(x)) kept.insert(x, m);
            }
            out.push_back(std::move(kept));
        }
        out.drop_trailing_empty();
        return out;
    }

    /// Priority of a node as currently known: smaller oldness means older,
    /// and older wins. Nodes we know nothing about read as weakest, so a
    /// conflict against them resolves by plain truncation instead of
    /// evicting the neighbours that named them.
    Priority priority_of(const NodeId& x) const {
        if (x == id_) return Priority{own_oldness(), x};
        auto it = oldness_.find(x);
        return Priority{it == oldness_.end()
                            ? std::numeric_limits<std::uint64_t>::max()
                            : it->second,
                        x};
    }

    /// Clock-gap comparison with a skew band. An absorbed oldness value lags
    /// its true value by up to one round per relay hop, so gaps within
    /// dmax+2 are indistinguishable from relay skew; such contemporaries
    /// order by id, which gossip never distorts. Without the band, two
    /// same-age lone nodes racing into a group from opposite ends each read
    /// the other as older (their own clock is fresh, the other's relayed)
    /// and both back out, forever.
    bool far_has_priority(const Priority& far, const Priority& mine) const {
        const auto band = static_cast<std::uint64_t>(cfg_.dmax) + 2;
        const auto bump = [](std::uint64_t o, std::uint64_t b) {
            return o > std::numeric_limits<std::uint64_t>::max() - b
                       ? std::numeric_limits<std::uint64_t>::max()
                       : o + b;
        };
        if (bump(far.oldness, band) < mine.oldness) return true;
        if (bump(mine.oldness, band) < far.oldness) return false;
        return far.tiebreak < mine.tiebreak;
    }

    /// The fold placed someone at position dmax+1: the diameter bound broke
    /// and one side has to yield. The far node and this node are the two
    /// extremes of the over-long pair, and each weighs the same two clocks —
    /// its own against the other's — so they reach opposite conclusions and
    /// exactly one backs off, whether the pair straddles two merging groups
    /// or sits inside one group whose believed shape was never real. (Any
    /// group-level strength folded into the comparison breaks that symmetry:
    /// two extremes of one believed group would each claim the same senior
    /// members and both stand forever.) When the far node is stronger
    /// (banded comparison, see far_has_priority) and has stood two full
    /// rounds we drop the whole branch that carried it: every contribution
    /// showing it at position dmax becomes a rejection mark. The first two rounds are
    /// free regardless of rank: an appearance at dmax+1 is routinely a
    /// routing artifact — a merge in progress one hop away, a retraction
    /// still in flight, a mark not yet matured into the plain entry that
    /// would shorten the route — and an announcement can lag a state change
    /// across one full round boundary, so even the second conflicted round
    /// may be reading evidence the carrier has since withdrawn. The third
    /// round cannot be; only then is the fight real. Far nodes that are not
    /// stronger simply fall off when the refolded list is truncated back to
    /// dmax+1 sets, for as long as they keep arriving. Standing still is
    /// deliberately all the stronger side ever does: a width violation is
    /// visible exactly at the two extremes of the over-long pair, the
    /// comparison each extreme makes orders the same two parties the same
    /// way, and so the junior extreme — wherever it is — sheds its carrier
    /// and the pressure here drains on its own. Cutting our own carrier
    /// instead would amputate the branch that connects us to our group just
    /// because someone beyond it is slow to back off.
    ///
    /// A far entry we ourselves held as a plain member within dmax one round
    /// ago is treated as an echo, not a conflict: announcements in flight lag
    /// a round, so a member can arrive one position too deep over a slow
    /// branch in the very round the short branch happens to miss. Such an
    /// entry is dropped by the truncation without a priority fight; if the
    /// node has really drifted out of range the short-branch evidence is
    /// gone next round and the conflict proceeds.
    AncestorList resolve_conflict(AncestorList fresh,
                                  std::map<NodeId, AncestorList>& contributions) {
        const std::size_t far_pos = cfg_.dmax + 1;
        std::map<NodeId, std::uint32_t> streak;
        bool evicted = false;
        for (const auto& [w, m] : fresh.at(far_pos)) {
            auto prev = list_.find(w);
            if (prev && prev->first <= cfg_.dmax && prev->second == Mark::Plain)
                continue;
            const Priority mine = priority_of(id_);
            auto it = conflict_streak_.find(w);
            const std::uint32_t seen = it == conflict_streak_.end() ? 0 : it->second;
            const bool yields = far_has_priority(priority_of(w), mine) && seen >= 2;
            if (!yields) {
                streak[w] = seen < 2 ? seen + 1 : seen;
                continue;
            }
            for (auto& [sender, l] : contributions) {
                auto pos = l.find(w);
                if (pos && pos->first == cfg_.dmax) {
                    l = marked_singleton(sender, Mark::Double);
                    evicted = true;
                }
            }
        }
        conflict_streak_ = std::move(streak);
        if (evicted) fresh = screen_new_pairs(fold(contributions));

        if (fresh.length() > cfg_.dmax + 1) {
            AncestorList cut;
            for (std::size_t i = 0; i <= cfg_.dmax; ++i) cut.push_back(fresh.at(i));
            cut.drop_trailing_empty();
            fresh = std::move(cut);
        }
        return fresh;
    }

    void absorb_oldness(const std::map<NodeId, std::uint64_t>& table) {
        for (const auto& [x, o] : table) {
            if (x == id_) continue; // own clock is authoritative
            auto it = oldness_.find(x);
            if (it == oldness_.end() || it->second < o) oldness_[x] = o;
        }
    }

    /// Keep the table bounded: only nodes we still list (plus ourself).
    void prune_oldness() {
        const std::set<NodeId> keep = list_.all_ids();
        for (auto it = oldness_.begin(); it != oldness_.end();) {
            if (it->first != id_ && !keep.count(it->first)) it = oldness_.erase(it);
            else ++it;
        }
    }

    NodeId id_;
    ProtocolConfig cfg_;
    AncestorList list_;
    std::set<NodeId> view_;
    std::map<NodeId, std::uint32_t> quarantine_;
    std::map<NodeId, std::uint64_t> oldness_;
    std::map<NodeId, GrpMessage> msg_set_;
    // Consecutive rounds each far node has stood at position dmax+1; the
    // first two rounds are grace for announcement lag.
    std::map<NodeId, std::uint32_t> conflict_streak_;
    // Consecutive rounds each sender's announced membership has contained a
    // node this node holds rejected; same grace.
    std::map<NodeId, std::uint32_t> belief_clash_;
};

} // namespace grp

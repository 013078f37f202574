#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grp/ids.hpp"
#include "grp/sim.hpp"

namespace grp {

/// Distances are small integers; this stands for "unreachable or undefined".
inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// The group a node believes in, made self-consistent: a node's view counts
/// as its group only when the node is inside it and every listed member is
/// present, active and has the identical view. Otherwise the node is its own
/// group. Defined for active nodes.
inline std::map<NodeId, std::set<NodeId>> derive_groups(const Snapshot& s) {
    std::map<NodeId, std::set<NodeId>> omega;
    for (const auto& [id, ns] : s.nodes) {
        if (!ns.active) continue;
        bool consistent = ns.view.count(id) != 0;
        if (consistent) {
            for (const NodeId& u : ns.view) {
                auto it = s.nodes.find(u);
                if (it == s.nodes.end() || !it->second.active || it->second.view != ns.view) {
                    consistent = false;
                    break;
                }
            }
        }
        omega[id] = consistent ? ns.view : std::set<NodeId>{id};
    }
    return omega;
}

namespace detail {

/// Adjacency over the snapshot's symmetric links between active nodes.
inline std::map<NodeId, std::vector<NodeId>> sym_adjacency(const Snapshot& s) {
    std::map<NodeId, std::vector<NodeId>> adj;
    for (const auto& [a, b] : s.symmetric_edges()) {
        auto ia = s.nodes.find(a), ib = s.nodes.find(b);
        if (ia == s.nodes.end() || ib == s.nodes.end()) continue;
        if (!ia->second.active || !ib->second.active) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

/// Longest shortest path between members, walking only through members.
/// Returns kUnreachable when a member is missing/inactive or the induced
/// subgraph is disconnected.
inline std::size_t induced_diameter(const Snapshot& s,
                                    const std::map<NodeId, std::vector<NodeId>>& adj,
                                    const std::set<NodeId>& members) {
    for (const NodeId& m : members) {
        auto it = s.nodes.find(m);
        if (it == s.nodes.end() || !it->second.active) return kUnreachable;
    }
    std::size_t diameter = 0;
    for (const NodeId& src : members) {
        std::map<NodeId, std::size_t> dist;
        dist[src] = 0;
        std::deque<NodeId> queue{src};
        while (!queue.empty()) {
            NodeId cur = queue.front();
            queue.pop_front();
            auto it = adj.find(cur);
            if (it == adj.end()) continue;
            for (const NodeId& nxt : it->second) {
                if (!members.count(nxt) || dist.count(nxt)) continue;
                dist[nxt] = dist[cur] + 1;
                queue.push_back(nxt);
            }
        }
        if (dist.size() != members.size()) return kUnreachable;
        for (const auto& [id, d] : dist) diameter = std::max(diameter, d);
    }
    return diameter;
}

} // namespace detail

/// Evaluation of one snapshot (and, where applicable, of the step from the
/// previous one).
struct SnapshotEval {
    Tick time = 0;
    bool agreement = false;
    bool safety = false;
    bool maximality = false;
    std::optional<bool> transition;  // every view believed at k-1 fits k's graph
    std::optional<bool> continuity;  // no node shed a believed member
    std::size_t nee = 0;             // symmetric edges across distinct groups
    std::size_t ndg = 0;             // distinct groups among active nodes

    bool legitimate() const { return agreement && safety && maximality; }
};

struct Verdict {
    std::size_t dmax = 0;
    std::vector<SnapshotEval> evals;
    std::optional<std::size_t> attractor;        // first index of the final legitimate run
    std::optional<std::size_t> continuity_violation; // some node: fits ∧ shed anyway
    std::optional<std::size_t> discontinuity;        // some node: ¬fits ∧ shed
    bool metrics_ok = false; // defined when the attractor exists
};

/// Runs every predicate over a trace. Quantification is over active nodes;
/// a node that disappears or goes inactive between two snapshots falsifies
/// both the transition and the continuity of that step.
///
/// Transition asks whether each agreed group of the previous snapshot still
/// fits the diameter bound in the next graph. Continuity asks whether each
/// agreed group survives inside its believer's next view. Judging the kept
/// side on the raw view rather than the next agreed group matters: when
/// members of a growing group complete quarantine one round apart, the
/// agreed-group map momentarily collapses to singletons even though nobody
/// lost anything; a view only shrinks when a member is really dropped.
/// Conversely a node whose agreed group is already collapsed (mid-merge or
/// mid-repair) can shed freely: the service never promised that group. The
/// pair (fits, kept) is judged per node, so one node's justified loss cannot
/// excuse another's unjustified one in the same step.
inline Verdict evaluate_trace(const std::vector<Snapshot>& snaps, std::size_t dmax) {
    Verdict v;
    v.dmax = dmax;
    std::map<NodeId, std::set<NodeId>> prev_omega;

    for (std::size_t k = 0; k < snaps.size(); ++k) {
        const Snapshot& s = snaps[k];
        const auto adj = detail::sym_adjacency(s);
        const auto omega = derive_groups(s);

        SnapshotEval ev;
        ev.time = s.time;

        // Agreement: the raw views of active nodes form a partition.
        ev.agreement = true;
        for (const auto& [id, ns] : s.nodes) {
            if (!ns.active) continue;
            if (!ns.view.count(id)) { ev.agreement = false; break; }
            for (const NodeId& u : ns.view) {
                auto it = s.nodes.find(u);
                if (it == s.nodes.end() || !it->second.active || it->second.view != ns.view) {
                    ev.agreement = false;
                    break;
                }
            }
            if (!ev.agreement) break;
        }

        // Distinct groups, each counted once.
        std::set<std::set<NodeId>> groups;
        for (const auto& [id, g] : omega) groups.insert(g);
        ev.ndg = groups.size();

        ev.safety = true;
        for (const auto& g : groups) {
            if (detail::induced_diameter(s, adj, g) > dmax) { ev.safety = false; break; }
        }

        ev.maximality = true;
        for (auto it1 = groups.begin(); it1 != groups.end() && ev.maximality; ++it1) {
            for (auto it2 = std::next(it1); it2 != groups.end(); ++it2) {
                std::set<NodeId> united = *it1;
                united.insert(it2->begin(), it2->end());
                if (detail::induced_diameter(s, adj, united) <= dmax) {
                    ev.maximality = false;
                    break;
                }
            }
        }

        for (const auto& [a, b] : s.symmetric_edges()) {
            auto oa = omega.find(a), ob = omega.find(b);
            if (oa == omega.end() || ob == omega.end()) continue; // inactive endpoint
            if (oa->second != ob->second) ++ev.nee;
        }

        if (k > 0) {
            bool trans = true;
            bool cont = true;
            bool violated = false;
            bool forced = false;
            for (const auto& [id, agreed] : prev_omega) {
                auto it = s.nodes.find(id);
                const bool alive = it != s.nodes.end() && it->second.active;
                const bool fits =
                    alive && detail::induced_diameter(s, adj, agreed) <= dmax;
                const bool kept =
                    alive && std::includes(it->second.view.begin(),
                                           it->second.view.end(), agreed.begin(),
                                           agreed.end());
                trans = trans && fits;
                cont = cont && kept;
                if (fits && !kept) violated = true;
                if (!fits && !kept) forced = true;
            }
            ev.transition = trans;
            ev.continuity = cont;
            if (violated && !v.continuity_violation) v.continuity_violation = k;
            if (forced && !v.discontinuity) v.discontinuity = k;
        }

        v.evals.push_back(ev);
        prev_omega = omega;
    }

    // Attractor: start of the maximal all-legitimate suffix.
    if (!v.evals.empty() && v.evals.back().legitimate()) {
        std::size_t k = v.evals.size();
        while (k > 0 && v.evals[k - 1].legitimate()) --k;
        v.attractor = k;
    }

    // After the attractor both metrics may only fall, and an edge between
    // two groups can only vanish because groups vanished.
    if (v.attractor) {
        v.metrics_ok = true;
        for (std::size_t k = *v.attractor + 1; k < v.evals.size(); ++k) {
            const auto& prev = v.evals[k - 1];
            const auto& cur = v.evals[k];
            if (cur.nee > prev.nee || cur.ndg > prev.ndg) { v.metrics_ok = false; break; }
            if (cur.nee < prev.nee && !(cur.ndg < prev.ndg)) { v.metrics_ok = false; break; }
        }
    }
    return v;
}

/// The named checks selectable on the command line.
enum class CheckKind { Agreement, Safety, Maximality, Attractor, Continuity, Metrics };

inline const char* to_string(CheckKind c) {
    switch (c) {
    case CheckKind::Agreement: return "agreement";
    case CheckKind::Safety: return "safety";
    case CheckKind::Maximality: return "maximality";
    case CheckKind::Attractor: return "attractor";
    case CheckKind::Continuity: return "continuity";
    default: return "metrics";
    }
}

inline std::optional<CheckKind> parse_check(const std::string& s) {
    if (s == "agreement") return CheckKind::Agreement;
    if (s == "safety") return CheckKind::Safety;
    if (s == "maximality") return CheckKind::Maximality;
    if (s == "attractor") return CheckKind::Attractor;
    if (s == "continuity") return CheckKind::Continuity;
    if (s == "metrics") return CheckKind::Metrics;
    return std::nullopt;
}

inline std::vector<CheckKind> all_checks() {
    return {CheckKind::Agreement, CheckKind::Safety,   CheckKind::Maximality,
            CheckKind::Attractor, CheckKind::Continuity, CheckKind::Metrics};
}

/// Point predicates (agreement/safety/maximality) are judged on the final
/// snapshot; attractor, continuity and metrics are judged on the whole trace.
inline bool check_passes(const Verdict& v, CheckKind c) {
    if (v.evals.empty()) return false;
    const SnapshotEval& last = v.evals.back();
    switch (c) {
    case CheckKind::Agreement: return last.agreement;
    case CheckKind::Safety: return last.safety;
    case CheckKind::Maximality: return last.maximality;
    case CheckKind::Attractor: return v.attractor.has_value();
    case CheckKind::Continuity: return !v.continuity_violation.has_value();
    case CheckKind::Metrics: return v.attractor.has_value() && v.metrics_ok;
    }
    return false;
}

inline bool all_pass(const Verdict& v, const std::vector<CheckKind>& checks) {
    return std::all_of(checks.begin(), checks.end(),
                       [&](CheckKind c) { return check_passes(v, c); });
}

inline std::string render_verdict(const Verdict& v, const std::vector<CheckKind>& checks) {
    std::ostringstream os;
    os << "VERDICT dmax=" << v.dmax << " snapshots=" << v.evals.size() << '\n';
    auto flag = [](const std::optional<bool>& b) {
        return !b.has_value() ? "-" : (*b ? "1" : "0");
    };
    for (std::size_t k = 0; k < v.evals.size(); ++k) {
        const auto& e = v.evals[k];
        os << "K " << k << " t=" << e.time << " A=" << (e.agreement ? 1 : 0)
           << " S=" << (e.safety ? 1 : 0) << " M=" << (e.maximality ? 1 : 0)
           << " T=" << flag(e.transition) << " C=" << flag(e.continuity)
           << " legit=" << (e.legitimate() ? 1 : 0) << " nee=" << e.nee
           << " ndg=" << e.ndg << '\n';
    }
    os << "ATTRACTOR ";
    if (v.attractor) os << *v.attractor;
    else os << "none";
    os << '\n';
    os << "CONTINUITY ";
    if (v.continuity_violation) os << "violated k=" << *v.continuity_violation;
    else os << "ok";
    os << '\n';
    os << "DISCONTINUITY ";
    if (v.discontinuity) os << "k=" << *v.discontinuity;
    else os << "none";
    os << '\n';
    bool pass = true;
    for (CheckKind c : checks) {
        const bool ok = check_passes(v, c);
        pass = pass && ok;
        os << "CHECK " << to_string(c) << ' ' << (ok ? "pass" : "fail") << '\n';
    }
    os << "RESULT " << (pass ? "pass" : "fail") << '\n';
    return os.str();
}

} // namespace grp

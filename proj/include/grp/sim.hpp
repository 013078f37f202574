#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "grp/ancestor_list.hpp"
#include "grp/ids.hpp"
#include "grp/log.hpp"
#include "grp/protocol.hpp"
#include "grp/rng.hpp"
#include "grp/scenario.hpp"

namespace grp {

/// Frozen image of one node at snapshot time.
struct NodeSnap {
    bool active = true;
    AncestorList list;
    std::set<NodeId> view;
    std::map<NodeId, std::uint32_t> quarantine;
    std::map<NodeId, std::uint64_t> oldness;
};

/// Frozen image of the whole configuration at the end of one tick.
struct Snapshot {
    Tick time = 0;
    std::map<NodeId, NodeSnap> nodes;          // every present node
    std::set<std::pair<NodeId, NodeId>> edges; // directed: (from, to)

    bool has_edge(const NodeId& a, const NodeId& b) const {
        return edges.count({a, b}) != 0;
    }

    /// Undirected pairs {u, v} (u < v) connected in both directions.
    std::set<std::pair<NodeId, NodeId>> symmetric_edges() const {
        std::set<std::pair<NodeId, NodeId>> out;
        for (const auto& [a, b] : edges) {
            if (a < b && edges.count({b, a})) out.emplace(a, b);
        }
        return out;
    }
};

struct SimOptions {
    bool lockstep = false; // align all timers to the global period grid
    CompatVariant variant = CompatVariant::Sound;
    std::optional<std::uint64_t> seed = std::nullopt; // override scenario seed
    std::optional<std::size_t> dmax = std::nullopt;   // override scenario dmax
};

/// Discrete-event execution of one scenario. Time advances in integer ticks;
/// a message sent at t is deliverable at t+1; each directed link holds at
/// most one message in flight (a newer send overwrites it). Per tick the
/// order is: scheduled topology changes, deliveries, computes, sends,
/// snapshot.
class SimEngine {
public:
    using Options = SimOptions;

    explicit SimEngine(Scenario sc, Options opt = {})
        : sc_(std::move(sc)),
          opt_(opt),
          rng_(opt.seed.value_or(sc_.seed)) {
        sc_.validate();
        if (opt_.dmax) sc_.dmax = *opt_.dmax;
        pcfg_.dmax = sc_.dmax;
        pcfg_.variant = opt_.variant;
        for (const auto& n : sc_.nodes) {
            NodeId id(n.id);
            Runtime rt;
            rt.state = NodeState(id, pcfg_);
            rt.active = n.active;
            seed_timers(rt, 0);
            nodes_.emplace(id, std::move(rt));
        }
        for (const auto& e : sc_.edges) add_edge(NodeId(e.a), NodeId(e.b), e.directed);
        for (const auto& n : sc_.nodes) {
            if (!n.corrupt.empty()) corrupt_node(NodeId(n.id), n.corrupt);
        }
    }

    /// Runs to the horizon and returns the collected snapshots.
    const std::vector<Snapshot>& run() {
        std::size_t next_op = 0;
        for (Tick t = 0; t <= sc_.horizon; ++t) {
            bool topo_changed = false;
            while (next_op < sc_.schedule.size() && sc_.schedule[next_op].time == t) {
                apply(sc_.schedule[next_op], t);
                topo_changed = true;
                ++next_op;
            }
            const bool computed = deliver_and_compute(t);
            send(t);
            if (want_snapshot(t, topo_changed, computed)) take_snapshot(t);
        }
        return snapshots_;
    }

    const std::vector<Snapshot>& snapshots() const { return snapshots_; }

    /// Effective parameters after command-line overrides.
    std::size_t dmax() const { return sc_.dmax; }
    const Scenario& scenario() const { return sc_; }

private:
    struct Runtime {
        NodeState state;
        bool active = true;
        Tick next_send = 0;
        Tick next_compute = 0;
    };

    using Link = std::pair<NodeId, NodeId>; // (from, to)

    struct Flight {
        GrpMessage msg;
        Tick at = 0;
    };

    void seed_timers(Runtime& rt, Tick now) {
        if (opt_.lockstep) {
            rt.next_send = (now / sc_.tau2 + 1) * sc_.tau2;
            rt.next_compute = (now / sc_.tau1 + 1) * sc_.tau1;
        } else {
            rt.next_send = now + 1 + rng_.below(sc_.tau2);
            rt.next_compute = now + 1 + rng_.below(sc_.tau1);
        }
    }

    void add_edge(const NodeId& a, const NodeId& b, bool directed) {
        require_node(a);
        require_node(b);
        edges_.emplace(a, b);
        if (!directed) edges_.emplace(b, a);
    }

    void remove_edge(const NodeId& a, const NodeId& b, bool directed) {
        edges_.erase({a, b});
        flights_.erase({a, b});
        drops_.erase({a, b});
        if (!directed) {
            edges_.erase({b, a});
            flights_.erase({b, a});
            drops_.erase({b, a});
        }
    }

    void require_node(const NodeId& id) const {
        if (!nodes_.count(id))
            throw ValidationError("scenario references unknown node: " + id.value);
    }

    void apply(const ScheduleOp& op, Tick now) {
        switch (op.op) {
        case OpKind::AddNode: {
            NodeId id(op.node);
            if (nodes_.count(id))
                throw ValidationError("add_node for existing node: " + op.node);
            Runtime rt;
            rt.state = NodeState(id, pcfg_);
            seed_timers(rt, now);
            nodes_.emplace(id, std::move(rt));
            break;
        }
        case OpKind::RemoveNode: {
            NodeId id(op.node);
            require_node(id);
            nodes_.erase(id);
            for (auto it = edges_.begin(); it != edges_.end();) {
                if (it->first == id || it->second == id) it = edges_.erase(it);
                else ++it;
            }
            prune_links(id);
            break;
        }
        case OpKind::AddEdge:
            add_edge(NodeId(op.a), NodeId(op.b), op.directed);
            break;
        case OpKind::RemoveEdge:
            remove_edge(NodeId(op.a), NodeId(op.b), op.directed);
            break;
        case OpKind::Activate: {
            NodeId id(op.node);
            require_node(id);
            Runtime& rt = nodes_.at(id);
            if (!rt.active) {
                rt.active = true;
                seed_timers(rt, now);
            }
            break;
        }
        case OpKind::Deactivate: {
            NodeId id(op.node);
            require_node(id);
            nodes_.at(id).active = false;
            prune_links(id);
            break;
        }
        }
        log_line(LogLevel::Debug,
                 "t=" + std::to_string(now) + " applied " + std::string(to_string(op.op)));
    }

    void prune_links(const NodeId& id) {
        for (auto it = flights_.begin(); it != flights_.end();) {
            if (it->first.first == id || it->first.second == id) it = flights_.erase(it);
            else ++it;
        }
        for (auto it = drops_.begin(); it != drops_.end();) {
            if (it->first.first == id || it->first.second == id) it = drops_.erase(it);
            else ++it;
        }
    }

    bool deliver_and_compute(Tick t) {
        for (auto it = flights_.begin(); it != flights_.end();) {
            if (it->second.at != t) {
                ++it;
                continue;
            }
            auto rx = nodes_.find(it->first.second);
            if (rx != nodes_.end() && rx->second.active)
                rx->second.state.receive(it->second.msg);
            it = flights_.erase(it);
        }
        bool computed = false;
        for (auto& [id, rt] : nodes_) {
            if (!rt.active || rt.next_compute != t) continue;
            rt.state.compute();
            rt.next_compute = t + sc_.tau1;
            computed = true;
            if (log_level() >= LogLevel::Debug)
                log_line(LogLevel::Debug, "t=" + std::to_string(t) + " " + id.value +
                                              " computed " + to_string(rt.state.list()));
        }
        return computed;
    }

    void send(Tick t) {
        for (auto& [id, rt] : nodes_) {
            if (!rt.active || rt.next_send != t) continue;
            rt.next_send = t + sc_.tau2;
            const GrpMessage msg = rt.state.announcement();
            // Outgoing links in receiver order; one loss decision per link.
            auto it = edges_.lower_bound({id, NodeId{}});
            for (; it != edges_.end() && it->first == id; ++it) {
                const NodeId& to = it->second;
                auto rx = nodes_.find(to);
                if (rx == nodes_.end() || !rx->second.active) continue;
                if (drop_on(*it)) continue;
                flights_[*it] = Flight{msg, t + 1};
            }
        }
    }

    /// Loss decision for one send on one directed link. The bounded model
    /// never drops more than `bound` sends in a row per link.
    bool drop_on(const Link& link) {
        if (sc_.loss.kind == LossModel::Kind::None) return false;
        std::uint32_t& run = drops_[link];
        if (run >= sc_.loss.bound) {
            run = 0;
            return false;
        }
        if (rng_.coin()) {
            ++run;
            return true;
        }
        run = 0;
        return false;
    }

    bool want_snapshot(Tick t, bool topo_changed, bool computed) const {
        if (t == 0 || t == sc_.horizon) return true;
        switch (sc_.snapshots.kind) {
        case SnapshotPolicy::Kind::EveryEvent: return topo_changed || computed;
        case SnapshotPolicy::Kind::EveryCompute: return computed;
        case SnapshotPolicy::Kind::Period: return t % sc_.snapshots.period == 0;
        }
        return false;
    }

    void take_snapshot(Tick t) {
        Snapshot s;
        s.time = t;
        s.edges = edges_;
        for (const auto& [id, rt] : nodes_) {
            NodeSnap ns;
            ns.active = rt.active;
            ns.list = rt.state.list();
            ns.view = rt.state.view();
            ns.quarantine = rt.state.quarantine();
            ns.oldness = rt.state.oldness();
            s.nodes.emplace(id, std::move(ns));
        }
        snapshots_.push_back(std::move(s));
    }

    // -- corrupted starts ---------------------------------------------------

    /// Fresh identifiers that collide with nothing in the scenario.
    NodeId make_ghost(std::size_t k) const {
        std::string name = "g" + std::to_string(k);
        while (true) {
            bool clash = false;
            for (const auto& n : sc_.nodes) {
                if (n.id == name) { clash = true; break; }
            }
            if (!clash) return NodeId(name);
            name += "x";
        }
    }

    void corrupt_node(const NodeId& id, const std::vector<CorruptKind>& kinds) {
        Runtime& rt = nodes_.at(id);
        AncestorList list = rt.state.list();
        auto view = rt.state.view();
        auto quarantine = rt.state.quarantine();
        auto oldness = rt.state.oldness();

        auto pad_with_ghosts = [&](std::size_t target_len) {
            std::size_t g = 1;
            while (list.length() < target_len) {
                EntrySet s;
                s.insert(make_ghost(g++), Mark::Plain);
                list.push_back(std::move(s));
            }
        };

        for (CorruptKind kind : kinds) {
            switch (kind) {
            case CorruptKind::GhostNodes: {
                const std::size_t count = 1 + rng_.below(2);
                for (std::size_t i = 0; i < count; ++i) {
                    const NodeId ghost = make_ghost(1 + rng_.below(3));
                    const std::size_t pos = 1 + rng_.below(sc_.dmax);
                    pad_with_ghosts(pos + 1);
                    list.at(pos).insert(ghost, Mark::Plain);
                    if (rng_.coin())
                        quarantine[ghost] = static_cast<std::uint32_t>(rng_.below(sc_.dmax + 1));
                }
                // Cite the real neighbours at position 1 so the fabricated
                // list passes their goodList test: the phantoms then spread
                // before dying instead of being flushed on first contact.
                // Ghosts get no oldness entry: nobody can vouch for a node
                // that does not exist, so their priority reads as weakest.
                for (const auto& e : sc_.edges) {
                    if (e.a == id.value) list.at(1).insert(NodeId(e.b), Mark::Plain);
                    if (e.b == id.value && !e.directed)
                        list.at(1).insert(NodeId(e.a), Mark::Plain);
                }
                break;
            }
            case CorruptKind::OversizedList:
                pad_with_ghosts(sc_.dmax + 2 + rng_.below(2));
                break;
            case CorruptKind::WrongView: {
                view.clear();
                view.insert(id);
                for (const auto& n : sc_.nodes) {
                    if (n.id != id.value && rng_.coin()) view.insert(NodeId(n.id));
                }
                // Always cite a nonexistent node too: a fabricated view must
                // not accidentally agree with a real neighbour's, which would
                // read as a protocol-made group dissolving for no reason.
                view.insert(make_ghost(7));
                break;
            }
            case CorruptKind::ScrambledQuarantine: {
                for (const NodeId& x : list.all_ids()) {
                    if (x != id && rng_.coin())
                        quarantine[x] = static_cast<std::uint32_t>(rng_.below(sc_.dmax + 3));
                }
                for (const auto& n : sc_.nodes) {
                    if (n.id != id.value && rng_.below(4) == 0)
                        quarantine[NodeId(n.id)] =
                            static_cast<std::uint32_t>(1 + rng_.below(sc_.dmax + 2));
                }
                break;
            }
            }
        }
        rt.state.set_list(std::move(list));
        rt.state.set_view(std::move(view));
        rt.state.set_quarantine(std::move(quarantine));
        rt.state.set_oldness(std::move(oldness));
    }

    Scenario sc_;
    Options opt_;
    ProtocolConfig pcfg_;
    Rng rng_;
    std::map<NodeId, Runtime> nodes_;
    std::set<Link> edges_;
    std::map<Link, Flight> flights_;
    std::map<Link, std::uint32_t> drops_;
    std::vector<Snapshot> snapshots_;
};

// ---------------------------------------------------------------------------
// Trace rendering
// ---------------------------------------------------------------------------

namespace detail {

template <typename Map>
std::string render_id_map(const Map& m) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [id, v] : m) {
        if (!first) os << ',';
        first = false;
        os << id.value << ':' << v;
    }
    os << '}';
    return os.str();
}

inline std::string render_id_set(const std::set<NodeId>& s) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const NodeId& id : s) {
        if (!first) os << ',';
        first = false;
        os << id.value;
    }
    os << '}';
    return os.str();
}

} // namespace detail

/// One line per snapshot: time, edges, then each present node's full state.
/// Symmetric links render as "a-b", one-way links as "a>b".
inline std::string render_snapshot(const Snapshot& s) {
    std::ostringstream os;
    os << "T=" << s.time << " E=";
    std::vector<std::string> parts;
    for (const auto& [a, b] : s.edges) {
        if (s.edges.count({b, a})) {
            if (a < b) parts.push_back(a.value + "-" + b.value);
        } else {
            parts.push_back(a.value + ">" + b.value);
        }
    }
    std::sort(parts.begin(), parts.end());
    if (parts.empty()) os << '-';
    for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? "," : "") << parts[i];
    for (const auto& [id, ns] : s.nodes) {
        os << " | " << id.value << ' ' << (ns.active ? "on" : "off") << " L="
           << to_string(ns.list) << " V=" << detail::render_id_set(ns.view)
           << " Q=" << detail::render_id_map(ns.quarantine)
           << " O=" << detail::render_id_map(ns.oldness);
    }
    return os.str();
}

inline std::string render_trace(const std::vector<Snapshot>& snaps) {
    std::ostringstream os;
    for (const auto& s : snaps) os << render_snapshot(s) << '\n';
    return os.str();
}

} // namespace grp

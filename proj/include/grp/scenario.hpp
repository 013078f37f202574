#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "grp/rng.hpp"

namespace grp {

using json = nlohmann::ordered_json;

/// Raised for malformed scenario files and malformed CLI parameter sets.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

using Tick = std::uint64_t;

/// How a node's initial protocol state gets damaged before the run starts.
enum class CorruptKind {
    GhostNodes,          // invent list entries for nodes that do not exist
    OversizedList,       // stretch the list past the legal dmax+1 sets
    WrongView,           // view unrelated to list and quarantine
    ScrambledQuarantine, // arbitrary countdowns, including for unknown nodes
};

inline const char* to_string(CorruptKind k) {
    switch (k) {
    case CorruptKind::GhostNodes: return "ghost_nodes";
    case CorruptKind::OversizedList: return "oversized_list";
    case CorruptKind::WrongView: return "wrong_view";
    default: return "scrambled_quarantine";
    }
}

inline std::optional<CorruptKind> parse_corrupt_kind(const std::string& s) {
    if (s == "ghost_nodes") return CorruptKind::GhostNodes;
    if (s == "oversized_list") return CorruptKind::OversizedList;
    if (s == "wrong_view") return CorruptKind::WrongView;
    if (s == "scrambled_quarantine") return CorruptKind::ScrambledQuarantine;
    return std::nullopt;
}

struct NodeSpec {
    std::string id;
    bool active = true;
    std::vector<CorruptKind> corrupt;
};

struct EdgeSpec {
    std::string a; // from, when directed
    std::string b; // to, when directed
    bool directed = false;
};

enum class OpKind { AddNode, RemoveNode, AddEdge, RemoveEdge, Activate, Deactivate };

inline const char* to_string(OpKind k) {
    switch (k) {
    case OpKind::AddNode: return "add_node";
    case OpKind::RemoveNode: return "remove_node";
    case OpKind::AddEdge: return "add_edge";
    case OpKind::RemoveEdge: return "remove_edge";
    case OpKind::Activate: return "activate";
    default: return "deactivate";
    }
}

struct ScheduleOp {
    Tick time = 0;
    OpKind op = OpKind::AddEdge;
    std::string node; // add_node/remove_node/activate/deactivate
    std::string a, b; // add_edge/remove_edge
    bool directed = false;
};

struct SnapshotPolicy {
    enum class Kind { EveryEvent, EveryCompute, Period } kind = Kind::EveryEvent;
    Tick period = 1;
};

struct LossModel {
    enum class Kind { None, Bounded } kind = Kind::None;
    std::uint32_t bound = 0; // max consecutive losses per directed link
};

/// Complete description of one run: protocol parameters, initial network,
/// scheduled dynamics and observation policy. Mirrors the JSON file format.
struct Scenario {
    std::size_t dmax = 2;
    Tick tau1 = 8; // compute period
    Tick tau2 = 2; // send period
    std::uint64_t seed = 1;
    Tick horizon = 400;
    SnapshotPolicy snapshots;
    LossModel loss;
    std::vector<NodeSpec> nodes;
    std::vector<EdgeSpec> edges;
    std::vector<ScheduleOp> schedule;

    void validate() const {
        if (dmax < 1) throw ValidationError("dmax must be >= 1");
        if (tau2 < 2) throw ValidationError("tau2 must be >= 2 (delivery takes one tick)");
        if (tau1 <= tau2) throw ValidationError("tau1 must be > tau2");
        if (horizon == 0) throw ValidationError("horizon must be > 0");
        if (snapshots.kind == SnapshotPolicy::Kind::Period && snapshots.period == 0)
            throw ValidationError("snapshot period must be > 0");
        if (loss.kind == LossModel::Kind::Bounded && loss.bound == 0)
            throw ValidationError("loss bound must be > 0");
        std::set<std::string> ids;
        for (const auto& n : nodes) {
            if (n.id.empty()) throw ValidationError("node id must not be empty");
            if (!ids.insert(n.id).second)
                throw ValidationError("duplicate node id: " + n.id);
        }
        for (const auto& e : edges) {
            if (!ids.count(e.a) || !ids.count(e.b))
                throw ValidationError("edge references unknown node: " + e.a + "-" + e.b);
            if (e.a == e.b) throw ValidationError("self-loop edge: " + e.a);
        }
        Tick prev = 0;
        for (const auto& op : schedule) {
            if (op.time < prev) throw ValidationError("schedule must be sorted by time");
            prev = op.time;
            switch (op.op) {
            case OpKind::AddNode:
            case OpKind::RemoveNode:
            case OpKind::Activate:
            case OpKind::Deactivate:
                if (op.node.empty()) throw ValidationError("schedule op needs a node");
                break;
            case OpKind::AddEdge:
            case OpKind::RemoveEdge:
                if (op.a.empty() || op.b.empty() || op.a == op.b)
                    throw ValidationError("schedule edge op needs two distinct nodes");
                break;
            }
        }
    }
};

namespace detail {

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key))
            throw ValidationError("unknown key \"" + key + "\" in " + where);
    }
}

inline NodeSpec parse_node(const json& j) {
    NodeSpec n;
    if (j.is_string()) {
        n.id = j.get<std::string>();
        return n;
    }
    if (!j.is_object()) throw ValidationError("node entry must be a string or object");
    reject_unknown_keys(j, {"id", "active", "corrupt"}, "node entry");
    if (!j.contains("id")) throw ValidationError("node entry needs \"id\"");
    n.id = j.at("id").get<std::string>();
    if (j.contains("active")) n.active = j.at("active").get<bool>();
    if (j.contains("corrupt")) {
        for (const auto& k : j.at("corrupt")) {
            auto kind = parse_corrupt_kind(k.get<std::string>());
            if (!kind) throw ValidationError("unknown corrupt kind: " + k.get<std::string>());
            n.corrupt.push_back(*kind);
        }
    }
    return n;
}

inline EdgeSpec parse_edge(const json& j) {
    EdgeSpec e;
    if (j.is_array()) {
        if (j.size() != 2) throw ValidationError("edge array must have two node ids");
        e.a = j.at(0).get<std::string>();
        e.b = j.at(1).get<std::string>();
        return e;
    }
    if (!j.is_object()) throw ValidationError("edge entry must be an array or object");
    reject_unknown_keys(j, {"from", "to"}, "edge entry");
    if (!j.contains("from") || !j.contains("to"))
        throw ValidationError("directed edge needs \"from\" and \"to\"");
    e.a = j.at("from").get<std::string>();
    e.b = j.at("to").get<std::string>();
    e.directed = true;
    return e;
}

inline ScheduleOp parse_op(const json& j) {
    if (!j.is_object()) throw ValidationError("schedule entry must be an object");
    if (!j.contains("time") || !j.contains("op"))
        throw ValidationError("schedule entry needs \"time\" and \"op\"");
    ScheduleOp op;
    op.time = j.at("time").get<Tick>();
    const std::string kind = j.at("op").get<std::string>();
    if (kind == "add_node" || kind == "remove_node" || kind == "activate" ||
        kind == "deactivate") {
        reject_unknown_keys(j, {"time", "op", "node"}, "schedule entry");
        if (!j.contains("node")) throw ValidationError(kind + " needs \"node\"");
        op.node = j.at("node").get<std::string>();
        op.op = kind == "add_node"     ? OpKind::AddNode
                : kind == "remove_node" ? OpKind::RemoveNode
                : kind == "activate"    ? OpKind::Activate
                                        : OpKind::Deactivate;
        return op;
    }
    if (kind == "add_edge" || kind == "remove_edge") {
        reject_unknown_keys(j, {"time", "op", "a", "b", "directed"}, "schedule entry");
        if (!j.contains("a") || !j.contains("b"))
            throw ValidationError(kind + " needs \"a\" and \"b\"");
        op.a = j.at("a").get<std::string>();
        op.b = j.at("b").get<std::string>();
        if (j.contains("directed")) op.directed = j.at("directed").get<bool>();
        op.op = kind == "add_edge" ? OpKind::AddEdge : OpKind::RemoveEdge;
        return op;
    }
    throw ValidationError("unknown schedule op: " + kind);
}

} // namespace detail

/// Parses and validates a scenario document. Every unknown key is an error:
/// a typo in a scenario file must not silently change the run.
inline Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ValidationError("scenario must be a JSON object");
    detail::reject_unknown_keys(doc,
                                {"dmax", "tau1", "tau2", "seed", "horizon", "snapshots",
                                 "loss", "nodes", "edges", "schedule"},
                                "scenario");
    Scenario sc;
    if (doc.contains("dmax")) sc.dmax = doc.at("dmax").get<std::size_t>();
    if (doc.contains("tau1")) sc.tau1 = doc.at("tau1").get<Tick>();
    if (doc.contains("tau2")) sc.tau2 = doc.at("tau2").get<Tick>();
    if (doc.contains("seed")) sc.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("horizon")) sc.horizon = doc.at("horizon").get<Tick>();
    if (doc.contains("snapshots")) {
        const json& s = doc.at("snapshots");
        if (s.is_string()) {
            const std::string v = s.get<std::string>();
            if (v == "every_event") sc.snapshots.kind = SnapshotPolicy::Kind::EveryEvent;
            else if (v == "every_compute") sc.snapshots.kind = SnapshotPolicy::Kind::EveryCompute;
            else throw ValidationError("unknown snapshot policy: " + v);
        } else if (s.is_object()) {
            detail::reject_unknown_keys(s, {"period"}, "snapshots");
            if (!s.contains("period")) throw ValidationError("snapshots object needs \"period\"");
            sc.snapshots.kind = SnapshotPolicy::Kind::Period;
            sc.snapshots.period = s.at("period").get<Tick>();
        } else {
            throw ValidationError("snapshots must be a string or {\"period\": n}");
        }
    }
    if (doc.contains("loss")) {
        const json& l = doc.at("loss");
        if (l.is_string()) {
            if (l.get<std::string>() != "none")
                throw ValidationError("unknown loss model: " + l.get<std::string>());
        } else if (l.is_object()) {
            detail::reject_unknown_keys(l, {"bounded"}, "loss");
            if (!l.contains("bounded")) throw ValidationError("loss object needs \"bounded\"");
            sc.loss.kind = LossModel::Kind::Bounded;
            sc.loss.bound = l.at("bounded").get<std::uint32_t>();
        } else {
            throw ValidationError("loss must be \"none\" or {\"bounded\": k}");
        }
    }
    if (doc.contains("nodes")) {
        for (const auto& n : doc.at("nodes")) sc.nodes.push_back(detail::parse_node(n));
    }
    if (doc.contains("edges")) {
        for (const auto& e : doc.at("edges")) sc.edges.push_back(detail::parse_edge(e));
    }
    if (doc.contains("schedule")) {
        for (const auto& op : doc.at("schedule")) sc.schedule.push_back(detail::parse_op(op));
    }
    sc.validate();
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ValidationError("invalid JSON in " + path + ": " + e.what());
    }
    return parse_scenario(doc);
}

/// Serialises a scenario back to its document form (used by the generators;
/// key order is fixed so generated files are byte-stable).
inline json to_json(const Scenario& sc) {
    json doc = json::object();
    doc["dmax"] = sc.dmax;
    doc["tau1"] = sc.tau1;
    doc["tau2"] = sc.tau2;
    doc["seed"] = sc.seed;
    doc["horizon"] = sc.horizon;
    switch (sc.snapshots.kind) {
    case SnapshotPolicy::Kind::EveryEvent: doc["snapshots"] = "every_event"; break;
    case SnapshotPolicy::Kind::EveryCompute: doc["snapshots"] = "every_compute"; break;
    case SnapshotPolicy::Kind::Period: doc["snapshots"] = json{{"period", sc.snapshots.period}}; break;
    }
    if (sc.loss.kind == LossModel::Kind::None) doc["loss"] = "none";
    else doc["loss"] = json{{"bounded", sc.loss.bound}};
    doc["nodes"] = json::array();
    for (const auto& n : sc.nodes) {
        if (n.active && n.corrupt.empty()) {
            doc["nodes"].push_back(n.id);
        } else {
            json jn = json::object();
            jn["id"] = n.id;
            if (!n.active) jn["active"] = false;
            if (!n.corrupt.empty()) {
                jn["corrupt"] = json::array();
                for (auto k : n.corrupt) jn["corrupt"].push_back(to_string(k));
            }
            doc["nodes"].push_back(jn);
        }
    }
    doc["edges"] = json::array();
    for (const auto& e : sc.edges) {
        if (e.directed) doc["edges"].push_back(json{{"from", e.a}, {"to", e.b}});
        else doc["edges"].push_back(json::array({e.a, e.b}));
    }
    doc["schedule"] = json::array();
    for (const auto& op : sc.schedule) {
        json jo = json::object();
        jo["time"] = op.time;
        jo["op"] = to_string(op.op);
        switch (op.op) {
        case OpKind::AddNode:
        case OpKind::RemoveNode:
        case OpKind::Activate:
        case OpKind::Deactivate:
            jo["node"] = op.node;
            break;
        case OpKind::AddEdge:
        case OpKind::RemoveEdge:
            jo["a"] = op.a;
            jo["b"] = op.b;
            if (op.directed) jo["directed"] = true;
            break;
        }
        doc["schedule"].push_back(jo);
    }
    return doc;
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write scenario file: " + path);
    out << to_json(sc).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

enum class ScenarioKind { StaticRandom, CorruptedStart, MergeChain, SplitCut };

inline std::optional<ScenarioKind> parse_scenario_kind(const std::string& s) {
    if (s == "static_random") return ScenarioKind::StaticRandom;
    if (s == "corrupted_start") return ScenarioKind::CorruptedStart;
    if (s == "merge_chain") return ScenarioKind::MergeChain;
    if (s == "split_cut") return ScenarioKind::SplitCut;
    return std::nullopt;
}

namespace detail {

/// Random connected graph: a random attachment tree plus a sprinkle of
/// extra edges.
inline void random_connected(Scenario& sc, std::size_t n, Rng& rng) {
    std::vector<std::string> ids;
    for (std::size_t i = 1; i <= n; ++i) ids.push_back("n" + std::to_string(i));
    for (const auto& id : ids) sc.nodes.push_back(NodeSpec{id, true, {}});
    std::set<std::pair<std::size_t, std::size_t>> used;
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t j = rng.below(i);
        used.emplace(j, i);
        sc.edges.push_back(EdgeSpec{ids[j], ids[i], false});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (used.count({i, j})) continue;
            if (rng.below(5) == 0) { // ~20% extra density
                used.emplace(i, j);
                sc.edges.push_back(EdgeSpec{ids[i], ids[j], false});
            }
        }
    }
}

} // namespace detail

/// Builds one of the four canned scenario families. All output is a pure
/// function of (kind, n, dmax, seed).
inline Scenario generate_scenario(ScenarioKind kind, std::size_t n, std::size_t dmax,
                                  std::uint64_t seed) {
    if (n < 2) throw ValidationError("generator needs n >= 2");
    if (dmax < 1) throw ValidationError("generator needs dmax >= 1");
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL + n * 1315423911ULL +
            dmax);
    Scenario sc;
    sc.dmax = dmax;
    sc.tau2 = 2;
    sc.tau1 = 8;
    sc.seed = seed;

    switch (kind) {
    case ScenarioKind::StaticRandom: {
        detail::random_connected(sc, n, rng);
        sc.horizon = 50 * sc.tau1;
        break;
    }
    case ScenarioKind::CorruptedStart: {
        detail::random_connected(sc, n, rng);
        sc.horizon = 50 * sc.tau1;
        if (seed % 2 == 1) sc.loss = LossModel{LossModel::Kind::Bounded, 2};
        const CorruptKind kinds[] = {CorruptKind::GhostNodes, CorruptKind::OversizedList,
                                     CorruptKind::WrongView, CorruptKind::ScrambledQuarantine};
        for (auto& node : sc.nodes) {
            if (rng.coin()) continue; // half the nodes start clean
            std::set<std::size_t> chosen;
            const std::size_t count = 1 + rng.below(2);
            while (chosen.size() < count) chosen.insert(rng.below(4));
            for (std::size_t k : chosen) node.corrupt.push_back(kinds[k]);
        }
        break;
    }
    case ScenarioKind::MergeChain: {
        // Two separate chains that get bridged head-to-head once both sides
        // had ample time to stabilise. The united chain has n nodes, so the
        // merge is admissible exactly when n-1 <= dmax.
        const std::size_t na = (n + 1) / 2;
        const std::size_t nb = n / 2;
        std::vector<std::string> as, bs;
        for (std::size_t i = 1; i <= na; ++i) as.push_back("a" + std::to_string(i));
        for (std::size_t i = 1; i <= nb; ++i) bs.push_back("b" + std::to_string(i));
        for (const auto& id : as) sc.nodes.push_back(NodeSpec{id, true, {}});
        for (const auto& id : bs) sc.nodes.push_back(NodeSpec{id, true, {}});
        for (std::size_t i = 0; i + 1 < na; ++i)
            sc.edges.push_back(EdgeSpec{as[i], as[i + 1], false});
        for (std::size_t i = 0; i + 1 < nb; ++i)
            sc.edges.push_back(EdgeSpec{bs[i], bs[i + 1], false});
        const Tick settle = static_cast<Tick>(4 + na + dmax) * sc.tau1;
        sc.schedule.push_back(ScheduleOp{settle, OpKind::AddEdge, "", as[0], bs[0], false});
        sc.horizon = settle + static_cast<Tick>(5 + 2 * dmax) * sc.tau1;
        break;
    }
    case ScenarioKind::SplitCut: {
        // A cycle whose radius fits dmax; cutting one edge turns it into a
        // chain longer than dmax, forcing the group to shed members.
        if (n < 3) throw ValidationError("split_cut needs n >= 3");
        if (n / 2 > dmax)
            throw ValidationError("split_cut needs n/2 <= dmax so the ring can form");
        std::vector<std::string> cs;
        for (std::size_t i = 1; i <= n; ++i) cs.push_back("c" + std::to_string(i));
        for (const auto& id : cs) sc.nodes.push_back(NodeSpec{id, true, {}});
        for (std::size_t i = 0; i < n; ++i)
            sc.edges.push_back(EdgeSpec{cs[i], cs[(i + 1) % n], false});
        const Tick cut = static_cast<Tick>(6 + dmax + n / 2) * sc.tau1;
        sc.schedule.push_back(ScheduleOp{cut, OpKind::RemoveEdge, "", cs[0], cs[1], false});
        sc.horizon = cut + static_cast<Tick>(6 + 2 * dmax) * sc.tau1;
        break;
    }
    }
    sc.validate();
    return sc;
}

} // namespace grp

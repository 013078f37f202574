#include "catch_amalgamated.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "grp/sim.hpp"

using grp::EdgeSpec;
using grp::NodeId;
using grp::NodeSpec;
using grp::OpKind;
using grp::Scenario;
using grp::ScheduleOp;
using grp::SimEngine;
using grp::Snapshot;
using grp::Tick;

namespace {

Scenario two_node(Tick horizon = 80) {
    Scenario sc;
    sc.dmax = 1;
    sc.horizon = horizon;
    sc.nodes = {NodeSpec{"u", true, {}}, NodeSpec{"v", true, {}}};
    sc.edges = {EdgeSpec{"u", "v", false}};
    return sc;
}

SimEngine::Options lockstep() {
    SimEngine::Options opt;
    opt.lockstep = true;
    return opt;
}

std::set<std::string> view_in(const Snapshot& s, const std::string& id) {
    std::set<std::string> out;
    for (const NodeId& x : s.nodes.at(NodeId(id)).view) out.insert(x.value);
    return out;
}

const Snapshot* at_time(const std::vector<Snapshot>& snaps, Tick t) {
    for (const auto& s : snaps) {
        if (s.time == t) return &s;
    }
    return nullptr;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("lockstep handshake timing for dmax 1 to 3") {
    for (std::size_t dmax : {1u, 2u, 3u}) {
        Scenario sc = two_node(200);
        sc.dmax = dmax;
        SimEngine engine(sc, lockstep());
        const auto& snaps = engine.run();

        // Views must first become {u,v} at the compute round 2+dmax, i.e.
        // tick (2+dmax)*tau1: one round of hellos, one round of unmarked
        // adoption, then dmax rounds of quarantine.
        Tick first_joint = 0;
        for (const auto& s : snaps) {
            if (view_in(s, "v").count("u")) {
                first_joint = s.time;
                break;
            }
        }
        CHECK(first_joint == (2 + dmax) * sc.tau1);

        const Snapshot& last = snaps.back();
        CHECK(view_in(last, "u") == std::set<std::string>{"u", "v"});
        CHECK(view_in(last, "v") == std::set<std::string>{"u", "v"});
    }
}

TEST_CASE("golden two-node trace is stable byte for byte") {
    SimEngine engine(two_node(40), lockstep());
    const std::string trace = grp::render_trace(engine.run());
    const std::string golden =
        read_file(std::string(GRP_SOURCE_DIR) + "/tests/golden/two_node.trace");
    CHECK(trace == golden);
}

TEST_CASE("identical runs produce identical traces") {
    const Scenario lossy = [] {
        Scenario sc = grp::generate_scenario(grp::ScenarioKind::CorruptedStart, 9, 2, 7);
        sc.loss = grp::LossModel{grp::LossModel::Kind::Bounded, 2};
        return sc;
    }();
    for (const Scenario& sc :
         {lossy, grp::generate_scenario(grp::ScenarioKind::MergeChain, 5, 4, 3)}) {
        SimEngine a(sc);
        SimEngine b(sc);
        CHECK(grp::render_trace(a.run()) == grp::render_trace(b.run()));
    }

    SimEngine c(lossy);
    SimEngine::Options other;
    other.seed = 1234567;
    SimEngine d(lossy, other);
    CHECK(grp::render_trace(c.run()) != grp::render_trace(d.run()));
}

TEST_CASE("random phases still converge") {
    Scenario sc = two_node(300);
    sc.seed = 99;
    SimEngine engine(sc); // no lockstep: staggered timers
    const auto& snaps = engine.run();
    CHECK(view_in(snaps.back(), "u") == std::set<std::string>{"u", "v"});
    CHECK(view_in(snaps.back(), "v") == std::set<std::string>{"u", "v"});
}

TEST_CASE("bounded loss delays but cannot prevent the handshake") {
    Scenario sc = two_node(400);
    sc.loss = grp::LossModel{grp::LossModel::Kind::Bounded, 3};
    sc.seed = 5;
    SimEngine engine(sc, lockstep());
    const auto& snaps = engine.run();
    CHECK(view_in(snaps.back(), "u") == std::set<std::string>{"u", "v"});
    CHECK(view_in(snaps.back(), "v") == std::set<std::string>{"u", "v"});
}

TEST_CASE("deactivation freezes a node and empties the survivor's view") {
    Scenario sc = two_node(120);
    sc.schedule = {ScheduleOp{60, OpKind::Deactivate, "v", "", "", false}};
    SimEngine engine(sc, lockstep());
    const auto& snaps = engine.run();

    const Snapshot* at_cut = at_time(snaps, 60);
    REQUIRE(at_cut != nullptr);
    CHECK_FALSE(at_cut->nodes.at(NodeId("v")).active);
    const std::string frozen = grp::to_string(at_cut->nodes.at(NodeId("v")).list);
    for (const auto& s : snaps) {
        if (s.time < 60) continue;
        CHECK_FALSE(s.nodes.at(NodeId("v")).active);
        CHECK(grp::to_string(s.nodes.at(NodeId("v")).list) == frozen);
    }
    CHECK(view_in(snaps.back(), "u") == std::set<std::string>{"u"});
    CHECK(view_in(snaps.back(), "v") == std::set<std::string>{"u", "v"}); // stale, frozen
}

TEST_CASE("reactivation rejoins the group") {
    Scenario sc = two_node(300);
    sc.schedule = {ScheduleOp{60, OpKind::Deactivate, "v", "", "", false},
                   ScheduleOp{120, OpKind::Activate, "v", "", "", false}};
    SimEngine engine(sc, lockstep());
    const auto& snaps = engine.run();
    CHECK(view_in(snaps.back(), "u") == std::set<std::string>{"u", "v"});
    CHECK(view_in(snaps.back(), "v") == std::set<std::string>{"u", "v"});
}

TEST_CASE("node removal mid-run") {
    Scenario sc = two_node(160);
    sc.schedule = {ScheduleOp{60, OpKind::RemoveNode, "v", "", "", false}};
    SimEngine engine(sc, lockstep());
    const auto& snaps = engine.run();
    const Snapshot& last = snaps.back();
    CHECK(last.nodes.count(NodeId("v")) == 0);
    CHECK(last.edges.empty());
    CHECK(view_in(last, "u") == std::set<std::string>{"u"});
}

TEST_CASE("a node added later joins via scheduled edge") {
    Scenario sc;
    sc.dmax = 1;
    sc.horizon = 300;
    sc.nodes = {NodeSpec{"u", true, {}}};
    sc.schedule = {ScheduleOp{16, OpKind::AddNode, "v", "", "", false},
                   ScheduleOp{16, OpKind::AddEdge, "", "u", "v", false}};
    SimEngine engine(sc, lockstep());
    const auto& snaps = engine.run();
    CHECK(view_in(snaps.back(), "u") == std::set<std::string>{"u", "v"});
    CHECK(view_in(snaps.back(), "v") == std::set<std::string>{"u", "v"});
}

TEST_CASE("snapshot policies pick the advertised ticks") {
    {
        Scenario sc = two_node(40);
        sc.snapshots.kind = grp::SnapshotPolicy::Kind::Period;
        sc.snapshots.period = 7;
        SimEngine engine(sc, lockstep());
        const auto& snaps = engine.run();
        for (const auto& s : snaps) {
            const bool ok = s.time % 7 == 0 || s.time == 0 || s.time == 40;
            CHECK(ok);
        }
        CHECK(snaps.front().time == 0);
        CHECK(snaps.back().time == 40);
    }
    {
        Scenario sc = two_node(40);
        sc.snapshots.kind = grp::SnapshotPolicy::Kind::EveryCompute;
        SimEngine engine(sc, lockstep());
        const auto& snaps = engine.run();
        for (const auto& s : snaps) {
            const bool ok = s.time % sc.tau1 == 0 || s.time == 0 || s.time == 40;
            CHECK(ok);
        }
    }
}

TEST_CASE("directed edges carry messages one way only") {
    Scenario sc;
    sc.dmax = 1;
    sc.horizon = 120;
    sc.nodes = {NodeSpec{"u", true, {}}, NodeSpec{"v", true, {}}};
    sc.edges = {EdgeSpec{"u", "v", true}}; // u -> v only
    SimEngine engine(sc, lockstep());
    const auto& snaps = engine.run();
    const Snapshot& last = snaps.back();
    // v hears u but u never hears back: v keeps a hello mark forever and
    // neither view grows.
    CHECK(view_in(last, "u") == std::set<std::string>{"u"});
    CHECK(view_in(last, "v") == std::set<std::string>{"v"});
    CHECK(last.nodes.at(NodeId("v")).list.contains(NodeId("u")));
    CHECK_FALSE(last.nodes.at(NodeId("u")).list.contains(NodeId("v")));
}

TEST_CASE("dmax and seed overrides take effect") {
    Scenario sc = two_node(200);
    SimEngine::Options opt = lockstep();
    opt.dmax = 3;
    SimEngine engine(sc, opt);
    CHECK(engine.dmax() == 3);
    const auto& snaps = engine.run();
    Tick first_joint = 0;
    for (const auto& s : snaps) {
        if (view_in(s, "v").count("u")) {
            first_joint = s.time;
            break;
        }
    }
    CHECK(first_joint == (2 + 3) * sc.tau1); // quarantine runs at the new dmax
}

TEST_CASE("corrupted starts are repaired") {
    // Every corruption kind, one node each, plus a clean witness.
    Scenario sc;
    sc.dmax = 2;
    sc.horizon = 400;
    sc.nodes = {NodeSpec{"a", true, {grp::CorruptKind::GhostNodes}},
                NodeSpec{"b", true, {grp::CorruptKind::OversizedList}},
                NodeSpec{"c", true, {grp::CorruptKind::WrongView}},
                NodeSpec{"d", true, {grp::CorruptKind::ScrambledQuarantine}},
                NodeSpec{"e", true, {}}};
    sc.edges = {EdgeSpec{"a", "b", false}, EdgeSpec{"b", "c", false},
                EdgeSpec{"c", "d", false}, EdgeSpec{"d", "e", false},
                EdgeSpec{"a", "c", false}, EdgeSpec{"b", "d", false},
                EdgeSpec{"c", "e", false}};
    SimEngine engine(sc, lockstep());
    const auto& snaps = engine.run();

    // The corrupted snapshot at t=0 must actually be corrupted.
    const Snapshot& start = snaps.front();
    bool any_bad = false;
    for (const auto& [id, ns] : start.nodes) {
        // A fresh node has a singleton list, empty quarantine and view {id};
        // anything else at t=0 is injected corruption.
        if (ns.list.length() > 1 || !ns.quarantine.empty() ||
            ns.view != std::set<NodeId>{id})
            any_bad = true;
    }
    CHECK(any_bad);

    // Diameter of this graph is 2, so one common group must emerge.
    const std::set<std::string> all{"a", "b", "c", "d", "e"};
    for (const char* id : {"a", "b", "c", "d", "e"})
        CHECK(view_in(snaps.back(), id) == all);
}

#pragma once

// Helpers shared by the unit tests and the acceptance suite.

#include <sstream>
#include <stdexcept>
#include <string>

#include "grp/ancestor_list.hpp"
#include "grp/ids.hpp"
#include "grp/rng.hpp"

#include "oracle_util.hpp"

namespace support {

using grp::AncestorList;
using grp::EntrySet;
using grp::Mark;
using grp::NodeId;

/// Parses the canonical rendering, e.g. "({v},{a,b!},{c!!})". Inverse of
/// grp::to_string for well-formed input; throws on anything else.
inline AncestorList parse_list(const std::string& text) {
    auto fail = [&](const std::string& why) -> std::runtime_error {
        return std::runtime_error("bad list \"" + text + "\": " + why);
    };
    std::size_t i = 0;
    auto expect = [&](char c) {
        if (i >= text.size() || text[i] != c) throw fail(std::string("expected '") + c + "'");
        ++i;
    };
    expect('(');
    AncestorList out;
    if (i < text.size() && text[i] == ')') { // "()"
        ++i;
        if (i != text.size()) throw fail("trailing characters");
        return out;
    }
    while (true) {
        expect('{');
        EntrySet s;
        while (i < text.size() && text[i] != '}') {
            std::string id;
            while (i < text.size() && text[i] != ',' && text[i] != '}' && text[i] != '!')
                id += text[i++];
            if (id.empty()) throw fail("empty id");
            Mark m = Mark::Plain;
            if (i < text.size() && text[i] == '!') {
                ++i;
                m = Mark::Single;
                if (i < text.size() && text[i] == '!') {
                    ++i;
                    m = Mark::Double;
                }
            }
            s.insert(NodeId(id), m);
            if (i < text.size() && text[i] == ',') ++i;
        }
        expect('}');
        out.push_back(std::move(s));
        if (i < text.size() && text[i] == ',') {
            ++i;
            continue;
        }
        break;
    }
    expect(')');
    if (i != text.size()) throw fail("trailing characters");
    return out;
}

/// Criterion-level property run over random list pairs: the merge operator
/// against the reference implementation plus its algebraic laws. Returns an
/// empty string on success, else a description of the first failure.
inline std::string run_algebra_properties(std::size_t pairs, std::uint64_t seed) {
    grp::Rng rng(seed);
    for (std::size_t k = 0; k < pairs; ++k) {
        const AncestorList a = oracle::random_list(rng);
        const AncestorList b = oracle::random_list(rng);
        const AncestorList c = oracle::random_list(rng);

        const AncestorList ab = grp::merge(a, b);
        std::ostringstream err;
        if (ab != oracle::merge_reference(a, b)) {
            err << "merge mismatch vs reference: a=" << grp::to_string(a)
                << " b=" << grp::to_string(b) << " got=" << grp::to_string(ab);
            return err.str();
        }
        if (ab != grp::merge(b, a)) {
            err << "merge not commutative: a=" << grp::to_string(a)
                << " b=" << grp::to_string(b);
            return err.str();
        }
        if (grp::merge(ab, c) != grp::merge(a, grp::merge(b, c))) {
            err << "merge not associative: a=" << grp::to_string(a)
                << " b=" << grp::to_string(b) << " c=" << grp::to_string(c);
            return err.str();
        }
        if (grp::merge(a, a) != a) {
            err << "merge not idempotent: a=" << grp::to_string(a);
            return err.str();
        }
        if (grp::ant(a, a) != a) {
            err << "ant(l,l) != l: a=" << grp::to_string(a);
            return err.str();
        }
        if (ab.length() > std::max(a.length(), b.length())) {
            err << "merge longer than both operands: a=" << grp::to_string(a)
                << " b=" << grp::to_string(b);
            return err.str();
        }
        // Every id exactly once, at the minimal position across operands.
        std::map<NodeId, std::size_t> expected;
        auto note = [&](const AncestorList& l) {
            for (std::size_t i = 0; i < l.length(); ++i) {
                for (const auto& [id, m] : l.at(i)) {
                    auto it = expected.find(id);
                    if (it == expected.end() || i < it->second) expected[id] = i;
                }
            }
        };
        note(a);
        note(b);
        std::map<NodeId, std::size_t> got;
        for (std::size_t i = 0; i < ab.length(); ++i) {
            for (const auto& [id, m] : ab.at(i)) {
                if (got.count(id)) {
                    err << "id twice in merge: " << id.value << " in " << grp::to_string(ab);
                    return err.str();
                }
                got[id] = i;
            }
        }
        if (got != expected) {
            err << "merge positions differ from minimal positions: a="
                << grp::to_string(a) << " b=" << grp::to_string(b);
            return err.str();
        }
        // Shift: one longer, front empty, content displaced by one.
        const AncestorList sh = grp::shift(a);
        if (sh.length() != a.length() + 1 || !sh.at(0).empty()) {
            err << "shift shape wrong for " << grp::to_string(a);
            return err.str();
        }
        for (std::size_t i = 0; i < a.length(); ++i) {
            if (!(sh.at(i + 1) == a.at(i))) {
                err << "shift content wrong for " << grp::to_string(a);
                return err.str();
            }
        }
    }
    return {};
}

} // namespace support

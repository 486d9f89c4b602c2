#pragma once

// Call-tree capture for engine runs.  Holds2 subtrees follow the and-or tree
// reading: a conjunction node is an `and` node, a Said node with recursive
// calls is an `or` node, everything else is a leaf.  Query/Auth wrapper nodes
// are plain `call` nodes.

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace xrml {

enum class Verdict { True, False, FuelExhausted };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::True: return "true";
        case Verdict::False: return "false";
        case Verdict::FuelExhausted: return "fuel-exhausted";
    }
    return "?";
}

struct CallTree {
    enum class Kind { And, Or, Leaf, Call };

    std::string label;
    Kind kind = Kind::Leaf;
    Verdict verdict = Verdict::False;
    std::vector<std::shared_ptr<CallTree>> children;

    // Height in edges; a single node has height 0.
    int height() const {
        int h = 0;
        for (const auto& c : children) h = std::max(h, 1 + c->height());
        return h;
    }

    size_t node_count() const {
        size_t n = 1;
        for (const auto& c : children) n += c->node_count();
        return n;
    }
};

inline const char* kind_name(CallTree::Kind k) {
    switch (k) {
        case CallTree::Kind::And: return "and";
        case CallTree::Kind::Or: return "or";
        case CallTree::Kind::Leaf: return "leaf";
        case CallTree::Kind::Call: return "call";
    }
    return "?";
}

inline nlohmann::json trace_to_json(const CallTree& t) {
    nlohmann::json j;
    j["label"] = t.label;
    j["kind"] = kind_name(t.kind);
    j["verdict"] = verdict_name(t.verdict);
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : t.children) kids.push_back(trace_to_json(*c));
    j["children"] = std::move(kids);
    return j;
}

}  // namespace xrml

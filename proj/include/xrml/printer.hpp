#pragma once

// Textual rendering of AST nodes.  Output reparses to a structurally equal
// node and is deterministic (canonical component order).

#include <sstream>
#include <string>

#include "xrml/ast.hpp"

namespace xrml {

std::string print(const GrantPtr& g);
std::string print(const CondPtr& c);
std::string print(const ConcPtr& c);

inline std::string print(const PrincipalTerm& t) {
    std::string out = "{";
    bool first = true;
    for (const auto& n : t.names) {
        if (!first) out += ", ";
        out += n;
        first = false;
    }
    for (const auto& v : t.vars) {
        if (!first) out += ", ";
        out += v;
        first = false;
    }
    out += "}";
    return out;
}

inline std::string print(const Resource& r) {
    if (r.is_var()) return *r.var;
    return "<" + print(r.grant) + ">";
}

inline std::string print(const ConcPtr& c) {
    std::string out;
    if (c->is_negative()) out += "!";
    if (c->kind == ConcKind::Property || c->kind == ConcKind::NegProperty) {
        out += c->prop + "(" + print(c->principal) + ")";
    } else {
        out += "Perm(" + print(c->principal) + ", issue, " + print(c->resource) + ")";
    }
    return out;
}

inline std::string print(const CondPtr& c) {
    switch (c->kind) {
        case CondKind::True:
            return "true";
        case CondKind::Said:
            return "Said(" + print(c->principal) + ", " + print(c->conclusion) + ")";
        case CondKind::NegSaid:
            return "!Said(" + print(c->principal) + ", " + print(c->conclusion) + ")";
        case CondKind::Conj: {
            std::string out;
            for (size_t i = 0; i < c->conjuncts.size(); ++i) {
                if (i) out += " /\\ ";
                out += print(c->conjuncts[i]);
            }
            return out;
        }
    }
    return "";
}

inline std::string print(const GrantPtr& g) {
    std::string out;
    for (const auto& b : g->binders) {
        out += "forall " + b.name;
        out += b.sort == Sort::Principal ? " : principal . " : " : resource . ";
    }
    if (g->antecedent->kind != CondKind::True) out += print(g->antecedent) + " -> ";
    out += print(g->consequent);
    return out;
}

inline std::string print(const License& l) {
    return "license (" + print(l.issuer) + ") grants " + print(l.grant) + ";";
}

inline std::string print(const TrustedGrant& t) {
    return "trusted grant " + print(t.grant) + ";";
}

inline std::string print_query_goal(const ConcPtr& goal) { return print(goal) + "?"; }

// Full license-file rendering of a query's declarations and statements, in
// statement order.  Reparses to the same workspace.
inline std::string print_license_file(const Declarations& decls, const Query& q) {
    std::ostringstream out;
    out << "xrml-fragment v1\n";
    out << "declare principals";
    for (size_t i = 0; i < decls.principals.size(); ++i)
        out << (i ? ", " : " ") << decls.principals[i];
    out << ";\n";
    out << "declare properties";
    for (size_t i = 0; i < decls.properties.size(); ++i)
        out << (i ? ", " : " ") << decls.properties[i];
    out << ";\n";

    // Interleave by seq so evaluation order survives a round trip.
    size_t li = 0, ti = 0;
    while (li < q.licenses.size() || ti < q.trusted.size()) {
        bool take_license;
        if (li == q.licenses.size())
            take_license = false;
        else if (ti == q.trusted.size())
            take_license = true;
        else
            take_license = q.licenses[li].seq < q.trusted[ti].seq;
        if (take_license)
            out << print(q.licenses[li++]) << "\n";
        else
            out << print(q.trusted[ti++]) << "\n";
    }
    return out.str();
}

inline std::string print_query_file(const ConcPtr& goal) {
    return "xrml-fragment v1\n" + print_query_goal(goal) + "\n";
}

}  // namespace xrml

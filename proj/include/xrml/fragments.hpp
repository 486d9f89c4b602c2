#pragma once

// Static analyzers for the query classes that govern tractability:
// restrained grants, union mentions, n-restriction, the affects relation and
// hierarchical license sets.

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "xrml/ast.hpp"
#include "xrml/printer.hpp"
#include "xrml/substitution.hpp"

namespace xrml {

// Every resource-sort variable of the antecedent also occurs in the
// conclusion.  Restrained grants keep the instantiated-condition set finite.
inline bool is_restrained(const GrantPtr& g) {
    std::vector<Variable> ante, conc;
    detail::collect_free(g->antecedent, {}, ante);
    detail::collect_free(g->consequent, {}, conc);
    for (const auto& v : ante) {
        if (v.sort != Sort::Resource) continue;
        bool in_conc = false;
        for (const auto& w : conc)
            if (w == v) { in_conc = true; break; }
        if (!in_conc) return false;
    }
    return true;
}

// Number of principal-sort variables mentioned in the antecedent and not in
// the conclusion.
inline int n_restriction(const GrantPtr& g) {
    std::vector<Variable> ante, conc;
    detail::collect_free(g->antecedent, {}, ante);
    detail::collect_free(g->consequent, {}, conc);
    int n = 0;
    for (const auto& v : ante) {
        if (v.sort != Sort::Principal) continue;
        bool in_conc = false;
        for (const auto& w : conc)
            if (w == v) { in_conc = true; break; }
        if (!in_conc) ++n;
    }
    return n;
}

enum class Affects { No, Yes, May };

namespace fragments_detail {

// A Said occurrence inside an antecedent, together with the grant-literal
// binders in scope at that point (rigid from the perspective of the outer
// grant's substitution).
struct SaidOccurrence {
    PrincipalTerm principal;
    ConcPtr conclusion;
    std::vector<Variable> rigid;
};

inline void collect_saids_conc(const ConcPtr& c, std::vector<Variable> rigid,
                               std::vector<SaidOccurrence>& out);

inline void collect_saids(const CondPtr& c, const std::vector<Variable>& rigid,
                          std::vector<SaidOccurrence>& out) {
    switch (c->kind) {
        case CondKind::True:
            return;
        case CondKind::Said:
        case CondKind::NegSaid:
            out.push_back({c->principal, c->conclusion, rigid});
            collect_saids_conc(c->conclusion, rigid, out);
            return;
        case CondKind::Conj:
            for (const auto& p : c->conjuncts) collect_saids(p, rigid, out);
            return;
    }
}

inline void collect_saids_conc(const ConcPtr& c, std::vector<Variable> rigid,
                               std::vector<SaidOccurrence>& out) {
    if (c->is_permission() && !c->resource.is_var()) {
        const GrantPtr& g = c->resource.grant;
        std::vector<Variable> inner = rigid;
        inner.insert(inner.end(), g->binders.begin(), g->binders.end());
        collect_saids(g->antecedent, inner, out);
        collect_saids_conc(g->consequent, inner, out);
    }
}

// Renames the free variables of a conclusion pattern.
inline PrincipalTerm rename_prin(const PrincipalTerm& t,
                                 const std::map<std::string, std::string>& ren,
                                 const std::vector<Variable>& shadow) {
    std::vector<std::string> vars;
    for (const auto& v : t.vars) {
        auto it = ren.find(v);
        vars.push_back(it != ren.end() && !detail::shadowed(shadow, v) ? it->second : v);
    }
    return PrincipalTerm::make(t.names, std::move(vars));
}

ConcPtr rename_conc(const ConcPtr& c, const std::map<std::string, std::string>& ren,
                    const std::vector<Variable>& shadow);

inline CondPtr rename_cond(const CondPtr& c, const std::map<std::string, std::string>& ren,
                           const std::vector<Variable>& shadow) {
    switch (c->kind) {
        case CondKind::True:
            return c;
        case CondKind::Said:
        case CondKind::NegSaid:
            return make_said(rename_prin(c->principal, ren, shadow),
                             rename_conc(c->conclusion, ren, shadow),
                             c->kind == CondKind::NegSaid);
        case CondKind::Conj: {
            std::vector<CondPtr> parts;
            for (const auto& p : c->conjuncts) parts.push_back(rename_cond(p, ren, shadow));
            return make_conjunction(parts);
        }
    }
    return c;
}

inline ConcPtr rename_conc(const ConcPtr& c, const std::map<std::string, std::string>& ren,
                           const std::vector<Variable>& shadow) {
    PrincipalTerm p = rename_prin(c->principal, ren, shadow);
    if (c->kind == ConcKind::Property || c->kind == ConcKind::NegProperty)
        return make_property(c->prop, std::move(p), c->is_negative());
    if (c->resource.is_var()) {
        std::string v = *c->resource.var;
        auto it = ren.find(v);
        if (it != ren.end() && !detail::shadowed(shadow, v)) v = it->second;
        return make_permission(std::move(p), Resource::make_var(v), c->is_negative());
    }
    const GrantPtr& g = c->resource.grant;
    std::vector<Variable> inner = shadow;
    inner.insert(inner.end(), g->binders.begin(), g->binders.end());
    GrantPtr g2 = make_grant(g->binders, rename_cond(g->antecedent, ren, inner),
                             rename_conc(g->consequent, ren, inner));
    return make_permission(std::move(p), Resource::make_grant(g2), c->is_negative());
}

// Two-sided structural unification of resource positions after all
// substitutable principal variables have been grounded.  Substitutable
// resource variables live in `bindings`; rigid variables (grant-literal
// binders) only match themselves at corresponding positions.
struct Unifier {
    std::map<std::string, Resource> bindings;  // substitutable var -> term
    const std::set<std::string>* rigid_a;
    const std::set<std::string>* rigid_b;

    bool is_rigid(const std::string& v) const {
        return rigid_a->count(v) > 0 || rigid_b->count(v) > 0;
    }

    bool occurs(const std::string& v, const Resource& r,
                std::vector<Variable> shadow = {}) const {
        if (r.is_var()) {
            if (detail::shadowed(shadow, *r.var)) return false;
            if (*r.var == v) return true;
            auto it = bindings.find(*r.var);
            return it != bindings.end() && occurs(v, it->second, shadow);
        }
        return occurs_grant(v, r.grant, std::move(shadow));
    }
    bool occurs_grant(const std::string& v, const GrantPtr& g,
                      std::vector<Variable> shadow) const {
        shadow.insert(shadow.end(), g->binders.begin(), g->binders.end());
        return occurs_cond(v, g->antecedent, shadow) || occurs_conc(v, g->consequent, shadow);
    }
    bool occurs_cond(const std::string& v, const CondPtr& c,
                     const std::vector<Variable>& shadow) const {
        switch (c->kind) {
            case CondKind::True:
                return false;
            case CondKind::Said:
            case CondKind::NegSaid:
                return occurs_conc(v, c->conclusion, shadow);
            case CondKind::Conj:
                for (const auto& p : c->conjuncts)
                    if (occurs_cond(v, p, shadow)) return true;
                return false;
        }
        return false;
    }
    bool occurs_conc(const std::string& v, const ConcPtr& c,
                     const std::vector<Variable>& shadow) const {
        if (!c->is_permission()) return false;
        if (c->resource.is_var())
            return !detail::shadowed(shadow, *c->resource.var) &&
                   (*c->resource.var == v ||
                    (bindings.count(*c->resource.var) &&
                     occurs(v, bindings.at(*c->resource.var), shadow)));
        return occurs_grant(v, c->resource.grant, shadow);
    }

    Resource resolve(Resource r) const {
        while (r.is_var() && !is_rigid(*r.var)) {
            auto it = bindings.find(*r.var);
            if (it == bindings.end()) break;
            r = it->second;
        }
        return r;
    }

    bool unify_resource(const Resource& ra_in, const Resource& rb_in,
                        const std::vector<Variable>& shadow) {
        Resource ra = ra_in.is_var() && detail::shadowed(shadow, *ra_in.var) ? ra_in
                                                                             : resolve(ra_in);
        Resource rb = rb_in.is_var() && detail::shadowed(shadow, *rb_in.var) ? rb_in
                                                                             : resolve(rb_in);
        bool a_rigid = ra.is_var() && (detail::shadowed(shadow, *ra.var) || is_rigid(*ra.var));
        bool b_rigid = rb.is_var() && (detail::shadowed(shadow, *rb.var) || is_rigid(*rb.var));
        if (a_rigid || b_rigid) return a_rigid && b_rigid && *ra.var == *rb.var;
        if (ra.is_var()) {
            if (rb.is_var() && *ra.var == *rb.var) return true;
            if (occurs(*ra.var, rb)) return false;
            bindings[*ra.var] = rb;
            return true;
        }
        if (rb.is_var()) {
            if (occurs(*rb.var, ra)) return false;
            bindings[*rb.var] = ra;
            return true;
        }
        return unify_grant(ra.grant, rb.grant, shadow);
    }

    bool unify_grant(const GrantPtr& a, const GrantPtr& b, std::vector<Variable> shadow) {
        if (a->binders.size() != b->binders.size()) return false;
        for (size_t i = 0; i < a->binders.size(); ++i)
            if (!(a->binders[i] == b->binders[i])) return false;
        shadow.insert(shadow.end(), a->binders.begin(), a->binders.end());
        return unify_cond(a->antecedent, b->antecedent, shadow) &&
               unify_conc(a->consequent, b->consequent, shadow);
    }

    bool unify_prin(const PrincipalTerm& a, const PrincipalTerm& b,
                    const std::vector<Variable>& shadow) {
        // Principal variables have been grounded already except for rigid
        // literal binders, which must correspond literally.
        (void)shadow;
        return a == b;
    }

    bool unify_cond(const CondPtr& a, const CondPtr& b, const std::vector<Variable>& shadow) {
        if (a->kind != b->kind) return false;
        switch (a->kind) {
            case CondKind::True:
                return true;
            case CondKind::Said:
            case CondKind::NegSaid:
                return unify_prin(a->principal, b->principal, shadow) &&
                       unify_conc(a->conclusion, b->conclusion, shadow);
            case CondKind::Conj: {
                if (a->conjuncts.size() != b->conjuncts.size()) return false;
                for (size_t i = 0; i < a->conjuncts.size(); ++i)
                    if (!unify_cond(a->conjuncts[i], b->conjuncts[i], shadow)) return false;
                return true;
            }
        }
        return false;
    }

    bool unify_conc(const ConcPtr& a, const ConcPtr& b, const std::vector<Variable>& shadow) {
        if (a->kind != b->kind) return false;
        if (a->kind == ConcKind::Property || a->kind == ConcKind::NegProperty)
            return a->prop == b->prop && unify_prin(a->principal, b->principal, shadow);
        return unify_prin(a->principal, b->principal, shadow) &&
               unify_resource(a->resource, b->resource, shadow);
    }

    // A binding is realizable by a closed substitution when its term has no
    // free rigid variables.
    bool bindings_realizable() const {
        for (const auto& [v, r] : bindings) {
            std::vector<Variable> fv;
            if (r.is_var()) {
                if (is_rigid(*r.var)) return false;
                continue;
            }
            detail::collect_free(r.grant, {}, fv);
            for (const auto& w : fv)
                if (is_rigid(w.name)) return false;
        }
        return true;
    }
};

inline void collect_principal_vars(const ConcPtr& c, const std::vector<Variable>& rigid,
                                   std::vector<std::string>& out) {
    std::vector<Variable> fv;
    detail::collect_free(c, {}, fv);
    for (const auto& v : fv)
        if (v.sort == Sort::Principal && !detail::shadowed(rigid, v.name)) {
            bool seen = false;
            for (const auto& s : out)
                if (s == v.name) seen = true;
            if (!seen) out.push_back(v.name);
        }
}

}  // namespace fragments_detail

// Decides whether l1 affects l2: some closed instantiation of l1's conclusion
// appears as a Said target in l2's antecedent (at any nesting depth) with
// l1's issuer contained in the Said principal.  Exact for restrained grants;
// conservatively `May` otherwise.
inline Affects affects(const License& l1, const License& l2, const MatchContext& ctx) {
    using namespace fragments_detail;

    if (!is_restrained(l1.grant) || !is_restrained(l2.grant)) return Affects::May;

    // Rename l1's variables apart from l2's.
    std::map<std::string, std::string> ren;
    for (const auto& b : l1.grant->binders) ren[b.name] = "@a_" + b.name;
    ConcPtr head = rename_conc(l1.grant->consequent, ren, {});

    std::vector<SaidOccurrence> saids;
    collect_saids(l2.grant->antecedent, {}, saids);

    bool saw_may = false;
    std::vector<PrincipalTerm> prange = principal_range(ctx);

    for (const auto& occ : saids) {
        // principal variables on both sides, excluding rigid literal binders
        std::vector<std::string> pvars;
        collect_principal_vars(head, {}, pvars);
        std::vector<std::string> pv2;
        collect_principal_vars(occ.conclusion, occ.rigid, pv2);
        std::vector<Variable> prin_in_said;
        for (const auto& v : occ.principal.vars)
            if (!detail::shadowed(occ.rigid, v)) {
                bool seen = false;
                for (const auto& s : pv2)
                    if (s == v) seen = true;
                if (!seen) pv2.push_back(v);
            }
        for (const auto& v : pv2) {
            bool seen = false;
            for (const auto& s : pvars)
                if (s == v) seen = true;
            if (!seen) pvars.push_back(v);
        }
        if (pvars.size() > 6) {
            saw_may = true;  // enumeration would blow up; stay conservative
            continue;
        }

        std::set<std::string> rigid_a;  // none on the renamed side beyond literals
        std::set<std::string> rigid_b;
        for (const auto& v : occ.rigid) rigid_b.insert(v.name);

        // enumerate principal assignments
        std::vector<size_t> idx(pvars.size(), 0);
        bool done = !pvars.empty() && prange.empty();
        while (!done) {
            Substitution sigma;
            for (size_t i = 0; i < pvars.size(); ++i)
                sigma.bind({pvars[i], Sort::Principal}, GroundValue::principal(prange[idx[i]]));
            ConcPtr a = subst(head, sigma);
            ConcPtr b = subst(occ.conclusion, sigma);
            PrincipalTerm said_p = subst_detail::subst_prin(occ.principal, sigma, {});

            Unifier u;
            u.rigid_a = &rigid_a;
            u.rigid_b = &rigid_b;
            if (u.unify_conc(a, b, {}) && u.bindings_realizable()) {
                bool prin_ok = l1.issuer.subset_of(said_p);
                bool prin_rigid = !said_p.vars.empty();
                if (prin_ok) return Affects::Yes;
                if (prin_rigid) saw_may = true;
            }

            if (pvars.empty()) break;
            size_t i = pvars.size();
            bool advanced = false;
            while (i > 0) {
                --i;
                if (++idx[i] < prange.size()) { advanced = true; break; }
                idx[i] = 0;
            }
            if (!advanced) done = true;
        }
    }
    return saw_may ? Affects::May : Affects::No;
}

struct Hierarchy {
    bool ok = false;
    std::vector<size_t> order;                          // topological license order
    std::vector<size_t> cycle;                          // offending cycle when !ok
    std::vector<std::tuple<size_t, size_t, bool>> edges;  // (from, to, conservative)
};

// Builds the affects digraph over L and returns a strict partial order
// witness (a topological order) when it is acyclic.  Conservative `May`
// answers contribute edges, which keeps the certificate sound.
inline Hierarchy hierarchical_order(const std::vector<License>& licenses,
                                    const MatchContext& ctx) {
    Hierarchy h;
    size_t n = licenses.size();
    std::vector<std::vector<size_t>> succ(n);
    std::vector<size_t> indeg(n, 0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            Affects a = affects(licenses[i], licenses[j], ctx);
            if (a == Affects::No) continue;
            h.edges.emplace_back(i, j, a == Affects::May);
            succ[i].push_back(j);
            ++indeg[j];
        }
    }
    // Kahn's algorithm
    std::vector<size_t> stack;
    for (size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) stack.push_back(i);
    std::vector<size_t> order;
    std::vector<size_t> indeg_left = indeg;
    while (!stack.empty()) {
        size_t v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (size_t w : succ[v])
            if (--indeg_left[w] == 0) stack.push_back(w);
    }
    if (order.size() == n) {
        h.ok = true;
        h.order = std::move(order);
        return h;
    }
    // extract a cycle among the unordered tail
    std::vector<bool> in_order(n, false);
    for (size_t v : order) in_order[v] = true;
    size_t start = 0;
    while (start < n && in_order[start]) ++start;
    std::vector<size_t> path;
    std::vector<int> mark(n, 0);
    size_t cur = start;
    while (mark[cur] == 0) {
        mark[cur] = 1;
        path.push_back(cur);
        for (size_t w : succ[cur])
            if (!in_order[w]) { cur = w; break; }
    }
    size_t k = 0;
    while (path[k] != cur) ++k;
    h.cycle.assign(path.begin() + k, path.end());
    return h;
}

struct OffendingItem {
    std::string item;
    std::string reason;
    int line = 0;
};

struct FragmentReport {
    bool in_l0 = false;
    bool in_l1 = false;
    int max_n_restriction = 0;
    int n_param = 0;
    bool n_ok = false;
    int h_param = -1;
    bool hierarchical = false;
    bool conservative_edges = false;  // hierarchy used may-affect edges
    int height_bound = -1;            // 2|L|+1 when hierarchical
    bool h_certified = false;
    bool polynomial_path = false;
    std::string cost_note;
    std::vector<std::string> order_labels;
    std::vector<std::string> cycle_labels;
    std::vector<OffendingItem> offending;
};

// Aggregate analyzer: restrained scan over R and L, union-mention scan,
// n-restriction maximum and the hierarchical certificate.  The L3 bound is
// certified only via the hierarchical sufficient condition.
inline FragmentReport classify(const Declarations& decls, const Query& q, int n, int h,
                               UnionMode mode = UnionMode::Free) {
    FragmentReport r;
    r.n_param = n;
    r.h_param = h;

    MatchContext ctx;
    ctx.principal_universe = decls.principals;
    ctx.mode = mode;

    r.in_l0 = true;
    auto check_restrained = [&](const GrantPtr& g, int line, const std::string& what) {
        if (!is_restrained(g)) {
            r.in_l0 = false;
            r.offending.push_back({what, "unrestrained grant (an antecedent resource "
                                         "variable is missing from the conclusion)",
                                   line});
        }
    };
    for (const auto& t : q.trusted) check_restrained(t.grant, t.line, print(t));
    for (const auto& l : q.licenses) check_restrained(l.grant, l.line, print(l));

    r.in_l1 = !mentions_union(q);
    if (!r.in_l1) r.offending.push_back({"", "query mentions a principal union", 0});

    r.max_n_restriction = 0;
    auto check_n = [&](const GrantPtr& g, int line, const std::string& what) {
        int k = n_restriction(g);
        r.max_n_restriction = std::max(r.max_n_restriction, k);
        if (k > n)
            r.offending.push_back(
                {what, "grant is " + std::to_string(k) + "-restricted, above " +
                           std::to_string(n),
                 line});
    };
    for (const auto& t : q.trusted) check_n(t.grant, t.line, print(t));
    for (const auto& l : q.licenses) check_n(l.grant, l.line, print(l));
    r.n_ok = r.max_n_restriction <= n;

    Hierarchy hier = hierarchical_order(q.licenses, ctx);
    r.hierarchical = hier.ok;
    for (const auto& [from, to, may] : hier.edges)
        if (may) r.conservative_edges = true;
    if (hier.ok) {
        for (size_t i : hier.order) r.order_labels.push_back(print(q.licenses[i]));
        r.height_bound = 2 * static_cast<int>(q.licenses.size()) + 1;
    } else {
        for (size_t i : hier.cycle) r.cycle_labels.push_back(print(q.licenses[i]));
        r.offending.push_back({"", "license set is not hierarchical (affects cycle of length " +
                                       std::to_string(hier.cycle.size()) + ")",
                               0});
    }
    r.h_certified = r.hierarchical && (h < 0 || r.height_bound <= h);
    r.polynomial_path = r.in_l0 && r.in_l1 && r.n_ok && r.hierarchical;
    if (r.polynomial_path) {
        r.cost_note =
            "union-free restrained hierarchical query: evaluation is bounded by "
            "O(|L||E| + (|R|+|L|) |L|^(h-1) (|L|+|R|+|e|)^2) with h = " +
            std::to_string(r.height_bound);
    }
    return r;
}

inline nlohmann::json report_to_json(const FragmentReport& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["in_l0"] = r.in_l0;
    j["in_l1"] = r.in_l1;
    j["max_n_restriction"] = r.max_n_restriction;
    j["n_param"] = r.n_param;
    j["n_ok"] = r.n_ok;
    j["h_param"] = r.h_param;
    j["hierarchical"] = r.hierarchical;
    j["conservative_edges"] = r.conservative_edges;
    j["height_bound"] = r.height_bound;
    j["h_certified"] = r.h_certified;
    j["polynomial_path"] = r.polynomial_path;
    j["cost_note"] = r.cost_note;
    j["order"] = r.order_labels;
    j["cycle"] = r.cycle_labels;
    nlohmann::json off = nlohmann::json::array();
    for (const auto& o : r.offending)
        off.push_back({{"item", o.item}, {"reason", o.reason}, {"line", o.line}});
    j["offending"] = std::move(off);
    return j;
}

}  // namespace xrml

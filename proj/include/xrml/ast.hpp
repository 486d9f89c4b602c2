#pragma once

// Abstract syntax for the XrML fragment: principals, grants, licenses,
// conditions, conclusions and queries.  All nodes are immutable after
// construction and canonicalized on the way in, so structural equality
// doubles as equality modulo the union axioms (idempotence, commutativity,
// associativity, empty-set identity).

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xrml {

enum class Sort { Principal, Resource };

inline const char* sort_name(Sort s) {
    return s == Sort::Principal ? "principal" : "resource";
}

struct Variable {
    std::string name;
    Sort sort = Sort::Principal;

    bool operator==(const Variable& o) const { return name == o.name && sort == o.sort; }
    bool operator<(const Variable& o) const {
        if (name != o.name) return name < o.name;
        return static_cast<int>(sort) < static_cast<int>(o.sort);
    }
};

namespace detail {

inline size_t hash_combine(size_t seed, size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

inline size_t hash_string(const std::string& s) {
    return std::hash<std::string>{}(s);
}

}  // namespace detail

// A principal term: a finite union of primitive-principal names and
// principal variables, kept as sorted duplicate-free component lists.
// Ground terms (no variables) are exactly the canonical principal sets.
struct PrincipalTerm {
    std::vector<std::string> names;
    std::vector<std::string> vars;

    PrincipalTerm() = default;

    static PrincipalTerm make(std::vector<std::string> names, std::vector<std::string> vars = {}) {
        PrincipalTerm t;
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        t.names = std::move(names);
        t.vars = std::move(vars);
        return t;
    }

    static PrincipalTerm singleton(std::string name) { return make({std::move(name)}); }
    static PrincipalTerm empty() { return PrincipalTerm{}; }
    static PrincipalTerm var(std::string v) { return make({}, {std::move(v)}); }

    bool ground() const { return vars.empty(); }
    bool is_singleton() const { return vars.empty() && names.size() == 1; }

    // Componentwise union; realizes the grammar's prin ::= prin U prin.
    PrincipalTerm unite(const PrincipalTerm& o) const {
        std::vector<std::string> n = names;
        n.insert(n.end(), o.names.begin(), o.names.end());
        std::vector<std::string> v = vars;
        v.insert(v.end(), o.vars.begin(), o.vars.end());
        return make(std::move(n), std::move(v));
    }

    bool subset_of(const PrincipalTerm& o) const {
        // Defined on ground terms only.
        return std::includes(o.names.begin(), o.names.end(), names.begin(), names.end());
    }

    bool operator==(const PrincipalTerm& o) const { return names == o.names && vars == o.vars; }

    size_t hash() const {
        size_t h = 0xa11ce;
        for (const auto& n : names) h = detail::hash_combine(h, detail::hash_string(n));
        h = detail::hash_combine(h, 0x5e7);
        for (const auto& v : vars) h = detail::hash_combine(h, detail::hash_string(v));
        return h;
    }
};

struct Grant;
struct Condition;
struct Conclusion;
using GrantPtr = std::shared_ptr<const Grant>;
using CondPtr = std::shared_ptr<const Condition>;
using ConcPtr = std::shared_ptr<const Conclusion>;

// A resource is either a resource variable or a grant literal.
struct Resource {
    std::optional<std::string> var;
    GrantPtr grant;

    static Resource make_var(std::string v) {
        Resource r;
        r.var = std::move(v);
        return r;
    }
    static Resource make_grant(GrantPtr g) {
        Resource r;
        r.grant = std::move(g);
        return r;
    }

    bool is_var() const { return var.has_value(); }

    bool operator==(const Resource& o) const;
    size_t hash() const;
    bool closed() const;
};

enum class ConcKind { Property, Permission, NegProperty, NegPermission };

struct Conclusion {
    ConcKind kind;
    std::string prop;         // Property / NegProperty
    PrincipalTerm principal;  // all kinds
    Resource resource;        // Permission / NegPermission; right is always `issue`

    size_t hash_ = 0;
    bool closed_ = false;

    bool is_negative() const {
        return kind == ConcKind::NegProperty || kind == ConcKind::NegPermission;
    }
    bool is_permission() const {
        return kind == ConcKind::Permission || kind == ConcKind::NegPermission;
    }
};

enum class CondKind { True, Said, NegSaid, Conj };

struct Condition {
    CondKind kind;
    PrincipalTerm principal;        // Said / NegSaid
    ConcPtr conclusion;             // Said / NegSaid
    std::vector<CondPtr> conjuncts; // Conj: >= 2, flattened, no True members

    size_t hash_ = 0;
    bool closed_ = false;
};

struct Grant {
    std::vector<Variable> binders;
    CondPtr antecedent;
    ConcPtr consequent;

    size_t hash_ = 0;
    bool closed_ = false;
};

inline bool equal(const GrantPtr& a, const GrantPtr& b);
inline bool equal(const CondPtr& a, const CondPtr& b);
inline bool equal(const ConcPtr& a, const ConcPtr& b);

inline bool Resource::operator==(const Resource& o) const {
    if (is_var() != o.is_var()) return false;
    if (is_var()) return *var == *o.var;
    return equal(grant, o.grant);
}

inline size_t Resource::hash() const {
    if (is_var()) return detail::hash_combine(0x7a6, detail::hash_string(*var));
    return detail::hash_combine(0x96a, grant->hash_);
}

inline bool Resource::closed() const { return is_var() ? false : grant->closed_; }

inline bool equal(const ConcPtr& a, const ConcPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->hash_ != b->hash_ || a->kind != b->kind) return false;
    if (!(a->principal == b->principal)) return false;
    if (a->kind == ConcKind::Property || a->kind == ConcKind::NegProperty)
        return a->prop == b->prop;
    return a->resource == b->resource;
}

inline bool equal(const CondPtr& a, const CondPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->hash_ != b->hash_ || a->kind != b->kind) return false;
    switch (a->kind) {
        case CondKind::True:
            return true;
        case CondKind::Said:
        case CondKind::NegSaid:
            return a->principal == b->principal && equal(a->conclusion, b->conclusion);
        case CondKind::Conj: {
            if (a->conjuncts.size() != b->conjuncts.size()) return false;
            for (size_t i = 0; i < a->conjuncts.size(); ++i)
                if (!equal(a->conjuncts[i], b->conjuncts[i])) return false;
            return true;
        }
    }
    return false;
}

inline bool equal(const GrantPtr& a, const GrantPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->hash_ != b->hash_) return false;
    if (a->binders.size() != b->binders.size()) return false;
    for (size_t i = 0; i < a->binders.size(); ++i)
        if (!(a->binders[i] == b->binders[i])) return false;
    return equal(a->antecedent, b->antecedent) && equal(a->consequent, b->consequent);
}

// ---- constructors -------------------------------------------------------

namespace detail {

inline size_t conc_hash(const Conclusion& c) {
    size_t h = detail::hash_combine(0xc0,
                                    static_cast<size_t>(c.kind));
    h = detail::hash_combine(h, c.principal.hash());
    if (c.kind == ConcKind::Property || c.kind == ConcKind::NegProperty)
        h = detail::hash_combine(h, detail::hash_string(c.prop));
    else
        h = detail::hash_combine(h, c.resource.hash());
    return h;
}

inline bool term_closed_under(const PrincipalTerm& t) { return t.ground(); }

}  // namespace detail

class closed_computation;  // fwd, defined below via free functions

std::vector<Variable> free_variables(const GrantPtr& g);
std::vector<Variable> free_variables(const CondPtr& c);
std::vector<Variable> free_variables(const ConcPtr& c);

inline ConcPtr make_property(std::string prop, PrincipalTerm p, bool negated = false) {
    auto c = std::make_shared<Conclusion>();
    c->kind = negated ? ConcKind::NegProperty : ConcKind::Property;
    c->prop = std::move(prop);
    c->principal = std::move(p);
    c->closed_ = c->principal.ground();
    c->hash_ = detail::conc_hash(*c);
    return c;
}

inline ConcPtr make_permission(PrincipalTerm p, Resource r, bool negated = false) {
    auto c = std::make_shared<Conclusion>();
    c->kind = negated ? ConcKind::NegPermission : ConcKind::Permission;
    c->principal = std::move(p);
    c->resource = std::move(r);
    c->closed_ = c->principal.ground() && c->resource.closed();
    c->hash_ = detail::conc_hash(*c);
    return c;
}

inline CondPtr make_true() {
    static const CondPtr t = [] {
        auto c = std::make_shared<Condition>();
        c->kind = CondKind::True;
        c->closed_ = true;
        c->hash_ = 0x7121e;
        return c;
    }();
    return t;
}

inline CondPtr make_said(PrincipalTerm p, ConcPtr conc, bool negated = false) {
    auto c = std::make_shared<Condition>();
    c->kind = negated ? CondKind::NegSaid : CondKind::Said;
    c->principal = std::move(p);
    c->conclusion = std::move(conc);
    c->closed_ = c->principal.ground() && c->conclusion->closed_;
    size_t h = detail::hash_combine(negated ? 0x45a1d : 0x5a1d, c->principal.hash());
    c->hash_ = detail::hash_combine(h, c->conclusion->hash_);
    return c;
}

// Conjunction canonical form: flattened, True conjuncts dropped, duplicates
// removed (first occurrence kept), empty -> True, singleton stored bare.
inline CondPtr make_conjunction(const std::vector<CondPtr>& parts) {
    std::vector<CondPtr> flat;
    for (const auto& p : parts) {
        if (!p) throw std::logic_error("null condition in conjunction");
        if (p->kind == CondKind::True) continue;
        if (p->kind == CondKind::Conj)
            flat.insert(flat.end(), p->conjuncts.begin(), p->conjuncts.end());
        else
            flat.push_back(p);
    }
    std::vector<CondPtr> uniq;
    for (const auto& p : flat) {
        bool seen = false;
        for (const auto& q : uniq)
            if (equal(p, q)) { seen = true; break; }
        if (!seen) uniq.push_back(p);
    }
    if (uniq.empty()) return make_true();
    if (uniq.size() == 1) return uniq.front();
    auto c = std::make_shared<Condition>();
    c->kind = CondKind::Conj;
    c->conjuncts = std::move(uniq);
    c->closed_ = true;
    size_t h = 0xc0a9;
    for (const auto& p : c->conjuncts) {
        c->closed_ = c->closed_ && p->closed_;
        h = detail::hash_combine(h, p->hash_);
    }
    c->hash_ = h;
    return c;
}

namespace detail {

inline void collect_free(const ConcPtr& c, const std::vector<Variable>& shadow,
                         std::vector<Variable>& out);

inline void collect_free(const CondPtr& c, const std::vector<Variable>& shadow,
                         std::vector<Variable>& out);

inline void add_var(std::vector<Variable>& out, const Variable& v) {
    for (const auto& w : out)
        if (w == v) return;
    out.push_back(v);
}

inline bool shadowed(const std::vector<Variable>& shadow, const std::string& name) {
    for (const auto& v : shadow)
        if (v.name == name) return true;
    return false;
}

inline void collect_free(const GrantPtr& g, std::vector<Variable> shadow,
                         std::vector<Variable>& out) {
    shadow.insert(shadow.end(), g->binders.begin(), g->binders.end());
    collect_free(g->antecedent, shadow, out);
    collect_free(g->consequent, shadow, out);
}

inline void collect_free_prin(const PrincipalTerm& t, const std::vector<Variable>& shadow,
                              std::vector<Variable>& out) {
    for (const auto& v : t.vars)
        if (!shadowed(shadow, v)) add_var(out, Variable{v, Sort::Principal});
}

inline void collect_free(const ConcPtr& c, const std::vector<Variable>& shadow,
                         std::vector<Variable>& out) {
    collect_free_prin(c->principal, shadow, out);
    if (c->is_permission()) {
        if (c->resource.is_var()) {
            if (!shadowed(shadow, *c->resource.var))
                add_var(out, Variable{*c->resource.var, Sort::Resource});
        } else {
            collect_free(c->resource.grant, shadow, out);
        }
    }
}

inline void collect_free(const CondPtr& c, const std::vector<Variable>& shadow,
                         std::vector<Variable>& out) {
    switch (c->kind) {
        case CondKind::True:
            return;
        case CondKind::Said:
        case CondKind::NegSaid:
            collect_free_prin(c->principal, shadow, out);
            collect_free(c->conclusion, shadow, out);
            return;
        case CondKind::Conj:
            for (const auto& p : c->conjuncts) collect_free(p, shadow, out);
            return;
    }
}

}  // namespace detail

inline std::vector<Variable> free_variables(const ConcPtr& c) {
    std::vector<Variable> out;
    detail::collect_free(c, {}, out);
    return out;
}

inline std::vector<Variable> free_variables(const CondPtr& c) {
    std::vector<Variable> out;
    detail::collect_free(c, {}, out);
    return out;
}

inline std::vector<Variable> free_variables(const GrantPtr& g) {
    std::vector<Variable> out;
    detail::collect_free(g, {}, out);
    return out;
}

// Builds a grant, checking the binder discipline: binders are distinct, each
// binder occurs in the body with a consistent sort.  Variables free in the
// body and not bound here may be bound by an enclosing grant (this happens in
// nested grant literals); whole-statement closedness is the parser's job.
inline GrantPtr make_grant(std::vector<Variable> binders, CondPtr antecedent,
                           ConcPtr consequent) {
    auto g = std::make_shared<Grant>();
    g->binders = std::move(binders);
    g->antecedent = antecedent ? std::move(antecedent) : make_true();
    g->consequent = std::move(consequent);

    for (size_t i = 0; i < g->binders.size(); ++i)
        for (size_t j = i + 1; j < g->binders.size(); ++j)
            if (g->binders[i].name == g->binders[j].name)
                throw std::logic_error("duplicate binder: " + g->binders[i].name);

    std::vector<Variable> body_free;
    detail::collect_free(g->antecedent, {}, body_free);
    detail::collect_free(g->consequent, {}, body_free);
    for (const auto& v : body_free)
        for (const auto& b : g->binders)
            if (b.name == v.name && b.sort != v.sort)
                throw std::logic_error("sort mismatch for variable " + v.name);
    for (const auto& b : g->binders) {
        bool used = false;
        for (const auto& v : body_free)
            if (v.name == b.name) { used = true; break; }
        if (!used) throw std::logic_error("unused bound variable: " + b.name);
    }

    std::vector<Variable> still_free;
    detail::collect_free(g->antecedent, g->binders, still_free);
    detail::collect_free(g->consequent, g->binders, still_free);
    g->closed_ = still_free.empty();
    size_t h = 0x96a27;
    for (const auto& b : g->binders) {
        h = detail::hash_combine(h, detail::hash_string(b.name));
        h = detail::hash_combine(h, static_cast<size_t>(b.sort));
    }
    h = detail::hash_combine(h, g->antecedent->hash_);
    h = detail::hash_combine(h, g->consequent->hash_);
    g->hash_ = h;
    return g;
}

// A grant with unused binders silently narrowed to the used ones.  Handy for
// programmatic encoders that substitute binders away.
inline GrantPtr make_grant_trimmed(std::vector<Variable> binders, CondPtr antecedent,
                                   ConcPtr consequent) {
    if (!antecedent) antecedent = make_true();
    std::vector<Variable> body_free;
    detail::collect_free(antecedent, {}, body_free);
    detail::collect_free(consequent, {}, body_free);
    std::vector<Variable> used;
    for (const auto& b : binders)
        for (const auto& v : body_free)
            if (v.name == b.name) { used.push_back(b); break; }
    return make_grant(std::move(used), std::move(antecedent), std::move(consequent));
}

inline bool is_closed(const ConcPtr& c) { return c->closed_; }
inline bool is_closed(const CondPtr& c) { return c->closed_; }
inline bool is_closed(const GrantPtr& g) { return g->closed_; }
inline bool is_closed(const Resource& r) { return r.closed(); }

// ---- total order (used for canonical set keys) --------------------------

int compare(const GrantPtr& a, const GrantPtr& b);
int compare(const CondPtr& a, const CondPtr& b);
int compare(const ConcPtr& a, const ConcPtr& b);

namespace detail {

inline int cmp3(size_t a, size_t b) { return a < b ? -1 : (a > b ? 1 : 0); }

inline int compare_strings(const std::vector<std::string>& a,
                           const std::vector<std::string>& b) {
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return cmp3(a.size(), b.size());
}

inline int compare_prin(const PrincipalTerm& a, const PrincipalTerm& b) {
    if (int c = compare_strings(a.names, b.names)) return c;
    return compare_strings(a.vars, b.vars);
}

inline int compare_resource(const Resource& a, const Resource& b) {
    if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
    if (a.is_var()) return a.var->compare(*b.var) < 0 ? -1 : (*a.var == *b.var ? 0 : 1);
    return compare(a.grant, b.grant);
}

}  // namespace detail

inline int compare(const ConcPtr& a, const ConcPtr& b) {
    if (a == b) return 0;
    if (a->kind != b->kind)
        return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
    if (int c = detail::compare_prin(a->principal, b->principal)) return c;
    if (a->kind == ConcKind::Property || a->kind == ConcKind::NegProperty)
        return a->prop == b->prop ? 0 : (a->prop < b->prop ? -1 : 1);
    return detail::compare_resource(a->resource, b->resource);
}

inline int compare(const CondPtr& a, const CondPtr& b) {
    if (a == b) return 0;
    if (a->kind != b->kind)
        return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
    switch (a->kind) {
        case CondKind::True:
            return 0;
        case CondKind::Said:
        case CondKind::NegSaid:
            if (int c = detail::compare_prin(a->principal, b->principal)) return c;
            return compare(a->conclusion, b->conclusion);
        case CondKind::Conj: {
            size_t n = std::min(a->conjuncts.size(), b->conjuncts.size());
            for (size_t i = 0; i < n; ++i)
                if (int c = compare(a->conjuncts[i], b->conjuncts[i])) return c;
            return detail::cmp3(a->conjuncts.size(), b->conjuncts.size());
        }
    }
    return 0;
}

inline int compare(const GrantPtr& a, const GrantPtr& b) {
    if (a == b) return 0;
    if (int c = detail::cmp3(a->binders.size(), b->binders.size())) return c;
    for (size_t i = 0; i < a->binders.size(); ++i) {
        const auto& x = a->binders[i];
        const auto& y = b->binders[i];
        if (x.name != y.name) return x.name < y.name ? -1 : 1;
        if (x.sort != y.sort) return static_cast<int>(x.sort) < static_cast<int>(y.sort) ? -1 : 1;
    }
    if (int c = compare(a->antecedent, b->antecedent)) return c;
    return compare(a->consequent, b->consequent);
}

// ---- licenses, declarations, queries -------------------------------------

struct License {
    PrincipalTerm issuer;  // ground singleton
    GrantPtr grant;        // closed
    int seq = 0;           // statement order; drives deterministic evaluation
    int line = 0;          // source line when parsed, 0 otherwise
};

struct TrustedGrant {
    GrantPtr grant;  // closed
    int seq = 0;
    int line = 0;
};

struct Declarations {
    std::vector<std::string> principals;  // primitivePrin, sorted
    std::vector<std::string> properties;  // primitiveProp, sorted
    bool negation = false;                // negation extension enabled

    bool has_principal(const std::string& n) const {
        return std::binary_search(principals.begin(), principals.end(), n);
    }
    bool has_property(const std::string& n) const {
        return std::binary_search(properties.begin(), properties.end(), n);
    }
    void normalize() {
        std::sort(principals.begin(), principals.end());
        principals.erase(std::unique(principals.begin(), principals.end()), principals.end());
        std::sort(properties.begin(), properties.end());
        properties.erase(std::unique(properties.begin(), properties.end()), properties.end());
    }
};

struct Query {
    ConcPtr goal;                   // closed
    std::vector<License> licenses;  // L, statement order
    std::vector<TrustedGrant> trusted;  // R, statement order
    std::vector<ConcPtr> excluded;  // E; empty for top-level user queries
};

inline bool contains(const std::vector<ConcPtr>& set, const ConcPtr& e) {
    for (const auto& x : set)
        if (equal(x, e)) return true;
    return false;
}

inline bool contains(const std::vector<CondPtr>& set, const CondPtr& d) {
    for (const auto& x : set)
        if (equal(x, d)) return true;
    return false;
}

inline bool contains_grant(const std::vector<GrantPtr>& set, const GrantPtr& g) {
    for (const auto& x : set)
        if (equal(x, g)) return true;
    return false;
}

// True when the node mentions a negated Said condition or negated conclusion.
bool mentions_negation(const GrantPtr& g);

namespace detail {

inline bool mentions_negation(const ConcPtr& c);

inline bool mentions_negation(const CondPtr& c) {
    switch (c->kind) {
        case CondKind::True:
            return false;
        case CondKind::NegSaid:
            return true;
        case CondKind::Said:
            return mentions_negation(c->conclusion);
        case CondKind::Conj:
            for (const auto& p : c->conjuncts)
                if (mentions_negation(p)) return true;
            return false;
    }
    return false;
}

inline bool mentions_negation(const ConcPtr& c) {
    if (c->is_negative()) return true;
    if (c->is_permission() && !c->resource.is_var())
        return xrml::mentions_negation(c->resource.grant);
    return false;
}

}  // namespace detail

inline bool mentions_negation(const GrantPtr& g) {
    return detail::mentions_negation(g->antecedent) || detail::mentions_negation(g->consequent);
}

inline bool mentions_negation(const Query& q) {
    if (q.goal && detail::mentions_negation(q.goal)) return true;
    for (const auto& l : q.licenses)
        if (mentions_negation(l.grant)) return true;
    for (const auto& t : q.trusted)
        if (mentions_negation(t.grant)) return true;
    for (const auto& e : q.excluded)
        if (detail::mentions_negation(e)) return true;
    return false;
}

// True when the node mentions the union operator, i.e. a principal term with
// more than one component.  The empty set and singletons do not count.
bool mentions_union(const GrantPtr& g);

namespace detail {

inline bool prin_has_union(const PrincipalTerm& t) { return t.names.size() + t.vars.size() > 1; }

inline bool mentions_union(const ConcPtr& c);

inline bool mentions_union(const CondPtr& c) {
    switch (c->kind) {
        case CondKind::True:
            return false;
        case CondKind::Said:
        case CondKind::NegSaid:
            return prin_has_union(c->principal) || mentions_union(c->conclusion);
        case CondKind::Conj:
            for (const auto& p : c->conjuncts)
                if (mentions_union(p)) return true;
            return false;
    }
    return false;
}

inline bool mentions_union(const ConcPtr& c) {
    if (prin_has_union(c->principal)) return true;
    if (c->is_permission() && !c->resource.is_var())
        return xrml::mentions_union(c->resource.grant);
    return false;
}

}  // namespace detail

inline bool mentions_union(const GrantPtr& g) {
    return detail::mentions_union(g->antecedent) || detail::mentions_union(g->consequent);
}

inline bool mentions_union(const Query& q) {
    if (q.goal && detail::mentions_union(q.goal)) return true;
    for (const auto& l : q.licenses)
        if (detail::prin_has_union(l.issuer) || mentions_union(l.grant)) return true;
    for (const auto& t : q.trusted)
        if (mentions_union(t.grant)) return true;
    for (const auto& e : q.excluded)
        if (detail::mentions_union(e)) return true;
    return false;
}

// Collects every closed grant occurring in resource position anywhere inside
// the node, recursively, in first-occurrence order.
void collect_closed_resources(const ConcPtr& c, std::vector<GrantPtr>& out);
void collect_closed_resources(const CondPtr& c, std::vector<GrantPtr>& out);

namespace detail {

inline void add_resource(std::vector<GrantPtr>& out, const GrantPtr& g) {
    if (!contains_grant(out, g)) out.push_back(g);
}

inline void collect_resources_grant(const GrantPtr& g, std::vector<GrantPtr>& out) {
    xrml::collect_closed_resources(g->antecedent, out);
    xrml::collect_closed_resources(g->consequent, out);
}

}  // namespace detail

inline void collect_closed_resources(const ConcPtr& c, std::vector<GrantPtr>& out) {
    if (c->is_permission() && !c->resource.is_var() && c->resource.grant->closed_) {
        detail::add_resource(out, c->resource.grant);
        detail::collect_resources_grant(c->resource.grant, out);
    }
}

inline void collect_closed_resources(const CondPtr& c, std::vector<GrantPtr>& out) {
    switch (c->kind) {
        case CondKind::True:
            return;
        case CondKind::Said:
        case CondKind::NegSaid:
            collect_closed_resources(c->conclusion, out);
            return;
        case CondKind::Conj:
            for (const auto& p : c->conjuncts) collect_closed_resources(p, out);
            return;
    }
}

struct GrantPtrHash {
    size_t operator()(const GrantPtr& g) const { return g->hash_; }
};
struct GrantPtrEq {
    bool operator()(const GrantPtr& a, const GrantPtr& b) const { return equal(a, b); }
};
struct CondPtrHash {
    size_t operator()(const CondPtr& c) const { return c->hash_; }
};
struct CondPtrEq {
    bool operator()(const CondPtr& a, const CondPtr& b) const { return equal(a, b); }
};
struct ConcPtrHash {
    size_t operator()(const ConcPtr& c) const { return c->hash_; }
};
struct ConcPtrEq {
    bool operator()(const ConcPtr& a, const ConcPtr& b) const { return equal(a, b); }
};

}  // namespace xrml

#pragma once

// Closed substitutions, instantiation and conclusion matching.  Matching is
// one-sided: targets are always closed, so no general unification is needed.

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "xrml/ast.hpp"

namespace xrml {

enum class UnionMode {
    Free,  // principal variables range over singletons of primitivePrin
    Full,  // principal variables range over all canonical subsets (incl. {})
};

struct GroundValue {
    std::optional<PrincipalTerm> prin;  // ground
    GrantPtr grant;                     // closed

    static GroundValue principal(PrincipalTerm p) {
        GroundValue v;
        v.prin = std::move(p);
        return v;
    }
    static GroundValue resource(GrantPtr g) {
        GroundValue v;
        v.grant = std::move(g);
        return v;
    }
    bool is_principal() const { return prin.has_value(); }

    bool operator==(const GroundValue& o) const {
        if (is_principal() != o.is_principal()) return false;
        if (is_principal()) return *prin == *o.prin;
        return equal(grant, o.grant);
    }
};

class Substitution {
   public:
    void bind(const Variable& v, GroundValue val) {
        if ((v.sort == Sort::Principal) != val.is_principal())
            throw std::logic_error("sort mismatch binding " + v.name);
        items_[v] = std::move(val);
    }

    const GroundValue* find(const std::string& name) const {
        for (const auto& [v, val] : items_)
            if (v.name == name) return &val;
        return nullptr;
    }

    bool covers(const Variable& v) const { return items_.count(v) > 0; }
    size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    // Disjoint-domain composition.
    Substitution composed_with(const Substitution& o) const {
        Substitution s = *this;
        for (const auto& [v, val] : o.items_) s.items_[v] = val;
        return s;
    }

   private:
    std::map<Variable, GroundValue> items_;
};

// ---- instantiation -------------------------------------------------------

namespace subst_detail {

inline PrincipalTerm subst_prin(const PrincipalTerm& t, const Substitution& s,
                                const std::vector<Variable>& shadow) {
    if (t.vars.empty()) return t;
    PrincipalTerm out = PrincipalTerm::make(t.names);
    bool changed = false;
    std::vector<std::string> remaining;
    for (const auto& v : t.vars) {
        if (!detail::shadowed(shadow, v)) {
            if (const GroundValue* val = s.find(v)) {
                out = out.unite(*val->prin);
                changed = true;
                continue;
            }
        }
        remaining.push_back(v);
    }
    if (!changed) return t;
    return out.unite(PrincipalTerm::make({}, std::move(remaining)));
}

ConcPtr subst_conc(const ConcPtr& c, const Substitution& s, const std::vector<Variable>& shadow);
CondPtr subst_cond(const CondPtr& c, const Substitution& s, const std::vector<Variable>& shadow);

inline GrantPtr subst_grant(const GrantPtr& g, const Substitution& s,
                            std::vector<Variable> shadow) {
    if (g->closed_) return g;
    shadow.insert(shadow.end(), g->binders.begin(), g->binders.end());
    CondPtr a = subst_cond(g->antecedent, s, shadow);
    ConcPtr c = subst_conc(g->consequent, s, shadow);
    if (a == g->antecedent && c == g->consequent) return g;
    return make_grant(g->binders, std::move(a), std::move(c));
}

inline Resource subst_resource(const Resource& r, const Substitution& s,
                               const std::vector<Variable>& shadow) {
    if (r.is_var()) {
        if (!detail::shadowed(shadow, *r.var)) {
            if (const GroundValue* val = s.find(*r.var)) return Resource::make_grant(val->grant);
        }
        return r;
    }
    GrantPtr g = subst_grant(r.grant, s, shadow);
    if (g == r.grant) return r;
    return Resource::make_grant(std::move(g));
}

inline ConcPtr subst_conc(const ConcPtr& c, const Substitution& s,
                          const std::vector<Variable>& shadow) {
    if (c->closed_) return c;
    PrincipalTerm p = subst_prin(c->principal, s, shadow);
    if (c->kind == ConcKind::Property || c->kind == ConcKind::NegProperty) {
        if (p == c->principal) return c;
        return make_property(c->prop, std::move(p), c->is_negative());
    }
    Resource r = subst_resource(c->resource, s, shadow);
    if (p == c->principal && r == c->resource) return c;
    return make_permission(std::move(p), std::move(r), c->is_negative());
}

inline CondPtr subst_cond(const CondPtr& c, const Substitution& s,
                          const std::vector<Variable>& shadow) {
    if (c->closed_) return c;
    switch (c->kind) {
        case CondKind::True:
            return c;
        case CondKind::Said:
        case CondKind::NegSaid: {
            PrincipalTerm p = subst_prin(c->principal, s, shadow);
            ConcPtr e = subst_conc(c->conclusion, s, shadow);
            if (p == c->principal && e == c->conclusion) return c;
            return make_said(std::move(p), std::move(e), c->kind == CondKind::NegSaid);
        }
        case CondKind::Conj: {
            std::vector<CondPtr> parts;
            parts.reserve(c->conjuncts.size());
            bool changed = false;
            for (const auto& q : c->conjuncts) {
                CondPtr r = subst_cond(q, s, shadow);
                changed = changed || r != q;
                parts.push_back(std::move(r));
            }
            if (!changed) return c;
            return make_conjunction(parts);
        }
    }
    return c;
}

}  // namespace subst_detail

// Partial instantiation: unbound variables are left in place.
inline ConcPtr subst(const ConcPtr& c, const Substitution& s) {
    return subst_detail::subst_conc(c, s, {});
}
inline CondPtr subst(const CondPtr& c, const Substitution& s) {
    return subst_detail::subst_cond(c, s, {});
}
inline GrantPtr subst(const GrantPtr& g, const Substitution& s) {
    return subst_detail::subst_grant(g, s, {});
}

// Full application: the substitution must cover every free variable.
namespace subst_detail {
template <class Node>
Node apply_checked(const Substitution& s, const Node& n) {
    Node out = subst(n, s);
    if (!is_closed(out)) throw std::invalid_argument("substitution leaves a free variable");
    return out;
}
}  // namespace subst_detail

inline ConcPtr apply(const Substitution& s, const ConcPtr& n) {
    return subst_detail::apply_checked(s, n);
}
inline CondPtr apply(const Substitution& s, const CondPtr& n) {
    return subst_detail::apply_checked(s, n);
}
inline GrantPtr apply(const Substitution& s, const GrantPtr& n) {
    return subst_detail::apply_checked(s, n);
}

// ---- matching ------------------------------------------------------------

enum class MatchMode {
    Exact,   // e_g(sigma) = e, used by Auth2/Holds2/Holds
    Subset,  // additionally p_g(sigma) subset of p at the conclusion's
             // top-level principal, legacy Auth's subset assumption
};

struct MatchContext {
    std::vector<std::string> principal_universe;  // primitivePrin, sorted
    UnionMode mode = UnionMode::Free;
};

namespace match_detail {

// Candidate ground principals a variable may take when matched against the
// ground set `target`.
inline std::vector<PrincipalTerm> principal_candidates(const PrincipalTerm& target,
                                                       UnionMode mode) {
    std::vector<PrincipalTerm> out;
    if (mode == UnionMode::Free) {
        for (const auto& n : target.names) out.push_back(PrincipalTerm::singleton(n));
        return out;
    }
    size_t n = target.names.size();
    if (n > 20) throw std::logic_error("principal set too large to enumerate subsets");
    for (size_t bits = 0; bits < (size_t{1} << n); ++bits) {
        std::vector<std::string> names;
        for (size_t i = 0; i < n; ++i)
            if (bits & (size_t{1} << i)) names.push_back(target.names[i]);
        out.push_back(PrincipalTerm::make(std::move(names)));
    }
    return out;
}

struct Matcher {
    const MatchContext& ctx;
    std::vector<Substitution> results;

    using Cont = std::function<void(Substitution&)>;

    void match_prin(const PrincipalTerm& pat, const PrincipalTerm& tgt, bool subset_rel,
                    const std::vector<Variable>& shadow, Substitution& s, const Cont& k) {
        // Shadowed pattern variables stand for the literal's own binders and
        // must appear verbatim in the target.
        std::vector<std::string> pat_shadowed, pat_open;
        for (const auto& v : pat.vars)
            (detail::shadowed(shadow, v) ? pat_shadowed : pat_open).push_back(v);
        if (pat_shadowed != tgt.vars) return;

        PrincipalTerm known = PrincipalTerm::make(pat.names);
        std::vector<std::string> unbound;
        for (const auto& v : pat_open) {
            if (const GroundValue* val = s.find(v))
                known = known.unite(*val->prin);
            else
                unbound.push_back(v);
        }
        if (!known.subset_of(tgt)) return;
        if (unbound.empty()) {
            if (!subset_rel && !(known.names == tgt.names)) return;
            k(s);
            return;
        }
        std::vector<PrincipalTerm> cands = principal_candidates(tgt, ctx.mode);
        assign_vars(unbound, 0, cands, known, tgt, subset_rel, s, k);
    }

    void assign_vars(const std::vector<std::string>& vars, size_t i,
                     const std::vector<PrincipalTerm>& cands, PrincipalTerm acc,
                     const PrincipalTerm& tgt, bool subset_rel, Substitution& s,
                     const Cont& k) {
        if (i == vars.size()) {
            if (!subset_rel && !(acc.names == tgt.names)) return;
            k(s);
            return;
        }
        Variable v{vars[i], Sort::Principal};
        for (const auto& c : cands) {
            Substitution s2 = s;
            s2.bind(v, GroundValue::principal(c));
            PrincipalTerm acc2 = acc.unite(c);
            assign_vars(vars, i + 1, cands, std::move(acc2), tgt, subset_rel, s2, k);
        }
    }

    void match_resource(const Resource& pat, const Resource& tgt,
                        const std::vector<Variable>& shadow, Substitution& s, const Cont& k) {
        if (pat.is_var()) {
            if (detail::shadowed(shadow, *pat.var)) {
                if (tgt.is_var() && *tgt.var == *pat.var) k(s);
                return;
            }
            if (tgt.is_var() || !tgt.grant->closed_) return;  // closed values only
            if (const GroundValue* val = s.find(*pat.var)) {
                if (equal(val->grant, tgt.grant)) k(s);
                return;
            }
            Substitution s2 = s;
            s2.bind({*pat.var, Sort::Resource}, GroundValue::resource(tgt.grant));
            k(s2);
            return;
        }
        if (tgt.is_var()) return;
        match_grant(pat.grant, tgt.grant, shadow, s, k);
    }

    void match_grant(const GrantPtr& pat, const GrantPtr& tgt,
                     std::vector<Variable> shadow, Substitution& s, const Cont& k) {
        if (pat->binders.size() != tgt->binders.size()) return;
        for (size_t i = 0; i < pat->binders.size(); ++i)
            if (!(pat->binders[i] == tgt->binders[i])) return;
        shadow.insert(shadow.end(), pat->binders.begin(), pat->binders.end());
        match_cond(pat->antecedent, tgt->antecedent, shadow, s, [&](Substitution& s2) {
            match_conc(pat->consequent, tgt->consequent, false, shadow, s2, k);
        });
    }

    void match_cond(const CondPtr& pat, const CondPtr& tgt,
                    const std::vector<Variable>& shadow, Substitution& s, const Cont& k) {
        if (pat->kind != tgt->kind) return;
        switch (pat->kind) {
            case CondKind::True:
                k(s);
                return;
            case CondKind::Said:
            case CondKind::NegSaid:
                match_prin(pat->principal, tgt->principal, false, shadow, s, [&](Substitution& s2) {
                    match_conc(pat->conclusion, tgt->conclusion, false, shadow, s2, k);
                });
                return;
            case CondKind::Conj: {
                if (pat->conjuncts.size() != tgt->conjuncts.size()) return;
                match_conj(pat, tgt, 0, shadow, s, k);
                return;
            }
        }
    }

    void match_conj(const CondPtr& pat, const CondPtr& tgt, size_t i,
                    const std::vector<Variable>& shadow, Substitution& s, const Cont& k) {
        if (i == pat->conjuncts.size()) {
            k(s);
            return;
        }
        match_cond(pat->conjuncts[i], tgt->conjuncts[i], shadow, s, [&](Substitution& s2) {
            match_conj(pat, tgt, i + 1, shadow, s2, k);
        });
    }

    void match_conc(const ConcPtr& pat, const ConcPtr& tgt, bool subset_top,
                    const std::vector<Variable>& shadow, Substitution& s, const Cont& k) {
        if (pat->kind != tgt->kind) return;
        if (pat->kind == ConcKind::Property || pat->kind == ConcKind::NegProperty) {
            if (pat->prop != tgt->prop) return;
            match_prin(pat->principal, tgt->principal, subset_top, shadow, s, k);
            return;
        }
        match_prin(pat->principal, tgt->principal, subset_top, shadow, s, [&](Substitution& s2) {
            match_resource(pat->resource, tgt->resource, shadow, s2, k);
        });
    }
};

}  // namespace match_detail

// All substitutions over the pattern's variables making it match the closed
// target.  Exact mode requires structural equality after application; subset
// mode relaxes the conclusion's top-level principal to set containment.
inline std::vector<Substitution> match_conclusion(const ConcPtr& pattern, const ConcPtr& target,
                                                  MatchMode mode, const MatchContext& ctx) {
    if (!target->closed_) throw std::logic_error("match target must be closed");
    match_detail::Matcher m{ctx, {}};
    Substitution s;
    m.match_conc(pattern, target, mode == MatchMode::Subset, {}, s,
                 [&](Substitution& done) { m.results.push_back(done); });
    return std::move(m.results);
}

// The ground principals a principal variable ranges over.
inline std::vector<PrincipalTerm> principal_range(const MatchContext& ctx) {
    if (ctx.mode == UnionMode::Free) {
        std::vector<PrincipalTerm> out;
        for (const auto& n : ctx.principal_universe) out.push_back(PrincipalTerm::singleton(n));
        return out;
    }
    PrincipalTerm all = PrincipalTerm::make(ctx.principal_universe);
    return match_detail::principal_candidates(all, UnionMode::Full);
}

// Every A-closed substitution over `vars`: principal variables range over the
// mode's principal universe, resource variables over A, in odometer order
// with the last variable varying fastest.
inline std::vector<Substitution> enumerate_substitutions(const std::vector<Variable>& vars,
                                                         const std::vector<GrantPtr>& A,
                                                         const MatchContext& ctx) {
    std::vector<PrincipalTerm> prange = principal_range(ctx);
    std::vector<Substitution> out;
    std::vector<size_t> radix(vars.size());
    for (size_t i = 0; i < vars.size(); ++i)
        radix[i] = vars[i].sort == Sort::Principal ? prange.size() : A.size();
    for (size_t r : radix)
        if (r == 0) return out;  // empty range, no substitutions

    std::vector<size_t> idx(vars.size(), 0);
    while (true) {
        Substitution s;
        for (size_t i = 0; i < vars.size(); ++i) {
            if (vars[i].sort == Sort::Principal)
                s.bind(vars[i], GroundValue::principal(prange[idx[i]]));
            else
                s.bind(vars[i], GroundValue::resource(A[idx[i]]));
        }
        out.push_back(std::move(s));
        size_t i = vars.size();
        while (i > 0) {
            --i;
            if (++idx[i] < radix[i]) break;
            idx[i] = 0;
            if (i == 0) return out;
        }
        if (vars.empty()) return out;
    }
}

}  // namespace xrml

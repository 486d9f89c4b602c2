#pragma once

// Translation of licenses into ground many-sorted logic with a validity
// operator, plus a brute-force validity oracle.
//
// The translation takes four parameters: the issued licenses L, a finite
// resource set A, the Said conditions S currently under expansion, and the
// excluded conclusions E.  Universal quantifiers expand over A (resource
// sort) or the canonical principal universe (principal sort).  A Said
// condition not in S becomes Val((and of the issuer's grant translations,
// with E = {}) => translated conclusion) with the condition added to S.
//
// Two deliberately flawed alternatives are kept for comparison: alt1 leaves
// quantifiers in place, alt2 drops the Val operator (and fixes E = {}).
//
// Validity over acceptable models is decided by exhaustive truth-assignment
// search over the formula's ground atoms (canonical principal sets realize
// the union axioms, so structural atom equality is acceptable-model
// equality).  The search runs as a countermodel hunt with unit propagation;
// a configurable branching budget keeps it honest: exceeding the budget
// raises a capacity error, never a wrong answer.

#include <cassert>
#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "xrml/ast.hpp"
#include "xrml/engine.hpp"
#include "xrml/printer.hpp"
#include "xrml/substitution.hpp"

namespace xrml {
namespace logic {

class CapacityError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class FKind { True, False, Atom, Not, And, Or, Implies, Val, Forall, Equal };

struct Formula;
using FormulaPtr = const Formula*;

struct Formula {
    FKind kind = FKind::True;
    // Atom payload: a property atom Pr(p) or a permission atom
    // Perm(p, issue, s) where s is a resource constant (closed grant), an
    // open grant (a fully applied resource function) or a resource variable.
    bool atom_is_prop = false;
    std::string prop;
    PrincipalTerm principal;
    Resource resource;
    bool has_resource = false;

    std::vector<FormulaPtr> args;
    Variable var;  // Forall

    size_t hash = 0;
    bool ground = true;
    uint32_t id = 0;
};

struct OracleOptions {
    int max_branch_atoms = 24;  // branching budget for the validity search
    bool resolve_val_eagerly = false;
};

enum class Variant { Main, Alt1, Alt2 };

class LogicContext {
   public:
    LogicContext(const Declarations& decls, UnionMode mode = UnionMode::Free,
                 OracleOptions oracle = {})
        : decls_(&decls), mode_(mode), oracle_(oracle) {
        MatchContext mctx;
        mctx.principal_universe = decls.principals;
        mctx.mode = mode;
        prange_ = principal_range(mctx);
    }

    const Declarations& decls() const { return *decls_; }
    UnionMode mode() const { return mode_; }
    const OracleOptions& oracle() const { return oracle_; }
    const std::vector<PrincipalTerm>& principal_universe() const { return prange_; }

    void set_resource_universe(std::vector<GrantPtr> a) {
        resources_ = std::move(a);
        resolve_memo_.clear();
        valid_memo_.clear();
    }
    const std::vector<GrantPtr>& resource_universe() const { return resources_; }

    // ---- interned constructors ----

    FormulaPtr truef() { return intern_simple(FKind::True); }
    FormulaPtr falsef() { return intern_simple(FKind::False); }

    FormulaPtr atom_prop(std::string prop, PrincipalTerm p) {
        Formula f;
        f.kind = FKind::Atom;
        f.atom_is_prop = true;
        f.prop = std::move(prop);
        f.principal = std::move(p);
        f.ground = f.principal.ground();
        f.hash = detail::hash_combine(detail::hash_combine(0xa70, detail::hash_string(f.prop)),
                                      f.principal.hash());
        return intern(std::move(f));
    }

    FormulaPtr atom_perm(PrincipalTerm p, Resource r) {
        Formula f;
        f.kind = FKind::Atom;
        f.atom_is_prop = false;
        f.principal = std::move(p);
        f.resource = std::move(r);
        f.has_resource = true;
        f.ground = f.principal.ground() && !f.resource.is_var() && f.resource.grant->closed_;
        f.hash = detail::hash_combine(detail::hash_combine(0xa71, f.principal.hash()),
                                      f.resource.hash());
        return intern(std::move(f));
    }

    FormulaPtr mk_not(FormulaPtr a) {
        if (a->kind == FKind::True) return falsef();
        if (a->kind == FKind::False) return truef();
        if (a->kind == FKind::Not) return a->args[0];
        return intern_args(FKind::Not, {a});
    }

    // Conjunction/disjunction with constant folding.  Only small nested
    // nodes of the same kind are inlined: wide children stay nested, so a
    // conjunction over big shared translations costs O(#children) and reuses
    // the shared nodes instead of copying their contents.
    static constexpr size_t kFlattenChild = 16;

    FormulaPtr mk_and(std::vector<FormulaPtr> parts) {
        std::vector<FormulaPtr> flat;
        for (FormulaPtr p : parts) {
            if (p->kind == FKind::True) continue;
            if (p->kind == FKind::False) return falsef();
            if (p->kind == FKind::And && p->args.size() <= kFlattenChild)
                flat.insert(flat.end(), p->args.begin(), p->args.end());
            else
                flat.push_back(p);
        }
        dedup(flat);
        if (flat.empty()) return truef();
        if (flat.size() == 1) return flat[0];
        return intern_args(FKind::And, std::move(flat));
    }

    FormulaPtr mk_or(std::vector<FormulaPtr> parts) {
        std::vector<FormulaPtr> flat;
        for (FormulaPtr p : parts) {
            if (p->kind == FKind::False) continue;
            if (p->kind == FKind::True) return truef();
            if (p->kind == FKind::Or && p->args.size() <= kFlattenChild)
                flat.insert(flat.end(), p->args.begin(), p->args.end());
            else
                flat.push_back(p);
        }
        dedup(flat);
        if (flat.empty()) return falsef();
        if (flat.size() == 1) return flat[0];
        return intern_args(FKind::Or, std::move(flat));
    }

    FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) {
        if (a->kind == FKind::True) return b;
        if (a->kind == FKind::False) return truef();
        if (b->kind == FKind::True) return truef();
        if (b->kind == FKind::False) return mk_not(a);
        if (a == b) return truef();
        return intern_args(FKind::Implies, {a, b});
    }

    FormulaPtr mk_val(FormulaPtr a) {
        if (a->kind == FKind::True) return truef();
        if (a->kind == FKind::False) return falsef();
        return intern_args(FKind::Val, {a});
    }

    FormulaPtr mk_equal(FormulaPtr a, FormulaPtr b) {
        if (a->ground && b->ground) return a == b ? truef() : falsef();
        return intern_args(FKind::Equal, {a, b});
    }

    FormulaPtr mk_forall(Variable v, FormulaPtr body) {
        if (body->kind == FKind::True || body->kind == FKind::False) return body;
        Formula f;
        f.kind = FKind::Forall;
        f.var = std::move(v);
        f.args = {body};
        f.ground = false;
        f.hash = detail::hash_combine(
            detail::hash_combine(0xf0a11, detail::hash_string(f.var.name)),
            detail::hash_combine(static_cast<size_t>(f.var.sort), body->hash));
        return intern(std::move(f));
    }

    // ---- the validity oracle ----

    // Acceptable validity: quantifiers expand over A and the principal
    // universe, Val(phi) is replaced (innermost first) by the constant truth
    // of phi's acceptable validity, and the ground residue is checked by
    // exhaustive assignment search.
    bool acceptably_valid(FormulaPtr f) { return valid_ground(resolve(f)); }

    // Validity of lhs => rhs for already-resolved ground operands, avoiding
    // per-instance implication nodes on the hot translation path.
    bool eager_validity(FormulaPtr lhs, FormulaPtr rhs) {
        if (lhs->kind == FKind::False || rhs->kind == FKind::True) return true;
        if (rhs->kind == FKind::Atom) {
            if (lhs->kind == FKind::True) return false;
            if (lhs->kind == FKind::Atom) return lhs == rhs;
            if (lhs->kind == FKind::And) {
                const std::unordered_set<FormulaPtr>* set = atom_closure(lhs);
                if (set) return set->count(rhs) > 0;
            }
        }
        return valid_ground(resolve(mk_implies(lhs, rhs)));
    }

    size_t interned_nodes() const { return store_.size(); }

    // ---- resolution: quantifier expansion, Val and Equal elimination ----

    FormulaPtr resolve(FormulaPtr f) {
        auto it = resolve_memo_.find(f);
        if (it != resolve_memo_.end()) return it->second;
        FormulaPtr out = f;
        switch (f->kind) {
            case FKind::True:
            case FKind::False:
                break;
            case FKind::Atom:
                if (!f->ground)
                    throw std::logic_error("free variable in formula outside a quantifier");
                break;
            case FKind::Not:
                out = mk_not(resolve(f->args[0]));
                break;
            case FKind::And:
            case FKind::Or: {
                std::vector<FormulaPtr> rs;
                rs.reserve(f->args.size());
                for (FormulaPtr a : f->args) rs.push_back(resolve(a));
                out = f->kind == FKind::And ? mk_and(std::move(rs)) : mk_or(std::move(rs));
                break;
            }
            case FKind::Implies:
                out = mk_implies(resolve(f->args[0]), resolve(f->args[1]));
                break;
            case FKind::Equal: {
                FormulaPtr a = resolve(f->args[0]);
                FormulaPtr b = resolve(f->args[1]);
                out = mk_equal(a, b);
                if (out->kind == FKind::Equal)
                    throw std::logic_error("unresolvable equality (open operands)");
                break;
            }
            case FKind::Val:
                out = valid_ground(resolve(f->args[0])) ? truef() : falsef();
                break;
            case FKind::Forall: {
                std::vector<FormulaPtr> parts;
                if (f->var.sort == Sort::Principal) {
                    for (const auto& p : prange_)
                        parts.push_back(resolve(substitute(
                            f->args[0], f->var, GroundValue::principal(p))));
                } else {
                    for (const auto& g : resources_)
                        parts.push_back(
                            resolve(substitute(f->args[0], f->var, GroundValue::resource(g))));
                }
                out = mk_and(std::move(parts));
                break;
            }
        }
        resolve_memo_.emplace(f, out);
        return out;
    }

    // Substitution of one variable inside a formula (used by quantifier
    // expansion; Forall nodes shadow their own variable).
    FormulaPtr substitute(FormulaPtr f, const Variable& v, const GroundValue& val) {
        switch (f->kind) {
            case FKind::True:
            case FKind::False:
                return f;
            case FKind::Atom: {
                if (f->ground) return f;
                Substitution s;
                s.bind(v, val);
                if (f->atom_is_prop)
                    return atom_prop(f->prop, subst_detail::subst_prin(f->principal, s, {}));
                PrincipalTerm p = subst_detail::subst_prin(f->principal, s, {});
                Resource r = subst_detail::subst_resource(f->resource, s, {});
                return atom_perm(std::move(p), std::move(r));
            }
            case FKind::Not:
                return mk_not(substitute(f->args[0], v, val));
            case FKind::And:
            case FKind::Or: {
                std::vector<FormulaPtr> rs;
                rs.reserve(f->args.size());
                for (FormulaPtr a : f->args) rs.push_back(substitute(a, v, val));
                return f->kind == FKind::And ? mk_and(std::move(rs)) : mk_or(std::move(rs));
            }
            case FKind::Implies:
                return mk_implies(substitute(f->args[0], v, val), substitute(f->args[1], v, val));
            case FKind::Equal:
                return mk_equal(substitute(f->args[0], v, val), substitute(f->args[1], v, val));
            case FKind::Val:
                return mk_val(substitute(f->args[0], v, val));
            case FKind::Forall:
                if (f->var.name == v.name) return f;  // shadowed
                return mk_forall(f->var, substitute(f->args[0], v, val));
        }
        return f;
    }

    // ---- ground validity ----

    bool valid_ground(FormulaPtr f) {
        if (f->kind == FKind::True) return true;
        if (f->kind == FKind::False) return false;
        auto it = valid_memo_.find(f);
        if (it != valid_memo_.end()) return it->second;
        bool v = valid_ground_impl(f);
        valid_memo_.emplace(f, v);
        return v;
    }

   private:
    bool valid_ground_impl(FormulaPtr f) {
        // membership fast path: (a1 & ... & ak) => b where the left side is a
        // (possibly nested) conjunction of atoms
        if (f->kind == FKind::Atom || f->kind == FKind::Not) return false;
        if (f->kind == FKind::Implies && f->args[1]->kind == FKind::Atom) {
            FormulaPtr lhs = f->args[0];
            if (lhs->kind == FKind::Atom) return lhs == f->args[1];
            if (lhs->kind == FKind::And) {
                const std::unordered_set<FormulaPtr>* set = atom_closure(lhs);
                if (set) return set->count(f->args[1]) > 0;
            }
        }
        return !countermodel_exists(f);
    }

    // The atoms of a conjunction whose members are atoms or conjunctions of
    // the same shape; nullptr when anything else appears.  Cached per node:
    // big shared conjunctions pay the union once.
    const std::unordered_set<FormulaPtr>* atom_closure(FormulaPtr and_node) {
        auto it = atom_sets_.find(and_node);
        if (it != atom_sets_.end()) return it->second ? &*it->second : nullptr;
        std::optional<std::unordered_set<FormulaPtr>> s;
        s.emplace();
        for (FormulaPtr a : and_node->args) {
            if (a->kind == FKind::Atom) {
                s->insert(a);
            } else if (a->kind == FKind::And) {
                const std::unordered_set<FormulaPtr>* inner = atom_closure(a);
                if (!inner) {
                    s.reset();
                    break;
                }
                s->insert(inner->begin(), inner->end());
            } else {
                s.reset();
                break;
            }
        }
        auto& slot = atom_sets_[and_node];
        slot = std::move(s);
        return slot ? &*slot : nullptr;
    }

    // CNF-based countermodel search with watched-literal unit propagation.
    bool countermodel_exists(FormulaPtr root) {
        std::vector<FormulaPtr> nodes;
        std::unordered_map<FormulaPtr, int> index;
        collect(root, nodes, index);

        int nvars = static_cast<int>(nodes.size());
        std::vector<std::vector<int>> clauses;
        auto lit = [&](FormulaPtr f, bool pos) {
            int v = index.at(f);
            return pos ? v + 1 : -(v + 1);
        };
        for (FormulaPtr f : nodes) {
            switch (f->kind) {
                case FKind::Atom:
                    break;
                case FKind::Not:
                    clauses.push_back({-lit(f, true), -lit(f->args[0], true)});
                    clauses.push_back({lit(f, true), lit(f->args[0], true)});
                    break;
                case FKind::And: {
                    std::vector<int> big{lit(f, true)};
                    for (FormulaPtr a : f->args) {
                        clauses.push_back({-lit(f, true), lit(a, true)});
                        big.push_back(-lit(a, true));
                    }
                    clauses.push_back(std::move(big));
                    break;
                }
                case FKind::Or: {
                    std::vector<int> big{-lit(f, true)};
                    for (FormulaPtr a : f->args) {
                        clauses.push_back({lit(f, true), -lit(a, true)});
                        big.push_back(lit(a, true));
                    }
                    clauses.push_back(std::move(big));
                    break;
                }
                case FKind::Implies:
                    clauses.push_back(
                        {-lit(f, true), -lit(f->args[0], true), lit(f->args[1], true)});
                    clauses.push_back({lit(f, true), lit(f->args[0], true)});
                    clauses.push_back({lit(f, true), -lit(f->args[1], true)});
                    break;
                default:
                    throw std::logic_error("unresolved operator reached the validity search");
            }
        }
        clauses.push_back({-lit(root, true)});

        return sat(nvars, clauses, nodes);
    }

    bool sat(int nvars, const std::vector<std::vector<int>>& clauses,
             const std::vector<FormulaPtr>& nodes) {
        // two-watched-literal DPLL, deciding atom variables in index order
        std::vector<int8_t> value(nvars, 0);  // 0 unset, 1 true, -1 false
        std::vector<std::vector<int>> watch(2 * nvars);
        auto widx = [&](int l) { return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1; };
        std::vector<std::pair<int, int>> watched(clauses.size(), {-1, -1});

        std::vector<int> trail;
        std::vector<int> prop_queue;

        auto assigned = [&](int l) {
            int v = std::abs(l) - 1;
            return value[v] != 0;
        };
        auto sat_lit = [&](int l) {
            int v = std::abs(l) - 1;
            return value[v] == (l > 0 ? 1 : -1);
        };
        auto enqueue = [&](int l) -> bool {
            int v = std::abs(l) - 1;
            int8_t want = l > 0 ? 1 : -1;
            if (value[v] != 0) return value[v] == want;
            value[v] = want;
            trail.push_back(l);
            prop_queue.push_back(l);
            return true;
        };

        for (size_t ci = 0; ci < clauses.size(); ++ci) {
            const auto& c = clauses[ci];
            if (c.size() == 1) {
                if (!enqueue(c[0])) return false;
                continue;
            }
            watched[ci] = {0, 1};
            watch[widx(c[0])].push_back(static_cast<int>(ci));
            watch[widx(c[1])].push_back(static_cast<int>(ci));
        }

        auto propagate = [&]() -> bool {
            while (!prop_queue.empty()) {
                int l = prop_queue.back();
                prop_queue.pop_back();
                int fl = -l;  // literal that became false
                auto& wl = watch[widx(fl)];
                for (size_t k = 0; k < wl.size();) {
                    int ci = wl[k];
                    const auto& c = clauses[ci];
                    auto& [w0, w1] = watched[ci];
                    int other = (c[w0] == fl) ? w1 : w0;
                    int self = (c[w0] == fl) ? w0 : w1;
                    if (sat_lit(c[other])) {
                        ++k;
                        continue;
                    }
                    // find replacement watch
                    bool moved = false;
                    for (size_t j = 0; j < c.size(); ++j) {
                        if (static_cast<int>(j) == other || static_cast<int>(j) == self) continue;
                        if (!assigned(c[j]) || sat_lit(c[j])) {
                            if (c[w0] == fl)
                                w0 = static_cast<int>(j);
                            else
                                w1 = static_cast<int>(j);
                            watch[widx(c[j])].push_back(ci);
                            wl[k] = wl.back();
                            wl.pop_back();
                            moved = true;
                            break;
                        }
                    }
                    if (moved) continue;
                    // unit or conflict
                    if (!enqueue(c[other])) return false;
                    ++k;
                }
            }
            return true;
        };

        if (!propagate()) return false;

        // decision loop over atom variables
        std::vector<int> atom_vars;
        for (size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i]->kind == FKind::Atom) atom_vars.push_back(static_cast<int>(i));

        struct Decision {
            int var;
            size_t trail_size;
            bool tried_false;
        };
        std::vector<Decision> decisions;

        int max_branch = oracle_.max_branch_atoms;

        while (true) {
            int pick = -1;
            for (int v : atom_vars)
                if (value[v] == 0) { pick = v; break; }
            if (pick < 0) return true;  // all atoms set, gates propagated: countermodel
            if (static_cast<int>(decisions.size()) >= max_branch)
                throw CapacityError(
                    "validity search exceeded the branching budget of " +
                    std::to_string(max_branch) + " atoms");
            decisions.push_back({pick, trail.size(), false});
            bool ok = enqueue(pick + 1) && propagate();
            while (!ok) {
                // backtrack
                prop_queue.clear();
                while (!decisions.empty() && decisions.back().tried_false) {
                    while (trail.size() > decisions.back().trail_size) {
                        value[std::abs(trail.back()) - 1] = 0;
                        trail.pop_back();
                    }
                    decisions.pop_back();
                }
                if (decisions.empty()) return false;  // UNSAT: no countermodel
                Decision& d = decisions.back();
                while (trail.size() > d.trail_size) {
                    value[std::abs(trail.back()) - 1] = 0;
                    trail.pop_back();
                }
                d.tried_false = true;
                ok = enqueue(-(d.var + 1)) && propagate();
            }
        }
    }

    static void collect(FormulaPtr f, std::vector<FormulaPtr>& nodes,
                        std::unordered_map<FormulaPtr, int>& index) {
        if (index.count(f)) return;
        if (f->kind == FKind::True || f->kind == FKind::False)
            throw std::logic_error("constants must be folded before the validity search");
        for (FormulaPtr a : f->args) collect(a, nodes, index);
        index.emplace(f, static_cast<int>(nodes.size()));
        nodes.push_back(f);
    }

    // ---- interning ----

    FormulaPtr intern_simple(FKind k) {
        Formula f;
        f.kind = k;
        f.hash = static_cast<size_t>(k) + 0x51;
        return intern(std::move(f));
    }

    FormulaPtr intern_args(FKind k, std::vector<FormulaPtr> args) {
        Formula f;
        f.kind = k;
        f.args = std::move(args);
        f.hash = static_cast<size_t>(k) + 0x9177;
        f.ground = true;
        for (FormulaPtr a : f.args) {
            f.hash = detail::hash_combine(f.hash, a->hash);
            f.ground = f.ground && a->ground;
        }
        return intern(std::move(f));
    }

    static bool shallow_equal(const Formula& a, const Formula& b) {
        if (a.kind != b.kind || a.hash != b.hash) return false;
        if (a.args != b.args) return false;
        switch (a.kind) {
            case FKind::Atom:
                if (a.atom_is_prop != b.atom_is_prop) return false;
                if (a.atom_is_prop)
                    return a.prop == b.prop && a.principal == b.principal;
                return a.principal == b.principal && a.resource == b.resource;
            case FKind::Forall:
                return a.var == b.var;
            default:
                return true;
        }
    }

    FormulaPtr intern(Formula&& f) {
        auto [lo, hi] = buckets_.equal_range(f.hash);
        for (auto it = lo; it != hi; ++it)
            if (shallow_equal(*it->second, f)) return it->second;
        f.id = static_cast<uint32_t>(store_.size());
        store_.push_back(std::move(f));
        FormulaPtr p = &store_.back();
        buckets_.emplace(p->hash, p);
        return p;
    }

    static void dedup(std::vector<FormulaPtr>& v) {
        std::unordered_set<FormulaPtr> seen;
        size_t w = 0;
        for (FormulaPtr p : v)
            if (seen.insert(p).second) v[w++] = p;
        v.resize(w);
    }

    const Declarations* decls_;
    UnionMode mode_;
    OracleOptions oracle_;
    std::vector<PrincipalTerm> prange_;
    std::vector<GrantPtr> resources_;

    std::deque<Formula> store_;
    std::unordered_multimap<size_t, FormulaPtr> buckets_;
    std::unordered_map<FormulaPtr, FormulaPtr> resolve_memo_;
    std::unordered_map<FormulaPtr, bool> valid_memo_;
    std::unordered_map<FormulaPtr, std::optional<std::unordered_set<FormulaPtr>>> atom_sets_;
};

// ---- the translation --------------------------------------------------------

struct TranslationParams {
    std::vector<License> licenses;  // L
    std::vector<GrantPtr> A;        // closed resource universe
    std::vector<CondPtr> S;         // Said conditions assumed not to hold
    std::vector<ConcPtr> E;         // excluded conclusions
    Variant variant = Variant::Main;
    bool allow_negation = false;
};

namespace translate_detail {

inline void collect_said_conditions(const ConcPtr& c,
                                    std::vector<CondPtr>& out);

inline void collect_said_conditions(const CondPtr& c, std::vector<CondPtr>& out) {
    switch (c->kind) {
        case CondKind::True:
            return;
        case CondKind::Said:
        case CondKind::NegSaid: {
            CondPtr positive =
                c->kind == CondKind::Said ? c : make_said(c->principal, c->conclusion);
            if (!contains(out, positive)) out.push_back(positive);
            collect_said_conditions(c->conclusion, out);
            return;
        }
        case CondKind::Conj:
            for (const auto& p : c->conjuncts) collect_said_conditions(p, out);
            return;
    }
}

inline void collect_said_conditions(const ConcPtr& c, std::vector<CondPtr>& out) {
    if (c->is_permission() && !c->resource.is_var()) {
        collect_said_conditions(c->resource.grant->antecedent, out);
        collect_said_conditions(c->resource.grant->consequent, out);
    }
}

class Translator {
   public:
    Translator(LogicContext& ctx, const TranslationParams& p) : ctx_(ctx), p_(p) {
        for (const auto& l : p_.licenses) {
            auto& saids = grant_saids_[l.grant];
            collect_said_conditions(l.grant->antecedent, saids);
            collect_said_conditions(l.grant->consequent, saids);
            for (const auto& s : saids)
                if (!contains(said_universe_, s)) said_universe_.push_back(s);
            grant_mentions_said_[l.grant] = !saids.empty();
        }
    }

    FormulaPtr license(const License& l, const std::vector<CondPtr>& S,
                       const std::vector<ConcPtr>& E) {
        ConcPtr perm = make_permission(l.issuer, Resource::make_grant(l.grant));
        bool in_L = false;
        for (const auto& other : p_.licenses)
            if (other.issuer == l.issuer && equal(other.grant, l.grant)) in_L = true;
        if (contains(E, perm) || !in_L) return ctx_.truef();
        return ctx_.mk_implies(conclusion(perm), grant(l.grant, S, E));
    }

    FormulaPtr grant(const GrantPtr& g, const std::vector<CondPtr>& S,
                     const std::vector<ConcPtr>& E) {
        const std::vector<CondPtr>& s_key = mentions_said(g) ? S : kEmptyS;
        GrantMemoKey key{g, canon_conds(s_key), canon_concs(E)};
        auto it = grant_memo_.find(key);
        if (it != grant_memo_.end()) return it->second;

        FormulaPtr out;
        if (p_.variant == Variant::Alt1) {
            FormulaPtr body = body_clause(g->antecedent, g->consequent, S, E);
            for (auto b = g->binders.rbegin(); b != g->binders.rend(); ++b)
                body = ctx_.mk_forall(*b, body);
            out = body;
        } else {
            out = expand(g->antecedent, g->consequent, 0, g->binders, S, E);
        }
        grant_memo_.emplace(std::move(key), out);
        return out;
    }

    FormulaPtr condition(const CondPtr& d, const std::vector<CondPtr>& S) {
        CondMemoKey key{d, canon_conds(S)};
        auto it = cond_memo_.find(key);
        if (it != cond_memo_.end()) return it->second;
        FormulaPtr out = condition_impl(d, S);
        if (out->kind != FKind::True && out->kind != FKind::False)
            cond_memo_.emplace(std::move(key), out);
        return out;
    }

    FormulaPtr conclusion(const ConcPtr& e) {
        auto it = conc_memo_.find(e);
        if (it != conc_memo_.end()) return it->second;
        FormulaPtr out = conclusion_impl(e);
        conc_memo_.emplace(e, out);
        return out;
    }

    // the correspondence implication for a whole query
    FormulaPtr query_formula(const Query& q) {
        std::vector<FormulaPtr> antecedent;
        for (const auto& l : q.licenses) antecedent.push_back(license(l, p_.S, p_.E));
        for (const auto& t : q.trusted) antecedent.push_back(grant(t.grant, p_.S, p_.E));
        return ctx_.mk_implies(ctx_.mk_and(std::move(antecedent)), conclusion(q.goal));
    }

   private:
    FormulaPtr condition_impl(const CondPtr& d, const std::vector<CondPtr>& S) {
        switch (d->kind) {
            case CondKind::True:
                return ctx_.truef();
            case CondKind::Conj: {
                std::vector<FormulaPtr> parts;
                for (const auto& q : d->conjuncts) parts.push_back(condition(q, S));
                return ctx_.mk_and(std::move(parts));
            }
            case CondKind::NegSaid: {
                if (!p_.allow_negation)
                    throw BadQueryError("negated Said condition outside the negation extension");
                CondPtr positive = make_said(d->principal, d->conclusion);
                return ctx_.mk_not(condition(positive, S));
            }
            case CondKind::Said:
                break;
        }
        if (contains(S, d)) return ctx_.falsef();

        std::vector<CondPtr> S2 = S;
        S2.push_back(d);

        // R_p: grants issued by a member of the Said principal (the ground
        // component decides membership; open principals only occur in alt1)
        std::vector<FormulaPtr> parts;
        for (const auto& l : p_.licenses) {
            if (!l.issuer.subset_of(d->principal)) continue;
            assert_measure_decreases(d, l.grant, S, S2);
            parts.push_back(grant(l.grant, S2, kEmptyE));
        }
        FormulaPtr lhs = ctx_.mk_and(std::move(parts));
        FormulaPtr rhs = conclusion(d->conclusion);
        if (p_.variant == Variant::Alt2) return ctx_.mk_implies(lhs, rhs);
        if (ctx_.oracle().resolve_val_eagerly && lhs->ground && rhs->ground)
            return ctx_.eager_validity(lhs, rhs) ? ctx_.truef() : ctx_.falsef();
        return ctx_.mk_val(ctx_.mk_implies(lhs, rhs));
    }

    FormulaPtr conclusion_impl(const ConcPtr& e) {
        if (e->is_negative() && !p_.allow_negation)
            throw BadQueryError("negated conclusion outside the negation extension");
        FormulaPtr atom;
        if (!e->is_permission()) {
            atom = ctx_.atom_prop(e->prop, e->principal);
        } else {
            atom = ctx_.atom_perm(e->principal, e->resource);
        }
        return e->is_negative() ? ctx_.mk_not(atom) : atom;
    }

    // body clause for one (possibly open) instance:
    //   ((and_{e in E} ~Equal(tr(e), tr(e_g))) & tr(d_g)) => tr(e_g)
    FormulaPtr body_clause(const CondPtr& ante, const ConcPtr& cons,
                           const std::vector<CondPtr>& S, const std::vector<ConcPtr>& E) {
        std::vector<FormulaPtr> lhs;
        for (const auto& e : E)
            lhs.push_back(ctx_.mk_not(ctx_.mk_equal(conclusion(e), conclusion(cons))));
        lhs.push_back(condition(ante, S));
        return ctx_.mk_implies(ctx_.mk_and(std::move(lhs)), conclusion(cons));
    }

    FormulaPtr expand(const CondPtr& ante, const ConcPtr& cons, size_t i,
                      const std::vector<Variable>& binders, const std::vector<CondPtr>& S,
                      const std::vector<ConcPtr>& E) {
        if (i == binders.size()) {
            // ground instance: the Equal guards are decided statically
            if (p_.variant != Variant::Alt2 && contains(E, cons)) return ctx_.truef();
            return ctx_.mk_implies(condition(ante, S), conclusion(cons));
        }
        const Variable& v = binders[i];
        std::vector<FormulaPtr> parts;
        if (v.sort == Sort::Principal) {
            for (const auto& val : ctx_.principal_universe()) {
                Substitution s;
                s.bind(v, GroundValue::principal(val));
                parts.push_back(expand(subst(ante, s), subst(cons, s), i + 1, binders, S, E));
            }
        } else {
            for (const auto& g : p_.A) {
                Substitution s;
                s.bind(v, GroundValue::resource(g));
                parts.push_back(expand(subst(ante, s), subst(cons, s), i + 1, binders, S, E));
            }
        }
        return ctx_.mk_and(std::move(parts));
    }

    bool mentions_said(const GrantPtr& g) {
        auto it = grant_mentions_said_.find(g);
        if (it != grant_mentions_said_.end()) return it->second;
        std::vector<CondPtr> saids;
        collect_said_conditions(g->antecedent, saids);
        collect_said_conditions(g->consequent, saids);
        bool any = !saids.empty();
        grant_mentions_said_[g] = any;
        return any;
    }

    // Well-definedness measure: lexicographic in (|S_univ(s) - S|, |s|),
    // strictly smaller at every Said-triggered recursion into an issued grant.
    void assert_measure_decreases(const CondPtr& said, const GrantPtr& g,
                                  const std::vector<CondPtr>& S,
                                  const std::vector<CondPtr>& S2) {
        std::vector<CondPtr> s_saids;
        s_saids.push_back(said);
        collect_said_conditions(said->conclusion, s_saids);
        size_t before = measure(s_saids, S);
        auto it = grant_saids_.find(g);
        static const std::vector<CondPtr> none;
        size_t after = measure(it != grant_saids_.end() ? it->second : none, S2);
        if (after >= before)
            throw std::logic_error("translation measure failed to decrease at " + print(said));
    }

    size_t measure(const std::vector<CondPtr>& extra, const std::vector<CondPtr>& S) const {
        size_t n = 0;
        for (const auto& s : said_universe_)
            if (!contains(S, s)) ++n;
        for (const auto& s : extra)
            if (!contains(said_universe_, s) && !contains(S, s)) ++n;
        return n;
    }

    // ---- memo keys ----

    static std::vector<CondPtr> canon_conds(std::vector<CondPtr> v) {
        std::sort(v.begin(), v.end(),
                  [](const CondPtr& a, const CondPtr& b) { return compare(a, b) < 0; });
        return v;
    }
    static std::vector<ConcPtr> canon_concs(std::vector<ConcPtr> v) {
        std::sort(v.begin(), v.end(),
                  [](const ConcPtr& a, const ConcPtr& b) { return compare(a, b) < 0; });
        return v;
    }

    struct GrantMemoKey {
        GrantPtr g;
        std::vector<CondPtr> S;
        std::vector<ConcPtr> E;
        bool operator==(const GrantMemoKey& o) const {
            if (!equal(g, o.g) || S.size() != o.S.size() || E.size() != o.E.size()) return false;
            for (size_t i = 0; i < S.size(); ++i)
                if (!equal(S[i], o.S[i])) return false;
            for (size_t i = 0; i < E.size(); ++i)
                if (!equal(E[i], o.E[i])) return false;
            return true;
        }
    };
    struct GrantMemoHash {
        size_t operator()(const GrantMemoKey& k) const {
            size_t h = k.g->hash_;
            for (const auto& s : k.S) h = detail::hash_combine(h, s->hash_);
            h = detail::hash_combine(h, 0xe);
            for (const auto& e : k.E) h = detail::hash_combine(h, e->hash_);
            return h;
        }
    };
    struct CondMemoKey {
        CondPtr d;
        std::vector<CondPtr> S;
        bool operator==(const CondMemoKey& o) const {
            if (!equal(d, o.d) || S.size() != o.S.size()) return false;
            for (size_t i = 0; i < S.size(); ++i)
                if (!equal(S[i], o.S[i])) return false;
            return true;
        }
    };
    struct CondMemoHash {
        size_t operator()(const CondMemoKey& k) const {
            size_t h = k.d->hash_;
            for (const auto& s : k.S) h = detail::hash_combine(h, s->hash_);
            return h;
        }
    };

    LogicContext& ctx_;
    const TranslationParams& p_;
    inline static const std::vector<CondPtr> kEmptyS{};
    inline static const std::vector<ConcPtr> kEmptyE{};

    std::unordered_map<GrantPtr, std::vector<CondPtr>, GrantPtrHash, GrantPtrEq> grant_saids_;
    std::unordered_map<GrantPtr, bool, GrantPtrHash, GrantPtrEq> grant_mentions_said_;
    std::vector<CondPtr> said_universe_;  // Saids mentioned in issued grants

    std::unordered_map<GrantMemoKey, FormulaPtr, GrantMemoHash> grant_memo_;
    std::unordered_map<CondMemoKey, FormulaPtr, CondMemoHash> cond_memo_;
    std::unordered_map<ConcPtr, FormulaPtr, ConcPtrHash, ConcPtrEq> conc_memo_;
};

}  // namespace translate_detail

inline FormulaPtr translate(LogicContext& ctx, const License& l, const TranslationParams& p) {
    translate_detail::Translator t(ctx, p);
    return t.license(l, p.S, p.E);
}
inline FormulaPtr translate(LogicContext& ctx, const GrantPtr& g, const TranslationParams& p) {
    translate_detail::Translator t(ctx, p);
    return t.grant(g, p.S, p.E);
}
inline FormulaPtr translate(LogicContext& ctx, const CondPtr& d, const TranslationParams& p) {
    translate_detail::Translator t(ctx, p);
    return t.condition(d, p.S);
}
inline FormulaPtr translate(LogicContext& ctx, const ConcPtr& e, const TranslationParams& p) {
    translate_detail::Translator t(ctx, p);
    return t.conclusion(e);
}

// The correspondence implication (and of translated L and R) => translated goal.
inline FormulaPtr query_formula(LogicContext& ctx, const Query& q, const TranslationParams& p) {
    ctx.set_resource_universe(p.A);
    translate_detail::Translator t(ctx, p);
    return t.query_formula(q);
}

// ---- correspondence with the engine ----------------------------------------

struct CorrespondenceReport {
    Verdict engine = Verdict::False;
    bool oracle_ran = false;
    bool oracle_valid = false;
    bool agree = false;
    std::string error;
    std::vector<GrantPtr> A;
    EngineStats engine_stats;
};

// Runs Query2, harvests the touched resources as A, translates the whole
// query and compares the engine verdict with acceptable validity.
inline CorrespondenceReport check_correspondence(const Declarations& decls, const Query& q,
                                                 EngineOptions eopt = {},
                                                 OracleOptions oopt = {}) {
    CorrespondenceReport rep;
    eopt.capture_trace = false;
    eopt.harvest = true;
    EngineOutcome out = query2(decls, q, eopt);
    rep.engine = out.verdict;
    rep.engine_stats = out.stats;
    rep.A = out.resources_touched;
    if (out.verdict == Verdict::FuelExhausted) {
        rep.error = "engine did not terminate within fuel";
        return rep;
    }
    oopt.resolve_val_eagerly = true;
    LogicContext ctx(decls, eopt.union_mode, oopt);
    ctx.set_resource_universe(rep.A);
    TranslationParams p;
    p.licenses = q.licenses;
    p.A = rep.A;
    p.E = q.excluded;
    p.allow_negation = decls.negation;
    try {
        FormulaPtr f = query_formula(ctx, q, p);
        rep.oracle_valid = ctx.acceptably_valid(f);
        rep.oracle_ran = true;
        rep.agree = rep.oracle_valid == (out.verdict == Verdict::True);
    } catch (const CapacityError& e) {
        rep.error = e.what();
    }
    return rep;
}

// ---- printing ---------------------------------------------------------------

inline std::string print_formula(FormulaPtr f) {
    switch (f->kind) {
        case FKind::True:
            return "true";
        case FKind::False:
            return "false";
        case FKind::Atom: {
            if (f->atom_is_prop) return f->prop + "(" + print(f->principal) + ")";
            return "Perm(" + print(f->principal) + ", issue, " + print(f->resource) + ")";
        }
        case FKind::Not:
            return "~(" + print_formula(f->args[0]) + ")";
        case FKind::And:
        case FKind::Or: {
            std::string sep = f->kind == FKind::And ? " & " : " | ";
            std::string out = "(";
            for (size_t i = 0; i < f->args.size(); ++i) {
                if (i) out += sep;
                out += print_formula(f->args[i]);
            }
            return out + ")";
        }
        case FKind::Implies:
            return "(" + print_formula(f->args[0]) + " => " + print_formula(f->args[1]) + ")";
        case FKind::Val:
            return "Val(" + print_formula(f->args[0]) + ")";
        case FKind::Equal:
            return "Equal(" + print_formula(f->args[0]) + ", " + print_formula(f->args[1]) + ")";
        case FKind::Forall:
            return "forall " + f->var.name +
                   (f->var.sort == Sort::Principal ? " : principal . (" : " : resource . (") +
                   print_formula(f->args[0]) + ")";
    }
    return "?";
}

inline nlohmann::json formula_to_json(FormulaPtr f) {
    nlohmann::json j;
    switch (f->kind) {
        case FKind::True:
            j["op"] = "true";
            return j;
        case FKind::False:
            j["op"] = "false";
            return j;
        case FKind::Atom:
            j["op"] = "atom";
            j["text"] = print_formula(f);
            return j;
        case FKind::Not:
            j["op"] = "not";
            break;
        case FKind::And:
            j["op"] = "and";
            break;
        case FKind::Or:
            j["op"] = "or";
            break;
        case FKind::Implies:
            j["op"] = "implies";
            break;
        case FKind::Val:
            j["op"] = "val";
            break;
        case FKind::Equal:
            j["op"] = "equal";
            break;
        case FKind::Forall:
            j["op"] = "forall";
            j["var"] = f->var.name;
            j["sort"] = sort_name(f->var.sort);
            break;
    }
    nlohmann::json args = nlohmann::json::array();
    for (FormulaPtr a : f->args) args.push_back(formula_to_json(a));
    j["args"] = std::move(args);
    return j;
}

}  // namespace logic
}  // namespace xrml

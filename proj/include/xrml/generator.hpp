#pragma once

// Seeded random query generation.  Three flavours:
//   - random_query: restrained, hierarchical, union-free by default (the
//     correspondence-check workload); levels make the affects digraph acyclic
//     by construction.
//   - random_condition_instance: small license sets plus a closed condition
//     for exercising the Holds algorithms, cycles allowed.
//   - chain_query: bounded-depth instances of growing |L| for runtime
//     measurements.
//   - random_ast: free-form well-formed syntax for parser round trips.

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "xrml/ast.hpp"
#include "xrml/parser.hpp"

namespace xrml {
namespace gen {

using Rng = std::mt19937_64;

struct Bounds {
    int min_principals = 2;
    int max_principals = 4;
    int max_licenses = 5;
    int max_trusted = 3;
    int max_conjuncts = 2;
    bool union_free = true;
    bool hierarchical = true;  // when false, Said targets may point anywhere
};

struct Generated {
    Declarations decls;
    Query query;
};

namespace gen_detail {

inline int pick(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

inline std::string level_prop(int level) { return "L" + std::to_string(level); }

inline PrincipalTerm rand_principal(Rng& rng, const std::vector<std::string>& names) {
    return PrincipalTerm::singleton(names[pick(rng, 0, static_cast<int>(names.size()) - 1)]);
}

}  // namespace gen_detail

// Restrained, union-free queries with a leveled (hence hierarchical) license
// set.  Licenses conclude level-tagged properties; antecedent Said targets
// point strictly below the license's level, so affects edges only go upward.
inline Generated random_query(Rng& rng, const Bounds& b = {}) {
    using namespace gen_detail;
    Generated out;

    int np = pick(rng, b.min_principals, b.max_principals);
    for (int i = 0; i < np; ++i) out.decls.principals.push_back("P" + std::to_string(i + 1));
    int nl = pick(rng, 1, b.max_licenses);
    for (int i = 0; i < nl; ++i) out.decls.properties.push_back(level_prop(i));
    out.decls.properties.push_back("Goal");
    out.decls.normalize();

    int seq = 0;
    // licenses, one level each
    for (int i = 0; i < nl; ++i) {
        PrincipalTerm issuer = rand_principal(rng, out.decls.principals);
        bool use_var = chance(rng, 0.5);
        Variable x{"x_p1", Sort::Principal};
        PrincipalTerm arg = use_var ? PrincipalTerm::var(x.name)
                                    : rand_principal(rng, out.decls.principals);
        ConcPtr cons = make_property(level_prop(i), arg);

        CondPtr ante = make_true();
        int lo = b.hierarchical ? 0 : -1;  // -1 lets targets use any level
        if (i > 0 || !b.hierarchical) {
            int nconj = pick(rng, 0, b.max_conjuncts);
            std::vector<CondPtr> parts;
            for (int c = 0; c < nconj; ++c) {
                int tgt_level =
                    b.hierarchical ? pick(rng, 0, i - 1) : pick(rng, 0, nl - 1);
                (void)lo;
                PrincipalTerm tgt_arg = use_var && chance(rng, 0.5)
                                            ? PrincipalTerm::var(x.name)
                                            : rand_principal(rng, out.decls.principals);
                parts.push_back(make_said(rand_principal(rng, out.decls.principals),
                                          make_property(level_prop(tgt_level), tgt_arg)));
            }
            ante = make_conjunction(parts);
        }
        GrantPtr g = make_grant_trimmed({x}, ante, cons);
        out.query.licenses.push_back({issuer, g, seq++, 0});
    }

    // authority grants let Auth2 admit a random subset of the licenses
    for (const auto& lic : out.query.licenses) {
        if (!chance(rng, 0.7)) continue;
        ConcPtr perm = make_permission(lic.issuer, Resource::make_grant(lic.grant));
        out.query.trusted.push_back({make_grant({}, nullptr, perm), seq++, 0});
    }

    // a few trusted rules deriving Goal from Said conditions, plus sometimes
    // a restrained resource-variable passthrough
    int nt = pick(rng, 1, b.max_trusted);
    for (int t = 0; t < nt; ++t) {
        if (chance(rng, 0.25)) {
            // forall y (Said(p, Perm(q, issue, y)) -> Perm(q', issue, y))
            Variable y{"x_r1", Sort::Resource};
            PrincipalTerm q = rand_principal(rng, out.decls.principals);
            CondPtr ante = make_said(rand_principal(rng, out.decls.principals),
                                     make_permission(q, Resource::make_var(y.name)));
            ConcPtr cons = make_permission(rand_principal(rng, out.decls.principals),
                                           Resource::make_var(y.name));
            out.query.trusted.push_back({make_grant({y}, ante, cons), seq++, 0});
            continue;
        }
        Variable x{"x_p1", Sort::Principal};
        bool use_var = chance(rng, 0.5);
        PrincipalTerm arg =
            use_var ? PrincipalTerm::var(x.name) : rand_principal(rng, out.decls.principals);
        std::vector<CondPtr> parts;
        int nconj = pick(rng, 1, b.max_conjuncts);
        for (int c = 0; c < nconj; ++c) {
            int lvl = pick(rng, 0, nl - 1);
            PrincipalTerm tgt_arg = use_var && chance(rng, 0.5)
                                        ? PrincipalTerm::var(x.name)
                                        : rand_principal(rng, out.decls.principals);
            parts.push_back(make_said(rand_principal(rng, out.decls.principals),
                                      make_property(level_prop(lvl), tgt_arg)));
        }
        GrantPtr g = make_grant_trimmed({x}, make_conjunction(parts),
                                        make_property("Goal", arg));
        out.query.trusted.push_back({g, seq++, 0});
    }
    // direct facts keep some queries derivable
    if (chance(rng, 0.5)) {
        int lvl = pick(rng, 0, nl - 1);
        out.query.trusted.push_back(
            {make_grant({}, nullptr,
                        make_property(level_prop(lvl), rand_principal(rng, out.decls.principals))),
             seq++, 0});
    }

    if (chance(rng, 0.6)) {
        out.query.goal = make_property("Goal", rand_principal(rng, out.decls.principals));
    } else {
        int lvl = pick(rng, 0, nl - 1);
        out.query.goal =
            make_property(level_prop(lvl), rand_principal(rng, out.decls.principals));
    }
    return out;
}

// A closed condition plus a small license set; cycles permitted, so the
// legacy Holds may diverge.
struct ConditionInstance {
    Declarations decls;
    std::vector<License> licenses;
    CondPtr condition;
};

inline ConditionInstance random_condition_instance(Rng& rng) {
    using namespace gen_detail;
    ConditionInstance out;
    int np = pick(rng, 2, 3);
    for (int i = 0; i < np; ++i) out.decls.principals.push_back("P" + std::to_string(i + 1));
    int nprops = pick(rng, 1, 2);
    for (int i = 0; i < nprops; ++i) out.decls.properties.push_back("Q" + std::to_string(i + 1));
    out.decls.normalize();

    auto rand_conclusion = [&](bool allow_var) -> ConcPtr {
        std::string prop =
            out.decls.properties[pick(rng, 0, static_cast<int>(out.decls.properties.size()) - 1)];
        if (allow_var && chance(rng, 0.4)) return make_property(prop, PrincipalTerm::var("x_p1"));
        return make_property(prop, rand_principal(rng, out.decls.principals));
    };

    int nl = pick(rng, 1, 3);
    for (int i = 0; i < nl; ++i) {
        ConcPtr cons = rand_conclusion(true);
        std::vector<CondPtr> parts;
        int nconj = pick(rng, 0, 2);
        for (int c = 0; c < nconj; ++c)
            parts.push_back(
                make_said(rand_principal(rng, out.decls.principals), rand_conclusion(true)));
        GrantPtr g = make_grant_trimmed({{"x_p1", Sort::Principal}}, make_conjunction(parts),
                                        cons);
        out.licenses.push_back({rand_principal(rng, out.decls.principals), g, i, 0});
    }
    std::vector<CondPtr> parts;
    int n = pick(rng, 1, 2);
    for (int i = 0; i < n; ++i)
        parts.push_back(
            make_said(rand_principal(rng, out.decls.principals), rand_conclusion(false)));
    out.condition = make_conjunction(parts);
    return out;
}

// Growing |L| with bounded Said depth: half the licenses are level-0 facts,
// half level-1 rules over them; the goal rule sits on top.  Stays inside the
// restrained, union-free, 0-restricted, hierarchical fragment.  No authority
// grants: the cost lives in Holds2's matching over the license set, which is
// the polynomial path (admission chains grow combinatorially with admissible
// licenses and are kept out of the measurement).
inline Generated chain_query(Rng& rng, int licenses) {
    using namespace gen_detail;
    Generated out;
    int np = 5;
    for (int i = 0; i < np; ++i) out.decls.principals.push_back("P" + std::to_string(i + 1));
    out.decls.properties = {"Fact", "Rule", "Goal"};
    out.decls.normalize();

    int seq = 0;
    int facts = licenses / 2 + 1;
    for (int i = 0; i < facts; ++i) {
        GrantPtr g = make_grant({}, nullptr,
                                make_property("Fact", rand_principal(rng, out.decls.principals)));
        out.query.licenses.push_back({rand_principal(rng, out.decls.principals), g, seq++, 0});
    }
    for (int i = facts; i < licenses; ++i) {
        Variable x{"x_p1", Sort::Principal};
        std::vector<CondPtr> parts;
        parts.push_back(make_said(rand_principal(rng, out.decls.principals),
                                  make_property("Fact", PrincipalTerm::var(x.name))));
        if (chance(rng, 0.5))
            parts.push_back(make_said(rand_principal(rng, out.decls.principals),
                                      make_property("Fact",
                                                    rand_principal(rng, out.decls.principals))));
        GrantPtr g = make_grant({x}, make_conjunction(parts),
                                make_property("Rule", PrincipalTerm::var(x.name)));
        out.query.licenses.push_back({rand_principal(rng, out.decls.principals), g, seq++, 0});
    }
    Variable x{"x_p1", Sort::Principal};
    CondPtr ante = make_said(rand_principal(rng, out.decls.principals),
                             make_property("Rule", PrincipalTerm::var(x.name)));
    out.query.trusted.push_back(
        {make_grant({x}, ante, make_property("Goal", PrincipalTerm::var(x.name))), seq++, 0});
    out.query.goal = make_property("Goal", rand_principal(rng, out.decls.principals));
    return out;
}

// Free-form well-formed syntax for parser round trips: unions, empty sets,
// nested grant literals, conjunctions, optional negation.
inline Generated random_ast(Rng& rng, bool negation = false) {
    using namespace gen_detail;
    Generated out;
    int np = pick(rng, 1, 4);
    for (int i = 0; i < np; ++i) out.decls.principals.push_back("P" + std::to_string(i + 1));
    int nq = pick(rng, 1, 3);
    for (int i = 0; i < nq; ++i) out.decls.properties.push_back("Q" + std::to_string(i + 1));
    out.decls.negation = negation;
    out.decls.normalize();

    int var_counter = 0;
    std::vector<Variable> scope;

    std::function<PrincipalTerm(void)> rand_prin = [&]() {
        std::vector<std::string> names, vars;
        int k = pick(rng, 0, 2);
        for (int i = 0; i < k; ++i)
            names.push_back(
                out.decls.principals[pick(rng, 0, static_cast<int>(np) - 1)]);
        for (const auto& v : scope)
            if (v.sort == Sort::Principal && chance(rng, 0.2)) vars.push_back(v.name);
        if (names.empty() && vars.empty() && chance(rng, 0.7))
            names.push_back(out.decls.principals[pick(rng, 0, np - 1)]);
        return PrincipalTerm::make(std::move(names), std::move(vars));
    };

    std::function<GrantPtr(int)> rand_grant;

    std::function<ConcPtr(int)> rand_conc = [&](int depth) -> ConcPtr {
        bool neg = negation && chance(rng, 0.2);
        if (depth <= 0 || chance(rng, 0.6)) {
            std::string prop = out.decls.properties[pick(rng, 0, nq - 1)];
            return make_property(prop, rand_prin(), neg);
        }
        // permission; resource is a variable from scope or a grant literal
        for (const auto& v : scope)
            if (v.sort == Sort::Resource && chance(rng, 0.3))
                return make_permission(rand_prin(), Resource::make_var(v.name), neg);
        return make_permission(rand_prin(), Resource::make_grant(rand_grant(depth - 1)), neg);
    };

    std::function<CondPtr(int)> rand_cond = [&](int depth) -> CondPtr {
        int n = pick(rng, 0, 2);
        std::vector<CondPtr> parts;
        for (int i = 0; i < n; ++i) {
            bool neg = negation && chance(rng, 0.2);
            parts.push_back(make_said(rand_prin(), rand_conc(depth - 1), neg));
        }
        return make_conjunction(parts);
    };

    rand_grant = [&](int depth) -> GrantPtr {
        int nb = pick(rng, 0, depth > 0 ? 2 : 0);
        std::vector<Variable> binders;
        for (int i = 0; i < nb; ++i) {
            Sort s = chance(rng, 0.5) ? Sort::Principal : Sort::Resource;
            std::string name =
                (s == Sort::Principal ? "x_p" : "x_r") + std::to_string(++var_counter);
            binders.push_back({name, s});
            scope.push_back({name, s});
        }
        CondPtr ante = rand_cond(depth);
        ConcPtr cons = rand_conc(depth);
        scope.resize(scope.size() - binders.size());
        return make_grant_trimmed(binders, ante, cons);
    };

    int seq = 0;
    int nlic = pick(rng, 0, 3);
    for (int i = 0; i < nlic; ++i) {
        GrantPtr g = rand_grant(2);
        if (!g->closed_) { --i; continue; }
        out.query.licenses.push_back(
            {PrincipalTerm::singleton(out.decls.principals[pick(rng, 0, np - 1)]), g, seq++, 0});
    }
    int ntr = pick(rng, 0, 3);
    for (int i = 0; i < ntr; ++i) {
        GrantPtr g = rand_grant(2);
        if (!g->closed_) { --i; continue; }
        out.query.trusted.push_back({g, seq++, 0});
    }
    do {
        out.query.goal = rand_conc(2);
    } while (!out.query.goal->closed_);
    return out;
}

}  // namespace gen
}  // namespace xrml

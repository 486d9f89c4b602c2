#pragma once

// Encoders that turn matching-pair search (PCP), Hamiltonian path and 3-SAT
// instances into queries, each paired with an independent brute-force
// decision procedure.  The encoders are test generators: the first exhibits
// divergence under fuel, the others pin the NP-hardness constructions.

#include <algorithm>
#include <functional>
#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "xrml/ast.hpp"
#include "xrml/parser.hpp"

namespace xrml {
namespace reductions {

struct Encoded {
    Declarations decls;
    Query query;
};

// ---- matching-pair search (PCP) ---------------------------------------------

struct PcpInstance {
    std::vector<std::pair<std::string, std::string>> pairs;  // (s_i, t_i)
};

namespace red_detail {

inline GrantPtr fact_grant(ConcPtr c) { return make_grant({}, nullptr, std::move(c)); }

inline std::string symbol_principal(char c) { return std::string("S") + c; }

// G_s(g): wrap g with one permission grant per symbol of s, first symbol
// outermost.
inline Resource wrap_string(const std::string& s, Resource base) {
    Resource r = std::move(base);
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
        ConcPtr perm = make_permission(PrincipalTerm::singleton(symbol_principal(*it)), r);
        r = Resource::make_grant(fact_grant(perm));
    }
    return r;
}

// G(a, b) = Said(P, Perm(P, issue, a)) -> Perm(P, issue, b)
inline GrantPtr pair_grant(const Resource& a, const Resource& b,
                           const std::vector<Variable>& binders = {}) {
    PrincipalTerm p = PrincipalTerm::singleton("P");
    CondPtr ante = make_said(p, make_permission(p, a));
    ConcPtr cons = make_permission(p, b);
    return make_grant_trimmed(binders, ante, cons);
}

}  // namespace red_detail

inline Encoded encode_pcp(const PcpInstance& inst) {
    using namespace red_detail;
    Encoded out;
    out.decls.principals.push_back("P");
    for (const auto& [s, t] : inst.pairs) {
        for (char c : s) out.decls.principals.push_back(symbol_principal(c));
        for (char c : t) out.decls.principals.push_back(symbol_principal(c));
    }
    out.decls.properties = {"Pr"};
    out.decls.normalize();

    PrincipalTerm p = PrincipalTerm::singleton("P");
    Resource pr_grant = Resource::make_grant(fact_grant(make_property("Pr", p)));

    int seq = 0;
    for (const auto& [s, t] : inst.pairs) {
        // (P, Perm(P, issue, G(G_s(Pr(P)), G_t(Pr(P)))))
        GrantPtr base = pair_grant(wrap_string(s, pr_grant), wrap_string(t, pr_grant));
        out.query.licenses.push_back(
            {p, fact_grant(make_permission(p, Resource::make_grant(base))), seq++, 0});

        // (P, forall x1 x2 (Said(P, Perm(P, issue, G(x1, x2)))
        //                   -> Perm(P, issue, G(G_s(x1), G_t(x2)))))
        std::vector<Variable> binders = {{"x_r1", Sort::Resource}, {"x_r2", Sort::Resource}};
        Resource x1 = Resource::make_var("x_r1");
        Resource x2 = Resource::make_var("x_r2");
        GrantPtr inner = pair_grant(x1, x2);
        CondPtr ante = make_said(p, make_permission(p, Resource::make_grant(inner)));
        GrantPtr stepped = pair_grant(wrap_string(s, x1), wrap_string(t, x2));
        ConcPtr cons = make_permission(p, Resource::make_grant(stepped));
        out.query.licenses.push_back({p, make_grant(binders, ante, cons), seq++, 0});
    }

    // R: forall x (Said(P, Perm(P, issue, G(x, x))) -> Pr(P))
    Resource x = Resource::make_var("x_r1");
    GrantPtr diag = pair_grant(x, x);
    CondPtr ante = make_said(p, make_permission(p, Resource::make_grant(diag)));
    out.query.trusted.push_back(
        {make_grant({{"x_r1", Sort::Resource}}, ante, make_property("Pr", p)), seq++, 0});

    out.query.goal = make_property("Pr", p);
    return out;
}

// Exhaustive search over index sequences up to max_len.
inline bool pcp_brute_force(const PcpInstance& inst, int max_len) {
    size_t n = inst.pairs.size();
    std::vector<size_t> seq;
    std::function<bool()> rec = [&]() -> bool {
        if (!seq.empty()) {
            std::string s, t;
            for (size_t i : seq) {
                s += inst.pairs[i].first;
                t += inst.pairs[i].second;
            }
            if (s == t) return true;
        }
        if (static_cast<int>(seq.size()) == max_len) return false;
        for (size_t i = 0; i < n; ++i) {
            seq.push_back(i);
            if (rec()) return true;
            seq.pop_back();
        }
        return false;
    };
    return rec();
}

// ---- Hamiltonian path -------------------------------------------------------

struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // 0-based, undirected

    bool adjacent(int u, int v) const {
        for (auto [a, b] : edges)
            if ((a == u && b == v) || (a == v && b == u)) return true;
        return false;
    }
};

inline Encoded encode_hamiltonian(const Graph& g) {
    Encoded out;
    auto vname = [](int i) { return "V" + std::to_string(i + 1); };
    for (int i = 0; i < g.n; ++i) out.decls.principals.push_back(vname(i));
    out.decls.principals.push_back("Alice");
    out.decls.properties = {"NodeP", "EdgeP", "PathP"};
    out.decls.normalize();

    PrincipalTerm alice = PrincipalTerm::singleton("Alice");
    int seq = 0;
    for (int i = 0; i < g.n; ++i)
        out.query.licenses.push_back(
            {alice,
             red_detail::fact_grant(make_property("NodeP", PrincipalTerm::singleton(vname(i)))),
             seq++, 0});
    for (auto [u, v] : g.edges)
        out.query.licenses.push_back(
            {alice,
             red_detail::fact_grant(
                 make_property("EdgeP", PrincipalTerm::make({vname(u), vname(v)}))),
             seq++, 0});

    std::vector<Variable> binders;
    std::vector<CondPtr> parts;
    auto var = [](int i) { return "x_p" + std::to_string(i + 1); };
    for (int i = 0; i < g.n; ++i) binders.push_back({var(i), Sort::Principal});
    for (int i = 0; i < g.n; ++i)
        parts.push_back(
            make_said(alice, make_property("NodeP", PrincipalTerm::var(var(i)))));
    for (int i = 0; i + 1 < g.n; ++i)
        parts.push_back(make_said(
            alice, make_property("EdgeP", PrincipalTerm::var(var(i)).unite(
                                              PrincipalTerm::var(var(i + 1))))));
    PrincipalTerm all_vars;
    for (int i = 0; i < g.n; ++i) all_vars = all_vars.unite(PrincipalTerm::var(var(i)));
    out.query.trusted.push_back(
        {make_grant(binders, make_conjunction(parts), make_property("PathP", all_vars)), seq++,
         0});

    std::vector<std::string> names;
    for (int i = 0; i < g.n; ++i) names.push_back(vname(i));
    out.query.goal = make_property("PathP", PrincipalTerm::make(names));
    return out;
}

inline bool hamiltonian_brute_force(const Graph& g) {
    if (g.n == 0) return false;
    std::vector<int> perm(g.n);
    for (int i = 0; i < g.n; ++i) perm[i] = i;
    do {
        bool ok = true;
        for (int i = 0; i + 1 < g.n && ok; ++i)
            if (!g.adjacent(perm[i], perm[i + 1])) ok = false;
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// ---- 3-SAT ------------------------------------------------------------------

struct Cnf3 {
    int num_vars = 0;
    std::vector<std::array<int, 3>> clauses;  // literals +-(1..num_vars)
};

inline bool sat_brute_force(const Cnf3& f) {
    for (uint64_t bits = 0; bits < (uint64_t{1} << f.num_vars); ++bits) {
        bool ok = true;
        for (const auto& c : f.clauses) {
            bool cl = false;
            for (int lit : c) {
                int v = std::abs(lit) - 1;
                bool val = (bits >> v) & 1;
                if (lit < 0) val = !val;
                if (val) { cl = true; break; }
            }
            if (!cl) { ok = false; break; }
        }
        if (ok) return true;
    }
    return false;
}

namespace red_detail {

inline std::string clause_principal(int i) { return "C" + std::to_string(i + 1); }

// the nested-permission chain g_i and the conclusion e(t_1..t_m);
// each t is either a variable name (principal sort) or a ground principal
struct ChainArg {
    bool is_var = false;
    std::string name;  // variable name or principal name

    PrincipalTerm term() const {
        return is_var ? PrincipalTerm::var(name) : PrincipalTerm::singleton(name);
    }
};

inline ConcPtr chain_conclusion(const std::vector<ChainArg>& args) {
    // g_0 = Pr(PT); g_i = true -> Perm(t_i, issue, g_{i-1});
    // e(t_1..t_m) = Perm(t_m, issue, g_{m-1})
    Resource r = Resource::make_grant(
        fact_grant(make_property("Pr", PrincipalTerm::singleton("PT"))));
    for (size_t i = 0; i + 1 < args.size(); ++i) {
        ConcPtr perm = make_permission(args[i].term(), r);
        r = Resource::make_grant(fact_grant(perm));
    }
    return make_permission(args.back().term(), r);
}

inline std::vector<ChainArg> var_args(int m) {
    std::vector<ChainArg> args;
    for (int i = 0; i < m; ++i) args.push_back({true, "x_p" + std::to_string(i + 1)});
    return args;
}

inline std::vector<Variable> chain_binders(int m) {
    std::vector<Variable> b;
    for (int i = 0; i < m; ++i) b.push_back({"x_p" + std::to_string(i + 1), Sort::Principal});
    return b;
}

inline void declare_sat_names(Declarations& d, const Cnf3& f) {
    for (size_t i = 0; i < f.clauses.size(); ++i)
        d.principals.push_back(clause_principal(static_cast<int>(i)));
    d.principals.push_back("PT");
    d.principals.push_back("PF");
    d.properties = {"Pr"};
}

}  // namespace red_detail

// Clause principals say instantiated chains; one trusted grant requires all
// clauses to have spoken.
inline Encoded encode_3sat_b(const Cnf3& f) {
    using namespace red_detail;
    Encoded out;
    declare_sat_names(out.decls, f);
    out.decls.normalize();

    int m = f.num_vars;
    int seq = 0;
    for (size_t i = 0; i < f.clauses.size(); ++i) {
        PrincipalTerm issuer = PrincipalTerm::singleton(clause_principal(static_cast<int>(i)));
        for (int lit : f.clauses[i]) {
            std::vector<ChainArg> args = var_args(m);
            args[std::abs(lit) - 1] = {false, lit > 0 ? "PT" : "PF"};
            GrantPtr g = make_grant_trimmed(chain_binders(m), nullptr, chain_conclusion(args));
            out.query.licenses.push_back({issuer, g, seq++, 0});
        }
    }
    std::vector<CondPtr> parts;
    for (size_t i = 0; i < f.clauses.size(); ++i)
        parts.push_back(make_said(PrincipalTerm::singleton(clause_principal(static_cast<int>(i))),
                                  chain_conclusion(var_args(m))));
    out.query.trusted.push_back(
        {make_grant_trimmed(chain_binders(m), make_conjunction(parts),
                            make_property("Pr", PrincipalTerm::singleton("PT"))),
         seq++, 0});
    out.query.goal = make_property("Pr", PrincipalTerm::singleton("PT"));
    return out;
}

// Clause principals chain through each other; the trusted grant listens only
// to the first clause.  Uses fresh principals D1..Dm in the goal.
inline Encoded encode_3sat_c(const Cnf3& f) {
    using namespace red_detail;
    Encoded out;
    declare_sat_names(out.decls, f);
    int m = f.num_vars;
    for (int i = 0; i < m; ++i) out.decls.principals.push_back("D" + std::to_string(i + 1));
    out.decls.normalize();

    int n = static_cast<int>(f.clauses.size());
    int seq = 0;
    auto emit = [&](int i, int lit, const std::string& p) {
        // (C_i, forall xbar (Said(C_{i+1}, e'[x_j/X]) -> e'[x_j/p]))  i < n-1
        // (C_{n-1}, forall xbar (e'[x_j/p]))
        int j = std::abs(lit) - 1;
        std::string fixed = lit > 0 ? "PT" : "PF";
        std::vector<ChainArg> cons_args = var_args(m);
        cons_args[j] = {false, p};
        GrantPtr g;
        if (i + 1 < n) {
            std::vector<ChainArg> ante_args = var_args(m);
            ante_args[j] = {false, fixed};
            CondPtr ante = make_said(PrincipalTerm::singleton(clause_principal(i + 1)),
                                     chain_conclusion(ante_args));
            g = make_grant_trimmed(chain_binders(m), ante, chain_conclusion(cons_args));
        } else {
            g = make_grant_trimmed(chain_binders(m), nullptr, chain_conclusion(cons_args));
        }
        out.query.licenses.push_back(
            {PrincipalTerm::singleton(clause_principal(i)), g, seq++, 0});
    };
    for (int i = 0; i < n; ++i) {
        for (int lit : f.clauses[i]) {
            const char* bad = lit > 0 ? "PF" : "PT";
            for (const auto& p : out.decls.principals)
                if (p != bad) emit(i, lit, p);
        }
    }

    std::vector<ChainArg> goal_args;
    for (int i = 0; i < m; ++i) goal_args.push_back({false, "D" + std::to_string(i + 1)});
    ConcPtr goal = chain_conclusion(goal_args);
    CondPtr ante = make_said(PrincipalTerm::singleton(clause_principal(0)), goal);
    out.query.trusted.push_back({make_grant({}, ante, goal), seq++, 0});
    out.query.goal = goal;
    return out;
}

// The negation-extension variant: like encode_3sat_b but the trusted grants
// force a contradiction exactly when the formula is satisfiable.  Consumed by
// the logic translation, not the engine.
inline Encoded encode_3sat_neg(const Cnf3& f) {
    using namespace red_detail;
    Encoded out = encode_3sat_b(f);
    out.decls.negation = true;
    int m = f.num_vars;
    int seq = static_cast<int>(out.query.licenses.size() + out.query.trusted.size());
    out.query.trusted.pop_back();  // replace the Pr(PT) rule

    std::vector<CondPtr> parts;
    for (size_t i = 0; i < f.clauses.size(); ++i)
        parts.push_back(make_said(PrincipalTerm::singleton(clause_principal(static_cast<int>(i))),
                                  chain_conclusion(var_args(m))));
    out.query.trusted.push_back(
        {make_grant_trimmed(chain_binders(m), make_conjunction(parts),
                            chain_conclusion(var_args(m))),
         seq++, 0});

    // forall xbar (not e')
    ConcPtr neg = make_permission(chain_conclusion(var_args(m))->principal,
                                  chain_conclusion(var_args(m))->resource, true);
    out.query.trusted.push_back({make_grant_trimmed(chain_binders(m), nullptr, neg), seq++, 0});
    return out;
}

// ---- external formats -------------------------------------------------------

// Edge-list text: first line is the vertex count, then one "u v" pair per
// line (1-based).  '#' comments allowed.
inline Graph parse_edge_list(const std::string& text) {
    Graph g;
    std::istringstream in(text);
    std::string line;
    bool have_n = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        if (!have_n) {
            if (ls >> g.n) {
                if (g.n < 0) throw std::runtime_error("negative vertex count");
                have_n = true;
            }
            continue;
        }
        int u, v;
        if (ls >> u) {
            if (!(ls >> v)) throw std::runtime_error("odd edge entry on line " +
                                                     std::to_string(lineno));
            if (u < 1 || v < 1 || u > g.n || v > g.n)
                throw std::runtime_error("vertex out of range on line " + std::to_string(lineno));
            g.edges.push_back({u - 1, v - 1});
        }
    }
    if (!have_n) throw std::runtime_error("missing vertex count");
    return g;
}

// DIMACS subset: optional 'c' comments, one 'p cnf <vars> <clauses>' line,
// clause lines of exactly three literals terminated by 0.
inline Cnf3 parse_dimacs(const std::string& text) {
    Cnf3 f;
    std::istringstream in(text);
    std::string line;
    bool have_p = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (!have_p) {
            std::string p, cnf;
            if (!(ls >> p)) continue;
            if (p != "p") throw std::runtime_error("expected 'p cnf' header");
            ls >> cnf >> f.num_vars;
            have_p = true;
            continue;
        }
        std::array<int, 3> clause{};
        int lit, k = 0;
        while (ls >> lit && lit != 0) {
            if (k == 3) throw std::runtime_error("clause with more than three literals");
            if (std::abs(lit) > f.num_vars) throw std::runtime_error("literal out of range");
            clause[k++] = lit;
        }
        if (k == 0) continue;
        while (k < 3) { clause[k] = clause[k - 1]; ++k; }  // pad by repetition
        f.clauses.push_back(clause);
    }
    if (!have_p) throw std::runtime_error("missing 'p cnf' header");
    return f;
}

}  // namespace reductions
}  // namespace xrml

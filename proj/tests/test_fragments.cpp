#include <doctest.h>

#include <chrono>

#include "helpers.hpp"
#include "xrml/engine.hpp"
#include "xrml/fragments.hpp"

using namespace xrml;
using testutil::load_fixture;

namespace {

MatchContext ctx_for(const Declarations& d) {
    MatchContext c;
    c.principal_universe = d.principals;
    c.mode = UnionMode::Free;
    return c;
}

GrantPtr parse_grant_stmt(const std::string& decls, const std::string& grant) {
    Workspace ws = parse_license_file("xrml-fragment v1\n" + decls + "trusted grant " + grant + ";\n");
    return ws.trusted.at(0).grant;
}

const std::string kDecls =
    "declare principals Alice, Bob;\ndeclare properties Pr, Good, Great;\n";

}  // namespace

TEST_CASE("is_restrained") {
    // forall x forall y (Said({}, Perm(x, issue, y)) -> Perm(Alice, issue, y))
    auto g1 = parse_grant_stmt(kDecls,
                               "forall x_p1 . forall x_r1 . Said({}, Perm({x_p1}, issue, x_r1)) "
                               "-> Perm({Alice}, issue, x_r1)");
    CHECK(is_restrained(g1));

    // forall y forall z (Said({}, Perm(Alice, issue, y)) -> Perm(Alice, issue, z))
    auto g2 = parse_grant_stmt(kDecls,
                               "forall x_r1 . forall x_r2 . Said({}, Perm({Alice}, issue, x_r1)) "
                               "-> Perm({Alice}, issue, x_r2)");
    CHECK_FALSE(is_restrained(g2));

    // no variables at all
    auto g3 = parse_grant_stmt(kDecls, "Pr(Alice)");
    CHECK(is_restrained(g3));
}

TEST_CASE("n_restriction") {
    // forall x (Said(Alice, Great(x)) -> Good(x)): x reappears, count 0
    auto g1 = parse_grant_stmt(kDecls, "forall x_p1 . Said({Alice}, Great(x_p1)) -> Good(x_p1)");
    CHECK(n_restriction(g1) == 0);

    // forall x forall y (Said(x, Pr(y)) -> Pr(y)): x is antecedent-only
    auto g2 = parse_grant_stmt(kDecls,
                               "forall x_p1 . forall x_p2 . Said({x_p1}, Pr(x_p2)) -> Pr(x_p2)");
    CHECK(n_restriction(g2) == 1);

    auto g3 = parse_grant_stmt(kDecls, "Pr(Alice)");
    CHECK(n_restriction(g3) == 0);
}

TEST_CASE("affects") {
    auto in = load_fixture("chain");
    MatchContext ctx = ctx_for(in.decls);
    const License& alice_g1 = in.query.licenses[0];
    const License& amy_g2 = in.query.licenses[1];

    CHECK(affects(alice_g1, amy_g2, ctx) == Affects::Yes);
    CHECK(affects(amy_g2, alice_g1, ctx) == Affects::No);

    // a Said-supported self-grant affects itself
    auto self_in = load_fixture("self_ref");
    const License& self = self_in.query.licenses[0];
    CHECK(affects(self, self, ctx_for(self_in.decls)) == Affects::Yes);

    // no Said condition in the antecedent: no effect possible
    Workspace ws = parse_license_file(
        "xrml-fragment v1\ndeclare principals Alice, Amy, Bob;\ndeclare properties Smart, Good;\n"
        "license ({Alice}) grants Smart(Bob);\nlicense ({Amy}) grants Good(Bob);\n");
    CHECK(affects(ws.licenses[0], ws.licenses[1], ctx_for(ws.decls)) == Affects::No);
}

TEST_CASE("affects matches through variable instantiation") {
    // (Alice, Smart(Bob)) affects (Amy, forall x . Said(Alice, Smart(x)) -> Attractive(x))
    Workspace ws = parse_license_file(
        "xrml-fragment v1\ndeclare principals Alice, Amy, Bob;\n"
        "declare properties Smart, Attractive;\n"
        "license ({Alice}) grants Smart(Bob);\n"
        "license ({Amy}) grants forall x_p1 . Said({Alice}, Smart(x_p1)) -> Attractive(x_p1);\n");
    MatchContext ctx = ctx_for(ws.decls);
    CHECK(affects(ws.licenses[0], ws.licenses[1], ctx) == Affects::Yes);

    // issuer containment must hold: Bob's statement does not reach Said({Alice}, ...)
    Workspace ws2 = parse_license_file(
        "xrml-fragment v1\ndeclare principals Alice, Amy, Bob;\n"
        "declare properties Smart, Attractive;\n"
        "license ({Bob}) grants Smart(Bob);\n"
        "license ({Amy}) grants forall x_p1 . Said({Alice}, Smart(x_p1)) -> Attractive(x_p1);\n");
    CHECK(affects(ws2.licenses[0], ws2.licenses[1], ctx_for(ws2.decls)) == Affects::No);
}

TEST_CASE("hierarchical_order") {
    auto in = load_fixture("chain");
    MatchContext ctx = ctx_for(in.decls);
    Hierarchy h = hierarchical_order(in.query.licenses, ctx);
    REQUIRE(h.ok);
    REQUIRE(h.order.size() == 2);
    CHECK(h.order[0] == 0);  // (Alice, g1) precedes (Amy, g2)
    CHECK(h.order[1] == 1);

    auto self_in = load_fixture("self_ref");
    Hierarchy h2 = hierarchical_order(self_in.query.licenses, ctx_for(self_in.decls));
    CHECK_FALSE(h2.ok);
    CHECK(h2.cycle.size() == 1);

    Hierarchy h3 = hierarchical_order({}, ctx);
    CHECK(h3.ok);
    CHECK(h3.order.empty());
}

TEST_CASE("the growing-chain license set is not hierarchical") {
    auto in = load_fixture("loop_growing");
    Hierarchy h = hierarchical_order(in.query.licenses, ctx_for(in.decls));
    CHECK_FALSE(h.ok);
}

TEST_CASE("classify fixture queries") {
    SUBCASE("two-license chain is fully green") {
        auto in = load_fixture("chain");
        FragmentReport r = classify(in.decls, in.query, 0, -1);
        CHECK(r.in_l0);
        CHECK(r.in_l1);
        CHECK(r.max_n_restriction == 0);
        CHECK(r.hierarchical);
        CHECK(r.height_bound == 5);  // 2|L|+1 with |L| = 2
        CHECK(r.polynomial_path);
        CHECK(r.offending.empty());
    }
    SUBCASE("matching-pair search has exactly one unrestrained grant") {
        auto in = load_fixture("pcp_ab");
        FragmentReport r = classify(in.decls, in.query, 0, -1);
        CHECK_FALSE(r.in_l0);
        int unrestrained = 0;
        for (const auto& o : r.offending)
            if (o.reason.find("unrestrained") != std::string::npos) ++unrestrained;
        CHECK(unrestrained == 1);
    }
    SUBCASE("triangle path query mentions unions") {
        auto in = load_fixture("ham_k3");
        FragmentReport r = classify(in.decls, in.query, 0, -1);
        CHECK(r.in_l0);
        CHECK_FALSE(r.in_l1);
    }
    SUBCASE("self-referential license reports its cycle") {
        auto in = load_fixture("self_ref");
        FragmentReport r = classify(in.decls, in.query, 0, -1);
        CHECK_FALSE(r.hierarchical);
        CHECK(r.cycle_labels.size() == 1);
    }
}

TEST_CASE("affects is monotone in the Said principal set") {
    // enlarging the Said principal never turns Yes into No
    Workspace small = parse_license_file(
        "xrml-fragment v1\ndeclare principals Alice, Bob;\ndeclare properties Smart, Good;\n"
        "license ({Alice}) grants Smart(Bob);\n"
        "license ({Bob}) grants Said({Alice}, Smart(Bob)) -> Good(Bob);\n");
    Workspace big = parse_license_file(
        "xrml-fragment v1\ndeclare principals Alice, Bob;\ndeclare properties Smart, Good;\n"
        "license ({Alice}) grants Smart(Bob);\n"
        "license ({Bob}) grants Said({Alice, Bob}, Smart(Bob)) -> Good(Bob);\n");
    MatchContext ctx = ctx_for(small.decls);
    CHECK(affects(small.licenses[0], small.licenses[1], ctx) == Affects::Yes);
    CHECK(affects(big.licenses[0], big.licenses[1], ctx) == Affects::Yes);
}

TEST_CASE("hierarchical license sets respect the Holds2 height bound") {
    auto in = load_fixture("chain");
    MatchContext ctx = ctx_for(in.decls);
    Hierarchy h = hierarchical_order(in.query.licenses, ctx);
    REQUIRE(h.ok);
    EngineOutcome out = query2(in.decls, in.query);
    CHECK(out.stats.max_holds_height <= 2 * static_cast<int>(in.query.licenses.size()) + 1);
}

TEST_CASE("report serializes to JSON") {
    auto in = load_fixture("chain");
    FragmentReport r = classify(in.decls, in.query, 0, -1);
    auto j = report_to_json(r);
    CHECK(j["in_l0"] == true);
    CHECK(j["hierarchical"] == true);
    CHECK(j["schema_version"] == 1);
}

#include "xrml/generator.hpp"

TEST_CASE("classify stays fast on larger license sets") {
    xrml::gen::Rng rng(12);
    xrml::gen::Generated g = xrml::gen::chain_query(rng, 40);
    auto t0 = std::chrono::steady_clock::now();
    FragmentReport r = classify(g.decls, g.query, 0, -1);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(r.in_l0);
    CHECK(r.in_l1);
    CHECK(r.hierarchical);
    CHECK(secs < 2.0);
}

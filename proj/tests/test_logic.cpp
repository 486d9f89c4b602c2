#include <doctest.h>

#include "helpers.hpp"
#include "xrml/logic.hpp"

using namespace xrml;
using namespace xrml::logic;
using testutil::load_fixture;

namespace {

struct Setup {
    testutil::Loaded in;
    LogicContext ctx;
    TranslationParams params;

    explicit Setup(const std::string& fixture, bool negation = false,
                   const std::string& qname = "")
        : in(qname.empty() ? load_fixture(fixture, negation)
                           : load_fixture(fixture, qname, negation)),
          ctx(in.decls) {
        params.licenses = in.query.licenses;
        params.E = in.query.excluded;
        params.allow_negation = negation;
    }

    // harvest A from the engine per the correspondence statement
    void harvest_a() {
        EngineOptions opt;
        opt.capture_trace = false;
        EngineOutcome out = query2(in.decls, in.query, opt);
        params.A = out.resources_touched;
        ctx.set_resource_universe(params.A);
    }
};

}  // namespace

TEST_CASE("translation base clauses") {
    Setup s("chain");
    // true -> true
    CHECK(translate(s.ctx, make_true(), s.params) == s.ctx.truef());

    // a license whose permission is excluded translates to true
    const License& lic = s.in.query.licenses[0];
    TranslationParams p2 = s.params;
    p2.E.push_back(make_permission(lic.issuer, Resource::make_grant(lic.grant)));
    CHECK(translate(s.ctx, lic, p2) == s.ctx.truef());
    // and to a real implication otherwise
    CHECK(translate(s.ctx, lic, s.params)->kind == FKind::Implies);

    // a Said condition in S translates to false
    auto said = make_said(PrincipalTerm::singleton("Alice"),
                          make_property("Smart", PrincipalTerm::singleton("Bob")));
    TranslationParams p3 = s.params;
    p3.S.push_back(said);
    CHECK(translate(s.ctx, said, p3) == s.ctx.falsef());

    // Pr({Bob}) is an atom
    FormulaPtr atom = translate(
        s.ctx, make_property("Smart", PrincipalTerm::singleton("Bob")), s.params);
    CHECK(atom->kind == FKind::Atom);
}

TEST_CASE("Said translation does not depend on E") {
    Setup s("chain");
    auto said = make_said(PrincipalTerm::singleton("Alice"),
                          make_property("Smart", PrincipalTerm::singleton("Bob")));
    FormulaPtr a = translate(s.ctx, said, s.params);
    TranslationParams p2 = s.params;
    p2.E.push_back(s.in.query.goal);
    FormulaPtr b = translate(s.ctx, said, p2);
    CHECK(a == b);  // interned: identical formulas share a node
}

TEST_CASE("acceptably_valid basics") {
    Declarations d;
    d.principals = {"a", "b"};
    d.properties = {"Pr"};
    LogicContext ctx(d);
    FormulaPtr pa = ctx.atom_prop("Pr", PrincipalTerm::singleton("a"));
    FormulaPtr pb = ctx.atom_prop("Pr", PrincipalTerm::singleton("b"));

    CHECK(ctx.acceptably_valid(ctx.mk_implies(pa, pa)));
    // Val(Pr(a)) is false (Pr(a) is falsifiable) so the implication is vacuous
    CHECK(ctx.acceptably_valid(ctx.mk_implies(ctx.mk_val(pa), pb)));
    CHECK_FALSE(ctx.acceptably_valid(pa));
    CHECK_FALSE(ctx.acceptably_valid(ctx.mk_implies(pa, pb)));
    CHECK(ctx.acceptably_valid(ctx.mk_or({pa, ctx.mk_not(pa)})));
}

TEST_CASE("capacity guard raises instead of guessing") {
    Declarations d;
    d.principals = {"a", "b"};
    d.properties = {"Pr"};
    OracleOptions opt;
    opt.max_branch_atoms = 0;
    LogicContext ctx(d, UnionMode::Free, opt);
    FormulaPtr pa = ctx.atom_prop("Pr", PrincipalTerm::singleton("a"));
    FormulaPtr pb = ctx.atom_prop("Pr", PrincipalTerm::singleton("b"));
    FormulaPtr f = ctx.mk_implies(ctx.mk_or({pa, pb}), ctx.mk_and({pa, pb}));
    CHECK_THROWS_AS(ctx.acceptably_valid(f), CapacityError);
}

TEST_CASE("main translation vs alt1 on the chained-quantifier fixture") {
    Setup s("chained_quantifiers");
    s.harvest_a();

    EngineOutcome engine = query2(s.in.decls, s.in.query);
    CHECK(engine.verdict == Verdict::True);

    FormulaPtr main_f = query_formula(s.ctx, s.in.query, s.params);
    CHECK(s.ctx.acceptably_valid(main_f));

    TranslationParams alt = s.params;
    alt.variant = Variant::Alt1;
    LogicContext ctx2(s.in.decls);
    ctx2.set_resource_universe(s.params.A);
    FormulaPtr alt_f = query_formula(ctx2, s.in.query, alt);
    CHECK_FALSE(ctx2.acceptably_valid(alt_f));
}

TEST_CASE("main translation vs alt2 on the unconfessed-cheater fixture") {
    Setup s("unconfessed_cheater");
    s.harvest_a();

    EngineOutcome engine = query2(s.in.decls, s.in.query);
    CHECK(engine.verdict == Verdict::False);

    FormulaPtr main_f = query_formula(s.ctx, s.in.query, s.params);
    CHECK_FALSE(s.ctx.acceptably_valid(main_f));

    TranslationParams alt = s.params;
    alt.variant = Variant::Alt2;
    LogicContext ctx2(s.in.decls);
    ctx2.set_resource_universe(s.params.A);
    FormulaPtr alt_f = query_formula(ctx2, s.in.query, alt);
    CHECK(ctx2.acceptably_valid(alt_f));
}

TEST_CASE("negated Said over an S member is forced true") {
    Setup s("chain", true);
    auto said = make_said(PrincipalTerm::singleton("Alice"),
                          make_property("Smart", PrincipalTerm::singleton("Bob")));
    auto neg = make_said(said->principal, said->conclusion, true);
    TranslationParams p = s.params;
    p.allow_negation = true;
    p.S.push_back(said);
    CHECK(translate(s.ctx, neg, p) == s.ctx.truef());
}

TEST_CASE("negated-condition waiver policy grants access; a distinct predicate does not") {
    Setup neg("waiver_negated", true, "waiver");
    FormulaPtr f1 = query_formula(neg.ctx, neg.in.query, neg.params);
    CHECK(neg.ctx.acceptably_valid(f1));

    Setup dist("waiver_distinct", true, "waiver");
    FormulaPtr f2 = query_formula(dist.ctx, dist.in.query, dist.params);
    CHECK_FALSE(dist.ctx.acceptably_valid(f2));
}

TEST_CASE("employee case split at the formula level") {
    // SW(Alice) & forall x (Emp(x) => Access(x))
    //           & forall x (neg-part(x) & SW(x) => Access(x)) => Access(Alice)
    Declarations d;
    d.principals = {"Alice"};
    d.properties = {"Access", "Emp", "NotEmp", "SW"};
    LogicContext ctx(d);
    auto alice = PrincipalTerm::singleton("Alice");
    FormulaPtr sw = ctx.atom_prop("SW", alice);
    FormulaPtr emp = ctx.atom_prop("Emp", alice);
    FormulaPtr acc = ctx.atom_prop("Access", alice);

    auto build = [&](FormulaPtr negpart) {
        return ctx.mk_implies(
            ctx.mk_and({sw, ctx.mk_implies(emp, acc),
                        ctx.mk_implies(ctx.mk_and({negpart, sw}), acc)}),
            acc);
    };
    // with a genuine negation the case split closes
    CHECK(ctx.acceptably_valid(build(ctx.mk_not(emp))));
    // with a distinct predicate it does not
    CHECK_FALSE(ctx.acceptably_valid(build(ctx.atom_prop("NotEmp", alice))));
}

TEST_CASE("exclusion-set growth preserves conclusion translations") {
    Setup s("chain");
    s.harvest_a();
    // (a) conclusions ignore E entirely
    FormulaPtr c1 = translate(s.ctx, s.in.query.goal, s.params);
    TranslationParams p2 = s.params;
    p2.E.push_back(s.in.query.goal);
    FormulaPtr c2 = translate(s.ctx, s.in.query.goal, p2);
    CHECK(c1 == c2);

    // (b)/(c) g^{E} => g^{E u {e}} and the license version are acceptably valid
    for (const auto& t : s.in.query.trusted) {
        FormulaPtr ga = translate(s.ctx, t.grant, s.params);
        FormulaPtr gb = translate(s.ctx, t.grant, p2);
        CHECK(s.ctx.acceptably_valid(s.ctx.mk_implies(ga, gb)));
    }
    for (const auto& l : s.in.query.licenses) {
        FormulaPtr la = translate(s.ctx, l, s.params);
        FormulaPtr lb = translate(s.ctx, l, p2);
        CHECK(s.ctx.acceptably_valid(s.ctx.mk_implies(la, lb)));
    }
}

TEST_CASE("an excluded goal never makes the implication valid") {
    for (const char* name : {"chain", "quiet_group", "lost_license"}) {
        CAPTURE(name);
        Setup s(name);
        s.harvest_a();
        TranslationParams p = s.params;
        p.E.push_back(s.in.query.goal);
        Query q = s.in.query;
        q.excluded.push_back(q.goal);
        LogicContext ctx(s.in.decls);
        ctx.set_resource_universe(p.A);
        FormulaPtr f = query_formula(ctx, q, p);
        CHECK_FALSE(ctx.acceptably_valid(f));
    }
}

TEST_CASE("single-grant decomposition of valid implications") {
    // and_{g in G} tr(g) => tr(e) is acceptably valid iff one grant suffices,
    // iff e is not excluded and some A-closed substitution makes the
    // antecedent valid with a matching conclusion.
    Setup s("chain");
    s.harvest_a();
    std::vector<GrantPtr> G;
    for (const auto& t : s.in.query.trusted) G.push_back(t.grant);
    for (const auto& l : s.in.query.licenses) G.push_back(l.grant);

    ConcPtr e = s.in.query.goal;
    std::vector<FormulaPtr> parts;
    for (const auto& g : G) parts.push_back(translate(s.ctx, g, s.params));
    FormulaPtr all = s.ctx.mk_implies(s.ctx.mk_and(parts), translate(s.ctx, e, s.params));

    bool single = false;
    for (const auto& g : G) {
        FormulaPtr one = s.ctx.mk_implies(translate(s.ctx, g, s.params),
                                          translate(s.ctx, e, s.params));
        if (s.ctx.acceptably_valid(one)) single = true;
    }
    CHECK(s.ctx.acceptably_valid(all) == single);

    // the witness route: some A-closed substitution with matching conclusion
    // and an acceptably valid antecedent translation
    MatchContext mctx;
    mctx.principal_universe = s.in.decls.principals;
    bool witness = false;
    for (const auto& g : G) {
        for (const auto& sigma : enumerate_substitutions(g->binders, s.params.A, mctx)) {
            if (!equal(subst(g->consequent, sigma), e)) continue;
            FormulaPtr ante = translate(s.ctx, subst(g->antecedent, sigma), s.params);
            if (s.ctx.acceptably_valid(ante)) witness = true;
        }
    }
    CHECK(single == witness);
}

TEST_CASE("engine and semantics agree on the worked fixtures") {
    for (const char* name : {"chain", "quiet_group", "lost_license", "loop_same_call", "loop_with_fact", "chained_quantifiers", "unconfessed_cheater"}) {
        CAPTURE(name);
        auto in = load_fixture(name);
        CorrespondenceReport rep = check_correspondence(in.decls, in.query);
        REQUIRE(rep.oracle_ran);
        CHECK(rep.agree);
    }
}

TEST_CASE("formula printing and JSON") {
    Setup s("unconfessed_cheater");
    s.harvest_a();
    FormulaPtr f = query_formula(s.ctx, s.in.query, s.params);
    std::string text = print_formula(f);
    CHECK(text.find("Val(") != std::string::npos);
    CHECK(text.find("=>") != std::string::npos);
    auto j = formula_to_json(f);
    CHECK(j.contains("op"));
}

TEST_CASE("a trusted fact alone validates its own query") {
    Declarations d;
    d.principals = {"a"};
    d.properties = {"Pr"};
    LogicContext ctx(d);
    Query q;
    q.trusted.push_back({make_grant({}, nullptr,
                                    make_property("Pr", PrincipalTerm::singleton("a"))),
                         0, 0});
    q.goal = make_property("Pr", PrincipalTerm::singleton("a"));
    TranslationParams p;
    CHECK(ctx.acceptably_valid(query_formula(ctx, q, p)));
}

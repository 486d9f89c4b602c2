#include <doctest.h>

#include "xrml/ast.hpp"
#include "xrml/parser.hpp"
#include "xrml/printer.hpp"
#include "xrml/substitution.hpp"

using namespace xrml;

TEST_CASE("principal canonicalization realizes the union axioms") {
    // {Alice} u {Alice} = {Alice}
    auto a = PrincipalTerm::singleton("Alice");
    CHECK(a.unite(a) == a);

    // {Alice} u ({Bob} u {Alice}) = {Alice, Bob}
    auto b = PrincipalTerm::singleton("Bob");
    auto ab = a.unite(b.unite(a));
    CHECK(ab == PrincipalTerm::make({"Alice", "Bob"}));
    CHECK(ab == b.unite(a));

    // {p} u {} = {p}
    CHECK(a.unite(PrincipalTerm::empty()) == a);

    // idempotence of canonicalization
    CHECK(ab.unite(ab) == ab);
}

TEST_CASE("is_closed") {
    auto smart_bob = make_property("Smart", PrincipalTerm::singleton("Bob"));
    CHECK(is_closed(smart_bob));

    auto open_perm = make_permission(PrincipalTerm::var("x_p1"),
                                     Resource::make_grant(make_grant({}, nullptr, smart_bob)));
    CHECK_FALSE(is_closed(open_perm));

    // forall x . Said({}, Pr(x)) -> Pr(x) is closed
    auto pr_x = make_property("Pr", PrincipalTerm::var("x_p1"));
    auto g = make_grant({{"x_p1", Sort::Principal}},
                        make_said(PrincipalTerm::empty(), pr_x), pr_x);
    CHECK(is_closed(g));
}

TEST_CASE("structural equality is canonical") {
    auto ab = PrincipalTerm::singleton("A").unite(PrincipalTerm::singleton("B"));
    auto ba = PrincipalTerm::singleton("B").unite(PrincipalTerm::singleton("A"));
    CHECK(equal(make_property("Pr", ab), make_property("Pr", ba)));

    CHECK_FALSE(equal(make_property("Smart", PrincipalTerm::singleton("Bob")),
                      make_property("Smart", PrincipalTerm::singleton("Alice"))));

    // true /\ Said(p, e)  ==  Said(p, e) /\ true
    auto said = make_said(PrincipalTerm::singleton("A"),
                          make_property("Pr", PrincipalTerm::singleton("B")));
    auto c1 = make_conjunction({make_true(), said});
    auto c2 = make_conjunction({said, make_true()});
    CHECK(equal(c1, c2));
    CHECK(c1->kind == CondKind::Said);  // True conjuncts are dropped
}

TEST_CASE("conjunction canonical form") {
    auto p = make_said(PrincipalTerm::singleton("A"),
                       make_property("Pr", PrincipalTerm::singleton("B")));
    auto q = make_said(PrincipalTerm::singleton("B"),
                       make_property("Pr", PrincipalTerm::singleton("A")));
    auto c = make_conjunction({p, make_conjunction({q, p})});
    REQUIRE(c->kind == CondKind::Conj);
    CHECK(c->conjuncts.size() == 2);  // flattened and deduplicated
    CHECK(make_conjunction({}) == make_true());
    CHECK(make_conjunction({p, p})->kind == CondKind::Said);
}

TEST_CASE("grant construction checks binders") {
    auto pr_x = make_property("Pr", PrincipalTerm::var("x"));
    // a variable not bound here may be bound by an enclosing grant
    CHECK_FALSE(is_closed(make_grant({}, nullptr, pr_x)));
    CHECK_THROWS_AS(make_grant({{"x", Sort::Principal}, {"y", Sort::Principal}}, nullptr, pr_x),
                    std::logic_error);  // unused binder
    CHECK_THROWS_AS(make_grant({{"x", Sort::Resource}}, nullptr, pr_x),
                    std::logic_error);  // sort mismatch
    auto g = make_grant_trimmed({{"x", Sort::Principal}, {"y", Sort::Principal}}, nullptr, pr_x);
    CHECK(g->binders.size() == 1);
    CHECK(is_closed(g));
}

TEST_CASE("substitution application") {
    // sigma = {x -> Bob}, Smart(x) -> Smart({Bob})
    Substitution s;
    s.bind({"x", Sort::Principal}, GroundValue::principal(PrincipalTerm::singleton("Bob")));
    auto smart_x = make_property("Smart", PrincipalTerm::var("x"));
    auto applied = xrml::apply(s, smart_x);
    CHECK(equal(applied, make_property("Smart", PrincipalTerm::singleton("Bob"))));

    // sigma = {x -> {Alice,Bob}}, Pr({x} u {Alice}) -> Pr({Alice, Bob})
    Substitution s2;
    s2.bind({"x", Sort::Principal},
            GroundValue::principal(PrincipalTerm::make({"Alice", "Bob"})));
    auto pr = make_property("Pr", PrincipalTerm::var("x").unite(PrincipalTerm::singleton("Alice")));
    CHECK(equal(xrml::apply(s2, pr), make_property("Pr", PrincipalTerm::make({"Alice", "Bob"}))));

    // identity
    Substitution empty;
    auto smart_bob = make_property("Smart", PrincipalTerm::singleton("Bob"));
    CHECK(equal(xrml::apply(empty, smart_bob), smart_bob));

    // uncovered free variable
    CHECK_THROWS_AS(xrml::apply(empty, smart_x), std::invalid_argument);
}

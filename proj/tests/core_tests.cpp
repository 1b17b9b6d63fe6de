#include <doctest.h>

#include <random>

#include "fabd/error.hpp"
#include "fabd/parser.hpp"
#include "testutil.hpp"

using namespace fabd;
using namespace fabd::test;

TEST_CASE("sailing file parses with first-occurrence variable order") {
    auto inst = sailing();
    REQUIRE(inst.base.vars.size() == 5);
    CHECK(inst.base.vars.name(0) == "w");
    CHECK(inst.base.vars.name(1) == "r");
    CHECK(inst.base.vars.name(2) == "c");
    CHECK(inst.base.vars.name(3) == "n");
    CHECK(inst.base.vars.name(4) == "s");
    CHECK(inst.base.hyps.size() == 4);
    CHECK(names(inst.base, inst.base.mans) == std::set<std::string>{"n"});
    CHECK(inst.base.kb.atoms().size() == 3);
}

TEST_CASE("hypotheses must be knowledge-base variables") {
    CHECK_THROWS_WITH_AS(parse_instance("hyp a\n"), doctest::Contains("SCOPE_ERROR"), Error);
    CHECK_THROWS_WITH_AS(parse_instance("clause a b\nman c\n"), doctest::Contains("SCOPE_ERROR"),
                         Error);
    // query must be a hypothesis
    CHECK_THROWS_AS(parse_instance("clause a b\nhyp a\nman b\nquery b\n"), Error);
}

TEST_CASE("declared table relations keep their tuples") {
    auto inst = load("one_in_three.abd");
    REQUIRE(inst.base.kb.atoms().size() == 1);
    const auto& rel = *inst.base.kb.atoms()[0].rel;
    CHECK(rel.kind() == RelKind::Table);
    CHECK(rel.tuples().size() == 3);
    CHECK(rel.name() == "OneInThree");
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_instance("clause a b\nbogus x\n");
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_instance("xor a b = 2\n"), Error);
    CHECK_THROWS_AS(parse_instance("rel R 2 : 010\n"), Error);
    CHECK_THROWS_AS(parse_instance("app R a b\n"), Error);
}

TEST_CASE("evaluate checks atom tuples") {
    auto inst = parse_instance("clause -w r\nhyp w\nman r\n");
    Assignment a = make_assignment(2);
    a[0] = 1; // w
    a[1] = 0; // r
    CHECK_FALSE(evaluate(inst.base.kb, a));
    a[1] = 1;
    CHECK(evaluate(inst.base.kb, a));

    auto s = sailing();
    Assignment ones = make_assignment(5);
    for (auto& v : ones) v = 1;
    CHECK(evaluate(s.base.kb, ones));

    auto oit = load("one_in_three.abd");
    Assignment t = make_assignment(3);
    t[0] = 0; t[1] = 1; t[2] = 0;
    CHECK(evaluate(oit.base.kb, t));
    t[2] = 1;
    CHECK_FALSE(evaluate(oit.base.kb, t));

    Assignment partial = make_assignment(5);
    CHECK_THROWS_AS(evaluate(s.base.kb, partial), Error);
}

TEST_CASE("restrict fixes a variable") {
    auto inst = parse_instance("clause -x y\nhyp x\nman y\n");
    Var x = var_of(inst.base, "x");
    Var y = var_of(inst.base, "y");

    Formula f0 = restrict(inst.base.kb, x, false);
    CHECK(f0.atoms().empty());

    Formula f1 = restrict(inst.base.kb, x, true);
    REQUIRE(f1.atoms().size() == 1);
    CHECK(f1.atoms()[0].rel->kind() == RelKind::Unit);
    CHECK(f1.atoms()[0].rel->rhs());
    CHECK(f1.atoms()[0].args == std::vector<Var>{y});

    auto xi = parse_instance("xor x y = 1\nhyp x\nman y\n");
    Formula fx = restrict(xi.base.kb, var_of(xi.base, "y"), true);
    REQUIRE(fx.atoms().size() == 1);
    CHECK(fx.atoms()[0].rel->kind() == RelKind::Unit);
    CHECK_FALSE(fx.atoms()[0].rel->rhs());
}

TEST_CASE("restrict preserves models") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 200; ++round) {
        auto frag = static_cast<GenFragment>(round % 7);
        auto inst = gen(frag, 4 + round % 3, 3 + round % 5, 1000 + round);
        const Formula& f = inst.base.kb;
        auto vars = f.vars();
        if (vars.empty()) continue;
        Var v = vars[rng() % vars.size()];
        bool b = (rng() & 1) != 0;
        Formula g = restrict(f, v, b);
        // all assignments over var(f) with v fixed to b
        std::vector<Var> rest;
        for (Var u : vars)
            if (u != v) rest.push_back(u);
        for (std::uint32_t mask = 0; mask < (1u << rest.size()); ++mask) {
            Assignment a = make_assignment(inst.base.vars.size());
            for (std::size_t i = 0; i < rest.size(); ++i)
                a[rest[i]] = static_cast<std::int8_t>((mask >> i) & 1);
            a[v] = b ? 1 : 0;
            CHECK(evaluate(g, a) == evaluate(f, a));
        }
    }
}

TEST_CASE("repeated atom arguments project onto distinct variables") {
    auto inst = parse_instance("clause a a\nclause b -b\nhyp a\nman b\n");
    REQUIRE(inst.base.kb.atoms().size() == 2);
    CHECK(inst.base.kb.atoms()[0].rel->kind() == RelKind::Unit);
    CHECK(inst.base.kb.atoms()[0].args.size() == 1);
    // tautologies stay as full relations so their variables remain scoped
    CHECK(inst.base.kb.atoms()[1].rel->always_true());

    // R(x, x, y) over a table behaves like its projection
    auto ri = parse_instance("rel R 3 : 110 001 111\napp R x x y\nhyp x\nman y\n");
    const auto& atom = ri.base.kb.atoms()[0];
    CHECK(atom.args.size() == 2);
    // tuples with first two coordinates equal: 001 -> (0,1), 111 -> (1,1)
    Assignment a = make_assignment(2);
    a[0] = 0; a[1] = 1;
    CHECK(evaluate(ri.base.kb, a));
    a[0] = 0; a[1] = 0;
    CHECK_FALSE(evaluate(ri.base.kb, a));
}

TEST_CASE("syntactic relation kinds match their truth tables") {
    auto check_clause = [](std::vector<bool> signs) {
        auto rel = Relation::clause(signs);
        const TupleMask total = TupleMask{1} << signs.size();
        for (TupleMask t = 0; t < total; ++t) {
            bool sat = false;
            for (std::size_t i = 0; i < signs.size(); ++i)
                if ((((t >> i) & 1) != 0) == signs[i]) sat = true;
            CHECK(rel->contains(t) == sat);
            CHECK(std::binary_search(rel->tuples().begin(), rel->tuples().end(), t) == sat);
        }
    };
    check_clause({true, true});
    check_clause({false, true, true});
    check_clause({false, false, false});

    auto xr = Relation::xor_eq(3, true);
    for (TupleMask t = 0; t < 8; ++t) {
        int ones = ((t >> 0) & 1) + ((t >> 1) & 1) + ((t >> 2) & 1);
        CHECK(xr->contains(t) == (ones % 2 == 1));
    }
    auto eq = Relation::equality();
    CHECK(eq->tuples() == std::vector<TupleMask>{0b00, 0b11});
    CHECK(Relation::unit(true)->tuples() == std::vector<TupleMask>{1});
    CHECK(Relation::unit(false)->tuples() == std::vector<TupleMask>{0});
}

TEST_CASE("tables matching syntactic forms are canonicalized") {
    // implication given as an explicit truth table
    auto rel = Relation::table("imp", 2, {0b00, 0b10, 0b11});
    CHECK(rel->kind() == RelKind::Clause);
    CHECK(rel->positive_count() == 1);
    // x2 is the implied variable: falsifier is x1=1, x2=0 i.e. mask 0b01
    CHECK_FALSE(rel->contains(0b01));

    CHECK(Relation::table("u", 1, {1})->kind() == RelKind::Unit);
    CHECK(Relation::table("e", 2, {0b00, 0b11})->kind() == RelKind::Equality);
    CHECK(Relation::table("x", 2, {0b01, 0b10})->kind() == RelKind::Xor);
    CHECK(Relation::table("t", 2, {0b01})->kind() == RelKind::Table);
}

TEST_CASE("rendered instances parse back structurally identical") {
    auto check_roundtrip = [](const ParsedInstance& inst) {
        auto again = parse_instance(render(inst));
        CHECK(again == inst);
    };
    check_roundtrip(sailing());
    check_roundtrip(load("one_in_three.abd"));
    for (int seed = 0; seed < 30; ++seed) {
        auto frag = static_cast<GenFragment>(seed % 7);
        check_roundtrip(gen(frag, 5 + seed % 4, 4 + seed % 6, 400 + seed));
    }
}

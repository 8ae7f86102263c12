#include <functional>

#include "doctest.h"
#include "fixtures.hpp"
#include "lh/print.hpp"
#include "lh/surface.hpp"
#include "lh/syntax.hpp"

using namespace lh;
using namespace lh::std_types;

namespace {

// Independent node counter: walks the variant directly rather than reading
// the cached TermInfo.
std::size_t count_nodes(const Term& e) {
    return std::visit(
        [](const auto& n) -> std::size_t {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Abs> || std::is_same_v<N, Fix>) return 1 + count_nodes(*n.body);
            else if constexpr (std::is_same_v<N, App>) return 1 + count_nodes(*n.fn) + count_nodes(*n.arg);
            else if constexpr (std::is_same_v<N, Op>) {
                std::size_t s = 1;
                for (const auto& a : n.args) s += count_nodes(*a);
                return s;
            } else if constexpr (std::is_same_v<N, Cast>) return 1 + count_nodes(*n.subject);
            else if constexpr (std::is_same_v<N, Check> || std::is_same_v<N, Stack>) return 1 + count_nodes(*n.current);
            else if constexpr (std::is_same_v<N, Cond>)
                return 1 + count_nodes(*n.guard) + count_nodes(*n.then_branch) + count_nodes(*n.else_branch);
            else return 1;
        },
        e.node);
}

TypePtr arrow(TypePtr a, TypePtr b) { return fun(std::move(a), std::move(b)); }

}  // namespace

TEST_CASE("subst replaces a variable") {
    auto r = subst(mk::var("x"), "x", mk::integer(5));
    CHECK(alpha_eq(r, mk::integer(5)));
}

TEST_CASE("subst avoids capture") {
    auto e = mk::abs("y", any(), mk::var("x"));
    auto r = subst(e, "x", mk::var("y"));
    auto* lam = r->as<Abs>();
    REQUIRE(lam);
    CHECK(lam->x != "y");
    CHECK(alpha_eq(lam->body, mk::var("y")));
    CHECK(r->info.free == std::vector<std::string>{"y"});
}

TEST_CASE("subst into a predicate") {
    auto pred = mk::op(">=", {mk::var("x"), mk::integer(0)});
    auto r = subst(pred, "x", mk::integer(-1));
    CHECK(print(r) == "-1 >= 0");
}

TEST_CASE("alpha equivalence") {
    auto y_nat = refine("y", BaseType::Int, mk::op(">=", {mk::var("y"), mk::integer(0)}));
    CHECK(alpha_eq(y_nat, nat()));
    CHECK(y_nat->id == nat()->id);
    CHECK_FALSE(alpha_eq(nat(), even()));
    CHECK(alpha_eq(mk::abs("x", any(), mk::var("x")), mk::abs("z", any(), mk::var("z"))));
    CHECK_FALSE(alpha_eq(mk::abs("x", any(), mk::var("x")), mk::abs("z", any(), mk::var("x"))));
}

TEST_CASE("types_of") {
    CHECK(types_of(*mk::blame(Label::named("l"))).empty());
    auto c = mk::cast(any(), nat(), Label::named("l1"), mk::integer(-1));
    CHECK(types_of(*c) == TypeSet{any(), nat()});
    auto lam = mk::abs("x", arrow(any(), nat()), mk::var("x"));
    CHECK(types_of(*lam) == TypeSet{arrow(any(), nat()), any(), nat()});
}

TEST_CASE("height") {
    CHECK(height(*nat()) == 1);
    CHECK(height(*arrow(any(), nat())) == 2);
    CHECK(height(*arrow(arrow(any(), nat()), any())) == 3);
}

TEST_CASE("term_size") {
    CHECK(term_size(*mk::integer(5)) == 1);
    CHECK(term_size(*mk::app(mk::abs("x", any(), mk::var("x")), mk::integer(5))) == 4);
    auto e3 = parse(kTripleText);
    CHECK(term_size(*e3) == count_nodes(*e3));
    CHECK(term_size(*e3) == 4);
}

TEST_CASE("canonical type keys") {
    CHECK(nat()->key == "{#0:Int|#0 >= 0}");
    CHECK(arrow(arrow(any(), nat()), any())->key == "({#0:Int|true} -> {#0:Int|#0 >= 0}) -> {#0:Int|true}");
}

TEST_CASE("type set ordering and membership") {
    TypeSet s{even(), nat(), nat()};
    CHECK(s.size() == 2);
    CHECK(s.front()->id == nat()->id);
    CHECK(s.contains(*refine("z", BaseType::Int, mk::op(">=", {mk::var("z"), mk::integer(0)}))));
    CHECK(s.without(*nat()) == TypeSet{even()});
}

TEST_CASE("parse and print") {
    CHECK(alpha_eq(parse("(-1)"), mk::integer(-1)));
    auto c = parse("<{x:Int|true} => {x:Int|x >= 0} @ l1> (-1)");
    auto* cast = c->as<Cast>();
    REQUIRE(cast);
    CHECK(cast->src->id == any()->id);
    CHECK(cast->tgt->id == nat()->id);
    CHECK(is_empty_ann(cast->ann));
    CHECK(cast->label == Label::named("l1"));
    CHECK(print(mk::boolean(true)) == "true");

    auto e3 = parse(kTripleText);
    CHECK(alpha_eq(parse(print(e3)), e3));
    CHECK(print(mk::blame(Label::named("l1"))) == "blame l1");
    CHECK_THROWS_AS(parse("blame l1"), ParseError);
}

TEST_CASE("parse declarations") {
    auto f = parse_file(
        "-- comment\n"
        "let inc : {x:Int|true} -> {x:Int|true} = \\x:{x:Int|true}. x + 1;\n"
        "let rec loop : {x:Int|true} -> {x:Int|true} = \\n:{x:Int|true}. if n = 0 then 0 else loop (n - 1);\n"
        "inc (loop 3)\n");
    REQUIRE(f.decls.size() == 2);
    CHECK(f.decls[1].recursive);
    CHECK(f.decls[1].body->is<Fix>());
    CHECK(f.main->closed());
    CHECK_THROWS_AS(parse_file("let a = 1; let a = 2; a"), ParseError);
    CHECK_THROWS_AS(parse_file("let rec a = 1; a"), ParseError);
}

TEST_CASE("parse errors carry positions") {
    try {
        parse("(1 +");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() >= 4);
    }
}

TEST_CASE("unary minus and negative literals") {
    CHECK(alpha_eq(parse("-1"), mk::integer(-1)));
    auto e = parse("\\x:{x:Int|true}. -x");
    CHECK(print(e) == "\\x:{x:Int|true}. 0 - x");
    CHECK(alpha_eq(parse("3 -1"), mk::op("-", {mk::integer(3), mk::integer(1)})));
}

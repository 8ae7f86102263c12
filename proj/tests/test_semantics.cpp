#include "doctest.h"
#include "fixtures.hpp"
#include "lh/ops.hpp"
#include "lh/print.hpp"
#include "lh/semantics.hpp"
#include "lh/surface.hpp"

using namespace lh;
using namespace lh::std_types;

namespace {

const Label l1 = Label::named("l1"), l2 = Label::named("l2"), l3 = Label::named("l3");

TypePtr gt0() { return refine("x", BaseType::Int, mk::op(">", {mk::var("x"), mk::integer(0)})); }

Outcome run(Mode m, const TermPtr& e, const EvalConfig& cfg = {}) { return eval(m, e, 10000, cfg); }

bool is_int(const Outcome& o, std::int64_t n) {
    if (o.kind != Outcome::Kind::Value) return false;
    auto* k = o.value->as<Const>();
    return k && k->value == Value{n};
}

bool blamed(const Outcome& o, const Label& l) { return o.kind == Outcome::Kind::Blamed && o.label == l; }

}  // namespace

TEST_CASE("running example in each mode") {
    auto e3 = parse(kTripleText);
    CHECK(blamed(run(Mode::Classic, e3), l1));
    CHECK(is_int(run(Mode::Forgetful, e3), -1));
    CHECK(blamed(run(Mode::Heedful, e3), l3));
    CHECK(blamed(run(Mode::Eidetic, e3), l1));
}

TEST_CASE("eidetic trace of the running example") {
    Trace tr;
    auto o = eval(Mode::Eidetic, parse(kTripleText), 10000, {}, &tr);
    CHECK(blamed(o, l1));
    REQUIRE(tr.steps.size() >= 6);
    CHECK(tr.steps[0].rule == "E-Coerce");
    CHECK(tr.steps[1].rule == "E-CastInnerE/E-Coerce");
    CHECK(tr.steps[2].rule == "E-CastMergeE");
    CHECK(tr.steps[3].rule == "E-CastInnerE/E-Coerce");
    CHECK(tr.steps[4].rule == "E-CastMergeE");
    CHECK(tr.steps[5].rule == "E-CoerceStack");
    auto* c = tr.steps[4].term->as<Cast>();
    REQUIRE(c);
    auto& r = std::get<CoercionPtr>(c->ann)->refs();
    REQUIRE(r.size() == 3);
    CHECK(r[0].ref->id == nat()->id);
    CHECK(r[0].label == l1);
    CHECK(r[1].ref->id == even()->id);
    CHECK(r[1].label == l2);
    CHECK(r[2].ref->id == nz()->id);
    CHECK(r[2].label == l3);
    CHECK(c->src->id == any()->id);
    CHECK(c->tgt->id == nz()->id);
    CHECK(c->label.empty());
}

TEST_CASE("forgetful trace drops the intermediate type") {
    auto e = mk::cast(even(), nz(), l3, mk::cast(nat(), even(), l2, mk::var("e")));
    auto s = step(Mode::Forgetful, e);
    REQUIRE(s.kind == StepOutcome::Kind::Stepped);
    CHECK(s.rule == "E-CastMergeE");
    CHECK(alpha_eq(s.term, mk::cast(nat(), nz(), l3, mk::var("e"))));
}

TEST_CASE("heedful merges accumulate intermediate types") {
    Trace tr;
    auto o = eval(Mode::Heedful, parse(kTripleText), 10000, {}, &tr);
    CHECK(blamed(o, l3));
    bool saw_pair = false;
    for (const auto& st : tr.steps) {
        if (auto* c = st.term->as<Cast>()) {
            if (auto* s = std::get_if<TypeSet>(&c->ann); s && *s == TypeSet{nat(), even()}) saw_pair = true;
        }
    }
    CHECK(saw_pair);
}

TEST_CASE("basic reductions") {
    auto id5 = mk::app(mk::abs("x", any(), mk::var("x")), mk::integer(5));
    auto s = step(Mode::Classic, id5);
    CHECK(s.rule == "E-Beta");
    CHECK(alpha_eq(s.term, mk::integer(5)));
    CHECK(step(Mode::Classic, mk::integer(1)).kind == StepOutcome::Kind::IsValue);
    CHECK(step(Mode::Classic, mk::blame(l1)).kind == StepOutcome::Kind::IsBlame);
    auto e = step(Mode::Eidetic, mk::cast(even(), nz(), l3, mk::var("e")));
    CHECK(e.rule == "E-Coerce");
    CHECK(alpha_eq(e.term, mk::cast(even(), coercion_refs({{nz(), l3}}), nz(), Label::none(), mk::var("e"))));
}

TEST_CASE("passing cast yields the constant in every mode") {
    auto e = mk::cast(any(), nat(), l1, mk::integer(5));
    for (Mode m : kAllModes) CHECK(is_int(run(m, e), 5));
}

TEST_CASE("function proxies") {
    // <ANY->ANY => NAT->NAT @ l> (\x:ANY. x - 3) applied to 2 blames l on the codomain
    auto f = mk::abs("x", any(), mk::op("-", {mk::var("x"), mk::integer(3)}));
    auto prox = mk::cast(fun(any(), any()), fun(nat(), nat()), l1, f);
    for (Mode m : kAllModes) {
        CHECK(blamed(run(m, mk::app(prox, mk::integer(2))), l1));
        CHECK(is_int(run(m, mk::app(prox, mk::integer(5))), 2));
    }
    // classic admits proxies over proxies; forgetful merges them
    auto twice = mk::cast(fun(nat(), nat()), fun(any(), any()), l2, prox);
    CHECK(step(Mode::Classic, twice).kind == StepOutcome::Kind::IsValue);
    CHECK(step(Mode::Forgetful, twice).rule == "E-CastMergeE");
    // the outer domain check fails first; forgetful has dropped it
    auto neg = mk::app(twice, mk::integer(-1));
    CHECK(blamed(run(Mode::Classic, neg), l2));
    CHECK(is_int(run(Mode::Forgetful, neg), -4));
    CHECK(blamed(run(Mode::Heedful, neg), l2));
    CHECK(blamed(run(Mode::Eidetic, neg), l2));
}

TEST_CASE("choose") {
    CHECK(choose(TypeSet{nat()})->id == nat()->id);
    CHECK(choose(TypeSet{even(), nat()})->key == std::min(even()->key, nat()->key));
    CHECK_THROWS_AS(choose(TypeSet{}), std::invalid_argument);
}

TEST_CASE("implication oracles") {
    auto y_nat = refine("y", BaseType::Int, mk::op(">=", {mk::var("y"), mk::integer(0)}));
    auto def = alpha_oracle();
    CHECK(implies(def, *nat(), *nat()));
    CHECK(implies(def, *y_nat, *nat()));
    CHECK_FALSE(implies(def, *nat(), *any()));
    auto ax = axiom_oracle({{even(), nat()}, {nat(), any()}});
    CHECK(implies(ax, *even(), *any()));
    CHECK_FALSE(implies(ax, *any(), *even()));
}

TEST_CASE("split_annotation") {
    auto [d0, c0] = split_annotation(EmptyAnn{});
    CHECK(is_empty_ann(d0));
    CHECK(is_empty_ann(c0));
    auto c1 = coercion_refs({{nat(), l1}});
    auto c2 = coercion_refs({{nz(), l2}});
    auto [d1, cd1] = split_annotation(coercion_fun(c1, c2));
    CHECK(std::get<CoercionPtr>(d1) == c1);
    CHECK(std::get<CoercionPtr>(cd1) == c2);
    auto [ds, cs] = split_annotation(TypeSet{fun(any(), nat()), fun(any(), nz())});
    CHECK(std::get<TypeSet>(ds) == TypeSet{any()});
    CHECK(std::get<TypeSet>(cs) == TypeSet{nat(), nz()});
}

TEST_CASE("coerce") {
    CHECK(coercion_eq(*coerce(even(), nz(), l3), *coercion_refs({{nz(), l3}})));
    auto c = coerce(fun(nat(), nat()), fun(any(), gt0()), l1);
    CHECK(coercion_eq(*c, *coercion_fun(coercion_refs({{nat(), l1}}), coercion_refs({{gt0(), l1}}))));
    CHECK(coercion_eq(*coerce(any(), any(), l1), *coercion_refs({{any(), l1}})));
    CHECK_THROWS_AS(coerce(nat(), fun(nat(), nat()), l1), std::invalid_argument);
}

TEST_CASE("ref_drop") {
    CHECK(ref_drop({}, *nat()).empty());
    CHECK(ref_drop({{nat(), l1}}, *nat()).empty());
    auto r = ref_drop({{even(), l1}, {nat(), l2}}, *nat());
    REQUIRE(r.size() == 1);
    CHECK(r[0].ref->id == even()->id);
}

TEST_CASE("coercion_merge") {
    RefList r{{nat(), l2}, {nz(), l3}};
    CHECK(coercion_eq(*coercion_merge(coercion_refs({}), coercion_refs(r)), *coercion_refs(r)));
    auto m = coercion_merge(coercion_refs({{nat(), l1}}), coercion_refs({{nat(), l2}}));
    REQUIRE(m->refs().size() == 1);
    CHECK(m->refs()[0].label == l1);

    // Two proxies with the same codomain check: the inner (l1) label survives.
    auto inner = coercion_fun(coercion_refs({{nat(), l1}}), coercion_refs({{gt0(), l1}}));
    auto outer = coercion_fun(coercion_refs({{even(), l2}}), coercion_refs({{gt0(), l2}}));
    auto merged = coercion_merge(inner, outer);
    REQUIRE(!merged->is_refs());
    auto& dom = merged->fn().dom->refs();
    REQUIRE(dom.size() == 2);
    CHECK(dom[0].ref->id == even()->id);
    CHECK(dom[0].label == l2);
    CHECK(dom[1].ref->id == nat()->id);
    CHECK(dom[1].label == l1);
    auto& cod = merged->fn().cod->refs();
    REQUIRE(cod.size() == 1);
    CHECK(cod[0].label == l1);
    CHECK_THROWS_AS(coercion_merge(inner, coercion_refs({})), std::invalid_argument);
}

TEST_CASE("merge by mode") {
    CHECK_FALSE(merge(Mode::Classic, any(), EmptyAnn{}, nat(), EmptyAnn{}, nz()).has_value());
    auto f = merge(Mode::Forgetful, any(), EmptyAnn{}, nat(), EmptyAnn{}, nz());
    REQUIRE(f.has_value());
    CHECK(is_empty_ann(*f));
    auto h = merge(Mode::Heedful, any(), TypeSet{}, nat(), TypeSet{}, nz());
    REQUIRE(h.has_value());
    CHECK(std::get<TypeSet>(*h) == TypeSet{nat()});
    CHECK_FALSE(merge(Mode::Heedful, any(), TypeSet{}, nat(), EmptyAnn{}, nz()).has_value());
    auto c = coercion_refs({{nat(), l1}});
    CHECK_FALSE(merge(Mode::Eidetic, any(), c, nat(), EmptyAnn{}, nz()).has_value());
    auto e = merge(Mode::Eidetic, any(), c, nat(), coercion_refs({{nz(), l3}}), nz());
    REQUIRE(e.has_value());
    CHECK(std::get<CoercionPtr>(*e)->refs().size() == 2);
}

TEST_CASE("status_join") {
    CHECK(status_join(Status::Checked, *nz(), *nat()) == Status::Checked);
    CHECK(status_join(Status::Unchecked, *nz(), *nz()) == Status::Checked);
    CHECK(status_join(Status::Unchecked, *nz(), *nat()) == Status::Unchecked);
}

TEST_CASE("operations") {
    auto r = apply_op("mod", {Value{std::int64_t{-1}}, Value{std::int64_t{2}}});
    CHECK(r.status == ApplyStatus::Ok);
    CHECK(r.value == Value{std::int64_t{1}});
    CHECK(apply_op("=", {Value{std::int64_t{0}}, Value{std::int64_t{0}}}).value == Value{true});
    CHECK(apply_op("div", {Value{std::int64_t{4}}, Value{std::int64_t{0}}}).status == ApplyStatus::Undefined);
    CHECK(apply_op("div", {Value{std::int64_t{-7}}, Value{std::int64_t{2}}}).value == Value{std::int64_t{-4}});
    CHECK(apply_op("+", {Value{INT64_MAX}, Value{std::int64_t{1}}}).status == ApplyStatus::Overflow);
    CHECK(print(signature("div")) == "{x:Int|true} -> {y:Int|y <> 0} -> {x:Int|true}");
    CHECK(signature(Value{true}) == BaseType::Bool);
    auto stuck = run(Mode::Classic, mk::op("div", {mk::integer(4), mk::integer(0)}));
    CHECK(stuck.kind == Outcome::Kind::Stuck);
    auto fault = run(Mode::Classic, mk::op("*", {mk::integer(INT64_MAX), mk::integer(2)}));
    CHECK(fault.kind == Outcome::Kind::Fault);
}

TEST_CASE("conditionals and fixpoints") {
    auto e = parse(
        "let rec sum : {x:Int|true} -> {x:Int|true} = \\n:{x:Int|true}. if n = 0 then 0 else n + sum (n - 1);\n"
        "sum 10");
    for (Mode m : kAllModes) CHECK(is_int(run(m, e), 55));
    auto blame_guard = mk::cond(mk::blame(l2), mk::integer(1), mk::integer(2));
    auto s = step(Mode::Classic, blame_guard);
    CHECK(s.rule == "E-IfRaise");
}

TEST_CASE("budget") {
    auto loop = parse("let rec f : {x:Int|true} -> {x:Int|true} = \\n:{x:Int|true}. f n; f 0");
    auto o = eval(Mode::Eidetic, loop, 50);
    CHECK(o.kind == Outcome::Kind::BudgetExceeded);
    CHECK(o.steps == 50);
}

TEST_CASE("determinism of traces") {
    for (Mode m : kAllModes) {
        Trace a, b;
        eval(m, parse(kTripleText), 10000, {}, &a);
        eval(m, parse(kTripleText), 10000, {}, &b);
        REQUIRE(a.steps.size() == b.steps.size());
        for (std::size_t i = 0; i < a.steps.size(); ++i) {
            CHECK(a.steps[i].rule == b.steps[i].rule);
            CHECK(alpha_eq(a.steps[i].term, b.steps[i].term));
        }
    }
}

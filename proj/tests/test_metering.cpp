#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "lh/metering.hpp"
#include "lh/surface.hpp"
#include "lh/typecheck.hpp"

using namespace lh;
using namespace lh::std_types;

namespace {

// Direct recount of the five counters by walking the tree, independent of
// the cached summaries.
struct Naive {
    SpaceStats s;
    TypeSet types;

    std::size_t walk(const Term& e) {  // returns casts stacked at e
        std::size_t here = 0;
        std::visit(
            [&](const auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Abs> || std::is_same_v<N, Fix>) {
                    types = types.unite(types_of(*n.ty));
                    walk(*n.body);
                } else if constexpr (std::is_same_v<N, App>) {
                    walk(*n.fn);
                    walk(*n.arg);
                } else if constexpr (std::is_same_v<N, Op>) {
                    for (const auto& a : n.args) walk(*a);
                } else if constexpr (std::is_same_v<N, Cond>) {
                    walk(*n.guard);
                    walk(*n.then_branch);
                    walk(*n.else_branch);
                } else if constexpr (std::is_same_v<N, Cast>) {
                    ++s.pending;
                    types = types.unite(types_of(*n.src)).unite(types_of(*n.tgt)).unite(types_of(n.ann));
                    if (auto* c = std::get_if<CoercionPtr>(&n.ann)) reflists(**c);
                    here = 1 + walk(*n.subject) * (n.subject->template is<Cast>() ? 1 : 0);
                    s.chain = std::max(s.chain, here);
                    std::size_t wrap = 0;
                    const Term* t = &e;
                    while (auto* c = t->as<Cast>()) {
                        ++wrap;
                        t = c->subject.get();
                    }
                    if (t->is<Abs>()) s.proxy_wrap = std::max(s.proxy_wrap, wrap);
                } else if constexpr (std::is_same_v<N, Check>) {
                    ++s.pending;
                    types = types.unite(types_of(*n.tgt));
                    walk(*n.current);
                } else if constexpr (std::is_same_v<N, Stack>) {
                    ++s.pending;
                    types = types.unite(types_of(*n.tgt));
                    for (const auto& r : n.pending) types = types.unite(types_of(*r.ref));
                    s.max_reflist = std::max(s.max_reflist, n.pending.size());
                    walk(*n.current);
                }
            },
            e.node);
        return here;
    }
    void reflists(const Coercion& c) {
        if (c.is_refs()) {
            s.max_reflist = std::max(s.max_reflist, c.refs().size());
        } else {
            reflists(*c.fn().dom);
            reflists(*c.fn().cod);
        }
    }
    SpaceStats run(const Term& e) {
        walk(e);
        s.live_types = types.size();
        return s;
    }
};

TermPtr fact_program(std::int64_t n) {
    auto f = load_file(LH_EXAMPLES_DIR "/fact.lh");
    const TermPtr& fix = f.decls.back().body;
    auto nat_arg = [](std::int64_t k, const char* l) { return mk::cast(any(), nat(), Label::named(l), mk::integer(k)); };
    return mk::app(mk::app(fix, nat_arg(n, "ln")), nat_arg(1, "lone"));
}

bool is_int(const Outcome& o, std::int64_t n) {
    auto* k = o.kind == Outcome::Kind::Value ? o.value->as<Const>() : nullptr;
    return k && k->value == Value{n};
}

}  // namespace

TEST_CASE("space_stats basics") {
    CHECK(space_stats(*mk::integer(5)) == SpaceStats{});
    auto e3 = parse(kTripleText);
    auto s = space_stats(*e3);
    CHECK(s.pending == 3);
    CHECK(s.chain == 3);
    CHECK(s.live_types == 4);
}

TEST_CASE("space_stats agrees with a direct recount") {
    for (const char* file : {"/triple.lh", "/fact.lh", "/evenodd.lh"}) {
        auto e = load_file(std::string(LH_EXAMPLES_DIR) + file).main;
        for (Mode m : kAllModes) {
            Trace tr;
            eval(m, e, 5000, {}, &tr);
            for (const auto& t : tr.terms()) {
                INFO(file, " ", mode_name(m));
                CHECK(space_stats(*t) == Naive{}.run(*t));
            }
        }
    }
}

TEST_CASE("metered run of the running example") {
    auto e3 = parse(kTripleText);
    auto e = eval_metered(Mode::Eidetic, e3, 10000);
    CHECK(e.max.chain == 3);
    CHECK(e.outcome == eval(Mode::Eidetic, e3, 10000));
    CHECK(e.series.size() == e.outcome.steps);
    // after both merges a single cast remains
    REQUIRE(e.series.size() >= 5);
    CHECK(e.series[4].stats.pending == 1);
    CHECK(e.series[4].stats.chain == 1);
    CHECK(e.series[4].stats.max_reflist == 3);
    auto f = eval_metered(Mode::Forgetful, e3, 10000);
    CHECK(is_int(f.outcome, -1));
}

TEST_CASE("metering is observation-only") {
    for (const char* file : {"/triple.lh", "/fact.lh", "/evenodd.lh"}) {
        auto e = load_file(std::string(LH_EXAMPLES_DIR) + file).main;
        for (Mode m : kAllModes) {
            auto a = eval(m, e, 100000);
            auto b = eval_metered(m, e, 100000);
            CHECK(a == b.outcome);
            CHECK(a.steps == b.series.size());
        }
    }
}

TEST_CASE("live types never increase") {
    for (const char* file : {"/triple.lh", "/fact.lh", "/evenodd.lh"}) {
        auto e = load_file(std::string(LH_EXAMPLES_DIR) + file).main;
        for (Mode m : kAllModes) {
            auto r = eval_metered(m, e, 100000);
            std::size_t prev = r.initial.live_types;
            for (const auto& s : r.series) {
                CHECK(s.stats.live_types <= prev);
                prev = s.stats.live_types;
            }
        }
    }
}

TEST_CASE("proxy bound after annotation") {
    auto e = load_file(LH_EXAMPLES_DIR "/evenodd.lh").main;
    for (Mode m : {Mode::Forgetful, Mode::Heedful, Mode::Eidetic}) {
        auto r = eval_metered(m, e, 100000);
        for (const auto& s : r.series) CHECK(s.stats.proxy_wrap <= 1);
    }
}

TEST_CASE("corpus programs") {
    auto triple = load_file(LH_EXAMPLES_DIR "/triple.lh");
    auto fact = load_file(LH_EXAMPLES_DIR "/fact.lh");
    auto evenodd = load_file(LH_EXAMPLES_DIR "/evenodd.lh");
    for (const auto* f : {&triple, &fact, &evenodd}) {
        auto r = check_file(*f);
        CHECK_MESSAGE(r.ok(), (r.ok() ? std::string() : r.error->message()));
    }
    for (Mode m : kAllModes) {
        CHECK(is_int(eval(m, fact.main, 100000), 3628800));
        auto o = eval(m, evenodd.main, 100000);
        REQUIRE(o.kind == Outcome::Kind::Value);
        CHECK(o.value->as<Const>()->value == Value{true});
    }
}

TEST_CASE("factorial base case") {
    auto r = eval_metered(Mode::Classic, fact_program(0), 10000);
    CHECK(is_int(r.outcome, 1));
    // Five casts in the declaration, doubled by the first unfolding, plus the
    // two argument casts.
    CHECK(r.max.pending == 12);
}

TEST_CASE("tail calls in constant space") {
    std::vector<std::size_t> classic, eidetic;
    for (std::int64_t n : {10, 100}) {
        classic.push_back(eval_metered(Mode::Classic, fact_program(n), 1000000, {}, false).max.pending);
        eidetic.push_back(eval_metered(Mode::Eidetic, fact_program(n), 1000000, {}, false).max.pending);
    }
    CHECK(eidetic[0] == eidetic[1]);
    CHECK(classic[1] >= 5 * classic[0]);
}

TEST_CASE("CSV and JSON series") {
    auto r = eval_metered(Mode::Eidetic, parse(kTripleText), 10000);
    std::ostringstream out;
    write_series_csv(out, r);
    std::string csv = out.str();
    CHECK(csv.rfind("step,rule,pending,chain,max_reflist,proxy_wrap,live_types\n", 0) == 0);
    CHECK(csv.find("1,E-Coerce,3,3,") != std::string::npos);
    auto j = series_json(r);
    REQUIRE(j.size() == r.series.size());
    CHECK(j[0]["rule"] == "E-Coerce");
    CHECK(j[0]["space"]["pending"] == 3);
}

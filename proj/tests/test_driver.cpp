#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "lh/driver.hpp"
#include "lh/harness.hpp"

using namespace lh;

namespace {

const std::string kExamples = LH_EXAMPLES_DIR;

}  // namespace

TEST_CASE("run_file agrees with eval") {
    for (const char* name : {"triple.lh", "fact.lh", "evenodd.lh"}) {
        SourceFile f = load_file(kExamples + "/" + name);
        for (Mode m : kAllModes) {
            RunConfig cfg;
            cfg.mode = m;
            RunReport r = run_file(kExamples + "/" + name, cfg);
            REQUIRE(r.outcome);
            Outcome direct = eval(m, f.main, cfg.budget);
            CHECK(*r.outcome == direct);
            CHECK(r.outcome->steps == direct.steps);
            CHECK(r.exit == exit_code(direct));
        }
    }
}

TEST_CASE("run_file report") {
    RunConfig cfg;
    cfg.mode = Mode::Heedful;
    cfg.trace = true;
    cfg.space = true;
    RunReport r = run_file(kExamples + "/triple.lh", cfg);
    CHECK(r.exit == kExitBlame);
    CHECK(r.json["outcome"]["label"] == "l3");
    CHECK(r.json["trace"].size() == r.outcome->steps);
    CHECK(r.json["trace"][0]["rule"] == "E-TypeSet");
    CHECK(r.text.find("blame l3\n") != std::string::npos);
    CHECK(r.text.find("step,rule,pending") != std::string::npos);
}

TEST_CASE("rejected inputs") {
    RunReport missing = run_file(kExamples + "/no-such-file.lh", {});
    CHECK(missing.exit == kExitTypeError);
    CHECK_FALSE(missing.outcome);
    CHECK(missing.json["error"]["kind"] == "io");

    RunConfig cfg;
    RunReport bad = run_source(parse_file("(\\x:{x:Int|x >= 0}. x) 5"), cfg);
    CHECK(bad.exit == kExitTypeError);
    CHECK(bad.json["error"]["kind"] == "type");

    cfg.runtime_forms = true;
    RunReport forced = run_source(parse_file("(\\x:{x:Int|x >= 0}. x) 5"), cfg);
    CHECK(forced.exit == kExitValue);
}

TEST_CASE("exit codes") {
    CHECK(exit_code(eval(Mode::Classic, parse("1 div 0"), 10)) == kExitStuck);
    CHECK(exit_code(eval(Mode::Classic, parse("4611686018427387904 * 4"), 10)) == kExitFault);
    CHECK(exit_code(eval(Mode::Classic, parse("1 + 1"), 0)) == kExitBudget);
}

TEST_CASE("configuration") {
    RunConfig cfg;
    CHECK(make_eval_config(cfg).choose.name == "lex-min");
    cfg.choose = "lex-max";
    TypeSet s{std_types::nat(), std_types::even()};
    CHECK(make_eval_config(cfg).choose.pick(s)->id == s.items().back()->id);
    cfg.choose = "random";
    CHECK_THROWS_AS(make_eval_config(cfg), std::invalid_argument);

    std::string path = "axioms_test.json";
    {
        std::ofstream out(path);
        out << R"([["{x:Int|x >= 0}", "{x:Int|true}"]])";
    }
    RunConfig ax;
    ax.oracle = "axioms";
    ax.axiom_file = path;
    EvalConfig ec = make_eval_config(ax);
    CHECK(implies(ec.oracle, *std_types::nat(), *std_types::any()));
    CHECK_FALSE(implies(ec.oracle, *std_types::any(), *std_types::nat()));
    {
        std::ofstream out(path);
        out << R"({"not": "a list"})";
    }
    CHECK_THROWS_AS(make_eval_config(ax), std::runtime_error);
    std::remove(path.c_str());

    setenv("LH_BUDGET", "77", 1);
    CHECK(default_budget() == 77);
    setenv("LH_BUDGET", "zero", 1);
    CHECK(default_budget() == kDefaultBudget);
    unsetenv("LH_BUDGET");
    CHECK(default_budget() == kDefaultBudget);
}

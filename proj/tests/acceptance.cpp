// Acceptance run: one PASS/FAIL line per criterion; exits non-zero if any fail.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lh/harness.hpp"
#include "lh/metering.hpp"
#include "lh/print.hpp"
#include "lh/surface.hpp"
#include "lh/typecheck.hpp"

using namespace lh;
using namespace lh::std_types;

namespace {

struct Result {
    bool ok;
    std::string detail;
};

const std::string kExamples = LH_EXAMPLES_DIR;

TermPtr triple() { return load_file(kExamples + "/triple.lh").main; }

bool blamed(const Outcome& o, const char* l) {
    return o.kind == Outcome::Kind::Blamed && o.label == Label::named(l);
}

Result running_example() {
    TermPtr e = triple();
    Outcome c = eval(Mode::Classic, e, kDefaultBudget);
    Outcome f = eval(Mode::Forgetful, e, kDefaultBudget);
    Outcome h = eval(Mode::Heedful, e, kDefaultBudget);
    Outcome ei = eval(Mode::Eidetic, e, kDefaultBudget);
    bool ok = blamed(c, "l1") && describe(f) == "-1" && blamed(h, "l3") && blamed(ei, "l1");
    return {ok, "C " + describe(c) + ", F " + describe(f) + ", H " + describe(h) + ", E " + describe(ei)};
}

Result eidetic_trace() {
    Trace tr;
    eval(Mode::Eidetic, triple(), kDefaultBudget, {}, &tr);
    std::vector<std::string> want{"E-Coerce", "E-CastInnerE/E-Coerce", "E-CastMergeE", "E-CastInnerE/E-Coerce",
                                  "E-CastMergeE"};
    std::string rules;
    bool ok = tr.steps.size() >= want.size();
    for (std::size_t i = 0; i < want.size() && i < tr.steps.size(); ++i) {
        ok = ok && tr.steps[i].rule == want[i];
        rules += (i ? ", " : "") + tr.steps[i].rule;
    }
    if (!ok) return {false, rules};
    auto* cast = tr.steps[4].term->as<Cast>();
    auto* c = cast ? std::get_if<CoercionPtr>(&cast->ann) : nullptr;
    if (!c || !(*c)->is_refs()) return {false, "no merged coercion after step 5"};
    RefList want_list{{nat(), Label::named("l1")}, {even(), Label::named("l2")}, {nz(), Label::named("l3")}};
    const RefList& got = (*c)->refs();
    ok = got.size() == want_list.size();
    for (std::size_t i = 0; ok && i < got.size(); ++i)
        ok = alpha_eq(got[i].ref, want_list[i].ref) && got[i].label == want_list[i].label;
    return {ok, rules + "; merged " + print(got)};
}

TermPtr fact_program(std::int64_t n) {
    static const TermPtr fix = load_file(kExamples + "/fact.lh").decls.back().body;
    auto nat_arg = [](std::int64_t k, const char* l) {
        return mk::cast(any(), nat(), Label::named(l), mk::integer(k));
    };
    return mk::app(mk::app(fix, nat_arg(n, "ln")), nat_arg(1, "lone"));
}

Result space_bound() {
    std::vector<std::size_t> classic, eidetic;
    std::string detail;
    bool ok = true;
    for (std::int64_t n : {10, 100, 1000}) {
        MeteredRun c = eval_metered(Mode::Classic, fact_program(n), 1000000, {}, false);
        MeteredRun e = eval_metered(Mode::Eidetic, fact_program(n), 1000000, {}, false);
        ok = ok && c.outcome.kind == Outcome::Kind::Value && c.outcome == e.outcome;
        classic.push_back(c.max.pending);
        eidetic.push_back(e.max.pending);
        detail += "n=" + std::to_string(n) + ": C " + std::to_string(c.max.pending) + ", E " +
                  std::to_string(e.max.pending) + "; ";
    }
    ok = ok && eidetic[0] == eidetic[1] && eidetic[1] == eidetic[2];
    ok = ok && classic[1] >= 5 * classic[0] && classic[2] >= 5 * classic[1];
    return {ok, detail};
}

FuzzSummary& corpus_run() {
    static FuzzSummary s = [] {
        FuzzOptions o;
        o.count = 1000;
        o.min_size = 5;
        o.max_size = 30;
        o.seed = 1;
        o.diff.budget = kCheckerBudget;
        o.diff.check_traces = true;
        return run_fuzz(o);
    }();
    return s;
}

Result differential() {
    const FuzzSummary& s = corpus_run();
    bool ok = s.items == 1000 && s.failures == 0 && s.stuck == 0 && s.budget_exceeded * 100 < s.items;
    return {ok, std::to_string(s.items) + " programs, " + std::to_string(s.failures) + " verdict failures, " +
                    std::to_string(s.stuck) + " stuck, " + std::to_string(s.budget_exceeded) + " over budget, " +
                    std::to_string(s.chained) + " with chained casts"};
}

Result trace_invariants() {
    const FuzzSummary& s = corpus_run();
    std::size_t preservation = 0, monotone = 0, other = 0;
    for (const auto& item : s.failing)
        for (const auto& f : item.report.findings) {
            if (f.kind == "preservation")
                ++preservation;
            else if (f.kind == "monotonicity")
                ++monotone;
            else
                ++other;
        }
    return {s.trace_findings == 0, std::to_string(preservation) + " preservation, " + std::to_string(monotone) +
                                       " monotonicity, " + std::to_string(other) + " other findings"};
}

Result algebra() {
    AlgebraReport props = check_merge_properties(1, 10000);
    AlgebraReport heed = check_heedful_idempotence(1, 1000);
    AlgebraReport eid = check_eidetic_idempotence(1, 1000);
    bool ok = props.cases == 10000 && heed.cases == 1000 && eid.cases == 1000 && props.violations.empty() &&
              heed.violations.empty() && eid.violations.empty();
    std::string detail = std::to_string(props.violations.size()) + "/" + std::to_string(props.cases) + " merge, " +
                         std::to_string(heed.violations.size()) + "/" + std::to_string(heed.cases) + " heedful, " +
                         std::to_string(eid.violations.size()) + "/" + std::to_string(eid.cases) + " eidetic";
    for (const auto* r : {&props, &heed, &eid})
        if (!r->violations.empty()) detail += "; first: " + r->violations.front();
    return {ok, detail};
}

Result source_typing() {
    std::vector<std::pair<std::string, TermPtr>> corpus;
    for (const auto& entry : std::filesystem::directory_iterator(kExamples))
        if (entry.path().extension() == ".lh")
            corpus.emplace_back(entry.path().filename().string(), load_file(entry.path().string()).main);
    for (const auto& item : corpus_run().failing) corpus.emplace_back("seed " + std::to_string(item.seed), item.program);
    for (std::uint64_t seed = 1; seed <= 1000; ++seed)
        corpus.emplace_back("seed " + std::to_string(seed), gen_source(seed, 5 + static_cast<int>((seed - 1) % 26)));

    std::size_t violations = 0;
    std::string first;
    for (const auto& [name, e] : corpus) {
        TypePtr ref;
        for (Mode m : kAllModes) {
            TypeResult r = Checker(m, {}, true).type_of(Context{}, e);
            bool bad = !r || !r.type || (ref && !alpha_eq(ref, r.type));
            if (bad) {
                ++violations;
                if (first.empty())
                    first = name + " in " + std::string(mode_name(m)) + ": " +
                            (r ? (r.type ? print(r.type) : "no type") : r.error->message());
                break;
            }
            if (!ref) ref = r.type;
        }
    }
    std::string detail = std::to_string(corpus.size()) + " programs, " + std::to_string(violations) + " violations";
    if (!first.empty()) detail += "; first: " + first;
    return {violations == 0, detail};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;  // 0: untimed
        std::function<Result()> run;
    };
    const std::vector<Criterion> criteria{
        {"1 running example in four modes", 1, running_example},
        {"2 eidetic trace shape and merged list", 0, eidetic_trace},
        {"3 tail-recursive space bound", 10, space_bound},
        {"4 differential suite", 120, differential},
        {"5 trace invariants", 0, trace_invariants},
        {"6 merge algebra and idempotence", 30, algebra},
        {"7 source typing agreement", 0, source_typing},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = c.limit_s == 0 || secs < c.limit_s;
        bool ok = r.ok && in_time;
        failed += !ok;
        std::printf("%s  %s  (%.2fs%s)  %s\n", ok ? "PASS" : "FAIL", c.name, secs,
                    in_time ? "" : ", over time limit", r.detail.c_str());
    }
    return failed == 0 ? 0 : 1;
}

#include "lh/harness.hpp"

#include <algorithm>

#include "lh/print.hpp"

namespace lh {

namespace {

using namespace std_types;

TypePtr pos() {
    static const TypePtr t = refine("x", BaseType::Int, mk::op(">", {mk::var("x"), mk::integer(0)}));
    return t;
}
TypePtr small() {
    static const TypePtr t = refine("x", BaseType::Int, mk::op("<", {mk::var("x"), mk::integer(10)}));
    return t;
}
TypePtr triple() {
    static const TypePtr t = refine(
        "x", BaseType::Int,
        mk::op("=", {mk::op("mod", {mk::var("x"), mk::integer(3)}), mk::integer(0)}));
    return t;
}

const std::vector<TypePtr>& int_pool() {
    static const std::vector<TypePtr> pool{any(), nat(), even(), nz()};
    return pool;
}

// Wider pool for the algebra checks.
const std::vector<TypePtr>& refinement_pool() {
    static const std::vector<TypePtr> pool{any(), nat(), even(), nz(), pos(), small(), triple()};
    return pool;
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Type-directed generator of source programs.
class Gen {
public:
    explicit Gen(std::mt19937_64& rng) : rng_(rng) {}

    TermPtr program(int size) {
        TypePtr t = chance(rng_, 0.8) ? pick(rng_, int_pool()) : boolean();
        return gen(t, size);
    }

private:
    TypePtr base_type() { return chance(rng_, 0.85) ? pick(rng_, int_pool()) : boolean(); }

    TypePtr any_type(int depth) {
        if (depth <= 0 || chance(rng_, 0.7)) return base_type();
        return fun(any_type(depth - 1), any_type(depth - 1));
    }

    // A random type with the same skeleton as t.
    TypePtr similar_to(const TypePtr& t) {
        if (t->is_fun()) return fun(similar_to(t->dom), similar_to(t->cod));
        if (t->base == BaseType::Bool) return boolean();
        return pick(rng_, int_pool());
    }

    Label label() { return Label::named("l" + std::to_string(++labels_)); }

    TermPtr var_of(const TypePtr& t) {
        std::vector<std::string> names;
        for (const auto& [x, ty] : ctx_)
            if (ty->id == t->id) names.push_back(x);
        if (names.empty()) return nullptr;
        return mk::var(pick(rng_, names));
    }

    TermPtr int_const() { return mk::integer(uniform(rng_, -4, 9)); }

    TermPtr leaf(const TypePtr& t) {
        if (chance(rng_, 0.5))
            if (auto v = var_of(t)) return v;
        if (t->is_fun()) return lambda(t, 1);
        if (t->base == BaseType::Bool) return mk::boolean(chance(rng_, 0.5));
        if (t->is_raw()) return int_const();
        return mk::cast(any(), t, label(), int_const());
    }

    TermPtr lambda(const TypePtr& t, int size) {
        std::string x = "x" + std::to_string(++vars_);
        ctx_.emplace_back(x, t->dom);
        TermPtr body = gen(t->cod, size - 1);
        ctx_.pop_back();
        return mk::abs(x, t->dom, body);
    }

    TermPtr cast_to(const TypePtr& t, int size) {
        TypePtr s = similar_to(t);
        TermPtr subject = size > 2 && chance(rng_, 0.5) ? cast_to(s, size - 1) : gen(s, size - 1);
        return mk::cast(s, t, label(), subject);
    }

    TermPtr app_to(const TypePtr& t, int size) {
        TypePtr a = chance(rng_, 0.85) ? base_type() : any_type(1);
        int half = std::max(1, (size - 1) / 2);
        TermPtr fn = gen(fun(a, t), half);
        TermPtr arg = gen(a, size - 1 - half);
        return mk::app(fn, arg);
    }

    TermPtr cond_of(const TypePtr& t, int size) {
        int third = std::max(1, (size - 1) / 3);
        TermPtr g = gen(boolean(), third);
        TermPtr a = gen(t, third);
        TermPtr b = gen(t, std::max(1, size - 1 - 2 * third));
        return mk::cond(g, a, b);
    }

    TermPtr gen(const TypePtr& t, int size) {
        if (size <= 1) return leaf(t);
        int half = std::max(1, (size - 1) / 2);
        int rest = std::max(1, size - 1 - half);
        if (t->is_fun()) {
            int r = uniform(rng_, 0, 99);
            if (r < 15)
                if (auto v = var_of(t)) return v;
            if (r < 60) return lambda(t, size);
            return cast_to(t, size);
        }
        if (t->base == BaseType::Bool) {
            int r = uniform(rng_, 0, 99);
            if (r < 10)
                if (auto v = var_of(t)) return v;
            if (r < 40) {
                static const std::vector<std::string> cmp{"=", "<>", "<", "<=", ">", ">="};
                return mk::op(pick(rng_, cmp), {gen(any(), half), gen(any(), rest)});
            }
            if (r < 55) {
                if (chance(rng_, 0.3)) return mk::op("not", {gen(boolean(), size - 1)});
                return mk::op(chance(rng_, 0.5) ? "&&" : "||", {gen(boolean(), half), gen(boolean(), rest)});
            }
            if (r < 70) return app_to(t, size);
            if (r < 80) return cond_of(t, size);
            if (r < 90) return cast_to(t, size);
            return mk::boolean(chance(rng_, 0.5));
        }
        int r = uniform(rng_, 0, 99);
        if (r < 10)
            if (auto v = var_of(t)) return v;
        if (!t->is_raw()) {
            if (r < 60) return cast_to(t, size);
            if (r < 85) return app_to(t, size);
            return cond_of(t, size);
        }
        if (r < 20) return int_const();
        if (r < 45) {
            static const std::vector<std::string> arith{"+", "-", "*", "div", "mod"};
            const std::string& op = pick(rng_, arith);
            TypePtr second = op == "div" || op == "mod" ? nz() : any();
            return mk::op(op, {gen(any(), half), gen(second, rest)});
        }
        if (r < 70) return cast_to(t, size);
        if (r < 90) return app_to(t, size);
        return cond_of(t, size);
    }

    std::mt19937_64& rng_;
    std::vector<std::pair<std::string, TypePtr>> ctx_;
    int labels_ = 0;
    int vars_ = 0;
};

bool same_constant(const Outcome& a, const Outcome& b) {
    auto* x = a.value ? a.value->as<Const>() : nullptr;
    auto* y = b.value ? b.value->as<Const>() : nullptr;
    return x && y && x->value == y->value;
}

bool is_const_value(const Outcome& o) {
    return o.kind == Outcome::Kind::Value && o.value && o.value->is<Const>();
}

VerdictEntry fail(std::string why) { return VerdictEntry{Verdict::Fail, std::move(why)}; }
VerdictEntry skip(std::string why) { return VerdictEntry{Verdict::Skipped, std::move(why)}; }

// Failure when the compared mode did not finish normally.
std::optional<VerdictEntry> abnormal(Mode m, const Outcome& o) {
    if (o.kind == Outcome::Kind::Stuck) return fail(std::string(mode_name(m)) + " stuck: " + o.reason);
    if (o.kind == Outcome::Kind::Fault) return fail(std::string(mode_name(m)) + " fault: " + o.reason);
    return std::nullopt;
}

const Term* child_at(const Term& t, int i) {
    if (auto* a = t.as<App>()) return i == 0 ? a->fn.get() : a->arg.get();
    if (auto* o = t.as<Op>()) return o->args[static_cast<std::size_t>(i)].get();
    if (auto* c = t.as<Cast>()) return c->subject.get();
    if (auto* c = t.as<Check>()) return c->current.get();
    if (auto* s = t.as<Stack>()) return s->current.get();
    if (auto* c = t.as<Cond>()) return c->guard.get();
    return nullptr;
}

bool contains_fix(const Term& t) {
    if (t.is<Fix>()) return true;
    if (auto* a = t.as<Abs>()) return contains_fix(*a->body);
    if (auto* a = t.as<App>()) return contains_fix(*a->fn) || contains_fix(*a->arg);
    if (auto* o = t.as<Op>())
        return std::any_of(o->args.begin(), o->args.end(), [](const TermPtr& x) { return contains_fix(*x); });
    if (auto* c = t.as<Cond>())
        return contains_fix(*c->guard) || contains_fix(*c->then_branch) || contains_fix(*c->else_branch);
    const Term* sub = child_at(t, 0);
    return sub && contains_fix(*sub);
}

bool mergeable(Mode m, const Term& t, const ImplicationOracle& oracle) {
    if (m == Mode::Classic) return false;
    auto* outer = t.as<Cast>();
    if (!outer) return false;
    auto* inner = outer->subject->as<Cast>();
    if (!inner) return false;
    return merge(m, inner->src, inner->ann, outer->src, outer->ann, outer->tgt, oracle).has_value();
}

}  // namespace

TermPtr gen_source(std::uint64_t seed, int size) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(size)};
    std::mt19937_64 rng(seq);
    size = std::max(size, 1);
    for (;;) {
        TermPtr e = Gen(rng).program(size);
        if (!check_source(e)) continue;
        Outcome o = eval(Mode::Classic, e, kCheckerBudget);
        if (o.kind == Outcome::Kind::Fault) continue;
        return e;
    }
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Skipped: return "skipped";
    }
    return "?";
}

bool DiffReport::failed() const {
    return forgetful.verdict == Verdict::Fail || heedful.verdict == Verdict::Fail ||
           eidetic.verdict == Verdict::Fail;
}

bool DiffReport::any_stuck() const {
    return std::any_of(outcomes.begin(), outcomes.end(),
                       [](const Outcome& o) { return o.kind == Outcome::Kind::Stuck; });
}

bool DiffReport::any_budget() const {
    return std::any_of(outcomes.begin(), outcomes.end(),
                       [](const Outcome& o) { return o.kind == Outcome::Kind::BudgetExceeded; });
}

DiffReport diff_modes(const TermPtr& e, const DiffOptions& opts) {
    DiffReport rep;
    // Recursive programs need not terminate, so the mode relations do not apply.
    if (contains_fix(*e)) {
        rep.forgetful = rep.heedful = rep.eidetic = skip("program uses let rec");
        for (Mode m : kAllModes) rep.outcomes[static_cast<std::size_t>(m)] = eval(m, e, opts.budget, opts.eval);
        return rep;
    }
    TypePtr type;
    if (opts.check_traces) {
        CheckConfig cc;
        cc.eval = opts.eval;
        TypeResult r = check_source(e, cc);
        if (r) {
            type = r.type;
        } else {
            rep.findings.push_back(Finding{Mode::Classic, 0, "source", r.error->message()});
        }
    }
    for (Mode m : kAllModes) {
        auto i = static_cast<std::size_t>(m);
        if (type) {
            Trace tr;
            rep.outcomes[i] = eval(m, e, opts.budget, opts.eval, &tr);
            CheckConfig cc;
            cc.eval = opts.eval;
            Checker checker(m, cc);
            auto f = check_trace(m, tr, type, checker, opts.eval);
            rep.findings.insert(rep.findings.end(), f.begin(), f.end());
        } else {
            rep.outcomes[i] = eval(m, e, opts.budget, opts.eval);
        }
    }

    const Outcome& c = rep.outcome(Mode::Classic);
    for (Mode m : kAllModes) {
        if (rep.outcome(m).kind == Outcome::Kind::BudgetExceeded) {
            auto s = skip(std::string("budget exceeded in ") + std::string(mode_name(m)));
            rep.forgetful = rep.heedful = rep.eidetic = s;
            return rep;
        }
    }
    if (c.kind == Outcome::Kind::Fault) {
        rep.forgetful = rep.heedful = rep.eidetic = skip("classic fault: " + c.reason);
        return rep;
    }
    if (c.kind == Outcome::Kind::Stuck) {
        rep.forgetful = rep.heedful = rep.eidetic = fail("classic stuck: " + c.reason);
        return rep;
    }
    if (c.kind == Outcome::Kind::Value && !is_const_value(c)) {
        rep.forgetful = rep.heedful = rep.eidetic = skip("function result");
        return rep;
    }

    const Outcome& f = rep.outcome(Mode::Forgetful);
    if (auto a = abnormal(Mode::Forgetful, f)) {
        rep.forgetful = *a;
    } else if (c.kind == Outcome::Kind::Value && !(is_const_value(f) && same_constant(c, f))) {
        rep.forgetful = fail("classic " + describe(c) + ", forgetful " + describe(f));
    }

    const Outcome& h = rep.outcome(Mode::Heedful);
    if (auto a = abnormal(Mode::Heedful, h)) {
        rep.heedful = *a;
    } else if ((c.kind == Outcome::Kind::Blamed) != (h.kind == Outcome::Kind::Blamed) ||
               (c.kind == Outcome::Kind::Value && !same_constant(c, h))) {
        rep.heedful = fail("classic " + describe(c) + ", heedful " + describe(h));
    }

    const Outcome& ei = rep.outcome(Mode::Eidetic);
    if (auto a = abnormal(Mode::Eidetic, ei)) {
        rep.eidetic = *a;
    } else if (!(c == ei)) {
        rep.eidetic = fail("classic " + describe(c) + ", eidetic " + describe(ei));
    }
    return rep;
}

std::vector<Finding> check_trace(Mode m, const Trace& trace, const TypePtr& type, Checker& checker,
                                 const EvalConfig& cfg) {
    std::vector<Finding> out;
    std::vector<TermPtr> terms = trace.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const TermPtr& t = terms[i];
        TypeResult r = checker.check(Context{}, t, type);
        if (!r) out.push_back(Finding{m, i, "preservation", r.error->message()});
        if (i > 0) {
            const auto& before = *terms[i - 1]->info.types;
            const auto& after = *t->info.types;
            if (!std::includes(before.begin(), before.end(), after.begin(), after.end()))
                out.push_back(Finding{m, i, "monotonicity", "types_of grew"});
        }
        if (i + 1 >= terms.size()) continue;
        const TraceStep& next = trace.steps[i];
        StepOutcome again = step(m, t, cfg);
        if (again.kind != StepOutcome::Kind::Stepped || again.rule_name() != next.rule ||
            !alpha_eq(again.term, next.term))
            out.push_back(Finding{m, i, "determinism", "recorded successor differs from a fresh step"});
        const Term* node = t.get();
        for (const Frame& f : next.path) {
            if (!node) break;
            if (mergeable(m, *node, cfg.oracle)) {
                out.push_back(Finding{m, i, "merge-priority", "stepped into a mergeable cast via " + f.rule});
                break;
            }
            node = child_at(*node, f.child);
        }
        if (node && mergeable(m, *node, cfg.oracle) && next.rule.size() >= 12 &&
            next.rule.compare(next.rule.size() - 12, 12, "E-CastMergeE") != 0)
            out.push_back(Finding{m, i, "merge-priority", "mergeable cast reduced by " + next.rule});
    }
    return out;
}

std::vector<Finding> check_trace(Mode m, const Trace& trace, const EvalConfig& cfg) {
    CheckConfig cc;
    cc.eval = cfg;
    Checker checker(m, cc);
    TypeResult r = checker.type_of(Context{}, trace.initial);
    if (!r) return {Finding{m, 0, "preservation", r.error->message()}};
    if (!r.type) return {};
    return check_trace(m, trace, r.type, checker, cfg);
}

FuzzSummary run_fuzz(const FuzzOptions& opts) {
    FuzzSummary s;
    int span = std::max(1, opts.max_size - opts.min_size + 1);
    for (std::size_t i = 0; i < opts.count; ++i) {
        FuzzItem item;
        item.seed = opts.seed + i;
        item.size = opts.min_size + static_cast<int>(i % static_cast<std::size_t>(span));
        item.program = gen_source(item.seed, item.size);
        item.report = diff_modes(item.program, opts.diff);
        ++s.items;
        if (item.program->info.chain_max >= 2) ++s.chained;
        bool bad = false;
        if (item.report.failed()) {
            ++s.failures;
            bad = true;
        }
        if (item.report.any_stuck()) {
            ++s.stuck;
            bad = true;
        }
        if (item.report.any_budget()) ++s.budget_exceeded;
        if (!item.report.findings.empty()) {
            s.trace_findings += item.report.findings.size();
            bad = true;
        }
        if (bad) s.failing.push_back(std::move(item));
    }
    return s;
}

nlohmann::json to_json(const Outcome& o) {
    nlohmann::json j{{"kind", outcome_kind_name(o.kind)}, {"steps", o.steps}};
    switch (o.kind) {
        case Outcome::Kind::Value: j["value"] = print(o.value); break;
        case Outcome::Kind::Blamed: j["label"] = o.label.name; break;
        case Outcome::Kind::Stuck:
        case Outcome::Kind::Fault: j["reason"] = o.reason; break;
        case Outcome::Kind::BudgetExceeded: break;
    }
    return j;
}

nlohmann::json to_json(const DiffReport& r) {
    nlohmann::json outcomes = nlohmann::json::object();
    for (Mode m : kAllModes) outcomes[std::string(mode_name(m))] = to_json(r.outcome(m));
    auto verdict = [](const VerdictEntry& v) {
        nlohmann::json j{{"verdict", verdict_name(v.verdict)}};
        if (!v.reason.empty()) j["reason"] = v.reason;
        return j;
    };
    auto findings = nlohmann::json::array();
    for (const auto& f : r.findings)
        findings.push_back(
            {{"mode", mode_name(f.mode)}, {"step", f.step}, {"kind", f.kind}, {"detail", f.detail}});
    return {{"outcomes", outcomes},
            {"forgetful", verdict(r.forgetful)},
            {"heedful", verdict(r.heedful)},
            {"eidetic", verdict(r.eidetic)},
            {"findings", findings}};
}

nlohmann::json to_json(const FuzzSummary& s) {
    auto failing = nlohmann::json::array();
    for (const auto& item : s.failing) {
        auto j = to_json(item.report);
        j["seed"] = item.seed;
        j["size"] = item.size;
        j["program"] = print(item.program);
        failing.push_back(std::move(j));
    }
    return {{"items", s.items},
            {"failures", s.failures},
            {"stuck", s.stuck},
            {"budget_exceeded", s.budget_exceeded},
            {"trace_findings", s.trace_findings},
            {"chained", s.chained},
            {"failing", failing}};
}

// ---------------------------------------------------------------------------

RefList gen_reflist(std::mt19937_64& rng, std::size_t max_len) {
    std::vector<TypePtr> pool = refinement_pool();
    std::shuffle(pool.begin(), pool.end(), rng);
    auto len = std::uniform_int_distribution<std::size_t>(0, std::min(max_len, pool.size()))(rng);
    RefList out;
    for (std::size_t i = 0; i < len; ++i)
        out.push_back(RefEntry{pool[i], Label::named("m" + std::to_string(uniform(rng, 1, 9)))});
    return out;
}

CoercionPtr gen_coercion(std::mt19937_64& rng, const TypePtr& shape) {
    if (shape->is_fun()) return coercion_fun(gen_coercion(rng, shape->dom), gen_coercion(rng, shape->cod));
    return coercion_refs(gen_reflist(rng, 4));
}

namespace {

TypePtr gen_shape(std::mt19937_64& rng, int depth) {
    if (depth <= 0 || chance(rng, 0.6)) return any();
    return fun(gen_shape(rng, depth - 1), gen_shape(rng, depth - 1));
}

bool duplicate_free(const Coercion& c) {
    if (!c.is_refs()) return duplicate_free(*c.fn().dom) && duplicate_free(*c.fn().cod);
    std::vector<std::uint32_t> ids;
    for (const auto& e : c.refs()) ids.push_back(e.ref->id);
    std::sort(ids.begin(), ids.end());
    return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
}

bool is_subsequence(const RefList& sub, const RefList& full) {
    std::size_t j = 0;
    for (const auto& e : full)
        if (j < sub.size() && sub[j].ref->id == e.ref->id && sub[j].label == e.label) ++j;
    return j == sub.size();
}

std::string show(const RefList& r) { return print(r); }

bool satisfies(const Value& k, const TypePtr& t) {
    Outcome o = eval(Mode::Classic, subst(t->pred, t->binder, mk::lit(k)), kCheckerBudget);
    auto* c = o.kind == Outcome::Kind::Value ? o.value->as<Const>() : nullptr;
    return c && c->value == Value{true};
}

std::vector<TypePtr> satisfied_by(const Value& k) {
    std::vector<TypePtr> out;
    for (const auto& t : refinement_pool())
        if (satisfies(k, t)) out.push_back(t);
    return out;
}

}  // namespace

AlgebraReport check_merge_properties(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    AlgebraReport rep;
    for (std::size_t i = 0; i < count; ++i, ++rep.cases) {
        RefList r1 = gen_reflist(rng, 5), r2 = gen_reflist(rng, 5);
        RefList m = reflist_merge(r1, r2);
        if (!duplicate_free(*coercion_refs(m)))
            rep.violations.push_back("duplicate in " + show(r1) + " |> " + show(r2));
        RefList both = r1;
        both.insert(both.end(), r2.begin(), r2.end());
        for (const auto& e : m) {
            auto first = std::find_if(both.begin(), both.end(),
                                      [&](const RefEntry& x) { return x.ref->id == e.ref->id; });
            if (first == both.end() || !(first->label == e.label))
                rep.violations.push_back("label of " + print(*e.ref) + " not leftmost in " + show(r1) + " |> " +
                                         show(r2));
        }
        // Every refinement of either operand survives (alpha implication only
        // drops exact repeats).
        for (const auto& e : both)
            if (std::none_of(m.begin(), m.end(), [&](const RefEntry& x) { return x.ref->id == e.ref->id; }))
                rep.violations.push_back("lost " + print(*e.ref) + " in " + show(r1) + " |> " + show(r2));

        const TypePtr& t = pick(rng, refinement_pool());
        if (!is_subsequence(ref_drop(r1, *t), r1))
            rep.violations.push_back("ref_drop not a subsequence on " + show(r1));

        TypePtr shape = gen_shape(rng, 2);
        auto c = coercion_merge(gen_coercion(rng, shape), gen_coercion(rng, shape));
        if (!duplicate_free(*c)) rep.violations.push_back("duplicate in function coercion merge " + print(*c));
    }
    return rep;
}

AlgebraReport check_merge_associativity(std::uint64_t seed, std::size_t count, const ImplicationOracle& oracle) {
    std::mt19937_64 rng(seed);
    AlgebraReport rep;
    for (std::size_t i = 0; i < count; ++i, ++rep.cases) {
        TypePtr shape = gen_shape(rng, 2);
        auto a = gen_coercion(rng, shape), b = gen_coercion(rng, shape), c = gen_coercion(rng, shape);
        auto left = coercion_merge(coercion_merge(a, b, oracle), c, oracle);
        auto right = coercion_merge(a, coercion_merge(b, c, oracle), oracle);
        if (!coercion_eq(*left, *right))
            rep.violations.push_back("(" + print(*a) + " |> " + print(*b) + ") |> " + print(*c) + " = " +
                                     print(*left) + " but the other grouping gives " + print(*right));
    }
    return rep;
}

AlgebraReport check_heedful_idempotence(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    AlgebraReport rep;
    const Label l = Label::named("l");
    while (rep.cases < count) {
        Value k{static_cast<std::int64_t>(uniform(rng, -6, 12))};
        std::vector<TypePtr> sat = satisfied_by(k);
        const TypePtr& src = pick(rng, sat);
        const TypePtr& known = pick(rng, sat);
        const TypePtr& tgt = pick(rng, refinement_pool());
        TypeSet s;
        for (const auto& t : refinement_pool())
            if (chance(rng, 0.4)) s.insert(t);
        if (chance(rng, 0.5)) s.insert(known);
        ++rep.cases;
        Outcome a = eval(Mode::Heedful, mk::cast(src, s, tgt, l, mk::lit(k)), kCheckerBudget);
        Outcome b = eval(Mode::Heedful, mk::cast(src, s.without(*known), tgt, l, mk::lit(k)), kCheckerBudget);
        if (!(a == b))
            rep.violations.push_back("casting " + value_text(k) + " from " + print(*src) + " to " + print(*tgt) +
                                     " with " + print(Annotation{s}) + ": " + describe(a) + " vs " + describe(b));
    }
    return rep;
}

AlgebraReport check_eidetic_idempotence(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    AlgebraReport rep;
    while (rep.cases < count) {
        Value k{static_cast<std::int64_t>(uniform(rng, -6, 12))};
        TypePtr src = pick(rng, satisfied_by(k));
        const TypePtr& tgt = pick(rng, refinement_pool());
        RefList r1 = gen_reflist(rng, 4), r2 = gen_reflist(rng, 4);
        if (std::none_of(r2.begin(), r2.end(), [&](const RefEntry& e) { return e.ref->id == tgt->id; }))
            r2.push_back(RefEntry{tgt, Label::named("mt")});
        if (chance(rng, 0.5) &&
            std::none_of(r2.begin(), r2.end(), [&](const RefEntry& e) { return e.ref->id == src->id; }))
            r2.insert(r2.begin(), RefEntry{src, Label::named("ms")});
        ++rep.cases;
        auto full = coercion_refs(reflist_merge(r1, r2));
        auto dropped = coercion_refs(reflist_merge(r1, ref_drop(r2, *src)));
        Outcome a = eval(Mode::Eidetic, mk::cast(src, full, tgt, Label::none(), mk::lit(k)), kCheckerBudget);
        Outcome b = eval(Mode::Eidetic, mk::cast(src, dropped, tgt, Label::none(), mk::lit(k)), kCheckerBudget);
        if (!(a == b))
            rep.violations.push_back("casting " + value_text(k) + " with " + print(*full) + " vs " + print(*dropped) +
                                     ": " + describe(a) + " vs " + describe(b));
    }
    return rep;
}

}  // namespace lh

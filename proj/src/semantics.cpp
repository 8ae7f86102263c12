#include "lh/semantics.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

#include "lh/ops.hpp"
#include "lh/print.hpp"

namespace lh {

// ---------------------------------------------------------------------------
// Implication and choice

ImplicationOracle alpha_oracle() {
    return {"alpha-eq", [](const Type& a, const Type& b) { return a.id == b.id; }};
}

ImplicationOracle axiom_oracle(std::vector<std::pair<TypePtr, TypePtr>> axioms) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& [a, b] : axioms) edges.emplace_back(a->id, b->id);
    return {"axioms", [edges = std::move(edges)](const Type& a, const Type& b) {
                if (a.id == b.id) return true;
                std::set<std::uint32_t> seen{a.id};
                std::deque<std::uint32_t> work{a.id};
                while (!work.empty()) {
                    auto cur = work.front();
                    work.pop_front();
                    for (const auto& [from, to] : edges) {
                        if (from != cur || !seen.insert(to).second) continue;
                        if (to == b.id) return true;
                        work.push_back(to);
                    }
                }
                return false;
            }};
}

bool implies(const ImplicationOracle& oracle, const Type& t1, const Type& t2) { return oracle.decide(t1, t2); }

ChoosePolicy lex_min_policy() {
    return {"lex-min", [](const TypeSet& s) { return s.front(); }};
}

TypePtr choose(const TypeSet& s, const ChoosePolicy& policy) {
    if (s.empty()) throw std::invalid_argument("choose on an empty type set");
    return policy.pick(s);
}

// ---------------------------------------------------------------------------
// Annotation algebra

std::pair<Annotation, Annotation> split_annotation(const Annotation& a) {
    if (is_empty_ann(a)) return {EmptyAnn{}, EmptyAnn{}};
    if (auto* s = std::get_if<TypeSet>(&a)) {
        TypeSet dom, cod;
        for (const auto& t : *s) {
            if (!t->is_fun()) throw std::invalid_argument("type set member is not a function type: " + print(*t));
            dom.insert(t->dom);
            cod.insert(t->cod);
        }
        return {dom, cod};
    }
    const auto& c = std::get<CoercionPtr>(a);
    if (c->is_refs()) throw std::invalid_argument("refinement list where a function coercion was expected");
    return {c->fn().dom, c->fn().cod};
}

CoercionPtr coerce(const TypePtr& t1, const TypePtr& t2, const Label& l) {
    if (t1->is_refine() && t2->is_refine()) {
        if (t1->base != t2->base) throw std::invalid_argument("coerce between different base types");
        return coercion_refs(RefList{RefEntry{t2, l}});
    }
    if (t1->is_fun() && t2->is_fun()) return coercion_fun(coerce(t2->dom, t1->dom, l), coerce(t1->cod, t2->cod, l));
    throw std::invalid_argument("coerce between dissimilar types " + print(*t1) + " and " + print(*t2));
}

RefList ref_drop(const RefList& r, const Type& t, const ImplicationOracle& oracle) {
    RefList out;
    for (const auto& e : r)
        if (!implies(oracle, t, *e.ref)) out.push_back(e);
    return out;
}

RefList reflist_merge(const RefList& r1, const RefList& r2, const ImplicationOracle& oracle) {
    RefList acc = r2;
    for (auto it = r1.rbegin(); it != r1.rend(); ++it) {
        RefList next{*it};
        RefList rest = ref_drop(acc, *it->ref, oracle);
        next.insert(next.end(), rest.begin(), rest.end());
        acc = std::move(next);
    }
    return acc;
}

CoercionPtr coercion_merge(const CoercionPtr& c1, const CoercionPtr& c2, const ImplicationOracle& oracle) {
    if (c1->is_refs() && c2->is_refs()) return coercion_refs(reflist_merge(c1->refs(), c2->refs(), oracle));
    if (!c1->is_refs() && !c2->is_refs())
        return coercion_fun(coercion_merge(c2->fn().dom, c1->fn().dom, oracle),
                            coercion_merge(c1->fn().cod, c2->fn().cod, oracle));
    throw std::invalid_argument("merging coercions of different shapes");
}

namespace {
bool same_shape(const Coercion& a, const Coercion& b) {
    if (a.is_refs() != b.is_refs()) return false;
    if (a.is_refs()) return true;
    return same_shape(*a.fn().dom, *b.fn().dom) && same_shape(*a.fn().cod, *b.fn().cod);
}
}  // namespace

std::optional<Annotation> merge(Mode m, const TypePtr&, const Annotation& a1, const TypePtr& t2,
                                const Annotation& a2, const TypePtr&, const ImplicationOracle& oracle) {
    switch (m) {
        case Mode::Classic:
            return std::nullopt;
        case Mode::Forgetful:
            if (is_empty_ann(a1) && is_empty_ann(a2)) return Annotation{EmptyAnn{}};
            return std::nullopt;
        case Mode::Heedful: {
            auto* s1 = std::get_if<TypeSet>(&a1);
            auto* s2 = std::get_if<TypeSet>(&a2);
            if (!s1 || !s2) return std::nullopt;
            TypeSet out = s1->unite(*s2);
            out.insert(t2);
            return Annotation{out};
        }
        case Mode::Eidetic: {
            auto* c1 = std::get_if<CoercionPtr>(&a1);
            auto* c2 = std::get_if<CoercionPtr>(&a2);
            if (!c1 || !c2 || !same_shape(**c1, **c2)) return std::nullopt;
            return Annotation{coercion_merge(*c1, *c2, oracle)};
        }
    }
    return std::nullopt;
}

Status status_join(Status s, const Type& target, const Type& popped) {
    if (s == Status::Checked) return Status::Checked;
    return target.id == popped.id ? Status::Checked : Status::Unchecked;
}

// ---------------------------------------------------------------------------
// Single step

std::string StepOutcome::rule_name() const {
    std::string out;
    for (const auto& f : path) out += f.rule + "/";
    return out + rule;
}

namespace {

using K = StepOutcome::Kind;

class Stepper {
public:
    Stepper(Mode m, const EvalConfig& cfg) : m_(m), cfg_(cfg) {}

    StepOutcome run(const TermPtr& e) {
        out_.kind = go(e);
        if (out_.kind == K::Stepped || out_.kind == K::Stuck || out_.kind == K::Fault) {
            // Frames were pushed innermost-first while unwinding.
            std::reverse(frames_.begin(), frames_.end());
            out_.path = std::move(frames_);
        }
        return std::move(out_);
    }

private:
    // The result is built in out_ rather than returned up through every
    // congruence level.
    K stepped(TermPtr t, const char* rule) {
        out_.term = std::move(t);
        out_.rule = rule;
        return K::Stepped;
    }
    static K value() { return K::IsValue; }
    K blamed(const Label& l) {
        out_.blame = l;
        return K::IsBlame;
    }
    K stuck(std::string why) {
        out_.reason = std::move(why);
        return K::Stuck;
    }
    K fault(std::string why) {
        out_.reason = std::move(why);
        return K::Fault;
    }

    // Steps a child; on success rebuilds the parent and records the congruence frame.
    template <class Rebuild>
    K congruence(const TermPtr& child, const char* rule, int index, Rebuild rebuild) {
        K k = go(child);
        if (k == K::Stepped || k == K::Stuck || k == K::Fault) frames_.push_back(Frame{rule, index});
        if (k == K::Stepped) out_.term = rebuild(std::move(out_.term));
        return k;
    }

    K go(const TermPtr& e) {
        return std::visit([&](const auto& n) { return node(e, n); }, e->node);
    }

    K node(const TermPtr&, const Var& n) { return stuck("free variable " + n.name); }
    K node(const TermPtr&, const Const&) { return value(); }
    K node(const TermPtr&, const Abs&) { return value(); }
    K node(const TermPtr&, const Blame& n) { return blamed(n.label); }

    K node(const TermPtr& e, const Fix& n) { return stepped(subst(n.body, n.x, e), "E-Fix"); }

    K node(const TermPtr&, const App& n) {
        K r = congruence(n.fn, "E-AppL", 0, [&](TermPtr f) { return mk::app(std::move(f), n.arg); });
        if (r == K::IsBlame) return stepped(mk::blame(out_.blame), "E-AppRaiseL");
        if (r != K::IsValue) return r;
        r = congruence(n.arg, "E-AppR", 1, [&](TermPtr a) { return mk::app(n.fn, std::move(a)); });
        if (r == K::IsBlame) return stepped(mk::blame(out_.blame), "E-AppRaiseR");
        if (r != K::IsValue) return r;

        if (auto* lam = n.fn->as<Abs>()) return stepped(subst(lam->body, lam->x, n.arg), "E-Beta");
        if (auto* c = n.fn->as<Cast>()) {
            if (!c->src->is_fun() || !c->tgt->is_fun()) return stuck("applying a cast between refinements");
            std::pair<Annotation, Annotation> parts;
            try {
                parts = split_annotation(c->ann);
            } catch (const std::invalid_argument& ex) {
                return stuck(ex.what());
            }
            auto arg = mk::cast(c->tgt->dom, parts.first, c->src->dom, c->label, n.arg);
            return stepped(mk::cast(c->src->cod, parts.second, c->tgt->cod, c->label, mk::app(c->subject, arg)),
                           "E-Unwrap");
        }
        return stuck("application of a non-function value");
    }

    K node(const TermPtr&, const Op& n) {
        std::vector<Value> vals;
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            K r = congruence(
                n.args[i], "E-OpInner", static_cast<int>(i),
                [&](const TermPtr& a) {
                    auto args = n.args;
                    args[i] = a;
                    return mk::op(n.name, std::move(args));
                });
            if (r == K::IsBlame) return stepped(mk::blame(out_.blame), "E-OpRaise");
            if (r != K::IsValue) return r;
            auto* k = n.args[i]->as<Const>();
            if (!k) return stuck("operation " + n.name + " applied to a non-constant");
            vals.push_back(k->value);
        }
        ApplyResult res = apply_op(n.name, vals);
        if (res.status == ApplyStatus::Overflow) return fault(res.detail);
        if (res.status == ApplyStatus::Undefined) return stuck(res.detail);
        return stepped(mk::lit(res.value), "E-Op");
    }

    K node(const TermPtr& e, const Cast& n) {
        // (1) annotate
        if (is_empty_ann(n.ann) && m_ == Mode::Heedful)
            return stepped(mk::cast(n.src, TypeSet{}, n.tgt, n.label, n.subject), "E-TypeSet");
        if (is_empty_ann(n.ann) && m_ == Mode::Eidetic) {
            try {
                return stepped(mk::cast(n.src, coerce(n.src, n.tgt, n.label), n.tgt, Label::none(), n.subject),
                               "E-Coerce");
            } catch (const std::invalid_argument& ex) {
                return stuck(ex.what());
            }
        }
        // (2) raise
        if (auto* b = n.subject->as<Blame>()) return stepped(mk::blame(b->label), "E-CastRaise");
        // (3) merge
        if (auto* inner = m_ == Mode::Classic ? nullptr : n.subject->as<Cast>()) {
            if (auto merged = merge(m_, inner->src, inner->ann, n.src, n.ann, n.tgt, cfg_.oracle))
                return stepped(mk::cast(inner->src, *merged, n.tgt, n.label, inner->subject), "E-CastMergeE");
        }
        // (4) congruence
        K r = congruence(
            n.subject, m_ == Mode::Classic ? "E-CastInnerC" : "E-CastInnerE", 0,
            [&](TermPtr s) { return mk::cast(n.src, n.ann, n.tgt, n.label, std::move(s)); });
        if (r == K::IsBlame) return stepped(mk::blame(out_.blame), "E-CastRaise");
        if (r != K::IsValue) return r;
        // (5) the subject is a value
        if (n.src->is_refine() && n.tgt->is_refine()) return check_value(e, n);
        return proxy_value(n);
    }

    K check_value(const TermPtr&, const Cast& n) {
        auto* k = n.subject->as<Const>();
        if (!k) return stuck("refinement cast applied to a non-constant");
        const Value& kv = k->value;
        auto start = [&](const TypePtr& t) { return mk::check(t, subst(t->pred, t->binder, n.subject), kv, n.label); };
        switch (m_) {
            case Mode::Classic:
            case Mode::Forgetful:
                if (!is_empty_ann(n.ann)) return stuck("annotated cast in a mode without annotations");
                return stepped(start(n.tgt), "E-CheckNone");
            case Mode::Heedful: {
                auto* s = std::get_if<TypeSet>(&n.ann);
                if (!s) return stuck("heedful cast without a type set");
                if (s->empty()) return stepped(start(n.tgt), "E-CheckEmpty");
                TypePtr t;
                try {
                    t = choose(*s, cfg_.choose);
                } catch (const std::invalid_argument& ex) {
                    return stuck(ex.what());
                }
                if (!t->is_refine()) return stuck("type set member is not a refinement");
                return stepped(mk::cast(t, s->without(*t), n.tgt, n.label, start(t)), "E-CheckSet");
            }
            case Mode::Eidetic: {
                auto* c = std::get_if<CoercionPtr>(&n.ann);
                if (!c || !(*c)->is_refs()) return stuck("eidetic refinement cast without a refinement list");
                return stepped(mk::stack(n.tgt, Status::Unchecked, (*c)->refs(), kv, n.subject), "E-CoerceStack");
            }
        }
        return stuck("unknown mode");
    }

    K proxy_value(const Cast& n) {
        if (!n.src->is_fun() || !n.tgt->is_fun()) return stuck("cast between dissimilar types");
        bool over_lambda = n.subject->is<Abs>();
        switch (m_) {
            case Mode::Classic:
                if (is_empty_ann(n.ann)) return value();
                break;
            case Mode::Forgetful:
                if (is_empty_ann(n.ann) && over_lambda) return value();
                break;
            case Mode::Heedful:
                if (std::holds_alternative<TypeSet>(n.ann) && over_lambda) return value();
                break;
            case Mode::Eidetic: {
                auto* c = std::get_if<CoercionPtr>(&n.ann);
                if (c && !(*c)->is_refs() && n.label.empty() && over_lambda) return value();
                break;
            }
        }
        return stuck("function cast is neither a redex nor a proxy value");
    }

    K node(const TermPtr&, const Check& n) {
        if (auto* k = n.current->as<Const>()) {
            if (auto* b = std::get_if<bool>(&k->value)) {
                if (*b) return stepped(mk::lit(n.k), "E-CheckOK");
                return stepped(mk::blame(n.label), "E-CheckFail");
            }
            return stuck("active check produced a non-boolean");
        }
        K r = congruence(
            n.current, "E-CheckInner", 0, [&](const TermPtr& c) { return mk::check(n.tgt, c, n.k, n.label); });
        if (r == K::IsBlame) return stepped(mk::blame(out_.blame), "E-CheckRaise");
        if (r == K::IsValue) return stuck("active check produced a non-boolean value");
        return r;
    }

    K node(const TermPtr&, const Stack& n) {
        if (auto* b = n.current->as<Blame>()) return stepped(mk::blame(b->label), "E-StackRaise");
        if (auto* k = n.current->as<Const>()) {
            if (k->value != n.k) return stuck("coercion stack checking term differs from its scrutinee");
            if (n.pending.empty()) return stepped(n.current, "E-StackDone");
            const RefEntry& head = n.pending.front();
            RefList rest(n.pending.begin() + 1, n.pending.end());
            Status s = status_join(n.status, *n.tgt, *head.ref);
            auto chk = mk::check(head.ref, subst(head.ref->pred, head.ref->binder, n.current), n.k, head.label);
            return stepped(mk::stack(n.tgt, s, std::move(rest), n.k, chk), "E-StackPop");
        }
        K r = congruence(
            n.current, "E-StackInner", 0,
            [&](const TermPtr& c) { return mk::stack(n.tgt, n.status, n.pending, n.k, c); });
        if (r == K::IsBlame) return stepped(mk::blame(out_.blame), "E-StackRaise");
        if (r == K::IsValue) return stuck("coercion stack holds a non-constant value");
        return r;
    }

    K node(const TermPtr&, const Cond& n) {
        if (auto* k = n.guard->as<Const>()) {
            if (auto* b = std::get_if<bool>(&k->value))
                return *b ? stepped(n.then_branch, "E-IfTrue") : stepped(n.else_branch, "E-IfFalse");
            return stuck("conditional on a non-boolean");
        }
        K r = congruence(
            n.guard, "E-IfGuard", 0,
            [&](const TermPtr& g) { return mk::cond(g, n.then_branch, n.else_branch); });
        if (r == K::IsBlame) return stepped(mk::blame(out_.blame), "E-IfRaise");
        if (r == K::IsValue) return stuck("conditional on a non-boolean value");
        return r;
    }

    Mode m_;
    const EvalConfig& cfg_;
    std::vector<Frame> frames_;
    StepOutcome out_;
};

}  // namespace

StepOutcome step(Mode m, const TermPtr& e, const EvalConfig& cfg) { return Stepper(m, cfg).run(e); }

bool is_value(Mode m, const TermPtr& e, const EvalConfig& cfg) {
    return step(m, e, cfg).kind == StepOutcome::Kind::IsValue;
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<TermPtr> Trace::terms() const {
    std::vector<TermPtr> out;
    out.reserve(steps.size() + 1);
    out.push_back(initial);
    for (const auto& s : steps) out.push_back(s.term);
    return out;
}

bool Outcome::operator==(const Outcome& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Value: return alpha_eq(*value, *o.value);
        case Kind::Blamed: return label == o.label;
        default: return true;
    }
}

std::string_view outcome_kind_name(Outcome::Kind k) {
    switch (k) {
        case Outcome::Kind::Value: return "value";
        case Outcome::Kind::Blamed: return "blame";
        case Outcome::Kind::BudgetExceeded: return "budget_exceeded";
        case Outcome::Kind::Stuck: return "stuck";
        case Outcome::Kind::Fault: return "fault";
    }
    return "?";
}

std::string describe(const Outcome& o) {
    switch (o.kind) {
        case Outcome::Kind::Value: return print(*o.value);
        case Outcome::Kind::Blamed: return "blame " + print(o.label);
        case Outcome::Kind::BudgetExceeded: return "budget exceeded";
        case Outcome::Kind::Stuck: return "stuck: " + o.reason;
        case Outcome::Kind::Fault: return "fault: " + o.reason;
    }
    return "?";
}

Outcome eval_observed(Mode m, const TermPtr& e, std::size_t budget, const EvalConfig& cfg,
                      const StepObserver& observe) {
    Outcome out;
    TermPtr cur = e;
    for (std::size_t n = 0;; ++n) {
        StepOutcome s = step(m, cur, cfg);
        out.steps = n;
        switch (s.kind) {
            case StepOutcome::Kind::IsValue:
                out.kind = Outcome::Kind::Value;
                out.value = cur;
                return out;
            case StepOutcome::Kind::IsBlame:
                out.kind = Outcome::Kind::Blamed;
                out.label = s.blame;
                return out;
            case StepOutcome::Kind::Stuck:
            case StepOutcome::Kind::Fault:
                out.kind = s.kind == StepOutcome::Kind::Stuck ? Outcome::Kind::Stuck : Outcome::Kind::Fault;
                out.reason = s.reason;
                out.value = cur;
                return out;
            case StepOutcome::Kind::Stepped:
                break;
        }
        if (n == budget) {
            out.kind = Outcome::Kind::BudgetExceeded;
            out.value = cur;
            return out;
        }
        if (observe) observe(n, s);
        cur = std::move(s.term);
    }
}

Outcome eval(Mode m, const TermPtr& e, std::size_t budget, const EvalConfig& cfg, Trace* trace) {
    if (!trace) return eval_observed(m, e, budget, cfg, nullptr);
    trace->initial = e;
    trace->steps.clear();
    return eval_observed(m, e, budget, cfg, [&](std::size_t, const StepOutcome& s) {
        trace->steps.push_back(TraceStep{s.rule_name(), s.path, s.term});
    });
}

}  // namespace lh

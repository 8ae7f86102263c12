#include "lh/typecheck.hpp"

#include <algorithm>
#include <set>

#include "lh/ops.hpp"
#include "lh/print.hpp"

namespace lh {

std::string_view type_error_kind_name(TypeErrorKind k) {
    switch (k) {
        case TypeErrorKind::NotSimilar: return "NotSimilar";
        case TypeErrorKind::IllFormedType: return "IllFormedType";
        case TypeErrorKind::IllFormedAnnotation: return "IllFormedAnnotation";
        case TypeErrorKind::UnboundVar: return "UnboundVar";
        case TypeErrorKind::NotAFunction: return "NotAFunction";
        case TypeErrorKind::OpArity: return "OpArity";
        case TypeErrorKind::PredicateNotBool: return "PredicateNotBool";
        case TypeErrorKind::SourceViolation: return "SourceViolation";
        case TypeErrorKind::TypeMismatch: return "TypeMismatch";
    }
    return "?";
}

std::string TypeError::message() const {
    return std::string(type_error_kind_name(kind)) + " at " + path + ": " + detail;
}

Context Context::extend(std::string x, TypePtr t) const {
    Context out = *this;
    out.bindings_.emplace_back(std::move(x), std::move(t));
    return out;
}

TypePtr Context::lookup(const std::string& x) const {
    for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it)
        if (it->first == x) return it->second;
    return nullptr;
}

bool similar(const Type& a, const Type& b) {
    if (a.is_refine() && b.is_refine()) return a.base == b.base;
    if (a.is_fun() && b.is_fun()) return similar(*a.dom, *b.dom) && similar(*a.cod, *b.cod);
    return false;
}

// ---------------------------------------------------------------------------

// Expected type: unknown, fully known, or a function whose codomain is
// expected (used to push expectations through applications).
struct Checker::Expect {
    TypePtr full;
    const Expect* cod = nullptr;
};

struct Checker::Fail {
    TypeError error;
};

class Checker::PathGuard {
public:
    PathGuard(Checker& c, std::string seg) : c_(c) { c_.path_.push_back(std::move(seg)); }
    ~PathGuard() { c_.path_.pop_back(); }
    PathGuard(const PathGuard&) = delete;
    PathGuard& operator=(const PathGuard&) = delete;

private:
    Checker& c_;
};

Checker::Checker(Mode m, CheckConfig cfg, bool source) : mode_(m), cfg_(std::move(cfg)), source_(source) {}

void Checker::fail(TypeErrorKind kind, std::string detail) const {
    std::string path = "$";
    for (const auto& s : path_) path += "." + s;
    throw Fail{TypeError{kind, std::move(path), std::move(detail)}};
}

TypeResult Checker::type_of(const Context& g, const TermPtr& e) {
    path_.clear();
    try {
        return TypeResult{check_expect(g, e, Expect{}), std::nullopt};
    } catch (const Fail& f) {
        return TypeResult{nullptr, f.error};
    }
}

TypeResult Checker::check(const Context& g, const TermPtr& e, const TypePtr& expected) {
    path_.clear();
    try {
        TypePtr t = check_expect(g, e, Expect{expected});
        return TypeResult{t ? t : expected, std::nullopt};
    } catch (const Fail& f) {
        return TypeResult{nullptr, f.error};
    }
}

std::optional<TypeError> Checker::wf_type(const TypePtr& t) {
    auto saved = std::move(path_);
    path_.clear();
    std::optional<TypeError> out;
    try {
        require_wf(t);
    } catch (const Fail& f) {
        out = f.error;
    }
    path_ = std::move(saved);
    return out;
}

std::optional<TypeError> Checker::wf_annotation(const Annotation& a, const TypePtr& t1, const TypePtr& t2) {
    auto saved = std::move(path_);
    path_.clear();
    std::optional<TypeError> out;
    try {
        require_ann(a, t1, t2);
    } catch (const Fail& f) {
        out = f.error;
    }
    path_ = std::move(saved);
    return out;
}

void Checker::require_wf(const TypePtr& t) {
    if (auto it = wf_cache_.find(t->id); it != wf_cache_.end()) {
        if (it->second) throw Fail{*it->second};
        return;
    }
    std::optional<TypeError> err;
    if (t->is_fun()) {
        try {
            require_wf(t->dom);
            require_wf(t->cod);
        } catch (const Fail& f) {
            err = f.error;
        }
    } else if (!t->is_raw()) {
        // Predicates are typed without the source restriction on constants.
        Checker inner(mode_, cfg_, false);
        inner.wf_cache_ = wf_cache_;
        Context g = Context{}.extend(t->binder, raw(t->base));
        TypeResult r = inner.check(g, t->pred, raw(BaseType::Bool));
        wf_cache_.insert(inner.wf_cache_.begin(), inner.wf_cache_.end());
        if (!r) err = TypeError{TypeErrorKind::PredicateNotBool, "", print(*t) + ": " + r.error->message()};
    }
    if (err) {
        if (err->path.empty()) {
            err->path = "$";
            for (const auto& s : path_) err->path += "." + s;
        }
        wf_cache_[t->id] = err;
        throw Fail{*err};
    }
    wf_cache_[t->id] = std::nullopt;
}

void Checker::require_ann(const Annotation& a, const TypePtr& t1, const TypePtr& t2) {
    require_wf(t1);
    require_wf(t2);
    if (!similar(*t1, *t2)) fail(TypeErrorKind::NotSimilar, print(*t1) + " and " + print(*t2));
    if (is_empty_ann(a)) return;
    if (auto* s = std::get_if<TypeSet>(&a)) {
        if (mode_ != Mode::Heedful)
            fail(TypeErrorKind::IllFormedAnnotation, "type sets only annotate heedful casts");
        for (const auto& t : *s) {
            require_wf(t);
            if (!similar(*t, *t1))
                fail(TypeErrorKind::IllFormedAnnotation, "type set member " + print(*t) + " is not similar to " +
                                                             print(*t1));
        }
        return;
    }
    if (mode_ != Mode::Eidetic) fail(TypeErrorKind::IllFormedAnnotation, "coercions only annotate eidetic casts");
    require_coercion(*std::get<CoercionPtr>(a), t1, t2);
}

void Checker::require_coercion(const Coercion& c, const TypePtr& t1, const TypePtr& t2) {
    if (c.is_refs()) {
        if (!t1->is_refine() || !t2->is_refine())
            fail(TypeErrorKind::IllFormedAnnotation, "refinement list on a function cast");
        require_reflist(c.refs(), t2, true);
        return;
    }
    if (!t1->is_fun() || !t2->is_fun())
        fail(TypeErrorKind::IllFormedAnnotation, "function coercion on a refinement cast");
    require_coercion(*c.fn().dom, t2->dom, t1->dom);
    require_coercion(*c.fn().cod, t1->cod, t2->cod);
}

void Checker::require_reflist(const RefList& r, const TypePtr& target, bool need_target) {
    std::set<std::uint32_t> seen;
    bool covered = false;
    for (const auto& e : r) {
        if (!e.ref->is_refine() || e.ref->base != target->base)
            fail(TypeErrorKind::IllFormedAnnotation, "list entry " + print(*e.ref) + " does not refine " +
                                                         std::string(base_name(target->base)));
        require_wf(e.ref);
        if (!seen.insert(e.ref->id).second)
            fail(TypeErrorKind::IllFormedAnnotation, "duplicate list entry " + print(*e.ref));
        if (implies(cfg_.eval.oracle, *e.ref, *target)) covered = true;
    }
    if (need_target && !covered)
        fail(TypeErrorKind::IllFormedAnnotation, "no list entry implies " + print(*target));
}

bool Checker::const_holds(const Value& k, const TypePtr& t) {
    auto key = std::make_pair(t->id, k);
    if (auto it = const_cache_.find(key); it != const_cache_.end()) return it->second;
    TermPtr p = subst(t->pred, t->binder, mk::lit(k));
    bool ok = true;
    Outcome o = eval(mode_, p, cfg_.budget, cfg_.eval);
    auto* c = o.kind == Outcome::Kind::Value ? o.value->as<Const>() : nullptr;
    if (!c || c->value != Value{true}) ok = false;
    const_cache_[key] = ok;
    return ok;
}

void Checker::require_const(const Value& k, const TypePtr& t) {
    if (!t->is_refine() || t->base != value_base(k))
        fail(TypeErrorKind::TypeMismatch, "constant " + value_text(k) + " cannot have type " + print(*t));
    if (t->is_raw()) return;
    if (source_)
        fail(TypeErrorKind::TypeMismatch, "source constant " + value_text(k) + " has a raw type, not " + print(*t));
    require_wf(t);
    if (!const_holds(k, t))
        fail(TypeErrorKind::TypeMismatch, "constant " + value_text(k) + " does not satisfy " + print(*t));
}

bool Checker::reaches(const TypePtr& t, const Value& k, const TermPtr& current) {
    auto key = std::make_pair(t->id, k);
    auto it = replay_cache_.find(key);
    if (it == replay_cache_.end()) {
        Trace tr;
        eval(mode_, subst(t->pred, t->binder, mk::lit(k)), cfg_.budget, cfg_.eval, &tr);
        it = replay_cache_.emplace(key, tr.terms()).first;
    }
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const TermPtr& s) { return alpha_eq(s, current); });
}

TypePtr Checker::check_expect(const Context& g, const TermPtr& e, const Expect& x) {
    TypePtr t = infer(g, e, x);
    if (!t) return x.full;
    if (x.full && t->id != x.full->id)
        fail(TypeErrorKind::TypeMismatch, "expected " + print(*x.full) + ", found " + print(*t));
    TypePtr u = t;
    for (const Expect* c = x.cod; c; c = c->cod) {
        if (!u->is_fun()) fail(TypeErrorKind::NotAFunction, "expected a function, found " + print(*u));
        u = u->cod;
        if (c->full && u->id != c->full->id)
            fail(TypeErrorKind::TypeMismatch, "expected result " + print(*c->full) + ", found " + print(*u));
        if (c->full) break;
    }
    return t;
}

TypePtr Checker::infer(const Context& g, const TermPtr& e, const Expect& x) {
    if (auto* v = e->as<Var>()) {
        TypePtr t = g.lookup(v->name);
        if (!t) fail(TypeErrorKind::UnboundVar, "unbound variable " + v->name);
        return t;
    }
    if (auto* c = e->as<Const>()) {
        if (x.full && x.full->is_refine() && !x.full->is_raw()) {
            require_const(c->value, x.full);
            return x.full;
        }
        return raw(value_base(c->value));
    }
    if (auto* a = e->as<Abs>()) {
        require_wf(a->ty);
        Expect body;
        if (x.full) {
            if (!x.full->is_fun()) fail(TypeErrorKind::TypeMismatch, "expected " + print(*x.full) + ", found a lambda");
            if (x.full->dom->id != a->ty->id)
                fail(TypeErrorKind::TypeMismatch,
                     "lambda binds " + print(*a->ty) + " where " + print(*x.full->dom) + " is expected");
            body.full = x.full->cod;
        } else if (x.cod) {
            body = *x.cod;
        }
        PathGuard pg(*this, "body");
        TypePtr bt = check_expect(g.extend(a->x, a->ty), a->body, body);
        return bt ? fun(a->ty, bt) : nullptr;
    }
    if (auto* ap = e->as<App>()) {
        Expect fx{nullptr, &x};
        TypePtr ft;
        {
            PathGuard pg(*this, "fn");
            ft = check_expect(g, ap->fn, fx);
        }
        PathGuard pg(*this, "arg");
        if (!ft) {
            check_expect(g, ap->arg, Expect{});
            return x.full;
        }
        if (!ft->is_fun()) fail(TypeErrorKind::NotAFunction, "applying a value of type " + print(*ft));
        check_expect(g, ap->arg, Expect{ft->dom});
        return ft->cod;
    }
    if (auto* o = e->as<Op>()) {
        const OpSignature* sig = find_op(o->name);
        if (!sig) fail(TypeErrorKind::OpArity, "unknown operation " + o->name);
        if (sig->params.size() != o->args.size())
            fail(TypeErrorKind::OpArity, o->name + " expects " + std::to_string(sig->params.size()) + " arguments");
        for (std::size_t i = 0; i < o->args.size(); ++i) {
            PathGuard pg(*this, "args[" + std::to_string(i) + "]");
            check_expect(g, o->args[i], Expect{sig->params[i]});
        }
        return sig->result;
    }
    if (auto* c = e->as<Cast>()) {
        require_ann(c->ann, c->src, c->tgt);
        PathGuard pg(*this, "subject");
        check_expect(g, c->subject, Expect{c->src});
        return c->tgt;
    }
    if (auto* c = e->as<Check>()) {
        if (!c->tgt->is_refine()) fail(TypeErrorKind::IllFormedType, "active check on a function type");
        require_wf(c->tgt);
        if (value_base(c->k) != c->tgt->base)
            fail(TypeErrorKind::TypeMismatch, "scrutinee " + value_text(c->k) + " is not of base " +
                                                  std::string(base_name(c->tgt->base)));
        {
            PathGuard pg(*this, "current");
            check_expect(g, c->current, Expect{raw(BaseType::Bool)});
        }
        if (!reaches(c->tgt, c->k, c->current))
            fail(TypeErrorKind::TypeMismatch, "checking term " + print(*c->current) + " is not reachable from " +
                                                  print(*c->tgt) + " on " + value_text(c->k));
        return c->tgt;
    }
    if (e->is<Blame>()) return nullptr;
    if (auto* s = e->as<Stack>()) {
        if (!s->tgt->is_refine()) fail(TypeErrorKind::IllFormedType, "coercion stack on a function type");
        require_wf(s->tgt);
        if (value_base(s->k) != s->tgt->base)
            fail(TypeErrorKind::TypeMismatch, "scrutinee " + value_text(s->k) + " is not of base " +
                                                  std::string(base_name(s->tgt->base)));
        require_reflist(s->pending, s->tgt, s->status == Status::Unchecked);
        PathGuard pg(*this, "current");
        auto* chk = s->current->as<Check>();
        if (auto* k = s->current->as<Const>()) {
            if (k->value != s->k) fail(TypeErrorKind::TypeMismatch, "checking term differs from the scrutinee");
        } else if (chk) {
            if (chk->k != s->k) fail(TypeErrorKind::TypeMismatch, "active check on a different scrutinee");
            if (chk->tgt->base != s->tgt->base)
                fail(TypeErrorKind::TypeMismatch, "active check at a different base type");
            check_expect(g, s->current, Expect{});
        } else if (!s->current->is<Blame>()) {
            fail(TypeErrorKind::TypeMismatch, "checking term must be the scrutinee, an active check or blame");
        }
        if (s->status == Status::Checked) {
            bool current_target = chk && implies(cfg_.eval.oracle, *chk->tgt, *s->tgt);
            if (!current_target && !s->current->is<Blame>() && !const_holds(s->k, s->tgt))
                fail(TypeErrorKind::TypeMismatch, "checked status but " + value_text(s->k) + " does not satisfy " +
                                                      print(*s->tgt));
        }
        return s->tgt;
    }
    if (auto* c = e->as<Cond>()) {
        TypePtr gt;
        {
            PathGuard pg(*this, "guard");
            gt = check_expect(g, c->guard, Expect{});
        }
        if (gt && (!gt->is_refine() || gt->base != BaseType::Bool))
            fail(TypeErrorKind::TypeMismatch, "condition of type " + print(*gt));
        // A constant branch only synthesizes its raw type, so when the first
        // branch disagrees, retry with the other branch's type as expectation.
        TypePtr t1, t2;
        try {
            PathGuard pg(*this, "then");
            t1 = check_expect(g, c->then_branch, x);
        } catch (const Fail&) {
            if (x.full) throw;
            {
                PathGuard pg(*this, "else");
                t2 = check_expect(g, c->else_branch, x);
            }
            PathGuard pg(*this, "then");
            check_expect(g, c->then_branch, Expect{t2, x.cod});
            return t2;
        }
        PathGuard pg(*this, "else");
        if (!t1) return check_expect(g, c->else_branch, x);
        try {
            check_expect(g, c->else_branch, Expect{t1});
            return t1;
        } catch (const Fail&) {
            if (x.full) throw;
        }
        t2 = check_expect(g, c->else_branch, x);
        if (t2) {
            PathGuard then_pg(*this, "then");
            check_expect(g, c->then_branch, Expect{t2});
        }
        return t2;
    }
    auto& f = std::get<Fix>(e->node);
    require_wf(f.ty);
    PathGuard pg(*this, "body");
    check_expect(g.extend(f.x, f.ty), f.body, Expect{f.ty});
    return f.ty;
}

// ---------------------------------------------------------------------------

std::optional<TypeError> wf_type(Mode m, const TypePtr& t, const CheckConfig& cfg) {
    return Checker(m, cfg).wf_type(t);
}

std::optional<TypeError> wf_annotation(Mode m, const Annotation& a, const TypePtr& t1, const TypePtr& t2,
                                       const CheckConfig& cfg) {
    return Checker(m, cfg).wf_annotation(a, t1, t2);
}

TypeResult type_of(Mode m, const Context& g, const TermPtr& e, const CheckConfig& cfg) {
    return Checker(m, cfg).type_of(g, e);
}

namespace {

std::optional<TypeError> violation_at(const Term& e, std::vector<std::string>& path) {
    auto at = [&](std::string detail) {
        std::string p = "$";
        for (const auto& s : path) p += "." + s;
        return TypeError{TypeErrorKind::SourceViolation, std::move(p), std::move(detail)};
    };
    auto sub = [&](const TermPtr& t, std::string seg) {
        path.push_back(std::move(seg));
        auto r = violation_at(*t, path);
        path.pop_back();
        return r;
    };
    if (e.is<Check>()) return at("active checks are runtime-only");
    if (e.is<Stack>()) return at("coercion stacks are runtime-only");
    if (e.is<Blame>()) return at("blame is runtime-only");
    if (auto* c = e.as<Cast>()) {
        if (!is_empty_ann(c->ann)) return at("source casts carry no annotation");
        if (c->label.empty()) return at("source casts need a blame label");
        return sub(c->subject, "subject");
    }
    if (auto* a = e.as<Abs>()) return sub(a->body, "body");
    if (auto* f = e.as<Fix>()) return sub(f->body, "body");
    if (auto* a = e.as<App>()) {
        if (auto r = sub(a->fn, "fn")) return r;
        return sub(a->arg, "arg");
    }
    if (auto* o = e.as<Op>()) {
        for (std::size_t i = 0; i < o->args.size(); ++i)
            if (auto r = sub(o->args[i], "args[" + std::to_string(i) + "]")) return r;
        return std::nullopt;
    }
    if (auto* c = e.as<Cond>()) {
        if (auto r = sub(c->guard, "guard")) return r;
        if (auto r = sub(c->then_branch, "then")) return r;
        return sub(c->else_branch, "else");
    }
    return std::nullopt;
}

TypeResult check_source_against(const TermPtr& e, const TypePtr& expected, const CheckConfig& cfg) {
    if (auto v = source_violation(e)) return TypeResult{nullptr, v};
    TypePtr first;
    for (Mode m : kAllModes) {
        Checker c(m, cfg, true);
        TypeResult r = expected ? c.check(Context{}, e, expected) : c.type_of(Context{}, e);
        if (!r) {
            r.error->detail = std::string(mode_name(m)) + ": " + r.error->detail;
            return r;
        }
        if (!first) {
            first = r.type;
        } else if (!r.type || r.type->id != first->id) {
            return TypeResult{nullptr, TypeError{TypeErrorKind::TypeMismatch, "$",
                                                 "modes disagree: " + print(*first) + " vs " +
                                                     (r.type ? print(*r.type) : std::string("?"))}};
        }
    }
    return TypeResult{first, std::nullopt};
}

}  // namespace

std::optional<TypeError> source_violation(const TermPtr& e) {
    std::vector<std::string> path;
    return violation_at(*e, path);
}

TypeResult check_source(const TermPtr& e, const CheckConfig& cfg) { return check_source_against(e, nullptr, cfg); }

TypeResult check_file(const SourceFile& f, const CheckConfig& cfg) {
    for (const auto& d : f.decls) {
        if (!d.annot) continue;
        TypeResult r = check_source_against(d.body, d.annot, cfg);
        if (!r) {
            r.error->path = d.name + r.error->path.substr(1);
            return r;
        }
    }
    return check_source(f.main, cfg);
}

}  // namespace lh

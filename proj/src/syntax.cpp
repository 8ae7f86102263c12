#include "lh/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "lh/print.hpp"

namespace lh {

std::string_view mode_name(Mode m) {
    switch (m) {
        case Mode::Classic: return "classic";
        case Mode::Forgetful: return "forgetful";
        case Mode::Heedful: return "heedful";
        case Mode::Eidetic: return "eidetic";
    }
    return "?";
}

std::string_view mode_letter(Mode m) {
    switch (m) {
        case Mode::Classic: return "C";
        case Mode::Forgetful: return "F";
        case Mode::Heedful: return "H";
        case Mode::Eidetic: return "E";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (Mode m : kAllModes) {
        std::string letter(mode_letter(m));
        letter[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(letter[0])));
        if (lower == mode_name(m) || lower == letter) return m;
    }
    return std::nullopt;
}

std::string_view base_name(BaseType b) { return b == BaseType::Bool ? "Bool" : "Int"; }

BaseType value_base(const Value& v) {
    return std::holds_alternative<bool>(v) ? BaseType::Bool : BaseType::Int;
}

std::string value_text(const Value& v) {
    if (auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    return std::to_string(std::get<std::int64_t>(v));
}

// ---------------------------------------------------------------------------
// Type interning

namespace {

using IdSet = std::vector<std::uint32_t>;
using IdSetPtr = std::shared_ptr<const IdSet>;

struct TypeRegistry {
    std::mutex mu;
    std::unordered_map<std::string, std::uint32_t> ids;
    std::vector<TypePtr> reps;
};

TypeRegistry& registry() {
    static TypeRegistry r;
    return r;
}

const IdSetPtr& empty_ids() {
    static const IdSetPtr e = std::make_shared<const IdSet>();
    return e;
}

IdSet merge_ids(const IdSet& a, const IdSet& b) {
    IdSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// In-place union that keeps sharing an operand when it already covers the other.
void unite_into(IdSetPtr& a, const IdSetPtr& b) {
    if (b->empty() || a == b) return;
    if (a->empty()) {
        a = b;
        return;
    }
    if (a->size() >= b->size() && std::includes(a->begin(), a->end(), b->begin(), b->end())) return;
    if (b->size() > a->size() && std::includes(b->begin(), b->end(), a->begin(), a->end())) {
        a = b;
        return;
    }
    a = std::make_shared<const IdSet>(merge_ids(*a, *b));
}

void unite_into(IdSetPtr& a, const IdSet& b) {
    if (b.empty() || std::includes(a->begin(), a->end(), b.begin(), b.end())) return;
    a = std::make_shared<const IdSet>(merge_ids(*a, b));
}

// Assigns the intern id, fills `parts` and publishes new representatives.
template <class Parts>
TypePtr finish_type(std::shared_ptr<Type> t, Parts parts) {
    auto& reg = registry();
    std::lock_guard lock(reg.mu);
    auto it = reg.ids.find(t->key);
    bool fresh = it == reg.ids.end();
    t->id = fresh ? static_cast<std::uint32_t>(reg.reps.size()) : it->second;
    t->parts = parts(*t);
    if (fresh) {
        reg.ids.emplace(t->key, t->id);
        reg.reps.push_back(t);
    }
    return t;
}

}  // namespace

bool Type::is_raw() const {
    if (kind != Kind::Refine) return false;
    auto* c = pred->as<Const>();
    return c && std::holds_alternative<bool>(c->value) && std::get<bool>(c->value);
}

TypePtr refine(std::string binder, BaseType base, TermPtr pred) {
    auto t = std::make_shared<Type>();
    t->kind = Type::Kind::Refine;
    t->binder = std::move(binder);
    t->base = base;
    t->pred = std::move(pred);
    t->height = 1;
    t->key = "{#0:" + std::string(base_name(base)) + "|" + canonical_pred_text(*t->pred, t->binder) + "}";
    return finish_type(t, [](const Type& u) { return merge_ids(IdSet{u.id}, *u.pred->info.types); });
}

TypePtr fun(TypePtr dom, TypePtr cod) {
    auto t = std::make_shared<Type>();
    t->kind = Type::Kind::Fun;
    t->height = 1 + std::max(dom->height, cod->height);
    t->key = (dom->is_fun() ? "(" + dom->key + ")" : dom->key) + " -> " + cod->key;
    t->dom = std::move(dom);
    t->cod = std::move(cod);
    return finish_type(t, [](const Type& u) { return merge_ids(merge_ids(IdSet{u.id}, u.dom->parts), u.cod->parts); });
}

TypePtr raw(BaseType base) {
    return refine(base == BaseType::Bool ? "b" : "x", base, mk::boolean(true));
}

TypePtr type_by_id(std::uint32_t id) {
    auto& reg = registry();
    std::lock_guard lock(reg.mu);
    return reg.reps.at(id);
}

// ---------------------------------------------------------------------------
// TypeSet

namespace {
bool key_less(const TypePtr& a, const TypePtr& b) { return a->key < b->key; }
}  // namespace

TypeSet::TypeSet(std::initializer_list<TypePtr> ts) {
    for (const auto& t : ts) insert(t);
}

bool TypeSet::insert(const TypePtr& t) {
    auto it = std::lower_bound(items_.begin(), items_.end(), t, key_less);
    if (it != items_.end() && (*it)->id == t->id) return false;
    items_.insert(it, t);
    return true;
}

bool TypeSet::erase(const Type& t) {
    auto it = std::find_if(items_.begin(), items_.end(), [&](const TypePtr& u) { return u->id == t.id; });
    if (it == items_.end()) return false;
    items_.erase(it);
    return true;
}

bool TypeSet::contains(const Type& t) const {
    return std::any_of(items_.begin(), items_.end(), [&](const TypePtr& u) { return u->id == t.id; });
}

TypeSet TypeSet::unite(const TypeSet& other) const {
    TypeSet out = *this;
    for (const auto& t : other.items_) out.insert(t);
    return out;
}

TypeSet TypeSet::without(const Type& t) const {
    TypeSet out = *this;
    out.erase(t);
    return out;
}

bool TypeSet::subset_of(const TypeSet& other) const {
    return std::all_of(items_.begin(), items_.end(), [&](const TypePtr& t) { return other.contains(*t); });
}

bool TypeSet::operator==(const TypeSet& o) const {
    if (items_.size() != o.items_.size()) return false;
    for (std::size_t i = 0; i < items_.size(); ++i)
        if (items_[i]->id != o.items_[i]->id) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Coercions

CoercionPtr coercion_refs(RefList r) { return std::make_shared<const Coercion>(Coercion{std::move(r)}); }

CoercionPtr coercion_fun(CoercionPtr dom, CoercionPtr cod) {
    return std::make_shared<const Coercion>(Coercion{FunCoercion{std::move(dom), std::move(cod)}});
}

namespace {

std::size_t max_reflist(const Coercion& c) {
    if (c.is_refs()) return c.refs().size();
    return std::max(max_reflist(*c.fn().dom), max_reflist(*c.fn().cod));
}

void coercion_ids(const Coercion& c, IdSet& out) {
    if (c.is_refs()) {
        for (const auto& e : c.refs()) out = merge_ids(out, e.ref->parts);
    } else {
        coercion_ids(*c.fn().dom, out);
        coercion_ids(*c.fn().cod, out);
    }
}

IdSet annotation_ids(const Annotation& a) {
    IdSet out;
    if (auto* s = std::get_if<TypeSet>(&a)) {
        for (const auto& t : *s) out = merge_ids(out, t->parts);
    } else if (auto* c = std::get_if<CoercionPtr>(&a)) {
        coercion_ids(**c, out);
    }
    return out;
}

IdSet reflist_ids(const RefList& r) {
    IdSet out;
    for (const auto& e : r) out = merge_ids(out, e.ref->parts);
    return out;
}

void add_free(std::vector<std::string>& acc, const std::vector<std::string>& more) {
    if (more.empty()) return;
    if (acc.empty()) {
        acc = more;
        return;
    }
    std::vector<std::string> out;
    std::set_union(acc.begin(), acc.end(), more.begin(), more.end(), std::back_inserter(out));
    acc.swap(out);
}

void remove_free(std::vector<std::string>& acc, const std::string& x) {
    auto it = std::lower_bound(acc.begin(), acc.end(), x);
    if (it != acc.end() && *it == x) acc.erase(it);
}

void absorb_child(TermInfo& info, const TermPtr& child) {
    add_free(info.free, child->info.free);
    info.size += child->info.size;
    info.pending += child->info.pending;
    info.chain_max = std::max(info.chain_max, child->info.chain_max);
    info.wrap_max = std::max(info.wrap_max, child->info.wrap_max);
    info.reflist_max = std::max(info.reflist_max, child->info.reflist_max);
    unite_into(info.types, child->info.types);
}

TermInfo compute_info(const TermNode& node) {
    TermInfo info;
    info.types = empty_ids();
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Var>) {
                info.free.push_back(n.name);
            } else if constexpr (std::is_same_v<N, Const> || std::is_same_v<N, Blame>) {
            } else if constexpr (std::is_same_v<N, Abs> || std::is_same_v<N, Fix>) {
                absorb_child(info, n.body);
                remove_free(info.free, n.x);
                unite_into(info.types, n.ty->parts);
            } else if constexpr (std::is_same_v<N, App>) {
                absorb_child(info, n.fn);
                absorb_child(info, n.arg);
            } else if constexpr (std::is_same_v<N, Op>) {
                for (const auto& a : n.args) absorb_child(info, a);
            } else if constexpr (std::is_same_v<N, Cast>) {
                absorb_child(info, n.subject);
                info.pending += 1;
                const auto& sub = n.subject->info;
                info.chain_top = 1 + (n.subject->template is<Cast>() ? sub.chain_top : 0);
                if (n.subject->template is<Abs>())
                    info.wrap_top = 1;
                else if (n.subject->template is<Cast>() && sub.wrap_top > 0)
                    info.wrap_top = 1 + sub.wrap_top;
                info.chain_max = std::max(info.chain_max, info.chain_top);
                info.wrap_max = std::max(info.wrap_max, info.wrap_top);
                if (auto* c = std::get_if<CoercionPtr>(&n.ann))
                    info.reflist_max = std::max(info.reflist_max, max_reflist(**c));
                unite_into(info.types, n.src->parts);
                unite_into(info.types, n.tgt->parts);
                unite_into(info.types, annotation_ids(n.ann));
            } else if constexpr (std::is_same_v<N, Check>) {
                absorb_child(info, n.current);
                info.pending += 1;
                unite_into(info.types, n.tgt->parts);
            } else if constexpr (std::is_same_v<N, Stack>) {
                absorb_child(info, n.current);
                info.pending += 1;
                info.reflist_max = std::max(info.reflist_max, n.pending.size());
                unite_into(info.types, n.tgt->parts);
                unite_into(info.types, reflist_ids(n.pending));
            } else if constexpr (std::is_same_v<N, Cond>) {
                absorb_child(info, n.guard);
                absorb_child(info, n.then_branch);
                absorb_child(info, n.else_branch);
            }
        },
        node);
    return info;
}

}  // namespace

namespace {

// Evaluation frees and reallocates a whole spine of same-sized nodes per
// step; a per-thread free list keeps that off the general allocator. The
// list is never destroyed, since static terms outlive thread-local storage.
struct FreeList {
    std::vector<void*> blocks;
};

template <class T>
struct NodeAllocator {
    using value_type = T;
    NodeAllocator() = default;
    template <class U>
    NodeAllocator(const NodeAllocator<U>&) {}

    static FreeList& free_list() {
        thread_local FreeList* fl = new FreeList;
        return *fl;
    }
    T* allocate(std::size_t n) {
        auto& fl = free_list();
        if (n == 1 && !fl.blocks.empty()) {
            void* p = fl.blocks.back();
            fl.blocks.pop_back();
            return static_cast<T*>(p);
        }
        return static_cast<T*>(::operator new(n * sizeof(T)));
    }
    void deallocate(T* p, std::size_t n) {
        if (n == 1) {
            free_list().blocks.push_back(p);
            return;
        }
        ::operator delete(p, n * sizeof(T));
    }
    template <class U>
    bool operator==(const NodeAllocator<U>&) const {
        return true;
    }
};

}  // namespace

TermPtr make_term(TermNode node) {
    auto t = std::allocate_shared<Term>(NodeAllocator<Term>());
    t->info = compute_info(node);
    t->node = std::move(node);
    return t;
}

namespace mk {
TermPtr var(std::string name) { return make_term(Var{std::move(name)}); }
TermPtr lit(Value v) { return make_term(Const{v}); }
TermPtr boolean(bool b) { return make_term(Const{Value{b}}); }
TermPtr integer(std::int64_t n) { return make_term(Const{Value{n}}); }
TermPtr abs(std::string x, TypePtr ty, TermPtr body) {
    return make_term(Abs{std::move(x), std::move(ty), std::move(body)});
}
TermPtr app(TermPtr fn, TermPtr arg) { return make_term(App{std::move(fn), std::move(arg)}); }
TermPtr op(std::string name, std::vector<TermPtr> args) { return make_term(Op{std::move(name), std::move(args)}); }
TermPtr cast(TypePtr src, TypePtr tgt, Label label, TermPtr subject) {
    return make_term(Cast{std::move(src), EmptyAnn{}, std::move(tgt), std::move(label), std::move(subject)});
}
TermPtr cast(TypePtr src, Annotation ann, TypePtr tgt, Label label, TermPtr subject) {
    return make_term(Cast{std::move(src), std::move(ann), std::move(tgt), std::move(label), std::move(subject)});
}
TermPtr check(TypePtr tgt, TermPtr current, Value k, Label label) {
    return make_term(Check{std::move(tgt), std::move(current), k, std::move(label)});
}
TermPtr blame(Label label) { return make_term(Blame{std::move(label)}); }
TermPtr stack(TypePtr tgt, Status s, RefList pending, Value k, TermPtr current) {
    return make_term(Stack{std::move(tgt), s, std::move(pending), k, std::move(current)});
}
TermPtr cond(TermPtr g, TermPtr a, TermPtr b) { return make_term(Cond{std::move(g), std::move(a), std::move(b)}); }
TermPtr fix(std::string x, TypePtr ty, TermPtr body) {
    return make_term(Fix{std::move(x), std::move(ty), std::move(body)});
}
}  // namespace mk

// ---------------------------------------------------------------------------
// Substitution

bool is_free_in(const std::string& x, const Term& e) {
    return std::binary_search(e.info.free.begin(), e.info.free.end(), x);
}

std::string fresh_name(const std::string& base, const std::vector<std::string>& avoid) {
    std::string name = base + "'";
    while (std::find(avoid.begin(), avoid.end(), name) != avoid.end()) name += "'";
    return name;
}

namespace {

// Renames binder `x` of a body when it would capture a free variable of `v`.
std::pair<std::string, TermPtr> open_binder(const std::string& x, const TermPtr& body, const std::string& target,
                                            const TermPtr& v) {
    if (!is_free_in(x, *v)) return {x, body};
    std::vector<std::string> avoid = v->info.free;
    avoid.insert(avoid.end(), body->info.free.begin(), body->info.free.end());
    avoid.push_back(target);
    std::string y = fresh_name(x, avoid);
    return {y, subst(body, x, mk::var(y))};
}

}  // namespace

TermPtr subst(const TermPtr& e, const std::string& x, const TermPtr& v) {
    if (!is_free_in(x, *e)) return e;
    return std::visit(
        [&](const auto& n) -> TermPtr {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Var>) {
                return v;
            } else if constexpr (std::is_same_v<N, Abs> || std::is_same_v<N, Fix>) {
                auto [y, body] = open_binder(n.x, n.body, x, v);
                auto nb = subst(body, x, v);
                if constexpr (std::is_same_v<N, Abs>)
                    return mk::abs(y, n.ty, nb);
                else
                    return mk::fix(y, n.ty, nb);
            } else if constexpr (std::is_same_v<N, App>) {
                return mk::app(subst(n.fn, x, v), subst(n.arg, x, v));
            } else if constexpr (std::is_same_v<N, Op>) {
                std::vector<TermPtr> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args) args.push_back(subst(a, x, v));
                return mk::op(n.name, std::move(args));
            } else if constexpr (std::is_same_v<N, Cast>) {
                return mk::cast(n.src, n.ann, n.tgt, n.label, subst(n.subject, x, v));
            } else if constexpr (std::is_same_v<N, Check>) {
                return mk::check(n.tgt, subst(n.current, x, v), n.k, n.label);
            } else if constexpr (std::is_same_v<N, Stack>) {
                return mk::stack(n.tgt, n.status, n.pending, n.k, subst(n.current, x, v));
            } else if constexpr (std::is_same_v<N, Cond>) {
                return mk::cond(subst(n.guard, x, v), subst(n.then_branch, x, v), subst(n.else_branch, x, v));
            } else {
                return e;  // Const, Blame: no free variables
            }
        },
        e->node);
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

namespace {

using Scope = std::vector<std::string>;

long lookup(const Scope& s, const std::string& x) {
    for (std::size_t i = s.size(); i-- > 0;)
        if (s[i] == x) return static_cast<long>(i);
    return -1;
}

bool reflist_eq(const RefList& a, const RefList& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].ref->id != b[i].ref->id || a[i].label != b[i].label) return false;
    return true;
}

bool alpha_rec(const Term& a, const Term& b, Scope& sa, Scope& sb) {
    if (&a == &b && a.closed()) return true;
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using N = std::decay_t<decltype(na)>;
            const auto& nb = std::get<N>(b.node);
            if constexpr (std::is_same_v<N, Var>) {
                long ia = lookup(sa, na.name), ib = lookup(sb, nb.name);
                if (ia < 0 && ib < 0) return na.name == nb.name;
                return ia == ib;
            } else if constexpr (std::is_same_v<N, Const>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<N, Abs> || std::is_same_v<N, Fix>) {
                if (na.ty->id != nb.ty->id) return false;
                sa.push_back(na.x);
                sb.push_back(nb.x);
                bool ok = alpha_rec(*na.body, *nb.body, sa, sb);
                sa.pop_back();
                sb.pop_back();
                return ok;
            } else if constexpr (std::is_same_v<N, App>) {
                return alpha_rec(*na.fn, *nb.fn, sa, sb) && alpha_rec(*na.arg, *nb.arg, sa, sb);
            } else if constexpr (std::is_same_v<N, Op>) {
                if (na.name != nb.name || na.args.size() != nb.args.size()) return false;
                for (std::size_t i = 0; i < na.args.size(); ++i)
                    if (!alpha_rec(*na.args[i], *nb.args[i], sa, sb)) return false;
                return true;
            } else if constexpr (std::is_same_v<N, Cast>) {
                return na.src->id == nb.src->id && na.tgt->id == nb.tgt->id && na.label == nb.label &&
                       ann_eq(na.ann, nb.ann) && alpha_rec(*na.subject, *nb.subject, sa, sb);
            } else if constexpr (std::is_same_v<N, Check>) {
                return na.tgt->id == nb.tgt->id && na.k == nb.k && na.label == nb.label &&
                       alpha_rec(*na.current, *nb.current, sa, sb);
            } else if constexpr (std::is_same_v<N, Blame>) {
                return na.label == nb.label;
            } else if constexpr (std::is_same_v<N, Stack>) {
                return na.tgt->id == nb.tgt->id && na.status == nb.status && na.k == nb.k &&
                       reflist_eq(na.pending, nb.pending) && alpha_rec(*na.current, *nb.current, sa, sb);
            } else {
                static_assert(std::is_same_v<N, Cond>);
                return alpha_rec(*na.guard, *nb.guard, sa, sb) && alpha_rec(*na.then_branch, *nb.then_branch, sa, sb) &&
                       alpha_rec(*na.else_branch, *nb.else_branch, sa, sb);
            }
        },
        a.node);
}

}  // namespace

bool alpha_eq(const Term& a, const Term& b) {
    Scope sa, sb;
    return alpha_rec(a, b, sa, sb);
}

bool alpha_eq(const Type& a, const Type& b) { return a.id == b.id; }
bool alpha_eq(const TermPtr& a, const TermPtr& b) { return alpha_eq(*a, *b); }
bool alpha_eq(const TypePtr& a, const TypePtr& b) { return a->id == b->id; }

bool coercion_eq(const Coercion& a, const Coercion& b) {
    if (a.is_refs() != b.is_refs()) return false;
    if (a.is_refs()) return reflist_eq(a.refs(), b.refs());
    return coercion_eq(*a.fn().dom, *b.fn().dom) && coercion_eq(*a.fn().cod, *b.fn().cod);
}

bool ann_eq(const Annotation& a, const Annotation& b) {
    if (a.index() != b.index()) return false;
    if (auto* s = std::get_if<TypeSet>(&a)) return *s == std::get<TypeSet>(b);
    if (auto* c = std::get_if<CoercionPtr>(&a)) return coercion_eq(**c, *std::get<CoercionPtr>(b));
    return true;
}

// ---------------------------------------------------------------------------
// Measures

namespace {
TypeSet from_ids(const IdSet& ids) {
    TypeSet out;
    for (auto id : ids) out.insert(type_by_id(id));
    return out;
}
}  // namespace

TypeSet types_of(const Term& e) { return from_ids(*e.info.types); }
TypeSet types_of(const Type& t) { return from_ids(t.parts); }
TypeSet types_of(const Annotation& a) { return from_ids(annotation_ids(a)); }
TypeSet types_of(const Coercion& c) {
    IdSet ids;
    coercion_ids(c, ids);
    return from_ids(ids);
}

int height(const Type& t) { return t.height; }
std::size_t term_size(const Term& e) { return e.info.size; }

namespace std_types {
namespace {
TypePtr int_pred(TermPtr pred) { return refine("x", BaseType::Int, std::move(pred)); }
TermPtr x() { return mk::var("x"); }
}  // namespace

TypePtr any() {
    static const TypePtr t = raw(BaseType::Int);
    return t;
}
TypePtr nat() {
    static const TypePtr t = int_pred(mk::op(">=", {x(), mk::integer(0)}));
    return t;
}
TypePtr even() {
    static const TypePtr t =
        int_pred(mk::op("=", {mk::op("mod", {x(), mk::integer(2)}), mk::integer(0)}));
    return t;
}
TypePtr nz() {
    static const TypePtr t = int_pred(mk::op("<>", {x(), mk::integer(0)}));
    return t;
}
TypePtr boolean() {
    static const TypePtr t = raw(BaseType::Bool);
    return t;
}
}  // namespace std_types

}  // namespace lh

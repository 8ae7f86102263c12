#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lh {

enum class Mode { Classic, Forgetful, Heedful, Eidetic };

inline constexpr std::array<Mode, 4> kAllModes{Mode::Classic, Mode::Forgetful, Mode::Heedful,
                                               Mode::Eidetic};

std::string_view mode_name(Mode m);
std::string_view mode_letter(Mode m);
// Accepts full names ("eidetic") and single letters ("E"), case-insensitive.
std::optional<Mode> parse_mode(std::string_view s);

// A blame label. The empty name stands for the eidetic "no label" marker.
struct Label {
    std::string name;

    static Label named(std::string n) { return Label{std::move(n)}; }
    static Label none() { return Label{}; }
    bool empty() const { return name.empty(); }
    bool operator==(const Label&) const = default;
};

enum class BaseType { Bool, Int };
std::string_view base_name(BaseType b);

enum class Status { Checked, Unchecked };

using Value = std::variant<bool, std::int64_t>;
BaseType value_base(const Value& v);
std::string value_text(const Value& v);

struct Term;
struct Type;
struct Coercion;
using TermPtr = std::shared_ptr<const Term>;
using TypePtr = std::shared_ptr<const Type>;
using CoercionPtr = std::shared_ptr<const Coercion>;

// Types are closed and immutable. Each carries its alpha-normal printed form
// (`key`), which doubles as the canonical order for type sets, plus an
// intern id shared by all alpha-equivalent types.
struct Type {
    enum class Kind { Refine, Fun };

    Kind kind;
    std::string binder;  // Refine only
    BaseType base{};     // Refine only
    TermPtr pred;        // Refine only
    TypePtr dom, cod;    // Fun only

    std::string key;
    std::uint32_t id = 0;
    int height = 1;
    // Sorted intern ids of this type, its structural subparts and the types
    // mentioned inside refinement predicates.
    std::vector<std::uint32_t> parts;

    bool is_refine() const { return kind == Kind::Refine; }
    bool is_fun() const { return kind == Kind::Fun; }
    // {x:B|true}
    bool is_raw() const;
};

TypePtr refine(std::string binder, BaseType base, TermPtr pred);
TypePtr fun(TypePtr dom, TypePtr cod);
TypePtr raw(BaseType base);
// Representative type for an intern id.
TypePtr type_by_id(std::uint32_t id);

// Canonically ordered, duplicate-free set of types (modulo alpha).
class TypeSet {
public:
    TypeSet() = default;
    TypeSet(std::initializer_list<TypePtr> ts);

    bool insert(const TypePtr& t);
    bool erase(const Type& t);
    bool contains(const Type& t) const;
    TypeSet unite(const TypeSet& other) const;
    TypeSet without(const Type& t) const;
    bool subset_of(const TypeSet& other) const;

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const TypePtr& front() const { return items_.front(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    const std::vector<TypePtr>& items() const { return items_; }

    bool operator==(const TypeSet& o) const;

private:
    std::vector<TypePtr> items_;
};

struct RefEntry {
    TypePtr ref;
    Label label;
};
using RefList = std::vector<RefEntry>;

struct FunCoercion {
    CoercionPtr dom, cod;
};

struct Coercion {
    std::variant<RefList, FunCoercion> node;

    bool is_refs() const { return std::holds_alternative<RefList>(node); }
    const RefList& refs() const { return std::get<RefList>(node); }
    const FunCoercion& fn() const { return std::get<FunCoercion>(node); }
};

CoercionPtr coercion_refs(RefList r);
CoercionPtr coercion_fun(CoercionPtr dom, CoercionPtr cod);

struct EmptyAnn {
    bool operator==(const EmptyAnn&) const = default;
};
using Annotation = std::variant<EmptyAnn, TypeSet, CoercionPtr>;

inline bool is_empty_ann(const Annotation& a) { return std::holds_alternative<EmptyAnn>(a); }

// Term node payloads.
struct Var {
    std::string name;
};
struct Const {
    Value value;
};
struct Abs {
    std::string x;
    TypePtr ty;
    TermPtr body;
};
struct App {
    TermPtr fn, arg;
};
struct Op {
    std::string name;
    std::vector<TermPtr> args;
};
struct Cast {
    TypePtr src;
    Annotation ann;
    TypePtr tgt;
    Label label;
    TermPtr subject;
};
struct Check {
    TypePtr tgt;
    TermPtr current;
    Value k;
    Label label;
};
struct Blame {
    Label label;
};
struct Stack {
    TypePtr tgt;
    Status status;
    RefList pending;
    Value k;
    TermPtr current;
};
struct Cond {
    TermPtr guard, then_branch, else_branch;
};
struct Fix {
    std::string x;
    TypePtr ty;
    TermPtr body;
};

using TermNode = std::variant<Var, Const, Abs, App, Op, Cast, Check, Blame, Stack, Cond, Fix>;

// Structural summary cached on every node at construction; terms are built
// bottom-up and never mutated, so these stay exact.
struct TermInfo {
    std::vector<std::string> free;  // sorted free variables
    std::size_t size = 1;
    std::size_t pending = 0;
    std::size_t chain_top = 0;  // casts stacked at this node
    std::size_t chain_max = 0;
    std::size_t wrap_top = 0;  // casts stacked directly on a lambda, ending here
    std::size_t wrap_max = 0;
    std::size_t reflist_max = 0;
    std::shared_ptr<const std::vector<std::uint32_t>> types;  // sorted intern ids
};

struct Term {
    TermNode node;
    TermInfo info;

    template <class T>
    const T* as() const {
        return std::get_if<T>(&node);
    }
    template <class T>
    bool is() const {
        return std::holds_alternative<T>(node);
    }
    bool closed() const { return info.free.empty(); }
};

TermPtr make_term(TermNode node);

namespace mk {
TermPtr var(std::string name);
TermPtr lit(Value v);
TermPtr boolean(bool b);
TermPtr integer(std::int64_t n);
TermPtr abs(std::string x, TypePtr ty, TermPtr body);
TermPtr app(TermPtr fn, TermPtr arg);
TermPtr op(std::string name, std::vector<TermPtr> args);
TermPtr cast(TypePtr src, TypePtr tgt, Label label, TermPtr subject);
TermPtr cast(TypePtr src, Annotation ann, TypePtr tgt, Label label, TermPtr subject);
TermPtr check(TypePtr tgt, TermPtr current, Value k, Label label);
TermPtr blame(Label label);
TermPtr stack(TypePtr tgt, Status s, RefList pending, Value k, TermPtr current);
TermPtr cond(TermPtr g, TermPtr a, TermPtr b);
TermPtr fix(std::string x, TypePtr ty, TermPtr body);
}  // namespace mk

bool is_free_in(const std::string& x, const Term& e);
// Name based on `base` that avoids every name in `avoid`.
std::string fresh_name(const std::string& base, const std::vector<std::string>& avoid);

// Capture-avoiding substitution e[v/x].
TermPtr subst(const TermPtr& e, const std::string& x, const TermPtr& v);

bool alpha_eq(const Term& a, const Term& b);
bool alpha_eq(const Type& a, const Type& b);
bool alpha_eq(const TermPtr& a, const TermPtr& b);
bool alpha_eq(const TypePtr& a, const TypePtr& b);
bool ann_eq(const Annotation& a, const Annotation& b);
bool coercion_eq(const Coercion& a, const Coercion& b);

TypeSet types_of(const Term& e);
TypeSet types_of(const Type& t);
TypeSet types_of(const Annotation& a);
TypeSet types_of(const Coercion& c);
int height(const Type& t);
std::size_t term_size(const Term& e);

// Canonical text of a term with bound variables renamed by binding depth;
// alpha-equivalent terms yield identical text.
std::string canonical_text(const Term& e);

// Shorthands used throughout tests and examples.
namespace std_types {
TypePtr any();   // {x:Int|true}
TypePtr nat();   // {x:Int|x >= 0}
TypePtr even();  // {x:Int|x mod 2 = 0}
TypePtr nz();    // {x:Int|x <> 0}
TypePtr boolean();  // {b:Bool|true}
}  // namespace std_types

}  // namespace lh

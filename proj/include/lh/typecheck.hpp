#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lh/semantics.hpp"
#include "lh/surface.hpp"
#include "lh/syntax.hpp"

namespace lh {

enum class TypeErrorKind {
    NotSimilar,
    IllFormedType,
    IllFormedAnnotation,
    UnboundVar,
    NotAFunction,
    OpArity,
    PredicateNotBool,
    SourceViolation,
    TypeMismatch,
};

std::string_view type_error_kind_name(TypeErrorKind k);

struct TypeError {
    TypeErrorKind kind;
    std::string path;  // e.g. "$.fn.body"; "$" is the checked term itself
    std::string detail;

    std::string message() const;
};

// A successful result with a null type means "any type" (the term is blame).
struct TypeResult {
    TypePtr type;
    std::optional<TypeError> error;

    bool ok() const { return !error; }
    explicit operator bool() const { return ok(); }
};

class Context {
public:
    Context extend(std::string x, TypePtr t) const;
    // Innermost binding wins.
    TypePtr lookup(const std::string& x) const;
    const std::vector<std::pair<std::string, TypePtr>>& bindings() const { return bindings_; }

private:
    std::vector<std::pair<std::string, TypePtr>> bindings_;
};

struct CheckConfig {
    std::size_t budget = kCheckerBudget;
    EvalConfig eval;
};

bool similar(const Type& a, const Type& b);

// Mode-indexed type checker. Caches well-formedness, constant checks and
// active-check replays, so reuse one instance across many terms.
class Checker {
public:
    // With `source` set, constants only have their raw types.
    explicit Checker(Mode m, CheckConfig cfg = {}, bool source = false);

    Mode mode() const { return mode_; }

    TypeResult type_of(const Context& g, const TermPtr& e);
    TypeResult check(const Context& g, const TermPtr& e, const TypePtr& expected);
    std::optional<TypeError> wf_type(const TypePtr& t);
    std::optional<TypeError> wf_annotation(const Annotation& a, const TypePtr& t1, const TypePtr& t2);

private:
    struct Expect;
    struct Fail;
    class PathGuard;

    TypePtr check_expect(const Context& g, const TermPtr& e, const Expect& x);
    TypePtr infer(const Context& g, const TermPtr& e, const Expect& x);
    void require_wf(const TypePtr& t);
    void require_ann(const Annotation& a, const TypePtr& t1, const TypePtr& t2);
    void require_coercion(const Coercion& c, const TypePtr& t1, const TypePtr& t2);
    void require_reflist(const RefList& r, const TypePtr& target, bool need_target);
    void require_const(const Value& k, const TypePtr& t);
    bool const_holds(const Value& k, const TypePtr& t);
    bool reaches(const TypePtr& t, const Value& k, const TermPtr& current);
    [[noreturn]] void fail(TypeErrorKind kind, std::string detail) const;

    Mode mode_;
    CheckConfig cfg_;
    bool source_;
    std::vector<std::string> path_;
    std::unordered_map<std::uint32_t, std::optional<TypeError>> wf_cache_;
    std::map<std::pair<std::uint32_t, Value>, bool> const_cache_;
    std::map<std::pair<std::uint32_t, Value>, std::vector<TermPtr>> replay_cache_;
};

std::optional<TypeError> wf_type(Mode m, const TypePtr& t, const CheckConfig& cfg = {});
std::optional<TypeError> wf_annotation(Mode m, const Annotation& a, const TypePtr& t1, const TypePtr& t2,
                                       const CheckConfig& cfg = {});
TypeResult type_of(Mode m, const Context& g, const TermPtr& e, const CheckConfig& cfg = {});

// First source-discipline violation in e, if any: runtime-only forms,
// annotated casts or casts without a label.
std::optional<TypeError> source_violation(const TermPtr& e);

// Types e in all four modes under the source discipline and returns the
// common type; disagreement between modes is reported as an error.
TypeResult check_source(const TermPtr& e, const CheckConfig& cfg = {});

// check_source on the main term, plus every annotated declaration body
// against its annotation.
TypeResult check_file(const SourceFile& f, const CheckConfig& cfg = {});

}  // namespace lh

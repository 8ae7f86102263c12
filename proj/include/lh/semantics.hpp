#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lh/syntax.hpp"

namespace lh {

// Decision procedure for refinement implication (T1 implies T2).
struct ImplicationOracle {
    std::string name;
    std::function<bool(const Type&, const Type&)> decide;
};

// Syntactic implication: alpha-equivalence.
ImplicationOracle alpha_oracle();
// Reflexive-transitive closure of user axioms (first implies second).
ImplicationOracle axiom_oracle(std::vector<std::pair<TypePtr, TypePtr>> axioms);

bool implies(const ImplicationOracle& oracle, const Type& t1, const Type& t2);

struct ChoosePolicy {
    std::string name;
    std::function<TypePtr(const TypeSet&)> pick;
};

// Minimum under the canonical type-set order.
ChoosePolicy lex_min_policy();

struct EvalConfig {
    ImplicationOracle oracle = alpha_oracle();
    ChoosePolicy choose = lex_min_policy();
};

// Throws std::invalid_argument on the empty set.
TypePtr choose(const TypeSet& s, const ChoosePolicy& policy = lex_min_policy());

// dom(a) and cod(a). Throws std::invalid_argument when the annotation does not
// describe a function cast.
std::pair<Annotation, Annotation> split_annotation(const Annotation& a);

// Translation of a cast into the coercion that performs the same checks.
// Throws std::invalid_argument for dissimilar types.
CoercionPtr coerce(const TypePtr& t1, const TypePtr& t2, const Label& l);

// r dropping T: removes entries implied by T, keeping survivors in order.
RefList ref_drop(const RefList& r, const Type& t, const ImplicationOracle& oracle = alpha_oracle());
RefList reflist_merge(const RefList& r1, const RefList& r2, const ImplicationOracle& oracle = alpha_oracle());
// c1 then c2. Throws std::invalid_argument on mismatched shapes.
CoercionPtr coercion_merge(const CoercionPtr& c1, const CoercionPtr& c2,
                           const ImplicationOracle& oracle = alpha_oracle());

// Annotation for <T1 =>a1 T2> followed by <T2 =>a2 T3>; nullopt when the mode
// does not merge this pair.
std::optional<Annotation> merge(Mode m, const TypePtr& t1, const Annotation& a1, const TypePtr& t2,
                                const Annotation& a2, const TypePtr& t3,
                                const ImplicationOracle& oracle = alpha_oracle());

// Checked stays Checked; Unchecked becomes Checked iff the popped refinement
// is the target (up to alpha).
Status status_join(Status s, const Type& target, const Type& popped);

// One congruence step taken while locating a redex.
struct Frame {
    std::string rule;
    int child;
};

struct StepOutcome {
    enum class Kind { Stepped, IsValue, IsBlame, Stuck, Fault };
    Kind kind = Kind::Stuck;
    TermPtr term;            // Stepped
    std::string rule;        // principal rule for Stepped
    std::vector<Frame> path; // congruence frames from the root to the redex
    Label blame;             // IsBlame
    std::string reason;      // Stuck / Fault

    // Congruence rules followed by the principal rule, joined with '/'.
    std::string rule_name() const;
};

StepOutcome step(Mode m, const TermPtr& e, const EvalConfig& cfg = {});
bool is_value(Mode m, const TermPtr& e, const EvalConfig& cfg = {});

struct TraceStep {
    std::string rule;  // full rule name
    std::vector<Frame> path;
    TermPtr term;  // the term after this step
};

struct Trace {
    TermPtr initial;
    std::vector<TraceStep> steps;

    // initial followed by every intermediate term
    std::vector<TermPtr> terms() const;
};

struct Outcome {
    enum class Kind { Value, Blamed, BudgetExceeded, Stuck, Fault };
    Kind kind = Kind::Stuck;
    TermPtr value;
    Label label;
    std::string reason;
    std::size_t steps = 0;

    bool operator==(const Outcome& o) const;
};

std::string_view outcome_kind_name(Outcome::Kind k);
// "-1", "blame l1", "budget exceeded", "stuck: ...", "fault: ...".
std::string describe(const Outcome& o);

inline constexpr std::size_t kDefaultBudget = 100000;
inline constexpr std::size_t kCheckerBudget = 10000;

// Iterates `step` until a result, a stuck term, a fault or the budget.
Outcome eval(Mode m, const TermPtr& e, std::size_t budget, const EvalConfig& cfg = {}, Trace* trace = nullptr);

// Called once per reduction with the step index (from 0) and its outcome.
using StepObserver = std::function<void(std::size_t, const StepOutcome&)>;
Outcome eval_observed(Mode m, const TermPtr& e, std::size_t budget, const EvalConfig& cfg,
                      const StepObserver& observe);

}  // namespace lh

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "lh/semantics.hpp"
#include "lh/syntax.hpp"
#include "lh/typecheck.hpp"

namespace lh {

// A closed source program satisfying check_source, with a base result type.
// Deterministic in (seed, size).
TermPtr gen_source(std::uint64_t seed, int size);

enum class Verdict { Pass, Fail, Skipped };
std::string_view verdict_name(Verdict v);

struct VerdictEntry {
    Verdict verdict = Verdict::Pass;
    std::string reason;
};

struct Finding {
    Mode mode;
    std::size_t step;  // index into the trace's terms; 0 is the initial term
    std::string kind;  // preservation, monotonicity, merge-priority, determinism
    std::string detail;
};

struct DiffReport {
    std::array<Outcome, 4> outcomes;  // indexed like kAllModes
    VerdictEntry forgetful, heedful, eidetic;
    std::vector<Finding> findings;  // filled when traces are checked

    const Outcome& outcome(Mode m) const { return outcomes[static_cast<std::size_t>(m)]; }
    bool failed() const;
    bool any_stuck() const;
    bool any_budget() const;
};

struct DiffOptions {
    std::size_t budget = kCheckerBudget;
    EvalConfig eval;
    bool check_traces = false;
};

// Runs e in all four modes and judges the mode-relationship properties:
// forgetful keeps classic values, heedful coterminates with classic, and
// eidetic agrees exactly.
DiffReport diff_modes(const TermPtr& e, const DiffOptions& opts = {});

// Per-trace invariants: every term re-checks at `type`, types_of never
// grows, stepping is deterministic, and (outside classic) mergeable casts
// are merged rather than stepped through.
std::vector<Finding> check_trace(Mode m, const Trace& trace, const TypePtr& type, Checker& checker,
                                 const EvalConfig& cfg = {});
std::vector<Finding> check_trace(Mode m, const Trace& trace, const EvalConfig& cfg = {});

struct FuzzOptions {
    std::size_t count = 1000;
    int min_size = 5;
    int max_size = 30;
    std::uint64_t seed = 1;
    DiffOptions diff;
};

struct FuzzItem {
    std::uint64_t seed;
    int size;
    TermPtr program;
    DiffReport report;
};

struct FuzzSummary {
    std::size_t items = 0;
    std::size_t failures = 0;
    std::size_t stuck = 0;
    std::size_t budget_exceeded = 0;
    std::size_t trace_findings = 0;
    std::size_t chained = 0;  // programs with at least two nested casts
    std::vector<FuzzItem> failing;  // items with a failed verdict, a stuck run or findings
};

// Item i uses seed opts.seed + i and a size cycling through the range.
FuzzSummary run_fuzz(const FuzzOptions& opts);

nlohmann::json to_json(const Outcome& o);
nlohmann::json to_json(const DiffReport& r);
nlohmann::json to_json(const FuzzSummary& s);

// ---------------------------------------------------------------------------
// Algebraic properties of the annotation operators, checked on random inputs.

struct AlgebraReport {
    std::size_t cases = 0;
    std::vector<std::string> violations;
};

// Random duplicate-free refinement list over Int.
RefList gen_reflist(std::mt19937_64& rng, std::size_t max_len);
// Random well-formed coercion between two similar random types.
CoercionPtr gen_coercion(std::mt19937_64& rng, const TypePtr& shape);

// Merge keeps lists duplicate-free and takes each refinement's leftmost
// label; ref_drop returns a subsequence of its input.
AlgebraReport check_merge_properties(std::uint64_t seed, std::size_t count);
// Reports (without asserting anything else) triples where the merge is not
// associative under the given oracle.
AlgebraReport check_merge_associativity(std::uint64_t seed, std::size_t count,
                                        const ImplicationOracle& oracle = alpha_oracle());
// Removing a constant's known refinement from a heedful type set does not
// change the result of casting it.
AlgebraReport check_heedful_idempotence(std::uint64_t seed, std::size_t count);
// Dropping the source refinement from the right operand of a merge does
// not change the result of casting a conforming constant.
AlgebraReport check_eidetic_idempotence(std::uint64_t seed, std::size_t count);

}  // namespace lh

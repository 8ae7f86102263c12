#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "lh/semantics.hpp"
#include "lh/surface.hpp"

namespace lh {

// Process exit statuses shared by every subcommand.
enum ExitCode : int {
    kExitValue = 0,
    kExitBlame = 1,
    kExitTypeError = 2,  // also unreadable or unparsable input
    kExitStuck = 3,
    kExitBudget = 4,
    kExitFault = 5,  // integer overflow
};

int exit_code(const Outcome& o);

struct RunConfig {
    Mode mode = Mode::Eidetic;
    std::size_t budget = kDefaultBudget;
    bool trace = false;
    bool space = false;
    bool json = false;
    std::string choose = "lex-min";  // lex-min | lex-max
    std::string oracle = "alpha-eq";  // alpha-eq | axioms
    std::string axiom_file;           // JSON list of [T1, T2] pairs, T1 implies T2
    bool runtime_forms = false;       // skip the source-program check
};

// kDefaultBudget, or LH_BUDGET when set to a positive integer.
std::size_t default_budget();

// Throws std::invalid_argument on an unknown policy or oracle, and
// std::runtime_error on a bad axiom file.
EvalConfig make_eval_config(const RunConfig& cfg);

struct RunReport {
    int exit = kExitValue;
    std::optional<Outcome> outcome;  // absent when the input was rejected
    nlohmann::json json;
    std::string text;
};

// Loads, checks and evaluates a file; the report carries what `lh run`
// prints.
RunReport run_file(const std::string& path, const RunConfig& cfg);
RunReport run_source(const SourceFile& f, const RunConfig& cfg);

}  // namespace lh

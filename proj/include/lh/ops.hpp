#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lh/syntax.hpp"

namespace lh {

// First-order signature of a primitive operation.
struct OpSignature {
    std::string name;
    std::vector<TypePtr> params;
    TypePtr result;
};

// Registry lookup; nullptr for unknown names.
const OpSignature* find_op(std::string_view name);
const std::vector<OpSignature>& all_ops();

// Curried type T1 -> ... -> Tn -> T of an operation. Throws std::out_of_range
// for unknown names.
TypePtr signature(std::string_view op);
// ty(k).
BaseType signature(const Value& k);

enum class ApplyStatus { Ok, Undefined, Overflow };

struct ApplyResult {
    ApplyStatus status = ApplyStatus::Ok;
    Value value{false};
    std::string detail;
};

// Denotation of an operation. Integer division and remainder are Euclidean
// (the remainder is never negative). Results outside 64 bits report Overflow.
ApplyResult apply_op(std::string_view name, const std::vector<Value>& args);

}  // namespace lh

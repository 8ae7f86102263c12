#include "lh/ops.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace lh {

namespace {

std::vector<OpSignature> build_registry() {
    using namespace std_types;
    auto b = boolean();
    auto i = any();
    std::vector<OpSignature> ops;
    ops.push_back({"not", {b}, b});
    for (const char* n : {"&&", "||"}) ops.push_back({n, {b, b}, b});
    for (const char* n : {"=", "<>", "<", "<=", ">", ">="}) ops.push_back({n, {i, i}, b});
    for (const char* n : {"+", "-", "*"}) ops.push_back({n, {i, i}, i});
    auto nonzero = refine("y", BaseType::Int, mk::op("<>", {mk::var("y"), mk::integer(0)}));
    for (const char* n : {"div", "mod"}) ops.push_back({n, {i, nonzero}, i});
    return ops;
}

ApplyResult ok(Value v) { return ApplyResult{ApplyStatus::Ok, v, {}}; }
ApplyResult undefined(std::string why) { return ApplyResult{ApplyStatus::Undefined, Value{false}, std::move(why)}; }
ApplyResult overflow(std::string_view op) {
    return ApplyResult{ApplyStatus::Overflow, Value{false}, "integer overflow in " + std::string(op)};
}

}  // namespace

const std::vector<OpSignature>& all_ops() {
    static const std::vector<OpSignature> ops = build_registry();
    return ops;
}

const OpSignature* find_op(std::string_view name) {
    const auto& ops = all_ops();
    auto it = std::find_if(ops.begin(), ops.end(), [&](const OpSignature& s) { return s.name == name; });
    return it == ops.end() ? nullptr : &*it;
}

TypePtr signature(std::string_view op) {
    const OpSignature* sig = find_op(op);
    if (!sig) throw std::out_of_range("unknown operation " + std::string(op));
    TypePtr t = sig->result;
    for (auto it = sig->params.rbegin(); it != sig->params.rend(); ++it) t = fun(*it, t);
    return t;
}

BaseType signature(const Value& k) { return value_base(k); }

ApplyResult apply_op(std::string_view name, const std::vector<Value>& args) {
    const OpSignature* sig = find_op(name);
    if (!sig) return undefined("unknown operation " + std::string(name));
    if (args.size() != sig->params.size()) return undefined("arity mismatch for " + std::string(name));
    for (std::size_t i = 0; i < args.size(); ++i)
        if (value_base(args[i]) != sig->params[i]->base) return undefined("argument of wrong base type");

    if (name == "not") return ok(!std::get<bool>(args[0]));
    if (name == "&&") return ok(std::get<bool>(args[0]) && std::get<bool>(args[1]));
    if (name == "||") return ok(std::get<bool>(args[0]) || std::get<bool>(args[1]));

    std::int64_t a = std::get<std::int64_t>(args[0]);
    std::int64_t b = std::get<std::int64_t>(args[1]);
    if (name == "=") return ok(a == b);
    if (name == "<>") return ok(a != b);
    if (name == "<") return ok(a < b);
    if (name == "<=") return ok(a <= b);
    if (name == ">") return ok(a > b);
    if (name == ">=") return ok(a >= b);

    std::int64_t r = 0;
    if (name == "+") return __builtin_add_overflow(a, b, &r) ? overflow(name) : ok(r);
    if (name == "-") return __builtin_sub_overflow(a, b, &r) ? overflow(name) : ok(r);
    if (name == "*") return __builtin_mul_overflow(a, b, &r) ? overflow(name) : ok(r);

    if (b == 0) return undefined(std::string(name) + " by zero");
    constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
    if (a == kMin && b == -1) return name == "mod" ? ok(std::int64_t{0}) : overflow(name);
    std::int64_t q = a / b, m = a % b;
    if (m < 0) {
        m = b < 0 ? m - b : m + b;
        q += b < 0 ? 1 : -1;
    }
    return name == "mod" ? ok(m) : ok(q);
}

}  // namespace lh

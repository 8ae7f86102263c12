#include "lh/print.hpp"

namespace lh {

namespace {

enum Prec : int {
    kTop = 0,
    kOr,
    kAnd,
    kCmp,
    kAdd,
    kMul,
    kUnary,
    kApp,
    kArg,     // operand of a cast
    kAppArg,  // argument of an application
};

int binary_prec(const std::string& op) {
    if (op == "||") return kOr;
    if (op == "&&") return kAnd;
    if (op == "=" || op == "<>" || op == "<" || op == "<=" || op == ">" || op == ">=") return kCmp;
    if (op == "+" || op == "-") return kAdd;
    if (op == "*" || op == "mod" || op == "div") return kMul;
    return -1;
}

class Printer {
public:
    explicit Printer(bool canonical) : canonical_(canonical) {}

    void bind(const std::string& x) { scope_.push_back(x); }

    std::string type(const Type& t) {
        if (canonical_) return t.key;
        if (t.is_fun()) {
            std::string d = type(*t.dom);
            if (t.dom->is_fun()) d = "(" + d + ")";
            return d + " -> " + type(*t.cod);
        }
        Printer inner(false);
        inner.bind(t.binder);
        return "{" + t.binder + ":" + std::string(base_name(t.base)) + "|" + inner.term(*t.pred, kTop) + "}";
    }

    std::string refs(const RefList& r) {
        std::string out = "[";
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ", ";
            out += type(*r[i].ref);
            if (!r[i].label.empty()) out += "@" + r[i].label.name;
        }
        return out + "]";
    }

    std::string coercion(const Coercion& c) {
        if (c.is_refs()) return refs(c.refs());
        return "(" + coercion(*c.fn().dom) + " |-> " + coercion(*c.fn().cod) + ")";
    }

    std::string annotation(const Annotation& a) {
        if (auto* s = std::get_if<TypeSet>(&a)) {
            std::string out = "{";
            bool first = true;
            for (const auto& t : *s) {
                if (!first) out += ", ";
                first = false;
                out += type(*t);
            }
            return out + "}";
        }
        if (auto* c = std::get_if<CoercionPtr>(&a)) return coercion(**c);
        return "";
    }

    std::string term(const Term& e, int ctx) {
        return std::visit([&](const auto& n) { return node(n, ctx); }, e.node);
    }

private:
    static std::string paren(bool p, std::string s) { return p ? "(" + s + ")" : s; }

    std::string name(const std::string& x) const {
        if (!canonical_) return x;
        for (std::size_t i = scope_.size(); i-- > 0;)
            if (scope_[i] == x) return "#" + std::to_string(i);
        return x;
    }

    std::string binder(const std::string& x) {
        std::string shown = canonical_ ? "#" + std::to_string(scope_.size()) : x;
        scope_.push_back(x);
        return shown;
    }

    std::string value(const Value& v, int ctx) {
        std::string s = value_text(v);
        bool negative = std::holds_alternative<std::int64_t>(v) && std::get<std::int64_t>(v) < 0;
        return paren(negative && ctx >= kArg, s);
    }

    std::string node(const Var& n, int) { return name(n.name); }
    std::string node(const Const& n, int ctx) { return value(n.value, ctx); }

    std::string node(const Abs& n, int ctx) {
        std::string ty = type(*n.ty);
        std::string b = binder(n.x);
        std::string body = term(*n.body, kTop);
        scope_.pop_back();
        return paren(ctx > kTop, "\\" + b + ":" + ty + ". " + body);
    }

    std::string node(const Fix& n, int ctx) {
        std::string ty = type(*n.ty);
        std::string b = binder(n.x);
        std::string body = term(*n.body, kTop);
        scope_.pop_back();
        return paren(ctx > kTop, "fix " + b + ":" + ty + ". " + body);
    }

    std::string node(const App& n, int ctx) {
        return paren(ctx > kApp, term(*n.fn, kApp) + " " + term(*n.arg, kAppArg));
    }

    std::string node(const Op& n, int ctx) {
        if (n.name == "not" && n.args.size() == 1) return paren(ctx > kUnary, "not " + term(*n.args[0], kUnary));
        int p = binary_prec(n.name);
        if (p >= 0 && n.args.size() == 2) {
            int left = p == kCmp ? p + 1 : p;
            return paren(ctx > p, term(*n.args[0], left) + " " + n.name + " " + term(*n.args[1], p + 1));
        }
        std::string out = "op " + n.name + "(";
        for (std::size_t i = 0; i < n.args.size(); ++i) out += (i ? ", " : "") + term(*n.args[i], kTop);
        return out + ")";
    }

    std::string node(const Cast& n, int ctx) {
        std::string head = "<" + type(*n.src) + " =>" + annotation(n.ann) + " " + type(*n.tgt);
        if (!n.label.empty()) head += " @ " + n.label.name;
        head += "> " + term(*n.subject, kArg);
        return paren(ctx >= kAppArg, head);
    }

    std::string node(const Check& n, int) {
        return "check<" + type(*n.tgt) + ", " + term(*n.current, kTop) + ", " + value_text(n.k) + " @ " +
               n.label.name + ">";
    }

    std::string node(const Blame& n, int ctx) { return paren(ctx >= kArg, "blame " + n.label.name); }

    std::string node(const Stack& n, int) {
        return "stack<" + type(*n.tgt) + ", " + print(n.status) + ", " + refs(n.pending) + ", " + value_text(n.k) +
               ", " + term(*n.current, kTop) + ">";
    }

    std::string node(const Cond& n, int ctx) {
        return paren(ctx > kTop, "if " + term(*n.guard, kTop) + " then " + term(*n.then_branch, kTop) + " else " +
                                     term(*n.else_branch, kTop));
    }

    bool canonical_;
    std::vector<std::string> scope_;
};

}  // namespace

std::string print(const Term& e) { return Printer(false).term(e, kTop); }
std::string print(const TermPtr& e) { return print(*e); }
std::string print(const Type& t) { return Printer(false).type(t); }
std::string print(const TypePtr& t) { return print(*t); }
std::string print(const Annotation& a) { return Printer(false).annotation(a); }
std::string print(const Coercion& c) { return Printer(false).coercion(c); }
std::string print(const RefList& r) { return Printer(false).refs(r); }
std::string print(const Label& l) { return l.empty() ? "_" : l.name; }
std::string print(Status s) { return s == Status::Checked ? "ok" : "?"; }

std::string canonical_text(const Term& e) { return Printer(true).term(e, kTop); }

std::string canonical_pred_text(const Term& pred, const std::string& binder) {
    Printer p(true);
    p.bind(binder);
    return p.term(pred, kTop);
}

}  // namespace lh

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "lh/surface.hpp"

namespace lh {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    int line, col;
    std::size_t begin, end;  // byte offsets
};

const char* const kSymbols[] = {"=>", "->", "<>", "<=", ">=", "&&", "||", "(", ")", "{", "}", "<", ">", ":",
                                "|",  ".",  "=",  "+",  "-",  "*",  "\\", "@", ";", ",", "[", "]"};

const char* const kKeywords[] = {"let", "rec", "if",  "then",  "else",  "not",   "mod",  "div",
                                 "true", "false", "fix", "Int", "Bool", "check", "stack", "blame"};

bool is_keyword(const std::string& s) {
    return std::find(std::begin(kKeywords), std::end(kKeywords), s) != std::end(kKeywords);
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (src.compare(i, 2, "--") == 0) {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t{Tok::End, "", line, col, i, i};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Tok::Int;
            t.text = std::string(src.substr(i, j - i));
        } else {
            for (const char* s : kSymbols) {
                std::string_view sv(s);
                if (src.compare(i, sv.size(), sv) == 0) {
                    t.kind = Tok::Sym;
                    t.text = std::string(sv);
                    break;
                }
            }
            if (t.kind == Tok::End) throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        advance(t.text.size());
        t.end = i;
        out.push_back(std::move(t));
    }
    out.push_back(Token{Tok::End, "", line, col, i, i});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    SourceFile file() {
        SourceFile f;
        while (is_ident("let")) f.decls.push_back(decl());
        f.main = expr();
        expect_end();
        return f;
    }

    TypePtr standalone_type() {
        TypePtr t = type();
        expect_end();
        return t;
    }

private:
    // --- token helpers
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool is_sym(std::string_view s, std::size_t k = 0) const {
        return peek(k).kind == Tok::Sym && peek(k).text == s;
    }
    bool is_ident(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& msg, const Token& at) const { throw ParseError(at.line, at.col, msg); }
    [[noreturn]] void fail(const std::string& msg) const { fail(msg, peek()); }

    static std::string describe(const Token& t) {
        if (t.kind == Tok::End) return "end of input";
        return "'" + t.text + "'";
    }

    void expect_sym(std::string_view s) {
        if (!is_sym(s)) fail("expected '" + std::string(s) + "' but found " + describe(peek()));
        next();
    }
    void expect_kw(std::string_view s) {
        if (!is_ident(s)) fail("expected '" + std::string(s) + "' but found " + describe(peek()));
        next();
    }
    void expect_end() {
        if (peek().kind != Tok::End) fail("unexpected " + describe(peek()));
    }

    std::string identifier(const char* what) {
        const Token& t = peek();
        if (t.kind != Tok::Ident || is_keyword(t.text)) fail(std::string("expected ") + what + " but found " + describe(t));
        return next().text;
    }

    // --- scopes: source name -> internal name, innermost last
    std::string bind(const std::string& x) {
        std::string internal = x;
        auto taken = [&](const std::string& n) {
            return std::any_of(scope_.begin(), scope_.end(), [&](const auto& p) { return p.second == n; }) ||
                   decls_.count(n);
        };
        if (taken(internal)) {
            std::vector<std::string> avoid;
            for (const auto& p : scope_) avoid.push_back(p.second);
            for (const auto& d : decls_) avoid.push_back(d.first);
            internal = fresh_name(x, avoid);
        }
        scope_.emplace_back(x, internal);
        return internal;
    }
    void unbind() { scope_.pop_back(); }

    TermPtr resolve(const std::string& x) {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->first == x) return mk::var(it->second);
        auto d = decls_.find(x);
        if (d != decls_.end()) return d->second;
        return mk::var(x);
    }

    // --- declarations
    Decl decl() {
        const Token& start = peek();
        expect_kw("let");
        Decl d;
        d.recursive = is_ident("rec");
        if (d.recursive) next();
        d.name = identifier("declaration name");
        if (decls_.count(d.name)) fail("duplicate declaration '" + d.name + "'", start);
        if (is_sym(":")) {
            next();
            d.annot = type();
        } else if (d.recursive) {
            fail("'let rec' requires a type annotation");
        }
        expect_sym("=");
        if (d.recursive) {
            std::string f = bind(d.name);
            TermPtr body = expr();
            unbind();
            d.body = mk::fix(f, d.annot, body);
        } else {
            d.body = expr();
        }
        expect_sym(";");
        decls_.emplace(d.name, d.body);
        return d;
    }

    // --- types
    TypePtr type() {
        TypePtr dom = base_type();
        if (is_sym("->")) {
            next();
            return fun(dom, type());
        }
        return dom;
    }

    TypePtr base_type() {
        if (is_sym("(")) {
            next();
            TypePtr t = type();
            expect_sym(")");
            return t;
        }
        expect_sym("{");
        std::string x = identifier("refinement binder");
        expect_sym(":");
        BaseType b;
        if (is_ident("Int")) {
            b = BaseType::Int;
        } else if (is_ident("Bool")) {
            b = BaseType::Bool;
        } else {
            fail("expected base type Int or Bool but found " + describe(peek()));
        }
        next();
        expect_sym("|");
        // A predicate sees only its own binder (types are closed).
        auto saved = std::move(scope_);
        scope_.clear();
        scope_.emplace_back(x, x);
        TermPtr pred = expr();
        scope_ = std::move(saved);
        expect_sym("}");
        return refine(x, b, pred);
    }

    // --- expressions
    TermPtr expr() {
        if (is_sym("\\") || is_ident("fix")) {
            bool is_fix = is_ident("fix");
            next();
            std::string x = identifier("binder");
            expect_sym(":");
            TypePtr ty = type();
            expect_sym(".");
            std::string internal = bind(x);
            TermPtr body = expr();
            unbind();
            return is_fix ? mk::fix(internal, ty, body) : mk::abs(internal, ty, body);
        }
        if (is_ident("if")) {
            next();
            TermPtr g = expr();
            expect_kw("then");
            TermPtr a = expr();
            expect_kw("else");
            TermPtr b = expr();
            return mk::cond(g, a, b);
        }
        return binary(0);
    }

    static int level_of(const Token& t) {
        if (t.kind == Tok::Sym) {
            if (t.text == "||") return 0;
            if (t.text == "&&") return 1;
            if (t.text == "=" || t.text == "<>" || t.text == "<" || t.text == "<=" || t.text == ">" ||
                t.text == ">=")
                return 2;
            if (t.text == "+" || t.text == "-") return 3;
            if (t.text == "*") return 4;
        } else if (t.kind == Tok::Ident && (t.text == "mod" || t.text == "div")) {
            return 4;
        }
        return -1;
    }

    TermPtr binary(int level) {
        if (level > 4) return unary();
        TermPtr lhs = binary(level + 1);
        while (level_of(peek()) == level) {
            std::string op = next().text;
            TermPtr rhs = binary(level + 1);
            lhs = mk::op(op, {lhs, rhs});
            if (level == 2 && level_of(peek()) == 2) fail("comparison operators do not associate");
        }
        return lhs;
    }

    bool negative_literal_ahead() const {
        return is_sym("-") && peek(1).kind == Tok::Int && peek(1).begin == peek().end;
    }

    TermPtr unary() {
        if (is_ident("not")) {
            next();
            return mk::op("not", {unary()});
        }
        if (is_sym("-") && !negative_literal_ahead()) {
            next();
            return mk::op("-", {mk::integer(0), unary()});
        }
        return application();
    }

    bool starts_argument() const {
        const Token& t = peek();
        if (t.kind == Tok::Int) return true;
        if (t.kind == Tok::Sym) return t.text == "(";
        if (t.kind == Tok::Ident) return !is_keyword(t.text) || t.text == "true" || t.text == "false";
        return false;
    }

    TermPtr application() {
        TermPtr head = argument();
        while (starts_argument()) head = mk::app(head, argument());
        return head;
    }

    TermPtr integer_literal(bool negative) {
        const Token& t = peek();
        unsigned long long mag = 0;
        for (char c : t.text) {
            unsigned digit = static_cast<unsigned>(c - '0');
            if (mag > (std::numeric_limits<unsigned long long>::max() - digit) / 10) fail("integer literal too large");
            mag = mag * 10 + digit;
        }
        constexpr auto kMax = static_cast<unsigned long long>(std::numeric_limits<std::int64_t>::max());
        if (mag > kMax + (negative ? 1 : 0)) fail("integer literal out of 64-bit range");
        next();
        if (!negative) return mk::integer(static_cast<std::int64_t>(mag));
        if (mag == kMax + 1) return mk::integer(std::numeric_limits<std::int64_t>::min());
        return mk::integer(-static_cast<std::int64_t>(mag));
    }

    TermPtr argument() {
        const Token& t = peek();
        if (negative_literal_ahead()) {
            next();
            return integer_literal(true);
        }
        if (t.kind == Tok::Int) return integer_literal(false);
        if (is_sym("(")) {
            next();
            TermPtr e = expr();
            expect_sym(")");
            return e;
        }
        if (is_sym("<")) return cast();
        if (is_sym("\\") || is_ident("fix") || is_ident("if")) return expr();
        if (t.kind == Tok::Ident) {
            if (t.text == "true" || t.text == "false") {
                next();
                return mk::boolean(t.text == "true");
            }
            if (t.text == "check" || t.text == "stack" || t.text == "blame")
                fail("runtime-only form '" + t.text + "' is not allowed in source programs");
            std::string x = identifier("expression");
            return resolve(x);
        }
        fail("expected expression but found " + describe(t));
    }

    TermPtr cast() {
        expect_sym("<");
        TypePtr src = type();
        std::size_t arrow_end = peek().end;
        expect_sym("=>");
        if ((is_sym("{") || is_sym("[")) && peek().begin == arrow_end)
            fail("annotated casts are runtime-only and not allowed in source programs");
        TypePtr tgt = type();
        if (!is_sym("@")) fail("cast requires a blame label ('@ label')");
        next();
        std::string label = identifier("blame label");
        expect_sym(">");
        TermPtr subject = argument();
        return mk::cast(src, tgt, Label::named(label), subject);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<std::pair<std::string, std::string>> scope_;
    std::map<std::string, TermPtr> decls_;
};

}  // namespace

SourceFile parse_file(std::string_view text) { return Parser(text).file(); }

TermPtr parse(std::string_view text) { return parse_file(text).main; }

TypePtr parse_type(std::string_view text) { return Parser(text).standalone_type(); }

SourceFile load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_file(ss.str());
}

}  // namespace lh

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lh/print.hpp"
#include "lh/syntax.hpp"

namespace lh {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& message);
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    int line_, column_;
    std::string message_;
};

struct Decl {
    std::string name;
    TypePtr annot;  // may be null for plain `let`
    bool recursive = false;
    TermPtr body;   // elaborated: earlier declarations substituted, `let rec` as Fix
};

struct SourceFile {
    std::vector<Decl> decls;
    TermPtr main;  // elaborated program
};

SourceFile parse_file(std::string_view text);
// The elaborated main term of a source file.
TermPtr parse(std::string_view text);
TypePtr parse_type(std::string_view text);

// Reads and parses a `.lh` file; throws std::runtime_error if unreadable.
SourceFile load_file(const std::string& path);

}  // namespace lh

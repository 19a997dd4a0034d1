#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdv {

// Input error carrying source position; raised by all file-format parsers.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string const & msg, int line, int col)
        : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " +
                             std::to_string(col)),
          line(line), col(col) {}
    int line;
    int col;
};

struct SExpr {
    enum class Kind { Atom, List };
    Kind kind = Kind::List;
    std::string atom;
    std::vector<SExpr> items;
    int line = 0;
    int col = 0;

    bool is_atom() const { return kind == Kind::Atom; }
    bool is_list() const { return kind == Kind::List; }
    bool is_atom(std::string const & s) const { return is_atom() && atom == s; }
    size_t size() const { return items.size(); }
    SExpr const & operator[](size_t i) const { return items.at(i); }

    [[noreturn]] void fail(std::string const & msg) const { throw ParseError(msg, line, col); }

    std::string const & atom_or_fail(std::string const & what) const {
        if (!is_atom()) { fail("expected " + what); }
        return atom;
    }
};

// Parses a single s-expression; trailing garbage is an error.
SExpr sexpr_parse(std::string const & text);

// Parses a sequence of top-level s-expressions.
std::vector<SExpr> sexpr_parse_many(std::string const & text);

std::string sexpr_to_string(SExpr const & e);

SExpr sx_atom(std::string s);
SExpr sx_list(std::vector<SExpr> items);

} // namespace pdv

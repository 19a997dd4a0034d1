#include "pdv/sexpr.hpp"

#include "pdv/rational.hpp"

#include <cctype>

namespace pdv {

namespace {

struct Lexer {
    std::string const & text;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    explicit Lexer(std::string const & t) : text(t) {}

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    char advance() {
        char c = text[pos++];
        if (c == '\n') {
            line++;
            col = 1;
        } else {
            col++;
        }
        return c;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == ';') {
                while (!eof() && peek() != '\n') { advance(); }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr parse() {
        skip_ws();
        if (eof()) { throw ParseError("unexpected end of input", line, col); }
        int l = line, c = col;
        if (peek() == '(') {
            advance();
            SExpr e;
            e.kind = SExpr::Kind::List;
            e.line = l;
            e.col = c;
            while (true) {
                skip_ws();
                if (eof()) { throw ParseError("unclosed '('", l, c); }
                if (peek() == ')') {
                    advance();
                    break;
                }
                e.items.push_back(parse());
            }
            return e;
        }
        if (peek() == ')') { throw ParseError("unexpected ')'", line, col); }
        SExpr e;
        e.kind = SExpr::Kind::Atom;
        e.line = l;
        e.col = c;
        while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != '(' &&
               peek() != ')' && peek() != ';') {
            e.atom.push_back(advance());
        }
        return e;
    }
};

} // namespace

SExpr sexpr_parse(std::string const & text) {
    Lexer lx(text);
    SExpr e = lx.parse();
    lx.skip_ws();
    if (!lx.eof()) { throw ParseError("trailing input after s-expression", lx.line, lx.col); }
    return e;
}

std::vector<SExpr> sexpr_parse_many(std::string const & text) {
    Lexer lx(text);
    std::vector<SExpr> out;
    lx.skip_ws();
    while (!lx.eof()) {
        out.push_back(lx.parse());
        lx.skip_ws();
    }
    return out;
}

std::string sexpr_to_string(SExpr const & e) {
    if (e.is_atom()) { return e.atom; }
    std::string s = "(";
    for (size_t i = 0; i < e.items.size(); ++i) {
        if (i > 0) { s += ' '; }
        s += sexpr_to_string(e.items[i]);
    }
    s += ')';
    return s;
}

SExpr sx_atom(std::string s) {
    SExpr e;
    e.kind = SExpr::Kind::Atom;
    e.atom = std::move(s);
    return e;
}

SExpr sx_list(std::vector<SExpr> items) {
    SExpr e;
    e.kind = SExpr::Kind::List;
    e.items = std::move(items);
    return e;
}

std::optional<Rat> rat_parse(std::string const & s) {
    if (s.empty()) { return std::nullopt; }
    auto slash = s.find('/');
    auto parse_int = [](std::string const & t) -> std::optional<BigInt> {
        if (t.empty()) { return std::nullopt; }
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) { return std::nullopt; }
        for (size_t j = i; j < t.size(); ++j) {
            if (!std::isdigit(static_cast<unsigned char>(t[j]))) { return std::nullopt; }
        }
        return BigInt(t);
    };
    if (slash == std::string::npos) {
        auto n = parse_int(s);
        if (!n) { return std::nullopt; }
        return Rat(*n);
    }
    auto n = parse_int(s.substr(0, slash));
    auto d = parse_int(s.substr(slash + 1));
    if (!n || !d || *d == 0) { return std::nullopt; }
    return Rat(*n) / Rat(*d);
}

} // namespace pdv

#pragma once

#include "pdv/rational.hpp"
#include "pdv/sexpr.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdv::lra {

enum class Sort { Rational, Integer };

struct Var {
    std::string name;
    Sort sort = Sort::Rational;
    bool operator==(Var const &) const = default;
    auto operator<=>(Var const &) const = default;
};

class SortMismatch : public std::runtime_error {
public:
    explicit SortMismatch(std::string const & m) : std::runtime_error("sort mismatch: " + m) {}
};

class UnboundVariable : public std::runtime_error {
public:
    explicit UnboundVariable(std::string const & v)
        : std::runtime_error("unbound variable: " + v) {}
};

// Linear combination over variables plus a constant. Integer-sorted terms may
// carry an outermost "mod n" wrapper (n > 0); rational terms never do.
struct LinTerm {
    std::map<std::string, Rat> coeffs; // no zero entries
    Rat constant = 0;
    Sort sort = Sort::Rational;
    std::optional<BigInt> mod; // integer sort only

    static LinTerm variable(std::string const & name, Sort s = Sort::Rational);
    static LinTerm constant_term(Rat const & c, Sort s = Sort::Rational);

    Rat coeff(std::string const & v) const {
        auto it = coeffs.find(v);
        return it == coeffs.end() ? Rat(0) : it->second;
    }
    bool is_constant() const { return coeffs.empty(); }
    bool operator==(LinTerm const &) const = default;
};

LinTerm term_add(LinTerm const & a, LinTerm const & b);
LinTerm term_scale(Rat const & c, LinTerm const & a);
LinTerm term_sub(LinTerm const & a, LinTerm const & b);
LinTerm term_mod(LinTerm const & a, BigInt const & n);
// Capture-free replacement of a variable by a term (same sort).
LinTerm term_subst(LinTerm const & a, std::string const & v, LinTerm const & t);

enum class Rel { Lt, Le, Eq };

// Stored in the canonical form "t rel 0": variables sorted, leading
// coefficient scaled to +-1 (rational sort), +1 for equalities. Syntactic
// equality then coincides with equality up to positive scaling. Mod-wrapped
// atoms read "(linear mod n) rel mod_rhs" instead and are ground-eval only.
struct Atom {
    LinTerm t;
    Rel rel = Rel::Le;
    Rat mod_rhs = 0; // comparison constant for mod-wrapped t

    bool operator==(Atom const &) const = default;
    auto operator<=>(Atom const &) const = default;
};

Atom make_atom(LinTerm const & lhs, Rel rel, LinTerm const & rhs);

// Truth value of an atom when it contains no variables.
std::optional<bool> atom_const_value(Atom const & a);

using Assignment = std::map<std::string, Rat>;

Rat eval_term(LinTerm const & t, Assignment const & a);
bool eval_atom(Atom const & at, Assignment const & a);

// Quantifier-free NNF formula. Negation survives only on integer-sorted
// atoms (mod makes the rational rewrite unavailable); rational negations are
// normalized away at construction.
struct QFFormula {
    enum class Kind { True, False, Lit, And, Or };
    Kind kind = Kind::True;
    Atom atom;
    bool negated = false;
    std::vector<QFFormula> kids;

    bool operator==(QFFormula const &) const = default;

    static QFFormula tt() { return QFFormula{}; }
    static QFFormula ff() {
        QFFormula f;
        f.kind = Kind::False;
        return f;
    }
    static QFFormula lit(Atom a, bool neg = false);
    static QFFormula make_and(std::vector<QFFormula> kids);
    static QFFormula make_or(std::vector<QFFormula> kids);
    static QFFormula negate(QFFormula const & f);
};

bool eval_ground(QFFormula const & f, Assignment const & a);
QFFormula qf_subst(QFFormula const & f, std::string const & v, LinTerm const & t);
void collect_vars(QFFormula const & f, std::set<std::string> & out);
std::set<std::string> free_vars(QFFormula const & f);

enum class Quant { Forall, Exists };

struct PrenexFormula {
    std::vector<std::pair<Quant, Var>> prefix; // bound names pairwise distinct
    QFFormula matrix;

    bool operator==(PrenexFormula const &) const = default;
};

PrenexFormula prenex_subst(PrenexFormula const & f, std::string const & v, LinTerm const & t);
// Swaps quantifiers and negates the matrix.
PrenexFormula prenex_negate(PrenexFormula const & f);

// --- text format ---------------------------------------------------------
// Terms:    x | c | n/d | (+ t ...) | (- t t) | (- t) | (* c t) | (mod t n)
// Atoms:    (< t t) (<= t t) (= t t) (> t t) (>= t t)
// Formulas: (and f ...) (or f ...) (not f) true false
// Prenex:   (forall (x ...) f) (exists (x ...) f), quantifiers outermost.

struct ParseEnv {
    Sort default_sort = Sort::Rational;
    std::map<std::string, Sort> sorts; // overrides per variable
};

LinTerm parse_term(SExpr const & e, ParseEnv const & env);
QFFormula parse_qf(SExpr const & e, ParseEnv const & env);
PrenexFormula parse_prenex(SExpr const & e, ParseEnv const & env);

SExpr term_to_sexpr(LinTerm const & t);
SExpr qf_to_sexpr(QFFormula const & f);
SExpr prenex_to_sexpr(PrenexFormula const & f);

std::string term_to_string(LinTerm const & t);
std::string qf_to_string(QFFormula const & f);
std::string prenex_to_string(PrenexFormula const & f);

} // namespace pdv::lra

#pragma once

#include "pdv/lra.hpp"

#include <optional>
#include <variant>

namespace pdv::lra {

class ModelMismatch : public std::runtime_error {
public:
    explicit ModelMismatch(std::string const & m)
        : std::runtime_error("model mismatch: " + m) {}
};

struct SatResult {
    bool sat = false;
    Assignment model; // satisfies the formula when sat
};

// Decision by DNF expansion plus Fourier-Motzkin per conjunct. All variables
// must be rational-sorted. Total; returned models always satisfy the input.
SatResult qf_sat(QFFormula const & f);

struct ValidityResult {
    bool valid = false;
    Assignment counter_model; // assigns every prefix variable and every free
};

// Universal-prefix validity: valid iff the negated matrix is unsatisfiable.
ValidityResult forall_validity(PrenexFormula const & f);

// One bound extracted from an atom, seen from the projected variable.
struct Bound {
    LinTerm term;   // the bound itself, variable-free of x
    bool strict;    // from Lt
    bool is_lower;  // term (<,<=) x vs x (<,<=) term
    bool from_eq;   // came from an equality
};

std::vector<Bound> bounds_on(std::string const & x, std::vector<Atom> const & atoms);

// Model-based projection term for x: reuses a touched non-strict bound,
// otherwise the midpoint of the tightest strict bounds, otherwise bound+-1,
// otherwise the model value itself. Keeps the reachable term universe finite.
LinTerm mbp_term(std::string const & x, Assignment const & m, std::vector<Atom> const & atoms);

// Literals of f that hold under m and jointly imply f (an implicant);
// disjunctions resolve to their first true branch. m must satisfy f.
std::vector<Atom> implicant(QFFormula const & f, Assignment const & m);

} // namespace pdv::lra

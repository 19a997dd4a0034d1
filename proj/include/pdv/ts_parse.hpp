#pragma once

#include "pdv/ts.hpp"

#include <variant>

namespace pdv::ts {

using AnyTS = std::variant<ExplicitTS, SymbolicTS>;

// (system :vars (x) :init (= x 0) :trans (= x' (+ x 1)) :bad (= x -3))
// (system :states (-5 ... 5) :init (0) :trans ((0 1) (1 2) ...) :bad (-3))
AnyTS parse_system(SExpr const & e);
AnyTS parse_system_file(std::string const & path);

// (pool (pred p0 :stratum 0 (<= 0 x)) (pred odd :stratum 1 (= (mod x 2) 1))
//       (pred few :stratum 0 :states (0 1)))
// Formulas are integer-sorted for explicit systems, rational otherwise.
std::vector<Predicate> parse_pool(SExpr const & e, std::vector<std::string> const & vars,
                                  bool integer_sorted);
std::vector<Predicate> parse_pool_file(std::string const & path,
                                       std::vector<std::string> const & vars,
                                       bool integer_sorted);

SExpr system_to_sexpr(ExplicitTS const & ts);
SExpr system_to_sexpr(SymbolicTS const & ts);
SExpr pool_to_sexpr(std::vector<Predicate> const & pool);

State parse_state(SExpr const & e);
SExpr state_to_sexpr(State const & s);

std::string read_file(std::string const & path);

} // namespace pdv::ts

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace pdv {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline BigInt rat_num(Rat const & q) { return numerator(q); }
inline BigInt rat_den(Rat const & q) { return denominator(q); }

inline bool rat_is_int(Rat const & q) { return rat_den(q) == 1; }

// Floor division, exact.
inline BigInt rat_floor(Rat const & q) {
    BigInt n = rat_num(q), d = rat_den(q);
    BigInt quo = n / d;
    if (n % d != 0 && n < 0) { quo -= 1; }
    return quo;
}

// Nonnegative remainder of an integer modulo n > 0.
inline BigInt mod_nonneg(BigInt const & v, BigInt const & n) {
    BigInt r = v % n;
    if (r < 0) { r += n; }
    return r;
}

// Prints "n" or "n/d" with d > 0.
inline std::string rat_to_string(Rat const & q) {
    if (rat_is_int(q)) { return rat_num(q).str(); }
    return rat_num(q).str() + "/" + rat_den(q).str();
}

// Accepts "n", "-n", "n/d".
std::optional<Rat> rat_parse(std::string const & s);

} // namespace pdv

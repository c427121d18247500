#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <stdexcept>
#include <string>

namespace latsub {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::rational<Int>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an enumeration would exceed the configured work budget.
struct BudgetError : Error {
    int feasible_depth;
    BudgetError(const std::string& msg, int feasible)
        : Error(msg), feasible_depth(feasible) {}
};

inline Rat rat_abs(const Rat& r) { return r < Rat(0) ? -r : r; }

double to_double(const Rat& r);

Rat rat_pow(const Rat& base, long exp);

/// Parses "p/q", integer, or decimal ("0.25", "-1.5e-2") literals exactly.
Rat parse_rational(const std::string& text);

/// Canonical form: "p" when the denominator is 1, else "p/q".
std::string rat_str(const Rat& r);

Int int_pow(Int base, unsigned exp);

Int binomial(long n, long k);

}  // namespace latsub

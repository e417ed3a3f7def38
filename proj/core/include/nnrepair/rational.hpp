#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nnrepair {

/// Exact rational number. Network parameters, property centers and every
/// constant written into an SMT script are held in this type.
using Rational = mpq_class;

/// Parses "-3", "2.5", "1e-3", "-7/2". Throws ParseError.
Rational parse_rational(std::string_view text);

/// The exact binary value of a finite double.
Rational exact_from_double(double value);

/// The shortest decimal that round-trips to `value` (what std::to_chars
/// prints), as an exact rational. Used whenever a double-valued quantity
/// (trained weight, sampled point) enters the exact world.
Rational decimal_from_double(double value);

double to_double(const Rational& value);

/// True when the value has a terminating decimal expansion of at most
/// `max_fraction_digits` digits after the point.
bool has_short_decimal(const Rational& value, int max_fraction_digits = 40);

/// "2.5", "-3", or "1/3" when the decimal expansion does not terminate.
std::string format_rational(const Rational& value);

/// SMT-LIB2 real literal: "2.5", "(- 2.5)", "(/ 1.0 3.0)", "(- (/ 1.0 3.0))".
std::string format_smt_real(const Rational& value);

std::vector<Rational> decimals_from_doubles(std::span<const double> values);
std::vector<double> to_doubles(std::span<const Rational> values);

}  // namespace nnrepair

#include "nnrepair/rational.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "nnrepair/error.hpp"

namespace nnrepair {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (c < '0' || c > '9') {
      return false;
    }
  }
  return true;
}

mpz_class pow10(unsigned long exponent) {
  mpz_class result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
  return result;
}

Rational parse_decimal(std::string_view text, std::string_view original) {
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string_view exp_text = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text[0] == '+' || exp_text[0] == '-')) {
      exp_negative = exp_text[0] == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) {
      throw ParseError("malformed exponent in number '" + std::string(original) + "'");
    }
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) {
      exponent = -exponent;
    }
  }

  std::string digits;
  long fraction_digits = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view whole = mantissa.substr(0, dot);
    std::string_view fraction = mantissa.substr(dot + 1);
    if ((whole.empty() && fraction.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!fraction.empty() && !all_digits(fraction))) {
      throw ParseError("malformed number '" + std::string(original) + "'");
    }
    digits = std::string(whole) + std::string(fraction);
    fraction_digits = static_cast<long>(fraction.size());
  } else {
    if (!all_digits(mantissa)) {
      throw ParseError("malformed number '" + std::string(original) + "'");
    }
    digits = std::string(mantissa);
  }

  Rational value(mpz_class(digits, 10));
  long scale = exponent - fraction_digits;
  if (scale > 0) {
    value *= pow10(static_cast<unsigned long>(scale));
  } else if (scale < 0) {
    value /= pow10(static_cast<unsigned long>(-scale));
  }
  value.canonicalize();
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view original = text;
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) {
    throw ParseError("empty number");
  }
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw ParseError("malformed fraction '" + std::string(original) + "'");
    }
    mpz_class d(std::string(den), 10);
    if (d == 0) {
      throw ParseError("zero denominator in '" + std::string(original) + "'");
    }
    value = Rational(mpz_class(std::string(num), 10), d);
    value.canonicalize();
  } else {
    value = parse_decimal(text, original);
  }
  return negative ? Rational(-value) : value;
}

Rational exact_from_double(double value) {
  if (!std::isfinite(value)) {
    throw InvalidInputError("non-finite value cannot be represented exactly");
  }
  return Rational(value);
}

Rational decimal_from_double(double value) {
  if (!std::isfinite(value)) {
    throw InvalidInputError("non-finite value cannot be represented exactly");
  }
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw InvalidInputError("could not format double");
  }
  return parse_rational(std::string_view(buffer, static_cast<std::size_t>(end - buffer)));
}

double to_double(const Rational& value) { return value.get_d(); }

bool has_short_decimal(const Rational& value, int max_fraction_digits) {
  mpz_class den = value.get_den();
  unsigned long twos = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(2).get_mpz_t());
  unsigned long fives = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(5).get_mpz_t());
  return den == 1 && static_cast<long>(std::max(twos, fives)) <= max_fraction_digits;
}

namespace {

// Precondition: has_short_decimal(value).
std::string decimal_string(const Rational& value, bool force_fraction) {
  mpz_class den = value.get_den();
  mpz_class probe = den;
  unsigned long twos = mpz_remove(probe.get_mpz_t(), probe.get_mpz_t(), mpz_class(2).get_mpz_t());
  unsigned long fives = mpz_remove(probe.get_mpz_t(), probe.get_mpz_t(), mpz_class(5).get_mpz_t());
  unsigned long digits = std::max(twos, fives);

  mpz_class scaled_num = abs(value.get_num()) * pow10(digits) / den;
  std::string text = scaled_num.get_str(10);
  std::string result;
  if (digits == 0) {
    result = text;
    if (force_fraction) {
      result += ".0";
    }
  } else {
    if (text.size() <= digits) {
      text.insert(0, digits - text.size() + 1, '0');
    }
    result = text.substr(0, text.size() - digits) + "." + text.substr(text.size() - digits);
  }
  return result;
}

}  // namespace

std::string format_rational(const Rational& value) {
  std::string sign = sgn(value) < 0 ? "-" : "";
  if (has_short_decimal(value)) {
    return sign + decimal_string(value, false);
  }
  return sign + mpz_class(abs(value.get_num())).get_str(10) + "/" + value.get_den().get_str(10);
}

std::string format_smt_real(const Rational& value) {
  std::string magnitude;
  if (has_short_decimal(value)) {
    magnitude = decimal_string(value, true);
  } else {
    magnitude = "(/ " + mpz_class(abs(value.get_num())).get_str(10) + ".0 " +
                value.get_den().get_str(10) + ".0)";
  }
  return sgn(value) < 0 ? "(- " + magnitude + ")" : magnitude;
}

std::vector<Rational> decimals_from_doubles(std::span<const double> values) {
  std::vector<Rational> out;
  out.reserve(values.size());
  for (double v : values) {
    out.push_back(decimal_from_double(v));
  }
  return out;
}

std::vector<double> to_doubles(std::span<const Rational> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    out.push_back(v.get_d());
  }
  return out;
}

}  // namespace nnrepair

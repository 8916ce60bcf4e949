#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigref {

using rat = boost::multiprecision::cpp_rational;
using bigint = boost::multiprecision::cpp_int;

inline double to_double(const rat& r) { return static_cast<double>(r); }

// Parses a decimal literal ("-1.36", "2", "3e-2") into the exact rational it
// denotes. Exponents keep everything exact: 3e-2 becomes 3/100.
inline rat rat_from_decimal(const std::string& text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    bigint mantissa = 0;
    long frac_digits = 0;
    bool any_digit = false;
    bool seen_dot = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_dot) ++frac_digits;
            any_digit = true;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    long exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool exp_neg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            exp_neg = text[pos] == '-';
            ++pos;
        }
        bool exp_digit = false;
        for (; pos < text.size(); ++pos) {
            char c = text[pos];
            if (c < '0' || c > '9') break;
            exponent = exponent * 10 + (c - '0');
            exp_digit = true;
        }
        if (!exp_digit) throw std::invalid_argument("bad exponent in number: " + text);
        if (exp_neg) exponent = -exponent;
    }
    if (!any_digit || pos != text.size())
        throw std::invalid_argument("not a decimal number: " + text);

    rat value(mantissa);
    long net = exponent - frac_digits;
    bigint scale = 1;
    for (long i = 0; i < std::labs(net); ++i) scale *= 10;
    if (net >= 0)
        value *= rat(scale);
    else
        value /= rat(scale);
    if (negative) value = -value;
    return value;
}

// Parses "22/13" or a decimal literal.
inline rat rat_from_string(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return rat_from_decimal(text);
    rat num = rat_from_decimal(text.substr(0, slash));
    rat den = rat_from_decimal(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + text);
    return num / den;
}

// Exact rational from a double via its shortest round-trip decimal form, so
// the JSON literal 0.35 comes back as 7/20 rather than the binary float.
inline rat rat_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite number");
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return rat_from_decimal(buf);
}

// "22/13" for non-integers, "3" for integers. Stable across runs.
inline std::string rat_to_fraction_string(const rat& r) {
    const bigint num = boost::multiprecision::numerator(r);
    const bigint den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// Fixed-point decimal with round-half-away-from-zero, e.g. digits=2: 1.365 -> "1.37".
inline std::string rat_to_decimal_string(const rat& r, int digits) {
    bigint scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    rat scaled = r * rat(scale);
    bigint num = boost::multiprecision::numerator(scaled);
    bigint den = boost::multiprecision::denominator(scaled);
    bool negative = num < 0;
    if (negative) num = -num;
    bigint q = num / den;
    bigint rem = num % den;
    if (rem * 2 >= den) ++q;
    std::string body = q.str();
    if (digits > 0) {
        if (static_cast<long>(body.size()) <= digits)
            body.insert(0, static_cast<std::size_t>(digits + 1 - body.size()), '0');
        body.insert(body.size() - digits, ".");
    }
    if (negative && q != 0) body.insert(0, "-");
    return body;
}

inline rat rat_abs(const rat& r) { return r < 0 ? rat(-r) : r; }

} // namespace sigref

// Exact rational time arithmetic used throughout the simulation core.
// All schedule timestamps and contention math stay in arbitrary-precision
// rationals; rounding to integer cycles happens only inside the closed-form
// evaluators.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace strata {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline BigInt rat_ceil(const Rat& r) {
    BigInt n = numerator(r);
    BigInt d = denominator(r);  // cpp_rational keeps d > 0
    BigInt q = n / d;
    if (n % d != 0 && n > 0) ++q;
    return q;
}

inline BigInt rat_floor(const Rat& r) {
    BigInt n = numerator(r);
    BigInt d = denominator(r);
    BigInt q = n / d;
    if (n % d != 0 && n < 0) --q;
    return q;
}

inline std::int64_t ceil_to_i64(const Rat& r) {
    BigInt q = rat_ceil(r);
    if (q > std::numeric_limits<std::int64_t>::max() ||
        q < std::numeric_limits<std::int64_t>::min()) {
        throw std::overflow_error("cycle count exceeds 64-bit range");
    }
    return q.convert_to<std::int64_t>();
}

// Canonical text form: plain integer when the denominator is 1, "n/d" otherwise.
// Stable across runs, so traces can be diffed byte-for-byte.
inline std::string rat_str(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

// Fixed-point decimal rendering for report tables (round half up, exact input).
inline std::string rat_decimal(const Rat& r, int digits = 6) {
    BigInt scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    Rat scaled = r * scale;
    BigInt n = numerator(scaled), d = denominator(scaled);
    bool neg = n < 0;
    if (neg) n = -n;
    BigInt q = n / d, rem = n % d;
    if (rem * 2 >= d) ++q;
    std::string digitss = q.str();
    while ((int)digitss.size() <= digits) digitss.insert(digitss.begin(), '0');
    std::string intpart = digitss.substr(0, digitss.size() - digits);
    std::string frac = digitss.substr(digitss.size() - digits);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    std::string out = (neg ? "-" : "") + intpart;
    if (!frac.empty()) out += "." + frac;
    return out;
}

inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(BigInt(s));
    return Rat(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

}  // namespace strata

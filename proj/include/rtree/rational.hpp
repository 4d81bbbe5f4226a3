#pragma once

// Exact rationals for positions, lengths and distances.

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rtree {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Canonical text form: `p/q`, or `p` when the denominator is 1.
inline std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Accepts `p`, `-p`, `p/q`, `-p/q` with decimal integers and q > 0.
inline Rational parse_rational(std::string_view text) {
    auto bad = [&] { return std::invalid_argument("malformed rational '" + std::string(text) + "'"); };
    if (text.empty()) throw bad();
    std::size_t slash = text.find('/');
    auto num = text.substr(0, slash);
    auto den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    auto digits = [](std::string_view s, bool allow_sign) {
        if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
        if (s.empty()) return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };
    if (!digits(num, true) || !digits(den, false)) throw bad();
    std::string n(num);
    if (n[0] == '+') n.erase(0, 1);
    mpz_class d{std::string(den)};
    if (d == 0) throw bad();
    Rational q{mpz_class{n}, d};
    q.canonicalize();
    return q;
}

inline Rational rational_pow(const Rational& base, unsigned long exponent) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
    Rational out(num, den);
    out.canonicalize();
    return out;
}

inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace rtree

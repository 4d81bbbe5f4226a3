#pragma once

/**
 * Ordinals in Cantor normal form.
 *
 * `cnf<E>` is a finite sum  w^e1*c1 + w^e2*c2 + ...  with strictly decreasing
 * exponents e_i of type E and positive natural coefficients c_i.  Two
 * instantiations are used:
 *
 *   Ordinal    = cnf<std::uint64_t>  ordinals below w^w (ranks, complexities)
 *   OrderType  = cnf<Ordinal>        ordinals below w^(w^w) (order types of
 *                                    jump sets, whose exponents are ranks)
 */

#include <cctype>
#include <compare>
#include <cstdint>
#include <algorithm>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rtree {

template <class E>
class cnf;

namespace detail {

template <class E>
struct exponent_traits;

template <>
struct exponent_traits<std::uint64_t> {
    static std::uint64_t zero() { return 0; }
    static std::uint64_t succ(std::uint64_t e) { return e + 1; }
    static bool is_zero(std::uint64_t e) { return e == 0; }
    static std::string str(std::uint64_t e) { return std::to_string(e); }
    static bool is_simple(std::uint64_t) { return true; }
};

}  // namespace detail

template <class E>
class cnf {
public:
    struct term {
        E exponent{};
        std::uint64_t coeff = 0;
        bool operator==(const term&) const = default;
    };

    cnf() = default;

    /// The natural number n.
    static cnf finite(std::uint64_t n) {
        cnf out;
        if (n > 0) out.terms_.push_back({detail::exponent_traits<E>::zero(), n});
        return out;
    }

    /// w^e * c.
    static cnf power(E e, std::uint64_t c = 1) {
        cnf out;
        if (c > 0) out.terms_.push_back({std::move(e), c});
        return out;
    }

    static cnf omega() { return power(detail::exponent_traits<E>::succ(detail::exponent_traits<E>::zero())); }

    /// Builds from a term list; throws unless exponents strictly decrease and coefficients are positive.
    static cnf from_terms(std::vector<term> terms) {
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (terms[i].coeff == 0) throw std::invalid_argument("CNF coefficient must be positive");
            if (i > 0 && !(terms[i].exponent < terms[i - 1].exponent))
                throw std::invalid_argument("CNF exponents must strictly decrease");
        }
        cnf out;
        out.terms_ = std::move(terms);
        return out;
    }

    const std::vector<term>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_finite() const {
        return terms_.empty() || (terms_.size() == 1 && detail::exponent_traits<E>::is_zero(terms_[0].exponent));
    }
    bool is_successor() const {
        return !terms_.empty() && detail::exponent_traits<E>::is_zero(terms_.back().exponent);
    }
    bool is_limit() const { return !terms_.empty() && !is_successor(); }

    /// Value of a finite ordinal; throws otherwise.
    std::uint64_t to_finite() const {
        if (!is_finite()) throw std::domain_error("ordinal is not finite");
        return terms_.empty() ? 0 : terms_[0].coeff;
    }

    /// Leading exponent; throws on zero.
    const E& leading_exponent() const {
        if (terms_.empty()) throw std::domain_error("zero has no leading exponent");
        return terms_.front().exponent;
    }

    std::strong_ordering operator<=>(const cnf& other) const {
        std::size_t n = std::min(terms_.size(), other.terms_.size());
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = terms_[i];
            const auto& b = other.terms_[i];
            if (a.exponent != b.exponent) return a.exponent < b.exponent ? std::strong_ordering::less : std::strong_ordering::greater;
            if (a.coeff != b.coeff) return a.coeff <=> b.coeff;
        }
        return terms_.size() <=> other.terms_.size();
    }
    bool operator==(const cnf& other) const = default;

    /// Ordinal sum; terms of *this below the leading exponent of rhs are absorbed.
    friend cnf operator+(const cnf& lhs, const cnf& rhs) {
        if (rhs.terms_.empty()) return lhs;
        const E& lead = rhs.terms_.front().exponent;
        cnf out;
        for (const auto& t : lhs.terms_) {
            if (t.exponent < lead) break;
            out.terms_.push_back(t);
        }
        auto it = rhs.terms_.begin();
        if (!out.terms_.empty() && out.terms_.back().exponent == lead) {
            out.terms_.back().coeff += it->coeff;
            ++it;
        }
        out.terms_.insert(out.terms_.end(), it, rhs.terms_.end());
        return out;
    }
    cnf& operator+=(const cnf& rhs) { return *this = *this + rhs; }

    cnf succ() const { return *this + finite(1); }

    /// Predecessor of a successor ordinal.
    cnf pred() const {
        if (!is_successor()) throw std::domain_error("predecessor of a non-successor ordinal");
        cnf out = *this;
        if (--out.terms_.back().coeff == 0) out.terms_.pop_back();
        return out;
    }

    /// this * w, for this > 0:  (w^e * c + ...) * w = w^(e+1).
    cnf times_omega() const {
        if (terms_.empty()) return {};
        return power(detail::exponent_traits<E>::succ(terms_.front().exponent));
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i) out += " + ";
            const auto& t = terms_[i];
            using tr = detail::exponent_traits<E>;
            if (tr::is_zero(t.exponent)) {
                out += std::to_string(t.coeff);
                continue;
            }
            out += "w";
            if (!(t.exponent == tr::succ(tr::zero()))) {
                std::string e = tr::str(t.exponent);
                out += tr::is_simple(t.exponent) ? "^" + e : "^(" + e + ")";
            }
            if (t.coeff != 1) out += "*" + std::to_string(t.coeff);
        }
        return out;
    }

private:
    std::vector<term> terms_;
};

using Ordinal = cnf<std::uint64_t>;

namespace detail {

template <>
struct exponent_traits<Ordinal> {
    static Ordinal zero() { return {}; }
    static Ordinal succ(const Ordinal& e) { return e.succ(); }
    static bool is_zero(const Ordinal& e) { return e.is_zero(); }
    static std::string str(const Ordinal& e) { return e.to_string(); }
    static bool is_simple(const Ordinal& e) { return e.is_finite(); }
};

}  // namespace detail

using OrderType = cnf<Ordinal>;

inline std::ostream& operator<<(std::ostream& os, const Ordinal& a) { return os << a.to_string(); }
inline std::ostream& operator<<(std::ostream& os, const OrderType& a) { return os << a.to_string(); }

inline Ordinal omega() { return Ordinal::omega(); }
inline Ordinal ord(std::uint64_t n) { return Ordinal::finite(n); }

/**
 * n-th member (n >= 0) of the canonical strictly increasing sequence of
 * successor ordinals converging to the limit ordinal g.  Writing
 * g = d + w^e*m with e >= 1 the last term, the member is
 * d + w^e*(m-1) + w^(e-1)*n + 1.
 */
inline Ordinal fundamental_seq(const Ordinal& g, std::uint64_t n) {
    if (!g.is_limit()) throw std::domain_error("fundamental sequence requires a limit ordinal, got " + g.to_string());
    auto terms = g.terms();
    auto last = terms.back();
    terms.pop_back();
    Ordinal head = Ordinal::from_terms(terms);
    return head + Ordinal::power(last.exponent, last.coeff - 1) + Ordinal::power(last.exponent - 1, n) + ord(1);
}

/**
 * Parses `w^2*3 + w*1 + 4`, `w`, `w*2`, `0`.  Summands are combined with
 * ordinal addition, so out-of-order input is absorbed as usual.
 */
inline Ordinal parse_ordinal(std::string_view text) {
    std::size_t i = 0;
    auto fail = [&](const std::string& why) {
        return std::invalid_argument("malformed ordinal '" + std::string(text) + "' at column " +
                                     std::to_string(i + 1) + ": " + why);
    };
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto number = [&]() -> std::uint64_t {
        skip_ws();
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) throw fail("expected number");
        std::uint64_t v = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) v = v * 10 + (text[i++] - '0');
        return v;
    };
    Ordinal out;
    bool first = true;
    for (;;) {
        skip_ws();
        if (!first) {
            if (i >= text.size()) break;
            if (text[i] != '+') throw fail("expected '+'");
            ++i;
            skip_ws();
        }
        first = false;
        if (i < text.size() && text[i] == 'w') {
            ++i;
            std::uint64_t e = 1, c = 1;
            skip_ws();
            if (i < text.size() && text[i] == '^') {
                ++i;
                e = number();
            }
            skip_ws();
            if (i < text.size() && text[i] == '*') {
                ++i;
                c = number();
            }
            out += Ordinal::power(e, c);
        } else {
            out += ord(number());
        }
    }
    return out;
}

}  // namespace rtree

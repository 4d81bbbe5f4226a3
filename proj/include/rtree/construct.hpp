#pragma once

/**
 * Escape sequences and their limits.
 *
 * From x, a chain accumulates at rho_x + r: copy n of a witness body of rank
 * beta_n sits in the slot [rho_x + r - r/2^n, rho_x + r - r/2^(n+1)).  The
 * limit is a single terminal cluster; the chain members are its prefixes.
 */

#include "rtree/cbrank.hpp"

namespace rtree {

/// beta_n = value for all n, or fundamental_seq(value, n) for a limit value.
struct BetaSeq {
    Ordinal value;
    bool fundamental = false;

    static BetaSeq constant(Ordinal b) {
        if (!b.is_successor()) throw std::domain_error("constant beta must be a successor ordinal");
        return {std::move(b), false};
    }
    static BetaSeq towards(Ordinal g) {
        if (!g.is_limit()) throw std::domain_error("fundamental sequence needs a limit ordinal");
        return {std::move(g), true};
    }
    /// beta_n for successor alpha is alpha itself, for limit alpha the fundamental sequence.
    static BetaSeq reaching(const Ordinal& alpha) { return alpha.is_limit() ? towards(alpha) : constant(alpha); }

    Ordinal at(std::uint64_t n) const { return fundamental ? fundamental_seq(value, n) : value; }
    Ordinal sup() const { return value; }
};

/// The limit of the chain from x with steps beta_n and radius r: jumps
/// accumulating at rho_x + r, which is also its rho.
inline Element limit_of_chain(const Element& x, const BetaSeq& seq, const Rational& r) {
    if (r <= 0) throw std::domain_error("radius must be positive");
    bool terminal_x = is_terminal(x);
    Label base = terminal_x ? 0 : *final_value(x);
    Label pulse = pulse_label(base);
    Rational L = x.rho + r, half(1, 2);
    JumpBlock cluster = seq.fundamental
                            ? JumpBlock{RampCluster{L, r, half, seq.value, pulse, 0, base, true}}
                            : JumpBlock{LimitCluster{L, r, half, witness_body(seq.value, base, pulse), base, true}};
    if (!terminal_x) {
        auto blocks = x.blocks();
        blocks.push_back(std::move(cluster));
        return make_element(L, std::move(blocks), x.alphabet);
    }
    // x already accumulates at rho_x: continue it with the chain
    return splice(x, make_element(L, {std::move(cluster)}, x.alphabet));
}

/// a_1 = x, a_{n+1} = the limit cut after its first n copies; N members.
inline std::vector<Element> escape_sequence(const Element& x, const BetaSeq& seq, const Rational& r, std::size_t n) {
    if (n == 0) throw std::invalid_argument("escape sequence needs at least one member");
    Element lim = limit_of_chain(x, seq, r);
    std::vector<Element> out{x};
    Rational gap = r;
    for (std::size_t i = 1; i < n; ++i) {
        gap /= 2;
        out.push_back(prefix(lim, lim.rho - gap));
    }
    return out;
}

/// a with x strictly below a, rho_a <= rho_x + r and comp(x, a) = beta.
inline Element escape_step(const Element& x, const Ordinal& beta, const Rational& r) {
    if (!beta.is_successor()) throw std::domain_error("escape_step needs a successor beta >= 1");
    if (r <= 0) throw std::domain_error("radius must be positive");
    if (beta == ord(1)) {
        auto fin = final_value(x);
        Label c = fin && *fin == 0 ? 1 : 0;
        return extend_step(x, c, r);
    }
    return limit_of_chain(x, BetaSeq::reaching(beta.pred()), r);
}

struct EscapeReport {
    Ordinal alpha;
    Alphabet alphabet = Alphabet::finite(2);
    Rational radius;
    std::vector<Element> sequence;
    std::vector<Rational> steps;         // d(a_n, a_{n+1})
    std::vector<Rational> partial_sums;  // sum of the first n steps
    Element limit;
    Rational tail_distance;  // d(a_N, limit)
    Ordinal limit_complexity;
    Ordinal pair_rank;       // rank of P_limit on [rho_{a_1}, rho_limit]
    Ordinal pair_rank_oracle;
    bool chain_increasing = false;
    bool chain_members = false;  // every a_n in T^[alpha]
    bool cauchy_bounds = false;  // d(a_n, a_{n+1}) <= r/2^n and partial sums <= r
    bool tail_bound = false;     // d(a_N, limit) <= r/2^(N-1)
    bool member_alpha = true;
    bool member_alpha_succ = false;

    bool ok() const {
        return chain_increasing && chain_members && cauchy_bounds && tail_bound && !member_alpha && member_alpha_succ &&
               limit_complexity == alpha.succ() && pair_rank == alpha.succ() && pair_rank_oracle == pair_rank;
    }
};

/// Cauchy sequence in T^[alpha] whose limit has complexity alpha + 1.
inline EscapeReport incompleteness_demo(const Ordinal& alpha, const Alphabet& alphabet, std::size_t n) {
    if (alpha.is_zero()) throw std::domain_error("incompleteness demo needs alpha >= 1");
    EscapeReport rep;
    rep.alpha = alpha;
    rep.alphabet = alphabet;
    rep.radius = 1;
    Element x = const_ray(0, alphabet);
    auto seq = BetaSeq::reaching(alpha);
    rep.sequence = escape_sequence(x, seq, rep.radius, n);
    rep.limit = limit_of_chain(x, seq, rep.radius);

    rep.chain_increasing = rep.chain_members = rep.cauchy_bounds = true;
    Rational sum, bound = rep.radius;
    for (std::size_t i = 0; i < rep.sequence.size(); ++i) {
        const auto& a = rep.sequence[i];
        rep.chain_members = rep.chain_members && member(a, alpha);
        if (i + 1 == rep.sequence.size()) break;
        const auto& b = rep.sequence[i + 1];
        rep.chain_increasing = rep.chain_increasing && a.rho < b.rho && leq(a, b);
        bound /= 2;
        Rational d = dist(a, b);
        sum += d;
        rep.steps.push_back(d);
        rep.partial_sums.push_back(sum);
        rep.cauchy_bounds = rep.cauchy_bounds && d <= bound && sum <= rep.radius;
    }
    rep.tail_distance = dist(rep.sequence.back(), rep.limit);
    rep.tail_bound = rep.tail_distance <= rep.radius / rational_pow(Rational(2), n - 1);
    rep.limit_complexity = complexity(rep.limit);
    auto restricted = restrict_set(jump_set(rep.limit), x.rho, rep.limit.rho);
    rep.pair_rank = cb_rank(restricted);
    rep.pair_rank_oracle = rank_from_order_type(restricted);
    rep.member_alpha = member(rep.limit, alpha);
    rep.member_alpha_succ = member(rep.limit, alpha.succ());
    return rep;
}

}  // namespace rtree

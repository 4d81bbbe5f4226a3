#pragma once

/**
 * Jump sets, Cantor-Bendixson derivatives and ranks.
 *
 * A PointSet mirrors the jump grammar with labels stripped.  A ramp carries
 * the number of derivatives already taken, so copy n of PRamp is the k-th
 * derivative of the witness set of rank fundamental_seq(gamma, n + skip).
 *
 * Two independent rank computations are provided:
 *   cb_rank                by structural recursion on the grammar
 *   rank_from_order_type   from the order type in Cantor normal form
 */

#include "rtree/element.hpp"
#include "rtree/metric.hpp"

#include <sstream>

namespace rtree {

struct PointList;
using PointListPtr = std::shared_ptr<const PointList>;

struct Atom {
    Rational pos;
};

struct PLimit {
    Rational limit;
    Rational offset;
    Rational ratio;
    PointListPtr body;
};

struct PRamp {
    Rational limit;
    Rational offset;
    Rational ratio;
    Ordinal gamma;
    std::uint64_t deriv = 0;
    std::uint64_t skip = 0;
};

using PointBlock = std::variant<Atom, PLimit, PRamp>;

struct PointList {
    std::vector<PointBlock> blocks;
    bool empty() const { return blocks.empty(); }
};

using PointSet = PointList;

namespace detail {

inline ClusterGeometry pgeometry(const PointBlock& b) {
    if (auto* c = std::get_if<PLimit>(&b)) return {c->limit, c->offset, c->ratio, false, 0};
    const auto& r = std::get<PRamp>(b);
    return {r.limit, r.offset, r.ratio, false, 0};
}

inline std::vector<PointBlock> map_points(const std::vector<PointBlock>& blocks, const Affine& m) {
    std::vector<PointBlock> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) {
        std::visit(
            [&](const auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                T c = blk;
                if constexpr (std::is_same_v<T, Atom>) {
                    c.pos = m(blk.pos);
                } else {
                    c.limit = m(blk.limit);
                    c.offset = blk.offset * m.scale;
                }
                out.emplace_back(std::move(c));
            },
            b);
    }
    return out;
}

inline std::vector<PointBlock> jump_blocks(const std::vector<JumpBlock>& blocks) {
    std::vector<PointBlock> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) {
        if (auto* s = std::get_if<Step>(&b)) {
            out.push_back(Atom{s->pos});
        } else if (auto* c = std::get_if<LimitCluster>(&b)) {
            out.push_back(PLimit{c->limit, c->offset, c->ratio,
                                 std::make_shared<PointList>(PointList{jump_blocks(c->body->blocks)})});
        } else {
            const auto& r = std::get<RampCluster>(b);
            out.push_back(PRamp{r.limit, r.offset, r.ratio, r.gamma, 0, r.skip});
        }
    }
    return out;
}

}  // namespace detail

/// P_f: closure of the left-variation points of f.
inline PointSet jump_set(const Element& f) { return PointSet{detail::jump_blocks(f.blocks())}; }

inline PointSet derivative(const PointSet& s);

/// Jump set of the canonical witness body of the given successor rank, in [0, 1/2].
inline PointListPtr witness_set(const Ordinal& rank) {
    static std::mutex mutex;
    static std::map<Ordinal, PointListPtr> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(rank); it != cache.end()) return it->second;
    }
    auto set = std::make_shared<PointList>(PointList{detail::jump_blocks(witness_body(rank, 0, 1)->blocks)});
    std::lock_guard lock(mutex);
    return cache.emplace(rank, std::move(set)).first->second;
}

/// k-th derivative of witness_set(rank).
inline PointListPtr derived_witness_set(const Ordinal& rank, std::uint64_t k) {
    if (k == 0) return witness_set(rank);
    static std::mutex mutex;
    static std::map<std::pair<Ordinal, std::uint64_t>, PointListPtr> cache;
    auto key = std::make_pair(rank, k);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto set = std::make_shared<PointList>(derivative(*derived_witness_set(rank, k - 1)));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(set)).first->second;
}

/// Points of copy n of a cluster, in slot coordinates.
inline PointListPtr copy_points(const PointBlock& cluster, std::uint64_t n) {
    if (auto* c = std::get_if<PLimit>(&cluster)) return c->body;
    const auto& r = std::get<PRamp>(cluster);
    return derived_witness_set(fundamental_seq(r.gamma, n + r.skip), r.deriv);
}

/// Non-isolated points.
inline PointSet derivative(const PointSet& s) {
    PointSet out;
    for (const auto& b : s.blocks) {
        if (std::holds_alternative<Atom>(b)) continue;
        if (auto* c = std::get_if<PLimit>(&b)) {
            auto d = derivative(*c->body);
            if (d.empty()) {
                out.blocks.push_back(Atom{c->limit});
            } else {
                out.blocks.push_back(PLimit{c->limit, c->offset, c->ratio, std::make_shared<PointList>(std::move(d))});
            }
        } else {
            PRamp r = std::get<PRamp>(b);
            ++r.deriv;
            out.blocks.push_back(std::move(r));
        }
    }
    return out;
}

/// Least alpha with S^(alpha) empty, by structural recursion.
inline Ordinal cb_rank(const PointSet& s) {
    Ordinal best;
    for (const auto& b : s.blocks) {
        Ordinal r;
        if (std::holds_alternative<Atom>(b)) {
            r = ord(1);
        } else if (auto* c = std::get_if<PLimit>(&b)) {
            r = cb_rank(*c->body).succ();
        } else {
            // unbounded copy ranks below gamma: the limit point survives to stage gamma
            r = std::get<PRamp>(b).gamma.succ();
        }
        if (r > best) best = r;
    }
    return best;
}

namespace detail {

/// sup of the leading exponents of an increasing family e(n), sampled at two
/// consecutive indices; exact for the families fundamental_seq produces,
/// which grow in one CNF term linearly in n.
inline Ordinal exponent_sup(const Ordinal& a, const Ordinal& b) {
    if (a == b) return a.succ();
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    std::vector<Ordinal::term> head;
    std::size_t i = 0;
    while (i < ta.size() && i < tb.size() && ta[i] == tb[i]) head.push_back(ta[i++]);
    if (i >= tb.size()) throw std::logic_error("exponent family is not increasing");
    std::uint64_t j = tb[i].exponent;
    return Ordinal::from_terms(head) + Ordinal::power(j + 1);
}

}  // namespace detail

/// Order type of a compact well-ordered set.
inline OrderType order_type(const PointSet& s) {
    OrderType out;
    for (const auto& b : s.blocks) {
        if (std::holds_alternative<Atom>(b)) {
            out += OrderType::finite(1);
        } else if (auto* c = std::get_if<PLimit>(&b)) {
            // otype(body) * w, then the limit point
            out += order_type(*c->body).times_omega() + OrderType::finite(1);
        } else {
            // sum over copies of w^(e_n)*..., with e_n increasing: w^(sup e_n), then the limit point
            const auto& r = std::get<PRamp>(b);
            std::uint64_t n0 = r.deriv + 2;
            auto e0 = order_type(*copy_points(b, n0)).leading_exponent();
            auto e1 = order_type(*copy_points(b, n0 + 1)).leading_exponent();
            out += OrderType::power(detail::exponent_sup(e0, e1)) + OrderType::finite(1);
        }
    }
    return out;
}

/// Rank of a compact well-ordered set of order type d: 0 if empty, else e+1
/// for e the leading exponent of d-1 (1 when d is finite).
inline Ordinal rank_from_order_type(const OrderType& d) {
    if (d.is_zero()) return {};
    auto below = d.pred();
    if (below.is_zero()) return ord(1);
    return below.leading_exponent().succ();
}

inline Ordinal rank_from_order_type(const PointSet& s) { return rank_from_order_type(order_type(s)); }

/// S intersected with [lo, hi].
inline PointSet restrict_set(const PointSet& s, const Rational& lo, const Rational& hi) {
    if (lo > hi) throw std::domain_error("restrict_set: empty interval");
    PointSet out;
    for (const auto& b : s.blocks) {
        if (auto* a = std::get_if<Atom>(&b)) {
            if (lo <= a->pos && a->pos <= hi) out.blocks.push_back(*a);
            continue;
        }
        auto g = detail::pgeometry(b);
        if (g.limit < lo || g.limit - g.offset > hi) continue;
        if (g.limit == lo) {
            out.blocks.push_back(Atom{g.limit});
            continue;
        }
        Rational qn(1);
        for (std::uint64_t n = 0;; ++n, qn *= g.ratio) {
            Affine m = slot_map(g.limit, g.offset, g.ratio, qn);
            Rational start = m(Rational(0)), end = m(Rational(1));
            if (start > hi) break;
            if (end <= lo) continue;
            if (start >= lo && g.limit <= hi) {
                std::visit(
                    [&](const auto& blk) {
                        using T = std::decay_t<decltype(blk)>;
                        if constexpr (!std::is_same_v<T, Atom>) {
                            T c = blk;
                            c.offset = blk.offset * qn;
                            if constexpr (std::is_same_v<T, PRamp>) c.skip += n;
                            out.blocks.push_back(std::move(c));
                        }
                    },
                    b);
                break;
            }
            PointSet copy{detail::map_points(copy_points(b, n)->blocks, m)};
            auto part = restrict_set(copy, lo, hi);
            out.blocks.insert(out.blocks.end(), part.blocks.begin(), part.blocks.end());
        }
    }
    return out;
}

inline Ordinal complexity(const Element& f) { return cb_rank(jump_set(f)); }

/// comp(a, b): rank of P_b on [rho_a, rho_b], for a strictly below b.
inline Ordinal pair_complexity(const Element& a, const Element& b) {
    if (!(a.rho < b.rho) || !leq(a, b)) throw std::invalid_argument("pair_complexity needs a strictly below b");
    return cb_rank(restrict_set(jump_set(b), a.rho, b.rho));
}

/// f lies in T^[alpha].
inline bool member(const Element& f, const Ordinal& alpha) { return complexity(f) <= alpha; }

/// Element of complexity exactly alpha with jumps in [at - width, at] and rho = at + width.
inline Element witness(const Ordinal& alpha, const Rational& at, const Rational& width, const Alphabet& alphabet) {
    if (!alpha.is_successor())
        throw std::domain_error("no witness of rank " + alpha.to_string() +
                                ": nonempty compact countable sets have successor rank");
    if (width <= 0) throw std::domain_error("witness width must be positive");
    auto body = witness_body(alpha, 0, 1);
    Affine m{2 * width, at - width};
    return make_element(at + width, map_blocks(body->blocks, m), alphabet);
}

namespace detail {

inline void write_points(std::ostream& os, const std::vector<PointBlock>& blocks) {
    os << '[';
    bool first = true;
    for (const auto& b : blocks) {
        if (!first) os << ' ';
        first = false;
        if (auto* a = std::get_if<Atom>(&b)) {
            os << "(atom " << to_string(a->pos) << ')';
        } else if (auto* c = std::get_if<PLimit>(&b)) {
            os << "(lim :at " << to_string(c->limit) << " :off " << to_string(c->offset) << " :ratio "
               << to_string(c->ratio) << " :body ";
            write_points(os, c->body->blocks);
            os << ')';
        } else {
            const auto& r = std::get<PRamp>(b);
            std::string g = r.gamma.to_string();
            g.erase(std::remove(g.begin(), g.end(), ' '), g.end());
            os << "(ramp :at " << to_string(r.limit) << " :off " << to_string(r.offset) << " :ratio "
               << to_string(r.ratio) << " :gamma " << g << " :deriv " << r.deriv << " :skip " << r.skip << ')';
        }
    }
    os << ']';
}

}  // namespace detail

inline std::string serialize(const PointSet& s) {
    std::ostringstream os;
    os << "(pset ";
    detail::write_points(os, s.blocks);
    os << ')';
    return os.str();
}

}  // namespace rtree

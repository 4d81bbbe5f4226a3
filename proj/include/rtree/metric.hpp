#pragma once

/**
 * Prefix order, wedge and distance.
 *
 * Everything reduces to the common prefix length s(f, g): the sup of the t
 * with f = g on (-inf, t).  It is found by merging the two jump streams in
 * position order, unfolding cluster copies lazily.  When both streams enter
 * copies of clusters accumulating at the same point L and their futures up to
 * L are provably equal, both jump straight to L:
 *
 *   - same body, ratio, base and slot: the streams are identical up to L;
 *   - otherwise the pair state (bodies, ratios, bases, ratio of the distances
 *     to L) is remembered; meeting it again means the stretch in between
 *     repeats forever, scaled towards L.
 *
 * Anything else is unfolded until a mismatch or the event cap, which raises
 * undecided_error.
 */

#include "rtree/element.hpp"

#include <atomic>
#include <cstdlib>
#include <set>

namespace rtree {

namespace detail {

inline std::atomic<std::uint64_t>& cap_storage() {
    static std::atomic<std::uint64_t> cap = [] {
        std::uint64_t v = 100000;
        if (const char* env = std::getenv("RTREE_UNFOLD_CAP")) {
            char* end = nullptr;
            auto parsed = std::strtoull(env, &end, 10);
            if (end && *end == '\0' && parsed > 0) v = parsed;
        }
        return v;
    }();
    return cap;
}

inline std::atomic<std::uint64_t>& undecided_storage() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}

}  // namespace detail

/// Events a single comparison may unfold before giving up.
inline std::uint64_t unfold_cap() { return detail::cap_storage().load(); }
inline void set_unfold_cap(std::uint64_t cap) {
    if (cap == 0) throw std::invalid_argument("unfold cap must be at least 1");
    detail::cap_storage().store(cap);
}
/// Number of undecided comparisons so far in this process.
inline std::uint64_t undecided_count() { return detail::undecided_storage().load(); }

namespace detail {

class EventCursor {
public:
    struct Event {
        bool end = false;
        Rational pos;
        Label label = 0;
    };

    struct Frame {
        JumpListPtr hold;  // keeps copy bodies alive
        const std::vector<JumpBlock>* blocks = nullptr;
        Affine map;
        std::size_t idx = 0;
        // copy frames only
        const JumpBlock* cluster = nullptr;
        Affine parent_map;
        std::uint64_t copy = 0;
        Rational qpow;
        Label base = 0;
        bool fresh = false;

        Rational abs_limit() const { return parent_map(geometry(*cluster).limit); }
        Rational abs_distance() const { return parent_map.scale * geometry(*cluster).offset * qpow; }
    };

    explicit EventCursor(const Element& f) : rho_(f.rho) {
        frames_.push_back(Frame{nullptr, &f.blocks(), Affine{}, 0, nullptr, {}, 0, Rational(1), 0, false});
    }

    Label current() const { return cur_; }

    Event peek() {
        for (;;) {
            if (ended_) return {true, rho_, 0};
            Frame& fr = frames_.back();
            if (fr.idx < fr.blocks->size()) {
                const JumpBlock& b = (*fr.blocks)[fr.idx];
                if (auto* s = std::get_if<Step>(&b)) return {false, fr.map(s->pos), s->label};
                push_copy(b, fr.map, 0, Rational(1));
                continue;
            }
            if (frames_.size() == 1) {
                ended_ = true;
                continue;
            }
            // copy finished; bodies return to base, so the next copy sees the same input
            Frame done = std::move(frames_.back());
            frames_.pop_back();
            push_copy(*done.cluster, done.parent_map, done.copy + 1, done.qpow * geometry(*done.cluster).ratio);
        }
    }

    void consume() {
        Frame& fr = frames_.back();
        cur_ = std::get<Step>((*fr.blocks)[fr.idx]).label;
        ++fr.idx;
        for (auto& f : frames_) f.fresh = false;
    }

    /// Copy frames entered since the last consume.
    std::vector<std::size_t> fresh_levels() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 1; i < frames_.size(); ++i)
            if (frames_[i].fresh) out.push_back(i);
        return out;
    }

    const Frame& frame(std::size_t i) const { return frames_[i]; }

    /// Jumps to the limit of the cluster whose copy sits at depth i.
    /// Returns false when that cluster is terminal (the stream ends there).
    bool skip_to_limit(std::size_t i) {
        const JumpBlock* cluster = frames_[i].cluster;
        frames_.resize(i);
        for (auto& f : frames_) f.fresh = false;
        auto g = geometry(*cluster);
        if (g.terminal) {
            ended_ = true;
            return false;
        }
        cur_ = g.at_label;
        ++frames_.back().idx;
        return true;
    }

private:
    void push_copy(const JumpBlock& cluster, const Affine& parent, std::uint64_t n, Rational qpow) {
        auto g = geometry(cluster);
        auto body = copy_body(cluster, n, cur_);
        Affine m = parent.after(slot_map(g.limit, g.offset, g.ratio, qpow));
        Frame fr{body, &body->blocks, m, 0, &cluster, parent, n, std::move(qpow), cur_, true};
        frames_.push_back(std::move(fr));
    }

    Rational rho_;
    std::vector<Frame> frames_;
    Label cur_ = 0;
    bool ended_ = false;
};

using CycleKey = std::tuple<Rational, const void*, Rational, Label, const void*, Rational, Label, Rational>;

enum class SkipResult { none, continued, stop };

/// Tries to jump both cursors to a shared accumulation point.
inline SkipResult try_skip(EventCursor& a, EventCursor& b, std::set<CycleKey>& seen, Rational& stop_at) {
    auto fa = a.fresh_levels();
    auto fb = b.fresh_levels();
    for (auto i : fa) {
        const auto& x = a.frame(i);
        Rational L = x.abs_limit();
        for (auto j : fb) {
            const auto& y = b.frame(j);
            if (y.abs_limit() != L) continue;
            Rational dx = x.abs_distance(), dy = y.abs_distance();
            bool skip = false;
            auto* cx = std::get_if<LimitCluster>(x.cluster);
            auto* cy = std::get_if<LimitCluster>(y.cluster);
            if (cx && cy) {
                if (cx->ratio == cy->ratio && dx == dy && x.base == y.base &&
                    (cx->body == cy->body || *cx->body == *cy->body)) {
                    skip = true;
                } else {
                    CycleKey key{L, cx->body.get(), cx->ratio, x.base, cy->body.get(), cy->ratio, y.base, dx / dy};
                    skip = !seen.insert(std::move(key)).second;
                }
            } else if (!cx && !cy) {
                const auto& rx = std::get<RampCluster>(*x.cluster);
                const auto& ry = std::get<RampCluster>(*y.cluster);
                skip = rx.gamma == ry.gamma && rx.ratio == ry.ratio && rx.pulse == ry.pulse && x.base == y.base &&
                       x.copy + rx.skip == y.copy + ry.skip && dx == dy;
            }
            if (!skip) continue;
            bool more_a = a.skip_to_limit(i);
            bool more_b = b.skip_to_limit(j);
            if (!more_a || !more_b || a.current() != b.current()) {
                stop_at = L;
                return SkipResult::stop;
            }
            return SkipResult::continued;
        }
    }
    return SkipResult::none;
}

inline void require_same_alphabet(const Element& f, const Element& g) {
    if (!(f.alphabet == g.alphabet))
        throw std::invalid_argument("alphabet mismatch: " + f.alphabet.to_string() + " vs " + g.alphabet.to_string());
}

}  // namespace detail

/// rho of f ^ g: the length of the longest common prefix.
inline Rational common_prefix_length(const Element& f, const Element& g, std::uint64_t cap = unfold_cap()) {
    detail::require_same_alphabet(f, g);
    detail::EventCursor a(f), b(g);
    std::set<detail::CycleKey> seen;
    Rational stop;
    for (std::uint64_t steps = 0;; ++steps) {
        if (steps >= cap) {
            ++detail::undecided_storage();
            throw undecided_error("comparison undecided after " + std::to_string(cap) + " events");
        }
        auto ea = a.peek();
        auto eb = b.peek();
        auto r = detail::try_skip(a, b, seen, stop);
        if (r == detail::SkipResult::stop) return stop;
        if (r == detail::SkipResult::continued) continue;
        if (!ea.end && !eb.end && ea.pos == eb.pos && ea.label == eb.label) {
            a.consume();
            b.consume();
            continue;
        }
        Rational s = f.rho < g.rho ? f.rho : g.rho;
        if (!ea.end && ea.pos < s) s = ea.pos;
        if (!eb.end && eb.pos < s) s = eb.pos;
        return s;
    }
}

inline Element wedge(const Element& f, const Element& g) { return prefix(f, common_prefix_length(f, g)); }

/// f is a prefix of g.
inline bool leq(const Element& f, const Element& g) {
    if (f.rho > g.rho) {
        detail::require_same_alphabet(f, g);
        return false;
    }
    return common_prefix_length(f, g) == f.rho;
}

inline Rational dist(const Element& f, const Element& g) {
    return f.rho + g.rho - 2 * common_prefix_length(f, g);
}

/// Semantic equality (distance zero).
inline bool same_point(const Element& f, const Element& g) { return f.rho == g.rho && leq(f, g); }

/// The point at distance t from f on the geodesic from f to g.
inline Element point_on_segment(const Element& f, const Element& g, const Rational& t) {
    Rational s = common_prefix_length(f, g);
    Rational down = f.rho - s;
    if (t < 0 || t > down + (g.rho - s)) throw std::domain_error("segment parameter out of range");
    if (t <= down) return prefix(f, f.rho - t);
    return prefix(g, s + (t - down));
}

struct Direction {
    bool down = true;
    Label label = 0;  // Up only

    static Direction make_down() { return {true, 0}; }
    static Direction up(Label l) { return {false, l}; }
    bool operator==(const Direction&) const = default;
    auto operator<=>(const Direction&) const = default;
    std::string to_string() const { return down ? "down" : "up " + std::to_string(label); }
};

/// The component of T - {x} containing g.
inline Direction classify_direction(const Element& x, const Element& g) {
    Rational s = common_prefix_length(x, g);
    if (s < x.rho) return Direction::make_down();
    if (g.rho == x.rho) throw std::invalid_argument("classify_direction: g equals x");
    return Direction::up(eval(g, x.rho));
}

/// One representative per direction at x: kappa of them for a finite alphabet.
inline std::vector<std::pair<Direction, Element>> enumerate_directions(const Element& x) {
    if (!x.alphabet.is_finite()) throw std::invalid_argument("directions of a countable alphabet cannot be enumerated");
    std::vector<std::pair<Direction, Element>> out;
    out.emplace_back(Direction::make_down(), prefix(x, x.rho - 1));
    for (Label c = 0; c < x.alphabet.size(); ++c) out.emplace_back(Direction::up(c), extend_step(x, c, 1));
    return out;
}

}  // namespace rtree

#pragma once

/**
 * Points of the universal real tree.
 *
 * A point is a function f: (-inf, rho) -> labels that is 0 far to the left and
 * constant on some [t, t+eps) at every t.  Its jump structure is a finite list
 * of blocks:
 *
 *   Step(pos, label)        the value becomes `label` at `pos`
 *   LimitCluster            copies n = 0, 1, ... of a body placed in the slots
 *                             [limit - off*q^n, limit - off*q^(n+1)),
 *                           then the value `at_label` from `limit` on
 *   RampCluster             as LimitCluster, but copy n is the canonical
 *                           witness body of rank fundamental_seq(gamma, n+skip)
 *
 * Bodies live in slot coordinates [0, 1) and must return to the value in force
 * when the copy starts (the cluster's base), so every copy sees the same input.
 * A cluster flagged `terminal` has limit == rho and no value at its limit.
 *
 * All library operations take and return normalized elements: no step repeats
 * the value in force, no empty clusters.  Equality of normalized elements is
 * structural.
 */

#include "rtree/errors.hpp"
#include "rtree/ordinal.hpp"
#include "rtree/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace rtree {

using Label = std::uint64_t;

class Alphabet {
public:
    enum class Kind { finite, countable };

    /// Labels {0, ..., size-1}; models kappa = size + 1.
    static Alphabet finite(std::uint64_t size) {
        if (size < 2) throw std::invalid_argument("finite alphabet needs at least 2 labels (kappa >= 3)");
        return Alphabet(Kind::finite, size);
    }
    static Alphabet countable() { return Alphabet(Kind::countable, 0); }
    /// Alphabet with kappa(finite) = k.
    static Alphabet for_kappa(std::uint64_t k) {
        if (k < 3) throw std::invalid_argument("kappa must be at least 3");
        return finite(k - 1);
    }

    Kind kind() const { return kind_; }
    std::uint64_t size() const { return size_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    bool contains(Label l) const { return kind_ == Kind::countable || l < size_; }
    std::optional<std::uint64_t> kappa() const {
        if (kind_ == Kind::finite) return size_ + 1;
        return std::nullopt;
    }
    std::string to_string() const {
        return kind_ == Kind::finite ? "(alphabet finite " + std::to_string(size_) + ")" : "(alphabet countable)";
    }
    bool operator==(const Alphabet&) const = default;

private:
    Alphabet(Kind k, std::uint64_t s) : kind_(k), size_(s) {}
    Kind kind_;
    std::uint64_t size_;
};

/// Smallest label different from `base`.
inline Label pulse_label(Label base) { return base == 0 ? 1 : 0; }

struct JumpList;
using JumpListPtr = std::shared_ptr<const JumpList>;

struct Step {
    Rational pos;
    Label label = 0;
};

struct LimitCluster {
    Rational limit;
    Rational offset;
    Rational ratio;
    JumpListPtr body;
    Label at_label = 0;
    bool terminal = false;
};

struct RampCluster {
    Rational limit;
    Rational offset;
    Rational ratio;
    Ordinal gamma;
    Label pulse = 1;
    std::uint64_t skip = 0;
    Label at_label = 0;
    bool terminal = false;
};

using JumpBlock = std::variant<Step, LimitCluster, RampCluster>;

struct JumpList {
    std::vector<JumpBlock> blocks;
};

bool operator==(const JumpList& a, const JumpList& b);

inline bool operator==(const Step& a, const Step& b) { return a.pos == b.pos && a.label == b.label; }
inline bool operator==(const LimitCluster& a, const LimitCluster& b) {
    return a.limit == b.limit && a.offset == b.offset && a.ratio == b.ratio && a.at_label == b.at_label &&
           a.terminal == b.terminal && (a.body == b.body || *a.body == *b.body);
}
inline bool operator==(const RampCluster& a, const RampCluster& b) {
    return a.limit == b.limit && a.offset == b.offset && a.ratio == b.ratio && a.gamma == b.gamma &&
           a.pulse == b.pulse && a.skip == b.skip && a.at_label == b.at_label && a.terminal == b.terminal;
}
inline bool operator==(const JumpList& a, const JumpList& b) { return a.blocks == b.blocks; }

struct Element {
    Rational rho;
    JumpList jumps;
    Alphabet alphabet = Alphabet::finite(2);

    const std::vector<JumpBlock>& blocks() const { return jumps.blocks; }
    bool operator==(const Element& o) const { return rho == o.rho && alphabet == o.alphabet && jumps == o.jumps; }
};

// ---------------------------------------------------------------------------
// Cluster geometry

struct ClusterGeometry {
    Rational limit;
    Rational offset;
    Rational ratio;
    bool terminal = false;
    Label at_label = 0;
};

inline bool is_cluster(const JumpBlock& b) { return !std::holds_alternative<Step>(b); }

inline ClusterGeometry geometry(const JumpBlock& b) {
    if (auto* c = std::get_if<LimitCluster>(&b)) return {c->limit, c->offset, c->ratio, c->terminal, c->at_label};
    if (auto* r = std::get_if<RampCluster>(&b)) return {r->limit, r->offset, r->ratio, r->terminal, r->at_label};
    throw std::logic_error("geometry of a step");
}

/// First point of the closure of a block.
inline Rational span_start(const JumpBlock& b) {
    if (auto* s = std::get_if<Step>(&b)) return s->pos;
    auto g = geometry(b);
    return g.limit - g.offset;
}

/// Last point of the closure of a block.
inline Rational span_end(const JumpBlock& b) {
    if (auto* s = std::get_if<Step>(&b)) return s->pos;
    return geometry(b).limit;
}

struct Affine {
    Rational scale{1};
    Rational shift{0};

    Rational operator()(const Rational& u) const { return scale * u + shift; }
    /// (*this) after `inner`.
    Affine after(const Affine& inner) const { return {scale * inner.scale, scale * inner.shift + shift}; }
};

/// Map from slot coordinates [0,1) of copy n onto [limit - off*q^n, limit - off*q^(n+1)).
inline Affine slot_map(const Rational& limit, const Rational& offset, const Rational& ratio, const Rational& ratio_pow) {
    Rational head = offset * ratio_pow;
    return {head * (1 - ratio), limit - head};
}

inline Affine slot_map(const ClusterGeometry& g, std::uint64_t n) {
    return slot_map(g.limit, g.offset, g.ratio, rational_pow(g.ratio, n));
}

/// Image of a block list under an increasing affine map.
inline std::vector<JumpBlock> map_blocks(const std::vector<JumpBlock>& blocks, const Affine& m) {
    std::vector<JumpBlock> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) {
        std::visit(
            [&](const auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                T c = blk;
                if constexpr (std::is_same_v<T, Step>) {
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

// ---------------------------------------------------------------------------
// Canonical witness bodies

/**
 * Body in slot coordinates whose jump set has Cantor-Bendixson rank `rank`
 * (a successor >= 1), starting and ending at `base` and using `pulse` as the
 * excursion label.  All its jumps lie in [0, 1/2].
 *
 *   rank 1          pulse:  up to `pulse` at 0, back to `base` at 1/2
 *   rank d+1        LimitCluster(limit 1/2, off 1/2, ratio 1/2) of rank-d bodies
 *   rank g+1        RampCluster(limit 1/2, off 1/2, ratio 1/2, gamma g), g limit
 */
inline JumpListPtr witness_body(const Ordinal& rank, Label base, Label pulse) {
    if (!rank.is_successor()) throw std::domain_error("witness rank must be a successor ordinal, got " + rank.to_string());
    static std::mutex mutex;
    static std::map<std::tuple<Ordinal, Label, Label>, JumpListPtr> cache;
    auto key = std::make_tuple(rank, base, pulse);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto body = std::make_shared<JumpList>();
    Rational half(1, 2);
    if (rank == ord(1)) {
        body->blocks = {Step{Rational(0), pulse}, Step{half, base}};
    } else {
        Ordinal below = rank.pred();
        if (below.is_successor()) {
            body->blocks = {LimitCluster{half, half, half, witness_body(below, base, pulse), base, false}};
        } else {
            body->blocks = {RampCluster{half, half, half, below, pulse, 0, base, false}};
        }
    }
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(body)).first->second;
}

/// Body of copy n of a cluster whose copies start at value `base`.
inline JumpListPtr copy_body(const JumpBlock& cluster, std::uint64_t n, Label base) {
    if (auto* c = std::get_if<LimitCluster>(&cluster)) return c->body;
    const auto& r = std::get<RampCluster>(cluster);
    return witness_body(fundamental_seq(r.gamma, n + r.skip), base, r.pulse);
}

/// The cluster restricted to its copies m, m+1, ...
inline JumpBlock cluster_tail(const JumpBlock& cluster, std::uint64_t m) {
    return std::visit(
        [&](const auto& blk) -> JumpBlock {
            using T = std::decay_t<decltype(blk)>;
            if constexpr (std::is_same_v<T, Step>) {
                throw std::logic_error("tail of a step");
            } else {
                T c = blk;
                c.offset = blk.offset * rational_pow(blk.ratio, m);
                if constexpr (std::is_same_v<T, RampCluster>) c.skip += m;
                return c;
            }
        },
        cluster);
}

// ---------------------------------------------------------------------------
// Normalization

namespace detail {

struct Frame {
    bool top_level;
    Rational upper;  // rho for the top level, 1 for bodies
};

/// Normalizes `in` given the incoming value; returns the value in force after
/// the last block (nullopt after a terminal cluster).  Sets `changed` when the
/// output differs from the input.
inline std::optional<Label> normalize_blocks(const std::vector<JumpBlock>& in, Label incoming, const Frame& frame,
                                             const Alphabet& alphabet, std::vector<std::size_t>& path,
                                             std::vector<JumpBlock>& out, bool& changed) {
    auto fail = [&](const std::string& why) { return invalid_element(why, path); };
    auto check_label = [&](Label l) {
        if (!alphabet.contains(l)) throw fail("label " + std::to_string(l) + " outside " + alphabet.to_string());
    };
    std::optional<Label> cur = incoming;
    std::optional<Rational> prev_end;
    for (std::size_t i = 0; i < in.size(); ++i) {
        path.push_back(i);
        const JumpBlock& b = in[i];
        if (!cur) throw fail("block after a terminal cluster");
        Rational start = span_start(b);
        if (prev_end ? start <= *prev_end : (!frame.top_level && start < 0))
            throw fail("blocks overlap or are out of order");
        if (auto* s = std::get_if<Step>(&b)) {
            check_label(s->label);
            if (s->pos >= frame.upper) throw fail("jump position " + to_string(s->pos) + " >= " + to_string(frame.upper));
            prev_end = s->pos;
            if (s->label == *cur) {
                changed = true;
            } else {
                out.push_back(*s);
                cur = s->label;
            }
            path.pop_back();
            continue;
        }
        auto g = geometry(b);
        if (g.offset <= 0) throw fail("cluster offset must be positive");
        if (g.ratio <= 0 || g.ratio >= 1) throw fail("cluster ratio must lie in (0,1)");
        check_label(g.at_label);
        bool last = i + 1 == in.size();
        if (g.terminal) {
            if (!frame.top_level) throw fail("terminal cluster inside a body");
            if (!last || g.limit != frame.upper) throw fail("terminal cluster must be last with limit = rho");
        } else if (g.limit >= frame.upper) {
            throw fail("cluster limit " + to_string(g.limit) + " >= " + to_string(frame.upper));
        }
        prev_end = g.limit;
        Label base = *cur;
        if (auto* c = std::get_if<LimitCluster>(&b)) {
            if (!c->body) throw fail("cluster without body");
            std::vector<JumpBlock> body;
            bool body_changed = false;
            auto end = normalize_blocks(c->body->blocks, base, Frame{false, Rational(1)}, alphabet, path, body,
                                        body_changed);
            if (!end || *end != base) throw fail("cluster body must return to the value in force before the cluster");
            if (body.empty()) {
                // no jumps at all: only the limit value remains
                changed = true;
                if (!g.terminal && g.at_label != base) {
                    out.push_back(Step{g.limit, g.at_label});
                    cur = g.at_label;
                }
                if (g.terminal) cur = std::nullopt;
                path.pop_back();
                continue;
            }
            LimitCluster n = *c;
            if (body_changed) {
                n.body = std::make_shared<JumpList>(JumpList{std::move(body)});
                changed = true;
            }
            if (n.terminal && n.at_label != base) {
                n.at_label = base;
                changed = true;
            }
            out.push_back(std::move(n));
        } else {
            const auto& r = std::get<RampCluster>(b);
            if (!r.gamma.is_limit()) throw fail("ramp gamma must be a limit ordinal");
            check_label(r.pulse);
            if (r.pulse == base) throw fail("ramp pulse label equals the value in force before the cluster");
            RampCluster n = r;
            if (n.terminal && n.at_label != base) {
                n.at_label = base;
                changed = true;
            }
            out.push_back(std::move(n));
        }
        cur = g.terminal ? std::nullopt : std::optional<Label>(g.at_label);
        path.pop_back();
    }
    return cur;
}

}  // namespace detail

/// Canonical form; throws invalid_element on malformed input.
inline Element normalize(const Element& f) {
    std::vector<std::size_t> path;
    std::vector<JumpBlock> out;
    bool changed = false;
    detail::normalize_blocks(f.jumps.blocks, 0, detail::Frame{true, f.rho}, f.alphabet, path, out, changed);
    if (!changed) return f;
    return Element{f.rho, JumpList{std::move(out)}, f.alphabet};
}

inline Element make_element(Rational rho, std::vector<JumpBlock> blocks, Alphabet alphabet) {
    return normalize(Element{std::move(rho), JumpList{std::move(blocks)}, alphabet});
}

// ---------------------------------------------------------------------------
// Basic queries

/// c_l: the constant-0 function on (-inf, l).
inline Element const_ray(Rational l, Alphabet alphabet) { return Element{std::move(l), {}, alphabet}; }

inline bool is_terminal(const Element& f) {
    return !f.blocks().empty() && is_cluster(f.blocks().back()) && geometry(f.blocks().back()).terminal;
}

/// Value on (rho - eps, rho); nullopt when jumps accumulate at rho.
inline std::optional<Label> final_value(const Element& f) {
    if (f.blocks().empty()) return Label{0};
    const auto& b = f.blocks().back();
    if (auto* s = std::get_if<Step>(&b)) return s->label;
    auto g = geometry(b);
    if (g.terminal) return std::nullopt;
    return g.at_label;
}

namespace detail {

inline Rational first_jump(const std::vector<JumpBlock>& blocks, const Affine& m) {
    const auto& b = blocks.front();
    if (auto* s = std::get_if<Step>(&b)) return m(s->pos);
    auto g = geometry(b);
    // where a witness body jumps does not depend on its base
    return first_jump(copy_body(b, 0, 0)->blocks, m.after(slot_map(g, 0)));
}

}  // namespace detail

/// Start of the first jump, or rho when f has none.
inline Rational tau(const Element& f) {
    if (f.blocks().empty()) return f.rho;
    return detail::first_jump(f.blocks(), Affine{});
}

/// Index n of the slot of the cluster that contains t, for limit - off <= t < limit.
inline std::uint64_t copy_index(const ClusterGeometry& g, const Rational& t) {
    std::uint64_t n = 0;
    Rational rest = g.offset * g.ratio;  // distance from slot n's end to the limit
    while (g.limit - rest <= t) {
        rest *= g.ratio;
        ++n;
    }
    return n;
}

namespace detail {

inline Label eval_blocks(const std::vector<JumpBlock>& blocks, Label incoming, const Rational& t) {
    Label cur = incoming;
    for (const auto& b : blocks) {
        if (auto* s = std::get_if<Step>(&b)) {
            if (s->pos > t) return cur;
            cur = s->label;
            continue;
        }
        auto g = geometry(b);
        if (t < g.limit - g.offset) return cur;
        if (t >= g.limit) {
            cur = g.at_label;
            continue;
        }
        auto n = copy_index(g, t);
        auto body = copy_body(b, n, cur);
        return eval_blocks(map_blocks(body->blocks, slot_map(g, n)), cur, t);
    }
    return cur;
}

}  // namespace detail

/// f(t) for t < rho.
inline Label eval(const Element& f, const Rational& t) {
    if (t >= f.rho) throw std::domain_error("eval at " + to_string(t) + " outside domain (-inf, " + to_string(f.rho) + ")");
    return detail::eval_blocks(f.blocks(), 0, t);
}

// ---------------------------------------------------------------------------
// Restriction and splicing

namespace detail {

/// Appends the restriction of `blocks` to (-inf, s).
inline void cut_below(const std::vector<JumpBlock>& blocks, Label incoming, const Rational& s,
                      std::vector<JumpBlock>& out) {
    Label cur = incoming;
    for (const auto& b : blocks) {
        if (auto* st = std::get_if<Step>(&b)) {
            if (st->pos >= s) return;
            out.push_back(b);
            cur = st->label;
            continue;
        }
        auto g = geometry(b);
        if (s <= g.limit - g.offset) return;
        if (s > g.limit) {
            out.push_back(b);
            cur = g.at_label;
            continue;
        }
        if (s == g.limit) {
            JumpBlock t = b;
            std::visit(
                [&](auto& c) {
                    if constexpr (!std::is_same_v<std::decay_t<decltype(c)>, Step>) {
                        c.terminal = true;
                        c.at_label = cur;
                    }
                },
                t);
            out.push_back(std::move(t));
            return;
        }
        Rational qn(1);
        for (std::uint64_t n = 0;; ++n, qn *= g.ratio) {
            Affine m = slot_map(g.limit, g.offset, g.ratio, qn);
            auto mapped = map_blocks(copy_body(b, n, cur)->blocks, m);
            if (m(Rational(1)) <= s) {
                out.insert(out.end(), mapped.begin(), mapped.end());
            } else {
                cut_below(mapped, cur, s, out);
                return;
            }
        }
    }
}

/// Appends the blocks of `blocks` lying strictly after s; the value at s
/// itself is the caller's business.
inline void blocks_after(const std::vector<JumpBlock>& blocks, Label incoming, const Rational& s,
                         std::vector<JumpBlock>& out) {
    Label cur = incoming;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        if (span_start(b) > s) {
            out.insert(out.end(), blocks.begin() + static_cast<std::ptrdiff_t>(i), blocks.end());
            return;
        }
        if (auto* st = std::get_if<Step>(&b)) {
            cur = st->label;
            continue;
        }
        auto g = geometry(b);
        if (g.limit <= s) {
            cur = g.at_label;
            continue;
        }
        auto n = copy_index(g, s);
        blocks_after(map_blocks(copy_body(b, n, cur)->blocks, slot_map(g, n)), cur, s, out);
        out.push_back(cluster_tail(b, n + 1));
        out.insert(out.end(), blocks.begin() + static_cast<std::ptrdiff_t>(i) + 1, blocks.end());
        return;
    }
}

}  // namespace detail

/// f restricted to (-inf, s), s <= rho.
inline Element prefix(const Element& f, const Rational& s) {
    if (s > f.rho) throw std::domain_error("prefix at " + to_string(s) + " beyond rho " + to_string(f.rho));
    if (s == f.rho) return f;
    std::vector<JumpBlock> out;
    detail::cut_below(f.blocks(), 0, s, out);
    return make_element(s, std::move(out), f.alphabet);
}

/// Finite permutation of labels; identity off its support.
class LabelPerm {
public:
    LabelPerm() = default;
    explicit LabelPerm(std::map<Label, Label> mapping) : map_(std::move(mapping)) {
        std::map<Label, int> hits;
        for (auto& [k, v] : map_) ++hits[v];
        for (auto& [k, v] : map_)
            if (hits[k] != 1 || hits[v] != 1) throw std::invalid_argument("label map is not a permutation of its support");
        for (auto it = map_.begin(); it != map_.end();) it = it->first == it->second ? map_.erase(it) : std::next(it);
    }
    static LabelPerm transposition(Label a, Label b) {
        if (a == b) return {};
        return LabelPerm({{a, b}, {b, a}});
    }

    Label operator()(Label l) const {
        auto it = map_.find(l);
        return it == map_.end() ? l : it->second;
    }
    bool is_identity() const { return map_.empty(); }
    LabelPerm inverse() const {
        std::map<Label, Label> inv;
        for (auto& [k, v] : map_) inv[v] = k;
        return LabelPerm(std::move(inv));
    }
    const std::map<Label, Label>& mapping() const { return map_; }
    bool operator==(const LabelPerm&) const = default;

private:
    std::map<Label, Label> map_;
};

inline std::vector<JumpBlock> relabel_blocks(const std::vector<JumpBlock>& blocks, const LabelPerm& p) {
    if (p.is_identity()) return blocks;
    std::vector<JumpBlock> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) {
        if (auto* s = std::get_if<Step>(&b)) {
            out.push_back(Step{s->pos, p(s->label)});
        } else if (auto* c = std::get_if<LimitCluster>(&b)) {
            LimitCluster n = *c;
            n.body = std::make_shared<JumpList>(JumpList{relabel_blocks(c->body->blocks, p)});
            n.at_label = p(c->at_label);
            out.push_back(std::move(n));
        } else {
            RampCluster n = std::get<RampCluster>(b);
            n.pulse = p(n.pulse);
            n.at_label = p(n.at_label);
            out.push_back(std::move(n));
        }
    }
    return out;
}

/// Every value of f passed through the permutation; the permutation must fix 0.
inline Element relabel(const Element& f, const LabelPerm& p) {
    if (p(0) != 0) throw std::invalid_argument("relabelling must fix the label 0");
    for (auto& [k, v] : p.mapping())
        if (!f.alphabet.contains(k) || !f.alphabet.contains(v)) throw std::invalid_argument("permutation leaves the alphabet");
    return make_element(f.rho, relabel_blocks(f.blocks(), p), f.alphabet);
}

/**
 * h = head on (-inf, s) and perm(g) on [s, rho_g), where s = rho(head) <= rho(g).
 * The caller guarantees that the result is eventually 0 on the left, which
 * holds since head is.
 */
inline Element splice(const Element& head, const Element& g, const LabelPerm& perm = {}) {
    const Rational& s = head.rho;
    if (s > g.rho) throw std::domain_error("splice point beyond the tail's rho");
    if (s == g.rho) return head;
    Label v = perm(eval(g, s));
    std::vector<JumpBlock> blocks = head.blocks();
    if (is_terminal(head)) {
        std::visit(
            [&](auto& c) {
                if constexpr (!std::is_same_v<std::decay_t<decltype(c)>, Step>) {
                    c.terminal = false;
                    c.at_label = v;
                }
            },
            blocks.back());
    } else if (v != *final_value(head)) {
        blocks.push_back(Step{s, v});
    }
    std::vector<JumpBlock> tail;
    detail::blocks_after(g.blocks(), 0, s, tail);
    auto relabelled = relabel_blocks(tail, perm);
    blocks.insert(blocks.end(), relabelled.begin(), relabelled.end());
    return make_element(g.rho, std::move(blocks), head.alphabet);
}

/// f followed by the constant x on [rho, rho + len).
inline Element extend_step(const Element& f, Label x, const Rational& len) {
    if (len <= 0) throw std::domain_error("extension length must be positive");
    if (!f.alphabet.contains(x)) throw std::invalid_argument("label outside alphabet");
    Element tail = const_ray(f.rho + len, f.alphabet);
    if (x != 0) tail = Element{f.rho + len, JumpList{{Step{f.rho - 1, x}}}, f.alphabet};
    return splice(f, tail);
}

/// f shifted right by r.
inline Element translate_element(const Element& f, const Rational& r) {
    return Element{f.rho + r, JumpList{map_blocks(f.blocks(), Affine{Rational(1), r})}, f.alphabet};
}

}  // namespace rtree

#pragma once

/**
 * Random elements for property checks.
 *
 * Positions are small-denominator rationals in [-8, 8]; blocks are steps,
 * limit clusters whose bodies nest at most one more cluster, and occasional
 * ramps.  `related` builds elements sharing a prefix with a given one, since
 * independent random elements almost always branch at the first jump.
 */

#include "rtree/cbrank.hpp"
#include "rtree/isometry.hpp"

#include <random>

namespace rtree {

struct GenOptions {
    std::size_t max_blocks = 4;
    bool clusters = true;
    bool ramps = true;
    bool terminal = true;
};

class Generator {
public:
    explicit Generator(std::uint64_t seed, Alphabet alphabet = Alphabet::finite(3)) : rng_(seed), alphabet_(alphabet) {}

    std::mt19937_64& rng() { return rng_; }
    const Alphabet& alphabet() const { return alphabet_; }

    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
    }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[uniform(0, v.size() - 1)];
    }

    /// p/q with q in {1,2,3,4,8}, in [lo, hi].
    Rational position(long lo, long hi) {
        long q = pick(std::vector<long>{1, 2, 3, 4, 8});
        long p = static_cast<long>(uniform(0, static_cast<std::uint64_t>((hi - lo) * q)));
        return make_rational(lo * q + p, q);
    }

    Rational gap() { return pick(std::vector<Rational>{Rational(1, 4), Rational(1, 2), Rational(1), Rational(3, 2)}); }
    Rational ratio() {
        return pick(std::vector<Rational>{Rational(1, 2), Rational(1, 3), Rational(2, 3), Rational(1, 4), Rational(3, 4)});
    }

    Label label() { return uniform(0, label_count() - 1); }
    Label label_other_than(Label l) {
        Label x = uniform(0, label_count() - 2);
        return x >= l ? x + 1 : x;
    }

    /// Body in slot coordinates, starting and ending at `base`.
    JumpListPtr body(Label base, int depth) {
        auto out = std::make_shared<JumpList>();
        if (depth > 1 && chance(0.3)) {
            Label p = label_other_than(base);
            auto inner = body(p, 1);
            out->blocks = {Step{Rational(0), p},
                           LimitCluster{Rational(1, 2), Rational(1, 4), ratio(), inner, label(), false},
                           Step{Rational(3, 4), base}};
            return out;
        }
        static const std::vector<Rational> grid{Rational(0),    Rational(1, 8), Rational(1, 4), Rational(1, 3),
                                                Rational(1, 2), Rational(2, 3), Rational(3, 4), Rational(7, 8)};
        std::size_t k = uniform(2, 3);
        std::vector<std::size_t> idx(grid.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng_);
        idx.resize(k);
        std::sort(idx.begin(), idx.end());
        Label cur = base;
        for (std::size_t i = 0; i < k; ++i) {
            Label next = i + 1 == k ? base : label_other_than(cur);
            out->blocks.push_back(Step{grid[idx[i]], next});
            cur = next;
        }
        return out;
    }

    Element element(const GenOptions& o = {}) {
        Rational t = position(-8, -4);
        Label cur = 0;
        std::vector<JumpBlock> blocks;
        std::size_t n = uniform(0, o.max_blocks);
        for (std::size_t i = 0; i < n && t < 4; ++i) {
            double roll = std::uniform_real_distribution<double>(0, 1)(rng_);
            if (!o.clusters || roll < 0.55) {
                Label l = label_other_than(cur);
                blocks.push_back(Step{t, l});
                cur = l;
                t += gap();
            } else if (!o.ramps || roll < 0.9) {
                Rational off = pick(std::vector<Rational>{Rational(1, 2), Rational(1), Rational(2)});
                Label at = label();
                blocks.push_back(LimitCluster{t + off, off, ratio(), body(cur, 2), at, false});
                cur = at;
                t += off + gap();
            } else {
                Rational off = pick(std::vector<Rational>{Rational(1), Rational(2)});
                Ordinal g = pick(std::vector<Ordinal>{omega(), Ordinal::power(1, 2), Ordinal::power(2)});
                Label at = label();
                blocks.push_back(RampCluster{t + off, off, ratio(), g, label_other_than(cur), uniform(0, 2), at, false});
                cur = at;
                t += off + gap();
            }
        }
        Rational rho = t;
        if (o.terminal && !blocks.empty() && is_cluster(blocks.back()) && chance(0.15)) {
            std::visit(
                [&](auto& c) {
                    if constexpr (!std::is_same_v<std::decay_t<decltype(c)>, Step>) {
                        c.terminal = true;
                        rho = c.limit;
                    }
                },
                blocks.back());
        }
        return make_element(rho, std::move(blocks), alphabet_);
    }

    /// A position in (lo, hi] on the grid, or hi.
    Rational cut_point(const Rational& lo, const Rational& hi) {
        for (int tries = 0; tries < 8; ++tries) {
            Rational s = position(-8, 8);
            if (s > lo && s <= hi) return s;
        }
        return hi;
    }

    /// An element sharing a prefix with f (or, sometimes, an independent one).
    Element related(const Element& f, const GenOptions& o = {}) {
        double roll = std::uniform_real_distribution<double>(0, 1)(rng_);
        Rational lo = f.rho - 6;
        if (roll < 0.25) return element(o);
        Rational s = cut_point(lo, f.rho);
        Element head = prefix(f, s);
        if (roll < 0.4) return head;
        if (roll < 0.5) return splice(head, f);  // same point, unfolded differently
        Element h = element(o);
        if (h.rho <= s) h = extend_step(h, label(), s - h.rho + gap());
        if (roll < 0.6) return extend_step(head, label(), gap());
        return splice(head, h);
    }

    LabelPerm permutation(bool fix_zero) {
        std::vector<Label> labels;
        for (Label l = fix_zero ? 1 : 0; l < label_count(); ++l) labels.push_back(l);
        auto image = labels;
        std::shuffle(image.begin(), image.end(), rng_);
        std::map<Label, Label> m;
        for (std::size_t i = 0; i < labels.size(); ++i) m[labels[i]] = image[i];
        return LabelPerm(std::move(m));
    }

    /// A single random isometry constructor, built around f.
    Isometry isometry(const Element& f) {
        switch (uniform(0, 4)) {
            case 0: return translate(position(-4, 4));
            case 1: return reflect();
            case 2: return branch_swap(related(f));
            case 3: return dir_perm(related(f), permutation(false));
            default: return relabel_map(permutation(true));
        }
    }

    Isometry composition(const Element& f, std::size_t max_len = 4) {
        std::vector<Isometry> parts;
        std::size_t n = uniform(0, max_len);
        for (std::size_t i = 0; i < n; ++i) parts.push_back(isometry(f));
        return compose(std::move(parts));
    }

    /// A probe point t < rho.
    Rational probe_below(const Rational& rho) {
        Rational t = rho - gap() * make_rational(static_cast<long>(uniform(0, 40)), 8);
        return t < rho ? t : rho - 1;
    }

private:
    std::uint64_t label_count() const { return alphabet_.is_finite() ? alphabet_.size() : 6; }

    std::mt19937_64 rng_;
    Alphabet alphabet_;
};

}  // namespace rtree

#pragma once

/**
 * Property suites shared by the CLI `check` command and the test binaries.
 * Every suite is deterministic in (seed, cases).  An undecided comparison
 * counts as a failure.
 */

#include "rtree/construct.hpp"
#include "rtree/gen.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <ostream>

namespace rtree::check {

struct Result {
    std::string suite;
    std::uint64_t cases = 0;
    std::uint64_t failures = 0;
    std::uint64_t undecided = 0;
    std::vector<std::string> messages;  // first few failures
    double seconds = 0;

    bool ok() const { return failures == 0 && undecided == 0; }
    void fail(const std::string& what) {
        ++failures;
        if (messages.size() < 5) messages.push_back(what);
    }
    /// expect(cond, ...) records a failure when cond is false.
    bool expect(bool cond, const std::string& what) {
        if (!cond) fail(what);
        return cond;
    }
};

struct Options {
    std::uint64_t seed = 1;
    std::uint64_t cases = 10000;
    std::optional<Ordinal> alpha;  // escape suite: single alpha
};

namespace detail {

/// Runs body(i) for each case, turning exceptions into failures.
inline Result run(const std::string& name, std::uint64_t cases, const std::function<void(Result&, std::uint64_t)>& body) {
    Result r;
    r.suite = name;
    auto start = std::chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < cases; ++i) {
        ++r.cases;
        try {
            body(r, i);
        } catch (const undecided_error& e) {
            ++r.undecided;
            r.fail("case " + std::to_string(i) + ": UNDECIDED: " + e.what());
        } catch (const std::exception& e) {
            r.fail("case " + std::to_string(i) + ": exception: " + e.what());
        }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline std::string show(const Element& f) { return serialize(f); }

/// Sampler check of s = common_prefix_length(f, g): f = g at probes below s,
/// and f(s) != g(s) when s is below both rhos.
inline void check_prefix_length(Result& r, Generator& gen, const Element& f, const Element& g) {
    Rational s = common_prefix_length(f, g);
    for (int k = 0; k < 4; ++k) {
        Rational t = gen.probe_below(s);
        if (!r.expect(eval(f, t) == eval(g, t), "values differ below the common prefix at " + to_string(t) + ": " +
                                                     show(f) + " vs " + show(g)))
            return;
    }
    if (s < f.rho && s < g.rho)
        r.expect(eval(f, s) != eval(g, s), "values agree at the divergence point " + to_string(s) + ": " + show(f) +
                                               " vs " + show(g));
}

inline std::atomic<std::uint64_t>& oracle_checks() {
    static std::atomic<std::uint64_t> n{0};
    return n;
}
inline std::atomic<std::uint64_t>& oracle_disagreements() {
    static std::atomic<std::uint64_t> n{0};
    return n;
}

inline void check_oracle(Result& r, const PointSet& set, const Ordinal& rank) {
    ++oracle_checks();
    if (!r.expect(rank == rank_from_order_type(set), "rank oracle disagrees on " + serialize(set))) ++oracle_disagreements();
}

/// pair_complexity, cross-checked against the order-type oracle.
inline Ordinal checked_pair_complexity(Result& r, const Element& a, const Element& b) {
    auto set = restrict_set(jump_set(b), a.rho, b.rho);
    Ordinal rank = cb_rank(set);
    check_oracle(r, set, rank);
    r.expect(rank == pair_complexity(a, b), "pair_complexity mismatch");
    return rank;
}

inline Ordinal checked_complexity(Result& r, const Element& f) {
    auto set = jump_set(f);
    Ordinal rank = cb_rank(set);
    check_oracle(r, set, rank);
    return rank;
}

}  // namespace detail

/// Order-type cross-checks made by checked (pair) complexity calls so far, and how many disagreed.
inline std::uint64_t oracle_checks() { return detail::oracle_checks().load(); }
inline std::uint64_t oracle_disagreements() { return detail::oracle_disagreements().load(); }

/// Metric axioms, with sampler checks of the wedge.
inline Result metric_suite(const Options& o) {
    Generator gen(o.seed);
    return detail::run("metric", o.cases, [&](Result& r, std::uint64_t) {
        Element f = gen.element();
        Element g = gen.related(f);
        Element h = gen.chance(0.5) ? gen.related(f) : gen.related(g);
        Rational fg = dist(f, g), gh = dist(g, h), fh = dist(f, h);
        r.expect(fg >= 0 && gh >= 0 && fh >= 0, "negative distance");
        r.expect(dist(f, f) == 0, "d(f,f) != 0 for " + serialize(f));
        r.expect(fg == dist(g, f), "asymmetric distance");
        r.expect(fh <= fg + gh, "triangle inequality fails");
        r.expect(fg <= fh + gh && gh <= fg + fh, "triangle inequality fails");
        if (f == g) r.expect(fg == 0, "equal normal forms at positive distance");
        detail::check_prefix_length(r, gen, f, g);
        detail::check_prefix_length(r, gen, g, h);
        Element w = wedge(f, g);
        r.expect(leq(w, f) && leq(w, g), "wedge is not below both");
        r.expect(w.rho <= f.rho && w.rho <= g.rho, "wedge too long");
        r.expect(same_point(w, wedge(g, f)), "wedge not symmetric");
        r.expect(same_point(wedge(f, f), f), "wedge(f,f) != f");
        // geodesic parameterisation
        if (fg > 0) {
            Rational t1 = fg * make_rational(static_cast<long>(gen.uniform(0, 8)), 8);
            Rational t2 = fg * make_rational(static_cast<long>(gen.uniform(0, 8)), 8);
            Element p1 = point_on_segment(f, g, t1), p2 = point_on_segment(f, g, t2);
            r.expect(dist(p1, p2) == rational_abs(t1 - t2), "point_on_segment is not isometric");
        }
    });
}

inline Result fourpoint_suite(const Options& o) {
    Generator gen(o.seed + 1);
    return detail::run("fourpoint", o.cases, [&](Result& r, std::uint64_t) {
        Element a = gen.element();
        Element b = gen.related(a);
        Element c = gen.related(gen.chance(0.5) ? a : b);
        Element d = gen.related(gen.chance(0.5) ? b : c);
        Rational lhs = dist(a, b) + dist(c, d);
        Rational x = dist(a, c) + dist(b, d), y = dist(a, d) + dist(b, c);
        r.expect(lhs <= (x > y ? x : y), "four-point condition fails");
    });
}

inline Result glb_suite(const Options& o) {
    Generator gen(o.seed + 2);
    std::uint64_t nonvacuous = 0;
    auto res = detail::run("glb", o.cases, [&](Result& r, std::uint64_t) {
        Element f = gen.element();
        Element g = gen.related(f);
        // h mostly below the wedge, so the implication is exercised
        Element w = wedge(f, g);
        Element h = gen.chance(0.7) ? prefix(w, gen.cut_point(w.rho - 4, w.rho)) : gen.related(f);
        if (leq(h, f) && leq(h, g)) {
            ++nonvacuous;
            r.expect(leq(h, w), "h below f and g but not below their wedge");
        }
    });
    res.messages.insert(res.messages.begin(), "non-vacuous cases: " + std::to_string(nonvacuous));
    return res;
}

inline Result isometry_suite(const Options& o) {
    Generator gen(o.seed + 3);
    auto res = detail::run("isometry", o.cases, [&](Result& r, std::uint64_t i) {
        Element f = gen.element();
        Element g = gen.related(f);
        Isometry phi;
        switch (i % 6) {
            case 0: phi = translate(gen.position(-4, 4)); break;
            case 1: phi = reflect(); break;
            case 2: phi = branch_swap(gen.related(f)); break;
            case 3: phi = dir_perm(gen.related(f), gen.permutation(false)); break;
            case 4: phi = relabel_map(gen.permutation(true)); break;
            default: phi = gen.composition(f); break;
        }
        Element pf = apply(phi, f), pg = apply(phi, g);
        r.expect(dist(pf, pg) == dist(f, g), "distance not preserved by " + serialize(phi) + " on " +
                                                 serialize(f) + ", " + serialize(g));
        r.expect(same_point(apply(invert(phi), pf), f), "invert fails for " + serialize(phi));
        std::size_t kind = i % 6;
        if (kind == 1 || kind == 2) r.expect(same_point(apply(phi, pf), f), "not an involution: " + serialize(phi));
        Ordinal cf = complexity(f), cp = complexity(pf);
        if (kind == 0 || kind == 1 || kind == 4) r.expect(cf == cp, "complexity changed by " + serialize(phi));
        if (kind == 2) {
            const auto& a = std::get<iso::BranchSwap>(phi.node).a;
            Ordinal alpha = std::max(cf, complexity(a));
            r.expect(member(pf, alpha), "branch swap leaves T^[alpha]");
        }
        if (kind == 3) {
            const auto& dp = std::get<iso::DirPerm>(phi.node);
            auto fin = final_value(dp.x);
            if (!fin || dp.sigma(*fin) == *fin) {
                r.expect(cf == cp, "direction permutation changed complexity");
            } else if (cf >= ord(1)) {
                r.expect(member(pf, cf), "direction permutation leaves T^[alpha]");
            }
            if (!same_point(f, dp.x)) {
                auto before = classify_direction(dp.x, f), after = classify_direction(dp.x, pf);
                Direction want = before.down ? before : Direction::up(dp.sigma(before.label));
                r.expect(after == want, "direction permutation sends " + before.to_string() + " to " + after.to_string());
            }
        }
        // branch swap contract on a
        if (kind == 2) {
            const auto& a = std::get<iso::BranchSwap>(phi.node).a;
            r.expect(same_point(apply(phi, a), const_ray(a.rho, a.alphabet)), "branch_swap(a)(a) != c_rho");
            Rational t = gen.probe_below(tau(a) + 1);
            if (t <= tau(a)) r.expect(same_point(apply(phi, const_ray(t, a.alphabet)), const_ray(t, a.alphabet)),
                                      "branch_swap(a) moves c_r, r <= tau_a");
        }
    });
    return res;
}

/// branch_swap(a) takes a to c_{rho_a} and back, fixing the ray below tau_a.
inline Result branch_swap_suite(const Options& o) {
    Generator gen(o.seed + 4);
    return detail::run("branch-swap", o.cases, [&](Result& r, std::uint64_t) {
        Element a = gen.element();
        auto phi = branch_swap(a);
        r.expect(same_point(apply(phi, a), const_ray(a.rho, a.alphabet)), "branch_swap(a)(a) != c_rho for " + serialize(a));
        r.expect(same_point(apply(phi, const_ray(a.rho, a.alphabet)), a), "branch_swap(a)(c_rho) != a");
        Rational t = tau(a) - gen.gap();
        r.expect(same_point(apply(phi, const_ray(t, a.alphabet)), const_ray(t, a.alphabet)), "c_r moved");
    });
}

inline Result two_point_suite(const Options& o) {
    Generator gen(o.seed + 5);
    return detail::run("two-point", o.cases, [&](Result& r, std::uint64_t) {
        Element a1 = gen.element();
        Element a2 = gen.related(a1);
        Element b1, b2;
        if (gen.chance(0.5)) {
            auto psi = gen.composition(a1);
            b1 = apply(psi, a1);
            b2 = apply(psi, a2);
        } else {
            // b2 at distance d from b1: down by u, then up along a fresh label
            Rational d = dist(a1, a2);
            b1 = gen.element();
            Rational u = d * make_rational(static_cast<long>(gen.uniform(0, 4)), 4);
            Element base = prefix(b1, b1.rho - u);
            if (u == d) {
                b2 = base;
            } else {
                Label c = gen.label();
                if (u > 0)
                    while (c == eval(b1, base.rho)) c = gen.label();
                b2 = extend_step(base, c, d - u);
            }
        }
        if (!r.expect(dist(b1, b2) == dist(a1, a2), "generator produced unmatched distances")) return;
        auto phi = two_point_map(a1, a2, b1, b2);
        r.expect(same_point(apply(phi, a1), b1), "a1 not sent to b1");
        r.expect(same_point(apply(phi, a2), b2), "a2 not sent to b2");
        Element prev = a1;
        for (int k = 0; k < 20; ++k) {
            Element p = gen.chance(0.5) ? gen.related(a2) : gen.related(prev);
            Element ip = apply(phi, p);
            r.expect(dist(ip, apply(phi, prev)) == dist(p, prev), "probe distance not preserved");
            r.expect(dist(ip, b1) == dist(p, a1), "probe distance to a1 not preserved");
            prev = p;
        }
    });
}

/// Witnesses, jump sets, restrictions: structural rank = order-type rank.
inline Result rank_oracle_suite(const Options& o) {
    Generator gen(o.seed + 6);
    Result fixed = detail::run("rank-oracle", 1, [&](Result& r, std::uint64_t) {
        std::vector<Ordinal> alphas;
        for (std::uint64_t n = 1; n <= 6; ++n) alphas.push_back(ord(n));
        for (std::uint64_t k = 1; k <= 2; ++k)
            for (std::uint64_t n = 1; n <= 3; ++n) alphas.push_back(Ordinal::power(1, k) + ord(n));
        alphas.push_back(Ordinal::power(2) + ord(1));
        alphas.push_back(Ordinal::power(2) + omega() + ord(1));
        for (const auto& a : alphas) {
            Element w = witness(a, 0, 1, gen.alphabet());
            auto set = jump_set(w);
            r.expect(cb_rank(set) == a, "cb_rank(witness(" + a.to_string() + ")) = " + cb_rank(set).to_string());
            r.expect(rank_from_order_type(set) == a, "oracle rank of witness(" + a.to_string() + ") = " +
                                                         rank_from_order_type(set).to_string());
        }
    });
    Result res = detail::run("rank-oracle", o.cases, [&](Result& r, std::uint64_t) {
        Element f = gen.element();
        auto set = jump_set(f);
        Ordinal rank = detail::checked_complexity(r, f);
        r.expect(rank.is_zero() == set.empty() && set.empty() == f.blocks().empty(), "empty P vs constant mismatch");
        if (!rank.is_zero()) {
            r.expect(rank.is_successor(), "rank not a successor");
            auto d = derivative(set);
            r.expect(ord(1) + cb_rank(d) == rank, "1 + rank(S') != rank(S)");
            detail::check_oracle(r, d, cb_rank(d));
        }
        Rational lo = gen.position(-8, 8), hi = gen.position(-8, 8);
        if (hi < lo) std::swap(lo, hi);
        auto part = restrict_set(set, lo, hi);
        detail::check_oracle(r, part, cb_rank(part));
        r.expect(cb_rank(part) <= rank, "restriction increased the rank");
        Element g = gen.related(f);
        if (g.rho < f.rho && leq(g, f)) detail::checked_pair_complexity(r, g, f);
        Rational s = gen.cut_point(f.rho - 6, f.rho);
        for (const auto& alpha : {ord(1), ord(2), omega() + ord(1)})
            if (member(f, alpha)) r.expect(member(prefix(f, s), alpha), "T^[alpha] not downward closed");
    });
    res.cases += fixed.cases;
    res.failures += fixed.failures;
    res.messages.insert(res.messages.begin(), fixed.messages.begin(), fixed.messages.end());
    return res;
}

/// comp(x, lim) = beta + 1 and comp(lim) = max(comp(x), beta + 1).
inline Result limit_suite(const Options& /*fixed cases*/) {
    Alphabet alphabet = Alphabet::finite(3);
    std::vector<BetaSeq> seqs{BetaSeq::constant(ord(1)), BetaSeq::constant(ord(2)), BetaSeq::constant(ord(3)),
                              BetaSeq::towards(omega())};
    std::vector<Element> xs{const_ray(0, alphabet), witness(ord(3), 0, 1, alphabet)};
    return detail::run("limit", seqs.size() * xs.size(), [&](Result& r, std::uint64_t i) {
        const auto& seq = seqs[i % seqs.size()];
        const auto& x = xs[i / seqs.size()];
        Element lim = limit_of_chain(x, seq, 1);
        Ordinal want = seq.sup().succ();
        Ordinal pair = detail::checked_pair_complexity(r, x, lim);
        r.expect(pair == want, "comp(a_1, a) = " + pair.to_string() + ", expected " + want.to_string());
        Ordinal comp = detail::checked_complexity(r, lim);
        Ordinal cx = complexity(x);
        r.expect(comp == std::max(cx, want), "comp(a) = " + comp.to_string());
        // the chain converges to the limit
        auto chain = escape_sequence(x, seq, 1, 12);
        for (std::size_t n = 1; n <= chain.size(); ++n)
            r.expect(dist(chain[n - 1], lim) <= Rational(1) / rational_pow(Rational(2), n - 1), "d(a_N, limit) too large");
        for (std::size_t n = 0; n + 1 < chain.size(); ++n) {
            r.expect(chain[n].rho < chain[n + 1].rho && leq(chain[n], chain[n + 1]), "chain not increasing");
            r.expect(detail::checked_pair_complexity(r, chain[n], chain[n + 1]) == seq.at(n), "comp(a_n, a_n+1) != beta_n");
        }
        // single escape steps
        Ordinal beta = seq.fundamental ? Ordinal(seq.sup().succ()) : seq.sup();
        Element a = escape_step(x, beta, Rational(1, 2));
        r.expect(x.rho < a.rho && leq(x, a) && a.rho <= x.rho + Rational(1, 2), "escape_step bounds");
        r.expect(detail::checked_pair_complexity(r, x, a) == beta, "comp(x, escape_step) != beta");
    });
}

inline Result escape_suite(const Options& o, std::vector<EscapeReport>* reports = nullptr) {
    std::vector<Ordinal> alphas = o.alpha ? std::vector<Ordinal>{*o.alpha} : std::vector<Ordinal>{ord(1), ord(2), omega()};
    std::vector<std::uint64_t> kappas{3, 4};
    return detail::run("escape", alphas.size() * kappas.size(), [&](Result& r, std::uint64_t i) {
        const auto& alpha = alphas[i / kappas.size()];
        auto start = std::chrono::steady_clock::now();
        auto rep = incompleteness_demo(alpha, Alphabet::for_kappa(kappas[i % kappas.size()]), 10);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string tag = "alpha=" + alpha.to_string() + " kappa=" + std::to_string(kappas[i % kappas.size()]);
        r.expect(rep.ok(), "demo " + tag + " failed its checks");
        r.expect(rep.sequence.size() == 10, "chain length");
        r.expect(secs < 10, "demo " + tag + " took " + std::to_string(secs) + " s");
        if (reports) reports->push_back(std::move(rep));
    });
}

/// Valence kappa at random points of T^[alpha].
inline Result directions_suite(const Options& o) {
    std::vector<std::uint64_t> kappas{3, 4, 7};
    std::vector<Ordinal> alphas{ord(1), ord(2)};
    std::uint64_t per = std::max<std::uint64_t>(1, o.cases / 6);
    Generator gen(o.seed + 7);
    return detail::run("directions", per * 6, [&](Result& r, std::uint64_t i) {
        std::uint64_t kappa = kappas[(i / per) % 3];
        const Ordinal& alpha = alphas[(i / per / 3) % 2];
        Generator local(gen.uniform(0, ~0ULL), Alphabet::for_kappa(kappa));
        GenOptions opts;
        opts.ramps = false;
        Element x = local.element(opts);
        for (int tries = 0; !member(x, alpha) && tries < 20; ++tries) x = local.element(opts);
        if (!member(x, alpha)) {
            opts.clusters = false;
            x = local.element(opts);
        }
        auto dirs = enumerate_directions(x);
        r.expect(dirs.size() == kappa, "expected " + std::to_string(kappa) + " directions");
        std::set<Direction> seen;
        for (const auto& [d, rep] : dirs) {
            auto c = classify_direction(x, rep);
            r.expect(c == d, "representative classified as " + c.to_string() + ", expected " + d.to_string());
            seen.insert(c);
            r.expect(member(rep, alpha), "representative leaves T^[alpha]");
        }
        r.expect(seen.size() == kappa, "classifications not pairwise distinct");
    });
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"metric", "fourpoint", "glb",    "isometry",  "branch-swap",
                                                "two-point", "rank-oracle", "limit", "escape", "directions"};
    return names;
}

inline std::optional<Result> run_suite(const std::string& name, const Options& o) {
    if (name == "metric") return metric_suite(o);
    if (name == "fourpoint") return fourpoint_suite(o);
    if (name == "glb") return glb_suite(o);
    if (name == "isometry") return isometry_suite(o);
    if (name == "branch-swap") return branch_swap_suite(o);
    if (name == "two-point") return two_point_suite(o);
    if (name == "rank-oracle") return rank_oracle_suite(o);
    if (name == "limit") return limit_suite(o);
    if (name == "escape") return escape_suite(o);
    if (name == "directions") return directions_suite(o);
    return std::nullopt;
}

inline void print(std::ostream& os, const Result& r) {
    os << "suite " << r.suite << ": cases=" << r.cases << " failures=" << r.failures << " undecided=" << r.undecided
       << '\n';
    for (const auto& m : r.messages) os << "  " << m << '\n';
}

}  // namespace rtree::check

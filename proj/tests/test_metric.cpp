#include "oracle.hpp"
#include "rtree/gen.hpp"
#include "rtree/metric.hpp"

#include <gtest/gtest.h>

using namespace rtree;

namespace {

const Alphabet A3 = Alphabet::finite(3);

Rational q(long n, long d = 1) { return make_rational(n, d); }
Element c(long n, long d = 1) { return const_ray(q(n, d), A3); }

Element E1() { return make_element(q(1), {Step{q(0), 1}}, A3); }
Element E2() { return make_element(q(1), {Step{q(0), 2}}, A3); }
JumpListPtr list(std::vector<JumpBlock> b) { return std::make_shared<JumpList>(JumpList{std::move(b)}); }
JumpListPtr pulse() { return list({Step{q(0), 1}, Step{q(1, 2), 0}}); }
Element E3() { return make_element(q(1), {LimitCluster{q(0), q(1), q(1, 2), pulse(), 1, false}}, A3); }

struct CapGuard {
    std::uint64_t saved = unfold_cap();
    ~CapGuard() { set_unfold_cap(saved); }
};

}  // namespace

TEST(Metric, Wedge) {
    EXPECT_EQ(wedge(c(3), c(5)), c(3));
    EXPECT_EQ(wedge(E1(), E2()), c(0));
    EXPECT_EQ(wedge(E1(), E3()), c(-1));
}

TEST(Metric, Dist) {
    EXPECT_EQ(dist(c(0), c(7, 2)), q(7, 2));
    EXPECT_EQ(dist(E1(), E2()), q(2));
    EXPECT_EQ(dist(E1(), E3()), q(4));
    EXPECT_EQ(dist(E3(), E3()), q(0));
    EXPECT_THROW(dist(E1(), const_ray(q(0), Alphabet::finite(2))), std::invalid_argument);
}

TEST(Metric, Leq) {
    EXPECT_TRUE(leq(c(-1), E1()));
    EXPECT_FALSE(leq(E1(), E2()));
    EXPECT_TRUE(leq(prefix(E3(), q(-1, 4)), E3()));
    EXPECT_FALSE(leq(E3(), prefix(E3(), q(-1, 4))));
}

TEST(Metric, PointOnSegment) {
    EXPECT_EQ(point_on_segment(E1(), E2(), q(0)), E1());
    EXPECT_EQ(point_on_segment(E1(), E2(), q(1)), c(0));
    EXPECT_EQ(point_on_segment(c(0), c(4), q(3)), c(3));
    EXPECT_EQ(point_on_segment(E1(), E2(), q(2)), E2());
    EXPECT_THROW(point_on_segment(E1(), E2(), q(3)), std::domain_error);
}

TEST(Metric, Directions) {
    EXPECT_EQ(classify_direction(c(0), c(-1)), Direction::make_down());
    EXPECT_EQ(classify_direction(c(0), E1()), Direction::up(1));
    EXPECT_EQ(classify_direction(c(0), E2()), Direction::up(2));
    EXPECT_EQ(classify_direction(c(0), c(2)), Direction::up(0));

    auto dirs = enumerate_directions(const_ray(q(0), Alphabet::finite(2)));
    EXPECT_EQ(dirs.size(), 3u);
    dirs = enumerate_directions(E1());
    EXPECT_EQ(dirs.size(), 4u);
    std::set<Direction> seen;
    for (auto& [d, g] : dirs) {
        EXPECT_EQ(classify_direction(E1(), g), d);
        EXPECT_EQ(dist(E1(), g), q(1));
        seen.insert(d);
    }
    EXPECT_EQ(seen.size(), 4u);
    EXPECT_THROW(enumerate_directions(const_ray(q(0), Alphabet::countable())), std::invalid_argument);
}

TEST(Metric, SameFunctionDifferentRatio) {
    // copies 2n and 2n+1 of f packed into copy n of g
    Element f = make_element(q(1), {LimitCluster{q(0), q(1), q(1, 2), pulse(), 0, false}}, A3);
    auto body = list({Step{q(0), 1}, Step{q(1, 3), 0}, Step{q(2, 3), 1}, Step{q(5, 6), 0}});
    Element g = make_element(q(1), {LimitCluster{q(0), q(1), q(1, 4), body, 0, false}}, A3);
    ASSERT_FALSE(f == g);
    EXPECT_EQ(dist(f, g), q(0));
    EXPECT_TRUE(same_point(f, g));

    // differ only after the limit
    Element h = make_element(q(1), {LimitCluster{q(0), q(1), q(1, 4), body, 2, false}}, A3);
    EXPECT_EQ(common_prefix_length(f, h), q(0));
}

TEST(Metric, UndecidedAtCap) {
    CapGuard guard;
    Element f = make_element(q(1), {LimitCluster{q(0), q(1), q(1, 2), pulse(), 0, false}}, A3);
    auto body = list({Step{q(0), 1}, Step{q(1, 3), 0}, Step{q(2, 3), 1}, Step{q(5, 6), 0}});
    Element g = make_element(q(1), {LimitCluster{q(0), q(1), q(1, 4), body, 0, false}}, A3);
    auto before = undecided_count();
    set_unfold_cap(3);
    EXPECT_THROW(common_prefix_length(f, g), undecided_error);
    EXPECT_EQ(undecided_count(), before + 1);
    set_unfold_cap(guard.saved);
    EXPECT_EQ(dist(f, g), q(0));
    EXPECT_THROW(set_unfold_cap(0), std::invalid_argument);
}

// f = g below s (checked on the brute-force expansion) and, when s is short of
// both ends, right-constancy forces f(s) != g(s).
TEST(MetricProperty, PrefixLengthIsExact) {
    Generator gen(21);
    std::mt19937_64 rng(22);
    for (int i = 0; i < 400; ++i) {
        Element f = gen.element();
        Element g = gen.related(f);
        Rational s = common_prefix_length(f, g);
        ASSERT_EQ(s, common_prefix_length(g, f));
        ASSERT_LE(s, std::min(f.rho, g.rho));
        if (s < std::min(f.rho, g.rho)) {
            ASSERT_NE(eval(f, s), eval(g, s)) << serialize(f) << " " << serialize(g);
        }
        auto ff = oracle::flatten(f, q(1, 2048)), fg = oracle::flatten(g, q(1, 2048));
        std::uniform_int_distribution<long> num(1, 6000);
        for (int k = 0; k < 20; ++k) {
            Rational t = s - make_rational(num(rng), 1000);
            auto a = oracle::value(ff, t), b = oracle::value(fg, t);
            if (a && b) {
                ASSERT_EQ(*a, *b) << "t=" << t;
            }
        }
    }
}

TEST(MetricProperty, MetricAxioms) {
    Generator gen(23);
    for (int i = 0; i < 400; ++i) {
        Element f = gen.element();
        Element g = gen.related(f), h = gen.related(g);
        ASSERT_EQ(dist(f, f), q(0));
        ASSERT_EQ(dist(f, g), dist(g, f));
        ASSERT_GE(dist(f, g), q(0));
        ASSERT_LE(dist(f, h), dist(f, g) + dist(g, h));
        if (dist(f, g) == 0) {
            ASSERT_TRUE(same_point(f, g));
        }
        Element w = wedge(f, g);
        ASSERT_TRUE(leq(w, f));
        ASSERT_TRUE(leq(w, g));
        Rational t = dist(f, g) * make_rational(static_cast<long>(gen.uniform(0, 8)), 8);
        Element p = point_on_segment(f, g, t);
        ASSERT_EQ(dist(f, p), t);
        ASSERT_EQ(dist(p, g), dist(f, g) - t);
    }
}

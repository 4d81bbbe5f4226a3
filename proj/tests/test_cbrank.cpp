#include "oracle.hpp"
#include "rtree/cbrank.hpp"
#include "rtree/gen.hpp"

#include <gtest/gtest.h>

using namespace rtree;

namespace {

const Alphabet A3 = Alphabet::finite(3);

Rational q(long n, long d = 1) { return make_rational(n, d); }
Ordinal w(std::uint64_t e, std::uint64_t c = 1) { return Ordinal::power(e, c); }

Element c(long n) { return const_ray(q(n), A3); }
Element E1() { return make_element(q(1), {Step{q(0), 1}}, A3); }
JumpListPtr pulse() { return std::make_shared<JumpList>(JumpList{{Step{q(0), 1}, Step{q(1, 2), 0}}}); }
Element E3() { return make_element(q(1), {LimitCluster{q(0), q(1), q(1, 2), pulse(), 1, false}}, A3); }

PointSet atoms(std::initializer_list<long> xs) {
    PointSet s;
    for (long x : xs) s.blocks.push_back(Atom{q(x)});
    return s;
}

// every point of S down to resolution eps; slots below eps are skipped
void expand_points(const std::vector<PointBlock>& blocks, const Rational& scale, const Rational& shift,
                   const Rational& eps, std::set<Rational>& out) {
    for (const auto& b : blocks) {
        if (auto* a = std::get_if<Atom>(&b)) {
            out.insert(scale * a->pos + shift);
            continue;
        }
        auto g = detail::pgeometry(b);
        Rational L = scale * g.limit + shift, start = L - scale * g.offset, len = (L - start) * (1 - g.ratio);
        for (std::uint64_t n = 0; len >= eps; ++n) {
            expand_points(copy_points(b, n)->blocks, len, start, eps, out);
            start += len;
            len *= g.ratio;
        }
        out.insert(L);
    }
}

std::set<Rational> points(const PointSet& s, const Rational& eps) {
    std::set<Rational> out;
    expand_points(s.blocks, Rational(1), Rational(0), eps, out);
    return out;
}

OrderType otype_omega_plus(std::uint64_t e, std::uint64_t c, std::uint64_t k) {
    return OrderType::power(ord(e), c) + OrderType::finite(k);
}

}  // namespace

TEST(CBRank, JumpSet) {
    EXPECT_TRUE(jump_set(c(5)).empty());
    auto s = jump_set(E1());
    ASSERT_EQ(s.blocks.size(), 1u);
    EXPECT_EQ(std::get<Atom>(s.blocks[0]).pos, q(0));
    auto s3 = jump_set(E3());
    ASSERT_EQ(s3.blocks.size(), 1u);
    EXPECT_TRUE(std::holds_alternative<PLimit>(s3.blocks[0]));
    auto pts = points(s3, q(1, 64));
    EXPECT_TRUE(pts.count(q(-1)) && pts.count(q(-3, 4)) && pts.count(q(-1, 2)) && pts.count(q(-3, 8)) && pts.count(q(0)));
}

TEST(CBRank, Derivative) {
    EXPECT_TRUE(derivative(atoms({0, 1, 2})).empty());
    EXPECT_TRUE(derivative(PointSet{}).empty());
    auto d = derivative(jump_set(E3()));
    EXPECT_EQ(points(d, q(1, 1024)), std::set<Rational>{q(0)});
}

TEST(CBRank, Rank) {
    EXPECT_EQ(cb_rank(PointSet{}), ord(0));
    EXPECT_EQ(cb_rank(atoms({0})), ord(1));
    EXPECT_EQ(cb_rank(jump_set(E3())), ord(2));
    EXPECT_EQ(cb_rank(*witness_set(omega() + ord(1))), omega() + ord(1));
    EXPECT_EQ(rank_from_order_type(*witness_set(omega() + ord(1))), omega() + ord(1));
}

TEST(CBRank, OrderType) {
    EXPECT_EQ(order_type(atoms({0, 1, 2})), OrderType::finite(3));
    EXPECT_EQ(order_type(PointSet{}), OrderType{});
    // two points per copy, w copies, then the limit: 2w + 1 = w + 1
    EXPECT_EQ(order_type(jump_set(E3())), otype_omega_plus(1, 1, 1));
    EXPECT_EQ(rank_from_order_type(OrderType::finite(3)), ord(1));
    EXPECT_EQ(rank_from_order_type(otype_omega_plus(1, 1, 1)), ord(2));
    EXPECT_EQ(rank_from_order_type(otype_omega_plus(2, 2, 1)), ord(3));
    EXPECT_EQ(rank_from_order_type(OrderType{}), ord(0));
}

TEST(CBRank, Complexity) {
    EXPECT_EQ(complexity(c(0)), ord(0));
    EXPECT_EQ(complexity(E1()), ord(1));
    EXPECT_EQ(complexity(E3()), ord(2));
    EXPECT_TRUE(member(c(0), ord(0)));
    EXPECT_FALSE(member(E3(), ord(1)));
    EXPECT_TRUE(member(E3(), ord(2)));
    EXPECT_TRUE(member(E1(), omega()));
}

TEST(CBRank, Restrict) {
    auto r = restrict_set(atoms({0, 1, 2}), q(1, 2), q(3));
    EXPECT_EQ(points(r, q(1)), (std::set<Rational>{q(1), q(2)}));
    auto tail = restrict_set(jump_set(E3()), q(-1, 4), q(1));
    EXPECT_EQ(cb_rank(tail), ord(2));
    EXPECT_EQ(rank_from_order_type(tail), ord(2));
    ASSERT_EQ(tail.blocks.size(), 1u);
    EXPECT_EQ(std::get<PLimit>(tail.blocks[0]).offset, q(1, 4));
    EXPECT_TRUE(restrict_set(jump_set(E3()), q(1, 2), q(1)).empty());
    EXPECT_TRUE(restrict_set(atoms({0, 1}), q(2), q(3)).empty());
}

TEST(CBRank, PairComplexity) {
    auto b = extend_step(E1(), 2, q(1));
    EXPECT_EQ(pair_complexity(c(0), b), ord(1));
    EXPECT_EQ(pair_complexity(c(-2), E3()), ord(2));
    EXPECT_EQ(pair_complexity(prefix(E3(), q(-1, 4)), E3()), ord(2));
    EXPECT_THROW(pair_complexity(E3(), c(-2)), std::invalid_argument);
}

TEST(CBRank, Witness) {
    for (const Ordinal& a : {ord(1), ord(2), ord(3), ord(4), omega() + ord(1), omega() + ord(2), w(1, 2) + ord(1),
                             w(2) + ord(1), w(2) + w(1) + ord(1)}) {
        Element f = witness(a, q(0), q(1), A3);
        EXPECT_EQ(complexity(f), a);
        EXPECT_EQ(rank_from_order_type(jump_set(f)), a) << a;
        EXPECT_EQ(f.rho, q(1));
        EXPECT_GE(tau(f), q(-1));
    }
    EXPECT_THROW(witness(omega(), q(0), q(1), A3), std::domain_error);
    EXPECT_THROW(witness(ord(0), q(0), q(1), A3), std::domain_error);
}

// the structural rank must agree with the independent order-type route
TEST(CBRankProperty, RankMatchesOrderType) {
    for (auto alphabet : {Alphabet::finite(2), Alphabet::finite(5)}) {
        Generator gen(31, alphabet);
        for (int i = 0; i < 500; ++i) {
            Element f = gen.element();
            auto s = jump_set(f);
            ASSERT_EQ(cb_rank(s), rank_from_order_type(s)) << serialize(f);
            if (!s.empty()) {
                ASSERT_EQ(ord(1) + cb_rank(derivative(s)), cb_rank(s)) << serialize(f);
            }
        }
    }
}

// jump_set agrees with the points where a brute-force expansion changes value
TEST(CBRankProperty, JumpSetMatchesExpansion) {
    Generator gen(32);
    Rational eps = q(1, 512);
    for (int i = 0; i < 300; ++i) {
        Element f = gen.element();
        auto flat = oracle::flatten(f, eps);
        auto want = oracle::jump_points(flat);
        auto got = points(jump_set(f), eps);
        for (auto& p : want)
            if (!oracle::in_fog(flat, p)) {
                ASSERT_TRUE(got.count(p)) << serialize(f) << " missing " << p;
            }
        for (auto& p : got)
            if (!oracle::in_fog(flat, p)) {
                ASSERT_TRUE(want.count(p)) << serialize(f) << " extra " << p;
            }
    }
}

TEST(CBRankProperty, RestrictAgreesWithPoints) {
    Generator gen(33);
    Rational eps = q(1, 256);
    for (int i = 0; i < 300; ++i) {
        Element f = gen.element();
        auto s = jump_set(f);
        Rational lo = gen.position(-8, 8), hi = lo + gen.gap() * 2;
        auto r = restrict_set(s, lo, hi);
        ASSERT_LE(cb_rank(r), cb_rank(s));
        ASSERT_EQ(cb_rank(r), rank_from_order_type(r));
        auto all = points(s, eps), part = points(r, eps);
        for (auto& p : part) ASSERT_TRUE(lo <= p && p <= hi) << p;
        for (auto& p : all)
            if (lo <= p && p <= hi) {
                // finer slots of r may sit below eps while the same slot of s did not, or vice versa
                if (!part.count(p)) {
                    ASSERT_TRUE(points(r, eps / 64).count(p)) << serialize(f) << " lost " << p;
                }
            }
    }
}

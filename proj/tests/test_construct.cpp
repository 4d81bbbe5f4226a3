#include "rtree/construct.hpp"

#include <gtest/gtest.h>

using namespace rtree;

namespace {

const Alphabet A3 = Alphabet::finite(3);

Rational q(long n, long d = 1) { return make_rational(n, d); }
Element c(long n) { return const_ray(q(n), A3); }
Element E1() { return make_element(q(1), {Step{q(0), 1}}, A3); }

}  // namespace

TEST(Construct, EscapeStep) {
    Element a = escape_step(c(0), ord(1), q(1));
    EXPECT_TRUE(leq(c(0), a));
    EXPECT_LE(a.rho, q(1));
    EXPECT_EQ(pair_complexity(c(0), a), ord(1));
    EXPECT_EQ(tau(a), q(0));
    ASSERT_EQ(a.blocks().size(), 1u);

    Element b = escape_step(c(0), ord(2), q(1));
    EXPECT_LE(b.rho, q(1));
    EXPECT_EQ(pair_complexity(c(0), b), ord(2));
    EXPECT_EQ(rank_from_order_type(restrict_set(jump_set(b), q(0), b.rho)), ord(2));

    Element r = escape_step(E1(), omega() + ord(1), q(1, 2));
    EXPECT_TRUE(std::holds_alternative<RampCluster>(r.blocks().back()));
    EXPECT_LE(r.rho, q(3, 2));
    EXPECT_TRUE(leq(E1(), r));
    EXPECT_EQ(pair_complexity(E1(), r), omega() + ord(1));
    EXPECT_EQ(rank_from_order_type(restrict_set(jump_set(r), E1().rho, r.rho)), omega() + ord(1));

    EXPECT_THROW(escape_step(c(0), omega(), q(1)), std::domain_error);
    EXPECT_THROW(escape_step(c(0), ord(0), q(1)), std::domain_error);
    EXPECT_THROW(escape_step(c(0), ord(1), q(0)), std::domain_error);
}

TEST(Construct, EscapeSequence) {
    auto seq = escape_sequence(c(0), BetaSeq::constant(ord(1)), q(1), 5);
    ASSERT_EQ(seq.size(), 5u);
    EXPECT_EQ(seq[0], c(0));
    Rational sum, bound(1);
    for (std::size_t n = 0; n + 1 < seq.size(); ++n) {
        bound /= 2;
        EXPECT_TRUE(seq[n].rho < seq[n + 1].rho && leq(seq[n], seq[n + 1]));
        EXPECT_LE(dist(seq[n], seq[n + 1]), bound);
        EXPECT_EQ(pair_complexity(seq[n], seq[n + 1]), ord(1));
        EXPECT_TRUE(member(seq[n + 1], ord(1)));
        sum += dist(seq[n], seq[n + 1]);
    }
    EXPECT_LE(sum, 1 - 1 / rational_pow(q(2), 5));

    auto ramp = escape_sequence(c(0), BetaSeq::towards(omega()), q(1), 6);
    for (std::size_t n = 0; n + 1 < ramp.size(); ++n) {
        EXPECT_EQ(pair_complexity(ramp[n], ramp[n + 1]), fundamental_seq(omega(), n));
        EXPECT_TRUE(member(ramp[n + 1], omega()));
    }
}

TEST(Construct, LimitOfChain) {
    Element lim = limit_of_chain(c(0), BetaSeq::constant(ord(1)), q(1));
    EXPECT_EQ(complexity(lim), ord(2));
    EXPECT_EQ(pair_complexity(c(0), lim), ord(2));
    EXPECT_TRUE(is_terminal(lim));
    EXPECT_EQ(lim.rho, q(1));

    Element x = witness(ord(3), q(0), q(1), A3);
    Element lim3 = limit_of_chain(x, BetaSeq::constant(ord(1)), q(1));
    EXPECT_EQ(complexity(lim3), ord(3));
    EXPECT_EQ(pair_complexity(x, lim3), ord(2));

    Element limw = limit_of_chain(c(0), BetaSeq::towards(omega()), q(1));
    EXPECT_EQ(complexity(limw), omega() + ord(1));
    EXPECT_EQ(rank_from_order_type(jump_set(limw)), omega() + ord(1));

    // continuing from a terminal element
    Element again = limit_of_chain(lim, BetaSeq::constant(ord(2)), q(1, 2));
    EXPECT_TRUE(leq(lim, again));
    EXPECT_EQ(pair_complexity(lim, again), ord(3));
}

TEST(Construct, IncompletenessDemo) {
    for (const Ordinal& alpha : {ord(1), ord(2), omega(), omega() + ord(1)}) {
        auto rep = incompleteness_demo(alpha, A3, 8);
        EXPECT_TRUE(rep.ok()) << alpha;
        EXPECT_EQ(rep.limit_complexity, alpha.succ());
        EXPECT_FALSE(rep.member_alpha);
        EXPECT_EQ(rep.sequence.size(), 8u);
    }
    EXPECT_THROW(incompleteness_demo(ord(0), A3, 4), std::domain_error);
}

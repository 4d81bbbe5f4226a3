#include "oracle.hpp"
#include "rtree/cbrank.hpp"
#include "rtree/gen.hpp"
#include "rtree/io.hpp"

#include <gtest/gtest.h>

using namespace rtree;

namespace {

const Alphabet A3 = Alphabet::finite(3);

Rational q(long n, long d = 1) { return make_rational(n, d); }

Element E1() { return make_element(q(1), {Step{q(0), 1}}, A3); }
JumpListPtr pulse() { return std::make_shared<JumpList>(JumpList{{Step{q(0), 1}, Step{q(1, 2), 0}}}); }
Element E3() { return make_element(q(1), {LimitCluster{q(0), q(1), q(1, 2), pulse(), 1, false}}, A3); }

// f and g agree with the brute-force expansion at every probe the expansion resolves
void expect_pointwise(const Element& f, const Element& ref, const Rational& upto, std::mt19937_64& rng, int probes = 100) {
    auto flat = oracle::flatten(ref, q(1, 4096));
    std::uniform_int_distribution<long> num(-4000, -1);
    int resolved = 0;
    for (int i = 0; i < probes; ++i) {
        Rational t = upto + make_rational(num(rng), 997);
        auto want = oracle::value(flat, t);
        if (!want) continue;
        ++resolved;
        ASSERT_EQ(eval(f, t), *want) << "t=" << t;
    }
    EXPECT_GT(resolved, probes / 2);
}

}  // namespace

TEST(Element, ConstRayAndTau) {
    auto c0 = const_ray(q(0), A3);
    EXPECT_EQ(tau(c0), q(0));
    EXPECT_EQ(c0.rho, q(0));
    EXPECT_EQ(const_ray(q(-3), A3).rho, q(-3));
    EXPECT_EQ(tau(const_ray(q(5), A3)), q(5));
    EXPECT_EQ(tau(E1()), q(0));
    EXPECT_EQ(tau(E3()), q(-1));
}

TEST(Element, Normalize) {
    Element raw{q(1), JumpList{{Step{q(0), 1}, Step{q(1, 2), 1}}}, A3};
    EXPECT_EQ(normalize(raw), E1());
    EXPECT_EQ(normalize(const_ray(q(0), A3)), const_ray(q(0), A3));
    Element zero_jump{q(1), JumpList{{Step{q(0), 0}}}, A3};
    EXPECT_EQ(normalize(zero_jump), const_ray(q(1), A3));
    std::mt19937_64 rng(1);
    expect_pointwise(normalize(zero_jump), zero_jump, q(1), rng);
}

TEST(Element, NormalizeRejects) {
    EXPECT_THROW(normalize(Element{q(1), JumpList{{Step{q(2), 1}}}, A3}), invalid_element);
    EXPECT_THROW(normalize(Element{q(1), JumpList{{Step{q(0), 5}}}, A3}), invalid_element);
    EXPECT_THROW(normalize(Element{q(1), JumpList{{Step{q(0), 1}, Step{q(-1), 2}}}, A3}), invalid_element);
    EXPECT_THROW(normalize(Element{q(1), JumpList{{LimitCluster{q(0), q(1), q(2), pulse(), 1, false}}}, A3}),
                 invalid_element);
}

TEST(Element, Prefix) {
    EXPECT_EQ(prefix(E1(), q(0)), const_ray(q(0), A3));
    EXPECT_EQ(prefix(E1(), q(1, 2)), make_element(q(1, 2), {Step{q(0), 1}}, A3));
    EXPECT_THROW(prefix(E1(), q(2)), std::domain_error);

    Element p = prefix(E3(), q(-1, 4));
    EXPECT_EQ(p.rho, q(-1, 4));
    // two whole copies at -1 and -1/2, nothing of copy 2 lies below -1/4
    for (const auto& b : p.blocks()) EXPECT_TRUE(std::holds_alternative<Step>(b));
    EXPECT_EQ(p.blocks().size(), 4u);
    EXPECT_EQ(complexity(p), ord(1));
    std::mt19937_64 rng(2);
    expect_pointwise(p, E3(), q(-1, 4), rng);
}

TEST(Element, ExtendStep) {
    auto c0 = const_ray(q(0), A3);
    EXPECT_EQ(extend_step(c0, 1, q(1)), E1());
    EXPECT_EQ(extend_step(E1(), 1, q(1)), make_element(q(2), {Step{q(0), 1}}, A3));
    auto b = extend_step(E1(), 2, q(1));
    EXPECT_EQ(b, make_element(q(2), {Step{q(0), 1}, Step{q(1), 2}}, A3));
    EXPECT_EQ(complexity(b), ord(1));
    EXPECT_THROW(extend_step(E1(), 3, q(1)), std::invalid_argument);
}

TEST(Element, Eval) {
    EXPECT_EQ(eval(const_ray(q(5), A3), q(0)), 0u);
    EXPECT_EQ(eval(E1(), q(1, 2)), 1u);
    EXPECT_EQ(eval(E3(), q(-3, 8)), 0u);
    EXPECT_EQ(eval(E3(), q(-1, 2)), 1u);
    EXPECT_EQ(eval(E3(), q(-7, 16)), 1u);
    EXPECT_EQ(eval(E3(), q(-5, 16)), 0u);
    EXPECT_EQ(eval(E3(), q(0)), 1u);
    EXPECT_THROW(eval(E1(), q(1)), std::domain_error);
    std::mt19937_64 rng(3);
    expect_pointwise(E3(), E3(), q(1), rng, 400);
}

TEST(Element, SerializeAndParse) {
    EXPECT_EQ(serialize(const_ray(q(0), A3)), "(elem :rho 0 :jumps [])");
    EXPECT_EQ(parse_element(serialize(E3()), A3), E3());
    EXPECT_EQ(parse_element(serialize_document(E3())), E3());
    try {
        parse_element("(elem :rho 1 :jumps [(step 2 1)])", A3);
        FAIL() << "accepted a jump beyond rho";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_NE(std::string(e.what()).find(">= 1"), std::string::npos);
    }
    EXPECT_THROW(parse_element("(elem :rho 1 :jumps [(step 0 1)", A3), parse_error);
    EXPECT_THROW(parse_element("(elem :rho 1/0 :jumps [])", A3), parse_error);
    EXPECT_THROW(parse_element("(elem :rho 1 :jumps [(step 0 1)] :bogus 2)", A3), parse_error);
    EXPECT_THROW(parse_element("(alphabet finite 3)\n(elem :rho 1 :jumps [(step 0 7)])"), parse_error);
}

TEST(ElementProperty, RoundTripAndNormalForm) {
    for (auto alphabet : {Alphabet::finite(2), Alphabet::finite(4), Alphabet::countable()}) {
        Generator gen(42, alphabet);
        for (int i = 0; i < 300; ++i) {
            Element f = gen.element();
            ASSERT_EQ(normalize(f), f) << serialize(f);
            ASSERT_EQ(parse_element(serialize_document(f)), f) << serialize(f);
        }
    }
}

TEST(ElementProperty, EvalMatchesExpansion) {
    Generator gen(5);
    std::mt19937_64 rng(6);
    for (int i = 0; i < 150; ++i) {
        Element f = gen.element();
        expect_pointwise(f, f, f.rho, rng, 40);
    }
}

TEST(ElementProperty, PrefixLaws) {
    Generator gen(7);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 200; ++i) {
        Element f = gen.element();
        ASSERT_EQ(prefix(f, f.rho), f);
        Rational s = gen.cut_point(f.rho - 4, f.rho);
        Rational t = gen.cut_point(s - 2, s);
        Element p = prefix(f, s);
        ASSERT_EQ(normalize(p), p);
        ASSERT_EQ(prefix(p, t), prefix(f, t)) << serialize(f) << " s=" << s << " t=" << t;
        expect_pointwise(p, f, s, rng, 30);
    }
}

TEST(ElementProperty, SpliceAndTranslate) {
    Generator gen(9);
    std::mt19937_64 rng(10);
    for (int i = 0; i < 200; ++i) {
        Element f = gen.element(), g = gen.element();
        Rational r = gen.position(-3, 3);
        Element moved = translate_element(f, r);
        ASSERT_EQ(moved.rho, f.rho + r);
        Rational t = gen.probe_below(f.rho);
        ASSERT_EQ(eval(moved, t + r), eval(f, t));

        Rational s = gen.cut_point(std::min(f.rho, g.rho) - 3, std::min(f.rho, g.rho));
        Element h = splice(prefix(f, s), g);
        ASSERT_EQ(normalize(h), h);
        Rational below = gen.probe_below(s), above = s + (g.rho - s) * make_rational(gen.uniform(0, 99), 100);
        ASSERT_EQ(eval(h, below), eval(f, below));
        if (s < g.rho) {
            ASSERT_EQ(eval(h, above), eval(g, above));
        }
    }
}

TEST(ElementProperty, Relabel) {
    Generator gen(12, Alphabet::finite(4));
    for (int i = 0; i < 200; ++i) {
        Element f = gen.element();
        LabelPerm p = gen.permutation(true);
        Element g = relabel(f, p);
        ASSERT_EQ(relabel(g, p.inverse()), f);
        Rational t = gen.probe_below(f.rho);
        ASSERT_EQ(eval(g, t), p(eval(f, t)));
    }
    EXPECT_THROW(relabel(E1(), LabelPerm::transposition(0, 1)), std::invalid_argument);
}

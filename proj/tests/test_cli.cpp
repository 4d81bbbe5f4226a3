#include "golden.hpp"

#include <gtest/gtest.h>

using namespace rtree;
namespace fs = std::filesystem;

using golden::run;
using golden::slurp;

TEST(Cli, Golden) {
    auto cases = golden::cases();
    ASSERT_GE(cases.size(), 15u);
    for (const auto& c : cases) {
        auto r = run(c.args);
        EXPECT_EQ(r.code, 0) << c.name << ": " << r.err;
        EXPECT_EQ(r.out, c.expected()) << c.name;
    }
}

TEST(Cli, InlineElements) {
    auto r = run({"dist", "(elem :rho 1 :jumps [(step 0 1)])", "(elem :rho 1 :jumps [(step 0 2)])"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "2\n");
    r = run({"--alphabet", "finite 2", "rank", "(elem :rho 1 :jumps [(step 0 1)])"});
    EXPECT_EQ(r.out, "1\n");
}

TEST(Cli, Errors) {
    auto r = run({"rank", "data/bad_pos.elem"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bad_pos.elem:2:22: jump position 2 >= 1"), std::string::npos) << r.err;

    r = run({"dist", "data/e1.elem", "data/e1_k3.elem"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("alphabet mismatch"), std::string::npos) << r.err;

    EXPECT_EQ(run({"dist", "data/e1.elem"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"check", "no-such-suite"}).code, 2);
    EXPECT_EQ(run({"dot", "data/e1.elem"}).code, 2);
    EXPECT_EQ(run({"rank", "data/missing.elem"}).code, 2);
    EXPECT_EQ(run({"witness", "--alpha", "w"}).code, 2);
    EXPECT_EQ(run({"--alphabet", "finite 1", "rank", "data/e1.elem"}).code, 2);
}

TEST(Cli, Undecided) {
    auto r = run({"--cap", "3", "dist", "data/alias_f.elem", "data/alias_g.elem"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE((r.out + r.err).find("UNDECIDED"), std::string::npos);
    set_unfold_cap(100000);
    r = run({"dist", "data/alias_f.elem", "data/alias_g.elem"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "0\n");
}

TEST(Cli, EscapeDemoJson) {
    fs::path out = fs::temp_directory_path() / "rtree_escape_test.json";
    auto r = run({"escape-demo", "--alpha", "w", "--kappa", "4", "--steps", "6", "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(j["alpha"], "w");
    EXPECT_EQ(j["limit_complexity"], "w + 1");
    EXPECT_EQ(j["sequence"].size(), 6u);
    EXPECT_EQ(j["ok"], true);
    fs::remove(out);
}

TEST(Cli, CheckSuite) {
    auto r = run({"check", "metric", "--cases", "50", "--seed", "3"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_NE(r.out.find("suite metric: cases=50 failures=0 undecided=0"), std::string::npos) << r.out;
}

TEST(Cli, RoundTripThroughWedge) {
    // the wedge document parses back to a point at the same place
    auto w = run({"wedge", "data/e1.elem", "data/e3.elem"});
    auto d = run({"dist", w.out, "data/cm1.elem"});
    EXPECT_EQ(d.code, 0) << d.err;
    EXPECT_EQ(d.out, "0\n");
}

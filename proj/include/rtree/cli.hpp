#pragma once

/**
 * Command-line front end, callable in-process.
 *
 * Exit codes: 0 ok, 1 property failure, 2 usage or parse error, 3 undecided.
 * Element arguments are file paths; an argument starting with '(' is read as
 * the element text itself.
 */

#include "rtree/check.hpp"
#include "rtree/dot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace rtree::cli {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Alphabet parse_alphabet_option(const std::string& text) {
    std::string t = text;
    for (auto& c : t)
        if (c == ':') c = ' ';
    std::istringstream is(t);
    std::string kind;
    is >> kind;
    if (kind == "countable") return Alphabet::countable();
    std::uint64_t n = 0;
    if (kind == "finite" && (is >> n) && n >= 2) return Alphabet::finite(n);
    throw usage_error("bad --alphabet '" + text + "': expected 'finite N' (N >= 2) or 'countable'");
}

inline std::string read_text(const std::string& arg) {
    if (!arg.empty() && arg.front() == '(') return arg;
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw usage_error("cannot read " + arg);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string display_name(const std::string& arg, std::size_t index) {
    if (!arg.empty() && arg.front() == '(') return "input" + std::to_string(index + 1);
    return std::filesystem::path(arg).filename().string();
}

inline Element load_element(const std::string& arg, const Alphabet& fallback) {
    std::string text = read_text(arg);
    try {
        return parse_element(text, fallback);
    } catch (const parse_error& e) {
        throw usage_error((arg.front() == '(' ? std::string("<arg>") : arg) + ":" + e.what());
    }
}

inline std::vector<Element> load_all(const std::vector<std::string>& args, const Alphabet& fallback) {
    std::vector<Element> out;
    for (const auto& a : args) out.push_back(load_element(a, fallback));
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i].alphabet == out[0].alphabet))
            throw usage_error("alphabet mismatch: " + args[0] + " has " + out[0].alphabet.to_string() + ", " + args[i] +
                              " has " + out[i].alphabet.to_string());
    return out;
}

inline Ordinal ordinal_option(const std::string& text) {
    try {
        return parse_ordinal(text);
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
}

inline Rational rational_option(const std::string& text) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
}

inline std::string bool_text(bool b) { return b ? "true" : "false"; }

inline nlohmann::ordered_json report_json(const EscapeReport& rep) {
    nlohmann::ordered_json j;
    j["alpha"] = rep.alpha.to_string();
    j["kappa"] = rep.alphabet.kappa() ? nlohmann::ordered_json(*rep.alphabet.kappa()) : nlohmann::ordered_json("aleph0");
    j["alphabet"] = rep.alphabet.to_string();
    j["radius"] = to_string(rep.radius);
    j["steps"] = rep.sequence.size();
    auto& seq = j["sequence"] = nlohmann::ordered_json::array();
    for (const auto& a : rep.sequence) seq.push_back(serialize(a));
    auto& d = j["distances"] = nlohmann::ordered_json::array();
    for (const auto& x : rep.steps) d.push_back(to_string(x));
    auto& s = j["partial_sums"] = nlohmann::ordered_json::array();
    for (const auto& x : rep.partial_sums) s.push_back(to_string(x));
    j["limit"] = serialize(rep.limit);
    j["tail_distance"] = to_string(rep.tail_distance);
    j["limit_complexity"] = rep.limit_complexity.to_string();
    j["pair_complexity"] = rep.pair_rank.to_string();
    j["pair_complexity_oracle"] = rep.pair_rank_oracle.to_string();
    j["member_alpha"] = rep.member_alpha;
    j["member_alpha_plus_1"] = rep.member_alpha_succ;
    j["checks"] = {{"chain_increasing", rep.chain_increasing},
                   {"chain_in_T_alpha", rep.chain_members},
                   {"cauchy_bounds", rep.cauchy_bounds},
                   {"tail_bound", rep.tail_bound}};
    j["ok"] = rep.ok();
    return j;
}

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact workbench for the universal real tree T_kappa and its filtration T^[alpha]", "rtree"};
    app.require_subcommand(1);
    std::string alphabet_text = "finite 3";
    std::uint64_t cap = 0;
    app.add_option("--alphabet", alphabet_text, "alphabet for inputs without a header: 'finite N' or 'countable'")
        ->capture_default_str();
    app.add_option("--cap", cap, "unfolding cap per comparison (default 100000, or $RTREE_UNFOLD_CAP)");

    std::vector<std::string> files;
    std::string alpha_text, at_text = "0", width_text = "1", kappa_text = "3", out_path, suite;
    std::uint64_t steps = 10, seed = 1, cases = 10000;

    auto* dist_cmd = app.add_subcommand("dist", "exact distance d(f,g)");
    dist_cmd->add_option("files", files, "f g")->required()->expected(2);
    auto* wedge_cmd = app.add_subcommand("wedge", "greatest common prefix f ^ g");
    wedge_cmd->add_option("files", files, "f g")->required()->expected(2);
    auto* leq_cmd = app.add_subcommand("leq", "is f a prefix of g");
    leq_cmd->add_option("files", files, "f g")->required()->expected(2);
    auto* rank_cmd = app.add_subcommand("rank", "complexity: Cantor-Bendixson rank of the jump set");
    rank_cmd->alias("complexity");
    rank_cmd->add_option("files", files, "f")->required()->expected(1);
    auto* member_cmd = app.add_subcommand("member", "is f in T^[alpha]");
    member_cmd->add_option("files", files, "f")->required()->expected(1);
    member_cmd->add_option("--alpha", alpha_text)->required();
    auto* witness_cmd = app.add_subcommand("witness", "canonical element of complexity alpha");
    witness_cmd->add_option("--alpha", alpha_text)->required();
    witness_cmd->add_option("--at", at_text)->capture_default_str();
    witness_cmd->add_option("--width", width_text)->capture_default_str();
    auto* apply_cmd = app.add_subcommand("apply", "apply an isometry to an element");
    apply_cmd->add_option("files", files, "isometry f")->required()->expected(2);
    auto* two_cmd = app.add_subcommand("two-point", "isometry sending a1 to b1 and a2 to b2");
    two_cmd->add_option("files", files, "a1 a2 b1 b2")->required()->expected(4);
    auto* dir_cmd = app.add_subcommand("directions", "one representative per direction at x");
    dir_cmd->add_option("files", files, "x")->required()->expected(1);
    auto* escape_cmd = app.add_subcommand("escape-demo", "Cauchy sequence in T^[alpha] escaping to T^[alpha+1]");
    escape_cmd->add_option("--alpha", alpha_text)->required();
    escape_cmd->add_option("--kappa", kappa_text, "finite kappa >= 3, or 'countable'")->capture_default_str();
    escape_cmd->add_option("--steps", steps, "chain length N")->capture_default_str()->check(CLI::PositiveNumber);
    escape_cmd->add_option("--out", out_path, "write the JSON report here instead of stdout");
    auto* check_cmd = app.add_subcommand("check", "run a property suite");
    check_cmd->add_option("suite", suite)->required()->check(CLI::IsMember(check::suite_names()));
    check_cmd->add_option("--cases", cases)->capture_default_str();
    check_cmd->add_option("--seed", seed)->capture_default_str();
    check_cmd->add_option("--alpha", alpha_text, "escape suite: a single alpha");
    auto* dot_cmd = app.add_subcommand("dot", "Graphviz rendering of the subtree spanned by the inputs");
    dot_cmd->add_option("files", files)->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cap) set_unfold_cap(cap);
        Alphabet fallback = parse_alphabet_option(alphabet_text);
        auto* cmd = app.get_subcommands().front();
        std::string name = cmd->get_name();

        if (name == "dist" || name == "wedge" || name == "leq") {
            auto xs = load_all(files, fallback);
            if (name == "dist") out << to_string(dist(xs[0], xs[1])) << '\n';
            if (name == "wedge") out << serialize_document(wedge(xs[0], xs[1]));
            if (name == "leq") out << bool_text(leq(xs[0], xs[1])) << '\n';
        } else if (name == "rank") {
            out << complexity(load_element(files[0], fallback)).to_string() << '\n';
        } else if (name == "member") {
            out << bool_text(member(load_element(files[0], fallback), ordinal_option(alpha_text))) << '\n';
        } else if (name == "witness") {
            Ordinal alpha = ordinal_option(alpha_text);
            if (!alpha.is_successor())
                throw usage_error("no witness of rank " + alpha.to_string() +
                                  ": complexities are 0 or successor ordinals");
            Rational width = rational_option(width_text);
            if (width <= 0) throw usage_error("--width must be positive");
            out << serialize_document(witness(alpha, rational_option(at_text), width, fallback));
        } else if (name == "apply") {
            std::string text = read_text(files[0]);
            Isometry phi;
            Element f = load_element(files[1], fallback);
            try {
                phi = parse_isometry(text, f.alphabet);
            } catch (const parse_error& e) {
                throw usage_error(files[0] + ":" + e.what());
            }
            out << serialize_document(apply(phi, f));
        } else if (name == "two-point") {
            auto xs = load_all(files, fallback);
            if (dist(xs[0], xs[1]) != dist(xs[2], xs[3])) throw usage_error("d(a1,a2) != d(b1,b2)");
            auto phi = two_point_map(xs[0], xs[1], xs[2], xs[3]);
            out << xs[0].alphabet.to_string() << '\n' << serialize(phi) << '\n';
        } else if (name == "directions") {
            Element x = load_element(files[0], fallback);
            if (!x.alphabet.is_finite()) throw usage_error("directions need a finite alphabet");
            for (const auto& [d, rep] : enumerate_directions(x)) out << d.to_string() << '\t' << serialize(rep) << '\n';
        } else if (name == "escape-demo") {
            Ordinal alpha = ordinal_option(alpha_text);
            if (alpha.is_zero()) throw usage_error("--alpha must be at least 1");
            Alphabet alphabet = Alphabet::countable();
            if (kappa_text != "countable") {
                std::uint64_t k = 0;
                try {
                    std::size_t used = 0;
                    k = std::stoull(kappa_text, &used);
                    if (used != kappa_text.size()) k = 0;
                } catch (const std::exception&) {
                }
                if (k < 3) throw usage_error("--kappa must be an integer >= 3 or 'countable'");
                alphabet = Alphabet::for_kappa(k);
            }
            auto rep = incompleteness_demo(alpha, alphabet, steps);
            std::string text = report_json(rep).dump(2) + "\n";
            if (out_path.empty()) {
                out << text;
            } else {
                std::ofstream f(out_path, std::ios::binary);
                if (!f) throw usage_error("cannot write " + out_path);
                f << text;
                out << "wrote " << out_path << '\n';
            }
            return rep.ok() ? 0 : 1;
        } else if (name == "check") {
            check::Options o;
            o.seed = seed;
            o.cases = cases;
            if (!alpha_text.empty()) o.alpha = ordinal_option(alpha_text);
            if (o.alpha && o.alpha->is_zero()) throw usage_error("--alpha must be at least 1");
            auto r = check::run_suite(suite, o);
            check::print(out, *r);
            return r->ok() ? 0 : 1;
        } else if (name == "dot") {
            if (files.size() < 2) throw usage_error("dot needs at least two elements");
            auto xs = load_all(files, fallback);
            std::vector<std::string> names;
            for (std::size_t i = 0; i < files.size(); ++i) names.push_back(display_name(files[i], i));
            out << to_dot(xs, names);
        }
        return 0;
    } catch (const undecided_error& e) {
        err << "UNDECIDED: " << e.what() << '\n';
        return 3;
    } catch (const usage_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const parse_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace rtree::cli

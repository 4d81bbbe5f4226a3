#pragma once

/**
 * Text form of elements.
 *
 *   (alphabet finite 4)                                  optional header
 *   (elem :rho Q :jumps [BLOCK ...])
 *
 *   BLOCK := (step Q LBL)
 *          | (lim :at Q :off Q :ratio Q :body [BLOCK ...] :label LBL [:terminal true])
 *          | (ramp :at Q :off Q :ratio Q :gamma ORD :label LBL [:pulse LBL] [:skip N] [:terminal true])
 *
 * A ramp's pulse defaults to the smallest label different from the value in
 * force before it, and is only printed when it differs from that default.
 */

#include "rtree/element.hpp"
#include "rtree/sexpr.hpp"

#include <charconv>
#include <limits>
#include <map>
#include <sstream>

namespace rtree {

namespace detail {

inline std::string ordinal_token(const Ordinal& a) {
    std::string s = a.to_string();
    std::string out;
    for (char c : s)
        if (c != ' ') out += c;
    return out;
}

inline void write_blocks(std::ostream& os, const std::vector<JumpBlock>& blocks, Label incoming) {
    os << '[';
    Label cur = incoming;
    bool first = true;
    for (const auto& b : blocks) {
        if (!first) os << ' ';
        first = false;
        if (auto* s = std::get_if<Step>(&b)) {
            os << "(step " << to_string(s->pos) << ' ' << s->label << ')';
            cur = s->label;
            continue;
        }
        auto g = geometry(b);
        if (auto* c = std::get_if<LimitCluster>(&b)) {
            os << "(lim :at " << to_string(c->limit) << " :off " << to_string(c->offset) << " :ratio "
               << to_string(c->ratio) << " :body ";
            write_blocks(os, c->body->blocks, cur);
        } else {
            const auto& r = std::get<RampCluster>(b);
            os << "(ramp :at " << to_string(r.limit) << " :off " << to_string(r.offset) << " :ratio "
               << to_string(r.ratio) << " :gamma " << ordinal_token(r.gamma);
        }
        os << " :label " << g.at_label;
        if (auto* r = std::get_if<RampCluster>(&b)) {
            if (r->pulse != pulse_label(cur)) os << " :pulse " << r->pulse;
            if (r->skip != 0) os << " :skip " << r->skip;
        }
        if (g.terminal) os << " :terminal true";
        os << ')';
        cur = g.at_label;
    }
    os << ']';
}

}  // namespace detail

inline std::string serialize(const Element& f) {
    std::ostringstream os;
    os << "(elem :rho " << to_string(f.rho) << " :jumps ";
    detail::write_blocks(os, f.blocks(), 0);
    os << ')';
    return os.str();
}

/// Header line plus element, newline terminated.
inline std::string serialize_document(const Element& f) { return f.alphabet.to_string() + "\n" + serialize(f) + "\n"; }

namespace detail {

constexpr Label unset_pulse = std::numeric_limits<Label>::max();

struct ElementDecoder {
    // source position of every block, keyed by its path
    std::map<std::vector<std::size_t>, const sexpr::Node*> where;
    std::vector<std::size_t> path;

    static Rational rational(const sexpr::Node& n) {
        if (!n.is_atom()) n.fail("expected a rational");
        try {
            return parse_rational(n.text);
        } catch (const std::invalid_argument&) {
            n.fail("malformed rational '" + n.text + "'");
        }
    }
    static std::uint64_t natural(const sexpr::Node& n, const char* what) {
        std::uint64_t v = 0;
        const auto& t = n.text;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (!n.is_atom() || t.empty() || ec != std::errc() || p != t.data() + t.size())
            n.fail(std::string("expected ") + what);
        return v;
    }
    static bool boolean(const sexpr::Node& n) {
        if (n.is_atom() && n.text == "true") return true;
        if (n.is_atom() && n.text == "false") return false;
        n.fail("expected true or false");
    }

    std::vector<JumpBlock> blocks(const sexpr::Node& n) {
        if (!n.is_vector()) n.fail("expected [BLOCK ...]");
        std::vector<JumpBlock> out;
        for (std::size_t i = 0; i < n.items.size(); ++i) {
            path.push_back(i);
            where[path] = &n.items[i];
            out.push_back(block(n.items[i]));
            path.pop_back();
        }
        return out;
    }

    JumpBlock block(const sexpr::Node& n) {
        auto head = n.head();
        if (head == "step") {
            if (n.items.size() != 3) n.fail("(step Q LBL) takes two arguments");
            return Step{rational(n.items[1]), natural(n.items[2], "a label")};
        }
        if (head != "lim" && head != "ramp") n.fail("expected step, lim or ramp");
        auto kw = sexpr::Keywords::of(n, 1);
        Rational at = rational(kw.need("at")), off = rational(kw.need("off")), ratio = rational(kw.need("ratio"));
        Label label = natural(kw.need("label"), "a label");
        bool terminal = kw.find("terminal") ? boolean(*kw.find("terminal")) : false;
        if (head == "lim") {
            kw.allow_only({"at", "off", "ratio", "body", "label", "terminal"});
            auto body = std::make_shared<JumpList>(JumpList{blocks(kw.need("body"))});
            return LimitCluster{at, off, ratio, std::move(body), label, terminal};
        }
        kw.allow_only({"at", "off", "ratio", "gamma", "label", "pulse", "skip", "terminal"});
        const auto& g = kw.need("gamma");
        Ordinal gamma;
        try {
            gamma = parse_ordinal(g.text);
        } catch (const std::invalid_argument& e) {
            g.fail(e.what());
        }
        Label pulse = kw.find("pulse") ? natural(*kw.find("pulse"), "a label") : unset_pulse;
        std::uint64_t skip = kw.find("skip") ? natural(*kw.find("skip"), "a natural") : 0;
        return RampCluster{at, off, ratio, gamma, pulse, skip, label, terminal};
    }
};

/// Fills in default ramp pulses from the value in force.
inline void resolve_pulses(std::vector<JumpBlock>& blocks, Label incoming) {
    Label cur = incoming;
    for (auto& b : blocks) {
        if (auto* s = std::get_if<Step>(&b)) {
            cur = s->label;
        } else if (auto* c = std::get_if<LimitCluster>(&b)) {
            auto body = std::make_shared<JumpList>(*c->body);
            resolve_pulses(body->blocks, cur);
            c->body = std::move(body);
            cur = c->at_label;
        } else {
            auto& r = std::get<RampCluster>(b);
            if (r.pulse == unset_pulse) r.pulse = pulse_label(cur);
            cur = r.at_label;
        }
    }
}

inline Alphabet decode_alphabet(const sexpr::Node& n) {
    if (n.items.size() == 2 && n.items[1].is_atom() && n.items[1].text == "countable") return Alphabet::countable();
    if (n.items.size() == 3 && n.items[1].is_atom() && n.items[1].text == "finite") {
        auto size = ElementDecoder::natural(n.items[2], "an alphabet size");
        if (size < 2) n.items[2].fail("finite alphabet needs at least 2 labels");
        return Alphabet::finite(size);
    }
    n.fail("expected (alphabet finite N) or (alphabet countable)");
}

}  // namespace detail

struct ParsedElement {
    Element element;
    std::optional<Alphabet> header;  // as declared in the text, if any
};

/// Decodes one `(elem ...)` form; `alphabet` applies when the text has no header.
inline Element decode_element(const sexpr::Node& n, const Alphabet& alphabet) {
    if (n.head() != "elem") n.fail("expected (elem :rho Q :jumps [...])");
    auto kw = sexpr::Keywords::of(n, 1);
    kw.allow_only({"rho", "jumps"});
    detail::ElementDecoder dec;
    Rational rho = detail::ElementDecoder::rational(kw.need("rho"));
    auto blocks = dec.blocks(kw.need("jumps"));
    detail::resolve_pulses(blocks, 0);
    try {
        return normalize(Element{rho, JumpList{std::move(blocks)}, alphabet});
    } catch (const invalid_element& e) {
        // report at the innermost block we have a position for
        auto p = e.path();
        while (!p.empty() && !dec.where.count(p)) p.pop_back();
        const sexpr::Node* at = p.empty() ? &n : dec.where.at(p);
        at->fail(e.what());
    }
}

inline ParsedElement parse_element_document(std::string_view text, const Alphabet& fallback) {
    auto forms = sexpr::Reader(text).read_all();
    std::optional<Alphabet> header;
    const sexpr::Node* elem = nullptr;
    for (const auto& f : forms) {
        if (f.head() == "alphabet") {
            if (header || elem) f.fail("the alphabet header must come first and only once");
            header = detail::decode_alphabet(f);
        } else {
            if (elem) f.fail("expected exactly one element");
            elem = &f;
        }
    }
    if (!elem) throw parse_error("no element found", 1, 1);
    return {decode_element(*elem, header.value_or(fallback)), header};
}

inline Element parse_element(std::string_view text, const Alphabet& fallback = Alphabet::finite(2)) {
    return parse_element_document(text, fallback).element;
}

}  // namespace rtree

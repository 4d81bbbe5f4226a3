#pragma once

/**
 * Isometries of the tree as expression trees, applied exactly.
 *
 *   (id)  (translate Q)  (reflect)  (branch-swap ELEM)
 *   (dir-perm ELEM [(l1 l2) ...])  (relabel [(l1 l2) ...])  (compose ISO ...)
 *
 * Compose applies its parts right to left.
 */

#include "rtree/io.hpp"
#include "rtree/metric.hpp"

namespace rtree {

struct Isometry;

namespace iso {

struct Id {};
struct Translate {
    Rational r;
};
/// Reflection of the base line through 0, carrying the branches along.
struct Reflect {};
/// The involution exchanging a with c_{rho_a} and fixing c_r for r <= tau_a.
struct BranchSwap {
    Element a;
};
/// Fixes everything not strictly above x; relabels the part above x by sigma.
struct DirPerm {
    Element x;
    LabelPerm sigma;
};
/// Relabels every value; sigma fixes 0.
struct Relabel {
    LabelPerm sigma;
};
struct Compose {
    std::vector<Isometry> parts;
};

}  // namespace iso

struct Isometry {
    std::variant<iso::Id, iso::Translate, iso::Reflect, iso::BranchSwap, iso::DirPerm, iso::Relabel, iso::Compose> node;
};

inline Isometry identity_map() { return {iso::Id{}}; }
inline Isometry translate(Rational r) { return {iso::Translate{std::move(r)}}; }
inline Isometry reflect() { return {iso::Reflect{}}; }
inline Isometry branch_swap(Element a) { return {iso::BranchSwap{std::move(a)}}; }
inline Isometry dir_perm(Element x, LabelPerm sigma) { return {iso::DirPerm{std::move(x), std::move(sigma)}}; }
inline Isometry relabel_map(LabelPerm sigma) {
    if (sigma(0) != 0) throw std::invalid_argument("relabelling must fix the label 0");
    return {iso::Relabel{std::move(sigma)}};
}
/// parts[0] after parts[1] after ...
inline Isometry compose(std::vector<Isometry> parts) { return {iso::Compose{std::move(parts)}}; }

namespace detail {

inline Element apply_branch_swap(const Element& a, const Element& b) {
    detail::require_same_alphabet(a, b);
    if (a.blocks().empty()) return b;
    Rational t = tau(a);
    Rational s1 = common_prefix_length(b, a);
    Rational s2 = tau(b) < a.rho ? tau(b) : a.rho;
    if (s1 <= t && s2 <= t) return b;
    // the branch of a at sigma is traded for the branch of the base line
    bool via_a = s1 > t;
    Rational sigma = via_a ? s1 : s2;
    LabelPerm pi = sigma < a.rho ? LabelPerm::transposition(0, eval(a, sigma)) : LabelPerm{};
    Element head = via_a ? const_ray(sigma, a.alphabet) : prefix(a, sigma);
    return splice(head, b, pi);
}

inline Element apply_dir_perm(const Element& x, const LabelPerm& sigma, const Element& g) {
    detail::require_same_alphabet(x, g);
    for (auto& [k, v] : sigma.mapping())
        if (!x.alphabet.contains(k) || !x.alphabet.contains(v)) throw std::invalid_argument("permutation leaves the alphabet");
    if (!(x.rho < g.rho) || !leq(x, g)) return g;
    return splice(x, g, sigma);
}

}  // namespace detail

inline Element apply(const Isometry& phi, const Element& f) {
    return std::visit(
        [&](const auto& n) -> Element {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, iso::Id>) {
                return f;
            } else if constexpr (std::is_same_v<T, iso::Translate>) {
                return translate_element(f, n.r);
            } else if constexpr (std::is_same_v<T, iso::Reflect>) {
                // value at t >= -tau is f(t + 2 tau)
                return translate_element(f, -2 * tau(f));
            } else if constexpr (std::is_same_v<T, iso::BranchSwap>) {
                return detail::apply_branch_swap(n.a, f);
            } else if constexpr (std::is_same_v<T, iso::DirPerm>) {
                return detail::apply_dir_perm(n.x, n.sigma, f);
            } else if constexpr (std::is_same_v<T, iso::Relabel>) {
                return relabel(f, n.sigma);
            } else {
                Element out = f;
                for (auto it = n.parts.rbegin(); it != n.parts.rend(); ++it) out = apply(*it, out);
                return out;
            }
        },
        phi.node);
}

inline Isometry invert(const Isometry& phi) {
    return std::visit(
        [&](const auto& n) -> Isometry {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, iso::Translate>) {
                return translate(-n.r);
            } else if constexpr (std::is_same_v<T, iso::DirPerm>) {
                return dir_perm(n.x, n.sigma.inverse());
            } else if constexpr (std::is_same_v<T, iso::Relabel>) {
                return relabel_map(n.sigma.inverse());
            } else if constexpr (std::is_same_v<T, iso::Compose>) {
                std::vector<Isometry> parts;
                for (auto it = n.parts.rbegin(); it != n.parts.rend(); ++it) parts.push_back(invert(*it));
                return compose(std::move(parts));
            } else {
                return phi;  // Id, Reflect and BranchSwap are involutions
            }
        },
        phi.node);
}

namespace detail {

/// Isometry taking p1 to c_0 and p2 to c_r with r = d(p1, p2).
inline Isometry normalize_pair(const Element& p1, const Element& p2) {
    std::vector<Isometry> steps;  // applied in order
    steps.push_back(branch_swap(p1));
    steps.push_back(translate(-p1.rho));
    Element img = apply(steps[1], apply(steps[0], p2));
    if (tau(img) < 0) {
        steps.push_back(reflect());
        img = apply(steps.back(), img);
    }
    steps.push_back(branch_swap(img));
    std::reverse(steps.begin(), steps.end());
    return compose(std::move(steps));
}

}  // namespace detail

/// An isometry psi with psi(a1) = b1 and psi(a2) = b2.
inline Isometry two_point_map(const Element& a1, const Element& a2, const Element& b1, const Element& b2) {
    if (dist(a1, a2) != dist(b1, b2)) throw std::invalid_argument("two_point_map: d(a1,a2) != d(b1,b2)");
    return compose({invert(detail::normalize_pair(b1, b2)), detail::normalize_pair(a1, a2)});
}

// ---------------------------------------------------------------------------
// Text form

namespace detail {

inline void write_perm(std::ostream& os, const LabelPerm& p) {
    os << '[';
    bool first = true;
    for (auto& [k, v] : p.mapping()) {
        if (!first) os << ' ';
        first = false;
        os << '(' << k << ' ' << v << ')';
    }
    os << ']';
}

inline void write_isometry(std::ostream& os, const Isometry& phi) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, iso::Id>) {
                os << "(id)";
            } else if constexpr (std::is_same_v<T, iso::Translate>) {
                os << "(translate " << to_string(n.r) << ')';
            } else if constexpr (std::is_same_v<T, iso::Reflect>) {
                os << "(reflect)";
            } else if constexpr (std::is_same_v<T, iso::BranchSwap>) {
                os << "(branch-swap " << serialize(n.a) << ')';
            } else if constexpr (std::is_same_v<T, iso::DirPerm>) {
                os << "(dir-perm " << serialize(n.x) << ' ';
                write_perm(os, n.sigma);
                os << ')';
            } else if constexpr (std::is_same_v<T, iso::Relabel>) {
                os << "(relabel ";
                write_perm(os, n.sigma);
                os << ')';
            } else {
                os << "(compose";
                for (const auto& p : n.parts) {
                    os << ' ';
                    write_isometry(os, p);
                }
                os << ')';
            }
        },
        phi.node);
}

inline LabelPerm decode_perm(const sexpr::Node& n) {
    if (!n.is_vector()) n.fail("expected [(l1 l2) ...]");
    std::map<Label, Label> m;
    for (const auto& pair : n.items) {
        if (!pair.is_list() || pair.items.size() != 2) pair.fail("expected (from to)");
        Label from = ElementDecoder::natural(pair.items[0], "a label");
        if (m.count(from)) pair.fail("label mapped twice");
        m[from] = ElementDecoder::natural(pair.items[1], "a label");
    }
    try {
        return LabelPerm(std::move(m));
    } catch (const std::invalid_argument& e) {
        n.fail(e.what());
    }
}

}  // namespace detail

inline std::string serialize(const Isometry& phi) {
    std::ostringstream os;
    detail::write_isometry(os, phi);
    return os.str();
}

inline Isometry decode_isometry(const sexpr::Node& n, const Alphabet& alphabet) {
    auto head = n.head();
    auto arity = [&](std::size_t k) {
        if (n.items.size() != k + 1) n.fail("(" + std::string(head) + " ...) takes " + std::to_string(k) + " argument(s)");
    };
    if (head == "id") {
        arity(0);
        return identity_map();
    }
    if (head == "translate") {
        arity(1);
        return translate(detail::ElementDecoder::rational(n.items[1]));
    }
    if (head == "reflect") {
        arity(0);
        return reflect();
    }
    if (head == "branch-swap") {
        arity(1);
        return branch_swap(decode_element(n.items[1], alphabet));
    }
    if (head == "dir-perm") {
        arity(2);
        return dir_perm(decode_element(n.items[1], alphabet), detail::decode_perm(n.items[2]));
    }
    if (head == "relabel") {
        arity(1);
        auto p = detail::decode_perm(n.items[1]);
        if (p(0) != 0) n.items[1].fail("relabelling must fix the label 0");
        return relabel_map(std::move(p));
    }
    if (head == "compose") {
        std::vector<Isometry> parts;
        for (std::size_t i = 1; i < n.items.size(); ++i) parts.push_back(decode_isometry(n.items[i], alphabet));
        return compose(std::move(parts));
    }
    n.fail("expected an isometry: id, translate, reflect, branch-swap, dir-perm, relabel or compose");
}

/// Text with an optional alphabet header followed by one isometry.
inline Isometry parse_isometry(std::string_view text, const Alphabet& fallback = Alphabet::finite(2)) {
    auto forms = sexpr::Reader(text).read_all();
    std::optional<Alphabet> header;
    const sexpr::Node* body = nullptr;
    for (const auto& f : forms) {
        if (f.head() == "alphabet" && !header && !body) {
            header = detail::decode_alphabet(f);
        } else {
            if (body) f.fail("expected exactly one isometry");
            body = &f;
        }
    }
    if (!body) throw parse_error("no isometry found", 1, 1);
    return decode_isometry(*body, header.value_or(fallback));
}

}  // namespace rtree

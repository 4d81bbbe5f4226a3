#pragma once

// Graphviz rendering of the subtree spanned by finitely many points.

#include "rtree/io.hpp"
#include "rtree/metric.hpp"

#include <sstream>

namespace rtree {

/**
 * Vertices are the inputs and their pairwise wedges (equal points merged);
 * each vertex hangs off the longest vertex strictly below it, with the edge
 * weighted by the difference in rho.  Inputs are labelled by name, branch
 * vertices by the rho of the wedge.
 */
inline std::string to_dot(const std::vector<Element>& points, const std::vector<std::string>& names) {
    if (points.size() != names.size()) throw std::invalid_argument("to_dot: one name per point");
    struct Vertex {
        Element point;
        std::string label;
        bool input;
    };
    std::vector<Vertex> vs;
    auto find = [&](const Element& p) -> Vertex* {
        for (auto& v : vs)
            if (same_point(v.point, p)) return &v;
        return nullptr;
    };
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (auto* v = find(points[i])) {
            v->label += "," + names[i];
        } else {
            vs.push_back({points[i], names[i], true});
        }
    }
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            Element w = wedge(points[i], points[j]);
            if (!find(w)) vs.push_back({w, "rho=" + to_string(w.rho), false});
        }

    std::ostringstream os;
    os << "graph rtree {\n";
    for (std::size_t i = 0; i < vs.size(); ++i) {
        os << "  v" << i << " [label=\"" << vs[i].label << "\"";
        if (!vs[i].input) os << ", shape=circle";
        os << "];\n";
    }
    for (std::size_t i = 0; i < vs.size(); ++i) {
        std::optional<std::size_t> parent;
        for (std::size_t j = 0; j < vs.size(); ++j) {
            if (j == i || !(vs[j].point.rho < vs[i].point.rho) || !leq(vs[j].point, vs[i].point)) continue;
            if (!parent || vs[j].point.rho > vs[*parent].point.rho) parent = j;
        }
        if (parent)
            os << "  v" << *parent << " -- v" << i << " [label=\"" << to_string(vs[i].point.rho - vs[*parent].point.rho)
               << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace rtree

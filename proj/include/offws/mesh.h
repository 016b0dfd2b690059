// Triangle boundary meshes: OBJ input, label assignment, and per-triangle
// queries (closest point, ray intersection) used by the BVH.

#pragma once

#include "geom.h"

#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace offws {

// Boundary-part assignment rule. Either everything is Dirichlet, or points
// with p.dot(axis) > threshold are Neumann (half-space rule).
struct LabelRule {
    bool allDirichlet = true;
    Vec3 axis = Vec3(0, 0, 1);
    double threshold = 0.0;

    static LabelRule dirichlet() { return {}; }
    static LabelRule halfSpace(const Vec3& axis, double threshold) {
        LabelRule r;
        r.allDirichlet = false;
        r.axis = axis.normalized();
        r.threshold = threshold;
        return r;
    }

    BoundaryLabel operator()(const Vec3& p) const {
        if (allDirichlet) return BoundaryLabel::Dirichlet;
        return p.dot(axis) > threshold ? BoundaryLabel::Neumann : BoundaryLabel::Dirichlet;
    }
};

struct BoundaryMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryLabel> labels;  // one per triangle

    int triangleCount() const { return int(triangles.size()); }

    Vec3 corner(int tri, int k) const { return vertices[triangles[tri][k]]; }

    Vec3 centroid(int tri) const {
        return (corner(tri, 0) + corner(tri, 1) + corner(tri, 2)) / 3.0;
    }

    // Outward normal from winding; meshes must be consistently wound outward.
    Vec3 faceNormal(int tri) const {
        Vec3 n = (corner(tri, 1) - corner(tri, 0)).cross(corner(tri, 2) - corner(tri, 0));
        double len = n.norm();
        return len > 0 ? Vec3(n / len) : Vec3(0, 0, 1);
    }

    Aabb<3> bounds() const {
        Aabb<3> box;
        for (const auto& v : vertices) box.expand(v);
        return box;
    }

    void assignLabels(const LabelRule& rule) {
        labels.resize(triangles.size());
        for (int t = 0; t < triangleCount(); ++t) labels[t] = rule(centroid(t));
    }

    // Translate and uniformly scale so the mesh fits in [-1, 1]^3.
    void normalizeToUnitBox() {
        Aabb<3> box = bounds();
        Vec3 c = box.center();
        double half = 0.5 * box.extent().maxCoeff();
        double s = half > 0 ? 1.0 / half : 1.0;
        for (auto& v : vertices) v = (v - c) * s;
    }

    void validate() const {
        if (labels.size() != triangles.size())
            throw std::runtime_error("mesh: label count does not match triangle count");
        int n = int(vertices.size());
        for (const auto& t : triangles)
            for (int k : t)
                if (k < 0 || k >= n) throw std::runtime_error("mesh: vertex index out of range");
        Aabb<3> box = bounds();
        if (!box.lo.allFinite() || !box.hi.allFinite())
            throw std::runtime_error("mesh: non-finite vertex data");
    }
};

// Closest point on a triangle (Ericson, Real-Time Collision Detection).
inline Vec3 closestPointOnTriangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return a;

    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return b;

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;

    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return c;

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;

    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

    double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

// Moller-Trumbore ray/triangle intersection; returns t or nothing.
inline std::optional<double> rayTriangle(const Vec3& o, const Vec3& d, const Vec3& a,
                                         const Vec3& b, const Vec3& c, double tMax) {
    constexpr double kEps = 1e-14;
    Vec3 e1 = b - a, e2 = c - a;
    Vec3 pv = d.cross(e2);
    double det = e1.dot(pv);
    if (std::abs(det) < kEps) return std::nullopt;
    double inv = 1.0 / det;
    Vec3 tv = o - a;
    double u = tv.dot(pv) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    Vec3 qv = tv.cross(e1);
    double v = d.dot(qv) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    double t = e2.dot(qv) * inv;
    if (t <= 1e-12 || t > tMax) return std::nullopt;
    return t;
}

// Minimal wavefront OBJ reader: v and f records, fan triangulation.
inline BoundaryMesh loadObj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open OBJ file: " + path);

    BoundaryMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            double x, y, z;
            ls >> x >> y >> z;
            mesh.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<int> ids;
            std::string tok;
            while (ls >> tok) {
                // "7", "7/1", "7//3", "7/1/3" all start with the vertex index
                int v = std::stoi(tok.substr(0, tok.find('/')));
                if (v < 0) v = int(mesh.vertices.size()) + v + 1;
                ids.push_back(v - 1);
            }
            for (size_t k = 2; k < ids.size(); ++k)
                mesh.triangles.push_back({ids[0], ids[int(k) - 1], ids[int(k)]});
        }
    }
    mesh.labels.assign(mesh.triangles.size(), BoundaryLabel::Dirichlet);
    mesh.validate();
    return mesh;
}

}  // namespace offws

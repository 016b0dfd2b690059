// Bounding volume hierarchies over mesh triangles and over Neumann silhouette
// edges. Closest-point, closest-silhouette and ray queries are the three
// primitives the walkers need; all of them are exact (no approximation),
// matched against exhaustive scans in the tests.

#pragma once

#include "mesh.h"

#include <algorithm>
#include <map>
#include <numeric>

namespace offws {

enum class LabelFilter : uint8_t { Any, DirichletOnly, NeumannOnly };

inline bool labelPasses(BoundaryLabel label, LabelFilter filter) {
    switch (filter) {
        case LabelFilter::Any: return true;
        case LabelFilter::DirichletOnly: return label == BoundaryLabel::Dirichlet;
        case LabelFilter::NeumannOnly: return label == BoundaryLabel::Neumann;
    }
    return true;
}

namespace detail {

struct BvhNode {
    Aabb<3> box;
    int left = -1;   // internal: child index; leaf: first primitive
    int count = 0;   // leaf primitive count, 0 for internal nodes
    int right = -1;
};

// Midpoint split on the longest axis with a median fallback.
template <typename GetBox, typename GetCenter>
struct BvhBuilder {
    std::vector<BvhNode> nodes;
    std::vector<int> order;  // primitive ids in leaf order

    void build(int n, const GetBox& getBox, const GetCenter& getCenter, int leafSize) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        nodes.clear();
        if (n > 0) buildRange(0, n, getBox, getCenter, leafSize);
    }

    int buildRange(int begin, int end, const GetBox& getBox, const GetCenter& getCenter,
                   int leafSize) {
        int idx = int(nodes.size());
        nodes.emplace_back();
        Aabb<3> box;
        for (int i = begin; i < end; ++i) box.expand(getBox(order[i]));
        nodes[idx].box = box;

        if (end - begin <= leafSize) {
            nodes[idx].left = begin;
            nodes[idx].count = end - begin;
            return idx;
        }

        Aabb<3> cbox;
        for (int i = begin; i < end; ++i) cbox.expand(getCenter(order[i]));
        int axis = 0;
        Vec3 ext = cbox.extent();
        if (ext[1] > ext[axis]) axis = 1;
        if (ext[2] > ext[axis]) axis = 2;

        double pivot = cbox.center()[axis];
        auto mid = std::partition(order.begin() + begin, order.begin() + end,
                                  [&](int id) { return getCenter(id)[axis] < pivot; });
        int m = int(mid - order.begin());
        if (m == begin || m == end) {
            m = (begin + end) / 2;
            std::nth_element(order.begin() + begin, order.begin() + m, order.begin() + end,
                             [&](int a, int b) { return getCenter(a)[axis] < getCenter(b)[axis]; });
        }

        int left = buildRange(begin, m, getBox, getCenter, leafSize);
        int right = buildRange(m, end, getBox, getCenter, leafSize);
        nodes[idx].left = left;
        nodes[idx].right = right;
        return idx;
    }
};

}  // namespace detail

class TriangleBvh {
  public:
    TriangleBvh() = default;

    explicit TriangleBvh(const BoundaryMesh& mesh) : mesh_(&mesh) {
        auto getBox = [&](int t) {
            Aabb<3> b;
            for (int k = 0; k < 3; ++k) b.expand(mesh.corner(t, k));
            return b;
        };
        auto getCenter = [&](int t) { return mesh.centroid(t); };
        detail::BvhBuilder<decltype(getBox), decltype(getCenter)> builder;
        builder.build(mesh.triangleCount(), getBox, getCenter, /*leafSize=*/4);
        nodes_ = std::move(builder.nodes);
        order_ = std::move(builder.order);
    }

    ClosestPointResult<3> closestPoint(const Vec3& p, LabelFilter filter = LabelFilter::Any) const {
        ClosestPointResult<3> best;
        best.distance = kInf;
        int bestTri = -1;
        if (!nodes_.empty()) closestRecurse(0, p, filter, best, bestTri);
        if (bestTri >= 0) {
            best.label = mesh_->labels[bestTri];
            best.normal = mesh_->faceNormal(bestTri);
        }
        return best;
    }

    std::optional<RayHit<3>> firstHit(const Vec3& o, const Vec3& d, double tMax,
                                      LabelFilter filter = LabelFilter::Any) const {
        RayHit<3> hit;
        hit.t = tMax;
        bool found = false;
        if (!nodes_.empty()) {
            Vec3 invDir(1.0 / d[0], 1.0 / d[1], 1.0 / d[2]);
            rayRecurse(0, o, d, invDir, filter, hit, found);
        }
        if (!found) return std::nullopt;
        hit.point = o + hit.t * d;
        hit.normal = mesh_->faceNormal(hit.primitive);
        hit.label = mesh_->labels[hit.primitive];
        return hit;
    }

    // Number of ray crossings with t > 0; odd count means the origin is inside
    // a watertight, outward-wound mesh.
    int countHits(const Vec3& o, const Vec3& d) const {
        int count = 0;
        if (nodes_.empty()) return 0;
        Vec3 invDir(1.0 / d[0], 1.0 / d[1], 1.0 / d[2]);
        countRecurse(0, o, d, invDir, count);
        return count;
    }

  private:
    void closestRecurse(int node, const Vec3& p, LabelFilter filter, ClosestPointResult<3>& best,
                        int& bestTri) const {
        const auto& nd = nodes_[node];
        if (nd.box.sqDist(p) >= best.distance * best.distance) return;
        if (nd.count > 0) {
            for (int i = nd.left; i < nd.left + nd.count; ++i) {
                int t = order_[i];
                if (!labelPasses(mesh_->labels[t], filter)) continue;
                Vec3 q = closestPointOnTriangle(p, mesh_->corner(t, 0), mesh_->corner(t, 1),
                                                mesh_->corner(t, 2));
                double dist = (p - q).norm();
                if (dist < best.distance) {
                    best.distance = dist;
                    best.point = q;
                    bestTri = t;
                }
            }
            return;
        }
        double dl = nodes_[nd.left].box.sqDist(p);
        double dr = nodes_[nd.right].box.sqDist(p);
        if (dl < dr) {
            closestRecurse(nd.left, p, filter, best, bestTri);
            closestRecurse(nd.right, p, filter, best, bestTri);
        } else {
            closestRecurse(nd.right, p, filter, best, bestTri);
            closestRecurse(nd.left, p, filter, best, bestTri);
        }
    }

    void rayRecurse(int node, const Vec3& o, const Vec3& d, const Vec3& invDir, LabelFilter filter,
                    RayHit<3>& hit, bool& found) const {
        const auto& nd = nodes_[node];
        if (!nd.box.hitByRay(o, invDir, hit.t)) return;
        if (nd.count > 0) {
            for (int i = nd.left; i < nd.left + nd.count; ++i) {
                int t = order_[i];
                if (!labelPasses(mesh_->labels[t], filter)) continue;
                auto s = rayTriangle(o, d, mesh_->corner(t, 0), mesh_->corner(t, 1),
                                     mesh_->corner(t, 2), hit.t);
                if (s && *s < hit.t) {
                    hit.t = *s;
                    hit.primitive = t;
                    found = true;
                }
            }
            return;
        }
        rayRecurse(nd.left, o, d, invDir, filter, hit, found);
        rayRecurse(nd.right, o, d, invDir, filter, hit, found);
    }

    void countRecurse(int node, const Vec3& o, const Vec3& d, const Vec3& invDir,
                      int& count) const {
        const auto& nd = nodes_[node];
        if (!nd.box.hitByRay(o, invDir, kInf)) return;
        if (nd.count > 0) {
            for (int i = nd.left; i < nd.left + nd.count; ++i) {
                int t = order_[i];
                if (rayTriangle(o, d, mesh_->corner(t, 0), mesh_->corner(t, 1),
                                mesh_->corner(t, 2), kInf))
                    ++count;
            }
            return;
        }
        countRecurse(nd.left, o, d, invDir, count);
        countRecurse(nd.right, o, d, invDir, count);
    }

    const BoundaryMesh* mesh_ = nullptr;
    std::vector<detail::BvhNode> nodes_;
    std::vector<int> order_;
};

// An edge of the Neumann part is a silhouette for query point p when the two
// adjacent triangle planes place p on opposite sides; rim edges (only one
// Neumann face) always count.
struct SilhouetteEdge {
    Vec3 a, b;
    Vec3 n0, n1;
    bool rim = false;
};

inline bool isSilhouetteEdge(const SilhouetteEdge& e, const Vec3& p) {
    if (e.rim) return true;
    double s0 = e.n0.dot(p - e.a);
    double s1 = e.n1.dot(p - e.a);
    return s0 * s1 < 0.0;
}

inline double pointSegmentDistance(const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 ab = b - a;
    double t = ab.squaredNorm() > 0 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

inline std::vector<SilhouetteEdge> collectNeumannEdges(const BoundaryMesh& mesh) {
    struct EdgeInfo {
        int faces[2] = {-1, -1};
    };
    auto key = [](int a, int b) { return std::pair<int, int>(std::min(a, b), std::max(a, b)); };
    std::vector<std::pair<std::pair<int, int>, EdgeInfo>> edgeList;
    std::map<std::pair<int, int>, int> index;
    for (int t = 0; t < mesh.triangleCount(); ++t) {
        if (mesh.labels[t] != BoundaryLabel::Neumann) continue;
        for (int k = 0; k < 3; ++k) {
            auto e = key(mesh.triangles[t][k], mesh.triangles[t][(k + 1) % 3]);
            auto it = index.find(e);
            if (it == index.end()) {
                index[e] = int(edgeList.size());
                edgeList.push_back({e, {}});
                edgeList.back().second.faces[0] = t;
            } else {
                edgeList[it->second].second.faces[1] = t;
            }
        }
    }
    std::vector<SilhouetteEdge> edges;
    edges.reserve(edgeList.size());
    for (const auto& [e, info] : edgeList) {
        SilhouetteEdge se;
        se.a = mesh.vertices[e.first];
        se.b = mesh.vertices[e.second];
        se.n0 = mesh.faceNormal(info.faces[0]);
        if (info.faces[1] >= 0) {
            se.n1 = mesh.faceNormal(info.faces[1]);
        } else {
            se.rim = true;
            se.n1 = se.n0;
        }
        edges.push_back(se);
    }
    return edges;
}

class SilhouetteBvh {
  public:
    SilhouetteBvh() = default;

    explicit SilhouetteBvh(std::vector<SilhouetteEdge> edges) : edges_(std::move(edges)) {
        auto getBox = [&](int i) {
            Aabb<3> b;
            b.expand(edges_[i].a);
            b.expand(edges_[i].b);
            return b;
        };
        auto getCenter = [&](int i) { return Vec3(0.5 * (edges_[i].a + edges_[i].b)); };
        detail::BvhBuilder<decltype(getBox), decltype(getCenter)> builder;
        builder.build(int(edges_.size()), getBox, getCenter, /*leafSize=*/4);
        nodes_ = std::move(builder.nodes);
        order_ = std::move(builder.order);
    }

    bool empty() const { return edges_.empty(); }

    // Distance to the closest silhouette edge, capped at maxDist.
    double distance(const Vec3& p, double maxDist) const {
        double best = maxDist;
        if (!nodes_.empty()) recurse(0, p, best);
        return best;
    }

    const std::vector<SilhouetteEdge>& edges() const { return edges_; }

  private:
    void recurse(int node, const Vec3& p, double& best) const {
        const auto& nd = nodes_[node];
        if (nd.box.sqDist(p) >= best * best) return;
        if (nd.count > 0) {
            for (int i = nd.left; i < nd.left + nd.count; ++i) {
                const auto& e = edges_[order_[i]];
                if (!isSilhouetteEdge(e, p)) continue;
                best = std::min(best, pointSegmentDistance(p, e.a, e.b));
            }
            return;
        }
        double dl = nodes_[nd.left].box.sqDist(p);
        double dr = nodes_[nd.right].box.sqDist(p);
        if (dl < dr) {
            recurse(nd.left, p, best);
            recurse(nd.right, p, best);
        } else {
            recurse(nd.right, p, best);
            recurse(nd.left, p, best);
        }
    }

    std::vector<SilhouetteEdge> edges_;
    std::vector<detail::BvhNode> nodes_;
    std::vector<int> order_;
};

}  // namespace offws

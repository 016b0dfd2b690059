// Domain geometry backends. All scene types expose the same query surface:
//
//   distanceToBoundary(p)      largest boundary-avoiding ball radius r_p
//   distanceToDirichlet(p)     same restricted to the Dirichlet part (+inf if none)
//   closestPoint(p)            nearest boundary point, label, outward normal
//   closestDirichletPoint(p)   nearest point on the Dirichlet part
//   contains(p)                strict interior test
//   hasNeumann()               whether a Neumann part exists
//   silhouetteDistance(p, cap) distance to the nearest Neumann silhouette
//   firstNeumannHit(p, v, tMax) first ray hit against the Neumann part
//   starRadius(p, rMin, rMax)  radius of the star-shaped walk region
//   bounds()                   axis-aligned bounding box
//
// Queries are read-only after construction and safe to call concurrently.

#pragma once

#include "bvh.h"

#include <variant>

namespace offws {

namespace detail {

template <typename SceneT, int DIM>
double starRadiusImpl(const SceneT& scene, const Vec<DIM>& p, double rMin, double rMax) {
    double r = std::min(scene.distanceToDirichlet(p), rMax);
    if (scene.hasNeumann()) r = std::min(r, scene.silhouetteDistance(p, rMax));
    return std::max(r, rMin);
}

}  // namespace detail

// Ball domain with an optional half-space Neumann cap (3D only; the 2D ball
// is all-Dirichlet, which is all the 2D benchmarks need).
template <int DIM>
class BallScene {
  public:
    static constexpr int Dim = DIM;

    BallScene(const Vec<DIM>& center, double radius, LabelRule rule = LabelRule::dirichlet())
        : center_(center), radius_(radius), rule_(rule) {
        if (radius <= 0) throw std::invalid_argument("BallScene: radius must be positive");
        if constexpr (DIM == 2) {
            if (!rule.allDirichlet)
                throw std::invalid_argument("BallScene<2>: only all-Dirichlet is supported");
        }
    }

    const Vec<DIM>& center() const { return center_; }
    double radius() const { return radius_; }

    bool contains(const Vec<DIM>& p) const { return (p - center_).norm() < radius_; }
    bool hasNeumann() const { return !rule_.allDirichlet; }

    double distanceToBoundary(const Vec<DIM>& p) const { return radius_ - (p - center_).norm(); }

    ClosestPointResult<DIM> closestPoint(const Vec<DIM>& p) const {
        ClosestPointResult<DIM> out;
        Vec<DIM> d = p - center_;
        double len = d.norm();
        Vec<DIM> dir = len > 0 ? Vec<DIM>(d / len) : unitX();
        out.point = center_ + radius_ * dir;
        out.distance = std::abs(radius_ - len);
        out.normal = dir;
        if constexpr (DIM == 3)
            out.label = rule_(out.point);
        return out;
    }

    double distanceToDirichlet(const Vec<DIM>& p) const {
        if constexpr (DIM == 2) {
            return distanceToBoundary(p);
        } else {
            if (rule_.allDirichlet) return distanceToBoundary(p);
            return (p - closestDirichletPoint(p).point).norm();
        }
    }

    ClosestPointResult<DIM> closestDirichletPoint(const Vec<DIM>& p) const {
        if (rule_.allDirichlet) return closestPoint(p);
        if constexpr (DIM == 3) {
            // Dirichlet part is the spherical cap q.dot(axis) <= threshold.
            // Work in cylindrical coordinates around the axis.
            const Vec3& ax = rule_.axis;
            double tau = rule_.threshold - center_.dot(ax);  // threshold in local frame
            if (tau <= -radius_)
                return {Vec3::Zero(), kInf, BoundaryLabel::Dirichlet, Vec3::Zero()};

            Vec3 d = p - center_;
            double zeta = d.dot(ax);
            Vec3 radial = d - zeta * ax;
            double rho = radial.norm();

            ClosestPointResult<3> out;
            out.label = BoundaryLabel::Dirichlet;

            double len = d.norm();
            bool radialInCap = len > 0 ? (radius_ * zeta / len) <= tau : (0.0 <= tau);
            if (radialInCap && len > 0) {
                out.point = center_ + (radius_ / len) * d;
                out.distance = std::abs(radius_ - len);
                out.normal = d / len;
                return out;
            }

            // closest point on the rim circle at height tau
            double tauC = std::clamp(tau, -radius_, radius_);
            double rimRho = std::sqrt(std::max(0.0, radius_ * radius_ - tauC * tauC));
            Vec3 rdir = rho > 0 ? Vec3(radial / rho) : orthogonalTo(ax);
            out.point = center_ + tauC * ax + rimRho * rdir;
            out.distance = (p - out.point).norm();
            out.normal = (out.point - center_).normalized();
            return out;
        } else {
            return closestPoint(p);
        }
    }

    // The ball is convex, so no point of the smooth Neumann part is a
    // silhouette seen from inside; only the Dirichlet/Neumann rim counts.
    double silhouetteDistance(const Vec<DIM>& p, double maxDist) const {
        if constexpr (DIM == 3) {
            if (rule_.allDirichlet) return maxDist;
            const Vec3& ax = rule_.axis;
            double tau = rule_.threshold - center_.dot(ax);
            if (tau <= -radius_ || tau >= radius_) return maxDist;
            Vec3 d = p - center_;
            double zeta = d.dot(ax);
            Vec3 radial = d - zeta * ax;
            double rho = radial.norm();
            double rimRho = std::sqrt(std::max(0.0, radius_ * radius_ - tau * tau));
            double dist = std::hypot(rho - rimRho, zeta - tau);
            return std::min(dist, maxDist);
        } else {
            return maxDist;
        }
    }

    std::optional<RayHit<DIM>> firstNeumannHit(const Vec<DIM>& p, const Vec<DIM>& dir,
                                               double tMax) const {
        if constexpr (DIM == 3) {
            if (rule_.allDirichlet) return std::nullopt;
            // From inside (or on) the sphere there is exactly one forward exit.
            Vec3 oc = p - center_;
            double b = oc.dot(dir);
            double c = oc.squaredNorm() - radius_ * radius_;
            double disc = b * b - c;
            if (disc <= 0) return std::nullopt;
            double t = -b + std::sqrt(disc);
            if (t <= 1e-12 || t > tMax) return std::nullopt;
            RayHit<3> hit;
            hit.t = t;
            hit.point = p + t * dir;
            if (rule_(hit.point) != BoundaryLabel::Neumann) return std::nullopt;
            hit.normal = (hit.point - center_).normalized();
            hit.label = BoundaryLabel::Neumann;
            return hit;
        } else {
            return std::nullopt;
        }
    }

    double starRadius(const Vec<DIM>& p, double rMin, double rMax) const {
        return detail::starRadiusImpl(*this, p, rMin, rMax);
    }

    Aabb<DIM> bounds() const {
        Aabb<DIM> box;
        box.expand(Vec<DIM>(center_ - Vec<DIM>::Constant(radius_)));
        box.expand(Vec<DIM>(center_ + Vec<DIM>::Constant(radius_)));
        return box;
    }

  private:
    static Vec<DIM> unitX() {
        Vec<DIM> v = Vec<DIM>::Zero();
        v[0] = 1.0;
        return v;
    }
    static Vec3 orthogonalTo(const Vec3& a) {
        Vec3 h = std::abs(a[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
        return (h - h.dot(a) * a).normalized();
    }

    Vec<DIM> center_;
    double radius_;
    LabelRule rule_;
};

// Axis-aligned box domain, all-Dirichlet.
template <int DIM>
class BoxScene {
  public:
    static constexpr int Dim = DIM;

    BoxScene(const Vec<DIM>& lo, const Vec<DIM>& hi) : lo_(lo), hi_(hi) {
        if (!((hi - lo).array() > 0).all())
            throw std::invalid_argument("BoxScene: min must be componentwise below max");
    }

    bool contains(const Vec<DIM>& p) const {
        return (p.array() > lo_.array()).all() && (p.array() < hi_.array()).all();
    }
    bool hasNeumann() const { return false; }

    double distanceToBoundary(const Vec<DIM>& p) const {
        double d = kInf;
        for (int i = 0; i < DIM; ++i) d = std::min({d, p[i] - lo_[i], hi_[i] - p[i]});
        return d;
    }

    double distanceToDirichlet(const Vec<DIM>& p) const {
        return closestPoint(p).distance;
    }

    ClosestPointResult<DIM> closestPoint(const Vec<DIM>& p) const {
        ClosestPointResult<DIM> out;
        out.label = BoundaryLabel::Dirichlet;
        if (contains(p)) {
            int axis = 0;
            double best = kInf;
            double sign = 1.0;
            for (int i = 0; i < DIM; ++i) {
                if (p[i] - lo_[i] < best) { best = p[i] - lo_[i]; axis = i; sign = -1.0; }
                if (hi_[i] - p[i] < best) { best = hi_[i] - p[i]; axis = i; sign = 1.0; }
            }
            out.point = p;
            out.point[axis] = sign > 0 ? hi_[axis] : lo_[axis];
            out.distance = best;
            out.normal = Vec<DIM>::Zero();
            out.normal[axis] = sign;
        } else {
            Vec<DIM> q = p.cwiseMax(lo_).cwiseMin(hi_);
            out.point = q;
            out.distance = (p - q).norm();
            out.normal = out.distance > 0 ? Vec<DIM>((p - q) / out.distance) : Vec<DIM>::Zero();
        }
        return out;
    }

    ClosestPointResult<DIM> closestDirichletPoint(const Vec<DIM>& p) const {
        return closestPoint(p);
    }

    double silhouetteDistance(const Vec<DIM>&, double maxDist) const { return maxDist; }

    std::optional<RayHit<DIM>> firstNeumannHit(const Vec<DIM>&, const Vec<DIM>&, double) const {
        return std::nullopt;
    }

    double starRadius(const Vec<DIM>& p, double rMin, double rMax) const {
        return detail::starRadiusImpl(*this, p, rMin, rMax);
    }

    Aabb<DIM> bounds() const {
        Aabb<DIM> box;
        box.expand(lo_);
        box.expand(hi_);
        return box;
    }

  private:
    Vec<DIM> lo_, hi_;
};

// Triangle mesh domain with BVH-accelerated queries.
class MeshScene {
  public:
    static constexpr int Dim = 3;

    explicit MeshScene(BoundaryMesh mesh) : mesh_(std::move(mesh)) {
        mesh_.validate();
        bvh_ = TriangleBvh(mesh_);
        silhouettes_ = SilhouetteBvh(collectNeumannEdges(mesh_));
        neumann_ = false;
        for (auto l : mesh_.labels)
            if (l == BoundaryLabel::Neumann) neumann_ = true;
    }

    const BoundaryMesh& mesh() const { return mesh_; }
    const TriangleBvh& bvh() const { return bvh_; }

    bool hasNeumann() const { return neumann_; }

    bool contains(const Vec3& p) const {
        // parity of crossings along a fixed direction; watertight input assumed
        return (bvh_.countHits(p, Vec3(0.577350269189626, 0.577350269189626,
                                       0.577350269189626)) % 2) == 1;
    }

    double distanceToBoundary(const Vec3& p) const { return bvh_.closestPoint(p).distance; }

    double distanceToDirichlet(const Vec3& p) const {
        return bvh_.closestPoint(p, LabelFilter::DirichletOnly).distance;
    }

    ClosestPointResult<3> closestPoint(const Vec3& p) const { return bvh_.closestPoint(p); }

    ClosestPointResult<3> closestDirichletPoint(const Vec3& p) const {
        return bvh_.closestPoint(p, LabelFilter::DirichletOnly);
    }

    double silhouetteDistance(const Vec3& p, double maxDist) const {
        if (silhouettes_.empty()) return maxDist;
        return silhouettes_.distance(p, maxDist);
    }

    std::optional<RayHit<3>> firstNeumannHit(const Vec3& p, const Vec3& dir, double tMax) const {
        if (!neumann_) return std::nullopt;
        return bvh_.firstHit(p, dir, tMax, LabelFilter::NeumannOnly);
    }

    double starRadius(const Vec3& p, double rMin, double rMax) const {
        return detail::starRadiusImpl(*this, p, rMin, rMax);
    }

    Aabb<3> bounds() const { return mesh_.bounds(); }

  private:
    BoundaryMesh mesh_;
    TriangleBvh bvh_;
    SilhouetteBvh silhouettes_;
    bool neumann_ = false;
};

// Validated spec-level queries; the walkers call the raw scene methods and
// keep the interior invariant themselves.
template <typename SceneT>
double distanceToBoundary(const SceneT& scene, const Vec<SceneT::Dim>& p) {
    if (!scene.contains(p))
        throw std::domain_error("distanceToBoundary: point not strictly inside the domain");
    return scene.distanceToBoundary(p);
}

template <typename SceneT>
double distanceToDirichlet(const SceneT& scene, const Vec<SceneT::Dim>& p) {
    if (!scene.contains(p))
        throw std::domain_error("distanceToDirichlet: point not strictly inside the domain");
    return scene.distanceToDirichlet(p);
}

using SceneVariant = std::variant<BallScene<3>, BoxScene<3>, MeshScene>;

}  // namespace offws

// Basic geometric types shared across the library: vectors, boundary labels,
// closest-point results, axis-aligned boxes, and the ray/ball exit query.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace offws {

template <int DIM>
using Vec = Eigen::Matrix<double, DIM, 1>;

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

enum class BoundaryLabel : uint8_t { Dirichlet, Neumann };

template <int DIM>
struct ClosestPointResult {
    Vec<DIM> point;
    double distance = kInf;
    BoundaryLabel label = BoundaryLabel::Dirichlet;
    Vec<DIM> normal = Vec<DIM>::Zero();  // outward unit normal at `point`
};

template <int DIM>
struct RayHit {
    double t = kInf;
    Vec<DIM> point;
    Vec<DIM> normal;  // outward unit normal at the hit
    BoundaryLabel label = BoundaryLabel::Neumann;
    int primitive = -1;
};

template <int DIM>
struct Aabb {
    Vec<DIM> lo = Vec<DIM>::Constant(kInf);
    Vec<DIM> hi = Vec<DIM>::Constant(-kInf);

    void expand(const Vec<DIM>& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void expand(const Aabb& b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    Vec<DIM> center() const { return 0.5 * (lo + hi); }
    Vec<DIM> extent() const { return hi - lo; }
    double diagonal() const { return (hi - lo).norm(); }

    // squared distance from p to the box (0 inside)
    double sqDist(const Vec<DIM>& p) const {
        double d2 = 0.0;
        for (int i = 0; i < DIM; ++i) {
            double v = p[i];
            if (v < lo[i]) d2 += (lo[i] - v) * (lo[i] - v);
            if (v > hi[i]) d2 += (v - hi[i]) * (v - hi[i]);
        }
        return d2;
    }

    // slab test; returns true if the ray [0, tMax] overlaps the box
    bool hitByRay(const Vec<DIM>& o, const Vec<DIM>& invDir, double tMax) const {
        double t0 = 0.0, t1 = tMax;
        for (int i = 0; i < DIM; ++i) {
            double a = (lo[i] - o[i]) * invDir[i];
            double b = (hi[i] - o[i]) * invDir[i];
            if (a > b) std::swap(a, b);
            t0 = std::max(t0, a);
            t1 = std::min(t1, b);
            if (t0 > t1) return false;
        }
        return true;
    }
};

// Smallest t > 0 with |origin + t*dir - center| = radius. The origin must be
// strictly inside the ball and dir must be unit length.
template <int DIM>
inline double rayBallExit(const Vec<DIM>& origin, const Vec<DIM>& dir,
                          const Vec<DIM>& center, double radius) {
    Vec<DIM> oc = origin - center;
    double b = oc.dot(dir);
    double c = oc.squaredNorm() - radius * radius;
    if (c >= 0.0)
        throw std::domain_error("rayBallExit: origin not strictly inside the ball");
    double disc = b * b - c;  // c < 0 so disc > 0
    return -b + std::sqrt(disc);
}

}  // namespace offws

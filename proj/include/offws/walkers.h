// Pointwise recursive estimators: the classical walk on spheres, the mixed
// Dirichlet/Neumann walk through star-shaped regions, and the single-sample
// gradient estimator.
//
// All walkers are stateless given (scene, bvp, cfg) and draw from a
// caller-owned RNG, so millions of walks can run concurrently.

#pragma once

#include "kernels.h"
#include "problem.h"

namespace offws {

struct WalkConfig {
    double epsilon = 1e-3;   // shell width for Dirichlet termination
    int maxSteps = 1000;
    int sourceSamples = 1;   // draws of the source term per step (M)
    double sigma = 0.0;
};

struct WalkSample {
    double value = 0.0;
    int steps = 0;
    bool absorbed = true;  // false when the walk hit the step limit
};

// One unbiased sample of u(p) for an all-Dirichlet problem. Each step adds the
// ball source contribution, applies the screened survival weight, and jumps
// uniformly to the bounding sphere; walks ending in the epsilon shell return
// the projected Dirichlet value.
template <typename SceneT>
WalkSample wosEstimate(const SceneT& scene, const Bvp<SceneT::Dim>& bvp,
                       const Vec<SceneT::Dim>& p, const WalkConfig& cfg, Rng& rng) {
    constexpr int DIM = SceneT::Dim;
    KernelParams kp{cfg.sigma};

    WalkSample out;
    Vec<DIM> x = p;
    double throughput = 1.0;
    double accum = 0.0;

    for (int step = 0; step < cfg.maxSteps; ++step) {
        auto cp = scene.closestPoint(x);
        double r = cp.distance;
        if (r < cfg.epsilon) {
            out.value = accum + throughput * bvp.dirichlet(cp.point);
            out.steps = step;
            return out;
        }

        BallSpec<DIM> ball{x, r};
        if (bvp.hasSource()) {
            double term = 0.0;
            for (int j = 0; j < cfg.sourceSamples; ++j) {
                auto w = sampleSourceCentered<DIM>(rng, ball, kp);
                term += bvp.source(w.point) * greenBall<DIM>(x, w.point, ball, kp) / w.pdf;
            }
            accum += throughput * term / double(cfg.sourceSamples);
        }
        if (cfg.sigma > 0.0) throughput *= screenedAbsorption(cfg.sigma, r);

        x = x + r * rng.template unitVector<DIM>();
    }

    auto cp = scene.closestPoint(x);
    out.value = accum + throughput * bvp.dirichlet(cp.point);
    out.steps = cfg.maxSteps;
    out.absorbed = false;
    return out;
}

// One sample of u(p) under mixed Dirichlet/Neumann conditions: the step region
// is the inscribed star-shaped region bounded by the Dirichlet distance and
// the nearest Neumann silhouette. A uniform direction (hemisphere when the
// walk sits on the reflecting boundary) either exits through the sphere or
// hits the Neumann part, which also carries the prescribed flux term.
template <typename SceneT>
WalkSample wostEstimate(const SceneT& scene, const Bvp<SceneT::Dim>& bvp,
                        const Vec<SceneT::Dim>& p, const WalkConfig& cfg, Rng& rng) {
    static_assert(SceneT::Dim == 3, "mixed-boundary walks are implemented for 3D scenes");
    constexpr int DIM = 3;
    KernelParams kp{cfg.sigma};

    WalkSample out;
    Vec3 x = p;
    Vec3 boundaryNormal = Vec3::Zero();
    bool onBoundary = false;
    double throughput = 1.0;
    double accum = 0.0;

    for (int step = 0; step < cfg.maxSteps; ++step) {
        auto cpD = scene.closestDirichletPoint(x);
        if (cpD.distance < cfg.epsilon) {
            out.value = accum + throughput * bvp.dirichlet(cpD.point);
            out.steps = step;
            return out;
        }

        double r = std::min(cpD.distance, scene.silhouetteDistance(x, cpD.distance));
        r = std::max(r, cfg.epsilon);
        BallSpec<DIM> ball{x, r};

        if (bvp.hasSource()) {
            // centered ball law restricted to the star region by visibility
            double term = 0.0;
            for (int j = 0; j < cfg.sourceSamples; ++j) {
                auto w = sampleSourceCentered<DIM>(rng, ball, kp);
                Vec3 d = w.point - x;
                double len = d.norm();
                if (len <= 0.0) continue;
                Vec3 dir = d / len;
                if (onBoundary && dir.dot(boundaryNormal) > 0.0) continue;
                auto block = scene.firstNeumannHit(x, dir, len);
                if (block) continue;
                term += bvp.source(w.point) * greenBall<DIM>(x, w.point, ball, kp) / w.pdf;
            }
            accum += throughput * (onBoundary ? 2.0 : 1.0) * term / double(cfg.sourceSamples);
        }

        Vec3 v = rng.unitVector<3>();
        if (onBoundary && v.dot(boundaryNormal) > 0.0) v -= 2.0 * v.dot(boundaryNormal) * boundaryNormal;

        auto hit = scene.firstNeumannHit(x, v, r);
        if (hit) {
            if (bvp.hasNeumannData()) {
                double cosine = std::abs(v.dot(hit->normal));
                if (cosine > 1e-12) {
                    // h-term weight: invCp / pdfArea = 4 pi t^2 / cosine for
                    // interior and on-boundary steps alike
                    double g = greenBall<DIM>(x, hit->point, ball, kp);
                    accum += throughput * 4.0 * kPi * hit->t * hit->t * g *
                             bvp.neumann(hit->point, hit->normal) / cosine;
                }
            }
            if (cfg.sigma > 0.0) throughput *= screenedNeumannHitWeight(cfg.sigma, r, hit->t);
            x = hit->point;
            boundaryNormal = hit->normal;
            onBoundary = true;
        } else {
            if (cfg.sigma > 0.0) throughput *= screenedAbsorption(cfg.sigma, r);
            x = x + r * v;
            onBoundary = false;
        }
    }

    auto cpD = scene.closestDirichletPoint(x);
    out.value = accum + throughput * bvp.dirichlet(cpD.point);
    out.steps = cfg.maxSteps;
    out.absorbed = false;
    return out;
}

// Dispatches to the walker matching the scene's boundary conditions.
template <typename SceneT>
WalkSample pointEstimate(const SceneT& scene, const Bvp<SceneT::Dim>& bvp,
                         const Vec<SceneT::Dim>& p, const WalkConfig& cfg, Rng& rng) {
    if constexpr (SceneT::Dim == 3) {
        if (scene.hasNeumann()) return wostEstimate(scene, bvp, p, cfg, rng);
    }
    return wosEstimate(scene, bvp, p, cfg, rng);
}

// Single-sample gradient estimate at p (all-Dirichlet): the boundary term is
// (d / r) ubar(z) nu(z) for z uniform on the bounding sphere, the source term
// uses the analytic kernel gradient. The d/r factor is fixed by requiring the
// estimator to reproduce gradients of linear fields exactly in expectation.
template <typename SceneT>
struct GradientSample {
    Vec<SceneT::Dim> value = Vec<SceneT::Dim>::Zero();
    int steps = 0;
    bool absorbed = true;
};

template <typename SceneT>
GradientSample<SceneT> wosGradientEstimate(const SceneT& scene, const Bvp<SceneT::Dim>& bvp,
                                           const Vec<SceneT::Dim>& p, const WalkConfig& cfg,
                                           Rng& rng) {
    constexpr int DIM = SceneT::Dim;
    KernelParams kp{cfg.sigma};

    double r = scene.distanceToBoundary(p);
    if (r <= 0.0) throw std::domain_error("wosGradientEstimate: p must be inside the domain");
    BallSpec<DIM> ball{p, r};

    GradientSample<SceneT> out;
    Vec<DIM> nu = rng.template unitVector<DIM>();
    Vec<DIM> z = p + r * nu;

    WalkSample walk = wosEstimate(scene, bvp, z, cfg, rng);
    out.value = (double(DIM) / r) * screenedAbsorption(cfg.sigma, r) * walk.value * nu;
    out.steps = walk.steps + 1;
    out.absorbed = walk.absorbed;

    if (bvp.hasSource()) {
        Vec<DIM> term = Vec<DIM>::Zero();
        for (int j = 0; j < cfg.sourceSamples; ++j) {
            auto w = sampleSourceCentered<DIM>(rng, ball, kp);
            term += bvp.source(w.point) * gradGreenBall<DIM>(p, w.point, ball, kp) / w.pdf;
        }
        out.value += term / double(cfg.sourceSamples);
    }
    return out;
}

}  // namespace offws

// Closed-form ball kernels and the samplers the estimators are built from.
//
// Laplace (sigma = 0) kernels are exact. The Green's function uses the mirror
// construction written as a quadratic form that is symmetric in its two
// arguments, vanishes on the ball boundary, and stays stable through the
// centered limit. Screened (sigma > 0, 3D) kernels use the exact centered
// closed forms at the ball center and attenuated Laplace kernels off center:
//
//   G_s(x,z) ~= G_0(x,z) exp(-sqrt(s)|x-z|)
//   P_s(x,z) ~= P_0(x,z) sqrt(s) r / sinh(sqrt(s) r)
//
// The off-centered screened forms are approximations; the resulting estimator
// bias is what the statistical weighting is designed to filter.

#pragma once

#include "geom.h"
#include "rng.h"

#include <cmath>

namespace offws {

struct KernelParams {
    double sigma = 0.0;
};

template <int DIM>
struct BallSpec {
    Vec<DIM> center;
    double radius = 1.0;
};

template <int DIM>
constexpr double sphereArea(double r) {
    if constexpr (DIM == 2)
        return 2.0 * kPi * r;
    else
        return 4.0 * kPi * r * r;
}

template <int DIM>
constexpr double uniformSpherePdf(double r) {
    return 1.0 / sphereArea<DIM>(r);
}

// Probability that a walk absorbed at rate sigma survives one step on a ball
// of radius r; also the total mass of the centered screened Poisson kernel.
inline double screenedAbsorption(double sigma, double r) {
    if (sigma <= 0.0) return 1.0;
    double q = std::sqrt(sigma) * r;
    if (q < 1e-8) return 1.0 - q * q / 6.0;
    return q / std::sinh(q);
}

// Recursion weight for a walk step that terminates on the Neumann part at
// distance t < r, derived from the normal derivative of the centered screened
// Green's function. Equals 1 when sigma = 0.
inline double screenedNeumannHitWeight(double sigma, double r, double t) {
    if (sigma <= 0.0) return 1.0;
    double sq = std::sqrt(sigma);
    return (std::sinh(sq * (r - t)) + sq * t * std::cosh(sq * (r - t))) / std::sinh(sq * r);
}

inline double fundamentalSolution(double s, int dim, double sigma = 0.0) {
    if (s <= 0.0) throw std::domain_error("fundamentalSolution: s must be positive");
    if (dim == 2) {
        if (sigma > 0.0)
            throw std::invalid_argument("fundamentalSolution: screened 2D not supported");
        return -std::log(s) / (2.0 * kPi);
    }
    if (dim != 3) throw std::invalid_argument("fundamentalSolution: dimension must be 2 or 3");
    if (sigma > 0.0) return std::exp(-std::sqrt(sigma) * s) / (4.0 * kPi * s);
    return 1.0 / (4.0 * kPi * s);
}

namespace detail {

template <int DIM>
void checkGreenArgs(const Vec<DIM>& x, const Vec<DIM>& z, const BallSpec<DIM>& ball) {
    double r = ball.radius;
    double tol = 1e-9 * r;
    if ((x - ball.center).norm() >= r)
        throw std::domain_error("green kernel: x must be strictly inside the ball");
    if ((z - ball.center).norm() > r + tol)
        throw std::domain_error("green kernel: z must lie in the closed ball");
    if ((x - z).squaredNorm() == 0.0)
        throw std::domain_error("green kernel: singular at z = x");
}

// Squared distance |x - z|^2 and the mirror term
// J^2 = r^2 - 2 a.b + |a|^2 |b|^2 / r^2  with a = x - c, b = z - c.
// J^2 - |x - z|^2 = (r^2 - |a|^2)(r^2 - |b|^2)/r^2 >= 0, with equality on the
// boundary, so the Laplace Green's function below vanishes there.
template <int DIM>
struct MirrorForm {
    Vec<DIM> a, b;
    double W;   // |x - z|^2
    double J2;  // mirror quadratic form

    MirrorForm(const Vec<DIM>& x, const Vec<DIM>& z, const BallSpec<DIM>& ball) {
        a = x - ball.center;
        b = z - ball.center;
        double r = ball.radius;
        W = (x - z).squaredNorm();
        J2 = r * r - 2.0 * a.dot(b) + a.squaredNorm() * b.squaredNorm() / (r * r);
    }
};

}  // namespace detail

template <int DIM>
double greenBall(const Vec<DIM>& x, const Vec<DIM>& z, const BallSpec<DIM>& ball,
                 const KernelParams& kp = {}) {
    detail::checkGreenArgs(x, z, ball);
    const double r = ball.radius;

    if (kp.sigma > 0.0) {
        if constexpr (DIM == 2)
            throw std::invalid_argument("greenBall: screened 2D not supported");
        double s = (x - ball.center).norm();
        if (s < 1e-9 * r) {
            // exact centered closed form
            double m = (z - ball.center).norm();
            if (m <= 0.0) throw std::domain_error("greenBall: singular at z = x");
            double sq = std::sqrt(kp.sigma);
            return std::sinh(sq * (r - m)) / (4.0 * kPi * m * std::sinh(sq * r));
        }
        KernelParams laplace;
        double g0 = greenBall(x, z, ball, laplace);
        return g0 * std::exp(-std::sqrt(kp.sigma) * (x - z).norm());
    }

    detail::MirrorForm<DIM> f(x, z, ball);
    if constexpr (DIM == 2)
        return std::log(f.J2 / f.W) / (4.0 * kPi);
    else
        return (1.0 / std::sqrt(f.W) - 1.0 / std::sqrt(f.J2)) / (4.0 * kPi);
}

template <int DIM>
Vec<DIM> gradGreenBall(const Vec<DIM>& x, const Vec<DIM>& z, const BallSpec<DIM>& ball,
                       const KernelParams& kp = {}) {
    detail::checkGreenArgs(x, z, ball);
    const double r = ball.radius;
    detail::MirrorForm<DIM> f(x, z, ball);
    Vec<DIM> mirrorDir = f.a * (f.b.squaredNorm() / (r * r)) - f.b;

    Vec<DIM> g0;
    if constexpr (DIM == 2)
        g0 = ((z - x) / f.W + mirrorDir / f.J2) / (2.0 * kPi);
    else
        g0 = ((z - x) / std::pow(f.W, 1.5) + mirrorDir / std::pow(f.J2, 1.5)) / (4.0 * kPi);

    if (kp.sigma <= 0.0) return g0;
    if constexpr (DIM == 2)
        throw std::invalid_argument("gradGreenBall: screened 2D not supported");

    double m = std::sqrt(f.W);
    double sq = std::sqrt(kp.sigma);
    KernelParams laplace;
    double green0 = greenBall(x, z, ball, laplace);
    return std::exp(-sq * m) * Vec<DIM>(g0 - sq * green0 * (x - z) / m);
}

template <int DIM>
double poissonKernelBall(const Vec<DIM>& x, const Vec<DIM>& z, const BallSpec<DIM>& ball,
                         const KernelParams& kp = {}) {
    const double r = ball.radius;
    double s = (x - ball.center).norm();
    if (s >= r) throw std::domain_error("poissonKernelBall: x must be strictly inside");
    double onSphere = (z - ball.center).norm();
    if (std::abs(onSphere - r) > 1e-9 * r)
        throw std::domain_error("poissonKernelBall: z must lie on the sphere");
    if (kp.sigma > 0.0 && DIM == 2)
        throw std::invalid_argument("poissonKernelBall: screened 2D not supported");

    double m = (x - z).norm();
    double p0;
    if constexpr (DIM == 2)
        p0 = (r * r - s * s) / (2.0 * kPi * r * m * m);
    else
        p0 = (r * r - s * s) / (4.0 * kPi * r * m * m * m);
    return p0 * screenedAbsorption(kp.sigma, r);
}

template <int DIM>
Vec<DIM> gradPoissonKernelBall(const Vec<DIM>& x, const Vec<DIM>& z, const BallSpec<DIM>& ball,
                               const KernelParams& kp = {}) {
    const double r = ball.radius;
    double s = (x - ball.center).norm();
    if (s >= r) throw std::domain_error("gradPoissonKernelBall: x must be strictly inside");
    double onSphere = (z - ball.center).norm();
    if (std::abs(onSphere - r) > 1e-9 * r)
        throw std::domain_error("gradPoissonKernelBall: z must lie on the sphere");
    if (kp.sigma > 0.0 && DIM == 2)
        throw std::invalid_argument("gradPoissonKernelBall: screened 2D not supported");

    Vec<DIM> a = x - ball.center;
    Vec<DIM> d = x - z;
    double m = d.norm();
    Vec<DIM> g0;
    if constexpr (DIM == 2)
        g0 = -(2.0 * a / (m * m) + 2.0 * (r * r - s * s) * d / std::pow(m, 4)) / (2.0 * kPi * r);
    else
        g0 = -(2.0 * a / (m * m * m) + 3.0 * (r * r - s * s) * d / std::pow(m, 5)) /
             (4.0 * kPi * r);
    return Vec<DIM>(g0 * screenedAbsorption(kp.sigma, r));
}

template <int DIM>
struct WeightedSample {
    Vec<DIM> point;
    double pdf = 0.0;  // per-area (sphere) or per-volume (ball)
    bool valid = true;
};

template <int DIM>
WeightedSample<DIM> sampleSphereUniform(Rng& rng, const BallSpec<DIM>& ball) {
    WeightedSample<DIM> s;
    s.point = ball.center + ball.radius * rng.template unitVector<DIM>();
    s.pdf = uniformSpherePdf<DIM>(ball.radius);
    return s;
}

namespace detail {

// Invert a CDF on [0, 1] by Newton iteration with a bisection bracket.
template <typename Cdf, typename Pdf>
double invertCdf(double u, const Cdf& cdf, const Pdf& pdf) {
    double lo = 0.0, hi = 1.0, t = 0.5;
    for (int it = 0; it < 128; ++it) {
        double f = cdf(t) - u;
        if (std::abs(f) < 1e-13) return t;
        (f > 0 ? hi : lo) = t;
        double d = pdf(t);
        double next = d > 0 ? t - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    return t;
}

// Normalized radial law of the centered Green's function: the radius fraction
// t = s / r follows CDF 3t^2 - 2t^3 in 3D and t^2 (1 - 2 ln t) in 2D.
template <int DIM>
double sampleGreenRadiusFraction(Rng& rng) {
    double u = std::max(rng.uniform(), 1e-300);
    if constexpr (DIM == 3) {
        return invertCdf(
            u, [](double t) { return t * t * (3.0 - 2.0 * t); },
            [](double t) { return 6.0 * t * (1.0 - t); });
    } else {
        return invertCdf(
            u, [](double t) { return t <= 0 ? 0.0 : t * t * (1.0 - 2.0 * std::log(t)); },
            [](double t) { return t <= 0 ? 0.0 : -4.0 * t * std::log(t); });
    }
}

template <int DIM>
double greenRadialVolumePdf(double s, double r) {
    if constexpr (DIM == 3)
        return 3.0 * (r - s) / (2.0 * kPi * r * r * r * s);
    else
        return 2.0 * std::log(r / s) / (kPi * r * r);
}

}  // namespace detail

// Point in the ball with radial density proportional to the centered Green's
// function mass, direction uniform. Zero-variance for constant sources.
template <int DIM>
WeightedSample<DIM> sampleSourceCentered(Rng& rng, const BallSpec<DIM>& ball,
                                         const KernelParams& = {}) {
    double t = detail::sampleGreenRadiusFraction<DIM>(rng);
    double s = t * ball.radius;
    WeightedSample<DIM> out;
    out.point = ball.center + s * rng.template unitVector<DIM>();
    out.pdf = detail::greenRadialVolumePdf<DIM>(s, ball.radius);
    return out;
}

// Two-stage source sampler for the off-centered estimator: a uniform ray from
// x, with the range drawn from the centered Green radial law on the enlarged
// ball B(x, r + |x - y|). Draws landing outside the target ball are flagged
// invalid and contribute nothing.
template <int DIM>
WeightedSample<DIM> sampleSourceOffcenter(Rng& rng, const Vec<DIM>& x, const BallSpec<DIM>& ball,
                                          const KernelParams& = {}) {
    double off = (x - ball.center).norm();
    if (off >= ball.radius)
        throw std::domain_error("sampleSourceOffcenter: x must be strictly inside the ball");
    double enlarged = ball.radius + off;

    Vec<DIM> dir = rng.template unitVector<DIM>();
    double u = detail::sampleGreenRadiusFraction<DIM>(rng) * enlarged;

    WeightedSample<DIM> out;
    out.point = x + u * dir;
    out.pdf = detail::greenRadialVolumePdf<DIM>(u, enlarged);
    out.valid = u < rayBallExit<DIM>(x, dir, ball.center, ball.radius);
    return out;
}

}  // namespace offws

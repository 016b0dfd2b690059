// Off-centered sample reuse with statistical similarity weighting.
//
// Every evaluation point x keeps one running estimator per neighbor y whose
// maximal ball contains x. Each round, every point runs one expensive walk
// from a fresh point on its own sphere (stage 1); every point then converts
// each cached neighbor record into an off-centered estimate through the
// neighbor ball's Poisson kernel and Green's function, updates the running
// pair statistics, and combines the pair means under the active weighting
// strategy (stage 2). The pairwise similarity score
//
//   w* = (delta^2 + Var(I_xy)) / (delta^2 + Var(I_xy) + Var(I_xx))
//
// accepts a pair when 1 - w* exceeds the threshold gamma, with the self pair
// always accepted, which suppresses outlier records and filters estimators
// biased by approximate kernels.

#pragma once

#include "parallel.h"
#include "stats.h"
#include "walkers.h"

#include <array>
#include <atomic>
#include <optional>
#include <string>
#include <vector>

namespace offws {

enum class Weighting { Vanilla, Uniform, PoissonBound, Statistical };

struct WeightingStrategy {
    Weighting kind = Weighting::Statistical;
    double gamma = 0.05;

    static WeightingStrategy vanilla() { return {Weighting::Vanilla, 0.0}; }
    static WeightingStrategy uniform() { return {Weighting::Uniform, 0.0}; }
    static WeightingStrategy poissonBound() { return {Weighting::PoissonBound, 0.0}; }
    static WeightingStrategy statistical(double gamma) { return {Weighting::Statistical, gamma}; }

    std::string name() const {
        switch (kind) {
            case Weighting::Vanilla: return "vanilla";
            case Weighting::Uniform: return "uniform";
            case Weighting::PoissonBound: return "poisson-bound";
            case Weighting::Statistical: return "statistical";
        }
        return "unknown";
    }
};

struct SolveConfig {
    double epsilon = 1e-3;   // Dirichlet shell width (absolute)
    int maxSteps = 1000;
    int rounds = 64;         // samples per point S
    int sourceSamples = 1;
    double sigma = 0.0;
    double alpha = 0.5;      // neighbor radius fraction
    double beta = 10.0;      // neighbor distance / index cap
    double gamma = 0.05;     // similarity threshold for statistical weighting
    uint64_t seed = 1;
    int workers = 1;

    // fault-injection hook: scale one stage-1 record (tests, artifact studies)
    int faultPoint = -1;
    int faultRound = -1;
    double faultScale = 1.0;

    WalkConfig walkConfig() const { return {epsilon, maxSteps, sourceSamples, sigma}; }
};

template <int DIM>
struct SampleRecord {
    int owner = -1;
    Vec<DIM> point;       // z on the owner's sphere
    double value = 0.0;   // recursively estimated ubar(z)
    int steps = 0;
    bool absorbed = true;
};

template <int DIM>
struct EvaluationPoint {
    Vec<DIM> position;
    double radius = 0.0;         // inscribed-ball radius over the full boundary
    std::vector<int> neighbors;  // point ids; slot 0 is the point itself
};

// --------------------------------------------------------------------------
// neighbor selection

// H_x = { y : |x - y| < min(alpha r_y, beta) }, self always included first.
template <int DIM>
std::vector<std::vector<int>> selectNeighbors(const std::vector<Vec<DIM>>& positions,
                                              const std::vector<double>& radii, double alpha,
                                              double beta) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("selectNeighbors: alpha in (0,1)");
    if (!(beta > 0.0)) throw std::invalid_argument("selectNeighbors: beta > 0");
    int n = int(positions.size());
    std::vector<std::vector<int>> out(n);
    for (int i = 0; i < n; ++i) {
        out[i].push_back(i);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double d = (positions[i] - positions[j]).norm();
            if (d < std::min(alpha * radii[j], beta)) out[i].push_back(j);
        }
    }
    return out;
}

// Point ids arranged on a regular lattice; nz = 1 describes a 2D lattice.
struct LatticeMap {
    int nx = 0, ny = 0, nz = 1;
    std::vector<int> ids;  // x-fastest, -1 where no evaluation point exists

    int at(int i, int j, int k = 0) const { return ids[(size_t(k) * ny + j) * nx + i]; }
};

// Same predicate as selectNeighbors with the distance cap replaced by a
// Chebyshev index window of half-width betaIndex.
template <int DIM>
std::vector<std::vector<int>> selectNeighborsGrid(const LatticeMap& lattice,
                                                  const std::vector<Vec<DIM>>& positions,
                                                  const std::vector<double>& radii, double alpha,
                                                  int betaIndex) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("selectNeighborsGrid: alpha in (0,1)");
    if (betaIndex < 1) throw std::invalid_argument("selectNeighborsGrid: beta >= 1");

    std::vector<std::vector<int>> out(positions.size());
    for (int k = 0; k < lattice.nz; ++k)
        for (int j = 0; j < lattice.ny; ++j)
            for (int i = 0; i < lattice.nx; ++i) {
                int id = lattice.at(i, j, k);
                if (id < 0) continue;
                auto& list = out[id];
                list.push_back(id);
                int k0 = std::max(0, k - betaIndex + 1), k1 = std::min(lattice.nz - 1, k + betaIndex - 1);
                int j0 = std::max(0, j - betaIndex + 1), j1 = std::min(lattice.ny - 1, j + betaIndex - 1);
                int i0 = std::max(0, i - betaIndex + 1), i1 = std::min(lattice.nx - 1, i + betaIndex - 1);
                for (int kk = k0; kk <= k1; ++kk)
                    for (int jj = j0; jj <= j1; ++jj)
                        for (int ii = i0; ii <= i1; ++ii) {
                            int other = lattice.at(ii, jj, kk);
                            if (other < 0 || other == id) continue;
                            double d = (positions[id] - positions[other]).norm();
                            if (d < alpha * radii[other]) list.push_back(other);
                        }
            }
    return out;
}

// --------------------------------------------------------------------------
// per-pair estimators and weighting

template <typename SceneT>
SampleRecord<SceneT::Dim> stage1Sample(const SceneT& scene, const Bvp<SceneT::Dim>& bvp,
                                       const EvaluationPoint<SceneT::Dim>& pt, int owner,
                                       const WalkConfig& cfg, Rng& rng) {
    BallSpec<SceneT::Dim> ball{pt.position, pt.radius};
    auto z = sampleSphereUniform<SceneT::Dim>(rng, ball);
    WalkSample walk = pointEstimate(scene, bvp, z.point, cfg, rng);
    return {owner, z.point, walk.value, walk.steps, walk.absorbed};
}

// One realization of the off-centered estimator I_{x,y} built from a cached
// record of the neighbor y. The boundary term reuses the cached walk; the
// source term draws fresh, since its importance distribution depends on x.
template <int DIM>
double pairEstimate(const Vec<DIM>& x, const SampleRecord<DIM>& record,
                    const Vec<DIM>& ownerPosition, double ownerRadius, const Bvp<DIM>& bvp,
                    const WalkConfig& cfg, Rng& rng) {
    if ((x - ownerPosition).norm() >= ownerRadius)
        throw std::domain_error("pairEstimate: x must lie inside the owner ball");
    BallSpec<DIM> ball{ownerPosition, ownerRadius};
    KernelParams kp{cfg.sigma};

    double value = record.value * poissonKernelBall<DIM>(x, record.point, ball, kp) /
                   uniformSpherePdf<DIM>(ownerRadius);
    if (bvp.hasSource()) {
        double term = 0.0;
        for (int j = 0; j < cfg.sourceSamples; ++j) {
            auto w = sampleSourceOffcenter<DIM>(rng, x, ball, kp);
            if (!w.valid) continue;
            term += bvp.source(w.point) * greenBall<DIM>(x, w.point, ball, kp) / w.pdf;
        }
        value += term / double(cfg.sourceSamples);
    }
    return value;
}

template <int DIM>
Vec<DIM> pairGradientEstimate(const Vec<DIM>& x, const SampleRecord<DIM>& record,
                              const Vec<DIM>& ownerPosition, double ownerRadius,
                              const Bvp<DIM>& bvp, const WalkConfig& cfg, Rng& rng) {
    if ((x - ownerPosition).norm() >= ownerRadius)
        throw std::domain_error("pairGradientEstimate: x must lie inside the owner ball");
    BallSpec<DIM> ball{ownerPosition, ownerRadius};
    KernelParams kp{cfg.sigma};

    Vec<DIM> value = record.value *
                     gradPoissonKernelBall<DIM>(x, record.point, ball, kp) /
                     uniformSpherePdf<DIM>(ownerRadius);
    if (bvp.hasSource()) {
        Vec<DIM> term = Vec<DIM>::Zero();
        for (int j = 0; j < cfg.sourceSamples; ++j) {
            auto w = sampleSourceOffcenter<DIM>(rng, x, ball, kp);
            if (!w.valid) continue;
            term += bvp.source(w.point) * gradGreenBall<DIM>(x, w.point, ball, kp) / w.pdf;
        }
        value += term / double(cfg.sourceSamples);
    }
    return value;
}

// Similarity score between the centered estimator and one off-centered pair.
// Requires two samples on both sides; degenerate all-zero statistics count as
// maximally similar.
inline std::optional<double> wStar(const PairStats& center, const PairStats& pair) {
    if (center.count < 2 || pair.count < 2) return std::nullopt;
    double delta = pair.mean - center.mean;
    double num = delta * delta + pair.varianceOfMean();
    double den = num + center.varianceOfMean();
    if (den <= 0.0) return 0.0;
    return num / den;
}

inline bool similarityAccept(const PairStats& center, const PairStats& pair, double gamma) {
    auto w = wStar(center, pair);
    return w.has_value() && (1.0 - *w) > gamma;
}

// Deterministic variance-bound weight for the Laplace off-centered estimator.
template <int DIM>
double poissonBoundWeight(const Vec<DIM>& x, const Vec<DIM>& y, double ry) {
    double t = (x - y).norm() / ry;
    if (t >= 1.0) throw std::domain_error("poissonBoundWeight: x outside the owner ball");
    double num = std::pow(1.0 - t, 2 * DIM);
    double den = (1.0 - t * t) * (1.0 - t * t);
    return num / den;
}

// Invariant counters checked on every combination; the acceptance suite
// requires both to stay at zero.
struct CombineChecks {
    std::atomic<uint64_t> calls{0};
    std::atomic<uint64_t> normalizationViolations{0};
    std::atomic<uint64_t> convexityViolations{0};
};

inline CombineChecks& combineChecks() {
    static CombineChecks checks;
    return checks;
}

// Weighted combination of per-pair running means. Weights must sum to one;
// the convex-combination and normalization invariants are verified on every
// call and tallied globally.
inline double combine(const std::vector<double>& means, const std::vector<double>& weights) {
    auto& checks = combineChecks();
    checks.calls.fetch_add(1, std::memory_order_relaxed);

    double wsum = 0.0, value = 0.0;
    double lo = kInf, hi = -kInf;
    for (size_t i = 0; i < means.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        wsum += weights[i];
        value += weights[i] * means[i];
        lo = std::min(lo, means[i]);
        hi = std::max(hi, means[i]);
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        checks.normalizationViolations.fetch_add(1, std::memory_order_relaxed);
    double slack = 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
    if (value < lo - slack || value > hi + slack)
        checks.convexityViolations.fetch_add(1, std::memory_order_relaxed);
    return value;
}

// Normalized combination weights for one point under the given strategy.
// Slot 0 is the self pair and is always included; other pairs need at least
// two samples before they participate.
inline std::vector<double> strategyWeights(const WeightingStrategy& st,
                                           const std::vector<PairStats>& stats,
                                           const std::vector<double>& pbWeights) {
    size_t n = stats.size();
    std::vector<double> w(n, 0.0);
    switch (st.kind) {
        case Weighting::Vanilla:
            w[0] = 1.0;
            return w;
        case Weighting::Uniform:
            w[0] = 1.0;
            for (size_t j = 1; j < n; ++j)
                if (stats[j].count >= 2) w[j] = 1.0;
            break;
        case Weighting::PoissonBound:
            w[0] = pbWeights[0];
            for (size_t j = 1; j < n; ++j)
                if (stats[j].count >= 2) w[j] = pbWeights[j];
            break;
        case Weighting::Statistical:
            w[0] = 1.0;
            for (size_t j = 1; j < n; ++j)
                if (similarityAccept(stats[0], stats[j], st.gamma)) w[j] = 1.0;
            break;
    }
    double sum = 0.0;
    for (double v : w) sum += v;
    for (double& v : w) v /= sum;
    return w;
}

// --------------------------------------------------------------------------
// the round-based driver

template <typename SceneT>
class ReuseSolver {
  public:
    static constexpr int DIM = SceneT::Dim;

    struct Lane {
        WeightingStrategy strategy;
        std::vector<double> estimate;
    };
    struct GradientLane {
        WeightingStrategy strategy;
        std::vector<Vec<DIM>> estimate;
    };
    // called after every round; returning false stops the solve early
    using RoundCallback = std::function<bool(int, const std::vector<Lane>&)>;

    ReuseSolver(const SceneT& scene, const Bvp<DIM>& bvp, const SolveConfig& cfg,
                std::vector<Vec<DIM>> positions, std::vector<std::vector<int>> neighbors)
        : scene_(scene), bvp_(bvp), cfg_(cfg) {
        size_t n = positions.size();
        if (neighbors.size() != n)
            throw std::invalid_argument("ReuseSolver: one neighbor list per point required");
        points_.resize(n);
        for (size_t i = 0; i < n; ++i) {
            points_[i].position = positions[i];
            points_[i].radius = scene.distanceToBoundary(positions[i]);
            if (!(points_[i].radius > 0))
                throw std::domain_error("ReuseSolver: evaluation point outside the domain");
            points_[i].neighbors = std::move(neighbors[i]);
            if (points_[i].neighbors.empty() || points_[i].neighbors[0] != int(i))
                throw std::invalid_argument("ReuseSolver: neighbor list must start with the point itself");
        }
        // reuse balls must contain their consumers
        for (size_t i = 0; i < n; ++i)
            for (size_t s = 1; s < points_[i].neighbors.size(); ++s) {
                int y = points_[i].neighbors[s];
                double d = (points_[i].position - points_[y].position).norm();
                if (d >= points_[y].radius)
                    throw std::invalid_argument("ReuseSolver: neighbor ball does not contain point");
            }
    }

    const std::vector<EvaluationPoint<DIM>>& points() const { return points_; }
    uint64_t totalWalks() const { return totalWalks_; }
    uint64_t truncatedWalks() const { return truncatedWalks_; }

    std::vector<Lane> solve(const std::vector<WeightingStrategy>& strategies,
                            const RoundCallback& onRound = {}) {
        size_t n = points_.size();
        initPairData();
        std::vector<Lane> lanes;
        for (const auto& st : strategies) lanes.push_back({st, std::vector<double>(n, 0.0)});

        WalkConfig wc = cfg_.walkConfig();
        std::vector<SampleRecord<DIM>> records(n);

        for (int k = 1; k <= cfg_.rounds; ++k) {
            parallelFor(n, cfg_.workers, [&](size_t i) {
                Rng rng = streamRng(cfg_.seed, StreamTag::Stage1, i, uint64_t(k));
                records[i] = stage1Sample(scene_, bvp_, points_[i], int(i), wc, rng);
            });
            totalWalks_ += n;
            if (cfg_.faultRound == k && cfg_.faultPoint >= 0 && cfg_.faultPoint < int(n))
                records[cfg_.faultPoint].value *= cfg_.faultScale;

            parallelFor(n, cfg_.workers, [&](size_t i) {
                const auto& pt = points_[i];
                size_t slots = pt.neighbors.size();
                auto& stats = stats_[i];

                // this round's one-sample realizations of each pair estimator;
                // the running statistics only drive the similarity masks
                thread_local std::vector<double> values;
                values.assign(slots, 0.0);
                for (size_t s = 0; s < slots; ++s) {
                    int y = pt.neighbors[s];
                    Rng rng = streamRng(cfg_.seed, StreamTag::PairSource, i, uint64_t(y),
                                        uint64_t(k));
                    values[s] = pairEstimate<DIM>(pt.position, records[y], points_[y].position,
                                                  points_[y].radius, bvp_, wc, rng);
                    stats[s].push(values[s]);
                }

                for (auto& lane : lanes) {
                    if (lane.strategy.kind == Weighting::Vanilla) {
                        lane.estimate[i] = stats[0].mean;
                    } else {
                        auto w = strategyWeights(lane.strategy, stats, pbWeights_[i]);
                        double combined = combine(values, w);
                        lane.estimate[i] = (lane.estimate[i] * (k - 1) + combined) / double(k);
                    }
                }
            });
            for (const auto& rec : records)
                if (!rec.absorbed) ++truncatedWalks_;
            if (onRound && !onRound(k, lanes)) break;
        }
        return lanes;
    }

    GradientLane solveGradient(const WeightingStrategy& strategy) {
        size_t n = points_.size();
        initPairData();
        gradStats_.assign(n, {});
        for (size_t i = 0; i < n; ++i)
            gradStats_[i].assign(points_[i].neighbors.size(), {});

        GradientLane lane{strategy, std::vector<Vec<DIM>>(n, Vec<DIM>::Zero())};
        WalkConfig wc = cfg_.walkConfig();
        std::vector<SampleRecord<DIM>> records(n);

        for (int k = 1; k <= cfg_.rounds; ++k) {
            parallelFor(n, cfg_.workers, [&](size_t i) {
                Rng rng = streamRng(cfg_.seed, StreamTag::Stage1, i, uint64_t(k));
                records[i] = stage1Sample(scene_, bvp_, points_[i], int(i), wc, rng);
            });
            totalWalks_ += n;
            if (cfg_.faultRound == k && cfg_.faultPoint >= 0 && cfg_.faultPoint < int(n))
                records[cfg_.faultPoint].value *= cfg_.faultScale;

            parallelFor(n, cfg_.workers, [&](size_t i) {
                const auto& pt = points_[i];
                size_t slots = pt.neighbors.size();
                auto& stats = gradStats_[i];
                thread_local std::vector<Vec<DIM>> values;
                values.assign(slots, Vec<DIM>::Zero());
                for (size_t s = 0; s < slots; ++s) {
                    int y = pt.neighbors[s];
                    Rng rng = streamRng(cfg_.seed, StreamTag::PairSource, i, uint64_t(y),
                                        uint64_t(k));
                    values[s] = pairGradientEstimate<DIM>(pt.position, records[y],
                                                          points_[y].position,
                                                          points_[y].radius, bvp_, wc, rng);
                    for (int c = 0; c < DIM; ++c) stats[s][c].push(values[s][c]);
                }

                Vec<DIM> combined = combineGradient(values, stats, strategy, pbWeights_[i]);
                lane.estimate[i] = (lane.estimate[i] * (k - 1) + combined) / double(k);
            });
        }
        return lane;
    }

  private:
    void initPairData() {
        size_t n = points_.size();
        stats_.assign(n, {});
        pbWeights_.assign(n, {});
        for (size_t i = 0; i < n; ++i) {
            size_t slots = points_[i].neighbors.size();
            stats_[i].assign(slots, PairStats{});
            pbWeights_[i].assign(slots, 1.0);
            for (size_t s = 1; s < slots; ++s) {
                int y = points_[i].neighbors[s];
                pbWeights_[i][s] = poissonBoundWeight<DIM>(points_[i].position,
                                                           points_[y].position,
                                                           points_[y].radius);
            }
        }
        totalWalks_ = 0;
        truncatedWalks_ = 0;
    }

    // Vector pairs accept only when every component passes the similarity
    // test; the resulting mask is shared across components.
    Vec<DIM> combineGradient(const std::vector<Vec<DIM>>& values,
                             const std::vector<std::array<PairStats, DIM>>& stats,
                             const WeightingStrategy& st,
                             const std::vector<double>& pbWeights) const {
        size_t slots = stats.size();
        std::vector<double> w(slots, 0.0);
        switch (st.kind) {
            case Weighting::Vanilla:
                w[0] = 1.0;
                break;
            case Weighting::Uniform:
                w[0] = 1.0;
                for (size_t s = 1; s < slots; ++s)
                    if (stats[s][0].count >= 2) w[s] = 1.0;
                break;
            case Weighting::PoissonBound:
                w[0] = pbWeights[0];
                for (size_t s = 1; s < slots; ++s)
                    if (stats[s][0].count >= 2) w[s] = pbWeights[s];
                break;
            case Weighting::Statistical:
                w[0] = 1.0;
                for (size_t s = 1; s < slots; ++s) {
                    bool ok = true;
                    for (int c = 0; c < DIM && ok; ++c)
                        ok = similarityAccept(stats[0][c], stats[s][c], st.gamma);
                    if (ok) w[s] = 1.0;
                }
                break;
        }
        double sum = 0.0;
        for (double v : w) sum += v;
        for (double& v : w) v /= sum;

        Vec<DIM> out;
        thread_local std::vector<double> component;
        for (int c = 0; c < DIM; ++c) {
            component.assign(slots, 0.0);
            for (size_t s = 0; s < slots; ++s) component[s] = values[s][c];
            out[c] = combine(component, w);
        }
        return out;
    }

    const SceneT& scene_;
    const Bvp<DIM>& bvp_;
    SolveConfig cfg_;
    std::vector<EvaluationPoint<DIM>> points_;
    std::vector<std::vector<PairStats>> stats_;
    std::vector<std::vector<std::array<PairStats, DIM>>> gradStats_;
    std::vector<std::vector<double>> pbWeights_;
    uint64_t totalWalks_ = 0;
    uint64_t truncatedWalks_ = 0;
};

// Single-strategy convenience wrapper; neighbor lists default to the
// distance-based rule.
template <typename SceneT>
std::vector<double> solve(const SceneT& scene, const Bvp<SceneT::Dim>& bvp,
                          const std::vector<Vec<SceneT::Dim>>& positions, const SolveConfig& cfg,
                          const WeightingStrategy& strategy) {
    std::vector<double> radii(positions.size());
    for (size_t i = 0; i < positions.size(); ++i) radii[i] = scene.distanceToBoundary(positions[i]);
    auto neighbors = selectNeighbors<SceneT::Dim>(positions, radii, cfg.alpha, cfg.beta);
    ReuseSolver<SceneT> solver(scene, bvp, cfg, positions, std::move(neighbors));
    return solver.solve({strategy}).front().estimate;
}

}  // namespace offws

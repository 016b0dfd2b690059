// Benchmark boundary value problems with manufactured trigonometric ground
// truth, scene configuration parsing, and the evaluation slice grids.

#pragma once

#include "offcenter.h"
#include "scene.h"

#include <json.hpp>

#include <fstream>

namespace offws {

// u(x, y, z) = sin(wx) sin(wy) sin(wz)
inline double trigSolution(const Vec3& p, double omega) {
    return std::sin(omega * p[0]) * std::sin(omega * p[1]) * std::sin(omega * p[2]);
}

inline Vec3 trigGradient(const Vec3& p, double omega) {
    double sx = std::sin(omega * p[0]), cx = std::cos(omega * p[0]);
    double sy = std::sin(omega * p[1]), cy = std::cos(omega * p[1]);
    double sz = std::sin(omega * p[2]), cz = std::cos(omega * p[2]);
    return omega * Vec3(cx * sy * sz, sx * cy * sz, sx * sy * cz);
}

// source making u solve  laplacian(u) - sigma u = -f
inline double trigSource(const Vec3& p, double omega, double sigma) {
    return (3.0 * omega * omega + sigma) * trigSolution(p, omega);
}

inline double trigNeumann(const Vec3& p, const Vec3& normal, double omega) {
    return trigGradient(p, omega).dot(normal);
}

// 2D analogues for the disc benchmarks
inline double trigSolution2(const Vec2& p, double omega) {
    return std::sin(omega * p[0]) * std::sin(omega * p[1]);
}

inline Vec2 trigGradient2(const Vec2& p, double omega) {
    return omega * Vec2(std::cos(omega * p[0]) * std::sin(omega * p[1]),
                        std::sin(omega * p[0]) * std::cos(omega * p[1]));
}

inline double trigSource2(const Vec2& p, double omega) {
    return 2.0 * omega * omega * trigSolution2(p, omega);
}

inline Bvp<3> trigBvp(double omega, double sigma = 0.0) {
    Bvp<3> bvp;
    bvp.sigma = sigma;
    bvp.dirichlet = [omega](const Vec3& p) { return trigSolution(p, omega); };
    bvp.neumann = [omega](const Vec3& p, const Vec3& n) { return trigNeumann(p, n, omega); };
    bvp.source = [omega, sigma](const Vec3& p) { return trigSource(p, omega, sigma); };
    bvp.solution = [omega](const Vec3& p) { return trigSolution(p, omega); };
    bvp.solutionGradient = [omega](const Vec3& p) { return trigGradient(p, omega); };
    return bvp;
}

inline Bvp<2> trigBvp2(double omega) {
    Bvp<2> bvp;
    bvp.dirichlet = [omega](const Vec2& p) { return trigSolution2(p, omega); };
    bvp.source = [omega](const Vec2& p) { return trigSource2(p, omega); };
    bvp.solution = [omega](const Vec2& p) { return trigSolution2(p, omega); };
    bvp.solutionGradient = [omega](const Vec2& p) { return trigGradient2(p, omega); };
    return bvp;
}

inline Bvp<3> constantBvp(double c) {
    Bvp<3> bvp;
    bvp.dirichlet = [c](const Vec3&) { return c; };
    bvp.neumann = [](const Vec3&, const Vec3&) { return 0.0; };
    bvp.solution = [c](const Vec3&) { return c; };
    bvp.solutionGradient = [](const Vec3&) { return Vec3::Zero(); };
    return bvp;
}

// --------------------------------------------------------------------------
// evaluation slices

// A planar n x n grid of evaluation points; only cells whose centers lie
// strictly inside the domain carry points.
struct SliceGrid {
    Vec3 origin = Vec3::Zero();
    Vec3 axisU = Vec3(1, 0, 0);  // half-extent included in the axis length
    Vec3 axisV = Vec3(0, 1, 0);
    int resolution = 0;

    std::vector<uint8_t> mask;   // res*res, 1 = inside
    std::vector<int> pointId;    // res*res, -1 where masked out
    std::vector<Vec3> points;    // compacted evaluation points
    LatticeMap lattice;

    Vec3 cellCenter(int i, int j) const {
        double u = (2.0 * (i + 0.5) / resolution) - 1.0;
        double v = (2.0 * (j + 0.5) / resolution) - 1.0;
        return origin + u * axisU + v * axisV;
    }
};

template <typename SceneT>
SliceGrid buildSlice(const SceneT& scene, const Vec3& origin, const Vec3& axisU, const Vec3& axisV,
                     int resolution) {
    if (resolution < 1) throw std::invalid_argument("buildSlice: resolution must be positive");
    if (axisU.norm() <= 0 || axisV.norm() <= 0)
        throw std::invalid_argument("buildSlice: degenerate slice axes");

    SliceGrid grid;
    grid.origin = origin;
    grid.axisU = axisU;
    grid.axisV = axisV;
    grid.resolution = resolution;
    grid.mask.assign(size_t(resolution) * resolution, 0);
    grid.pointId.assign(size_t(resolution) * resolution, -1);
    grid.lattice.nx = resolution;
    grid.lattice.ny = resolution;
    grid.lattice.nz = 1;
    grid.lattice.ids.assign(size_t(resolution) * resolution, -1);

    for (int j = 0; j < resolution; ++j)
        for (int i = 0; i < resolution; ++i) {
            Vec3 p = grid.cellCenter(i, j);
            size_t cell = size_t(j) * resolution + i;
            if (!scene.contains(p)) continue;
            if (scene.distanceToBoundary(p) <= 0) continue;
            grid.mask[cell] = 1;
            grid.pointId[cell] = int(grid.points.size());
            grid.lattice.ids[cell] = grid.pointId[cell];
            grid.points.push_back(p);
        }
    return grid;
}

// --------------------------------------------------------------------------
// scene configuration

enum class ProblemKind { Poisson, Screened };

struct SceneConfig {
    std::string name = "scene";

    // geometry
    std::string geometryType = "ball";  // ball | box | mesh
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
    Vec3 boxMin = Vec3(-1, -1, -1);
    Vec3 boxMax = Vec3(1, 1, 1);
    std::string meshPath;
    bool normalizeMesh = true;

    // boundary partition
    LabelRule labels = LabelRule::dirichlet();

    // problem
    ProblemKind problem = ProblemKind::Poisson;
    double omega = kPi;
    double sigma = 0.0;

    // slice
    Vec3 sliceOrigin = Vec3::Zero();
    Vec3 sliceAxisU = Vec3(1, 0, 0);
    Vec3 sliceAxisV = Vec3(0, 1, 0);
    int resolution = 512;
};

namespace detail {

inline Vec3 vec3FromJson(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected a 3-element array");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace detail

inline SceneConfig parseSceneConfig(const nlohmann::json& j) {
    SceneConfig cfg;
    cfg.name = j.value("name", cfg.name);

    if (j.contains("geometry")) {
        const auto& g = j.at("geometry");
        cfg.geometryType = g.value("type", cfg.geometryType);
        if (g.contains("center")) cfg.center = detail::vec3FromJson(g.at("center"));
        cfg.radius = g.value("radius", cfg.radius);
        if (g.contains("min")) cfg.boxMin = detail::vec3FromJson(g.at("min"));
        if (g.contains("max")) cfg.boxMax = detail::vec3FromJson(g.at("max"));
        cfg.meshPath = g.value("path", cfg.meshPath);
        cfg.normalizeMesh = g.value("normalize", cfg.normalizeMesh);
    }
    if (j.contains("boundary")) {
        const auto& b = j.at("boundary");
        std::string rule = b.value("rule", "all-dirichlet");
        if (rule == "all-dirichlet") {
            cfg.labels = LabelRule::dirichlet();
        } else if (rule == "half-space") {
            Vec3 axis = b.contains("axis") ? detail::vec3FromJson(b.at("axis")) : Vec3(0, 0, 1);
            cfg.labels = LabelRule::halfSpace(axis, b.value("threshold", 0.0));
        } else {
            throw std::runtime_error("unknown boundary rule: " + rule);
        }
    }
    if (j.contains("problem")) {
        const auto& p = j.at("problem");
        std::string kind = p.value("type", "poisson");
        if (kind == "poisson")
            cfg.problem = ProblemKind::Poisson;
        else if (kind == "screened")
            cfg.problem = ProblemKind::Screened;
        else
            throw std::runtime_error("unknown problem type: " + kind);
        if (p.contains("omega_in_pi"))
            cfg.omega = p.at("omega_in_pi").get<double>() * kPi;
        else
            cfg.omega = p.value("omega", cfg.omega);
        cfg.sigma = p.value("sigma", cfg.problem == ProblemKind::Screened ? 5.0 : 0.0);
        if (cfg.problem == ProblemKind::Poisson) cfg.sigma = 0.0;
    }
    if (j.contains("slice")) {
        const auto& s = j.at("slice");
        if (s.contains("origin")) cfg.sliceOrigin = detail::vec3FromJson(s.at("origin"));
        if (s.contains("axisU")) cfg.sliceAxisU = detail::vec3FromJson(s.at("axisU"));
        if (s.contains("axisV")) cfg.sliceAxisV = detail::vec3FromJson(s.at("axisV"));
        cfg.resolution = s.value("resolution", cfg.resolution);
    }
    return cfg;
}

inline SceneConfig loadSceneConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene config: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    return parseSceneConfig(j);
}

struct BuiltScene {
    SceneConfig config;
    SceneVariant geometry = BallScene<3>(Vec3::Zero(), 1.0);
    Bvp<3> bvp;
    SliceGrid slice;

    template <typename Fn>
    decltype(auto) visit(Fn&& fn) const {
        return std::visit(std::forward<Fn>(fn), geometry);
    }
};

inline BuiltScene buildScene(const SceneConfig& cfg) {
    BuiltScene built;
    built.config = cfg;

    if (cfg.geometryType == "ball") {
        built.geometry = BallScene<3>(cfg.center, cfg.radius, cfg.labels);
    } else if (cfg.geometryType == "box") {
        built.geometry = BoxScene<3>(cfg.boxMin, cfg.boxMax);
        if (!cfg.labels.allDirichlet)
            throw std::runtime_error("box scenes support only all-Dirichlet boundaries");
    } else if (cfg.geometryType == "mesh") {
        BoundaryMesh mesh = loadObj(cfg.meshPath);
        if (cfg.normalizeMesh) mesh.normalizeToUnitBox();
        mesh.assignLabels(cfg.labels);
        built.geometry = MeshScene(std::move(mesh));
    } else {
        throw std::runtime_error("unknown geometry type: " + cfg.geometryType);
    }

    built.bvp = trigBvp(cfg.omega, cfg.sigma);
    built.slice = built.visit([&](const auto& scene) {
        return buildSlice(scene, cfg.sliceOrigin, cfg.sliceAxisU, cfg.sliceAxisV, cfg.resolution);
    });
    return built;
}

inline BuiltScene buildScene(const std::string& configPath) {
    return buildScene(loadSceneConfig(configPath));
}

}  // namespace offws

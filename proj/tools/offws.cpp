// Command-line driver: load a scene description, run one or several weighting
// strategies on a shared walk budget, and write solution/error maps plus
// convergence tables.

#include <offws/run.h>

#include <CLI11.hpp>

#include <iostream>

namespace {

offws::WeightingStrategy parseStrategy(const std::string& name, double gamma) {
    using offws::WeightingStrategy;
    if (name == "vanilla") return WeightingStrategy::vanilla();
    if (name == "uniform") return WeightingStrategy::uniform();
    if (name == "poisson-bound") return WeightingStrategy::poissonBound();
    if (name == "statistical") return WeightingStrategy::statistical(gamma);
    throw CLI::ValidationError("strategy", "unknown strategy: " + name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"off-centered walk-on-spheres solver with statistical sample reuse"};

    std::string scenePath;
    std::string strategy = "statistical";
    std::vector<std::string> compare;
    std::string outDir = "out";
    std::string budgetMode = "rounds";
    std::string neighborMode = "grid";
    double gamma = 0.05, alpha = 0.5, beta = 10.0, eps = 0.0, seconds = 500.0;
    int spp = 64, resolution = 0, workers = 0;
    uint64_t seed = 1;
    bool timing = false;

    app.add_option("--scene", scenePath, "scene config (JSON)")->required();
    app.add_option("--strategy", strategy, "vanilla | uniform | poisson-bound | statistical");
    app.add_option("--compare", compare, "strategies to run on a shared walk budget")
        ->delimiter(',');
    app.add_option("--gamma", gamma, "similarity threshold for statistical weighting");
    app.add_option("--alpha", alpha, "neighbor radius fraction");
    app.add_option("--beta", beta, "neighbor cap (index window in grid mode)");
    app.add_option("--eps", eps, "epsilon shell; 0 = 1e-3 x scene diameter");
    app.add_option("--spp", spp, "samples per point (rounds)");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--workers", workers, "worker threads; 0 = hardware");
    app.add_option("--out", outDir, "output directory");
    app.add_option("--budget-mode", budgetMode, "rounds | seconds");
    app.add_option("--budget-seconds", seconds, "wall-clock budget for --budget-mode seconds");
    app.add_option("--neighbor-mode", neighborMode, "grid | distance");
    app.add_option("--resolution", resolution, "override slice resolution");
    app.add_flag("--timing", timing, "record wall-clock in convergence.csv (non-reproducible)");

    CLI11_PARSE(app, argc, argv);

    try {
        offws::RunConfig cfg;
        cfg.scene = offws::loadSceneConfig(scenePath);
        if (resolution > 0) cfg.scene.resolution = resolution;

        cfg.strategies.clear();
        if (!compare.empty()) {
            for (const auto& name : compare) cfg.strategies.push_back(parseStrategy(name, gamma));
        } else {
            cfg.strategies.push_back(parseStrategy(strategy, gamma));
        }

        cfg.gamma = gamma;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.epsilon = eps;
        cfg.rounds = spp;
        cfg.seed = seed;
        cfg.workers = workers > 0 ? workers : offws::defaultWorkerCount();
        cfg.outDir = outDir;
        cfg.recordTiming = timing;

        if (budgetMode == "seconds") {
            cfg.budgetMode = offws::BudgetMode::Seconds;
            cfg.budgetSeconds = seconds;
        } else if (budgetMode != "rounds") {
            throw std::runtime_error("invalid --budget-mode value: " + budgetMode);
        }
        if (neighborMode == "distance")
            cfg.neighborMode = offws::NeighborMode::Distance;
        else if (neighborMode != "grid")
            throw std::runtime_error("invalid --neighbor-mode value: " + neighborMode);

        offws::RunReport report = offws::run(cfg);

        std::cout << "scene " << cfg.scene.name << ": " << report.slice.points.size()
                  << " evaluation points, " << report.totalWalks << " walks";
        if (report.truncatedWalks > 0) std::cout << " (" << report.truncatedWalks << " truncated)";
        std::cout << "\n";
        for (const auto& lane : report.lanes)
            std::cout << "  " << lane.name << ": final mse " << lane.rows.back().mse << "\n";
        std::cout << "outputs written to " << outDir << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

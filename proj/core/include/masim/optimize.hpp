#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "masim/beamforming.hpp"
#include "masim/objective.hpp"

namespace masim {

struct PsoParams {
    std::size_t swarm_size = 64;
    double inertia = 0.729;
    double cognitive = 1.494;
    double social = 1.494;
    double velocity_clamp = 0.25;  // fraction of the region extent
    std::size_t stall_iterations = 200;
    bool snap_to_grid = false;  // restrict particles to the candidate grid
};

struct OptimizerParams {
    std::uint64_t seed = 0;
    // Candidate grid density per axis; defaults to 4 (1D) or 2 (2D).
    std::optional<double> grid_points_per_wavelength;
    std::size_t multistarts = 32;
    std::size_t max_iterations = 2000;
    // Initial projected-gradient displacement; defaults to wavelength / 10.
    std::optional<double> step_init_m;
    double step_shrink = 0.5;
    PsoParams pso;
    double tolerance = 1e-10;
    // Local x4 grid refinement around each greedy pick (2D regions only).
    bool refine = true;
    // Optimize cross-linked track coordinates instead of free positions.
    bool use_coupling = false;

    double grid_density(int dim) const { return grid_points_per_wavelength.value_or(dim == 1 ? 4.0 : 2.0); }
    double step_init(const CarrierSpec& c) const { return step_init_m.value_or(c.wavelength() / 10.0); }
};

struct OptimizationResult {
    ArrayLayout layout;
    Weights weights;
    double objective_value;
    std::size_t iterations;
    bool converged;
    std::vector<double> trace;
};

/// Multistart projected-gradient descent on the null-depth objective of a 1D
/// region. The first start spreads elements uniformly over the region, the
/// rest are seeded random feasible layouts. Weights are MRT toward the target.
OptimizationResult beam_nulling_optimize(const NullDepth& spec, std::size_t n, const CarrierSpec& carrier,
                                         const PlacementConstraints& constraints, const OptimizerParams& params);

/// Places antennas one at a time on the candidate grid, each at the point that
/// best improves the objective of the partial layout (ties: lowest index).
OptimizationResult greedy_sequential_placement(const ObjectiveSpec& spec, std::size_t n, const CarrierSpec& carrier,
                                               const PlacementConstraints& constraints, const OptimizerParams& params);

/// Particle swarm over full position vectors with projection after each move.
OptimizationResult pso_optimize(const ObjectiveSpec& spec, std::size_t n, const CarrierSpec& carrier,
                                const PlacementConstraints& constraints, const OptimizerParams& params);

/// Alternates a closed-form MRT weight step with one projected-gradient
/// position pass (weights held fixed). Only null-depth objectives on 1D
/// regions have the required closed-form weight step.
OptimizationResult alternating_apv_awv(const ObjectiveSpec& spec, const OptimizationResult& init,
                                       const CarrierSpec& carrier, const PlacementConstraints& constraints,
                                       const OptimizerParams& params);

inline constexpr double kExhaustiveGuard = 1e7;

/// Global optimum over all feasible n-subsets of the candidate grid.
/// Throws TooLargeInstance when C(grid, n) exceeds 1e7.
OptimizationResult exhaustive_search(const ObjectiveSpec& spec, std::size_t n, const CarrierSpec& carrier,
                                     const PlacementConstraints& constraints, const OptimizerParams& params);

}  // namespace masim

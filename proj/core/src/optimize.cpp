#include "masim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "masim/errors.hpp"
#include "masim/parallel.hpp"
#include "masim/rng.hpp"

namespace masim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kResetAfterSuccesses = 5;
constexpr double kMinStep = 1e-13;  // meters
constexpr int kRefineFactor = 4;
constexpr double kTieTolerance = 1e-12;

struct Candidate {
    double score = kInf;
    std::size_t index = std::numeric_limits<std::size_t>::max();

    bool better_than(const Candidate& other) const {
        return score < other.score || (score == other.score && index < other.index);
    }
};

void require_feasible_count(std::size_t n, const PlacementConstraints& c) {
    if (n == 0) throw InvalidArgument("optimizer: need at least one antenna");
    const double s = c.min_spacing();
    const double extent = c.region().extent();
    if (s == 0.0) return;
    if (c.region().dim() == 1) {
        if (static_cast<double>(n - 1) * s > extent + kGeometryTolerance)
            throw InfeasibleConstraints("cannot fit " + std::to_string(n) + " antennas into the 1D region");
        return;
    }
    const double per_axis = std::floor(extent / s + 1e-9) + 1.0;
    if (static_cast<double>(n) > per_axis * per_axis)
        throw InfeasibleConstraints("cannot fit " + std::to_string(n) + " antennas into the 2D region");
}

OptimizationResult finalize(const ObjectiveModel& model, ArrayLayout layout, const PlacementConstraints& constraints,
                            std::size_t iterations, bool converged, std::vector<double> trace) {
    if (!validate_layout(layout, constraints).ok())
        throw InfeasibleConstraints("optimizer produced an infeasible layout");
    Weights w = mrt_weights(model.target_channel(layout));
    const double value = model.evaluate(layout);
    return {std::move(layout), std::move(w), value, iterations, converged, std::move(trace)};
}

std::vector<double> random_line(Rng& rng, std::size_t n, double extent) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.uniform(0.0, extent);
    return xs;
}

struct DescentRun {
    std::vector<double> xs;
    double value = kInf;
    std::size_t iterations = 0;
    std::vector<double> trace;
};

// Projected gradient with a normalized step: the largest coordinate moves by
// `step` meters. Step halves on non-decrease and resets after a streak.
DescentRun descend(const NullDepth& spec, std::vector<double> xs, const CarrierSpec& carrier,
                   const PlacementConstraints& constraints, const OptimizerParams& params) {
    auto value_of = [&](const std::vector<double>& v) { return null_depth_value(spec, ArrayLayout::line(v), carrier); };
    DescentRun run;
    run.xs = project_to_feasible(ArrayLayout::line(xs), constraints).xs();
    run.value = value_of(run.xs);
    run.trace.push_back(run.value);

    const double step_init = params.step_init(carrier);
    double step = step_init;
    std::size_t streak = 0;
    while (run.iterations < params.max_iterations && run.value > params.tolerance) {
        ++run.iterations;
        const auto g = nulling_gradient(spec, ArrayLayout::line(run.xs), carrier);
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax == 0.0) break;

        std::vector<double> trial(run.xs.size());
        for (std::size_t m = 0; m < trial.size(); ++m) trial[m] = run.xs[m] - step * g[m] / gmax;
        trial = project_to_feasible(ArrayLayout::line(trial), constraints).xs();
        const double f = value_of(trial);
        if (f < run.value) {
            run.xs = std::move(trial);
            run.value = f;
            if (++streak == kResetAfterSuccesses) {
                step = step_init;
                streak = 0;
            }
        } else {
            step *= params.step_shrink;
            streak = 0;
            if (step < kMinStep) break;
        }
        run.trace.push_back(run.value);
    }
    return run;
}

std::vector<std::vector<cdouble>> precompute(const ObjectiveModel& model, const std::vector<Position>& grid) {
    std::vector<std::vector<cdouble>> out(grid.size(), std::vector<cdouble>(1 + model.adversaries()));
    parallel_for(grid.size(), [&](std::size_t i) { model.responses(grid[i], out[i]); });
    return out;
}

bool clear_of(const Position& p, const std::vector<Position>& placed, double spacing) {
    return std::all_of(placed.begin(), placed.end(),
                       [&](const Position& q) { return distance(p, q) >= spacing - kGeometryTolerance; });
}

// Lowest index whose score is within a relative 1e-12 of the minimum, so
// rounding noise between equivalent candidates cannot reorder them.
Candidate pick_lowest_index(const std::vector<double>& scores) {
    double lo = kInf;
    for (double v : scores) lo = std::min(lo, v);
    if (!std::isfinite(lo)) return {};
    const double cut = lo + kTieTolerance * std::max(1.0, std::abs(lo));
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] <= cut) return {scores[i], i};
    }
    return {};
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

}  // namespace

OptimizationResult beam_nulling_optimize(const NullDepth& spec, std::size_t n, const CarrierSpec& carrier,
                                         const PlacementConstraints& constraints, const OptimizerParams& params) {
    if (constraints.region().dim() != 1) throw InvalidArgument("beam_nulling_optimize: region must be 1D");
    require_feasible_count(n, constraints);
    const ObjectiveModel model(ObjectiveSpec::null_depth(spec.target, spec.nulls), carrier, 1);
    const double extent = constraints.region().extent();
    const auto first = uniform_spread(n, constraints.region()).xs();

    if (spec.nulls.empty()) {
        auto layout = project_to_feasible(ArrayLayout::line(first), constraints);
        return finalize(model, std::move(layout), constraints, 0, true, {0.0});
    }

    const std::size_t starts = std::max<std::size_t>(1, params.multistarts);
    std::vector<DescentRun> runs(starts);
    parallel_for(starts, [&](std::size_t s) {
        std::vector<double> init = first;
        if (s > 0) {
            Rng rng(params.seed, s);
            init = random_line(rng, n, extent);
        }
        runs[s] = descend(spec, std::move(init), carrier, constraints, params);
    });

    std::size_t best = 0;
    for (std::size_t s = 1; s < starts; ++s) {
        if (runs[s].value < runs[best].value) best = s;
    }
    auto& run = runs[best];
    const bool converged = run.value <= params.tolerance;
    return finalize(model, ArrayLayout::line(run.xs), constraints, run.iterations, converged, std::move(run.trace));
}

OptimizationResult greedy_sequential_placement(const ObjectiveSpec& spec, std::size_t n, const CarrierSpec& carrier,
                                               const PlacementConstraints& constraints, const OptimizerParams& params) {
    if (n == 0) throw InvalidArgument("greedy_sequential_placement: need at least one antenna");
    const auto& region = constraints.region();
    const int dim = region.dim();
    const ObjectiveModel model(spec, carrier, dim);
    const double density = params.grid_density(dim);
    const auto grid = candidate_grid(region, carrier.wavelength(), density);
    if (grid.empty()) throw InfeasibleConstraints("greedy_sequential_placement: empty candidate grid");
    const auto responses = precompute(model, grid);
    const double spacing = constraints.min_spacing();
    const double fine = carrier.wavelength() / density / kRefineFactor;

    std::vector<char> available(grid.size(), 1);
    std::vector<Position> placed;
    placed.reserve(n);
    auto acc = model.empty();
    std::vector<double> trace;
    trace.reserve(n);

    const std::size_t workers = std::max(1u, worker_count());
    const std::size_t block = (grid.size() + workers - 1) / workers;
    std::vector<cdouble> local(1 + model.adversaries());
    std::vector<double> scores(grid.size());

    for (std::size_t k = 0; k < n; ++k) {
        // Scores are gathered first so the pick below does not depend on how
        // the grid was split across workers.
        parallel_for(workers, [&](std::size_t w) {
            const std::size_t end = std::min(grid.size(), (w + 1) * block);
            for (std::size_t i = w * block; i < end; ++i)
                scores[i] = available[i] ? model.score(model.value_with(acc, responses[i])) : kInf;
        });
        Candidate best = pick_lowest_index(scores);
        if (best.index >= grid.size())
            throw InfeasibleConstraints("greedy_sequential_placement: candidate grid exhausted after " +
                                        std::to_string(k) + " placements");

        Position pos = grid[best.index];
        std::vector<cdouble> resp = responses[best.index];
        if (params.refine && dim == 2) {
            // Incumbent first, so ties keep the coarse pick.
            for (int j = -kRefineFactor; j <= kRefineFactor; ++j) {
                for (int i = -kRefineFactor; i <= kRefineFactor; ++i) {
                    if (i == 0 && j == 0) continue;
                    const Position p{grid[best.index].x + i * fine, grid[best.index].y + j * fine};
                    if (!region.contains(p, 0.0) || !clear_of(p, placed, spacing)) continue;
                    model.responses(p, local);
                    const double s = model.score(model.value_with(acc, local));
                    if (s < best.score) {
                        best.score = s;
                        pos = p;
                        resp = local;
                    }
                }
            }
        }

        placed.push_back(pos);
        ObjectiveModel::add(acc, resp);
        available[best.index] = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (available[i] && distance(grid[i], pos) < spacing - kGeometryTolerance) available[i] = 0;
        }
        trace.push_back(model.value(acc));
    }

    return finalize(model, ArrayLayout(dim, std::move(placed)), constraints, n, true, std::move(trace));
}

OptimizationResult pso_optimize(const ObjectiveSpec& spec, std::size_t n, const CarrierSpec& carrier,
                                const PlacementConstraints& constraints, const OptimizerParams& params) {
    const auto& pso = params.pso;
    if (pso.swarm_size < 2) throw InvalidArgument("pso_optimize: swarm_size must be at least 2");
    if (!std::isfinite(pso.inertia) || !std::isfinite(pso.cognitive) || !std::isfinite(pso.social))
        throw InvalidArgument("pso_optimize: coefficients must be finite");
    const auto& region = constraints.region();
    const int dim = region.dim();
    const double extent = region.extent();
    const ObjectiveModel model(spec, carrier, dim);

    std::size_t rows = 0;
    std::size_t cols = 0;
    if (params.use_coupling) {
        if (!constraints.coupling()) throw InvalidArgument("pso_optimize: coupling requested but not declared");
        rows = constraints.coupling()->row_track_coords.size();
        cols = constraints.coupling()->col_track_coords.size();
        if (rows * cols != n) throw InvalidArgument("pso_optimize: n must equal rows x cols of the coupling");
        // Rows and columns are independent 1D problems under the coupling.
        require_feasible_count(std::max(rows, cols), PlacementConstraints(MovingRegion(1, extent), constraints.min_spacing()));
    } else {
        require_feasible_count(n, constraints);
    }
    const std::size_t dims = params.use_coupling ? rows + cols : n * static_cast<std::size_t>(dim);

    const double grid_step = carrier.wavelength() / params.grid_density(dim);
    // Same index range and arithmetic as candidate_grid, so snapped values are grid points.
    const double last_index = std::floor(extent / grid_step + 1e-9);
    auto snap = [&](double v) {
        return std::min(std::clamp(std::round(v / grid_step), 0.0, last_index) * grid_step, extent);
    };

    auto to_layout = [&](const std::vector<double>& x) {
        if (params.use_coupling) {
            CLMACoupling c{{x.begin(), x.begin() + static_cast<std::ptrdiff_t>(rows)},
                           {x.begin() + static_cast<std::ptrdiff_t>(rows), x.end()}};
            return clma_layout(c);
        }
        if (dim == 1) return ArrayLayout::line(x);
        std::vector<Position> pts(n);
        for (std::size_t m = 0; m < n; ++m) pts[m] = {x[2 * m], x[2 * m + 1]};
        return ArrayLayout(2, std::move(pts));
    };

    // Projects in place; returns false when the particle is still infeasible.
    auto make_feasible = [&](std::vector<double>& x) {
        try {
            if (params.use_coupling) {
                CLMACoupling c{{x.begin(), x.begin() + static_cast<std::ptrdiff_t>(rows)},
                               {x.begin() + static_cast<std::ptrdiff_t>(rows), x.end()}};
                c = project_to_feasible(c, constraints);
                std::copy(c.row_track_coords.begin(), c.row_track_coords.end(), x.begin());
                std::copy(c.col_track_coords.begin(), c.col_track_coords.end(), x.begin() + static_cast<std::ptrdiff_t>(rows));
            } else {
                const auto projected = project_to_feasible(to_layout(x), constraints);
                for (std::size_t m = 0; m < n; ++m) {
                    x[m * dim] = projected[m].x;
                    if (dim == 2) x[2 * m + 1] = projected[m].y;
                }
            }
        } catch (const InfeasibleConstraints&) {
            for (auto& v : x) v = std::clamp(v, 0.0, extent);
            return false;
        }
        if (pso.snap_to_grid) {
            for (auto& v : x) v = snap(v);
            return validate_layout(to_layout(x), constraints).ok();
        }
        return true;
    };

    auto fitness = [&](const std::vector<double>& x, bool feasible) {
        return feasible ? model.score(model.evaluate(to_layout(x))) : kInf;
    };

    Rng rng(params.seed);
    const double vmax = pso.velocity_clamp * extent;
    const std::size_t swarm = pso.swarm_size;
    std::vector<std::vector<double>> pos(swarm, std::vector<double>(dims));
    std::vector<std::vector<double>> vel(swarm, std::vector<double>(dims));

    for (std::size_t p = 0; p < swarm; ++p) {
        if (p == 0) {
            if (params.use_coupling) {
                const auto r = uniform_spread(rows, MovingRegion(1, extent)).xs();
                const auto c = uniform_spread(cols, MovingRegion(1, extent)).xs();
                std::copy(r.begin(), r.end(), pos[p].begin());
                std::copy(c.begin(), c.end(), pos[p].begin() + static_cast<std::ptrdiff_t>(rows));
            } else {
                const auto spread = uniform_spread(n, region);
                for (std::size_t m = 0; m < n; ++m) {
                    pos[p][m * dim] = spread[m].x;
                    if (dim == 2) pos[p][2 * m + 1] = spread[m].y;
                }
            }
        } else {
            for (auto& v : pos[p]) v = rng.uniform(0.0, extent);
        }
        for (auto& v : vel[p]) v = rng.uniform(-vmax, vmax);
    }

    std::vector<char> feasible(swarm);
    std::vector<double> fit(swarm);
    auto evaluate_swarm = [&] {
        parallel_for(swarm, [&](std::size_t p) {
            feasible[p] = make_feasible(pos[p]);
            fit[p] = fitness(pos[p], feasible[p]);
        });
    };
    evaluate_swarm();

    auto best_pos = pos;
    auto best_fit = fit;
    std::size_t leader = 0;
    for (std::size_t p = 1; p < swarm; ++p) {
        if (fit[p] < fit[leader]) leader = p;
    }
    std::vector<double> global = best_pos[leader];
    double global_fit = best_fit[leader];

    auto done = [&] { return model.sense() == Sense::minimize && global_fit <= params.tolerance; };
    std::vector<double> trace;
    if (std::isfinite(global_fit)) trace.push_back(model.sense() == Sense::minimize ? global_fit : -global_fit);

    std::size_t iterations = 0;
    std::size_t stall = 0;
    bool stalled = false;
    while (!done() && iterations < params.max_iterations) {
        ++iterations;
        for (std::size_t p = 0; p < swarm; ++p) {
            for (std::size_t d = 0; d < dims; ++d) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                double v = pso.inertia * vel[p][d] + pso.cognitive * r1 * (best_pos[p][d] - pos[p][d]) +
                           pso.social * r2 * (global[d] - pos[p][d]);
                v = std::clamp(v, -vmax, vmax);
                vel[p][d] = v;
                pos[p][d] += v;
            }
        }
        evaluate_swarm();

        bool improved = false;
        for (std::size_t p = 0; p < swarm; ++p) {
            if (fit[p] < best_fit[p]) {
                best_fit[p] = fit[p];
                best_pos[p] = pos[p];
            }
            if (fit[p] < global_fit) {
                global_fit = fit[p];
                global = pos[p];
                improved = true;
            }
        }
        if (std::isfinite(global_fit)) trace.push_back(model.sense() == Sense::minimize ? global_fit : -global_fit);
        stall = improved ? 0 : stall + 1;
        if (stall >= pso.stall_iterations) {
            stalled = true;
            break;
        }
    }

    if (!std::isfinite(global_fit)) throw InfeasibleConstraints("pso_optimize: no feasible particle found");
    const bool converged = model.sense() == Sense::minimize ? global_fit <= params.tolerance : stalled;
    return finalize(model, to_layout(global), constraints, iterations, converged, std::move(trace));
}

OptimizationResult alternating_apv_awv(const ObjectiveSpec& spec, const OptimizationResult& init,
                                       const CarrierSpec& carrier, const PlacementConstraints& constraints,
                                       const OptimizerParams& params) {
    const auto* nulling = std::get_if<NullDepth>(&spec.kind);
    if (!nulling) throw InvalidArgument("alternating_apv_awv: only null-depth objectives have a closed-form weight step");
    if (constraints.region().dim() != 1 || init.layout.dim() != 1)
        throw InvalidArgument("alternating_apv_awv: region must be 1D");
    require_feasible_count(init.layout.size(), constraints);
    const ObjectiveModel model(spec, carrier, 1);
    const double beta = carrier.wavenumber();

    auto xs = project_to_feasible(init.layout, constraints).xs();
    const std::size_t n = xs.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    double f = model.evaluate(ArrayLayout::line(xs));
    std::vector<double> trace{f};

    const double step_init = params.step_init(carrier);
    double step = step_init;
    std::size_t streak = 0;
    std::size_t iterations = 0;
    bool converged = false;
    while (iterations < params.max_iterations) {
        if (f <= params.tolerance) {
            converged = true;
            break;
        }
        ++iterations;

        // Weight step: MRT toward the target at the current positions.
        std::vector<cdouble> w(n);
        for (std::size_t m = 0; m < n; ++m) w[m] = std::polar(std::sqrt(inv_n), beta * xs[m] * nulling->target.ux());

        // Position step on J(x) = (1/n) sum_k |w^H a_k(x)|^2 with w held fixed.
        std::vector<double> g(n, 0.0);
        for (const auto& null : nulling->nulls) {
            const double c = null.ux();
            std::vector<cdouble> terms(n);
            cdouble total = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                terms[m] = std::conj(w[m]) * std::polar(1.0, beta * xs[m] * c);
                total += terms[m];
            }
            for (std::size_t m = 0; m < n; ++m) g[m] += -2.0 * beta * c * (std::conj(total) * terms[m]).imag() * inv_n;
        }
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax <= 1e-300) {
            converged = true;
            break;
        }

        bool accepted = false;
        while (step >= kMinStep) {
            std::vector<double> trial(n);
            for (std::size_t m = 0; m < n; ++m) trial[m] = xs[m] - step * g[m] / gmax;
            trial = project_to_feasible(ArrayLayout::line(trial), constraints).xs();
            const double ft = model.evaluate(ArrayLayout::line(trial));
            if (ft < f) {
                xs = std::move(trial);
                f = ft;
                accepted = true;
                if (++streak == kResetAfterSuccesses) {
                    step = step_init;
                    streak = 0;
                }
                break;
            }
            step *= params.step_shrink;
            streak = 0;
        }
        trace.push_back(f);
        if (!accepted) break;
    }
    if (f <= params.tolerance) converged = true;
    return finalize(model, ArrayLayout::line(xs), constraints, iterations, converged, std::move(trace));
}

OptimizationResult exhaustive_search(const ObjectiveSpec& spec, std::size_t n, const CarrierSpec& carrier,
                                     const PlacementConstraints& constraints, const OptimizerParams& params) {
    if (n == 0) throw InvalidArgument("exhaustive_search: need at least one antenna");
    const auto& region = constraints.region();
    const int dim = region.dim();
    const ObjectiveModel model(spec, carrier, dim);
    const auto grid = candidate_grid(region, carrier.wavelength(), params.grid_density(dim));
    const double combos = binomial(grid.size(), n);
    if (combos > kExhaustiveGuard)
        throw TooLargeInstance("exhaustive_search: " + std::to_string(combos) + " grid combinations exceed the 1e7 guard");
    if (n > grid.size()) throw InfeasibleConstraints("exhaustive_search: more antennas than grid points");
    const auto responses = precompute(model, grid);
    const double spacing = constraints.min_spacing();

    struct Branch {
        double score = kInf;
        std::vector<std::size_t> choice;
        std::size_t visited = 0;
    };
    std::vector<Branch> branches(grid.size());

    parallel_for(grid.size(), [&](std::size_t first) {
        Branch& out = branches[first];
        std::vector<std::size_t> chosen{first};
        std::vector<ObjectiveModel::Accumulator> accs(n + 1, model.empty());
        ObjectiveModel::add(accs[1] = accs[0], responses[first]);

        auto feasible_with = [&](std::size_t idx) {
            return std::all_of(chosen.begin(), chosen.end(), [&](std::size_t j) {
                return distance(grid[idx], grid[j]) >= spacing - kGeometryTolerance;
            });
        };
        // Depth-first in lexicographic order; strict improvement keeps the
        // lexicographically smallest optimum.
        auto recurse = [&](auto& self, std::size_t next) -> void {
            const std::size_t depth = chosen.size();
            if (depth == n) {
                ++out.visited;
                const double s = model.score(model.value(accs[depth]));
                if (s < out.score) {
                    out.score = s;
                    out.choice = chosen;
                }
                return;
            }
            for (std::size_t i = next; i + (n - depth) <= grid.size(); ++i) {
                if (!feasible_with(i)) continue;
                accs[depth + 1] = accs[depth];
                ObjectiveModel::add(accs[depth + 1], responses[i]);
                chosen.push_back(i);
                self(self, i + 1);
                chosen.pop_back();
            }
        };
        if (first + n <= grid.size()) recurse(recurse, first + 1);
    });

    std::size_t best = grid.size();
    std::size_t visited = 0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        visited += branches[i].visited;
        if (branches[i].choice.empty()) continue;
        if (best == grid.size() || branches[i].score < branches[best].score) best = i;
    }
    if (best == grid.size()) throw InfeasibleConstraints("exhaustive_search: no feasible placement on the grid");

    std::vector<Position> pts;
    for (std::size_t i : branches[best].choice) pts.push_back(grid[i]);
    return finalize(model, ArrayLayout(dim, std::move(pts)), constraints, visited, true, {});
}

}  // namespace masim

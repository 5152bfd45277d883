#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>

#include "masim/errors.hpp"
#include "masim/parallel.hpp"
#include "masim/rng.hpp"
#include "masim/scenario.hpp"

namespace masim {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

Direction direction_of(const TerminalSpec& t, int dim) {
    if (!t.theta_deg) throw ConfigError("rx", "expected a direction (theta_deg)");
    if (dim == 1) return Direction::from_theta_deg(*t.theta_deg);
    return Direction::planar_angle(*t.theta_deg * kPi / 180.0);
}

std::vector<Direction> directions_of(const std::vector<TerminalSpec>& ts, int dim, const char* field) {
    std::vector<Direction> out;
    for (const auto& t : ts) {
        if (!t.theta_deg) throw ConfigError(field, "expected directions (theta_deg)");
        out.push_back(direction_of(t, dim));
    }
    return out;
}

ChannelSource source_of(const TerminalSpec& t, int dim, AmplitudeModel amp) {
    if (t.polar) return NearFieldSource{*t.polar, amp};
    return direction_of(t, dim);
}

ObjectiveSpec secrecy_spec(const ScenarioConfig& cfg, const LinkBudget& budget) {
    if (cfg.rx.polar) {
        std::vector<PolarLocation> eves;
        for (const auto& e : cfg.eavesdroppers) eves.push_back(*e.polar);
        return ObjectiveSpec::secrecy_near_field(*cfg.rx.polar, std::move(eves), budget, cfg.amplitude);
    }
    return ObjectiveSpec::secrecy_far_field(direction_of(cfg.rx, cfg.region_dim),
                                           directions_of(cfg.eavesdroppers, cfg.region_dim, "eavesdroppers"), budget);
}

json layout_json(const ArrayLayout& layout) { return to_json(OptimizationResult{layout, Weights::normalized(Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(layout.size()))), 0.0, 0, true, {}})["positions_m"]; }

std::vector<double> theta_grid(double step) {
    const auto count = static_cast<std::size_t>(std::llround(std::floor(180.0 / step + 1e-9))) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = std::min(180.0, static_cast<double>(i) * step);
    return grid;
}

class ReportWriter {
public:
    ReportWriter(const ScenarioConfig& cfg, std::string command, const fs::path& out_dir)
        : cfg_(cfg), out_dir_(out_dir), start_(std::chrono::steady_clock::now()) {
        report_.command = std::move(command);
        fs::create_directories(out_dir_);
    }

    void emit(const std::string& name, const std::string& content) {
        std::ofstream out(out_dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + (out_dir_ / name).string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("failed writing " + (out_dir_ / name).string());
        report_.files.push_back({name, sha256_hex(content), content.size()});
    }

    ExperimentReport finish(json summary, json notes) {
        report_.summary = std::move(summary);
        report_.wall_clock_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json files = json::array();
        for (const auto& f : report_.files) files.push_back({{"path", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
        const json doc = {
            {"command", report_.command},
            {"config", cfg_.source},
            {"resolved", cfg_.resolved()},
            {"seed", cfg_.params.seed},
            {"rng", kRngAlgorithm},
            {"files", files},
            {"summary", report_.summary},
            {"notes", std::move(notes)},
            {"timings", {{"wall_clock_s", report_.wall_clock_s}, {"workers", worker_count()}}},
        };
        std::ofstream out(out_dir_ / "report.json", std::ios::binary | std::ios::trunc);
        out << doc.dump(2) << '\n';
        if (!out) throw Error("failed writing report.json");
        return report_;
    }

private:
    const ScenarioConfig& cfg_;
    fs::path out_dir_;
    std::chrono::steady_clock::time_point start_;
    ExperimentReport report_;
};

double raw_peak(const ArrayLayout& layout, const Weights& w, std::span<const Position> grid, const CarrierSpec& carrier,
                AmplitudeModel amp) {
    std::vector<double> gains(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { gains[i] = beam_gain(w, nearfield_response_at(layout, grid[i], carrier, amp)); });
    return *std::max_element(gains.begin(), gains.end());
}

std::size_t ceil_sqrt(std::size_t m) {
    std::size_t c = 1;
    while (c * c < m) ++c;
    return c;
}

std::string extent_label(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

// Fixed arrays are evaluated in place with MRT weights.
OptimizationResult evaluate_fixed(const ScenarioConfig& cfg, const ObjectiveSpec& spec,
                                  const PlacementConstraints& constraints) {
    const double s = cfg.tx_array.spacing_wavelengths * cfg.wavelength();
    if (cfg.tx_array.mode == "ula" && cfg.region_dim != 1) throw ConfigError("tx_array.mode", "ula needs a 1D region");
    if (cfg.tx_array.mode == "upa" && cfg.region_dim != 2) throw ConfigError("tx_array.mode", "upa needs a 2D region");
    auto layout = cfg.tx_array.mode == "ula" ? make_ula(cfg.tx_array.n, s) : make_upa(cfg.tx_array.rows, cfg.tx_array.cols, s);
    if (!validate_layout(layout, constraints).ok())
        throw ConfigError("tx_array", "fixed array does not fit the region at the minimum spacing");
    const ObjectiveModel model(spec, cfg.carrier(), cfg.region_dim);
    const double value = model.evaluate(layout);
    return {layout, mrt_weights(model.target_channel(layout)), value, 0, true, {}};
}

}  // namespace

ObjectiveSpec objective_from_config(const ScenarioConfig& cfg) {
    const int dim = cfg.region_dim;
    std::string kind = cfg.objective;
    if (kind == "auto") kind = (cfg.rx.is_direction() && dim == 1) ? "null_depth" : "secrecy";

    if (kind == "null_depth") {
        if (!cfg.rx.is_direction()) throw ConfigError("objective", "null_depth needs a direction for rx");
        auto nulls = directions_of(cfg.eavesdroppers, dim, "eavesdroppers");
        for (auto& d : directions_of(cfg.jammers, dim, "jammers")) nulls.push_back(d);
        return ObjectiveSpec::null_depth(direction_of(cfg.rx, dim), std::move(nulls));
    }
    if (kind == "secrecy") return secrecy_spec(cfg, cfg.budget);

    std::vector<ChannelSource> eves;
    for (const auto& e : cfg.eavesdroppers) eves.push_back(source_of(e, dim, cfg.amplitude));
    for (const auto& e : cfg.jammers) eves.push_back(source_of(e, dim, cfg.amplitude));
    return ObjectiveSpec::leakage(source_of(cfg.rx, dim, cfg.amplitude), std::move(eves));
}

OptimizationResult run_method(const ScenarioConfig& cfg, const ObjectiveSpec& spec, std::size_t n,
                              const PlacementConstraints& constraints) {
    const auto params = cfg.resolved_params();
    const auto carrier = cfg.carrier();
    const std::string& m = cfg.method;
    if (m == "gradient") {
        const auto* nd = std::get_if<NullDepth>(&spec.kind);
        if (!nd || constraints.region().dim() != 1)
            throw ConfigError("optimizer.method", "gradient needs a null_depth objective on a 1D region");
        return beam_nulling_optimize(*nd, n, carrier, constraints, params);
    }
    if (m == "greedy") return greedy_sequential_placement(spec, n, carrier, constraints, params);
    if (m == "pso") return pso_optimize(spec, n, carrier, constraints, params);
    if (m == "exhaustive") return exhaustive_search(spec, n, carrier, constraints, params);
    if (m == "alternating") {
        if (constraints.region().dim() != 1)
            throw ConfigError("optimizer.method", "alternating needs a 1D region");
        auto start = project_to_feasible(uniform_spread(n, constraints.region()), constraints);
        const ObjectiveModel model(spec, carrier, 1);
        OptimizationResult init{start, mrt_weights(model.target_channel(start)), model.evaluate(start), 0, false, {}};
        return alternating_apv_awv(spec, init, carrier, constraints, params);
    }
    throw ConfigError("optimizer.method", "unknown method " + m);
}

std::vector<Position> focus_grid(const ScenarioConfig& cfg) {
    std::vector<Position> targets;
    if (!cfg.rx.polar) throw ConfigError("rx", "focus maps need a polar rx location");
    targets.push_back(cfg.rx.polar->cartesian());
    double dmax = cfg.rx.polar->d_m;
    for (const auto& e : cfg.eavesdroppers) {
        targets.push_back(e.polar->cartesian());
        dmax = std::max(dmax, e.polar->d_m);
    }
    double xmin = targets[0].x, xmax = xmin, ymin = targets[0].y, ymax = ymin;
    for (const auto& p : targets) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 0.2 * dmax});
    const double side = 2.0 * span;
    const double x0 = 0.5 * (xmin + xmax) - 0.5 * side;
    const double y0 = 0.5 * (ymin + ymax) - 0.5 * side;
    const std::size_t s = cfg.focus_samples;
    const double cell = side / static_cast<double>(s);
    std::vector<Position> grid;
    grid.reserve(s * s);
    for (std::size_t r = 0; r < s; ++r) {
        for (std::size_t c = 0; c < s; ++c)
            grid.push_back({x0 + (static_cast<double>(c) + 0.5) * cell, y0 + (static_cast<double>(r) + 0.5) * cell});
    }
    return grid;
}

BeampatternResult compute_beampattern(const ScenarioConfig& cfg) {
    if (cfg.region_dim != 1) throw ConfigError("region.dim", "beampattern needs a 1D region");
    const auto carrier = cfg.carrier();
    const std::size_t n = cfg.tx_array.n;
    const auto target = direction_of(cfg.rx, 1);
    const auto eves = directions_of(cfg.eavesdroppers, 1, "eavesdroppers");

    auto fpa = make_ula(n, cfg.tx_array.spacing_wavelengths * carrier.wavelength());
    const auto h0 = steering_vector(fpa, target, carrier);
    std::vector<ChannelVector> nulls;
    for (const auto& e : eves) nulls.push_back(steering_vector(fpa, e, carrier));
    auto w_zf = zf_weights(h0, nulls);
    const double fraction = beam_gain(w_zf, h0) / static_cast<double>(n);

    const auto grid = theta_grid(cfg.theta_step_deg);
    auto fpa_pattern = beam_pattern(fpa, w_zf, grid, carrier);

    OptimizationResult ma = eves.empty()
                                ? OptimizationResult{fpa, mrt_weights(h0), 0.0, 0, true, {}}
                                : run_method(cfg, ObjectiveSpec::null_depth(target, eves), n, cfg.constraints());
    auto ma_pattern = beam_pattern(ma.layout, ma.weights, grid, carrier);
    return {std::move(fpa), std::move(w_zf), std::move(fpa_pattern), std::move(ma), std::move(ma_pattern), fraction};
}

std::vector<FocusmapEntry> compute_focusmap(const ScenarioConfig& cfg) {
    if (cfg.region_dim != 2) throw ConfigError("region.dim", "focusmap needs a 2D region");
    if (!cfg.rx.polar) throw ConfigError("rx", "focusmap needs a polar rx location");
    const auto carrier = cfg.carrier();
    const auto grid = focus_grid(cfg);
    const auto spec = secrecy_spec(cfg, cfg.budget);

    std::vector<FocusmapEntry> out;
    for (double extent : cfg.focus_extents_wavelengths) {
        auto placement = run_method(cfg, spec, cfg.tx_array.n, cfg.constraints_for_extent(extent));
        auto map = focus_map(placement.layout, placement.weights, grid, carrier, cfg.map_amplitude);
        const std::size_t cells = static_cast<std::size_t>(std::count_if(
            map.gains_db.begin(), map.gains_db.end(), [](double db) { return std::pow(10.0, db / 10.0) > 0.5; }));

        double eve_db = kDbFloor;
        if (!cfg.eavesdroppers.empty()) {
            const double peak = raw_peak(placement.layout, placement.weights, grid, carrier, cfg.map_amplitude);
            for (const auto& e : cfg.eavesdroppers) {
                const double g =
                    beam_gain(placement.weights, nearfield_response(placement.layout, *e.polar, carrier, cfg.map_amplitude));
                eve_db = std::max(eve_db, g > 0.0 ? 10.0 * std::log10(g / peak) : kDbFloor);
            }
        }
        const double ap = aperture(placement.layout);
        out.push_back({extent, std::move(placement), std::move(map), cells, eve_db, ap, rayleigh_distance(ap, carrier)});
    }
    return out;
}

std::vector<SweepRow> compute_secrecy_sweep(const ScenarioConfig& cfg) {
    if (cfg.region_dim != 2) throw ConfigError("region.dim", "secrecy sweep needs a 2D region");
    const auto carrier = cfg.carrier();
    const double lambda = carrier.wavelength();
    const double extent = cfg.extent_wavelengths * lambda;
    const auto constraints = cfg.constraints();

    std::vector<SweepRow> rows;
    for (std::size_t m : cfg.sweep_m_values) {
        const auto [r, c] = near_square(m);
        const auto sparse = make_upa(r, c, extent / static_cast<double>(ceil_sqrt(m)));
        const auto dense = make_upa(r, c, cfg.tx_array.spacing_wavelengths * lambda);
        for (double p : cfg.sweep_power_dbm) {
            const LinkBudget budget{p, cfg.budget.noise_power_dbm};
            const auto spec = secrecy_spec(cfg, budget);
            const ObjectiveModel model(spec, carrier, 2);
            const auto ma = run_method(cfg, spec, m, constraints);
            rows.push_back({m, p, ma.objective_value, model.evaluate(sparse), model.evaluate(dense)});
        }
    }
    return rows;
}

ExperimentReport run_beampattern(const ScenarioConfig& cfg, const fs::path& out_dir) {
    ReportWriter writer(cfg, "beampattern", out_dir);
    const auto res = compute_beampattern(cfg);
    writer.emit(cfg.out_beampattern_fpa, beam_pattern_csv(res.fpa));
    writer.emit(cfg.out_beampattern_ma, beam_pattern_csv(res.ma_pattern));

    const auto carrier = cfg.carrier();
    const auto target = direction_of(cfg.rx, 1);
    const auto eves = directions_of(cfg.eavesdroppers, 1, "eavesdroppers");
    const double ma_target = beam_gain(res.ma.weights, steering_vector(res.ma.layout, target, carrier));
    json null_levels = json::array();
    std::vector<ChannelVector> fpa_eves, ma_eves;
    for (const auto& e : eves) {
        const auto h = steering_vector(res.ma.layout, e, carrier);
        const double g = beam_gain(res.ma.weights, h);
        null_levels.push_back(g > 0.0 ? std::max(10.0 * std::log10(g / ma_target), kDbFloor) : kDbFloor);
        ma_eves.push_back(h);
        fpa_eves.push_back(steering_vector(res.fpa_layout, e, carrier));
    }
    json summary = {
        {"fpa_gain_fraction", res.fpa_gain_fraction},
        {"fpa_gain_loss", 1.0 - res.fpa_gain_fraction},
        {"fpa_layout_m", layout_json(res.fpa_layout)},
        {"ma_layout_m", layout_json(res.ma.layout)},
        {"ma_objective", res.ma.objective_value},
        {"ma_converged", res.ma.converged},
        {"ma_iterations", res.ma.iterations},
        {"ma_target_gain", ma_target},
        {"ma_null_levels_db", null_levels},
        {"theta_grid_points", res.fpa.theta_grid_deg.size()},
    };
    if (!eves.empty()) {
        summary["fpa_adversary_rank"] = adversary_subspace_rank(fpa_eves);
        summary["ma_adversary_rank"] = adversary_subspace_rank(ma_eves);
    }
    return writer.finish(summary, {"FPA: ULA with zero-forcing weights; MA: optimized positions with MRT weights",
                                   "pattern values below -160 dB are clamped"});
}

ExperimentReport run_focusmap(const ScenarioConfig& cfg, const fs::path& out_dir) {
    ReportWriter writer(cfg, "focusmap", out_dir);
    const auto entries = compute_focusmap(cfg);
    json per_extent = json::array();
    for (const auto& e : entries) {
        const std::string name = cfg.out_focusmap_prefix + extent_label(e.extent_wavelengths) + ".csv";
        writer.emit(name, focus_map_csv(e.map));
        per_extent.push_back({
            {"extent_wavelengths", e.extent_wavelengths},
            {"file", name},
            {"focal_cells_3db", e.focal_cells},
            {"eve_gain_db", e.eve_gain_db},
            {"secrecy_rate", e.placement.objective_value},
            {"aperture_m", e.aperture_m},
            {"rayleigh_distance_m", e.rayleigh_distance_m},
            {"layout_m", layout_json(e.placement.layout)},
        });
    }
    return writer.finish({{"extents", per_extent}, {"samples_per_axis", cfg.focus_samples}},
                         {"heat maps use the map_amplitude model and are normalized to their own peak",
                          "placements maximize the secrecy rate with MRT weights toward rx"});
}

ExperimentReport run_secrecy_sweep(const ScenarioConfig& cfg, const fs::path& out_dir) {
    ReportWriter writer(cfg, "secrecy", out_dir);
    const auto rows = compute_secrecy_sweep(cfg);
    writer.emit(cfg.out_secrecy, secrecy_sweep_csv(rows));
    json table = json::array();
    for (const auto& r : rows)
        table.push_back({{"m", r.m}, {"power_dbm", r.power_dbm}, {"rs_ma", r.rs_ma}, {"rs_sparse", r.rs_sparse},
                         {"rs_dense", r.rs_dense}});
    return writer.finish({{"rows", table}},
                         {"dense FPA: near-square UPA at tx_array.spacing_wavelengths",
                          "sparse FPA: near-square UPA with spacing A / ceil(sqrt(M))",
                          "MA: positions re-optimized for every (M, power) pair"});
}

ExperimentReport run_optimize(const ScenarioConfig& cfg, const fs::path& out_dir) {
    ReportWriter writer(cfg, "optimize", out_dir);
    const auto spec = objective_from_config(cfg);
    const auto constraints = cfg.constraints();
    OptimizationResult result = cfg.tx_array.mode == "ma"
                                    ? run_method(cfg, spec, cfg.tx_array.n, constraints)
                                    : evaluate_fixed(cfg, spec, constraints);
    json doc = to_json(result);
    doc["method"] = cfg.tx_array.mode == "ma" ? cfg.method : "fixed";
    writer.emit(cfg.out_optimize, doc.dump(2) + "\n");
    return writer.finish({{"objective_value", result.objective_value},
                          {"converged", result.converged},
                          {"iterations", result.iterations}},
                         json::array());
}

}  // namespace masim

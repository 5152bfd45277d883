#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "masim/errors.hpp"
#include "masim/scenario.hpp"

namespace masim {

namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!ok.count(key)) throw ConfigError(join(path, key), "unknown field");
    }
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& path, const char* key) {
    const json* v = find(j, key);
    if (!v) throw ConfigError(join(path, key), "missing required field");
    return *v;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
    return d;
}

double positive(const json& v, const std::string& path) {
    const double d = number(v, path);
    if (!(d > 0.0)) throw ConfigError(path, "must be positive");
    return d;
}

std::size_t count(const json& v, const std::string& path, std::size_t min = 1) {
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min))
        throw ConfigError(path, "expected an integer >= " + std::to_string(min));
    return v.get<std::size_t>();
}

std::string text(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

bool flag(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
    return v.get<bool>();
}

TerminalSpec terminal(const json& j, const std::string& path) {
    only_keys(j, path, {"theta_deg", "polar"});
    TerminalSpec t;
    const json* theta = find(j, "theta_deg");
    const json* polar = find(j, "polar");
    if (!!theta == !!polar) throw ConfigError(path, "give exactly one of theta_deg or polar");
    if (theta) {
        const double deg = number(*theta, join(path, "theta_deg"));
        if (deg < 0.0 || deg > 180.0) throw ConfigError(join(path, "theta_deg"), "must lie in [0, 180]");
        t.theta_deg = deg;
    } else {
        const std::string p = join(path, "polar");
        only_keys(*polar, p, {"d_m", "phi_rad"});
        t.polar = PolarLocation{positive(require(*polar, p, "d_m"), join(p, "d_m")),
                                number(require(*polar, p, "phi_rad"), join(p, "phi_rad"))};
    }
    return t;
}

std::vector<TerminalSpec> terminals(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array");
    std::vector<TerminalSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(terminal(j[i], index_path(path, i)));
    return out;
}

AmplitudeModel amplitude(const json& v, const std::string& path) {
    const auto s = text(v, path);
    if (s == "free_space") return AmplitudeModel::free_space;
    if (s == "unit") return AmplitudeModel::unit;
    throw ConfigError(path, "expected \"free_space\" or \"unit\"");
}

const char* amplitude_name(AmplitudeModel a) { return a == AmplitudeModel::unit ? "unit" : "free_space"; }

json terminal_json(const TerminalSpec& t) {
    if (t.theta_deg) return {{"theta_deg", *t.theta_deg}};
    return {{"polar", {{"d_m", t.polar->d_m}, {"phi_rad", t.polar->phi_rad}}}};
}

void parse_optimizer(const json& j, ScenarioConfig& cfg) {
    const std::string path = "optimizer";
    only_keys(j, path, {"method", "seed", "params"});
    if (const json* m = find(j, "method")) {
        cfg.method = text(*m, join(path, "method"));
        bool known = false;
        for (const char* name : kMethods) known = known || cfg.method == name;
        if (!known)
            throw ConfigError(join(path, "method"),
                              "unknown method \"" + cfg.method + "\"; allowed: gradient, greedy, pso, alternating, exhaustive");
    }
    if (const json* s = find(j, "seed")) {
        if (!s->is_number_unsigned()) throw ConfigError(join(path, "seed"), "expected a non-negative integer");
        cfg.params.seed = s->get<std::uint64_t>();
    }
    const json* p = find(j, "params");
    if (!p) return;
    const std::string pp = join(path, "params");
    only_keys(*p, pp,
              {"grid_points_per_wavelength", "multistarts", "max_iterations", "step_init_wavelengths", "step_shrink",
               "tolerance", "refine", "use_coupling", "pso"});
    auto& op = cfg.params;
    if (const json* v = find(*p, "grid_points_per_wavelength"))
        op.grid_points_per_wavelength = positive(*v, join(pp, "grid_points_per_wavelength"));
    if (const json* v = find(*p, "multistarts")) op.multistarts = count(*v, join(pp, "multistarts"));
    if (const json* v = find(*p, "max_iterations")) op.max_iterations = count(*v, join(pp, "max_iterations"), 0);
    if (const json* v = find(*p, "step_init_wavelengths"))
        cfg.step_init_wavelengths = positive(*v, join(pp, "step_init_wavelengths"));
    if (const json* v = find(*p, "step_shrink")) {
        op.step_shrink = number(*v, join(pp, "step_shrink"));
        if (!(op.step_shrink > 0.0 && op.step_shrink < 1.0))
            throw ConfigError(join(pp, "step_shrink"), "must lie in (0, 1)");
    }
    if (const json* v = find(*p, "tolerance")) op.tolerance = positive(*v, join(pp, "tolerance"));
    if (const json* v = find(*p, "refine")) op.refine = flag(*v, join(pp, "refine"));
    if (const json* v = find(*p, "use_coupling")) op.use_coupling = flag(*v, join(pp, "use_coupling"));
    if (const json* s = find(*p, "pso")) {
        const std::string ps = join(pp, "pso");
        only_keys(*s, ps,
                  {"swarm_size", "inertia", "cognitive", "social", "velocity_clamp", "stall_iterations", "snap_to_grid"});
        if (const json* v = find(*s, "swarm_size")) op.pso.swarm_size = count(*v, join(ps, "swarm_size"), 2);
        if (const json* v = find(*s, "inertia")) op.pso.inertia = number(*v, join(ps, "inertia"));
        if (const json* v = find(*s, "cognitive")) op.pso.cognitive = number(*v, join(ps, "cognitive"));
        if (const json* v = find(*s, "social")) op.pso.social = number(*v, join(ps, "social"));
        if (const json* v = find(*s, "velocity_clamp")) op.pso.velocity_clamp = positive(*v, join(ps, "velocity_clamp"));
        if (const json* v = find(*s, "stall_iterations"))
            op.pso.stall_iterations = count(*v, join(ps, "stall_iterations"));
        if (const json* v = find(*s, "snap_to_grid")) op.pso.snap_to_grid = flag(*v, join(ps, "snap_to_grid"));
    }
}

}  // namespace

CarrierSpec ScenarioConfig::carrier() const { return CarrierSpec::from_frequency(frequency_hz); }

PlacementConstraints ScenarioConfig::constraints_for_extent(double extent_wl) const {
    const double lambda = wavelength();
    const double extent = extent_wl * lambda;
    std::optional<CLMACoupling> c;
    if (coupling) {
        const MovingRegion line(1, extent);
        c = CLMACoupling{uniform_spread(coupling->first, line).xs(), uniform_spread(coupling->second, line).xs()};
    }
    return PlacementConstraints(MovingRegion(region_dim, extent), min_spacing_wavelengths * lambda, std::move(c));
}

PlacementConstraints ScenarioConfig::constraints() const { return constraints_for_extent(extent_wavelengths); }

OptimizerParams ScenarioConfig::resolved_params() const {
    OptimizerParams p = params;
    if (step_init_wavelengths) p.step_init_m = *step_init_wavelengths * wavelength();
    return p;
}

ScenarioConfig parse_config(const json& j) {
    only_keys(j, "",
              {"carrier", "region", "tx_array", "rx", "eavesdroppers", "jammers", "budget", "objective", "amplitude",
               "map_amplitude", "optimizer", "beampattern", "focusmap", "sweep", "outputs"});
    ScenarioConfig cfg;
    cfg.source = j;

    const json& carrier = require(j, "", "carrier");
    only_keys(carrier, "carrier", {"frequency_hz"});
    cfg.frequency_hz = positive(require(carrier, "carrier", "frequency_hz"), "carrier.frequency_hz");

    const json& region = require(j, "", "region");
    only_keys(region, "region", {"dim", "extent_wavelengths", "min_spacing_wavelengths", "coupling"});
    const json& dim = require(region, "region", "dim");
    if (!dim.is_number_integer() || (dim.get<int>() != 1 && dim.get<int>() != 2))
        throw ConfigError("region.dim", "must be 1 or 2");
    cfg.region_dim = dim.get<int>();
    cfg.extent_wavelengths = positive(require(region, "region", "extent_wavelengths"), "region.extent_wavelengths");
    if (const json* s = find(region, "min_spacing_wavelengths")) {
        cfg.min_spacing_wavelengths = number(*s, "region.min_spacing_wavelengths");
        if (cfg.min_spacing_wavelengths < 0.0) throw ConfigError("region.min_spacing_wavelengths", "must be >= 0");
    }
    if (const json* c = find(region, "coupling")) {
        only_keys(*c, "region.coupling", {"rows", "cols"});
        if (cfg.region_dim != 2) throw ConfigError("region.coupling", "cross-linked tracks need a 2D region");
        cfg.coupling = std::make_pair(count(require(*c, "region.coupling", "rows"), "region.coupling.rows"),
                                      count(require(*c, "region.coupling", "cols"), "region.coupling.cols"));
    }

    const json& tx = require(j, "", "tx_array");
    only_keys(tx, "tx_array", {"mode", "n", "rows", "cols", "spacing_wavelengths"});
    cfg.tx_array.mode = text(require(tx, "tx_array", "mode"), "tx_array.mode");
    if (cfg.tx_array.mode != "ma" && cfg.tx_array.mode != "ula" && cfg.tx_array.mode != "upa")
        throw ConfigError("tx_array.mode", "expected \"ma\", \"ula\" or \"upa\"");
    if (const json* v = find(tx, "spacing_wavelengths"))
        cfg.tx_array.spacing_wavelengths = positive(*v, "tx_array.spacing_wavelengths");
    if (cfg.tx_array.mode == "upa") {
        cfg.tx_array.rows = count(require(tx, "tx_array", "rows"), "tx_array.rows");
        cfg.tx_array.cols = count(require(tx, "tx_array", "cols"), "tx_array.cols");
        cfg.tx_array.n = cfg.tx_array.rows * cfg.tx_array.cols;
    } else {
        cfg.tx_array.n = count(require(tx, "tx_array", "n"), "tx_array.n");
        if (find(tx, "rows") || find(tx, "cols"))
            throw ConfigError("tx_array", "rows/cols only apply to mode \"upa\"");
    }

    cfg.rx = terminal(require(j, "", "rx"), "rx");
    if (const json* e = find(j, "eavesdroppers")) cfg.eavesdroppers = terminals(*e, "eavesdroppers");
    if (const json* e = find(j, "jammers")) cfg.jammers = terminals(*e, "jammers");

    if (const json* b = find(j, "budget")) {
        only_keys(*b, "budget", {"tx_power_dbm", "noise_power_dbm"});
        if (const json* v = find(*b, "tx_power_dbm")) cfg.budget.tx_power_dbm = number(*v, "budget.tx_power_dbm");
        if (const json* v = find(*b, "noise_power_dbm")) cfg.budget.noise_power_dbm = number(*v, "budget.noise_power_dbm");
    }

    if (const json* o = find(j, "objective")) {
        cfg.objective = text(*o, "objective");
        if (cfg.objective != "auto" && cfg.objective != "null_depth" && cfg.objective != "secrecy" &&
            cfg.objective != "leakage")
            throw ConfigError("objective", "expected auto, null_depth, secrecy or leakage");
    }
    if (const json* a = find(j, "amplitude")) cfg.amplitude = amplitude(*a, "amplitude");
    if (const json* a = find(j, "map_amplitude")) cfg.map_amplitude = amplitude(*a, "map_amplitude");

    if (const json* o = find(j, "optimizer")) parse_optimizer(*o, cfg);
    if (cfg.method.empty()) cfg.method = cfg.region_dim == 1 ? "gradient" : "greedy";

    if (const json* b = find(j, "beampattern")) {
        only_keys(*b, "beampattern", {"theta_step_deg"});
        if (const json* v = find(*b, "theta_step_deg")) cfg.theta_step_deg = positive(*v, "beampattern.theta_step_deg");
    }
    if (const json* f = find(j, "focusmap")) {
        only_keys(*f, "focusmap", {"extents_wavelengths", "samples"});
        if (const json* v = find(*f, "extents_wavelengths")) {
            if (!v->is_array() || v->empty()) throw ConfigError("focusmap.extents_wavelengths", "expected a non-empty array");
            for (std::size_t i = 0; i < v->size(); ++i)
                cfg.focus_extents_wavelengths.push_back(positive((*v)[i], index_path("focusmap.extents_wavelengths", i)));
        }
        if (const json* v = find(*f, "samples")) cfg.focus_samples = count(*v, "focusmap.samples", 2);
    }
    if (cfg.focus_extents_wavelengths.empty()) cfg.focus_extents_wavelengths = {cfg.extent_wavelengths};
    if (const json* s = find(j, "sweep")) {
        only_keys(*s, "sweep", {"m_values", "power_dbm"});
        if (const json* v = find(*s, "m_values")) {
            if (!v->is_array() || v->empty()) throw ConfigError("sweep.m_values", "expected a non-empty array");
            cfg.sweep_m_values.clear();
            for (std::size_t i = 0; i < v->size(); ++i)
                cfg.sweep_m_values.push_back(count((*v)[i], index_path("sweep.m_values", i)));
        }
        if (const json* v = find(*s, "power_dbm")) {
            if (!v->is_array() || v->empty()) throw ConfigError("sweep.power_dbm", "expected a non-empty array");
            cfg.sweep_power_dbm.clear();
            for (std::size_t i = 0; i < v->size(); ++i)
                cfg.sweep_power_dbm.push_back(number((*v)[i], index_path("sweep.power_dbm", i)));
        }
    }
    if (const json* o = find(j, "outputs")) {
        only_keys(*o, "outputs", {"beampattern_fpa", "beampattern_ma", "focusmap_prefix", "secrecy", "optimize"});
        auto file = [&](const char* key, std::string& dst) {
            if (const json* v = find(*o, key)) {
                dst = text(*v, join("outputs", key));
                const std::filesystem::path p(dst);
                if (dst.empty() || p.has_parent_path() || p.is_absolute())
                    throw ConfigError(join("outputs", key), "must be a plain file name inside the output directory");
            }
        };
        file("beampattern_fpa", cfg.out_beampattern_fpa);
        file("beampattern_ma", cfg.out_beampattern_ma);
        file("focusmap_prefix", cfg.out_focusmap_prefix);
        file("secrecy", cfg.out_secrecy);
        file("optimize", cfg.out_optimize);
    }

    // Cross-field checks that need the whole record.
    if (cfg.min_spacing_wavelengths > 0.0 && cfg.region_dim == 1 &&
        static_cast<double>(cfg.tx_array.n - 1) * cfg.min_spacing_wavelengths > cfg.extent_wavelengths + 1e-9)
        throw ConfigError("tx_array.n", "too many antennas for the region at the minimum spacing");
    auto same_kind = [&](const TerminalSpec& t, const std::string& path) {
        if (t.is_direction() != cfg.rx.is_direction())
            throw ConfigError(path, "must use the same form (theta_deg or polar) as rx");
    };
    for (std::size_t i = 0; i < cfg.eavesdroppers.size(); ++i)
        same_kind(cfg.eavesdroppers[i], index_path("eavesdroppers", i));
    if (cfg.region_dim == 1 && !cfg.rx.is_direction())
        throw ConfigError("rx", "1D regions take far-field directions (theta_deg)");
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("JSON parse error: ") + e.what());
    }
    return parse_config(j);
}

json ScenarioConfig::resolved() const {
    json eves = json::array();
    for (const auto& e : eavesdroppers) eves.push_back(terminal_json(e));
    json jams = json::array();
    for (const auto& e : jammers) jams.push_back(terminal_json(e));
    const auto p = resolved_params();
    json region = {{"dim", region_dim}, {"extent_wavelengths", extent_wavelengths},
                   {"min_spacing_wavelengths", min_spacing_wavelengths}};
    if (coupling) region["coupling"] = {{"rows", coupling->first}, {"cols", coupling->second}};
    return {
        {"carrier", {{"frequency_hz", frequency_hz}, {"wavelength_m", wavelength()}}},
        {"region", region},
        {"tx_array",
         {{"mode", tx_array.mode}, {"n", tx_array.n}, {"rows", tx_array.rows}, {"cols", tx_array.cols},
          {"spacing_wavelengths", tx_array.spacing_wavelengths}}},
        {"rx", terminal_json(rx)},
        {"eavesdroppers", eves},
        {"jammers", jams},
        {"budget", {{"tx_power_dbm", budget.tx_power_dbm}, {"noise_power_dbm", budget.noise_power_dbm}}},
        {"objective", objective},
        {"amplitude", amplitude_name(amplitude)},
        {"map_amplitude", amplitude_name(map_amplitude)},
        {"optimizer",
         {{"method", method},
          {"seed", p.seed},
          {"params",
           {{"grid_points_per_wavelength", p.grid_density(region_dim)},
            {"multistarts", p.multistarts},
            {"max_iterations", p.max_iterations},
            {"step_init_m", p.step_init(carrier())},
            {"step_shrink", p.step_shrink},
            {"tolerance", p.tolerance},
            {"refine", p.refine},
            {"use_coupling", p.use_coupling},
            {"pso",
             {{"swarm_size", p.pso.swarm_size},
              {"inertia", p.pso.inertia},
              {"cognitive", p.pso.cognitive},
              {"social", p.pso.social},
              {"velocity_clamp", p.pso.velocity_clamp},
              {"stall_iterations", p.pso.stall_iterations},
              {"snap_to_grid", p.pso.snap_to_grid}}}}}}},
        {"beampattern", {{"theta_step_deg", theta_step_deg}}},
        {"focusmap", {{"extents_wavelengths", focus_extents_wavelengths}, {"samples", focus_samples}}},
        {"sweep", {{"m_values", sweep_m_values}, {"power_dbm", sweep_power_dbm}}},
        {"outputs",
         {{"beampattern_fpa", out_beampattern_fpa},
          {"beampattern_ma", out_beampattern_ma},
          {"focusmap_prefix", out_focusmap_prefix},
          {"secrecy", out_secrecy},
          {"optimize", out_optimize}}},
    };
}

}  // namespace masim

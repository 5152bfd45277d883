#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "masim/beamforming.hpp"
#include "masim/optimize.hpp"

namespace masim {

// A user, eavesdropper or jammer: a far-field direction or a polar point.
struct TerminalSpec {
    std::optional<double> theta_deg;
    std::optional<PolarLocation> polar;

    bool is_direction() const noexcept { return theta_deg.has_value(); }
};

struct ArraySpec {
    std::string mode = "ma";  // "ma", "ula" or "upa"
    std::size_t n = 1;
    std::size_t rows = 1;
    std::size_t cols = 1;
    double spacing_wavelengths = 0.5;
};

struct ScenarioConfig {
    double frequency_hz = 0.0;
    int region_dim = 1;
    double extent_wavelengths = 0.0;
    double min_spacing_wavelengths = 0.5;
    std::optional<std::pair<std::size_t, std::size_t>> coupling;  // rows x cols tracks

    ArraySpec tx_array;
    TerminalSpec rx;
    std::vector<TerminalSpec> eavesdroppers;
    std::vector<TerminalSpec> jammers;
    LinkBudget budget;
    std::string objective = "auto";  // auto, null_depth, secrecy, leakage
    AmplitudeModel amplitude = AmplitudeModel::free_space;
    AmplitudeModel map_amplitude = AmplitudeModel::unit;

    std::string method;  // gradient, greedy, pso, alternating, exhaustive
    OptimizerParams params;
    std::optional<double> step_init_wavelengths;

    double theta_step_deg = 0.1;
    std::vector<double> focus_extents_wavelengths;
    std::size_t focus_samples = 200;
    std::vector<std::size_t> sweep_m_values{4, 8, 16, 36, 64};
    std::vector<double> sweep_power_dbm{20.0, 30.0};

    std::string out_beampattern_fpa = "beampattern_fpa.csv";
    std::string out_beampattern_ma = "beampattern_ma.csv";
    std::string out_focusmap_prefix = "focusmap_A";
    std::string out_secrecy = "secrecy_sweep.csv";
    std::string out_optimize = "result.json";

    nlohmann::json source;  // the file as given

    CarrierSpec carrier() const;
    double wavelength() const { return carrier().wavelength(); }
    PlacementConstraints constraints() const;
    PlacementConstraints constraints_for_extent(double extent_wavelengths) const;
    OptimizerParams resolved_params() const;
    nlohmann::json resolved() const;  // every field with defaults applied
};

inline constexpr const char* kMethods[] = {"gradient", "greedy", "pso", "alternating", "exhaustive"};

/// Parses and validates a scenario. Throws ConfigError naming the JSON path.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

struct BeampatternResult {
    ArrayLayout fpa_layout;
    Weights fpa_weights;
    BeamPattern fpa;
    OptimizationResult ma;
    BeamPattern ma_pattern;
    double fpa_gain_fraction;  // |w^H a(theta_0)|^2 / n
};

struct FocusmapEntry {
    double extent_wavelengths;
    OptimizationResult placement;
    FocusMap map;
    std::size_t focal_cells;  // samples above half the peak
    double eve_gain_db;       // strongest eavesdropper relative to the map peak
    double aperture_m;
    double rayleigh_distance_m;
};

struct SweepRow {
    std::size_t m;
    double power_dbm;
    double rs_ma;
    double rs_sparse;
    double rs_dense;
};

BeampatternResult compute_beampattern(const ScenarioConfig& cfg);
std::vector<FocusmapEntry> compute_focusmap(const ScenarioConfig& cfg);
std::vector<SweepRow> compute_secrecy_sweep(const ScenarioConfig& cfg);
ObjectiveSpec objective_from_config(const ScenarioConfig& cfg);
OptimizationResult run_method(const ScenarioConfig& cfg, const ObjectiveSpec& spec, std::size_t n,
                              const PlacementConstraints& constraints);

// Cell-centred square sample grid covering the receiver and every eavesdropper.
std::vector<Position> focus_grid(const ScenarioConfig& cfg);

struct OutputFile {
    std::string name;
    std::string sha256;
    std::size_t bytes;
};

struct ExperimentReport {
    std::string command;
    std::vector<OutputFile> files;
    nlohmann::json summary;
    double wall_clock_s = 0.0;
};

// Each runner writes its artifacts plus report.json into out_dir.
ExperimentReport run_beampattern(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);
ExperimentReport run_focusmap(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);
ExperimentReport run_secrecy_sweep(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);
ExperimentReport run_optimize(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

// Serialization helpers shared with the CLI and tests.
std::string format_double(double v);
std::string beam_pattern_csv(const BeamPattern& p);
std::string focus_map_csv(const FocusMap& m);
std::string secrecy_sweep_csv(const std::vector<SweepRow>& rows);
nlohmann::json to_json(const OptimizationResult& r);
std::string sha256_hex(std::string_view data);

}  // namespace masim

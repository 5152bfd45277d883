#include <array>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include <openssl/evp.h>

#include "masim/scenario.hpp"

namespace masim {

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

std::string beam_pattern_csv(const BeamPattern& p) {
    std::string out = "theta_deg,gain_db\n";
    for (std::size_t i = 0; i < p.theta_grid_deg.size(); ++i) {
        out += format_double(p.theta_grid_deg[i]);
        out += ',';
        out += format_double(std::max(p.gains_db[i], kDbFloor));
        out += '\n';
    }
    return out;
}

std::string focus_map_csv(const FocusMap& m) {
    std::string out = "x_m,y_m,gain_db\n";
    for (std::size_t i = 0; i < m.points.size(); ++i) {
        out += format_double(m.points[i].x);
        out += ',';
        out += format_double(m.points[i].y);
        out += ',';
        out += format_double(std::max(m.gains_db[i], kDbFloor));
        out += '\n';
    }
    return out;
}

std::string secrecy_sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "m,power_dbm,rs_ma,rs_sparse,rs_dense\n";
    for (const auto& r : rows) {
        out += std::to_string(r.m);
        for (double v : {r.power_dbm, r.rs_ma, r.rs_sparse, r.rs_dense}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json to_json(const OptimizationResult& r) {
    nlohmann::json positions = nlohmann::json::array();
    for (const auto& p : r.layout.positions()) {
        if (r.layout.dim() == 1) {
            positions.push_back(p.x);
        } else {
            positions.push_back({p.x, p.y});
        }
    }
    nlohmann::json weights = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.weights.size(); ++i)
        weights.push_back({r.weights.entries()(i).real(), r.weights.entries()(i).imag()});
    return {
        {"dim", r.layout.dim()},
        {"positions_m", positions},
        {"weights", weights},
        {"objective_value", r.objective_value},
        {"iterations", r.iterations},
        {"converged", r.converged},
        {"trace", r.trace},
    };
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    std::string hex;
    hex.reserve(2 * len);
    constexpr char digits[] = "0123456789abcdef";
    for (unsigned int i = 0; i < len; ++i) {
        hex += digits[md[i] >> 4];
        hex += digits[md[i] & 0xF];
    }
    return hex;
}

}  // namespace masim

#pragma once

// Shared generators and reference implementations for the test suites.
// The reference code deliberately avoids the library's own routines so it
// can act as an independent oracle.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "masim/channel.hpp"
#include "masim/geometry.hpp"

namespace masim::testing {

using cd = std::complex<double>;

inline const CarrierSpec kCarrier30 = CarrierSpec::from_frequency(30e9);

class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    cd complex(double scale = 1.0) { return {real(-scale, scale), real(-scale, scale)}; }
    bool coin() { return integer(0, 1) == 1; }

    std::vector<cd> complex_vector(std::size_t n) {
        std::vector<cd> v(n);
        for (auto& c : v) c = complex();
        return v;
    }

    // Sorted 1D layout inside [0, extent] with gaps of at least min_gap.
    std::vector<double> feasible_line(std::size_t n, double extent, double min_gap) {
        const double slack = extent - static_cast<double>(n - 1) * min_gap;
        std::vector<double> cuts(n);
        for (auto& c : cuts) c = real(0.0, slack);
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = cuts[i] + static_cast<double>(i) * min_gap;
        return xs;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

inline std::vector<cd> ref_steering(const std::vector<double>& xs, double theta_deg, double lambda) {
    const double u = std::cos(theta_deg * M_PI / 180.0);
    std::vector<cd> a;
    for (double x : xs) a.push_back(std::polar(1.0, 2.0 * M_PI / lambda * x * u));
    return a;
}

inline std::vector<cd> ref_planar_steering(const std::vector<Position>& ps, double ux, double uy, double lambda) {
    std::vector<cd> a;
    for (const auto& p : ps) a.push_back(std::polar(1.0, 2.0 * M_PI / lambda * (p.x * ux + p.y * uy)));
    return a;
}

inline std::vector<cd> ref_nearfield(const std::vector<Position>& ps, double d, double phi, double lambda, bool free_space) {
    const double tx = d * std::cos(phi), ty = d * std::sin(phi);
    std::vector<cd> h;
    for (const auto& p : ps) {
        const double r = std::hypot(p.x - tx, p.y - ty);
        const double g = free_space ? lambda / (4.0 * M_PI * r) : 1.0;
        h.push_back(std::polar(g, -2.0 * M_PI * r / lambda));
    }
    return h;
}

// Inner product a^H b.
inline cd dot(const std::vector<cd>& a, const std::vector<cd>& b) {
    cd s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double energy(const std::vector<cd>& a) { return std::real(dot(a, a)); }

// Null depth from the definition: sum of |a0^H ak|^2 / n^2.
inline double ref_null_depth(const std::vector<double>& xs, double theta0, const std::vector<double>& nulls, double lambda) {
    const auto a0 = ref_steering(xs, theta0, lambda);
    double s = 0.0;
    for (double t : nulls) s += std::norm(dot(a0, ref_steering(xs, t, lambda)));
    const double n = static_cast<double>(xs.size());
    return s / (n * n);
}

// Zero-forcing weights by modified Gram-Schmidt on the null channels.
inline std::vector<cd> ref_zf(const std::vector<cd>& h0, const std::vector<std::vector<cd>>& nulls) {
    std::vector<std::vector<cd>> basis;
    double scale = 0.0;
    for (const auto& v : nulls) scale = std::max(scale, std::sqrt(energy(v)));
    for (auto v : nulls) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                const cd c = dot(q, v);
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
            }
        }
        const double nv = std::sqrt(energy(v));
        if (nv <= 1e-10 * scale) continue;
        for (auto& x : v) x /= nv;
        basis.push_back(v);
    }
    auto w = h0;
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) {
            const cd c = dot(q, w);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
        }
    }
    const double nw = std::sqrt(energy(w));
    for (auto& x : w) x /= nw;
    return w;
}

// Near-field secrecy rate written out from SNR definitions.
inline double ref_secrecy_nf(const std::vector<Position>& ps, PolarLocation rx, const std::vector<PolarLocation>& eves,
                             double tx_dbm, double noise_dbm, double lambda, bool free_space) {
    const auto hb = ref_nearfield(ps, rx.d_m, rx.phi_rad, lambda, free_space);
    const double nb = std::sqrt(energy(hb));
    std::vector<cd> w = hb;
    for (auto& x : w) x /= nb;
    const double scale = std::pow(10.0, (tx_dbm - noise_dbm) / 10.0);
    const double gb = scale * std::norm(dot(w, hb));
    double ge = 0.0;
    for (const auto& e : eves) ge = std::max(ge, scale * std::norm(dot(w, ref_nearfield(ps, e.d_m, e.phi_rad, lambda, free_space))));
    return std::max(0.0, std::log2(1.0 + gb) - std::log2(1.0 + ge));
}

inline std::vector<cd> to_std(const ChannelVector& h) {
    std::vector<cd> v(static_cast<std::size_t>(h.size()));
    for (Eigen::Index i = 0; i < h.size(); ++i) v[static_cast<std::size_t>(i)] = h[i];
    return v;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("masim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace masim::testing

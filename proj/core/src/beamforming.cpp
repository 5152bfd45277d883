#include "masim/beamforming.hpp"

#include <algorithm>
#include <cmath>

#include "masim/errors.hpp"
#include "masim/parallel.hpp"

namespace masim {

namespace {

constexpr double kPinvCutoff = 1e-12;
constexpr double kDegenerateTarget = 1e-12;

double to_db(double ratio) {
    if (!(ratio > 0.0)) return kDbFloor;
    return std::max(10.0 * std::log10(ratio), kDbFloor);
}

std::vector<double> normalize_db(const std::vector<double>& gains, const char* what) {
    const double peak = *std::max_element(gains.begin(), gains.end());
    if (!(peak > 0.0)) throw InvalidArgument(std::string(what) + ": gain is zero at every sample");
    std::vector<double> out(gains.size());
    for (std::size_t i = 0; i < gains.size(); ++i) out[i] = gains[i] == peak ? 0.0 : to_db(gains[i] / peak);
    return out;
}

}  // namespace

Weights Weights::normalized(Eigen::VectorXcd v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("weights: cannot normalize a zero vector");
    v /= n;
    return Weights(std::move(v));
}

Weights mrt_weights(const ChannelVector& h) {
    if (h.norm() == 0.0) throw InvalidArgument("mrt_weights: zero channel");
    return Weights::normalized(h.entries());
}

Weights zf_weights(const ChannelVector& h0, std::span<const ChannelVector> nulls) {
    const Eigen::Index n = h0.size();
    if (h0.norm() == 0.0) throw InvalidArgument("zf_weights: zero target channel");
    if (static_cast<Eigen::Index>(nulls.size()) >= n)
        throw InvalidArgument("zf_weights: need fewer null channels than antennas");
    if (nulls.empty()) return mrt_weights(h0);

    Eigen::MatrixXcd a(n, static_cast<Eigen::Index>(nulls.size()));
    for (std::size_t k = 0; k < nulls.size(); ++k) {
        if (nulls[k].size() != n) throw InvalidArgument("zf_weights: length mismatch");
        a.col(static_cast<Eigen::Index>(k)) = nulls[k].entries();
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = kPinvCutoff * (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::VectorXcd projected = h0.entries();
    // Second pass removes what rounding left in the null span after the first.
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > cutoff) {
                const auto u = svd.matrixU().col(i);
                projected -= u * u.dot(projected);
            }
        }
    }
    if (projected.norm() <= kDegenerateTarget * h0.norm())
        throw DegenerateTarget("zf_weights: target channel lies in the span of the null channels");

    Eigen::VectorXcd w = projected / projected.norm();
    // Rotate so that w^H h0 is real and positive.
    const cdouble inner = w.dot(h0.entries());
    w *= std::polar(1.0, std::arg(inner));
    return Weights::normalized(std::move(w));
}

double beam_gain(const Weights& w, const ChannelVector& h) {
    if (w.size() != h.size()) throw InvalidArgument("beam_gain: length mismatch");
    return std::norm(w.entries().dot(h.entries()));
}

BeamPattern beam_pattern(const ArrayLayout& layout, const Weights& w, std::span<const double> theta_grid_deg,
                         const CarrierSpec& carrier) {
    if (layout.dim() != 1) throw InvalidArgument("beam_pattern: layout must be 1D");
    if (theta_grid_deg.empty()) throw InvalidArgument("beam_pattern: empty angle grid");
    if (!std::is_sorted(theta_grid_deg.begin(), theta_grid_deg.end()))
        throw InvalidArgument("beam_pattern: angle grid must be sorted");
    if (w.size() != static_cast<Eigen::Index>(layout.size())) throw InvalidArgument("beam_pattern: length mismatch");

    std::vector<double> gains(theta_grid_deg.size());
    std::vector<Direction> dirs;
    dirs.reserve(theta_grid_deg.size());
    for (double t : theta_grid_deg) dirs.push_back(Direction::from_theta_deg(t));
    parallel_for(gains.size(), [&](std::size_t i) { gains[i] = beam_gain(w, steering_vector(layout, dirs[i], carrier)); });

    BeamPattern out;
    out.theta_grid_deg.assign(theta_grid_deg.begin(), theta_grid_deg.end());
    out.gains_db = normalize_db(gains, "beam_pattern");
    return out;
}

FocusMap focus_map(const ArrayLayout& layout, const Weights& w, std::span<const Position> grid,
                   const CarrierSpec& carrier, AmplitudeModel amp) {
    if (layout.dim() != 2) throw InvalidArgument("focus_map: layout must be 2D");
    if (grid.empty()) throw InvalidArgument("focus_map: empty sample grid");
    if (w.size() != static_cast<Eigen::Index>(layout.size())) throw InvalidArgument("focus_map: length mismatch");

    std::vector<double> gains(grid.size());
    parallel_for(gains.size(), [&](std::size_t i) {
        gains[i] = beam_gain(w, nearfield_response_at(layout, grid[i], carrier, amp));
    });

    FocusMap out;
    out.points.assign(grid.begin(), grid.end());
    out.gains_db = normalize_db(gains, "focus_map");
    return out;
}

double snr_scale(const LinkBudget& budget) {
    if (!std::isfinite(budget.tx_power_dbm) || !std::isfinite(budget.noise_power_dbm))
        throw InvalidArgument("link budget powers must be finite");
    return std::pow(10.0, (budget.tx_power_dbm - budget.noise_power_dbm) / 10.0);
}

double snr(const LinkBudget& budget, const Weights& w, const ChannelVector& h) {
    return snr_scale(budget) * beam_gain(w, h);
}

double secrecy_rate(double gamma_b, double gamma_e) {
    if (!(gamma_b >= 0.0) || !(gamma_e >= 0.0)) throw InvalidArgument("secrecy_rate: SNR must be non-negative");
    if (gamma_b <= gamma_e) return 0.0;
    return std::max(0.0, std::log2((1.0 + gamma_b) / (1.0 + gamma_e)));
}

double leakage_power(const Weights& w, std::span<const ChannelVector> eves) {
    double total = 0.0;
    for (const auto& h : eves) total += beam_gain(w, h);
    return total;
}

double adversary_subspace_rank(std::span<const ChannelVector> eves) {
    if (eves.empty()) throw InvalidArgument("adversary_subspace_rank: no channels");
    const Eigen::Index n = eves.front().size();
    Eigen::MatrixXcd h(n, static_cast<Eigen::Index>(eves.size()));
    for (std::size_t k = 0; k < eves.size(); ++k) {
        if (eves[k].size() != n) throw InvalidArgument("adversary_subspace_rank: length mismatch");
        h.col(static_cast<Eigen::Index>(k)) = eves[k].entries();
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(h).singularValues();
    const double total = sv.squaredNorm();
    if (!(total > 0.0)) throw InvalidArgument("adversary_subspace_rank: all channels are zero");
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        const double p = sv(i) * sv(i) / total;
        if (p > 0.0) entropy -= p * std::log(p);
    }
    return std::max(1.0, std::exp(entropy));
}

}  // namespace masim

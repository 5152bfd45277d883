#pragma once

#include <span>
#include <vector>

#include "masim/channel.hpp"
#include "masim/geometry.hpp"

namespace masim {

// Floor applied to normalized dB values so patterns stay finite and plottable.
inline constexpr double kDbFloor = -160.0;

// Unit-norm antenna weight vector.
class Weights {
public:
    // Scales v to unit norm; throws InvalidArgument for the zero vector.
    static Weights normalized(Eigen::VectorXcd v);

    const Eigen::VectorXcd& entries() const noexcept { return entries_; }
    Eigen::Index size() const noexcept { return entries_.size(); }

private:
    explicit Weights(Eigen::VectorXcd v) : entries_(std::move(v)) {}

    Eigen::VectorXcd entries_;
};

struct LinkBudget {
    double tx_power_dbm = 20.0;
    double noise_power_dbm = -80.0;
};

struct BeamPattern {
    std::vector<double> theta_grid_deg;
    std::vector<double> gains_db;
};

struct FocusMap {
    std::vector<Position> points;
    std::vector<double> gains_db;
};

Weights mrt_weights(const ChannelVector& h);

// Zero-forcing: w is proportional to P h0 with P the orthogonal projector onto
// the complement of span(nulls). The span is computed by SVD with a rank cutoff
// of 1e-12 times the largest singular value. w^H h0 is real and positive.
Weights zf_weights(const ChannelVector& h0, std::span<const ChannelVector> nulls);

double beam_gain(const Weights& w, const ChannelVector& h);

// Far-field pattern of a 1D layout over a sorted grid in [0, 180] degrees,
// normalized to a 0 dB peak.
BeamPattern beam_pattern(const ArrayLayout& layout, const Weights& w, std::span<const double> theta_grid_deg,
                         const CarrierSpec& carrier);

// Near-field gain of a 2D layout over arbitrary sample points, normalized to a
// 0 dB peak.
FocusMap focus_map(const ArrayLayout& layout, const Weights& w, std::span<const Position> grid,
                   const CarrierSpec& carrier, AmplitudeModel amp);

// Linear receive SNR P |w^H h|^2 / sigma^2 with powers given in dBm.
double snr(const LinkBudget& budget, const Weights& w, const ChannelVector& h);
double snr_scale(const LinkBudget& budget);

// max(0, log2(1 + gamma_b) - log2(1 + gamma_e)), in bps/Hz.
double secrecy_rate(double gamma_b, double gamma_e);

double leakage_power(const Weights& w, std::span<const ChannelVector> eves);

// exp(Shannon entropy) of the normalized squared singular values of the
// matrix whose columns are the eavesdropper channels.
double adversary_subspace_rank(std::span<const ChannelVector> eves);

}  // namespace masim

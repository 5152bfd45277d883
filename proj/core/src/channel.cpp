#include "masim/channel.hpp"

#include <cmath>

#include "masim/errors.hpp"

namespace masim {

namespace {

constexpr double kAngleTolDeg = 1e-9;
constexpr double kUnitTol = 1e-12;

}  // namespace

CarrierSpec CarrierSpec::from_frequency(double frequency_hz) {
    if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
        throw InvalidArgument("carrier frequency must be positive");
    return CarrierSpec(frequency_hz, kSpeedOfLight / frequency_hz);
}

Direction Direction::from_theta_deg(double theta_deg) {
    if (!(theta_deg >= -kAngleTolDeg && theta_deg <= 180.0 + kAngleTolDeg))
        throw InvalidArgument("direction angle must lie in [0, 180] degrees");
    const double rad = theta_deg * kPi / 180.0;
    return Direction(1, theta_deg, std::cos(rad), 0.0);
}

Direction Direction::planar(double ux, double uy) {
    if (!(std::abs(std::hypot(ux, uy) - 1.0) <= kUnitTol))
        throw InvalidArgument("planar direction must be a unit vector");
    return Direction(2, std::atan2(uy, ux) * 180.0 / kPi, ux, uy);
}

Direction Direction::planar_angle(double phi_rad) {
    if (!std::isfinite(phi_rad)) throw InvalidArgument("planar direction angle must be finite");
    return Direction(2, phi_rad * 180.0 / kPi, std::cos(phi_rad), std::sin(phi_rad));
}

Position PolarLocation::cartesian() const noexcept { return {d_m * std::cos(phi_rad), d_m * std::sin(phi_rad)}; }

ChannelVector::ChannelVector(Eigen::VectorXcd entries) : entries_(std::move(entries)) {
    for (Eigen::Index i = 0; i < entries_.size(); ++i) {
        if (!std::isfinite(entries_(i).real()) || !std::isfinite(entries_(i).imag()))
            throw InvalidArgument("channel entry is not finite");
    }
}

cdouble steering_entry(const Position& p, const Direction& dir, double wavenumber) noexcept {
    return std::polar(1.0, wavenumber * dir.project(p));
}

cdouble nearfield_entry(const Position& p, const Position& target, double wavelength, AmplitudeModel amp) {
    const double d = distance(p, target);
    if (!(d > 0.0)) throw SingularGeometry("receiver coincides with an antenna element");
    const double gain = amp == AmplitudeModel::free_space ? wavelength / (4.0 * kPi * d) : 1.0;
    return std::polar(gain, -2.0 * kPi * d / wavelength);
}

ChannelVector steering_vector(const ArrayLayout& layout, const Direction& dir, const CarrierSpec& carrier) {
    if (dir.dim() != layout.dim()) throw InvalidArgument("steering_vector: direction and layout dimensions differ");
    const double k = carrier.wavenumber();
    Eigen::VectorXcd h(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t m = 0; m < layout.size(); ++m) h(static_cast<Eigen::Index>(m)) = steering_entry(layout[m], dir, k);
    return ChannelVector(std::move(h));
}

ChannelVector nearfield_response_at(const ArrayLayout& layout, const Position& point, const CarrierSpec& carrier,
                                    AmplitudeModel amp) {
    if (layout.dim() != 2) throw InvalidArgument("nearfield_response: layout must be 2D");
    Eigen::VectorXcd h(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t m = 0; m < layout.size(); ++m)
        h(static_cast<Eigen::Index>(m)) = nearfield_entry(layout[m], point, carrier.wavelength(), amp);
    return ChannelVector(std::move(h));
}

ChannelVector nearfield_response(const ArrayLayout& layout, const PolarLocation& loc, const CarrierSpec& carrier,
                                 AmplitudeModel amp) {
    if (!(loc.d_m > 0.0)) throw InvalidArgument("nearfield_response: distance must be positive");
    return nearfield_response_at(layout, loc.cartesian(), carrier, amp);
}

ChannelVector multipath_channel(const ArrayLayout& layout, std::span<const PathSpec> paths, const CarrierSpec& carrier) {
    if (paths.empty()) throw InvalidArgument("multipath_channel: need at least one path");
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.size()));
    for (const auto& path : paths) {
        if (!std::isfinite(path.coeff.real()) || !std::isfinite(path.coeff.imag()))
            throw InvalidArgument("multipath_channel: path coefficient is not finite");
        h += path.coeff * steering_vector(layout, path.direction, carrier).entries();
    }
    return ChannelVector(std::move(h));
}

double channel_correlation(const ChannelVector& h1, const ChannelVector& h2) {
    if (h1.size() != h2.size()) throw InvalidArgument("channel_correlation: length mismatch");
    const double n1 = h1.norm();
    const double n2 = h2.norm();
    if (n1 == 0.0 || n2 == 0.0) throw InvalidArgument("channel_correlation: zero channel");
    const double rho = std::abs(h1.entries().dot(h2.entries())) / (n1 * n2);
    return std::min(rho, 1.0);
}

double rayleigh_distance(double aperture_m, const CarrierSpec& carrier) {
    if (!(aperture_m >= 0.0)) throw InvalidArgument("rayleigh_distance: aperture must be non-negative");
    return 2.0 * aperture_m * aperture_m / carrier.wavelength();
}

}  // namespace masim

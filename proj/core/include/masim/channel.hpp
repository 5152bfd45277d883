#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "masim/geometry.hpp"

namespace masim {

using cdouble = std::complex<double>;

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kPi = 3.14159265358979323846;

class CarrierSpec {
public:
    static CarrierSpec from_frequency(double frequency_hz);

    double frequency() const noexcept { return frequency_; }
    double wavelength() const noexcept { return wavelength_; }
    double wavenumber() const noexcept { return 2.0 * kPi / wavelength_; }

private:
    CarrierSpec(double f, double lambda) : frequency_(f), wavelength_(lambda) {}

    double frequency_;
    double wavelength_;
};

// Far-field direction. 1D arrays use the angle from the positive array axis
// (90 deg is broadside); 2D arrays use a unit vector in the array plane.
class Direction {
public:
    static Direction from_theta_deg(double theta_deg);
    static Direction planar(double ux, double uy);
    static Direction planar_angle(double phi_rad);

    int dim() const noexcept { return dim_; }
    double theta_deg() const noexcept { return theta_deg_; }
    double ux() const noexcept { return ux_; }
    double uy() const noexcept { return uy_; }

    // <p, u>, with u = cos(theta) along the axis for 1D directions.
    double project(const Position& p) const noexcept { return p.x * ux_ + p.y * uy_; }

private:
    Direction(int dim, double theta_deg, double ux, double uy) : dim_(dim), theta_deg_(theta_deg), ux_(ux), uy_(uy) {}

    int dim_;
    double theta_deg_;
    double ux_;
    double uy_;
};

struct PolarLocation {
    double d_m;
    double phi_rad;

    Position cartesian() const noexcept;
};

struct PathSpec {
    Direction direction;
    cdouble coeff;
};

enum class AmplitudeModel { unit, free_space };

class ChannelVector {
public:
    explicit ChannelVector(Eigen::VectorXcd entries);

    const Eigen::VectorXcd& entries() const noexcept { return entries_; }
    Eigen::Index size() const noexcept { return entries_.size(); }
    cdouble operator[](Eigen::Index i) const { return entries_(i); }
    double norm() const { return entries_.norm(); }

private:
    Eigen::VectorXcd entries_;
};

/// Plane-wave response, entry m = exp(+j k <p_m, u>).
ChannelVector steering_vector(const ArrayLayout& layout, const Direction& dir, const CarrierSpec& carrier);

/// Spherical-wave response toward a point in the array plane,
/// entry m = g(d_m) exp(-j k d_m) with g = 1 or lambda / (4 pi d_m).
ChannelVector nearfield_response(const ArrayLayout& layout, const PolarLocation& loc, const CarrierSpec& carrier,
                                 AmplitudeModel amp);

// Same model evaluated at an arbitrary Cartesian point (used by focus maps).
ChannelVector nearfield_response_at(const ArrayLayout& layout, const Position& point, const CarrierSpec& carrier,
                                    AmplitudeModel amp);

/// Field-response multipath channel: sum of coeff_l * steering_vector(dir_l).
ChannelVector multipath_channel(const ArrayLayout& layout, std::span<const PathSpec> paths, const CarrierSpec& carrier);

/// |h1^H h2| / (|h1| |h2|), in [0, 1].
double channel_correlation(const ChannelVector& h1, const ChannelVector& h2);

double rayleigh_distance(double aperture_m, const CarrierSpec& carrier);

// Single-element responses shared by the vector builders and the optimizers'
// incremental evaluators.
cdouble steering_entry(const Position& p, const Direction& dir, double wavenumber) noexcept;
cdouble nearfield_entry(const Position& p, const Position& target, double wavelength, AmplitudeModel amp);

}  // namespace masim

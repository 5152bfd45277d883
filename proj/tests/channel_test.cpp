#include <gtest/gtest.h>

#include "masim/channel.hpp"
#include "masim/errors.hpp"
#include "support.hpp"

using namespace masim;
using masim::testing::Gen;
using masim::testing::kCarrier30;

namespace {

const double kLambda = kCarrier30.wavelength();
const cdouble kJ{0.0, 1.0};

ArrayLayout pair_at(double x) {
    const std::vector<double> xs{0.0, x};
    return ArrayLayout::line(xs);
}

}  // namespace

TEST(Carrier, WavelengthFromFrequency) {
    EXPECT_NEAR(kLambda, 299792458.0 / 30e9, 1e-18);
    EXPECT_NEAR(kLambda / 0.00999308193, 1.0, 1e-9);
    EXPECT_THROW(CarrierSpec::from_frequency(0.0), InvalidArgument);
    EXPECT_THROW(CarrierSpec::from_frequency(-1.0), InvalidArgument);
}

TEST(Direction, RangeChecks) {
    EXPECT_NO_THROW(Direction::from_theta_deg(0.0));
    EXPECT_NO_THROW(Direction::from_theta_deg(180.0));
    EXPECT_THROW(Direction::from_theta_deg(-0.1), InvalidArgument);
    EXPECT_THROW(Direction::from_theta_deg(180.1), InvalidArgument);
    EXPECT_THROW(Direction::planar(1.0, 0.1), InvalidArgument);
    EXPECT_NO_THROW(Direction::planar(0.6, 0.8));
}

TEST(SteeringVector, BroadsideAllOnes) {
    const auto a = steering_vector(pair_at(kLambda / 2), Direction::from_theta_deg(90.0), kCarrier30);
    EXPECT_NEAR(std::abs(a[0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a[1] - 1.0), 0.0, 1e-15);
}

TEST(SteeringVector, EndfireHalfWavelength) {
    const auto a = steering_vector(pair_at(kLambda / 2), Direction::from_theta_deg(0.0), kCarrier30);
    EXPECT_NEAR(std::abs(a[0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a[1] + 1.0), 0.0, 1e-12);
}

TEST(SteeringVector, QuarterWavelengthSixtyDegrees) {
    const auto a = steering_vector(pair_at(kLambda / 4), Direction::from_theta_deg(60.0), kCarrier30);
    EXPECT_NEAR(std::abs(a[1] - std::exp(kJ * (kPi / 4))), 0.0, 1e-12);
}

TEST(SteeringVector, DimensionMismatch) {
    EXPECT_THROW(steering_vector(make_upa(2, 2, 0.005), Direction::from_theta_deg(30.0), kCarrier30), InvalidArgument);
    EXPECT_THROW(steering_vector(make_ula(2, 0.005), Direction::planar_angle(0.3), kCarrier30), InvalidArgument);
}

TEST(SteeringVector, MatchesReference) {
    Gen gen(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto xs = gen.feasible_line(6, 0.1, 0.005);
        const double theta = gen.real(0.0, 180.0);
        const auto a = steering_vector(ArrayLayout::line(xs), Direction::from_theta_deg(theta), kCarrier30);
        const auto ref = masim::testing::ref_steering(xs, theta, kLambda);
        for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(std::abs(a[static_cast<Eigen::Index>(i)] - ref[i]), 0.0, 1e-12);
    }
}

TEST(SteeringVector, ConjugateSymmetry) {
    Gen gen(22);
    for (int trial = 0; trial < 50; ++trial) {
        const auto l = ArrayLayout::line(gen.feasible_line(5, 0.1, 0.005));
        const double theta = gen.real(0.0, 180.0);
        const auto a = steering_vector(l, Direction::from_theta_deg(theta), kCarrier30);
        const auto b = steering_vector(l, Direction::from_theta_deg(180.0 - theta), kCarrier30);
        for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a[i] - std::conj(b[i])), 0.0, 1e-12);
    }
}

TEST(NearField, SingleElementClosedForm) {
    const ArrayLayout one(2, {{0.0, 0.0}});
    const auto h = nearfield_response(one, {10.0, kPi / 4}, kCarrier30, AmplitudeModel::free_space);
    EXPECT_NEAR(std::abs(h[0]), kLambda / (4.0 * kPi * 10.0), 1e-18);
    const cdouble expected = std::exp(-kJ * (2.0 * kPi * 10.0 / kLambda));
    EXPECT_NEAR(std::abs(h[0] / std::abs(h[0]) - expected), 0.0, 1e-9);
}

TEST(NearField, UnitAmplitudeModuli) {
    const auto l = make_upa(3, 4, 0.013);
    const auto h = nearfield_response(l, {2.5, 1.1}, kCarrier30, AmplitudeModel::unit);
    for (Eigen::Index i = 0; i < h.size(); ++i) EXPECT_NEAR(std::abs(h[i]), 1.0, 1e-12);
}

TEST(NearField, MatchesReference) {
    Gen gen(23);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Position> ps;
        for (int i = 0; i < 5; ++i) ps.push_back({gen.real(0.0, 0.5), gen.real(0.0, 0.5)});
        const double d = gen.real(1.0, 30.0), phi = gen.real(0.0, kPi);
        for (auto amp : {AmplitudeModel::unit, AmplitudeModel::free_space}) {
            const auto h = nearfield_response(ArrayLayout(2, ps), {d, phi}, kCarrier30, amp);
            const auto ref = masim::testing::ref_nearfield(ps, d, phi, kLambda, amp == AmplitudeModel::free_space);
            for (std::size_t i = 0; i < ps.size(); ++i)
                EXPECT_NEAR(std::abs(h[static_cast<Eigen::Index>(i)] - ref[i]), 0.0, 1e-9 * std::abs(ref[i]));
        }
    }
}

TEST(NearField, FarFieldLimitPhaseDifferences) {
    const auto l = make_upa(2, 2, kLambda / 2);
    const double d = 1e4 * aperture(l);
    const auto h = nearfield_response(l, {d, kPi / 4}, kCarrier30, AmplitudeModel::unit);
    // spherical phase is e^{-j beta r}; the plane-wave counterpart toward the source
    // is e^{+j beta <p,u>}, and r ~ d - <p,u>.
    const auto a = steering_vector(l, Direction::planar_angle(kPi / 4), kCarrier30);
    for (Eigen::Index i = 1; i < h.size(); ++i) {
        const double nf = std::arg(h[i] / h[0]);
        const double ff = std::arg(a[i] / a[0]);
        EXPECT_NEAR(std::remainder(nf - ff, 2.0 * kPi), 0.0, 1e-3);
    }
}

TEST(NearField, SingularAndInvalid) {
    const ArrayLayout l(2, {{0.0, 0.0}, {5.0, 0.0}});
    EXPECT_THROW(nearfield_response(l, {5.0, 0.0}, kCarrier30, AmplitudeModel::unit), SingularGeometry);
    EXPECT_THROW(nearfield_response(l, {0.0, 0.0}, kCarrier30, AmplitudeModel::unit), InvalidArgument);
    EXPECT_THROW(nearfield_response(make_ula(2, 0.1), {1.0, 0.0}, kCarrier30, AmplitudeModel::unit), InvalidArgument);
}

TEST(Multipath, ReducesToSteering) {
    const auto l = make_ula(4, kLambda / 2);
    const std::vector<PathSpec> one{{Direction::from_theta_deg(90.0), 1.0}};
    const auto h = multipath_channel(l, one, kCarrier30);
    for (Eigen::Index i = 0; i < h.size(); ++i) EXPECT_NEAR(std::abs(h[i] - 1.0), 0.0, 1e-15);

    const std::vector<PathSpec> cancel{{Direction::from_theta_deg(90.0), 1.0}, {Direction::from_theta_deg(90.0), -1.0}};
    EXPECT_NEAR(multipath_channel(l, cancel, kCarrier30).norm(), 0.0, 1e-15);

    EXPECT_THROW(multipath_channel(l, std::vector<PathSpec>{}, kCarrier30), InvalidArgument);
}

TEST(Multipath, TermByTermSum) {
    Gen gen(24);
    const auto xs = make_ula(4, kLambda / 2).xs();
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PathSpec> paths;
        std::vector<cdouble> ref(4, 0.0);
        for (int l = 0; l < 3; ++l) {
            const double th = gen.real(0.0, 180.0);
            const cdouble b = gen.complex();
            paths.push_back({Direction::from_theta_deg(th), b});
            const auto a = masim::testing::ref_steering(xs, th, kLambda);
            for (std::size_t i = 0; i < 4; ++i) ref[i] += b * a[i];
        }
        const auto h = multipath_channel(ArrayLayout::line(xs), paths, kCarrier30);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(h[static_cast<Eigen::Index>(i)] - ref[i]), 0.0, 1e-12);
    }
}

TEST(Correlation, Examples) {
    const auto l2 = make_ula(2, kLambda / 2);
    const auto a90 = steering_vector(l2, Direction::from_theta_deg(90.0), kCarrier30);
    const auto a0 = steering_vector(l2, Direction::from_theta_deg(0.0), kCarrier30);
    EXPECT_NEAR(channel_correlation(a90, a90), 1.0, 1e-15);
    EXPECT_NEAR(channel_correlation(a90, a0), 0.0, 1e-12);
    EXPECT_THROW(channel_correlation(a90, ChannelVector(Eigen::VectorXcd::Zero(2))), InvalidArgument);
    EXPECT_THROW(channel_correlation(a90, ChannelVector(Eigen::VectorXcd::Ones(3))), InvalidArgument);
}

TEST(Correlation, DirichletKernel) {
    const auto l8 = make_ula(8, kLambda / 2);
    const double rho = channel_correlation(steering_vector(l8, Direction::from_theta_deg(90.0), kCarrier30),
                                           steering_vector(l8, Direction::from_theta_deg(80.0), kCarrier30));
    const double delta = std::cos(80.0 * kPi / 180.0);
    const double oracle = std::abs(std::sin(8 * kPi * delta / 2) / (8 * std::sin(kPi * delta / 2)));
    EXPECT_NEAR(rho, oracle, 1e-12);
    EXPECT_NEAR(rho, 0.379963142335587, 1e-12);  // frozen
}

TEST(Rayleigh, Formula) {
    const auto c = CarrierSpec::from_frequency(kSpeedOfLight / 0.01);
    EXPECT_NEAR(rayleigh_distance(1.0, c), 200.0, 1e-9);
    EXPECT_EQ(rayleigh_distance(0.0, c), 0.0);
    EXPECT_NEAR(rayleigh_distance(0.707, c), 99.9698, 1e-9);
    EXPECT_THROW(rayleigh_distance(-1.0, c), InvalidArgument);
}

TEST(ChannelVectorType, RejectsNonFinite) {
    Eigen::VectorXcd v(2);
    v << 1.0, cdouble(std::nan(""), 0.0);
    EXPECT_THROW(ChannelVector{v}, InvalidArgument);
}

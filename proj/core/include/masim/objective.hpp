#pragma once

#include <variant>
#include <vector>

#include "masim/beamforming.hpp"
#include "masim/channel.hpp"
#include "masim/geometry.hpp"

namespace masim {

enum class Sense { minimize, maximize };

struct NearFieldSource {
    PolarLocation location;
    AmplitudeModel amp = AmplitudeModel::free_space;
};

struct MultipathSource {
    std::vector<PathSpec> paths;
};

// Anything that yields a per-element channel for a given layout.
using ChannelSource = std::variant<Direction, NearFieldSource, MultipathSource>;

// Normalized correlation energy sum_k |a(t0)^H a(t_k)|^2 / n^2 under MRT
// toward the target; zero iff every null is exact.
struct NullDepth {
    Direction target;
    std::vector<Direction> nulls;
};

struct SecrecyRateFarField {
    Direction rx;
    std::vector<Direction> eves;
    LinkBudget budget;
};

struct SecrecyRateNearField {
    PolarLocation rx;
    std::vector<PolarLocation> eves;
    LinkBudget budget;
    AmplitudeModel amp = AmplitudeModel::free_space;
};

// Leakage sum_k |w^H h_k|^2 with w = MRT toward the target.
struct LeakageMin {
    ChannelSource target;
    std::vector<ChannelSource> eves;
};

struct ObjectiveSpec {
    std::variant<NullDepth, SecrecyRateFarField, SecrecyRateNearField, LeakageMin> kind;
    Sense sense;

    static ObjectiveSpec null_depth(Direction target, std::vector<Direction> nulls);
    static ObjectiveSpec secrecy_far_field(Direction rx, std::vector<Direction> eves, LinkBudget budget);
    static ObjectiveSpec secrecy_near_field(PolarLocation rx, std::vector<PolarLocation> eves, LinkBudget budget,
                                            AmplitudeModel amp = AmplitudeModel::free_space);
    static ObjectiveSpec leakage(ChannelSource target, std::vector<ChannelSource> eves);
};

// Every supported objective is a function of ||h_t||^2 and the cross terms
// h_t^H h_k, so a layout's value can be accumulated element by element. The
// greedy and exhaustive searches rely on this to score a candidate in O(K).
class ObjectiveModel {
public:
    ObjectiveModel(const ObjectiveSpec& spec, const CarrierSpec& carrier, int dim);

    struct Accumulator {
        double target_energy = 0.0;
        std::vector<cdouble> cross;  // h_t^H h_k per adversary
    };

    std::size_t adversaries() const noexcept { return adversaries_; }
    Sense sense() const noexcept { return sense_; }

    // Per-element responses: out[0] is the target entry, out[1 + k] adversary k.
    void responses(const Position& p, std::span<cdouble> out) const;

    Accumulator empty() const { return {0.0, std::vector<cdouble>(adversaries_)}; }
    static void add(Accumulator& acc, std::span<const cdouble> response);
    // acc plus one element, finalized, without mutating acc.
    double value_with(const Accumulator& acc, std::span<const cdouble> response) const;
    double value(const Accumulator& acc) const;

    double evaluate(const ArrayLayout& layout) const;

    // The channel the MRT weights point at.
    ChannelVector target_channel(const ArrayLayout& layout) const;

    // Sense-adjusted value so every optimizer minimizes.
    double score(double value) const noexcept { return sense_ == Sense::minimize ? value : -value; }

private:
    cdouble response(const ChannelSource& src, const Position& p) const;

    std::variant<NullDepth, SecrecyRateFarField, SecrecyRateNearField, LeakageMin> kind_;
    Sense sense_;
    CarrierSpec carrier_;
    double snr_scale_ = 1.0;
    std::size_t adversaries_ = 0;
};

/// Objective value of a feasible layout with MRT weights toward the target.
/// Throws InvalidArgument for infeasible layouts.
double evaluate_objective(const ObjectiveSpec& spec, const ArrayLayout& layout, const CarrierSpec& carrier,
                          const PlacementConstraints& constraints);

/// Analytic d f / d x_m of the null-depth objective on a 1D layout.
std::vector<double> nulling_gradient(const NullDepth& spec, const ArrayLayout& layout, const CarrierSpec& carrier);

double null_depth_value(const NullDepth& spec, const ArrayLayout& layout, const CarrierSpec& carrier);

}  // namespace masim

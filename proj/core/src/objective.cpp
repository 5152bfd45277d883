#include "masim/objective.hpp"

#include <algorithm>
#include <cmath>

#include "masim/errors.hpp"

namespace masim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dim(const Direction& d, int dim, const char* what) {
    if (d.dim() != dim) throw InvalidArgument(std::string(what) + ": direction dimension does not match the layout");
}

void require_dim(const ChannelSource& src, int dim, const char* what) {
    std::visit(overloaded{
                   [&](const Direction& d) { require_dim(d, dim, what); },
                   [&](const NearFieldSource&) {
                       if (dim != 2) throw InvalidArgument(std::string(what) + ": near-field sources need a 2D layout");
                   },
                   [&](const MultipathSource& m) {
                       if (m.paths.empty()) throw InvalidArgument(std::string(what) + ": multipath source has no paths");
                       for (const auto& p : m.paths) require_dim(p.direction, dim, what);
                   },
               },
               src);
}

}  // namespace

ObjectiveSpec ObjectiveSpec::null_depth(Direction target, std::vector<Direction> nulls) {
    for (const auto& d : nulls) {
        if (d.dim() != target.dim()) throw InvalidArgument("null_depth: mixed direction dimensions");
        if (std::abs(d.ux() - target.ux()) < 1e-15 && std::abs(d.uy() - target.uy()) < 1e-15)
            throw InvalidArgument("null_depth: target direction is also listed as a null");
    }
    return {NullDepth{target, std::move(nulls)}, Sense::minimize};
}

ObjectiveSpec ObjectiveSpec::secrecy_far_field(Direction rx, std::vector<Direction> eves, LinkBudget budget) {
    return {SecrecyRateFarField{rx, std::move(eves), budget}, Sense::maximize};
}

ObjectiveSpec ObjectiveSpec::secrecy_near_field(PolarLocation rx, std::vector<PolarLocation> eves, LinkBudget budget,
                                                AmplitudeModel amp) {
    if (!(rx.d_m > 0.0)) throw InvalidArgument("secrecy_near_field: receiver distance must be positive");
    for (const auto& e : eves) {
        if (!(e.d_m > 0.0)) throw InvalidArgument("secrecy_near_field: eavesdropper distance must be positive");
        if (distance(e.cartesian(), rx.cartesian()) == 0.0)
            throw InvalidArgument("secrecy_near_field: eavesdropper coincides with the receiver");
    }
    return {SecrecyRateNearField{rx, std::move(eves), budget, amp}, Sense::maximize};
}

ObjectiveSpec ObjectiveSpec::leakage(ChannelSource target, std::vector<ChannelSource> eves) {
    return {LeakageMin{std::move(target), std::move(eves)}, Sense::minimize};
}

ObjectiveModel::ObjectiveModel(const ObjectiveSpec& spec, const CarrierSpec& carrier, int dim)
    : kind_(spec.kind), sense_(spec.sense), carrier_(carrier) {
    std::visit(overloaded{
                   [&](const NullDepth& s) {
                       require_dim(s.target, dim, "null_depth");
                       for (const auto& d : s.nulls) require_dim(d, dim, "null_depth");
                       adversaries_ = s.nulls.size();
                   },
                   [&](const SecrecyRateFarField& s) {
                       require_dim(s.rx, dim, "secrecy_far_field");
                       for (const auto& d : s.eves) require_dim(d, dim, "secrecy_far_field");
                       adversaries_ = s.eves.size();
                       snr_scale_ = snr_scale(s.budget);
                   },
                   [&](const SecrecyRateNearField& s) {
                       if (dim != 2) throw InvalidArgument("secrecy_near_field: layout must be 2D");
                       adversaries_ = s.eves.size();
                       snr_scale_ = snr_scale(s.budget);
                   },
                   [&](const LeakageMin& s) {
                       require_dim(s.target, dim, "leakage");
                       for (const auto& e : s.eves) require_dim(e, dim, "leakage");
                       adversaries_ = s.eves.size();
                   },
               },
               kind_);
}

cdouble ObjectiveModel::response(const ChannelSource& src, const Position& p) const {
    return std::visit(overloaded{
                          [&](const Direction& d) { return steering_entry(p, d, carrier_.wavenumber()); },
                          [&](const NearFieldSource& s) {
                              return nearfield_entry(p, s.location.cartesian(), carrier_.wavelength(), s.amp);
                          },
                          [&](const MultipathSource& m) {
                              cdouble sum = 0.0;
                              for (const auto& path : m.paths)
                                  sum += path.coeff * steering_entry(p, path.direction, carrier_.wavenumber());
                              return sum;
                          },
                      },
                      src);
}

void ObjectiveModel::responses(const Position& p, std::span<cdouble> out) const {
    std::visit(overloaded{
                   [&](const NullDepth& s) {
                       out[0] = response(s.target, p);
                       for (std::size_t k = 0; k < s.nulls.size(); ++k) out[1 + k] = response(s.nulls[k], p);
                   },
                   [&](const SecrecyRateFarField& s) {
                       out[0] = response(s.rx, p);
                       for (std::size_t k = 0; k < s.eves.size(); ++k) out[1 + k] = response(s.eves[k], p);
                   },
                   [&](const SecrecyRateNearField& s) {
                       out[0] = nearfield_entry(p, s.rx.cartesian(), carrier_.wavelength(), s.amp);
                       for (std::size_t k = 0; k < s.eves.size(); ++k)
                           out[1 + k] = nearfield_entry(p, s.eves[k].cartesian(), carrier_.wavelength(), s.amp);
                   },
                   [&](const LeakageMin& s) {
                       out[0] = response(s.target, p);
                       for (std::size_t k = 0; k < s.eves.size(); ++k) out[1 + k] = response(s.eves[k], p);
                   },
               },
               kind_);
}

void ObjectiveModel::add(Accumulator& acc, std::span<const cdouble> r) {
    acc.target_energy += std::norm(r[0]);
    for (std::size_t k = 0; k < acc.cross.size(); ++k) acc.cross[k] += std::conj(r[0]) * r[1 + k];
}

double ObjectiveModel::value(const Accumulator& acc) const {
    const double s = acc.target_energy;
    if (!(s > 0.0)) throw InvalidArgument("objective: target channel is zero, MRT undefined");
    return std::visit(overloaded{
                          [&](const NullDepth&) {
                              double sum = 0.0;
                              for (const auto& c : acc.cross) sum += std::norm(c);
                              return sum / (s * s);
                          },
                          [&](const LeakageMin&) {
                              double sum = 0.0;
                              for (const auto& c : acc.cross) sum += std::norm(c);
                              return sum / s;
                          },
                          [&](const auto&) {
                              double worst = 0.0;
                              for (const auto& c : acc.cross) worst = std::max(worst, std::norm(c) / s);
                              return secrecy_rate(snr_scale_ * s, snr_scale_ * worst);
                          },
                      },
                      kind_);
}

double ObjectiveModel::value_with(const Accumulator& acc, std::span<const cdouble> r) const {
    Accumulator next = acc;
    add(next, r);
    return value(next);
}

double ObjectiveModel::evaluate(const ArrayLayout& layout) const {
    Accumulator acc = empty();
    std::vector<cdouble> r(1 + adversaries_);
    for (const auto& p : layout.positions()) {
        responses(p, r);
        add(acc, r);
    }
    return value(acc);
}

ChannelVector ObjectiveModel::target_channel(const ArrayLayout& layout) const {
    Eigen::VectorXcd h(static_cast<Eigen::Index>(layout.size()));
    std::vector<cdouble> r(1 + adversaries_);
    for (std::size_t m = 0; m < layout.size(); ++m) {
        responses(layout[m], r);
        h(static_cast<Eigen::Index>(m)) = r[0];
    }
    return ChannelVector(std::move(h));
}

double evaluate_objective(const ObjectiveSpec& spec, const ArrayLayout& layout, const CarrierSpec& carrier,
                          const PlacementConstraints& constraints) {
    if (!validate_layout(layout, constraints).ok()) throw InvalidArgument("evaluate_objective: layout is infeasible");
    return ObjectiveModel(spec, carrier, layout.dim()).evaluate(layout);
}

double null_depth_value(const NullDepth& spec, const ArrayLayout& layout, const CarrierSpec& carrier) {
    return ObjectiveModel(ObjectiveSpec{spec, Sense::minimize}, carrier, layout.dim()).evaluate(layout);
}

std::vector<double> nulling_gradient(const NullDepth& spec, const ArrayLayout& layout, const CarrierSpec& carrier) {
    if (layout.dim() != 1) throw InvalidArgument("nulling_gradient: layout must be 1D");
    require_dim(spec.target, 1, "nulling_gradient");
    const double beta = carrier.wavenumber();
    const auto xs = layout.xs();
    const double n = static_cast<double>(xs.size());
    std::vector<double> grad(xs.size(), 0.0);
    std::vector<cdouble> phasors(xs.size());
    for (const auto& null : spec.nulls) {
        require_dim(null, 1, "nulling_gradient");
        const double delta = null.ux() - spec.target.ux();
        cdouble sum = 0.0;
        for (std::size_t m = 0; m < xs.size(); ++m) {
            phasors[m] = std::polar(1.0, beta * xs[m] * delta);
            sum += phasors[m];
        }
        // d|S|^2/dx_m = 2 Re(conj(S) * j beta delta e_m) = -2 beta delta Im(conj(S) e_m)
        for (std::size_t m = 0; m < xs.size(); ++m)
            grad[m] += -2.0 * beta * delta * (std::conj(sum) * phasors[m]).imag() / (n * n);
    }
    return grad;
}

}  // namespace masim

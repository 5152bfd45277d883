#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace masim {

// Absolute slack (meters) for region-bound and spacing checks. Positions are
// produced by floating-point arithmetic on wavelength fractions, so exact
// comparisons would reject layouts that are feasible by construction.
inline constexpr double kGeometryTolerance = 1e-12;

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b);

/// Square (2D) or segment (1D) region [0, extent]^dim that elements may occupy.
class MovingRegion {
public:
    MovingRegion(int dim, double extent_m);

    int dim() const noexcept { return dim_; }
    double extent() const noexcept { return extent_; }
    bool contains(const Position& p, double tol = kGeometryTolerance) const;

private:
    int dim_;
    double extent_;
};

/// Cross-linked track layout: elements sit at every (column, row) intersection,
/// so rows.size() + cols.size() coordinates control rows.size() * cols.size()
/// elements.
struct CLMACoupling {
    std::vector<double> row_track_coords;  // y of each horizontal track
    std::vector<double> col_track_coords;  // x of each vertical track
};

class PlacementConstraints {
public:
    PlacementConstraints(MovingRegion region, double min_spacing_m,
                         std::optional<CLMACoupling> coupling = std::nullopt);

    const MovingRegion& region() const noexcept { return region_; }
    double min_spacing() const noexcept { return min_spacing_; }
    const std::optional<CLMACoupling>& coupling() const noexcept { return coupling_; }

private:
    MovingRegion region_;
    double min_spacing_;
    std::optional<CLMACoupling> coupling_;
};

/// Ordered element positions in meters. 1D layouts keep y == 0.
class ArrayLayout {
public:
    ArrayLayout(int dim, std::vector<Position> positions);
    static ArrayLayout line(std::span<const double> xs);

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return positions_.size(); }
    std::span<const Position> positions() const noexcept { return positions_; }
    const Position& operator[](std::size_t i) const { return positions_[i]; }

    // x coordinates; the full coordinate vector for 1D layouts.
    std::vector<double> xs() const;

    friend bool operator==(const ArrayLayout&, const ArrayLayout&) = default;

private:
    int dim_;
    std::vector<Position> positions_;
};

struct BoundsViolation {
    std::size_t index;
};

struct SpacingViolation {
    std::size_t first;
    std::size_t second;
    double distance;
};

struct ValidationReport {
    std::vector<BoundsViolation> out_of_region;
    std::vector<SpacingViolation> too_close;

    bool ok() const noexcept { return out_of_region.empty() && too_close.empty(); }
};

ArrayLayout make_ula(std::size_t n, double spacing_m, double origin_m = 0.0);

// Row-major grid anchored at the origin: element r*cols + c sits at (c*s, r*s).
ArrayLayout make_upa(std::size_t rows, std::size_t cols, double spacing_m);

ArrayLayout clma_layout(const CLMACoupling& coupling);

ValidationReport validate_layout(const ArrayLayout& layout, const PlacementConstraints& constraints);

// Moves a layout into the feasible set.
//  1D: exact Euclidean projection. Sorting fixes the rank of each element,
//      after which the problem is an isotonic regression on x_(i) - i*s.
//  2D: clip, then pairwise repulsion along connecting lines, at most 100 passes.
// Throws InfeasibleConstraints when no feasible layout exists (1D) or the
// repulsion does not settle (2D).
ArrayLayout project_to_feasible(const ArrayLayout& layout, const PlacementConstraints& constraints);

// Coupled variant: projects row and column track coordinates independently,
// which keeps the cross product feasible.
CLMACoupling project_to_feasible(const CLMACoupling& coupling, const PlacementConstraints& constraints);

double aperture(const ArrayLayout& layout);

// Candidate positions at `points_per_wavelength` per axis, spacing
// wavelength / points_per_wavelength, starting at 0. 2D grids are row-major.
std::vector<Position> candidate_grid(const MovingRegion& region, double wavelength_m,
                                     double points_per_wavelength);

// Evenly spread n elements over [0, extent] (1D) or a near-square grid (2D).
ArrayLayout uniform_spread(std::size_t n, const MovingRegion& region);

// Near-square factorisation rows x cols of m with rows <= cols.
std::pair<std::size_t, std::size_t> near_square(std::size_t m);

}  // namespace masim

#include "masim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "masim/errors.hpp"

namespace masim {

namespace {

constexpr int kRepulsionPasses = 100;

bool finite(const Position& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double clip(double v, double extent) { return std::clamp(v, 0.0, extent); }

// Order-preserving least-squares projection onto {0 <= x <= extent, gaps >= s}.
// With y_i = x_(i) - i*s the feasible set becomes a monotone sequence inside
// [0, extent - (n-1)s], so pool-adjacent-violators followed by a clip is exact.
std::vector<double> project_line(std::span<const double> values, double extent, double spacing) {
    const std::size_t n = values.size();
    if (n > 0 && static_cast<double>(n - 1) * spacing > extent + kGeometryTolerance) {
        throw InfeasibleConstraints("cannot fit " + std::to_string(n) + " elements with spacing " +
                                    std::to_string(spacing) + " m into " + std::to_string(extent) + " m");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    bool violated = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = values[order[i]];
        if (v < -kGeometryTolerance || v > extent + kGeometryTolerance) violated = true;
        if (i > 0 && v - values[order[i - 1]] < spacing - kGeometryTolerance) violated = true;
    }
    if (!violated) return {values.begin(), values.end()};

    struct Block {
        double sum;
        std::size_t count;
        double mean() const { return sum / static_cast<double>(count); }
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < n; ++i) {
        blocks.push_back({values[order[i]] - static_cast<double>(i) * spacing, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() >= blocks.back().mean()) {
            blocks[blocks.size() - 2].sum += blocks.back().sum;
            blocks[blocks.size() - 2].count += blocks.back().count;
            blocks.pop_back();
        }
    }
    const double upper = std::max(0.0, extent - static_cast<double>(n - 1) * spacing);
    std::vector<double> out(n);
    std::size_t i = 0;
    for (const auto& b : blocks) {
        const double y = std::clamp(b.mean(), 0.0, upper);
        for (std::size_t k = 0; k < b.count; ++k, ++i) out[order[i]] = clip(y + static_cast<double>(i) * spacing, extent);
    }
    return out;
}

}  // namespace

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

MovingRegion::MovingRegion(int dim, double extent_m) : dim_(dim), extent_(extent_m) {
    if (dim != 1 && dim != 2) throw InvalidArgument("region dimension must be 1 or 2");
    if (!(extent_m > 0.0) || !std::isfinite(extent_m)) throw InvalidArgument("region extent must be positive");
}

bool MovingRegion::contains(const Position& p, double tol) const {
    const bool x_in = p.x >= -tol && p.x <= extent_ + tol;
    if (dim_ == 1) return x_in && p.y == 0.0;
    return x_in && p.y >= -tol && p.y <= extent_ + tol;
}

PlacementConstraints::PlacementConstraints(MovingRegion region, double min_spacing_m,
                                           std::optional<CLMACoupling> coupling)
    : region_(region), min_spacing_(min_spacing_m), coupling_(std::move(coupling)) {
    if (!(min_spacing_m >= 0.0) || !std::isfinite(min_spacing_m))
        throw InvalidArgument("minimum spacing must be non-negative");
    if (coupling_) {
        if (region_.dim() != 2) throw InvalidArgument("cross-linked coupling requires a 2D region");
        for (const auto* coords : {&coupling_->row_track_coords, &coupling_->col_track_coords}) {
            for (double c : *coords) {
                if (!(c >= -kGeometryTolerance && c <= region_.extent() + kGeometryTolerance))
                    throw InvalidArgument("track coordinate outside region");
            }
        }
    }
}

ArrayLayout::ArrayLayout(int dim, std::vector<Position> positions) : dim_(dim), positions_(std::move(positions)) {
    if (dim != 1 && dim != 2) throw InvalidArgument("layout dimension must be 1 or 2");
    if (positions_.empty()) throw InvalidArgument("layout needs at least one element");
    for (const auto& p : positions_) {
        if (!finite(p)) throw InvalidArgument("layout position is not finite");
        if (dim == 1 && p.y != 0.0) throw InvalidArgument("1D layout positions must have y == 0");
    }
}

ArrayLayout ArrayLayout::line(std::span<const double> xs) {
    std::vector<Position> pts;
    pts.reserve(xs.size());
    for (double x : xs) pts.push_back({x, 0.0});
    return ArrayLayout(1, std::move(pts));
}

std::vector<double> ArrayLayout::xs() const {
    std::vector<double> out;
    out.reserve(positions_.size());
    for (const auto& p : positions_) out.push_back(p.x);
    return out;
}

ArrayLayout make_ula(std::size_t n, double spacing_m, double origin_m) {
    if (n == 0) throw InvalidArgument("make_ula: n must be at least 1");
    if (!(spacing_m > 0.0)) throw InvalidArgument("make_ula: spacing must be positive");
    std::vector<double> xs(n);
    for (std::size_t m = 0; m < n; ++m) xs[m] = origin_m + static_cast<double>(m) * spacing_m;
    return ArrayLayout::line(xs);
}

ArrayLayout make_upa(std::size_t rows, std::size_t cols, double spacing_m) {
    if (rows == 0 || cols == 0) throw InvalidArgument("make_upa: rows and cols must be at least 1");
    if (!(spacing_m > 0.0)) throw InvalidArgument("make_upa: spacing must be positive");
    std::vector<Position> pts;
    pts.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            pts.push_back({static_cast<double>(c) * spacing_m, static_cast<double>(r) * spacing_m});
        }
    }
    return ArrayLayout(2, std::move(pts));
}

ArrayLayout clma_layout(const CLMACoupling& coupling) {
    if (coupling.row_track_coords.empty() || coupling.col_track_coords.empty())
        throw InvalidArgument("clma_layout: track lists must be non-empty");
    std::vector<Position> pts;
    pts.reserve(coupling.row_track_coords.size() * coupling.col_track_coords.size());
    for (double y : coupling.row_track_coords) {
        for (double x : coupling.col_track_coords) pts.push_back({x, y});
    }
    return ArrayLayout(2, std::move(pts));
}

ValidationReport validate_layout(const ArrayLayout& layout, const PlacementConstraints& constraints) {
    if (layout.dim() != constraints.region().dim())
        throw InvalidArgument("validate_layout: layout and region dimensions differ");
    ValidationReport report;
    const auto pts = layout.positions();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!constraints.region().contains(pts[i])) report.out_of_region.push_back({i});
    }
    const double s = constraints.min_spacing();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = distance(pts[i], pts[j]);
            if (d < s - kGeometryTolerance) report.too_close.push_back({i, j, d});
        }
    }
    return report;
}

ArrayLayout project_to_feasible(const ArrayLayout& layout, const PlacementConstraints& constraints) {
    if (layout.dim() != constraints.region().dim())
        throw InvalidArgument("project_to_feasible: layout and region dimensions differ");
    const double extent = constraints.region().extent();
    const double s = constraints.min_spacing();

    if (layout.dim() == 1) {
        const auto xs = layout.xs();
        return ArrayLayout::line(project_line(xs, extent, s));
    }

    std::vector<Position> pts(layout.positions().begin(), layout.positions().end());
    for (auto& p : pts) p = {clip(p.x, extent), clip(p.y, extent)};
    const std::size_t n = pts.size();

    for (int pass = 0; pass <= kRepulsionPasses; ++pass) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = distance(pts[i], pts[j]);
                if (d >= s - kGeometryTolerance) continue;
                if (pass == kRepulsionPasses) {
                    throw InfeasibleConstraints("2D spacing projection did not converge in " +
                                                std::to_string(kRepulsionPasses) + " passes");
                }
                double ux = 1.0, uy = 0.0;
                if (d > 0.0) {
                    ux = (pts[j].x - pts[i].x) / d;
                    uy = (pts[j].y - pts[i].y) / d;
                } else {
                    // Coincident: split along a direction fixed by the pair index.
                    const double angle = 0.61803398874989485 * static_cast<double>(i * n + j);
                    ux = std::cos(angle);
                    uy = std::sin(angle);
                }
                // Overshoot slightly so clipping against a wall still makes progress.
                const double push = 0.5 * (s - d) * (1.0 + 1e-6) + kGeometryTolerance;
                pts[i] = {clip(pts[i].x - push * ux, extent), clip(pts[i].y - push * uy, extent)};
                pts[j] = {clip(pts[j].x + push * ux, extent), clip(pts[j].y + push * uy, extent)};
                moved = true;
            }
        }
        if (!moved) break;
    }
    return ArrayLayout(2, std::move(pts));
}

CLMACoupling project_to_feasible(const CLMACoupling& coupling, const PlacementConstraints& constraints) {
    const double extent = constraints.region().extent();
    const double s = constraints.min_spacing();
    return {project_line(coupling.row_track_coords, extent, s), project_line(coupling.col_track_coords, extent, s)};
}

double aperture(const ArrayLayout& layout) {
    double best = 0.0;
    const auto pts = layout.positions();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, distance(pts[i], pts[j]));
    }
    return best;
}

std::vector<Position> candidate_grid(const MovingRegion& region, double wavelength_m, double points_per_wavelength) {
    if (!(points_per_wavelength > 0.0) || !(wavelength_m > 0.0))
        throw InvalidArgument("candidate_grid: grid density and wavelength must be positive");
    const double step = wavelength_m / points_per_wavelength;
    const auto count = static_cast<std::size_t>(std::floor(region.extent() / step + 1e-9)) + 1;
    std::vector<Position> grid;
    if (region.dim() == 1) {
        grid.reserve(count);
        for (std::size_t i = 0; i < count; ++i) grid.push_back({std::min(static_cast<double>(i) * step, region.extent()), 0.0});
        return grid;
    }
    grid.reserve(count * count);
    for (std::size_t r = 0; r < count; ++r) {
        for (std::size_t c = 0; c < count; ++c) {
            grid.push_back({std::min(static_cast<double>(c) * step, region.extent()),
                            std::min(static_cast<double>(r) * step, region.extent())});
        }
    }
    return grid;
}

ArrayLayout uniform_spread(std::size_t n, const MovingRegion& region) {
    if (n == 0) throw InvalidArgument("uniform_spread: n must be at least 1");
    const double extent = region.extent();
    auto spread = [extent](std::size_t i, std::size_t count) {
        return count == 1 ? 0.5 * extent : extent * static_cast<double>(i) / static_cast<double>(count - 1);
    };
    if (region.dim() == 1) {
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = spread(i, n);
        return ArrayLayout::line(xs);
    }
    const auto [rows, cols] = near_square(n);
    std::vector<Position> pts;
    pts.reserve(n);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) pts.push_back({spread(c, cols), spread(r, rows)});
    }
    return ArrayLayout(2, std::move(pts));
}

std::pair<std::size_t, std::size_t> near_square(std::size_t m) {
    if (m == 0) throw InvalidArgument("near_square: m must be at least 1");
    std::size_t rows = 1;
    for (std::size_t d = 1; d * d <= m; ++d) {
        if (m % d == 0) rows = d;
    }
    return {rows, m / rows};
}

}  // namespace masim

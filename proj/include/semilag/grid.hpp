#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "semilag/error.hpp"
#include "semilag/vec.hpp"

namespace semilag {

/// What interpolation does with query points outside the grid box.
/// kExtrapolate extends the multilinear form of the nearest cell (exact for
/// affine data, first-order accurate for smooth data, not monotone);
/// kClamp projects componentwise onto the box (monotone, but freezes
/// values at the boundary); kError rejects the query.
enum class BoundaryPolicy { kExtrapolate, kClamp, kError };

/// Location of a point inside the grid: owning cell plus local coordinates
/// in [0,1]^d. Cells are left-closed/right-open, except the last cell along
/// each axis, which also owns the upper face.
struct CellLocation {
  std::array<int, kMaxDim> cell{};
  Vec local;
};

/// Uniform Cartesian grid over a box [lower, upper]. Stores per-axis node
/// counts, spacings, and linear-index strides (axis 0 varies fastest).
class Grid {
 public:
  Grid(const Vec& lower, const Vec& upper, const std::vector<int>& counts) {
    const int d = lower.size();
    if (d < 1 || d > kMaxDim) throw ConfigError("grid: dimension out of range");
    if (upper.size() != d || static_cast<int>(counts.size()) != d)
      throw ConfigError("grid: lower/upper/counts dimensions disagree");
    dim_ = d;
    lower_ = lower;
    upper_ = upper;
    node_count_ = 1;
    for (int k = 0; k < d; ++k) {
      if (!(upper[k] > lower[k]))
        throw ConfigError("grid: need upper > lower along every axis");
      if (counts[k] < 2) throw ConfigError("grid: need at least two nodes per axis");
      counts_[k] = counts[k];
      spacing_[k] = (upper[k] - lower[k]) / (counts[k] - 1);
      inv_spacing_[k] = 1.0 / spacing_[k];
      strides_[k] = node_count_;
      node_count_ *= static_cast<std::size_t>(counts[k]);
    }
  }

  int dim() const { return dim_; }
  std::size_t node_count() const { return node_count_; }
  int count(int axis) const { return counts_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  std::size_t stride(int axis) const { return strides_[axis]; }

  /// Largest distance between two points of one cell: the cell diagonal.
  double cell_diameter() const {
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) s += spacing_[k] * spacing_[k];
    return std::sqrt(s);
  }

  std::size_t node_index(const std::array<int, kMaxDim>& multi) const {
    std::size_t i = 0;
    for (int k = 0; k < dim_; ++k) i += static_cast<std::size_t>(multi[k]) * strides_[k];
    return i;
  }

  std::array<int, kMaxDim> node_multi(std::size_t i) const {
    std::array<int, kMaxDim> m{};
    for (int k = 0; k < dim_; ++k) {
      m[k] = static_cast<int>(i % counts_[k]);
      i /= counts_[k];
    }
    return m;
  }

  Vec node(std::size_t i) const {
    Vec x(dim_);
    for (int k = 0; k < dim_; ++k) {
      const int mk = static_cast<int>(i % counts_[k]);
      i /= counts_[k];
      x[k] = mk == counts_[k] - 1 ? upper_[k] : lower_[k] + mk * spacing_[k];
    }
    return x;
  }

  bool contains(const Vec& p) const {
    for (int k = 0; k < dim_; ++k)
      if (!(p[k] >= lower_[k] && p[k] <= upper_[k])) return false;
    return true;
  }

  /// Componentwise projection onto the box; how far p sits outside is
  /// reported by exit_distance.
  Vec clamp(const Vec& p) const {
    Vec q = p;
    for (int k = 0; k < dim_; ++k) {
      if (q[k] < lower_[k]) q[k] = lower_[k];
      if (q[k] > upper_[k]) q[k] = upper_[k];
    }
    return q;
  }

  double exit_distance(const Vec& p) const {
    double m = 0.0;
    for (int k = 0; k < dim_; ++k) {
      if (p[k] < lower_[k]) m = std::max(m, lower_[k] - p[k]);
      if (p[k] > upper_[k]) m = std::max(m, p[k] - upper_[k]);
    }
    return m;
  }

  /// Coordinate of node idx along one axis (the last node is exactly the
  /// upper bound).
  double node_coord(int axis, int idx) const {
    return idx == counts_[axis] - 1 ? upper_[axis] : lower_[axis] + idx * spacing_[axis];
  }

  /// Cell and local weights exactly as interpolation uses them: the point is
  /// clamped onto the box and near-face offsets are snapped. Lets callers
  /// reproduce an interpolated value from corner samples of a function.
  CellLocation locate_snapped(const Vec& p) const {
    if (p.size() != dim_) throw ConfigError("grid: point dimension mismatch");
    if (!p.all_finite()) throw PreconditionError("grid: non-finite point");
    CellLocation loc;
    loc.local = Vec(dim_);
    for (int k = 0; k < dim_; ++k) {
      double a;
      loc.cell[k] = static_cast<int>(axis_base(k, p[k], a));
      loc.local[k] = a;
    }
    return loc;
  }

  /// Owning cell and local coordinates for a point already inside the box.
  CellLocation locate(const Vec& p) const {
    if (p.size() != dim_) throw ConfigError("grid: point dimension mismatch");
    if (!p.all_finite()) throw PreconditionError("grid: non-finite point");
    CellLocation loc;
    loc.local = Vec(dim_);
    for (int k = 0; k < dim_; ++k) {
      const double s = (p[k] - lower_[k]) * inv_spacing_[k];
      int c = static_cast<int>(s);
      if (c > counts_[k] - 2) c = counts_[k] - 2;  // upper face joins the last cell
      if (c < 0) c = 0;
      loc.cell[k] = c;
      loc.local[k] = s - c;
    }
    return loc;
  }

  /// Piecewise multilinear interpolation of nodal values at p. The values
  /// span is indexed like nodes. Exact on nodes, reproduces affine
  /// functions; inside the box it is monotone and non-expansive in the
  /// nodal data. Out-of-box points follow the boundary policy.
  double interpolate(std::span<const double> values, const Vec& p,
                     BoundaryPolicy policy = BoundaryPolicy::kClamp) const {
    if (values.size() != node_count_)
      throw ConfigError("grid: value array does not match node count");
    if (p.size() != dim_) throw ConfigError("grid: point dimension mismatch");
    if (!p.all_finite()) throw PreconditionError("grid: non-finite query point");
    if (policy == BoundaryPolicy::kError && !contains(p))
      throw DomainError("grid: query point outside the box");
    if (policy == BoundaryPolicy::kExtrapolate) return extrapolate_unchecked(values.data(), p);
    return interpolate_unchecked(values.data(), p);
  }

  /// Hot path shared with the solver: assumes a matching, finite, clamped
  /// point and a values array of node_count() doubles. Uses the symmetric
  /// weight form (1-a)*v0 + a*v1, which together with the offset snap in
  /// axis_base makes node hits bitwise exact.
  double interpolate_unchecked(const double* values, const Vec& p) const {
    if (dim_ == 1) {
      double a;
      const std::size_t i = axis_base(0, p[0], a);
      return (1.0 - a) * values[i] + a * values[i + 1];
    }
    if (dim_ == 2) {
      double a, b;
      const std::size_t i = axis_base(0, p[0], a);
      const std::size_t j = axis_base(1, p[1], b);
      const double* row = values + j * strides_[1] + i;
      const double lo = (1.0 - a) * row[0] + a * row[1];
      row += strides_[1];
      const double hi = (1.0 - a) * row[0] + a * row[1];
      return (1.0 - b) * lo + b * hi;
    }
    std::size_t base = 0;
    double local[kMaxDim];
    for (int k = 0; k < dim_; ++k) {
      double a;
      base += axis_base(k, p[k], a) * strides_[k];
      local[k] = a;
    }
    double acc = 0.0;
    const unsigned corners = 1u << dim_;
    for (unsigned c = 0; c < corners; ++c) {
      double w = 1.0;
      std::size_t idx = base;
      for (int k = 0; k < dim_; ++k) {
        if (c >> k & 1u) {
          w *= local[k];
          idx += strides_[k];
        } else {
          w *= 1.0 - local[k];
        }
      }
      acc += w * values[idx];
    }
    return acc;
  }

  /// Like interpolate_unchecked, but local coordinates are not clamped to
  /// the box: points outside evaluate the affine extension of the nearest
  /// cell (weights leave [0,1]).
  double extrapolate_unchecked(const double* values, const Vec& p) const {
    if (dim_ == 1) {
      double a;
      const std::size_t i = axis_cell(0, p[0], a);
      return (1.0 - a) * values[i] + a * values[i + 1];
    }
    if (dim_ == 2) {
      double a, b;
      const std::size_t i = axis_cell(0, p[0], a);
      const std::size_t j = axis_cell(1, p[1], b);
      const double* row = values + j * strides_[1] + i;
      const double lo = (1.0 - a) * row[0] + a * row[1];
      row += strides_[1];
      const double hi = (1.0 - a) * row[0] + a * row[1];
      return (1.0 - b) * lo + b * hi;
    }
    std::size_t base = 0;
    double local[kMaxDim];
    for (int k = 0; k < dim_; ++k) {
      double a;
      base += axis_cell(k, p[k], a) * strides_[k];
      local[k] = a;
    }
    double acc = 0.0;
    const unsigned corners = 1u << dim_;
    for (unsigned c = 0; c < corners; ++c) {
      double w = 1.0;
      std::size_t idx = base;
      for (int k = 0; k < dim_; ++k) {
        if (c >> k & 1u) {
          w *= local[k];
          idx += strides_[k];
        } else {
          w *= 1.0 - local[k];
        }
      }
      acc += w * values[idx];
    }
    return acc;
  }

 private:
  // Offsets this close to a cell face are snapped onto it. Query points that
  // are mathematically nodes often come out a few ulps off (feet of
  // characteristics, accumulated sums); snapping keeps node hits exact while
  // being far below any offset the schemes actually produce.
  static constexpr double kSnapTol = 1e-11;

  std::size_t axis_base(int k, double x, double& local) const {
    double s = (x - lower_[k]) * inv_spacing_[k];
    if (s < 0.0) s = 0.0;  // clamp policy; callers reject out-of-box beforehand
    const double top = static_cast<double>(counts_[k] - 1);
    if (s > top) s = top;
    int c = static_cast<int>(s);
    if (c > counts_[k] - 2) c = counts_[k] - 2;
    double a = s - c;
    if (a < kSnapTol)
      a = 0.0;
    else if (a > 1.0 - kSnapTol)
      a = 1.0;
    local = a;
    return static_cast<std::size_t>(c);
  }

  /// Nearest in-range cell with an unclamped local coordinate (may leave
  /// [0,1]); snap still applies so node hits stay exact.
  std::size_t axis_cell(int k, double x, double& local) const {
    const double s = (x - lower_[k]) * inv_spacing_[k];
    int c = static_cast<int>(std::floor(s));
    if (c < 0) c = 0;
    if (c > counts_[k] - 2) c = counts_[k] - 2;
    double a = s - c;
    if (std::abs(a) < kSnapTol)
      a = 0.0;
    else if (std::abs(a - 1.0) < kSnapTol)
      a = 1.0;
    local = a;
    return static_cast<std::size_t>(c);
  }

  int dim_ = 0;
  std::size_t node_count_ = 0;
  Vec lower_, upper_, spacing_, inv_spacing_;
  std::array<int, kMaxDim> counts_{};
  std::array<std::size_t, kMaxDim> strides_{};
};

/// Builds a grid whose spacing does not exceed target_spacing: per axis the
/// cell count is ceil(extent/target), except that extents within relative
/// 1e-9 of an integer multiple keep the exact count (so a request of 0.1 on
/// [-1,1] yields 21 nodes with spacing exactly 0.1).
inline Grid build_grid(const Vec& lower, const Vec& upper, double target_spacing) {
  if (!(target_spacing > 0) || !std::isfinite(target_spacing))
    throw ConfigError("grid: need target spacing > 0");
  const int d = lower.size();
  std::vector<int> counts(d);
  for (int k = 0; k < d; ++k) {
    if (!(upper[k] > lower[k]))
      throw ConfigError("grid: need upper > lower along every axis");
    const double raw = (upper[k] - lower[k]) / target_spacing;
    const double rounded = std::round(raw);
    double cells;
    if (std::abs(raw - rounded) <= 1e-9 * std::max(1.0, raw) && rounded >= 1.0)
      cells = rounded;
    else
      cells = std::ceil(raw);
    if (cells < 1.0) cells = 1.0;
    if (cells > 1e9) throw ConfigError("grid: spacing produces too many nodes");
    counts[k] = static_cast<int>(cells) + 1;
  }
  return Grid(lower, upper, counts);
}

/// Values attached to the nodes of one grid.
class NodalField {
 public:
  NodalField(Grid grid, double fill = 0.0)
      : grid_(std::move(grid)), values_(grid_.node_count(), fill) {}
  NodalField(Grid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
      throw ConfigError("nodal field: value count does not match grid");
  }

  static NodalField sample(const Grid& grid, const std::function<double(const Vec&)>& fn) {
    NodalField f(grid);
    for (std::size_t i = 0; i < grid.node_count(); ++i) f.values_[i] = fn(grid.node(i));
    return f;
  }

  const Grid& grid() const { return grid_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

inline double interpolate(const NodalField& f, const Vec& p,
                          BoundaryPolicy policy = BoundaryPolicy::kClamp) {
  return f.grid().interpolate(f.values(), p, policy);
}

}  // namespace semilag

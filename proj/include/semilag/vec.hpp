#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>

namespace semilag {

inline constexpr int kMaxDim = 8;

/// Fixed-capacity coordinate vector used for states and controls.
/// Grid-based dynamic programming is only practical in a handful of
/// dimensions, so points live on the stack and never allocate.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim, double fill = 0.0) : size_(dim) {
    assert(dim >= 0 && dim <= kMaxDim);
    for (int k = 0; k < dim; ++k) v_[k] = fill;
  }
  Vec(std::initializer_list<double> xs) : size_(static_cast<int>(xs.size())) {
    assert(xs.size() <= static_cast<std::size_t>(kMaxDim));
    int k = 0;
    for (double x : xs) v_[k++] = x;
  }

  int size() const { return size_; }
  double& operator[](int k) {
    assert(k >= 0 && k < size_);
    return v_[k];
  }
  double operator[](int k) const {
    assert(k >= 0 && k < size_);
    return v_[k];
  }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double* begin() { return v_.data(); }
  double* end() { return v_.data() + size_; }
  const double* begin() const { return v_.data(); }
  const double* end() const { return v_.data() + size_; }

  double inf_norm() const {
    double m = 0.0;
    for (int k = 0; k < size_; ++k) m = std::max(m, std::abs(v_[k]));
    return m;
  }

  bool all_finite() const {
    for (int k = 0; k < size_; ++k)
      if (!std::isfinite(v_[k])) return false;
    return true;
  }

  friend bool operator==(const Vec& a, const Vec& b) {
    if (a.size_ != b.size_) return false;
    for (int k = 0; k < a.size_; ++k)
      if (a.v_[k] != b.v_[k]) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> v_{};
  int size_ = 0;
};

inline Vec operator+(Vec a, const Vec& b) {
  assert(a.size() == b.size());
  for (int k = 0; k < a.size(); ++k) a[k] += b[k];
  return a;
}

inline Vec operator-(Vec a, const Vec& b) {
  assert(a.size() == b.size());
  for (int k = 0; k < a.size(); ++k) a[k] -= b[k];
  return a;
}

inline Vec operator*(double s, Vec a) {
  for (int k = 0; k < a.size(); ++k) a[k] *= s;
  return a;
}

/// x + h*f without forming intermediates; the inner loop of every scheme here.
inline Vec axpy(const Vec& x, double h, const Vec& f) {
  assert(x.size() == f.size());
  Vec r = x;
  for (int k = 0; k < r.size(); ++k) r[k] += h * f[k];
  return r;
}

inline double inf_dist(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double m = 0.0;
  for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace semilag

#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dmetrics {

/// A point of R^n with n >= 1. Coordinates are plain doubles in length units.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t n) : c_(n, 0.0) {}
  Point(std::initializer_list<double> c) : c_(c) {}
  explicit Point(std::vector<double> c) : c_(std::move(c)) {}
  explicit Point(std::span<const double> c) : c_(c.begin(), c.end()) {}

  std::size_t dim() const noexcept { return c_.size(); }
  double operator[](std::size_t i) const noexcept { return c_[i]; }
  double& operator[](std::size_t i) noexcept { return c_[i]; }

  std::span<const double> coords() const noexcept { return c_; }
  std::span<double> coords() noexcept { return c_; }

  bool finite() const noexcept {
    for (double v : c_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  Point& operator+=(const Point& o) noexcept {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) noexcept {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(double s) noexcept {
    for (double& v : c_) v *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
  friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
  friend Point operator*(Point a, double s) noexcept { return a *= s; }
  friend Point operator*(double s, Point a) noexcept { return a *= s; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> c_;
};

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

inline double dot(const Point& a, const Point& b) noexcept { return dot(a.coords(), b.coords()); }
inline double norm(const Point& a) noexcept { return std::sqrt(dot(a, a)); }
inline double distance(const Point& a, const Point& b) noexcept {
  return distance(a.coords(), b.coords());
}

/// Linear interpolation a + t (b - a).
inline Point lerp(const Point& a, const Point& b, double t) {
  Point r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] + t * (b[i] - a[i]);
  return r;
}

/// Distance from p to the closed segment [a, b].
double point_segment_distance(const Point& p, const Point& a, const Point& b) noexcept;

/// "x0 x1 ..." with round-trip precision.
std::string to_string(const Point& p);

/// Parses "x0,x1[,x2...]".
Point parse_point(const std::string& text);

/// Axis-aligned box [lo, hi].
struct Box {
  Point lo;
  Point hi;

  std::size_t dim() const noexcept { return lo.dim(); }
  bool contains(const Point& p) const noexcept {
    for (std::size_t i = 0; i < p.dim(); ++i) {
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    }
    return true;
  }
  double diagonal() const noexcept { return distance(lo, hi); }
};

}  // namespace dmetrics

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ghostsim {

/// Uniform sampling of [start, stop] with both endpoints included.
struct Axis {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;

  double step() const noexcept { return count > 1 ? (stop - start) / static_cast<double>(count - 1) : 0.0; }
  double operator[](std::size_t i) const noexcept {
    return i + 1 == count ? stop : start + static_cast<double>(i) * step();
  }
  std::vector<double> values() const;

  /// Throws std::invalid_argument unless count >= 2 and start < stop.
  void validate() const;
  static Axis symmetric(double half_width, std::size_t count) { return {-half_width, half_width, count}; }

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Sampled probability density, 1D over `x` or 2D over (x, y) stored row-major
/// with x the slow index.
struct Pattern {
  std::string label;
  Axis x;
  std::optional<Axis> y;
  std::vector<double> values;
  std::optional<double> fixed_y1;  // detector position for slices and buckets
  std::optional<double> window;    // bucket width
  std::vector<std::string> warnings;

  bool is_2d() const noexcept { return y.has_value(); }
  double at(std::size_t i, std::size_t j) const { return values[i * y->count + j]; }
  double peak() const;
  /// Trapezoid integral over the sampled axes.
  double integral() const;
};

}  // namespace ghostsim

#include "ghostsim/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ghostsim {

std::vector<double> Axis::values() const {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = (*this)[i];
  return out;
}

void Axis::validate() const {
  if (count < 2 || !(start < stop) || !std::isfinite(start) || !std::isfinite(stop))
    throw std::invalid_argument("axis needs at least two points over a non-empty finite range");
}

double Pattern::peak() const {
  if (values.empty()) return 0.0;
  return *std::max_element(values.begin(), values.end());
}

namespace {

double trapezoid(const double* v, std::size_t n, std::size_t stride, double h) {
  if (n < 2) return 0.0;
  double acc = 0.5 * (v[0] + v[(n - 1) * stride]);
  for (std::size_t i = 1; i + 1 < n; ++i) acc += v[i * stride];
  return acc * h;
}

}  // namespace

double Pattern::integral() const {
  if (!is_2d()) return trapezoid(values.data(), x.count, 1, x.step());
  std::vector<double> rows(x.count);
  for (std::size_t i = 0; i < x.count; ++i) rows[i] = trapezoid(values.data() + i * y->count, y->count, 1, y->step());
  return trapezoid(rows.data(), x.count, 1, x.step());
}

}  // namespace ghostsim

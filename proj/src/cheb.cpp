#include "ratmin/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ratmin/errors.hpp"

namespace ratmin {

Domain::Domain(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    throw InvalidArgument("domain requires finite a < b, got [" +
                          std::to_string(a) + ", " + std::to_string(b) + "]");
  }
}

ChebCoeffs::ChebCoeffs(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) throw InvalidArgument("coefficient vector must be nonempty");
  for (double v : c_) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite coefficient");
  }
}

ChebCoeffs::ChebCoeffs(std::initializer_list<double> coeffs)
    : ChebCoeffs(std::vector<double>(coeffs)) {}

ChebCoeffs ChebCoeffs::scaled(double s) const {
  std::vector<double> out(c_);
  for (double& v : out) v *= s;
  return ChebCoeffs(std::move(out));
}

Grid::Grid(std::vector<double> points) : pts_(std::move(points)) {
  if (pts_.empty()) throw InvalidArgument("grid must be nonempty");
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    if (!std::isfinite(pts_[i])) throw InvalidArgument("non-finite grid point");
    if (i > 0 && !(pts_[i - 1] < pts_[i])) {
      throw InvalidArgument("grid points must be strictly increasing");
    }
  }
}

bool Grid::inside(const Domain& d) const noexcept {
  return d.contains(pts_.front()) && d.contains(pts_.back());
}

double map_to_ref(const Domain& d, double x) noexcept {
  return (2.0 * x - d.a() - d.b()) / (d.b() - d.a());
}

double map_from_ref(const Domain& d, double t) noexcept {
  return 0.5 * ((d.b() - d.a()) * t + d.a() + d.b());
}

void cheb_vector_into(double t, std::span<double> out) noexcept {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = t;
  const double two_t = 2.0 * t;
  for (std::size_t j = 2; j < out.size(); ++j) {
    out[j] = two_t * out[j - 1] - out[j - 2];
  }
}

std::vector<double> cheb_vector(double t, std::size_t k) {
  std::vector<double> out(k + 1);
  cheb_vector_into(t, out);
  return out;
}

double clenshaw(std::span<const double> c, double t) noexcept {
  if (c.empty()) return 0.0;
  // b_j = c_j + 2t b_{j+1} - b_{j+2}; value = c_0 + t b_1 - b_2.
  double b1 = 0.0;
  double b2 = 0.0;
  const double two_t = 2.0 * t;
  for (std::size_t j = c.size() - 1; j >= 1; --j) {
    const double b0 = c[j] + two_t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + t * b1 - b2;
}

double clenshaw(const ChebCoeffs& c, double t) noexcept {
  return clenshaw(c.values(), t);
}

Grid cheb_nodes(std::size_t n) {
  if (n == 0) throw InvalidArgument("cheb_nodes needs at least one node");
  std::vector<double> pts(n);
  // cos((2j-1)pi/(2N)) rewritten as a sine so the set is exactly symmetric
  // and the middle node (odd N) is exactly zero.
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = 2.0 * static_cast<double>(i) + 1.0 - nn;
    pts[i] = std::sin(std::numbers::pi * k / (2.0 * nn));
  }
  return Grid(std::move(pts));
}

Grid cheb_nodes(const Domain& d, std::size_t n) {
  Grid ref = cheb_nodes(n);
  std::vector<double> pts(ref.begin(), ref.end());
  for (double& x : pts) x = map_from_ref(d, x);
  return Grid(std::move(pts));
}

Grid equidistant_grid(const Domain& d, std::size_t n) {
  if (n < 2) throw InvalidArgument("equidistant grid needs at least 2 points");
  std::vector<double> pts(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = d.a() + d.width() * static_cast<double>(i) / denom;
  }
  pts.back() = d.b();
  return Grid(std::move(pts));
}

ChebCoeffs cheb_expand(std::span<const double> values, std::size_t k) {
  const std::size_t n = values.size();
  if (n == 0 || k >= n) {
    throw InvalidArgument("cheb_expand needs more nodes than the degree (k=" +
                          std::to_string(k) + ", N=" + std::to_string(n) + ")");
  }
  const double nn = static_cast<double>(n);
  std::vector<double> c(k + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    // Ascending index i is the root with angle (2(N-i)-1)pi/(2N).
    const double theta =
        std::numbers::pi * (2.0 * static_cast<double>(n - i) - 1.0) / (2.0 * nn);
    for (std::size_t j = 0; j <= k; ++j) {
      c[j] += values[i] * std::cos(static_cast<double>(j) * theta);
    }
  }
  for (double& v : c) v *= 2.0 / nn;
  c[0] *= 0.5;
  return ChebCoeffs(std::move(c));
}

}  // namespace ratmin

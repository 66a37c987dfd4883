#pragma once
// Small builders shared by the unit tests.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "mpqhd/mpqhd.hpp"

namespace th {

using mpqhd::Axis;
using mpqhd::cplx;

inline mpqhd::SortSpec sort(std::string label, double mass = 1.0, int count = 1,
                            mpqhd::Statistics st = mpqhd::Statistics::distinguishable) {
  mpqhd::SortSpec s;
  s.label = std::move(label);
  s.mass = mass;
  s.count = count;
  s.statistics = st;
  return s;
}

inline mpqhd::SystemSpec system(std::vector<mpqhd::SortSpec> sorts, int d = 1) {
  mpqhd::SystemSpec s;
  s.sorts = std::move(sorts);
  s.spatial_dim = d;
  return s;
}

/// Normalized 1D packet (2 pi sigma^2)^(-1/4) exp(-(x-x0)^2/(4 sigma^2) + i k x).
inline cplx packet(double x, double x0, double sigma, double k) {
  const double c = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
  const double u = x - x0;
  return c * std::exp(cplx(-u * u / (4.0 * sigma * sigma), k * x));
}

/// Samples f(coordinates) on every configuration point.
inline mpqhd::WaveField sample(const mpqhd::Grid& g, const mpqhd::SystemSpec& spec,
                               const std::function<cplx(const std::vector<double>&)>& f) {
  std::vector<cplx> v(g.size());
  std::vector<double> q(g.mesh.rank());
  for (std::size_t lin = 0; lin < v.size(); ++lin) {
    const auto idx = g.mesh.unravel(lin);
    for (std::size_t k = 0; k < idx.size(); ++k) q[k] = g.mesh.axes[k].x(idx[k]);
    v[lin] = f(q);
  }
  return mpqhd::WaveField(g, spec, std::move(v));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace th

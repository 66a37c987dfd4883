#pragma once
// Fourth-order finite differences along one axis of a row-major N-d array.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mpqhd {

/** @brief Extents of a row-major array; the last axis varies fastest. */
struct Shape {
  std::vector<std::size_t> n;

  std::size_t rank() const { return n.size(); }
  std::size_t size() const {
    std::size_t s = 1;
    for (auto k : n) s *= k;
    return s;
  }
  std::size_t stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t k = axis + 1; k < n.size(); ++k) s *= n[k];
    return s;
  }
};

namespace stencil {

inline constexpr int radius = 2;

// first derivative, times 12h
inline constexpr std::array<double, 5> d1_central{1.0, -8.0, 0.0, 8.0, -1.0};
inline constexpr std::array<double, 5> d1_row0{-25.0, 48.0, -36.0, 16.0, -3.0};
inline constexpr std::array<double, 5> d1_row1{-3.0, -10.0, 18.0, -6.0, 1.0};
// second derivative, times 12h^2
inline constexpr std::array<double, 5> d2_central{-1.0, 16.0, -30.0, 16.0, -1.0};
inline constexpr std::array<double, 6> d2_row0{45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
inline constexpr std::array<double, 6> d2_row1{10.0, -15.0, -4.0, 14.0, -6.0, 1.0};

namespace detail {

// Calls body(line_base, inner_stride) for every 1-D line along `axis`.
template <class F>
void for_each_line_block(const Shape& s, std::size_t axis, F&& body) {
  const std::size_t inner = s.stride(axis);
  const std::size_t len = s.n[axis];
  std::size_t outer = 1;
  for (std::size_t k = 0; k < axis; ++k) outer *= s.n[k];
  for (std::size_t o = 0; o < outer; ++o) body(o * len * inner, inner, len);
}

}  // namespace detail

/// Derivative of order 1 or 2 along `axis` with one-sided rows at both ends.
template <class T>
std::vector<T> derivative(const std::vector<T>& f, const Shape& s, std::size_t axis, double h,
                          int order) {
  if (s.size() != f.size()) throw std::invalid_argument("derivative: shape/data mismatch");
  if (s.n[axis] < 6) throw std::invalid_argument("derivative: axis too short for stencil");
  std::vector<T> out(f.size(), T{});
  const double scale = order == 1 ? 1.0 / (12.0 * h) : 1.0 / (12.0 * h * h);
  detail::for_each_line_block(s, axis, [&](std::size_t base, std::size_t inner, std::size_t len) {
    auto at = [&](std::size_t i) { return base + i * inner; };
    auto row = [&](std::size_t i, const double* c, int npts, std::size_t start, int sign) {
      // start: index of first sample; sign<0 walks backwards (mirrored row)
      T* o = out.data() + at(i);
      for (int q = 0; q < npts; ++q) {
        const std::size_t src = sign > 0 ? start + q : start - q;
        const T* p = f.data() + at(src);
        const double cq = c[q];
        for (std::size_t m = 0; m < inner; ++m) o[m] += cq * p[m];
      }
    };
    const double flip = order == 1 ? -1.0 : 1.0;
    if (order == 1) {
      row(0, stencil::d1_row0.data(), 5, 0, +1);
      row(1, stencil::d1_row1.data(), 5, 0, +1);
    } else {
      row(0, stencil::d2_row0.data(), 6, 0, +1);
      row(1, stencil::d2_row1.data(), 6, 0, +1);
    }
    // mirrored end rows
    {
      std::array<double, 6> c0{}, c1{};
      const int np = order == 1 ? 5 : 6;
      for (int q = 0; q < np; ++q) {
        c0[q] = flip * (order == 1 ? stencil::d1_row0[q] : stencil::d2_row0[q]);
        c1[q] = flip * (order == 1 ? stencil::d1_row1[q] : stencil::d2_row1[q]);
      }
      row(len - 1, c0.data(), np, len - 1, -1);
      row(len - 2, c1.data(), np, len - 1, -1);
    }
    const auto& c = order == 1 ? stencil::d1_central : stencil::d2_central;
    for (std::size_t i = 2; i + 2 < len; ++i) {
      T* o = out.data() + at(i);
      for (int q = 0; q < 5; ++q) {
        if (c[q] == 0.0) continue;
        const T* p = f.data() + at(i + q - 2);
        const double cq = c[q];
        for (std::size_t m = 0; m < inner; ++m) o[m] += cq * p[m];
      }
    }
  });
  for (auto& v : out) v *= scale;
  return out;
}

template <class T>
std::vector<T> d1(const std::vector<T>& f, const Shape& s, std::size_t axis, double h) {
  return derivative(f, s, axis, h, 1);
}

template <class T>
std::vector<T> d2(const std::vector<T>& f, const Shape& s, std::size_t axis, double h) {
  return derivative(f, s, axis, h, 2);
}

/// Central second derivative with zero extension outside the box (symmetric operator).
template <class T>
std::vector<T> d2_zero_extended(const std::vector<T>& f, const Shape& s, std::size_t axis,
                                double h) {
  if (s.size() != f.size()) throw std::invalid_argument("derivative: shape/data mismatch");
  std::vector<T> out(f.size(), T{});
  const double scale = 1.0 / (12.0 * h * h);
  detail::for_each_line_block(s, axis, [&](std::size_t base, std::size_t inner, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
      T* o = out.data() + base + i * inner;
      for (int q = 0; q < 5; ++q) {
        const long j = static_cast<long>(i) + q - 2;
        if (j < 0 || j >= static_cast<long>(len)) continue;
        const T* p = f.data() + base + static_cast<std::size_t>(j) * inner;
        const double cq = stencil::d2_central[q];
        for (std::size_t m = 0; m < inner; ++m) o[m] += cq * p[m];
      }
    }
  });
  for (auto& v : out) v *= scale;
  return out;
}

/// Sixth-order central first derivative, zero extension outside the box.
/// Used for expectation values, where the plane-wave dispersion of the
/// fourth-order stencil, (kh)^4/30, is too coarse.
inline constexpr std::array<double, 7> d1_central6{-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};

template <class T>
std::vector<T> d1_zero_extended6(const std::vector<T>& f, const Shape& s, std::size_t axis, double h) {
  if (s.size() != f.size()) throw std::invalid_argument("derivative: shape/data mismatch");
  std::vector<T> out(f.size(), T{});
  const double scale = 1.0 / (60.0 * h);
  detail::for_each_line_block(s, axis, [&](std::size_t base, std::size_t inner, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
      T* o = out.data() + base + i * inner;
      for (int q = 0; q < 7; ++q) {
        const long j = static_cast<long>(i) + q - 3;
        if (q == 3 || j < 0 || j >= static_cast<long>(len)) continue;
        const T* p = f.data() + base + static_cast<std::size_t>(j) * inner;
        const double cq = d1_central6[static_cast<std::size_t>(q)];
        for (std::size_t m = 0; m < inner; ++m) o[m] += cq * p[m];
      }
    }
  });
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace stencil

}  // namespace mpqhd

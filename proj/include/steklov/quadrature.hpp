#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "steklov/types.hpp"

namespace steklov {

struct QuadratureOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_subdivisions = 4000;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes on [-1, 1] (positive half, node 0 is the midpoint last).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment kronrod15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[j] * s;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * s;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
// Throws Error::Kind::Quadrature if the tolerance is not met within the
// subdivision budget.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (a == b) return 0.0;
  std::priority_queue<detail::Segment> heap;
  auto first = detail::kronrod15(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int splits = 0;
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (++splits > opt.max_subdivisions) {
      throw Error(Error::Kind::Quadrature,
                  "adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                      std::to_string(b) + "], error estimate " + std::to_string(error));
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::kronrod15(f, worst.a, mid);
    auto right = detail::kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // re-sum to shed accumulated cancellation in the running total
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return sum;
}

// Symmetric quadrature rules on the reference triangle, expressed in
// barycentric coordinates; weights sum to one (multiply by the area).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

inline const TriangleRule& triangle_rule(int order) {
  static const TriangleRule centroid{{{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {1.0}};
  static const TriangleRule interior3{
      {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}},
      {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  // Dunavant degree-5, all points strictly interior
  static const TriangleRule dunavant7 = [] {
    const double s15 = std::sqrt(15.0);
    const double b1 = (6.0 + s15) / 21.0, a1 = 1.0 - 2.0 * b1;
    const double b2 = (6.0 - s15) / 21.0, a2 = 1.0 - 2.0 * b2;
    const double w0 = 0.225, w1 = (155.0 + s15) / 1200.0, w2 = (155.0 - s15) / 1200.0;
    return TriangleRule{{{1.0 / 3, 1.0 / 3, 1.0 / 3},
                         {a1, b1, b1},
                         {b1, a1, b1},
                         {b1, b1, a1},
                         {a2, b2, b2},
                         {b2, a2, b2},
                         {b2, b2, a2}},
                        {w0, w1, w1, w1, w2, w2, w2}};
  }();
  switch (order) {
    case 1: return centroid;
    case 3: return interior3;
    default: return dunavant7;
  }
}

// Two-point Gauss-Legendre nodes on [0, 1], weights 1/2 each.
inline constexpr std::array<double, 2> kGauss2Nodes = {0.5 - 0.288675134594812882254574390251,
                                                        0.5 + 0.288675134594812882254574390251};

}  // namespace steklov

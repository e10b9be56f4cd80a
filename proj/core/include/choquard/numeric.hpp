#pragma once

#include <cstdint>
#include <span>

namespace choquard {

/// Pairwise (cascade) summation. Keeps the rounding error of long
/// quadrature reductions near log2(N)*eps instead of N*eps, which the
/// 1e-12 grid/energy contracts rely on at 64^3 points.
double pairwise_sum(std::span<const double> v);

/// Pairwise sum of a*b over two equal-length ranges.
double pairwise_dot(std::span<const double> a, std::span<const double> b);

}  // namespace choquard

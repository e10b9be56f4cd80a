#pragma once

#include <cstdint>
#include <random>

#include "choquard/grid.hpp"

namespace choquard {

/// Gaussian bump of the given width centered at the origin, rescaled to
/// the requested mass. Default init state of the constrained flow.
Field gaussian_bump(const Grid& g, double width, double target_mass);

/// Seeded uniform noise smoothed by one heat step (spectral factor
/// exp(-|k|^2 * h^2)), rescaled to the requested mass.
Field random_smooth_field(const Grid& g, std::uint64_t seed, double target_mass);

/// Mixes independent seeds per probe index so sweep results do not depend
/// on worker count or execution order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace choquard

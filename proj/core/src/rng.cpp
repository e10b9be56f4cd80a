#include "choquard/rng.hpp"

#include <cmath>

#include "choquard/errors.hpp"
#include "choquard/spectral.hpp"

namespace choquard {

Field gaussian_bump(const Grid& g, double width, double target_mass) {
  if (!(width > 0)) throw InvalidArgument("gaussian_bump: width must be positive");
  Field f(g);
  const double inv = 1.0 / (2.0 * width * width);
  for (std::int64_t i = 0; i < f.size(); ++i)
    f[i] = std::exp(-radius_sq_of(g, i) * inv);
  const double m0 = mass(f);
  const double scale = std::sqrt(target_mass / m0);
  for (double& v : f.values()) v *= scale;
  return f;
}

Field random_smooth_field(const Grid& g, std::uint64_t seed, double target_mass) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field f(g);
  for (double& v : f.values()) v = dist(eng);

  std::vector<std::complex<double>> fhat;
  spectral::forward(f, fhat);
  const auto& k2 = spectral::k_squared(g);
  const double tau = g.spacing * g.spacing;
  for (std::size_t i = 0; i < fhat.size(); ++i) fhat[i] *= std::exp(-k2[i] * tau);
  spectral::inverse(g, fhat, f);

  const double m0 = mass(f);
  if (m0 == 0) throw ZeroField("random_smooth_field: degenerate draw");
  const double scale = std::sqrt(target_mass / m0);
  for (double& v : f.values()) v *= scale;
  return f;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the pair.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace choquard

// Additive space-time noise: finitely many spatial modes, each driven by an
// independent scalar Brownian motion, plus the random perturbation of the
// data g.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stvf/fem.hpp"
#include "stvf/mesh.hpp"

namespace stvf {

// One spatial mode sigma_k(t, x, y) with its spatial gradient.
struct NoiseMode {
  std::function<double(double, Point)> value;
  std::function<std::array<double, 2>(double, Point)> gradient;
  bool time_constant = true;
};

struct NoiseModel {
  std::vector<NoiseMode> modes;
  double amplitude = 1.0;  // sigma tilde, applied after interpolation

  std::size_t num_drivers() const { return modes.size(); }
  bool time_constant() const;

  // "paper-sines": sin(4 pi x) sin(4 pi y) and sin(5 pi x) sin(5 pi y).
  // Throws std::invalid_argument for unknown names.
  static NoiseModel preset(std::string_view name, double amplitude);
};

NoiseMode sine_mode(double frequency);

enum class Stream : std::uint32_t { increments = 1, data = 2 };

// Random stream owned by one sample path, keyed by (seed, path, stream).
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path, Stream stream);

  double normal();
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

// One N(0, tau) sample per driver. Throws std::invalid_argument for tau <= 0.
std::vector<double> wiener_increments(PathRng& rng, double tau, std::size_t drivers);

// amplitude * I*(mode_k(t)) on the macro space, one function per mode,
// transferred to `space`. Boundary nodes are exactly zero.
std::vector<FeFunction> sigma_h(const NoiseModel& model, double t, const Mesh& macro,
                                const FeSpace& space);

// sum_k sigma_h[k] * increments[k]
FeFunction noise_term(const std::vector<FeFunction>& sigma, std::span<const double> increments,
                      const Mesh& mesh);

// Sigma^n = Sigma^{n-1} + sum_k sigma_h[k] * increments[k]
FeFunction accumulate_sigma(const FeFunction& previous, const std::vector<FeFunction>& sigma,
                            std::span<const double> increments, const Mesh& mesh);

// xi*_h: amplitude * U(-1, 1) at every interior macro vertex, zero on the boundary.
FeFunction g_perturbation(PathRng& rng, const Mesh& macro, double amplitude = 0.1);

}  // namespace stvf

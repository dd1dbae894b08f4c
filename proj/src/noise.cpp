#include "stvf/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stvf {

bool NoiseModel::time_constant() const {
  for (const auto& m : modes) {
    if (!m.time_constant) return false;
  }
  return true;
}

NoiseMode sine_mode(double frequency) {
  const double k = frequency * std::numbers::pi;
  NoiseMode m;
  m.value = [k](double, Point p) { return std::sin(k * p.x) * std::sin(k * p.y); };
  m.gradient = [k](double, Point p) {
    return std::array<double, 2>{k * std::cos(k * p.x) * std::sin(k * p.y),
                                 k * std::sin(k * p.x) * std::cos(k * p.y)};
  };
  m.time_constant = true;
  return m;
}

NoiseModel NoiseModel::preset(std::string_view name, double amplitude) {
  NoiseModel model;
  model.amplitude = amplitude;
  if (name == "paper-sines") {
    model.modes = {sine_mode(4.0), sine_mode(5.0)};
  } else if (name == "none") {
    model.modes = {};
  } else {
    throw std::invalid_argument("unknown noise preset: " + std::string(name));
  }
  return model;
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t path, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32),
                    static_cast<std::uint32_t>(stream)};
  engine_.seed(seq);
}

double PathRng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

double PathRng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

std::vector<double> wiener_increments(PathRng& rng, double tau, std::size_t drivers) {
  if (!(tau > 0.0)) throw std::invalid_argument("wiener_increments: tau must be positive");
  const double s = std::sqrt(tau);
  std::vector<double> dw(drivers);
  for (double& w : dw) w = s * rng.normal();
  return dw;
}

std::vector<FeFunction> sigma_h(const NoiseModel& model, double t, const Mesh& macro,
                                const FeSpace& space) {
  std::vector<FeFunction> out;
  out.reserve(model.modes.size());
  FeFunction on_macro{std::vector<double>(macro.num_vertices()), macro.generation()};
  for (const auto& mode : model.modes) {
    for (std::size_t i = 0; i < macro.num_vertices(); ++i) {
      const auto v = static_cast<VertexId>(i);
      on_macro[i] = macro.on_boundary(v) ? 0.0 : model.amplitude * mode.value(t, macro.vertex(v));
    }
    out.push_back(transfer(on_macro, macro, space.mesh()));
  }
  return out;
}

FeFunction noise_term(const std::vector<FeFunction>& sigma, std::span<const double> increments,
                      const Mesh& mesh) {
  if (sigma.size() != increments.size()) {
    throw std::invalid_argument("noise_term: one increment per mode required");
  }
  FeFunction out{std::vector<double>(mesh.num_vertices(), 0.0), mesh.generation()};
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    require_on(mesh, {&sigma[k]});
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += increments[k] * sigma[k][i];
  }
  return out;
}

FeFunction accumulate_sigma(const FeFunction& previous, const std::vector<FeFunction>& sigma,
                            std::span<const double> increments, const Mesh& mesh) {
  require_on(mesh, {&previous});
  return previous + noise_term(sigma, increments, mesh);
}

FeFunction g_perturbation(PathRng& rng, const Mesh& macro, double amplitude) {
  FeFunction xi{std::vector<double>(macro.num_vertices(), 0.0), macro.generation()};
  for (std::size_t i = 0; i < macro.num_vertices(); ++i) {
    // Draw for every vertex so the stream does not depend on the boundary layout.
    const double u = amplitude * rng.uniform(-1.0, 1.0);
    if (!macro.on_boundary(static_cast<VertexId>(i))) xi[i] = u;
  }
  return xi;
}

}  // namespace stvf

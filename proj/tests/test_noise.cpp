#include <cmath>
#include <numbers>

#include "doctest.h"
#include "stvf/noise.hpp"

using namespace stvf;

TEST_CASE("path streams are reproducible and distinct") {
  PathRng a(1, 0, Stream::increments), b(1, 0, Stream::increments);
  PathRng c(1, 1, Stream::increments), d(1, 0, Stream::data), e(2, 0, Stream::increments);
  bool differ_path = false, differ_stream = false, differ_seed = false;
  for (int i = 0; i < 16; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differ_path |= x != c.normal();
    differ_stream |= x != d.normal();
    differ_seed |= x != e.normal();
  }
  CHECK(differ_path);
  CHECK(differ_stream);
  CHECK(differ_seed);
}

TEST_CASE("wiener increments have variance tau and independent drivers") {
  PathRng rng(3, 0, Stream::increments);
  const double tau = 1e-3;
  const int n = 40000;
  double s0 = 0.0, s1 = 0.0, q0 = 0.0, q1 = 0.0, c01 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto dw = wiener_increments(rng, tau, 2);
    REQUIRE(dw.size() == 2);
    s0 += dw[0];
    s1 += dw[1];
    q0 += dw[0] * dw[0];
    q1 += dw[1] * dw[1];
    c01 += dw[0] * dw[1];
  }
  const double se_mean = std::sqrt(tau / n);
  CHECK(std::abs(s0 / n) < 5 * se_mean);
  CHECK(std::abs(s1 / n) < 5 * se_mean);
  // Var of a sample variance of N(0, tau) is 2 tau^2 / n.
  const double se_var = tau * std::sqrt(2.0 / n);
  CHECK(std::abs(q0 / n - tau) < 5 * se_var);
  CHECK(std::abs(q1 / n - tau) < 5 * se_var);
  CHECK(std::abs(c01 / n) < 5 * tau / std::sqrt(n));
  CHECK_THROWS_AS(wiener_increments(rng, 0.0, 2), std::invalid_argument);
}

TEST_CASE("data perturbation") {
  const Mesh macro = Mesh::macro(16);
  PathRng rng(4, 0, Stream::data);
  const FeFunction xi = g_perturbation(rng, macro);
  double mean = 0.0;
  int interior = 0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (macro.on_boundary(static_cast<VertexId>(i))) {
      CHECK(xi[i] == 0.0);
    } else {
      CHECK(std::abs(xi[i]) <= 0.1);
      mean += xi[i];
      ++interior;
    }
  }
  mean /= interior;
  // U(-0.1, 0.1) has standard deviation 0.1 / sqrt(3).
  CHECK(std::abs(mean) < 5 * 0.1 / std::sqrt(3.0 * interior));
}

TEST_CASE("sigma_h interpolates the modes and vanishes on the boundary") {
  const auto macro = std::make_shared<const Mesh>(Mesh::macro(8));
  const FeSpace space(macro);
  const NoiseModel model = NoiseModel::preset("paper-sines", 0.25);
  REQUIRE(model.num_drivers() == 2);
  CHECK(model.time_constant());
  const auto sig = sigma_h(model, 0.0, *macro, space);
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const Point p = macro->vertex(static_cast<VertexId>(i));
    if (macro->on_boundary(static_cast<VertexId>(i))) {
      CHECK(sig[0][i] == 0.0);
      CHECK(sig[1][i] == 0.0);
    } else {
      const double pi = std::numbers::pi;
      CHECK(sig[0][i] == doctest::Approx(0.25 * std::sin(4 * pi * p.x) * std::sin(4 * pi * p.y)));
      CHECK(sig[1][i] == doctest::Approx(0.25 * std::sin(5 * pi * p.x) * std::sin(5 * pi * p.y)));
    }
  }
  CHECK_THROWS_AS(NoiseModel::preset("white", 1.0), std::invalid_argument);
}

TEST_CASE("sigma_h on a refined mesh is the transferred macro interpolant") {
  const auto macro = std::make_shared<const Mesh>(Mesh::macro(4));
  std::vector<std::int32_t> marks;
  for (std::size_t t = 0; t < macro->num_triangles(); t += 3) marks.push_back(static_cast<std::int32_t>(t));
  const auto fine = std::make_shared<const Mesh>(refine(refine(*macro, marks), marks));
  const FeSpace cs(macro), fs(fine);
  const NoiseModel model = NoiseModel::preset("paper-sines", 1.0);
  const auto coarse_sig = sigma_h(model, 0.0, *macro, cs);
  const auto fine_sig = sigma_h(model, 0.0, *macro, fs);
  for (std::size_t k = 0; k < 2; ++k) {
    const FeFunction back = transfer(fine_sig[k], *fine, *macro);
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == doctest::Approx(coarse_sig[k][i]));
    CHECK(l2_norm(fs, fine_sig[k]) == doctest::Approx(l2_norm(cs, coarse_sig[k])).epsilon(1e-12));
  }
}

TEST_CASE("noise term and accumulation are linear in the increments") {
  const auto macro = std::make_shared<const Mesh>(Mesh::macro(4));
  const FeSpace space(macro);
  const NoiseModel model = NoiseModel::preset("paper-sines", 0.5);
  const auto sig = sigma_h(model, 0.0, *macro, space);
  const std::vector<double> dw{0.3, -0.7};
  const FeFunction n = noise_term(sig, dw, *macro);
  for (std::size_t i = 0; i < n.size(); ++i) {
    CHECK(n[i] == doctest::Approx(0.3 * sig[0][i] - 0.7 * sig[1][i]));
  }
  const FeFunction acc = accumulate_sigma(n, sig, dw, *macro);
  for (std::size_t i = 0; i < n.size(); ++i) CHECK(acc[i] == doctest::Approx(2.0 * n[i]));
  const std::vector<double> wrong{1.0};
  CHECK_THROWS(noise_term(sig, wrong, *macro));
}

TEST_CASE("sample mean of the accumulated noise norm matches the isometry") {
  const auto macro = std::make_shared<const Mesh>(Mesh::macro(4));
  const FeSpace space(macro);
  const NoiseModel model = NoiseModel::preset("paper-sines", 1.0);
  const auto sig = sigma_h(model, 0.0, *macro, space);
  double per_step = 0.0;
  for (const auto& s : sig) per_step += std::pow(l2_norm(space, s), 2);
  const double tau = 1e-2;
  const int steps = 5, paths = 4000;
  std::vector<double> sum(steps, 0.0), sum_sq(steps, 0.0);
  for (int p = 0; p < paths; ++p) {
    PathRng rng(9, static_cast<std::uint64_t>(p), Stream::increments);
    FeFunction acc = space.zero();
    for (int n = 0; n < steps; ++n) {
      acc = accumulate_sigma(acc, sig, wiener_increments(rng, tau, 2), *macro);
      const double v = std::pow(l2_norm(space, acc), 2);
      sum[n] += v;
      sum_sq[n] += v * v;
    }
  }
  for (int n = 0; n < steps; ++n) {
    const double mean = sum[n] / paths;
    const double se = std::sqrt((sum_sq[n] / paths - mean * mean) / paths);
    CHECK(std::abs(mean - (n + 1) * tau * per_step) < 4 * se);
  }
}

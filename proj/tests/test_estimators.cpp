#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "stvf/estimators.hpp"

using namespace stvf;

namespace {

FeFunction random_interior(const FeSpace& s, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  FeFunction f = s.zero();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!s.mesh().on_boundary(static_cast<VertexId>(i))) f[i] = u(rng);
  }
  return f;
}

std::shared_ptr<const Mesh> graded_mesh() {
  Mesh m = Mesh::macro(4);
  for (int p = 0; p < 3; ++p) {
    std::vector<std::int32_t> marks;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      const auto& v = m.triangle(t);
      if (m.vertex(v[0]).x < 0.5) marks.push_back(static_cast<std::int32_t>(t));
    }
    m = refine(m, marks);
  }
  return std::make_shared<const Mesh>(std::move(m));
}

}  // namespace

TEST_CASE("indicators vanish in trivial cases") {
  std::mt19937_64 rng(1);
  const FeSpace s(std::make_shared<const Mesh>(Mesh::macro(4)));
  const FeFunction x = random_interior(s, rng, 1.0);
  const FeFunction z = s.zero();
  const auto tm = eta_time(s, x, x);
  CHECK(tm.eta1 == 0.0);
  CHECK(tm.eta2 == 0.0);
  CHECK(eta_lin(s, x, x, 1.0 / 32.0) == 0.0);
  for (double j : jump_residual(s, z, 1.0 / 32.0)) CHECK(j == 0.0);
  // X^n = X^{n-1} = g and no noise: the residual is zero.
  for (double r : interior_residual(s, x, x, x, z, 1e-3, 200.0)) CHECK(r == doctest::Approx(0.0));
}

TEST_CASE("time indicators satisfy the Poincare inequality") {
  std::mt19937_64 rng(2);
  const FeSpace s(graded_mesh());
  for (int k = 0; k < 10; ++k) {
    const auto tm = eta_time(s, random_interior(s, rng, 1.0), random_interior(s, rng, 1.0));
    CHECK(tm.eta1 > 0.0);
    CHECK(tm.eta1 <= tm.eta2 / (std::numbers::pi * std::sqrt(2.0)));
  }
}

TEST_CASE("per-element indicators count interior edges twice") {
  std::mt19937_64 rng(3);
  const FeSpace s(graded_mesh());
  const FeFunction xn = random_interior(s, rng, 1.0), xp = random_interior(s, rng, 1.0);
  const FeFunction g = random_interior(s, rng, 1.0), noise = random_interior(s, rng, 1e-3);
  const auto sp = eta_space(s, interior_residual(s, xn, xp, g, noise, 1e-3, 200.0),
                            jump_residual(s, xn, 1.0 / 32.0));
  double sum = 0.0;
  for (double e : sp.per_element) sum += e;
  CHECK(sp.per_element.size() == s.mesh().num_triangles());
  CHECK(sum == doctest::Approx(sp.eta1 + 2.0 * sp.eta2).epsilon(1e-12));
}

TEST_CASE("space indicators against brute-force references") {
  std::mt19937_64 rng(4);
  const auto mesh = graded_mesh();
  const FeSpace s(mesh);
  const FeFunction xn = random_interior(s, rng, 1.0), xs = random_interior(s, rng, 1.0);
  // With X^n = X^{n-1} = 0, lambda = 0 and tau = 1 the residual is the noise.
  const FeFunction r = random_interior(s, rng, 1.0);
  const FeFunction z = s.zero();
  const std::vector<double> no_jumps(s.mesh().num_edges(), 0.0);
  const auto sp1 = eta_space(s, interior_residual(s, z, z, z, r, 1.0, 0.0), no_jumps);
  CHECK(sp1.eta1 == doctest::Approx(oracle::eta_space1(*mesh, r.values)).epsilon(1e-12));
  const auto sp2 = eta_space(s, std::vector<double>(s.mesh().num_triangles(), 0.0),
                             jump_residual(s, xn, 0.05));
  CHECK(sp2.eta2 == doctest::Approx(oracle::eta_space2(*mesh, xn.values, 0.05)).epsilon(1e-12));
  CHECK(eta_lin(s, xn, xs, 0.05) ==
        doctest::Approx(oracle::eta_lin(*mesh, xn.values, xs.values, 0.05)).epsilon(1e-12));
}

TEST_CASE("residual part scales with h^2") {
  const auto coarse = std::make_shared<const Mesh>(Mesh::macro(4));
  const auto fine = std::make_shared<const Mesh>(Mesh::macro(8));
  const FeSpace cs(coarse), fs(fine);
  const auto one = [](Point) { return 1.0; };
  // A constant residual: sum_T h_T^2 |T| scales like h^2.
  const auto constant_residual = [](const FeSpace& s, std::function<double(Point)> f) {
    const FeFunction x = s.zero();
    const FeFunction g = s.interpolate(f);
    return eta_space(s, interior_residual(s, x, x, g, s.zero(), 1.0, 1.0),
                     std::vector<double>(s.mesh().num_edges(), 0.0))
        .eta1;
  };
  CHECK(constant_residual(cs, one) / constant_residual(fs, one) == doctest::Approx(4.0));
}

TEST_CASE("serial and parallel indicator kernels agree") {
  std::mt19937_64 rng(5);
  const FeSpace s(graded_mesh());
  const FeFunction xn = random_interior(s, rng, 1.0), xp = random_interior(s, rng, 1.0);
  const FeFunction g = random_interior(s, rng, 1.0);
  const auto r_s = interior_residual(s, xn, xp, g, s.zero(), 1e-3, 200.0, Exec::serial);
  const auto r_p = interior_residual(s, xn, xp, g, s.zero(), 1e-3, 200.0, Exec::parallel);
  CHECK(r_s == r_p);
  const auto j_s = jump_residual(s, xn, 0.1, Exec::serial);
  const auto j_p = jump_residual(s, xn, 0.1, Exec::parallel);
  CHECK(j_s == j_p);
  CHECK(eta_space(s, r_s, j_s, Exec::serial).per_element ==
        eta_space(s, r_p, j_p, Exec::parallel).per_element);
  CHECK(eta_lin(s, xn, xp, 0.1, Exec::serial) ==
        doctest::Approx(eta_lin(s, xn, xp, 0.1, Exec::parallel)).epsilon(1e-14));
}

TEST_CASE("noise indicators") {
  const Mesh macro = Mesh::macro(8);

  SUBCASE("linearly growing mode") {
    NoiseModel model;
    model.amplitude = 0.5;
    const double pi = std::numbers::pi;
    model.modes.push_back(
        {[pi](double t, Point p) { return t * std::sin(pi * p.x) * std::sin(pi * p.y); },
         [pi](double t, Point p) {
           return std::array<double, 2>{t * pi * std::cos(pi * p.x) * std::sin(pi * p.y),
                                        t * pi * std::sin(pi * p.x) * std::cos(pi * p.y)};
         },
         false});
    NoiseHistory h(model, macro);
    CHECK(h.norm_sq(1.0)[0] == doctest::Approx(0.25 * 0.25).epsilon(1e-3));
    const double tau = 1e-2;
    const auto first = h.advance(0.0, tau);
    // sigma(0) = 0, so only the drift term remains: trapezoid of t^2 on 8 cells.
    const double phi = h.norm_sq(1.0)[0];
    CHECK(first.eta3 ==
          doctest::Approx(phi * (std::pow(tau, 3) / 3.0 + std::pow(tau, 3) / 384.0)).epsilon(1e-12));
    CHECK(first.eta1 > 0.0);
    const auto second = h.advance(tau, 2 * tau);
    CHECK(second.eta1 > first.eta1);
  }

  SUBCASE("hat function is interpolated exactly") {
    const Mesh m1 = Mesh::macro(1);
    NoiseModel model;
    model.modes.push_back(
        {[](double, Point p) { return 1.0 - 2.0 * std::max(std::abs(p.x - 0.5), std::abs(p.y - 0.5)); },
         [](double, Point p) {
           const double dx = p.x - 0.5, dy = p.y - 0.5;
           if (std::abs(dx) >= std::abs(dy)) return std::array<double, 2>{dx > 0 ? -2.0 : 2.0, 0.0};
           return std::array<double, 2>{0.0, dy > 0 ? -2.0 : 2.0};
         },
         true});
    NoiseHistory h(model, m1);
    const auto e = h.interpolation_sq(0.0);
    CHECK(e[0] == doctest::Approx(0.0));
    CHECK(e[1] == doctest::Approx(0.0));
    const auto nz = h.advance(0.0, 1e-3);
    CHECK(nz.eta3 == doctest::Approx(0.0));
    // ||hat||^2 = 1/6 and the double time integral is tau^2/2.
    CHECK(nz.eta1 == doctest::Approx(0.5e-6 / 6.0).epsilon(1e-12));
  }

  SUBCASE("empty steps are rejected") {
    const NoiseModel model = NoiseModel::preset("paper-sines", 0.25);
    NoiseHistory h(model, macro);
    CHECK_THROWS_AS(h.advance(0.1, 0.1), std::invalid_argument);
  }
}

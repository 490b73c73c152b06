#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "full_system_oracle.hpp"
#include "modica/minimize.hpp"
#include "oracles.hpp"

using namespace modica;

namespace {

HalfCellField sampled_orbit(const Grid& g) {
  return gl_profile_field(g);
}

HalfCellField random_interior(const Grid& g, std::uint64_t seed, double lo, double hi) {
  oracle::TestRng rng(seed);
  HalfCellField f;
  f.v.resize(g.n);
  for (int i = 0; i + 1 < g.n; ++i) f.v[i] = rng.in(lo, hi);
  f.v.back() = 0.0;
  return f;
}

}  // namespace

TEST_CASE("energy of landmark fields", "[minimize]") {
  const PotentialParams p0{0.0};

  // the zero field costs exactly W(0,0) L = L/4 = pi/(8 theta)
  {
    const Grid g = build_grid(0.1, 513);
    HalfCellField zero;
    zero.v.assign(g.n, 0.0);
    CHECK(reduced_energy(zero, g, p0) ==
          Catch::Approx(std::numbers::pi / 0.8).epsilon(1e-13));
  }

  // sampled orbit reproduces the closed-form energy to O(h^2)
  {
    const Grid g = build_grid(0.1, 4097);
    CHECK(reduced_energy(sampled_orbit(g), g, p0) ==
          Catch::Approx(0.078147117258046106).margin(1e-5));
  }

  // a constant pair at a potential minimum has zero energy; the pair lives
  // outside the encoded symmetry class but energy() is defined on any pair
  {
    const Grid g = build_grid(0.5, 101);
    const std::vector<double> ones(g.n, 1.0);
    const std::vector<double> zeros(g.n, 0.0);
    CHECK(energy(ones, zeros, g, p0) == 0.0);
    CHECK_THROWS_AS(energy(std::vector<double>(g.n - 1, 0.0), zeros, g, p0),
                    std::invalid_argument);
  }
}

TEST_CASE("reduced energy equals full energy of the encoded pair", "[minimize]") {
  const Grid g = build_grid(0.3, 257);
  const PotentialParams p{0.4};
  for (int t = 0; t < 100; ++t) {
    const HalfCellField f = random_interior(g, 900 + t, -1.2, 1.2);
    std::vector<double> u1(g.n), u2(g.n);
    for (int i = 0; i < g.n; ++i) {
      u1[i] = f.v[i];
      u2[i] = f.v[mirror_index(i, g)];
    }
    const double red = reduced_energy(f, g, p);
    const double full = energy(u1, u2, g, p);
    CHECK(red == Catch::Approx(full).epsilon(1e-12));
  }
}

TEST_CASE("reduced energy rejects a loose Dirichlet node", "[minimize]") {
  const Grid g = build_grid(0.3, 65);
  HalfCellField f;
  f.v.assign(g.n, 0.0);
  f.v.back() = 1e-8;
  CHECK_THROWS_AS(reduced_energy(f, g, PotentialParams{0.0}), std::invalid_argument);
}

TEST_CASE("reduced gradient matches finite differences", "[minimize]") {
  const Grid g = build_grid(0.3, 257);
  const PotentialParams p{0.25};
  for (int t = 0; t < 5; ++t) {
    const HalfCellField f = random_interior(g, 3100 + t, -1.0, 1.0);
    const auto grad = reduced_gradient(f, g, p);
    const auto fd = oracle::fd_field_gradient(
        [&](const HalfCellField& x) { return reduced_energy(x, g, p); }, f);
    REQUIRE(grad.size() == fd.size());
    for (std::size_t i = 0; i < grad.size(); ++i)
      CHECK(grad[i] == Catch::Approx(fd[i]).margin(1e-8));
    CHECK(grad.back() == 0.0);
  }
}

TEST_CASE("sampled orbit is nearly stationary at eps = 0", "[minimize]") {
  const Grid g = build_grid(0.1, 257);
  const auto grad = reduced_gradient(sampled_orbit(g), g, PotentialParams{0.0});
  double gnorm = 0.0;
  for (double x : grad) gnorm = std::max(gnorm, std::abs(x));
  CHECK(gnorm <= g.h * g.h);
}

TEST_CASE("descent from the sampled orbit converges immediately at eps = 0",
          "[minimize]") {
  SolverConfig cfg;
  cfg.theta = 0.1;
  cfg.epsilon = 0.0;
  cfg.n = 257;
  const Grid g = build_grid(cfg.theta, cfg.n);
  const HalfCellField start = sampled_orbit(g);
  const double E0 = reduced_energy(start, g, PotentialParams{0.0});
  const MinimizeOutcome out = descend(start, cfg);
  CHECK(out.descent_converged);
  CHECK(out.energy <= E0 + 1e-15);
  CHECK(out.grad_inf_norm <= cfg.descent_tol);
}

TEST_CASE("descent accepts the exact zero field as a critical point", "[minimize]") {
  SolverConfig cfg;
  cfg.theta = 0.1;
  cfg.epsilon = 0.0;
  cfg.n = 129;
  const Grid g = build_grid(cfg.theta, cfg.n);
  HalfCellField zero;
  zero.v.assign(g.n, 0.0);
  const MinimizeOutcome out = descend(zero, cfg);
  CHECK(out.descent_converged);
  CHECK(out.descent_iterations == 0);
  CHECK(out.energy == Catch::Approx(std::numbers::pi / 0.8).epsilon(1e-13));
}

TEST_CASE("descent energies are monotone and beat the constant state", "[minimize]") {
  SolverConfig cfg;
  cfg.theta = 0.1;
  cfg.epsilon = 0.1;
  cfg.n = 257;
  cfg.seed = 42;
  const Grid g = build_grid(cfg.theta, cfg.n);
  const MinimizeOutcome out = descend(random_perturbed_field(g, cfg.seed), cfg);
  CHECK(out.descent_converged);
  for (std::size_t k = 1; k < out.descent_energies.size(); ++k)
    CHECK(out.descent_energies[k] <= out.descent_energies[k - 1]);
  CHECK(out.energy < std::numbers::pi / 0.8);
}

TEST_CASE("seeded starts are reproducible", "[minimize]") {
  const Grid g = build_grid(0.2, 129);
  const HalfCellField a = random_perturbed_field(g, 7);
  const HalfCellField b = random_perturbed_field(g, 7);
  const HalfCellField c = random_perturbed_field(g, 8);
  CHECK(a.v == b.v);
  CHECK(a.v != c.v);
  CHECK(a.v.back() == 0.0);
}

TEST_CASE("newton refines a descent output to deep stationarity", "[minimize]") {
  SolverConfig cfg;
  cfg.theta = 0.1;
  cfg.epsilon = 0.1;
  cfg.n = 257;
  const Grid g = build_grid(cfg.theta, cfg.n);
  const MinimizeOutcome coarse = descend(random_perturbed_field(g, 3), cfg);
  REQUIRE(coarse.descent_converged);
  const MinimizeOutcome fine = newton_refine(coarse.field, cfg);
  CHECK(fine.newton_converged);
  CHECK(fine.newton_iterations <= 10);
  CHECK(fine.grad_inf_norm <= cfg.newton_tol);
}

TEST_CASE("newton limit of the discrete problem is O(h^2) from the orbit",
          "[minimize]") {
  const auto dist_to_orbit = [](int n) {
    SolverConfig cfg;
    cfg.theta = 0.1;
    cfg.epsilon = 0.0;
    cfg.n = n;
    const Grid g = build_grid(cfg.theta, cfg.n);
    const HalfCellField start = gl_profile_field(g);
    const MinimizeOutcome out = newton_refine(start, cfg);
    REQUIRE(out.newton_converged);
    double d = 0.0;
    for (int i = 0; i < g.n; ++i)
      d = std::max(d, std::abs(out.field.v[i] - start.v[i]));
    return d;
  };
  const double d1 = dist_to_orbit(257);
  const double d2 = dist_to_orbit(513);
  CHECK(d1 < 1e-3);
  CHECK(d1 / d2 == Catch::Approx(4.0).margin(2.0));
}

TEST_CASE("newton reports an unfinished refinement instead of lying",
          "[minimize]") {
  SolverConfig cfg;
  cfg.theta = 0.1;
  cfg.epsilon = 0.0;
  cfg.n = 129;
  cfg.max_newton_iters = 3;  // a start this far needs many more
  const Grid g = build_grid(cfg.theta, cfg.n);
  HalfCellField far;
  far.v.assign(g.n, 10.0);
  far.v.back() = 0.0;
  const MinimizeOutcome out = newton_refine(far, cfg);
  CHECK_FALSE(out.newton_converged);
  CHECK_FALSE(out.diagnostic.empty());
}

TEST_CASE("polish leaves a positive solution untouched", "[minimize]") {
  SolverConfig cfg;
  cfg.theta = 0.1;
  cfg.epsilon = 0.1;
  cfg.n = 257;
  const MinimizeOutcome out = solve(cfg);
  REQUIRE(out.newton_converged);
  REQUIRE(out.interior_positive);
  const MinimizeOutcome again = polish_positive(out.field, cfg);
  CHECK_FALSE(again.polished);
  CHECK(again.field.v == out.field.v);
}

TEST_CASE("polish recovers the positive representative from a flipped sign",
          "[minimize]") {
  SolverConfig cfg;
  cfg.theta = 0.1;
  cfg.epsilon = 0.1;
  cfg.n = 257;
  const MinimizeOutcome out = solve(cfg);
  REQUIRE(out.newton_converged);

  HalfCellField flipped;
  flipped.v.resize(out.field.v.size());
  for (std::size_t i = 0; i < out.field.v.size(); ++i)
    flipped.v[i] = -out.field.v[i];
  flipped.v.back() = 0.0;

  const MinimizeOutcome rec = polish_positive(flipped, cfg);
  CHECK(rec.polished);
  CHECK(rec.interior_positive);
  CHECK(rec.newton_converged);
  CHECK(rec.energy == Catch::Approx(out.energy).epsilon(1e-12));
}

TEST_CASE("solver configuration validation", "[minimize]") {
  SolverConfig cfg;
  cfg.n = 256;  // even
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.n = 257;
  cfg.epsilon = -0.5;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.epsilon = 0.0;
  cfg.theta = 1.5;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.theta = 0.1;
  cfg.descent_tol = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.descent_tol = 1e-6;
  CHECK_NOTHROW(validate(cfg));

  cfg.init_mode = InitMode::custom;
  CHECK_THROWS_AS(initial_field(cfg), std::invalid_argument);
}

TEST_CASE("multistart funnels to one energy level", "[minimize]") {
  SolverConfig cfg;
  cfg.theta = 0.1;
  cfg.epsilon = 0.1;
  cfg.n = 129;
  cfg.seed = 100;
  CHECK_THROWS_AS(multistart(cfg, 1), std::invalid_argument);

  const auto runs = multistart(cfg, 3);
  const MultistartSummary s = summarize(runs);
  REQUIRE(s.converged == 3);
  CHECK(s.energy_spread_rel <= 1e-8);
  CHECK(s.max_pairwise_dist <= 1e-6);
  for (const auto& r : runs) CHECK(r.interior_positive);
}

TEST_CASE("minimizer energy is below every hand-built competitor", "[minimize]") {
  SolverConfig cfg;
  cfg.theta = 0.1;
  cfg.epsilon = 0.05;
  cfg.n = 513;
  const Grid g = build_grid(cfg.theta, cfg.n);
  const PotentialParams p{cfg.epsilon};
  const MinimizeOutcome out = solve(cfg);
  REQUIRE(out.newton_converged);

  HalfCellField zero;
  zero.v.assign(g.n, 0.0);
  CHECK(out.energy <= reduced_energy(zero, g, p) + 1e-12);
  CHECK(out.energy <= reduced_energy(build_test_function(g), g, p) + 1e-12);
  CHECK(out.energy <= reduced_energy(gl_profile_field(g), g, p) + 1e-12);
}

TEST_CASE("plateau competitor: theta-independent energy, small-L rejection",
          "[minimize]") {
  const PotentialParams p0{0.0};
  const Grid g1 = build_grid(0.05, 2049);
  const Grid g2 = build_grid(0.025, 4097);
  const double e1 = reduced_energy(build_test_function(g1), g1, p0);
  const double e2 = reduced_energy(build_test_function(g2), g2, p0);
  CHECK(e1 < std::numbers::pi / (8.0 * 0.05));
  CHECK(e2 < std::numbers::pi / (8.0 * 0.025));
  CHECK(std::abs(e1 - e2) / e1 < 0.05);

  // L = pi < 4: no room for the plateaus
  const Grid tight = build_grid(0.5, 257);
  CHECK_THROWS_AS(build_test_function(tight), std::invalid_argument);
}

TEST_CASE("reduced solver agrees with the independent full-system route",
          "[minimize]") {
  SolverConfig cfg;
  cfg.theta = 0.1;
  cfg.epsilon = 0.1;
  cfg.n = 129;
  const Grid g = build_grid(cfg.theta, cfg.n);
  const MinimizeOutcome red = solve(cfg);
  REQUIRE(red.newton_converged);

  full_oracle::Solver oracle(cfg.theta, cfg.epsilon, cfg.n, g.L);
  full_oracle::Pair start;
  start.u1.resize(g.n);
  start.u2.resize(g.n);
  const double a = std::sqrt(1.0 - cfg.theta * cfg.theta);
  for (int i = 0; i < g.n; ++i) {
    start.u1[i] = a * std::cos(cfg.theta * g.x[i]);
    start.u2[i] = a * std::sin(cfg.theta * g.x[i]);
  }
  start.u1.back() = 0.0;
  start.u2.front() = 0.0;
  const full_oracle::Result full = oracle.run(start, 1e-6, 1e-10, 200000, 50);
  REQUIRE(full.converged);

  double field_diff = 0.0;
  for (int i = 0; i < g.n; ++i) {
    field_diff = std::max(field_diff, std::abs(full.u.u1[i] - red.field.v[i]));
    field_diff = std::max(
        field_diff, std::abs(full.u.u2[i] - red.field.v[mirror_index(i, g)]));
  }
  CHECK(field_diff <= 1e-8);
  CHECK(std::abs(full.energy - red.energy) <= 1e-10);
}

#include <catch2/catch_amalgamated.hpp>

#include "smirnovkit/boundary_data.hpp"
#include "test_support.hpp"

using namespace smirnovkit;
using Catch::Matchers::WithinAbs;

TEST_CASE("boundary weights evaluate and validate", "[boundary]") {
  const BoundaryWeight c = BoundaryWeight::constant(2.0);
  CHECK(c.eval(Complex(0.0, 1.0)) == 2.0);
  CHECK(c.closed_form());

  // w(t) = |2 + t|
  const BoundaryWeight p = BoundaryWeight::abs_poly({Complex(2.0, 0.0), Complex(1.0, 0.0)});
  CHECK_THAT(p.eval(Complex(1.0, 0.0)), WithinAbs(3.0, 1e-15));
  CHECK_THAT(p.eval(Complex(0.0, 1.0)), WithinAbs(std::sqrt(5.0), 1e-15));

  const BoundaryWeight g = BoundaryWeight::grid_samples({1.0, 2.0, 3.0, 4.0});
  CHECK_FALSE(g.closed_form());
  CHECK_THROWS_AS(g.eval(Complex(1.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(BoundaryWeight::constant(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(BoundaryWeight::grid_samples({1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("constant weight synthesizes a constant function", "[boundary]") {
  // the discrete kernel mean carries an alias term 2 z^N / (z^N + 1), so at
  // |z| <= 0.95 a grid of 1024 nodes puts it far below double rounding
  const CircleGrid grid(1024);
  const OuterFunction e(BoundaryWeight::constant(3.0), grid);
  std::mt19937 rng(3);
  for (int i = 0; i < 10; ++i) {
    const Complex z = testsupport::rand_in_disc(rng, 0.95);
    const Complex v = e.value(z);
    CHECK_THAT(v.real(), WithinAbs(3.0, 1e-12));
    CHECK_THAT(v.imag(), WithinAbs(0.0, 1e-12));
  }
  CHECK_THAT(e.log_mean(), WithinAbs(std::log(3.0), 1e-13));
}

TEST_CASE("modulus of an analytic polynomial synthesizes the polynomial back", "[boundary]") {
  // w(t) = |2 + t| has the nonvanishing analytic extension 2 + z, so the
  // synthesized function must match 2 + z pointwise, not only in modulus.
  const CircleGrid grid(4096);
  const OuterFunction e(BoundaryWeight::abs_poly({Complex(2.0, 0.0), Complex(1.0, 0.0)}), grid);
  CHECK_THAT(std::abs(e.value(Complex(0.0, 0.0)) - Complex(2.0, 0.0)), WithinAbs(0.0, 1e-6));
  for (const Complex z : {Complex(0.5, 0.0), Complex(-0.3, 0.4), Complex(0.0, -0.7)})
    CHECK_THAT(std::abs(e.value(z) - (Complex(2.0, 0.0) + z)), WithinAbs(0.0, 1e-6));
}

TEST_CASE("interior log-modulus means of a synthesized function are radius-free", "[boundary]") {
  // the double-grid mean of the sampling kernel is 1 + 2 r^N / (1 - r^N), so
  // r = 0.99 needs N = 4096 before the alias term drops below the tolerance
  const CircleGrid grid(4096);
  const OuterFunction e(BoundaryWeight::abs_poly({Complex(2.0, 0.0), Complex(1.0, 0.0)}), grid);
  const double at_zero = e.log_abs(Complex(0.0, 0.0));
  for (double r : {0.5, 0.9, 0.99}) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j)
      values.push_back(e.log_abs(r * grid.node(j)));
    CHECK_THAT(circle_mean(std::span<const double>(values)), WithinAbs(at_zero, 1e-7));
  }
}

TEST_CASE("boundary modulus of the synthesis equals the weight on the grid", "[boundary]") {
  const CircleGrid grid(512);
  const BoundaryWeight w = BoundaryWeight::abs_poly({Complex(2.0, 0.0), Complex(1.0, 0.0)});
  const OuterFunction e(w, grid);
  for (int j = 0; j < grid.size(); j += 7)
    CHECK_THAT(std::abs(e.boundary(grid.node(j))), WithinAbs(w.eval(grid.node(j)), 1e-10));
}

TEST_CASE("synthesis rejects non-unimodular normalizations and dead weights", "[boundary]") {
  const CircleGrid grid(64);
  CHECK_THROWS_AS(OuterFunction(BoundaryWeight::constant(1.0), grid, Complex(2.0, 0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(OuterFunction(std::vector<double>(64, 0.0), grid), std::invalid_argument);
  CHECK_THROWS_AS(OuterFunction(std::vector<double>(32, 1.0), grid), std::invalid_argument);
}

TEST_CASE("a vanishing weight node is dropped and reported", "[boundary]") {
  const CircleGrid grid(64);
  std::vector<double> samples(64, 1.0);
  samples[10] = 0.0;
  const OuterFunction e(samples, grid);
  CHECK_THAT(e.dropped_mass(), WithinAbs(1.0 / 64.0, 1e-15));
  CHECK_THROWS_AS(e.boundary(grid.node(10)), std::domain_error);
  CHECK_NOTHROW(e.boundary(grid.node(11)));
}

TEST_CASE("atomic boundary measures validate and report mass", "[boundary]") {
  const AtomicSingularMeasure mu({{Complex(1.0, 0.0), 1.0}});
  CHECK_THAT(mu.total_mass(), WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(AtomicSingularMeasure({{Complex(0.5, 0.0), 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(AtomicSingularMeasure({{Complex(1.0, 0.0), -1.0}}), std::invalid_argument);
}

TEST_CASE("one-atom exponential transform has hand-checked values", "[boundary]") {
  const AtomicSingularMeasure mu({{Complex(1.0, 0.0), 1.0}});
  const Complex at0 = singular_inner_value(mu, Complex(0.0, 0.0));
  CHECK_THAT(at0.real(), WithinAbs(0.36787944117144233, 1e-15));
  CHECK_THAT(at0.imag(), WithinAbs(0.0, 1e-15));
  const Complex at_half = singular_inner_value(mu, Complex(0.5, 0.0));
  CHECK_THAT(at_half.real(), WithinAbs(0.049787068367863944, 1e-15));
  const Complex at_halfi = singular_inner_value(mu, Complex(0.0, 0.5));
  CHECK_THAT(at_halfi.real(), WithinAbs(0.3823607490345031, 1e-15));
  CHECK_THAT(at_halfi.imag(), WithinAbs(-0.3936933699085822, 1e-15));
}

TEST_CASE("exponential transform is unimodular on the circle except at atoms", "[boundary]") {
  const AtomicSingularMeasure mu({{Complex(1.0, 0.0), 1.0}, {Complex(0.0, 1.0), 0.5}});
  const CircleGrid grid(128);
  for (int j = 0; j < grid.size(); j += 5)
    CHECK_THAT(std::abs(singular_inner_boundary(mu, grid.node(j))), WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(singular_inner_boundary(mu, Complex(1.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(singular_inner_boundary(mu, Complex(0.0, 1.0)), std::domain_error);
}

TEST_CASE("kernel sums have positive real part in the disc and none on the circle",
          "[boundary]") {
  const std::vector<CircleAtom> atoms = {{Complex(1.0, 0.0), 1.0}, {Complex(-1.0, 0.0), 2.0}};
  std::mt19937 rng(9);
  for (int i = 0; i < 20; ++i) {
    const Complex z = testsupport::rand_in_disc(rng, 0.9);
    CHECK(herglotz_sum_value(atoms, z).real() > 0.0);
  }
  // at z = 0 the sum equals the total mass
  const Complex at0 = herglotz_sum_value(atoms, Complex(0.0, 0.0));
  CHECK_THAT(at0.real(), WithinAbs(3.0, 1e-15));
  CHECK_THAT(at0.imag(), WithinAbs(0.0, 1e-15));
  // boundary values away from atoms are purely imaginary
  const Complex bd = herglotz_sum_boundary(atoms, Complex(0.0, 1.0));
  CHECK_THAT(bd.real(), WithinAbs(0.0, 1e-13));
}

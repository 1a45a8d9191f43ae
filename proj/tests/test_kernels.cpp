#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mlin/grid.hpp"
#include "mlin/kernels.hpp"

using namespace mlin;

TEST_CASE("kernel value at the origin and positivity") {
  for (double t : {0.5, 1.0, 2.0}) {
    for (double gamma : {0.5, 1.0, 4.0}) {
      HKernelParams p{t, gamma, 1};
      CHECK(h_kernel_radial(0.0, p) == doctest::Approx(1.0));
      for (double rho : {0.1, 1.0, 10.0, 1e4}) {
        double v = h_kernel_radial(rho, p);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_CASE("submultiplicativity on the default lattice") {
  // H(x-y) >= H(x) H(y) holds exactly for lattice pairs once |x y| clears
  // 2/(4 pi^2); the default experiment spacing 1/4 does. Off-lattice pairs
  // with both points close to zero only satisfy it up to a constant
  // (see kernel_submult_min_ratio below).
  HKernelParams p{1.0, 2.0, 1};
  {
    double x = 0.7, y = -1.3;
    double lhs = h_kernel_radial(std::abs(x - y), p);
    double rhs = h_kernel_radial(std::abs(x), p) * h_kernel_radial(std::abs(y), p);
    CHECK(lhs >= rhs);
  }
  std::mt19937_64 rng(123);
  const double dx = 0.25;
  std::uniform_int_distribution<int> lattice(-128, 127);
  int worst_seen = 0;
  for (int it = 0; it < 100000; ++it) {
    double x = lattice(rng) * dx, y = lattice(rng) * dx;
    double lhs = h_kernel_radial(std::abs(x - y), p);
    double rhs = h_kernel_radial(std::abs(x), p) * h_kernel_radial(std::abs(y), p);
    if (!(lhs >= rhs * (1.0 - 1e-13))) ++worst_seen;
  }
  CHECK(worst_seen == 0);
}

TEST_CASE("submultiplicativity constant for arbitrary pairs") {
  Baselines base(default_baseline_path());
  HKernelParams p{1.0, 2.0, 1};
  std::mt19937_64 rng(321);
  std::uniform_real_distribution<double> uni(-50.0, 50.0);
  double min_ratio = 1e300;
  for (int it = 0; it < 100000; ++it) {
    double x = uni(rng), y = uni(rng);
    double lhs = h_kernel_radial(std::abs(x - y), p);
    double rhs = h_kernel_radial(std::abs(x), p) * h_kernel_radial(std::abs(y), p);
    if (rhs > 0) min_ratio = std::min(min_ratio, lhs / rhs);
  }
  base.check("kernel_submult_min_ratio_t1_g2", min_ratio);
}

TEST_CASE("radially nonincreasing") {
  HKernelParams p{0.7, 1.3, 1};
  double prev = h_kernel_radial(0.0, p);
  for (double rho = 0.05; rho < 30.0; rho += 0.05) {
    double v = h_kernel_radial(rho, p);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("large-argument asymptote") {
  // t = 2, gamma = 1: value ~ (2 pi x)^{-2} (2 ln(2 pi x))^{-1/2}
  HKernelParams p{2.0, 1.0, 1};
  for (double x : {100.0, 1000.0, 10000.0}) {
    double asym = std::pow(2.0 * std::numbers::pi * x, -2.0) *
                  std::pow(2.0 * std::log(2.0 * std::numbers::pi * x), -0.5);
    double ratio = h_kernel_radial(x, p) / asym;
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
  }
}

TEST_CASE("bracket values") {
  double zero[1] = {0.0};
  CHECK(bracket(std::span<const double>(zero, 1)) == doctest::Approx(1.0));
  double x1[1] = {1.0 / (2.0 * std::numbers::pi)};
  CHECK(bracket(std::span<const double>(x1, 1)) == doctest::Approx(std::sqrt(2.0)));
  double x2[2] = {3.0 / (2.0 * std::numbers::pi), 4.0 / (2.0 * std::numbers::pi)};
  CHECK(bracket(std::span<const double>(x2, 2)) == doctest::Approx(std::sqrt(26.0)));
}

TEST_CASE("bracket Peetre inequality with explicit constant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-20.0, 20.0);
  for (int it = 0; it < 20000; ++it) {
    double x[1] = {uni(rng)}, y[1] = {uni(rng)}, s[1] = {x[0] + y[0]};
    double lhs = bracket(std::span<const double>(s, 1));
    double rhs = std::sqrt(2.0) * bracket(std::span<const double>(x, 1)) *
                 bracket(std::span<const double>(y, 1));
    CHECK(lhs <= rhs * (1.0 + 1e-13));
  }
}

TEST_CASE("Lp finiteness witness matches the threshold law") {
  {
    LpWitness w = h_lp_finiteness_witness(HKernelParams{2.0, 1.0, 1}, 1.0);
    CHECK(w.verdict == LpVerdict::finite);  // t > n/p
    CHECK(w.trend_matches_verdict);
  }
  {
    LpWitness w = h_lp_finiteness_witness(HKernelParams{1.0, 4.0, 1}, 1.0);
    CHECK(w.verdict == LpVerdict::finite);  // t = n/p, gamma > 2/p
    CHECK(w.trend_matches_verdict);
  }
  {
    LpWitness w = h_lp_finiteness_witness(HKernelParams{1.0, 1.0, 1}, 1.0);
    CHECK(w.verdict == LpVerdict::infinite);  // gamma = 1 <= 2/p
    // masses grow without a visible plateau
    const auto k = w.masses.size();
    CHECK(w.masses[k - 1] > w.masses[k - 2]);
    CHECK(w.trend_matches_verdict);
  }
  CHECK_THROWS(h_lp_finiteness_witness(HKernelParams{1.0, 1.0, 1}, 0.0));
}

TEST_CASE("transform asymptotics: two-sided small-frequency law and tail") {
  Baselines base(default_baseline_path());
  HKernelParams p{0.5, 2.0, 1};
  Grid g = make_grid(1, 1 << 15, 256.0);
  HhatReport rep = h_hat_asymptotics_check(p, g);
  CHECK(rep.ratio_min > 0);
  CHECK(rep.ratio_max < std::numeric_limits<double>::infinity());
  base.check("hhat_ratio_min_t05_g2", rep.ratio_min);
  base.check("hhat_ratio_max_t05_g2", rep.ratio_max);
  base.check("hhat_tail_const_t05_g2", rep.tail_constant);

  // stability under doubling the resolution
  Grid g2 = make_grid(1, 1 << 16, 256.0);
  HhatReport rep2 = h_hat_asymptotics_check(p, g2);
  CHECK(std::abs(rep2.ratio_min - rep.ratio_min) < 0.02 * rep.ratio_min);
  CHECK(std::abs(rep2.ratio_max - rep.ratio_max) < 0.02 * rep.ratio_max);

  // doubling the box moves the mid-range ratios by little
  Grid g3 = make_grid(1, 1 << 16, 512.0);
  HhatReport rep3 = h_hat_asymptotics_check(p, g3);
  CHECK(std::abs(rep3.ratio_min - rep.ratio_min) < 0.02 * rep.ratio_min);
  CHECK(std::abs(rep3.ratio_max - rep.ratio_max) < 0.02 * rep.ratio_max);

  // exponential tail at a spot frequency: |Hhat(4)| <= C e^{-2}
  Field h = sample([&](std::span<const double> x) { return cplx(h_kernel_eval(x, p), 0); }, g);
  Field hh = forward_ft(h);
  int k4 = 4 * static_cast<int>(g.box_length);  // bin of xi = 4
  double mag = std::abs(hh.values[k4]);
  CHECK(mag <= base.upper("hhat_tail_const_t05_g2") * std::exp(-2.0));

  // the transform of the real even kernel is real and even
  const int pp = g.points_per_axis;
  double max_im = 0, max_asym = 0;
  for (int k = 1; k < pp; ++k) {
    max_im = std::max(max_im, std::abs(hh.values[k].imag()));
    max_asym = std::max(max_asym, std::abs(hh.values[k] - hh.values[(pp - k) % pp]));
  }
  CHECK(max_im < 1e-11);
  CHECK(max_asym < 1e-11);

  CHECK_THROWS(h_hat_asymptotics_check(HKernelParams{1.5, 2.0, 1}, g));  // needs t < n
}

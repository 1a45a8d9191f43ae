#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "mlin/field_io.hpp"
#include "mlin/grid.hpp"
#include "mlin/kernels.hpp"

using namespace mlin;

namespace {

Field random_band_limited(const Grid& g, int max_bin, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Field spec;
  spec.grid = g;
  spec.space = Space::spectral;
  spec.values.assign(g.total_points(), cplx(0, 0));
  std::vector<int> idx(g.dims);
  for (std::size_t flat = 0; flat < spec.values.size(); ++flat) {
    g.unravel(flat, idx.data());
    bool in_band = true;
    for (int a = 0; a < g.dims; ++a)
      if (std::abs(g.signed_index(idx[a])) > max_bin) in_band = false;
    if (in_band) spec.values[flat] = cplx(uni(rng), uni(rng));
  }
  return inverse_ft(spec);
}

}  // namespace

TEST_CASE("make_grid derived quantities") {
  Grid g = make_grid(1, 8, 8.0);
  CHECK(g.spacing() == doctest::Approx(1.0));
  CHECK(g.freq_step() == doctest::Approx(0.125));
  CHECK(g.nyquist() == doctest::Approx(0.5));

  Grid g2 = make_grid(2, 256, 32.0);
  CHECK(g2.spacing() == doctest::Approx(0.125));
  CHECK(g2.freq_step() == doctest::Approx(1.0 / 32));

  CHECK_THROWS(make_grid(1, 7, 8.0));
  CHECK_THROWS(make_grid(0, 8, 8.0));
  CHECK_THROWS(make_grid(5, 8, 8.0));
  CHECK_THROWS(make_grid(1, 8, -1.0));
}

TEST_CASE("sample basics") {
  Grid g = make_grid(1, 64, 8.0);
  Field one = sample([](std::span<const double>) { return cplx(1, 0); }, g);
  for (const auto& v : one.values) CHECK(v == cplx(1, 0));

  // lattice harmonic: unit modulus, single spectral bin
  const double L = g.box_length;
  Field harm = sample(
      [&](std::span<const double> x) {
        double ph = 2.0 * std::numbers::pi * x[0] / L;
        return cplx(std::cos(ph), std::sin(ph));
      },
      g);
  for (const auto& v : harm.values) CHECK(std::abs(v) == doctest::Approx(1.0));
  Field hs = forward_ft(harm);
  for (int k = 0; k < g.points_per_axis; ++k) {
    double mag = std::abs(hs.values[k]);
    if (g.signed_index(k) == 1) {
      CHECK(mag == doctest::Approx(L));  // box mass of the harmonic
    } else {
      CHECK(mag < 1e-10 * L);
    }
  }

  // kernel value at the origin
  HKernelParams hp{1.0, 2.0, 1};
  Field hk = sample([&](std::span<const double> x) { return cplx(h_kernel_eval(x, hp), 0); }, g);
  CHECK(hk.values[g.points_per_axis / 2].real() == doctest::Approx(1.0));

  CHECK_THROWS(sample([](std::span<const double> x) { return cplx(1.0 / (x[0] - x[0]), 0); }, g));
}

TEST_CASE("forward_ft matches the continuum transform on a Gaussian") {
  Grid g = make_grid(1, 512, 16.0);
  Field f = sample(
      [](std::span<const double> x) {
        return cplx(std::exp(-std::numbers::pi * x[0] * x[0]), 0);
      },
      g);
  Field fh = forward_ft(f);
  for (int k = 0; k < g.points_per_axis; ++k) {
    const double xi = g.freq(k);
    const double expect = std::exp(-std::numbers::pi * xi * xi);
    CHECK(std::abs(fh.values[k] - cplx(expect, 0)) < 1e-8);
  }
}

TEST_CASE("forward_ft of the constant concentrates at zero") {
  Grid g = make_grid(1, 64, 8.0);
  Field one = sample([](std::span<const double>) { return cplx(1, 0); }, g);
  Field oh = forward_ft(one);
  for (int k = 0; k < g.points_per_axis; ++k) {
    if (g.signed_index(k) == 0) {
      CHECK(std::abs(oh.values[k] - cplx(8.0, 0)) < 1e-10);
    } else {
      CHECK(std::abs(oh.values[k]) < 1e-10);
    }
  }
}

TEST_CASE("round trip and Parseval") {
  for (int dims : {1, 2}) {
    Grid g = make_grid(dims, dims == 1 ? 256 : 32, 16.0);
    Field f = random_band_limited(g, g.points_per_axis / 4, 42 + dims);
    Field back = inverse_ft(forward_ft(f));
    double err = 0, scale = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      err = std::max(err, std::abs(back.values[i] - f.values[i]));
      scale = std::max(scale, std::abs(f.values[i]));
    }
    CHECK(err < 1e-10 * scale);

    const double a = lp_norm(f, 2.0);
    const double b = lp_norm(forward_ft(f), 2.0);
    CHECK(std::abs(a - b) < 1e-10 * a);
  }
}

TEST_CASE("real input gives conjugate-symmetric transform") {
  Grid g = make_grid(1, 128, 8.0);
  Field f = random_band_limited(g, 100, 7);
  for (auto& v : f.values) v = cplx(v.real(), 0);
  Field fh = forward_ft(f);
  const int p = g.points_per_axis;
  for (int k = 1; k < p; ++k) {
    cplx a = fh.values[k];
    cplx b = std::conj(fh.values[(p - k) % p]);
    CHECK(std::abs(a - b) < 1e-12 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("lp_norm examples") {
  Grid g = make_grid(1, 64, 8.0);
  Field one = sample([](std::span<const double>) { return cplx(1, 0); }, g);
  CHECK(lp_norm(one, 2.0) == doctest::Approx(std::sqrt(8.0)));

  // bump of width 1, height 1
  Field bump = sample(
      [](std::span<const double> x) { return cplx(std::abs(x[0]) < 0.5 ? 1.0 : 0.0, 0); }, g);
  CHECK(std::abs(lp_norm(bump, 1.0) - 1.0) <= g.spacing() + 1e-12);

  Grid fine = make_grid(1, 512, 16.0);
  Field gauss = sample(
      [](std::span<const double> x) {
        return cplx(std::exp(-std::numbers::pi * x[0] * x[0]), 0);
      },
      fine);
  CHECK(std::abs(lp_norm(gauss, 2.0) - std::pow(2.0, -0.25)) < 1e-6);

  CHECK(lp_norm(gauss, std::numeric_limits<double>::infinity()) == doctest::Approx(1.0));
  CHECK_THROWS(lp_norm(gauss, 0.0));
  CHECK_THROWS(lp_norm(gauss, -1.0));
}

TEST_CASE("refinement consistency of lp_norm") {
  auto fn = [](std::span<const double> x) {
    return cplx(std::exp(-std::numbers::pi * x[0] * x[0]), 0);
  };
  Grid a = make_grid(1, 256, 16.0);
  Grid b = make_grid(1, 512, 16.0);
  for (double p : {1.0, 2.0, 3.0}) {
    double na = lp_norm(sample(fn, a), p);
    double nb = lp_norm(sample(fn, b), p);
    CHECK(std::abs(na - nb) < 1e-8 * na);
  }
}

TEST_CASE("field serialization round trip") {
  Grid g = make_grid(2, 16, 4.0);
  Field f = random_band_limited(g, 6, 11);
  const char* path = "test_field.mlf";
  write_field(f, path);
  Field back = read_field(path);
  REQUIRE(back.grid == f.grid);
  REQUIRE(back.space == f.space);
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(back.values[i] == f.values[i]);

  write_field(f, path, /*single_precision=*/true);
  Field lossy = read_field(path);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    CHECK(std::abs(lossy.values[i] - f.values[i]) < 1e-6);

  write_field_csv(f, "test_field.csv");
  std::remove(path);
  std::remove("test_field.csv");
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mlin/kernels.hpp"
#include "mlin/norms.hpp"

using namespace mlin;

namespace {

Field random_band_limited(const Grid& g, int max_bin, std::uint64_t seed, bool zero_mean = false) {
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
    bool is_zero = true;
    for (int a = 0; a < g.dims; ++a) {
      if (std::abs(g.signed_index(idx[a])) > max_bin) in_band = false;
      if (g.signed_index(idx[a]) != 0) is_zero = false;
    }
    if (in_band && !(zero_mean && is_zero)) spec.values[flat] = cplx(uni(rng), uni(rng));
  }
  return inverse_ft(spec);
}

Field gaussian_1d(const Grid& g) {
  return sample(
      [](std::span<const double> x) {
        return cplx(std::exp(-std::numbers::pi * x[0] * x[0]), 0);
      },
      g);
}

}  // namespace

TEST_CASE("product Sobolev norm: zero orders reduce to the plain norm") {
  Grid g = make_grid(2, 32, 16.0);
  Field f = random_band_limited(g, 8, 1);
  double s[2] = {0.0, 0.0};
  for (double r : {1.0, 1.5, 2.0})
    CHECK(product_sobolev_norm(f, 2, r, std::span<const double>(s, 2)) ==
          doctest::Approx(lp_norm(f, r)));
}

TEST_CASE("product Sobolev norm against the frequency quadrature oracle") {
  // m = 1, n = 1, Gaussian, s = 2, r = 2: Plancherel turns the norm into
  // ( int (1 + 4 pi^2 xi^2)^2 e^{-2 pi xi^2} d xi )^{1/2}
  Grid g = make_grid(1, 512, 16.0);
  Field f = gaussian_1d(g);
  double s[1] = {2.0};
  double got = product_sobolev_norm(f, 1, 2.0, std::span<const double>(s, 1));

  // oracle: fine Simpson quadrature of the closed-form spectral integrand
  const int panels = 200000;
  const double lim = 8.0;
  long double acc = 0;
  const double h = 2.0 * lim / panels;
  auto integrand = [](double xi) {
    double w = 1.0 + 4.0 * std::numbers::pi * std::numbers::pi * xi * xi;
    return w * w * std::exp(-2.0 * std::numbers::pi * xi * xi);
  };
  for (int i = 0; i < panels; ++i) {
    double x0 = -lim + i * h;
    acc += (integrand(x0) + 4.0 * integrand(x0 + h / 2) + integrand(x0 + h)) * (h / 6.0);
  }
  double expect = std::sqrt(static_cast<double>(acc));
  CHECK(std::abs(got - expect) < 1e-6 * expect);
}

TEST_CASE("product Sobolev norm is monotone in the orders") {
  Grid g = make_grid(2, 32, 16.0);
  Field f = random_band_limited(g, 8, 2);
  double lo[2] = {0.5, 1.0};
  double hi[2] = {1.0, 1.5};
  for (double r : {1.5, 2.0}) {
    double a = product_sobolev_norm(f, 2, r, std::span<const double>(lo, 2));
    double b = product_sobolev_norm(f, 2, r, std::span<const double>(hi, 2));
    CHECK(b >= a * (1.0 - 1e-12));
  }
}

TEST_CASE("product Sobolev at r=2 equals the weighted Plancherel sum") {
  Grid g = make_grid(2, 32, 16.0);
  Field f = random_band_limited(g, 8, 3);
  double s[2] = {1.0, 0.7};
  double got = product_sobolev_norm(f, 2, 2.0, std::span<const double>(s, 2));
  // independent route: weighted l2 of the transform, no inverse transform
  Field spec = forward_ft(f);
  std::vector<int> idx(2);
  long double acc = 0;
  for (std::size_t flat = 0; flat < spec.values.size(); ++flat) {
    g.unravel(flat, idx.data());
    double w = 1.0;
    for (int k = 0; k < 2; ++k) {
      double xi[1] = {g.freq(idx[k])};
      w *= std::pow(bracket(std::span<const double>(xi, 1)), s[k]);
    }
    acc += std::norm(spec.values[flat]) * w * w;
  }
  double expect = std::sqrt(static_cast<double>(acc) * std::pow(g.freq_step(), 2));
  CHECK(std::abs(got - expect) < 1e-10 * expect);
}

TEST_CASE("standard Sobolev norm and the comparison bound") {
  Grid g = make_grid(2, 32, 16.0);
  Field f = random_band_limited(g, 8, 4);
  CHECK(standard_sobolev_norm(f, 1.5, 0.0) == doctest::Approx(lp_norm(f, 1.5)));

  // r = 2, s = s_1 + s_2: pointwise weight domination gives C = 1
  double s[2] = {1.0, 1.0};
  double prod = product_sobolev_norm(f, 2, 2.0, std::span<const double>(s, 2));
  double std2 = standard_sobolev_norm(f, 2.0, 2.0);
  CHECK(prod <= std2 * (1.0 + 1e-12));

  // r = 1.5 comparison with a tracked constant
  Baselines base(default_baseline_path());
  double prod15 = product_sobolev_norm(f, 2, 1.5, std::span<const double>(s, 2));
  double std15 = standard_sobolev_norm(f, 1.5, 2.0);
  base.check("sobolev_compare_ratio_m2", prod15 / std15);
}

TEST_CASE("hormander functional: constants are dilation invariant") {
  Grid g = make_grid(2, 64, 4.0);  // nyquist 8
  Symbol sigma = make_symbol(g, 2);
  // wait: product space for m=2, n=1 needs a 1-d factor grid
  Grid factor = make_grid(1, 64, 4.0);
  sigma = make_symbol(factor, 2);
  const cplx c(2.5, -1.0);
  for (auto& v : sigma.values) v = c;
  FrameFamily psi2 = make_frame(FrameKind::Psi_m, 2);
  double s[2] = {1.0, 1.0};
  HormanderOptions opts;
  opts.j_list = std::vector<int>{0, 1, 2};
  NormReport rep = hormander_functional(sigma, psi2, 2.0, std::span<const double>(s, 2), opts);

  // oracle: |c| * || Psi_hat ||_{L^2_s} with the hat sampled directly
  Field hat;
  hat.grid = make_grid(2, 64, 4.0);
  hat.space = Space::physical;
  hat.values.resize(hat.grid.total_points());
  std::vector<int> idx(2);
  std::vector<double> xi(2);
  for (std::size_t flat = 0; flat < hat.values.size(); ++flat) {
    hat.grid.unravel(flat, idx.data());
    for (int a = 0; a < 2; ++a) xi[a] = hat.grid.freq(idx[a]);
    hat.values[flat] = cplx(psi2.hat_at(std::span<const double>(xi.data(), 2)), 0);
  }
  double expect = std::abs(c) * product_sobolev_norm(hat, 2, 2.0, std::span<const double>(s, 2));
  CHECK(rep.value == doctest::Approx(expect).epsilon(1e-10));

  // every j alone gives the same norm for a constant symbol
  for (int j : {0, 1, 2}) {
    HormanderOptions single;
    single.j_list = std::vector<int>{j};
    NormReport one = hormander_functional(sigma, psi2, 2.0, std::span<const double>(s, 2), single);
    CHECK(one.value == doctest::Approx(rep.value).epsilon(1e-12));
  }
  // absolute homogeneity
  Symbol sigma3 = sigma;
  for (auto& v : sigma3.values) v *= 3.0;
  NormReport rep3 = hormander_functional(sigma3, psi2, 2.0, std::span<const double>(s, 2), opts);
  CHECK(rep3.value == doctest::Approx(3.0 * rep.value).epsilon(1e-12));
}

TEST_CASE("hormander functional on the frame profile itself") {
  // sigma = Psi_hat: only |j| <= 1 contributes; cross-check at r = 2 against
  // the weighted Plancherel route
  Grid factor = make_grid(1, 64, 8.0);  // nyquist 4
  FrameFamily psi2 = make_frame(FrameKind::Psi_m, 2);
  Symbol sigma;
  sigma.factor_grid = factor;
  sigma.m = 2;
  sigma.evaluator = [psi2](std::span<const double> xi) {
    return cplx(psi2.hat_at(xi), 0);
  };
  realize_values(sigma);
  double s[2] = {1.0, 1.0};
  HormanderOptions opts;
  opts.j_list = std::vector<int>{-2, -1, 0, 1, 2};
  NormReport rep = hormander_functional(sigma, psi2, 2.0, std::span<const double>(s, 2), opts);
  CHECK(rep.argmax_j >= -1);
  CHECK(rep.argmax_j <= 1);
  // j beyond the overlap gives zero; the sup must persist when they are
  // included, matching the three-scale maximum
  HormanderOptions inner;
  inner.j_list = std::vector<int>{-1, 0, 1};
  NormReport rep_inner =
      hormander_functional(sigma, psi2, 2.0, std::span<const double>(s, 2), inner);
  CHECK(rep.value == doctest::Approx(rep_inner.value).epsilon(1e-12));
}

TEST_CASE("Hardy-Littlewood maximal function") {
  Grid g = make_grid(1, 256, 64.0);
  Field c = sample([](std::span<const double>) { return cplx(3.0, 0); }, g);
  Field mc = hl_maximal(c, 1.0);
  for (const auto& v : mc.values) CHECK(v.real() == doctest::Approx(3.0));

  // single spike: average over the smallest covering cube
  Field spike = sample([](std::span<const double>) { return cplx(0, 0); }, g);
  spike.values[g.points_per_axis / 2] = cplx(1, 0);
  Field ms = hl_maximal(spike, 1.0);
  const double got = ms.values[g.points_per_axis / 2 + 8].real();
  // half-width 8 covers the spike from distance 8: average 1/17
  CHECK(got == doctest::Approx(1.0 / 17.0));
  CHECK(got >= 0.5 / 16.0);
  CHECK(got <= 2.0 / 16.0);

  // monotonicity
  Field f = random_band_limited(g, 32, 5);
  Field gg = f;
  for (auto& v : gg.values) v = std::abs(v) + 0.3;
  for (auto& v : f.values) v = std::abs(v);
  Field mf = hl_maximal(f, 1.0), mg = hl_maximal(gg, 1.0);
  for (std::size_t i = 0; i < mf.values.size(); ++i)
    CHECK(mf.values[i].real() <= mg.values[i].real() + 1e-12);

  // maximal dominates the function
  for (std::size_t i = 0; i < mf.values.size(); ++i)
    CHECK(mf.values[i].real() >= std::abs(f.values[i]) - 1e-12);
}

TEST_CASE("Peetre maximal: constant closed form") {
  // spacing well under the finest weight scale, box long enough that the
  // weight tail 2c/(1 + 2^j L/2) is negligible
  Grid g = make_grid(1, 65536, 1024.0);
  const double c = 0.8;
  Field f = sample([&](std::span<const double>) { return cplx(c, 0); }, g);
  for (int j : {0, 1, 2}) {
    Field pm = peetre_maximal(f, 2.0, j, 1.0);
    // independent discrete oracle: the same lattice quadrature summed directly
    const double twoj = std::exp2(j);
    long double acc = 0;
    for (int i = 0; i < g.points_per_axis; ++i) {
      double y = g.coord(i);
      acc += std::pow(1.0 + twoj * std::abs(y), -2.0);
    }
    double oracle = twoj * c * static_cast<double>(acc) * g.spacing();
    for (int i = 0; i < g.points_per_axis; i += 37)
      CHECK(std::abs(pm.values[i].real() - oracle) < 1e-9 * oracle);
    // continuum value 2c up to box tail and quadrature error
    CHECK(std::abs(pm.values[0].real() - 2.0 * c) < 0.02 * 2.0 * c);
  }
  CHECK_THROWS(peetre_maximal(f, 0.5, 0, 1.0));  // s t <= n
}

TEST_CASE("Peetre maximal: sup form dominates the function") {
  Grid g = make_grid(1, 512, 64.0);
  Field f = random_band_limited(g, 64, 6);
  Field pm = peetre_maximal(f, 2.0, 0, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    CHECK(pm.values[i].real() >= std::abs(f.values[i]) * (1.0 - 1e-12));
}

TEST_CASE("Peetre domination by Hardy-Littlewood and composition") {
  Baselines base(default_baseline_path());
  // the top scale 2^2 needs spacing well below 2^{-2} for the weight
  // quadrature to be resolved; this configuration is the documented one
  Grid g = make_grid(1, 4096, 256.0);
  Field f = random_band_limited(g, 32, 7);
  for (auto& v : f.values) v = std::abs(v);

  double dom_lo = 1e300, dom_hi = 0;
  double comp_lo = 1e300, comp_hi = 0;
  for (int j : {-2, -1, 0, 1, 2}) {
    Field pm = peetre_maximal(f, 2.0, j, 1.0);
    Field hl = hl_maximal(f, 1.0);
    double worst = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      worst = std::max(worst, pm.values[i].real() / hl.values[i].real());
    dom_lo = std::min(dom_lo, worst);
    dom_hi = std::max(dom_hi, worst);

    // composition with r' = 3 (t = 1 <= r')
    Field pp = peetre_maximal(pm, 2.0, j, 3.0);
    double worst2 = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      worst2 = std::max(worst2, pp.values[i].real() / pm.values[i].real());
    comp_lo = std::min(comp_lo, worst2);
    comp_hi = std::max(comp_hi, worst2);
  }
  base.check("peetre_domination_const", dom_hi);
  base.check("peetre_composition_const", comp_hi);
  // stability across the scale window
  CHECK((dom_hi - dom_lo) / dom_hi < 0.10);
  CHECK((comp_hi - comp_lo) / comp_hi < 0.10);
}

TEST_CASE("maximal operators are sublinear") {
  Grid g = make_grid(1, 256, 64.0);
  Field f = random_band_limited(g, 32, 8);
  Field h = random_band_limited(g, 32, 9);
  Field sum = f;
  for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += h.values[i];

  Field a = hl_maximal(sum, 1.0);
  Field b = hl_maximal(f, 1.0), c = hl_maximal(h, 1.0);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    CHECK(a.values[i].real() <= b.values[i].real() + c.values[i].real() + 1e-11);

  Field pa = peetre_maximal(sum, 2.0, 0, 1.0);
  Field pb = peetre_maximal(f, 2.0, 0, 1.0), pc = peetre_maximal(h, 2.0, 0, 1.0);
  for (std::size_t i = 0; i < pa.values.size(); ++i)
    CHECK(pa.values[i].real() <= pb.values[i].real() + pc.values[i].real() + 1e-11);
}

TEST_CASE("Hardy norm behavior") {
  Baselines base(default_baseline_path());
  Grid g = make_grid(1, 1024, 64.0);
  Field f = gaussian_1d(g);
  NormReport rep = hardy_norm(f, 2.0);
  double ratio = rep.value / lp_norm(f, 2.0);
  CHECK(ratio >= 1.0 - 1e-9);
  base.check("hardy_l2_gaussian_ratio", ratio);

  // single-annulus field: the per-scale maximum sits near its scale
  const int j0 = 1;
  FrameFamily psi = make_frame(FrameKind::psi);
  Field spec = forward_ft(random_band_limited(g, 400, 10));
  for (int k = 0; k < g.points_per_axis; ++k) {
    double xi[1] = {g.freq(k)};
    spec.values[k] *= psi_hat(std::span<const double>(xi, 1), j0);
  }
  Field annulus = inverse_ft(spec);
  NormReport arep = hardy_norm(annulus, 2.0);
  CHECK(arep.argmax_j >= j0 - 1);
  CHECK(arep.argmax_j <= j0 + 2);

  // dilation scaling within a couple percent
  Grid g2 = g;
  Field f2 = sample(
      [](std::span<const double> x) {
        double y = 2.0 * x[0];
        return cplx(std::exp(-std::numbers::pi * y * y), 0);
      },
      g2);
  NormReport rep2 = hardy_norm(f2, 2.0);
  CHECK(std::abs(rep2.value - std::pow(2.0, -0.5) * rep.value) < 0.02 * rep.value);
}

TEST_CASE("square function norm") {
  Grid g = make_grid(1, 1024, 64.0);
  Field f = random_band_limited(g, 200, 11, /*zero_mean=*/true);
  double sq = square_function_norm(f, 2.0);
  double l2 = lp_norm(f, 2.0);
  // frame lower bound: min over the band of sum psi_hat^2
  double cmin = 1.0;
  ScaleWindow w = resolvable_window(g);
  for (int k = 1; k < g.points_per_axis; ++k) {
    double rho = std::abs(g.freq(k));
    if (rho < 2.0 * std::exp2(w.j_min) || 2.0 * rho > std::exp2(w.j_max + 1)) continue;
    if (std::abs(g.signed_index(k)) > 200) continue;
    double sum = 0;
    double xi[1] = {rho};
    for (int j = w.j_min; j <= w.j_max; ++j) {
      double v = psi_hat(std::span<const double>(xi, 1), j);
      sum += v * v;
    }
    cmin = std::min(cmin, sum);
  }
  CHECK(sq <= l2 * (1.0 + 1e-9));
  CHECK(sq >= std::sqrt(cmin) * l2 * (1.0 - 1e-9));

  // constants are invisible: nonzero mean must be rejected
  Field bad = f;
  bad.values[0] += 1.0;
  CHECK_THROWS(square_function_norm(bad, 2.0));

  // single-annulus locality: only neighboring scales contribute
  Field spec = forward_ft(f);
  for (int k = 0; k < g.points_per_axis; ++k) {
    double xi[1] = {std::abs(g.freq(k))};
    spec.values[k] *= psi_hat(std::span<const double>(xi, 1), 0);
  }
  Field ann = inverse_ft(spec);
  double sq_ann = square_function_norm(ann, 2.0);
  double l2_ann = lp_norm(ann, 2.0);
  CHECK(sq_ann >= 0.5 * l2_ann);
  CHECK(sq_ann <= 1.30 * l2_ann);
}

TEST_CASE("square function and Hardy agree on a mean-zero bump") {
  Baselines base(default_baseline_path());
  Grid g = make_grid(1, 2048, 64.0);
  // wavelet-like bump: derivative of a Gaussian (mean zero)
  Field f = sample(
      [](std::span<const double> x) {
        return cplx(-2.0 * std::numbers::pi * x[0] *
                        std::exp(-std::numbers::pi * x[0] * x[0]),
                    0);
      },
      g);
  double sq = square_function_norm(f, 1.0);
  NormReport h = hardy_norm(f, 1.0);
  base.check("hardy_square_p1_ratio", h.value / sq);

  Grid g2 = make_grid(1, 4096, 64.0);
  Field f2 = sample(
      [](std::span<const double> x) {
        return cplx(-2.0 * std::numbers::pi * x[0] *
                        std::exp(-std::numbers::pi * x[0] * x[0]),
                    0);
      },
      g2);
  double sq2 = square_function_norm(f2, 1.0);
  NormReport h2 = hardy_norm(f2, 1.0);
  CHECK(std::abs(h2.value / sq2 - h.value / sq) < 0.05 * (h.value / sq));
}

TEST_CASE("BMO seminorm") {
  Grid g = make_grid(1, 256, 64.0);
  Field c = sample([](std::span<const double>) { return cplx(7.0, 0); }, g);
  CHECK(bmo_seminorm(c) == doctest::Approx(0.0));

  Field sgn = sample(
      [](std::span<const double> x) { return cplx(x[0] >= 0 ? 1.0 : -1.0, 0); }, g);
  CHECK(bmo_seminorm(sgn) == doctest::Approx(1.0));

  Field f = random_band_limited(g, 64, 12);
  double sup = 0;
  for (const auto& v : f.values) sup = std::max(sup, std::abs(v));
  CHECK(bmo_seminorm(f) <= 2.0 * sup + 1e-12);
}

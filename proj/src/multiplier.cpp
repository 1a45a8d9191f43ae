#include "mlin/multiplier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mlin/norms.hpp"

namespace mlin {

namespace {

// dyadic scales whose psi annulus contains rho (at most two)
inline int active_scales(double rho, int* js, double* vals) {
  if (rho <= 0) return 0;
  int jc = static_cast<int>(std::floor(std::log2(rho)));
  int count = 0;
  for (int j = jc; j <= jc + 1; ++j) {
    double v = psi_hat_radial(rho * std::exp2(-j));
    if (v != 0.0) {
      js[count] = j;
      vals[count] = v;
      ++count;
    }
  }
  return count;
}

double block_radius(const Symbol& sigma, std::size_t flat, int block) {
  const int n = sigma.n();
  const int p = sigma.factor_grid.points_per_axis;
  const int d = sigma.total_dims();
  double r2 = 0;
  std::size_t rest = flat;
  for (int a = d - 1; a >= 0; --a) {
    int idx = static_cast<int>(rest % p);
    rest /= p;
    if (a / n == block) {
      double c = sigma.factor_grid.freq(idx);
      r2 += c * c;
    }
  }
  return std::sqrt(r2);
}

}  // namespace

Field apply_multiplier(const Symbol& sigma, std::span<const Field> inputs, ApplyStats* stats) {
  const int m = sigma.m;
  const int n = sigma.n();
  if (static_cast<int>(inputs.size()) != m)
    throw std::invalid_argument("apply_multiplier: expected m input fields");
  for (const Field& f : inputs) {
    if (!(f.grid == sigma.factor_grid))
      throw std::invalid_argument("apply_multiplier: input grid does not match the symbol");
    if (f.space != Space::physical)
      throw std::invalid_argument("apply_multiplier: inputs must be physical-space");
  }
  const Grid& g = sigma.factor_grid;
  const int p = g.points_per_axis;
  const std::size_t factor_total = g.total_points();
  const bool stored = !sigma.values.empty();
  if (!stored && !sigma.evaluator)
    throw std::invalid_argument("apply_multiplier: symbol has neither values nor evaluator");

  std::vector<std::vector<cplx>> fhat(m);
  for (int i = 0; i < m; ++i) fhat[i] = forward_ft(inputs[i]).values;

  std::vector<cplx> H(factor_total, cplx(0, 0));
  std::size_t wrapped = 0;
  // ignore transform roundoff leak when counting observable aliasing
  double wrap_tol = 1e-13;
  for (int i = 0; i < m; ++i) {
    double mx = 0;
    for (const cplx& v : fhat[i]) mx = std::max(mx, std::abs(v));
    wrap_tol *= mx;
  }

  // odometer over the m factor indices
  std::vector<std::size_t> k(m, 0);
  std::vector<std::vector<int>> kidx(m, std::vector<int>(n));
  std::vector<double> xi(m * n);
  std::vector<int> out_idx(n);
  for (int i = 0; i < m; ++i) g.unravel(0, kidx[i].data());

  const std::size_t combos = [&] {
    std::size_t c = 1;
    for (int i = 0; i < m; ++i) c *= factor_total;
    return c;
  }();

  for (std::size_t step = 0; step < combos; ++step) {
    cplx prod(1, 0);
    for (int i = 0; i < m; ++i) prod *= fhat[i][k[i]];
    if (prod != cplx(0, 0)) {
      cplx sv;
      if (stored) {
        std::size_t flat = 0;
        for (int i = 0; i < m; ++i) flat = flat * factor_total + k[i];
        sv = sigma.values[flat];
      } else {
        for (int i = 0; i < m; ++i)
          for (int a = 0; a < n; ++a) xi[i * n + a] = g.freq(kidx[i][a]);
        sv = sigma.evaluator(std::span<const double>(xi.data(), xi.size()));
      }
      if (sv != cplx(0, 0)) {
        bool wrap = false;
        for (int a = 0; a < n; ++a) {
          int s = 0;
          for (int i = 0; i < m; ++i) s += g.signed_index(kidx[i][a]);
          if (s < -(p / 2) || s >= p / 2) wrap = true;
          out_idx[a] = g.storage_index(s);
        }
        std::size_t out = 0;
        for (int a = 0; a < n; ++a) out = out * p + static_cast<std::size_t>(out_idx[a]);
        H[out] += sv * prod;
        if (wrap && std::abs(prod) > wrap_tol) ++wrapped;
      }
    }
    // advance the odometer (last factor varies fastest)
    for (int i = m - 1; i >= 0; --i) {
      if (++k[i] < factor_total) {
        g.unravel(k[i], kidx[i].data());
        break;
      }
      k[i] = 0;
      g.unravel(0, kidx[i].data());
    }
  }

  if (stats) stats->wrapped_bins = wrapped;

  Field spec;
  spec.grid = g;
  spec.space = Space::spectral;
  spec.values = std::move(H);
  const double scale = std::pow(g.freq_step(), n * (m - 1));
  for (auto& v : spec.values) v *= scale;
  return inverse_ft(spec);
}

Symbol localize_symbol(const Symbol& sigma, const FrameFamily& theta_m, int j) {
  const double dilate = std::exp2(j);
  if (theta_m.support_outer * dilate > sigma.factor_grid.nyquist() * std::sqrt(sigma.total_dims()))
    throw std::invalid_argument("localize_symbol: scale j pushes the frame beyond the grid");
  if (theta_m.support_inner > 0 && theta_m.support_inner * dilate < sigma.factor_grid.freq_step() / 4)
    throw std::invalid_argument("localize_symbol: scale j below the grid resolution");
  Symbol out = sigma;
  const int d = sigma.total_dims();
  if (!out.values.empty()) {
    std::vector<double> xi(d);
    for (std::size_t flat = 0; flat < out.values.size(); ++flat) {
      out.frequency(flat, xi.data());
      double r = 0;
      for (double c : xi) r += c * c;
      out.values[flat] *= theta_m.hat(std::sqrt(r) / dilate);
    }
  }
  if (sigma.evaluator) {
    auto base = sigma.evaluator;
    FrameFamily frame = theta_m;
    out.evaluator = [base, frame, dilate](std::span<const double> xi) {
      double r = 0;
      for (double c : xi) r += c * c;
      return base(xi) * frame.hat(std::sqrt(r) / dilate);
    };
  }
  return out;
}

std::vector<Symbol> kappa_decompose(const Symbol& sigma) {
  if (sigma.values.empty())
    throw std::invalid_argument("kappa_decompose: symbol must carry stored values");
  const int m = sigma.m;
  std::vector<Symbol> parts(m);
  for (int k = 0; k < m; ++k) {
    parts[k] = make_symbol(sigma.factor_grid, m);
  }

  // mass on bins the dyadic decomposition cannot cover (a zero block radius)
  long double bad_mass2 = 0, total_mass2 = 0;

  std::vector<double> rho(m);
  std::vector<std::array<int, 2>> js(m);
  std::vector<std::array<double, 2>> vals(m);
  std::vector<int> counts(m);
  std::vector<int> choice(m);

  for (std::size_t flat = 0; flat < sigma.values.size(); ++flat) {
    const cplx sv = sigma.values[flat];
    const double mag2 = std::norm(sv);
    total_mass2 += mag2;
    if (sv == cplx(0, 0)) continue;
    bool covered = true;
    for (int b = 0; b < m; ++b) {
      rho[b] = block_radius(sigma, flat, b);
      counts[b] = active_scales(rho[b], js[b].data(), vals[b].data());
      if (counts[b] == 0) covered = false;
    }
    if (!covered) {
      bad_mass2 += mag2;
      continue;
    }
    // enumerate scale combinations (at most 2^m)
    std::fill(choice.begin(), choice.end(), 0);
    while (true) {
      double weight = 1.0;
      int max_j = std::numeric_limits<int>::min();
      for (int b = 0; b < m; ++b) {
        weight *= vals[b][choice[b]];
        max_j = std::max(max_j, js[b][choice[b]]);
      }
      int kappa = 0;
      for (int b = 0; b < m; ++b) {
        if (js[b][choice[b]] == max_j) {
          kappa = b;
          break;
        }
      }
      parts[kappa].values[flat] += sv * weight;
      int b = m - 1;
      for (; b >= 0; --b) {
        if (++choice[b] < counts[b]) break;
        choice[b] = 0;
      }
      if (b < 0) break;
    }
  }

  if (std::sqrt(bad_mass2) > 1e-12 * std::sqrt(total_mass2))
    throw std::invalid_argument("kappa_decompose: symbol has mass on unresolvable bins");
  return parts;
}

std::pair<Symbol, Symbol> low_high_split(const Symbol& sigma_kappa1) {
  if (sigma_kappa1.values.empty())
    throw std::invalid_argument("low_high_split: symbol must carry stored values");
  const int m = sigma_kappa1.m;
  const int gap = 4 + static_cast<int>(std::floor(std::log2(static_cast<double>(m))));

  Symbol low = make_symbol(sigma_kappa1.factor_grid, m);
  Symbol high = make_symbol(sigma_kappa1.factor_grid, m);

  std::vector<double> rho(m);
  int js1[2];
  double vals1[2];
  std::vector<std::array<int, 2>> js(m);
  std::vector<std::array<double, 2>> vals(m);
  std::vector<int> counts(m);
  std::vector<int> choice(m);

  for (std::size_t flat = 0; flat < sigma_kappa1.values.size(); ++flat) {
    const cplx sv = sigma_kappa1.values[flat];
    if (sv == cplx(0, 0)) continue;
    for (int b = 0; b < m; ++b) rho[b] = block_radius(sigma_kappa1, flat, b);
    const int c1 = active_scales(rho[0], js1, vals1);
    if (c1 == 0) continue;

    // weight of the kappa = 1 region: scales j on block 1, the rest at most j
    // with ties allowed (closed-form telescoped tail = phi at scale j)
    double w1 = 0, wH = 0;
    for (int a = 0; a < c1; ++a) {
      const int j = js1[a];
      double wlow = vals1[a], whigh = vals1[a];
      for (int b = 1; b < m; ++b) {
        wlow *= phi_hat_radial(rho[b] * std::exp2(-j));
        whigh *= phi_hat_radial(rho[b] * std::exp2(-(j - gap)));
      }
      w1 += wlow;
      wH += whigh;
    }
    if (w1 <= 0) continue;
    const cplx hv = sv * (wH / w1);
    high.values[flat] = hv;
    low.values[flat] = sv - hv;
  }
  return {std::move(low), std::move(high)};
}

PointwiseBoundReport pointwise_bound_check(const Symbol& sigma, std::span<const Field> inputs,
                                           std::span<const double> s, double t, int j) {
  if (!(t > 1.0 && t <= 2.0))
    throw std::invalid_argument("pointwise_bound_check: need 1 < t <= 2");
  const int n = sigma.n();
  for (double sk : s)
    if (!(sk > n / t))
      throw std::invalid_argument("pointwise_bound_check: need s_k > n/t");

  Field T = apply_multiplier(sigma, inputs);

  // || sigma(2^j .) ||_{L^t_s} on the symbol's own product grid
  Field dil;
  dil.grid = make_grid(sigma.total_dims(), sigma.factor_grid.points_per_axis,
                       sigma.factor_grid.box_length);
  dil.space = Space::physical;
  dil.values.assign(dil.grid.total_points(), cplx(0, 0));
  const double twoj = std::exp2(j);
  if (sigma.evaluator) {
    std::vector<int> idx(dil.grid.dims);
    std::vector<double> arg(dil.grid.dims);
    for (std::size_t flat = 0; flat < dil.values.size(); ++flat) {
      dil.grid.unravel(flat, idx.data());
      for (int a = 0; a < dil.grid.dims; ++a) arg[a] = twoj * dil.grid.freq(idx[a]);
      dil.values[flat] = sigma.evaluator(std::span<const double>(arg.data(), arg.size()));
    }
  } else {
    if (j < 0)
      throw std::invalid_argument("pointwise_bound_check: negative j needs an evaluator");
    const int p = sigma.factor_grid.points_per_axis;
    std::vector<int> idx(dil.grid.dims);
    for (std::size_t flat = 0; flat < dil.values.size(); ++flat) {
      dil.grid.unravel(flat, idx.data());
      bool outside = false;
      std::size_t src = 0;
      for (int a = 0; a < dil.grid.dims; ++a) {
        long long ks = static_cast<long long>(sigma.factor_grid.signed_index(idx[a])) << j;
        if (ks < -(p / 2) || ks >= p / 2) {
          outside = true;
          break;
        }
        src = src * p + static_cast<std::size_t>(
                            sigma.factor_grid.storage_index(static_cast<int>(ks)));
      }
      dil.values[flat] = outside ? cplx(0, 0) : sigma.values[src];
    }
  }
  PointwiseBoundReport rep;
  rep.sobolev_norm = product_sobolev_norm(dil, sigma.m, t, s);
  if (rep.sobolev_norm == 0.0) return rep;  // zero symbol: zero output, zero ratio

  std::vector<Field> peetre;
  peetre.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i)
    peetre.push_back(peetre_maximal(inputs[i], s[i], j, t));

  double max_ratio = 0;
  double max_denom = 0;
  std::vector<double> denom(T.values.size());
  for (std::size_t i = 0; i < T.values.size(); ++i) {
    double d = rep.sobolev_norm;
    for (const Field& pm : peetre) d *= pm.values[i].real();
    denom[i] = d;
    max_denom = std::max(max_denom, d);
  }
  if (max_denom == 0) throw std::runtime_error("pointwise_bound_check: denominator underflow");
  for (std::size_t i = 0; i < T.values.size(); ++i) {
    if (denom[i] < 1e-14 * max_denom) {
      ++rep.skipped;
      continue;
    }
    max_ratio = std::max(max_ratio, std::abs(T.values[i]) / denom[i]);
  }
  rep.max_ratio = max_ratio;
  return rep;
}

}  // namespace mlin

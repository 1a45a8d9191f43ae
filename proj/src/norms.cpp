#include "mlin/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mlin/kernels.hpp"

namespace mlin {

namespace {

// blockwise product weight prod_k <xi_k>^{s_k} on the (m n)-dim lattice
void apply_product_weight(Field& spec, int m, std::span<const double> s) {
  const Grid& g = spec.grid;
  const int d = g.dims;
  const int n = d / m;
  std::vector<int> idx(d);
  std::vector<double> xi(d);
  for (std::size_t flat = 0; flat < spec.values.size(); ++flat) {
    g.unravel(flat, idx.data());
    double w = 1.0;
    for (int k = 0; k < m; ++k) {
      double r2 = 0;
      for (int a = 0; a < n; ++a) {
        double c = g.freq(idx[k * n + a]);
        r2 += c * c;
      }
      w *= std::pow(1.0 + 4.0 * std::numbers::pi * std::numbers::pi * r2, s[k] / 2.0);
    }
    spec.values[flat] *= w;
  }
}

}  // namespace

double product_sobolev_norm(const Field& F, int m, double r, std::span<const double> s) {
  if (!(r > 0)) throw std::invalid_argument("product_sobolev_norm: r must be positive");
  if (F.space != Space::physical)
    throw std::invalid_argument("product_sobolev_norm: field must be physical-space");
  if (m < 1 || F.grid.dims % m != 0)
    throw std::invalid_argument("product_sobolev_norm: grid dims must be a multiple of m");
  if (static_cast<int>(s.size()) != m)
    throw std::invalid_argument("product_sobolev_norm: s must have m entries");
  bool zero = true;
  for (double sk : s) {
    if (sk < 0) throw std::invalid_argument("product_sobolev_norm: s entries must be >= 0");
    if (sk != 0) zero = false;
  }
  if (zero) return lp_norm(F, r);
  Field spec = forward_ft(F);
  apply_product_weight(spec, m, s);
  return lp_norm(inverse_ft(spec), r);
}

double standard_sobolev_norm(const Field& F, double r, double s) {
  if (!(r > 0)) throw std::invalid_argument("standard_sobolev_norm: r must be positive");
  if (F.space != Space::physical)
    throw std::invalid_argument("standard_sobolev_norm: field must be physical-space");
  if (s == 0) return lp_norm(F, r);
  Field spec = forward_ft(F);
  const Grid& g = spec.grid;
  std::vector<int> idx(g.dims);
  for (std::size_t flat = 0; flat < spec.values.size(); ++flat) {
    g.unravel(flat, idx.data());
    double r2 = 0;
    for (int a = 0; a < g.dims; ++a) {
      double c = g.freq(idx[a]);
      r2 += c * c;
    }
    spec.values[flat] *=
        std::pow(1.0 + 4.0 * std::numbers::pi * std::numbers::pi * r2, s / 2.0);
  }
  return lp_norm(inverse_ft(spec), r);
}

NormReport hormander_functional(const Symbol& sigma, const FrameFamily& psi_m, double r,
                                std::span<const double> s, const HormanderOptions& opts) {
  if (static_cast<int>(s.size()) != sigma.m)
    throw std::invalid_argument("hormander_functional: s must have m entries");
  const int d = sigma.total_dims();

  std::vector<int> j_list;
  if (opts.j_list) {
    j_list = *opts.j_list;
  } else {
    ScaleWindow w = resolvable_window(sigma.factor_grid);
    for (int j = w.j_min; j <= w.j_max; ++j) j_list.push_back(j);
  }
  if (j_list.empty()) throw std::invalid_argument("hormander_functional: empty scale window");

  Grid norm_grid;
  if (opts.norm_grid) {
    norm_grid = make_grid(d, opts.norm_grid->points_per_axis, opts.norm_grid->box_length);
  } else {
    norm_grid = make_grid(d, sigma.factor_grid.points_per_axis, sigma.factor_grid.box_length);
  }

  NormReport rep;
  rep.grid = norm_grid;
  rep.j_min = j_list.front();
  rep.j_max = j_list.back();
  double best = -1.0;

  Field G;
  G.grid = norm_grid;
  G.space = Space::physical;
  G.values.resize(norm_grid.total_points());
  std::vector<int> idx(d);
  std::vector<double> xi(d), arg(d);

  for (int j : j_list) {
    const double twoj = std::exp2(j);
    if (sigma.evaluator) {
      // lattice-snapped window center; recentering is a circular shift of the
      // evaluation lattice and leaves the weighted norm unchanged
      std::vector<double> center(d, 0.0);
      if (opts.recenter && !sigma.support_center.empty()) {
        for (int a = 0; a < d; ++a) {
          double c = sigma.support_center[a] / twoj;
          center[a] = std::round(c * norm_grid.box_length) / norm_grid.box_length;
        }
      }
      for (std::size_t flat = 0; flat < G.values.size(); ++flat) {
        norm_grid.unravel(flat, idx.data());
        for (int a = 0; a < d; ++a) {
          xi[a] = norm_grid.freq(idx[a]) + center[a];
          arg[a] = twoj * xi[a];
        }
        double hat = psi_m.hat_at(std::span<const double>(xi.data(), xi.size()));
        G.values[flat] =
            hat == 0.0 ? cplx(0, 0)
                       : sigma.evaluator(std::span<const double>(arg.data(), arg.size())) * hat;
      }
    } else {
      if (j < 0)
        throw std::invalid_argument(
            "hormander_functional: negative scales need an evaluator-backed symbol");
      if (!(norm_grid.points_per_axis == sigma.factor_grid.points_per_axis &&
            norm_grid.box_length == sigma.factor_grid.box_length))
        throw std::invalid_argument(
            "hormander_functional: stored symbols are evaluated on their own grid");
      const int p = sigma.factor_grid.points_per_axis;
      for (std::size_t flat = 0; flat < G.values.size(); ++flat) {
        norm_grid.unravel(flat, idx.data());
        bool outside = false;
        std::size_t src = 0;
        for (int a = 0; a < d; ++a) {
          xi[a] = norm_grid.freq(idx[a]);
          long long ks = static_cast<long long>(sigma.factor_grid.signed_index(idx[a])) << j;
          if (ks < -(p / 2) || ks >= p / 2) {
            outside = true;
            break;
          }
          src = src * p + static_cast<std::size_t>(sigma.factor_grid.storage_index(
                              static_cast<int>(ks)));
        }
        double hat = psi_m.hat_at(std::span<const double>(xi.data(), xi.size()));
        G.values[flat] = (outside || hat == 0.0) ? cplx(0, 0) : sigma.values[src] * hat;
      }
    }
    double val = product_sobolev_norm(G, sigma.m, r, s);
    if (val > best) {
      best = val;
      rep.argmax_j = j;
    }
  }
  rep.value = best;
  return rep;
}

Field hl_maximal(const Field& f, double t) {
  if (!(t > 0)) throw std::invalid_argument("hl_maximal: t must be positive");
  if (f.space != Space::physical)
    throw std::invalid_argument("hl_maximal: field must be physical-space");
  const Grid& g = f.grid;
  const int d = g.dims;
  const int p = g.points_per_axis;
  const std::size_t total = g.total_points();

  // inclusive prefix sums of |f|^t along each axis in turn
  std::vector<double> pw(total), pre(total);
  for (std::size_t i = 0; i < total; ++i) pw[i] = std::pow(std::abs(f.values[i]), t);
  pre = pw;
  {
    std::vector<std::size_t> stride(d);
    std::size_t acc = 1;
    for (int a = d - 1; a >= 0; --a) {
      stride[a] = acc;
      acc *= static_cast<std::size_t>(p);
    }
    for (int a = 0; a < d; ++a) {
      for (std::size_t i = 0; i < total; ++i) {
        std::size_t ia = (i / stride[a]) % p;
        if (ia > 0) pre[i] += pre[i - stride[a]];
      }
    }
  }
  std::vector<std::size_t> stride(d);
  {
    std::size_t acc = 1;
    for (int a = d - 1; a >= 0; --a) {
      stride[a] = acc;
      acc *= static_cast<std::size_t>(p);
    }
  }
  // sum over the clipped box [lo, hi] via inclusion-exclusion on prefix sums
  auto box_sum = [&](const int* lo, const int* hi) {
    double sum = 0;
    for (int corner = 0; corner < (1 << d); ++corner) {
      std::size_t pos = 0;
      int sign = 1;
      bool skip = false;
      for (int a = 0; a < d; ++a) {
        if (corner & (1 << a)) {
          if (lo[a] == 0) {
            skip = true;
            break;
          }
          pos += static_cast<std::size_t>(lo[a] - 1) * stride[a];
          sign = -sign;
        } else {
          pos += static_cast<std::size_t>(hi[a]) * stride[a];
        }
      }
      if (!skip) sum += sign * pre[pos];
    }
    return sum;
  };

  Field out = f;
  std::vector<int> idx(d), lo(d), hi(d);
  for (std::size_t i = 0; i < total; ++i) {
    g.unravel(i, idx.data());
    double best = pw[i];  // the singleton cell
    for (int h = 1; h <= p / 2; h *= 2) {
      std::size_t count = 1;
      for (int a = 0; a < d; ++a) {
        lo[a] = std::max(0, idx[a] - h);
        hi[a] = std::min(p - 1, idx[a] + h);
        count *= static_cast<std::size_t>(hi[a] - lo[a] + 1);
      }
      best = std::max(best, box_sum(lo.data(), hi.data()) / static_cast<double>(count));
    }
    out.values[i] = cplx(std::pow(best, 1.0 / t), 0);
  }
  return out;
}

Field peetre_maximal(const Field& f, double s, int j, double t) {
  if (!(s > 0)) throw std::invalid_argument("peetre_maximal: s must be positive");
  if (f.space != Space::physical)
    throw std::invalid_argument("peetre_maximal: field must be physical-space");
  const Grid& g = f.grid;
  const int d = g.dims;
  const double twoj = std::exp2(j);

  if (std::isinf(t)) {
    // weighted sliding maximum over minimal-image offsets
    const std::size_t total = g.total_points();
    std::vector<double> mag(total);
    for (std::size_t i = 0; i < total; ++i) mag[i] = std::abs(f.values[i]);
    std::vector<double> w(total);
    std::vector<int> idx(d);
    for (std::size_t o = 0; o < total; ++o) {
      g.unravel(o, idx.data());
      double r2 = 0;
      for (int a = 0; a < d; ++a) {
        double y = g.coord(idx[a]);
        r2 += y * y;
      }
      w[o] = std::pow(1.0 + twoj * std::sqrt(r2), -s);
    }
    Field out = f;
    const int p = g.points_per_axis;
    std::vector<int> xi_idx(d), off_idx(d), src_idx(d);
    for (std::size_t i = 0; i < total; ++i) {
      g.unravel(i, xi_idx.data());
      double best = 0;
      for (std::size_t o = 0; o < total; ++o) {
        g.unravel(o, off_idx.data());
        std::size_t src = 0;
        for (int a = 0; a < d; ++a) {
          // offset index o encodes y = coord(o); x - y has index i - (o - P/2)
          int k = xi_idx[a] - (off_idx[a] - p / 2);
          k %= p;
          if (k < 0) k += p;
          src = src * p + static_cast<std::size_t>(k);
        }
        best = std::max(best, mag[src] * w[o]);
      }
      out.values[i] = cplx(best, 0);
    }
    return out;
  }

  if (!(s * t > d))
    throw std::invalid_argument("peetre_maximal: need s*t > n for an integrable weight");
  // |f|^t convolved with the sampled weight, then 2^{jn/t} ( . )^{1/t}
  Field ft = f;
  for (auto& v : ft.values) v = cplx(std::pow(std::abs(v), t), 0);
  Field w;
  w.grid = g;
  w.space = Space::physical;
  w.values.resize(g.total_points());
  std::vector<int> idx(d);
  for (std::size_t o = 0; o < w.values.size(); ++o) {
    g.unravel(o, idx.data());
    double r2 = 0;
    for (int a = 0; a < d; ++a) {
      double y = g.coord(idx[a]);
      r2 += y * y;
    }
    w.values[o] = cplx(std::pow(1.0 + twoj * std::sqrt(r2), -s * t), 0);
  }
  Field conv = inverse_ft(multiply_pointwise(forward_ft(ft), forward_ft(w)));
  Field out = f;
  const double scale = std::pow(twoj, static_cast<double>(d) / t);
  for (std::size_t i = 0; i < conv.values.size(); ++i) {
    double v = std::max(conv.values[i].real(), 0.0);
    out.values[i] = cplx(scale * std::pow(v, 1.0 / t), 0);
  }
  return out;
}

NormReport hardy_norm(const Field& f, double p) {
  if (!(p > 0)) throw std::invalid_argument("hardy_norm: p must be positive");
  ScaleWindow w = resolvable_window(f.grid);
  std::vector<double> zero(f.grid.dims, 0.0);
  return hardy_norm_modulated(f, std::span<const double>(zero.data(), zero.size()), p, w.j_min,
                              w.j_max);
}

NormReport hardy_norm_modulated(const Field& envelope, std::span<const double> carrier, double p,
                                int j_lo, int j_hi) {
  if (!(p > 0)) throw std::invalid_argument("hardy_norm: p must be positive");
  if (envelope.space != Space::physical)
    throw std::invalid_argument("hardy_norm: field must be physical-space");
  if (j_lo > j_hi) throw std::invalid_argument("hardy_norm: empty scale window");
  const Grid& g = envelope.grid;
  const int d = g.dims;
  Field spec = forward_ft(envelope);

  Field maxfield = envelope;
  for (auto& v : maxfield.values) v = cplx(0, 0);
  NormReport rep;
  rep.grid = g;
  rep.j_min = j_lo;
  rep.j_max = j_hi;
  double best_norm = -1;

  std::vector<int> idx(d);
  std::vector<double> xi(d);
  Field piece = spec;
  for (int j = j_lo; j <= j_hi; ++j) {
    piece.values = spec.values;
    for (std::size_t flat = 0; flat < piece.values.size(); ++flat) {
      g.unravel(flat, idx.data());
      for (int a = 0; a < d; ++a) xi[a] = g.freq(idx[a]) + carrier[a];
      piece.values[flat] *= phi_hat(std::span<const double>(xi.data(), xi.size()), j);
    }
    Field conv = inverse_ft(piece);
    long double acc = 0;
    for (std::size_t i = 0; i < conv.values.size(); ++i) {
      double m = std::abs(conv.values[i]);
      acc += std::pow(m, p);
      if (m > maxfield.values[i].real()) maxfield.values[i] = cplx(m, 0);
    }
    double piece_norm = static_cast<double>(
        std::pow(std::pow(g.spacing(), d) * acc, 1.0L / p));
    if (piece_norm > best_norm) {
      best_norm = piece_norm;
      rep.argmax_j = j;
    }
  }
  rep.value = lp_norm(maxfield, p);
  return rep;
}

double square_function_norm(const Field& f, double p) {
  if (!(p > 0)) throw std::invalid_argument("square_function_norm: p must be positive");
  if (f.space != Space::physical)
    throw std::invalid_argument("square_function_norm: field must be physical-space");
  Field spec = forward_ft(f);
  const double l2 = lp_norm(f, 2.0);
  if (std::abs(spec.values[0]) > 1e-10 * l2 && l2 > 0)
    throw std::invalid_argument("square_function_norm: field has nonzero mean");

  const Grid& g = f.grid;
  const int d = g.dims;
  ScaleWindow w = resolvable_window(g);
  Field acc = f;
  for (auto& v : acc.values) v = cplx(0, 0);
  std::vector<int> idx(d);
  std::vector<double> xi(d);
  Field piece = spec;
  for (int j = w.j_min; j <= w.j_max; ++j) {
    piece.values = spec.values;
    for (std::size_t flat = 0; flat < piece.values.size(); ++flat) {
      g.unravel(flat, idx.data());
      for (int a = 0; a < d; ++a) xi[a] = g.freq(idx[a]);
      piece.values[flat] *= psi_hat(std::span<const double>(xi.data(), xi.size()), j);
    }
    Field conv = inverse_ft(piece);
    for (std::size_t i = 0; i < conv.values.size(); ++i) {
      double m = std::abs(conv.values[i]);
      acc.values[i] += m * m;
    }
  }
  for (auto& v : acc.values) v = cplx(std::sqrt(v.real()), 0);
  return lp_norm(acc, p);
}

double bmo_seminorm(const Field& f) {
  if (f.space != Space::physical)
    throw std::invalid_argument("bmo_seminorm: field must be physical-space");
  const Grid& g = f.grid;
  const int d = g.dims;
  const int p = g.points_per_axis;
  double sup = 0;
  std::vector<int> idx(d);
  // dyadic blocks of side 2^k cells, aligned to the index lattice
  for (int side = 1; side <= p; side *= 2) {
    const int blocks = p / side;
    std::size_t nblocks = 1;
    for (int a = 0; a < d; ++a) nblocks *= static_cast<std::size_t>(blocks);
    std::vector<int> bidx(d);
    for (std::size_t b = 0; b < nblocks; ++b) {
      std::size_t rest = b;
      for (int a = d - 1; a >= 0; --a) {
        bidx[a] = static_cast<int>(rest % blocks);
        rest /= blocks;
      }
      // iterate the cells of this block
      std::size_t cells = 1;
      for (int a = 0; a < d; ++a) cells *= static_cast<std::size_t>(side);
      cplx mean(0, 0);
      for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rc = c;
        std::size_t pos = 0;
        for (int a = d - 1; a >= 0; --a) {
          int off = static_cast<int>(rc % side);
          rc /= side;
          idx[a] = bidx[a] * side + off;
        }
        pos = g.ravel(idx.data());
        mean += f.values[pos];
      }
      mean /= static_cast<double>(cells);
      double osc = 0;
      for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rc = c;
        for (int a = d - 1; a >= 0; --a) {
          int off = static_cast<int>(rc % side);
          rc /= side;
          idx[a] = bidx[a] * side + off;
        }
        osc += std::abs(f.values[g.ravel(idx.data())] - mean);
      }
      sup = std::max(sup, osc / static_cast<double>(cells));
    }
  }
  return sup;
}

}  // namespace mlin

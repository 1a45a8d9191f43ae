#include "mlin/kernels.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mlin {

namespace {
constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

double surface_measure(int n) {
  // |S^{n-1}|
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    case 4: return 2.0 * std::numbers::pi * std::numbers::pi;
    default: throw std::invalid_argument("surface_measure: n out of range");
  }
}
}  // namespace

double bracket_radial(double rho) { return std::sqrt(1.0 + kFourPiSq * rho * rho); }

double bracket(std::span<const double> x) {
  double r2 = 0;
  for (double c : x) r2 += c * c;
  return std::sqrt(1.0 + kFourPiSq * r2);
}

double h_kernel_radial(double rho, const HKernelParams& params) {
  const double u = kFourPiSq * rho * rho;
  // log1p keeps the log factor accurate near rho = 0
  const double lg = std::log1p(u);
  return std::pow(1.0 + u, -params.t / 2.0) * std::pow(1.0 + lg, -params.gamma / 2.0);
}

double h_kernel_eval(std::span<const double> x, const HKernelParams& params) {
  double r2 = 0;
  for (double c : x) r2 += c * c;
  return h_kernel_radial(std::sqrt(r2), params);
}

LpWitness h_lp_finiteness_witness(const HKernelParams& params, double p) {
  if (!(p > 0)) throw std::invalid_argument("h_lp_finiteness_witness: p must be positive");
  const double t = params.t, gamma = params.gamma;
  const int n = params.n;

  LpWitness w;
  const double np = static_cast<double>(n) / p;
  if (t > np || (t == np && gamma > 2.0 / p)) {
    w.verdict = LpVerdict::finite;
  } else {
    w.verdict = LpVerdict::infinite;
  }

  // truncated-ball masses at radii 2^0 .. 2^20 via radial quadrature,
  // log-spaced Simpson on each dyadic shell so the slow log factor is
  // integrated faithfully
  const int kMax = 20;
  const double sn = surface_measure(n);
  auto density = [&](double rho) {
    return sn * std::pow(rho, n - 1) * std::pow(h_kernel_radial(rho, params), p);
  };
  // head [0, 1]: plain Simpson, integrand is smooth and bounded
  auto simpson = [](auto f, double a, double b, int panels) {
    double h = (b - a) / panels;
    long double acc = 0;
    for (int i = 0; i < panels; ++i) {
      double x0 = a + i * h, x1 = x0 + 0.5 * h, x2 = x0 + h;
      acc += (f(x0) + 4.0 * f(x1) + f(x2)) * (h / 6.0);
    }
    return static_cast<double>(acc);
  };
  double mass = simpson(density, 0.0, 1.0, 512);
  w.radii.push_back(1.0);
  w.masses.push_back(mass);
  for (int k = 1; k <= kMax; ++k) {
    const double a = std::pow(2.0, k - 1), b = std::pow(2.0, k);
    // substitute rho = e^u so each shell is one unit in u
    auto g = [&](double u) {
      double rho = std::exp(u);
      return density(rho) * rho;
    };
    mass += simpson(g, std::log(a), std::log(b), 64);
    w.radii.push_back(b);
    w.masses.push_back(mass);
  }

  // trend: fraction of the final mass gained over the last decade of radii
  const double m_half = w.masses[kMax / 2];
  const double m_full = w.masses[kMax];
  w.tail_fraction = (m_full - m_half) / m_full;
  bool trend_finite = w.tail_fraction < 0.02;
  w.trend_matches_verdict = (w.verdict == LpVerdict::finite) == trend_finite;
  return w;
}

HhatReport h_hat_asymptotics_check(const HKernelParams& params, const Grid& grid) {
  if (grid.dims != params.n)
    throw std::invalid_argument("h_hat_asymptotics_check: grid dims must equal n");
  if (!(params.t < params.n))
    throw std::invalid_argument("h_hat_asymptotics_check: small-frequency law needs t < n");

  Field h = sample([&](std::span<const double> x) { return cplx(h_kernel_eval(x, params), 0); },
                   grid);
  Field hh = forward_ft(h);

  HhatReport rep;
  rep.grid = grid;
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0;
  double tail_c = 0;
  std::vector<int> idx(grid.dims);
  std::vector<double> xi(grid.dims);
  for (std::size_t flat = 0; flat < hh.values.size(); ++flat) {
    grid.unravel(flat, idx.data());
    double r2 = 0;
    for (int a = 0; a < grid.dims; ++a) {
      xi[a] = grid.freq(idx[a]);
      r2 += xi[a] * xi[a];
    }
    const double rho = std::sqrt(r2);
    const double mag = std::abs(hh.values[flat]);
    if (rho >= rep.band_lo && rho <= rep.band_hi) {
      const double law = std::pow(rho, -(params.n - params.t)) *
                         std::pow(1.0 + 2.0 * std::log(1.0 / rho), -params.gamma / 2.0);
      const double ratio = mag / law;
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
    } else if (rho > rep.tail_from && rho <= rep.tail_to) {
      tail_c = std::max(tail_c, mag * std::exp(rho / 2.0));
    }
  }
  rep.ratio_min = rmin;
  rep.ratio_max = rmax;
  rep.tail_constant = tail_c;
  return rep;
}

Baselines::Baselines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("Baselines: cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string id;
    double lo, hi;
    if (ss >> id >> lo >> hi) entries_.emplace_back(id, std::make_pair(lo, hi));
  }
}

bool Baselines::contains(const std::string& id) const {
  for (const auto& e : entries_)
    if (e.first == id) return true;
  return false;
}

double Baselines::lower(const std::string& id) const {
  for (const auto& e : entries_)
    if (e.first == id) return e.second.first;
  throw std::runtime_error("Baselines: missing entry " + id);
}

double Baselines::upper(const std::string& id) const {
  for (const auto& e : entries_)
    if (e.first == id) return e.second.second;
  throw std::runtime_error("Baselines: missing entry " + id);
}

void Baselines::check(const std::string& id, double value) const {
  const double lo = lower(id), hi = upper(id);
  if (!(value >= lo && value <= hi)) {
    std::ostringstream msg;
    msg << "baseline check failed: " << id << " = " << value << " outside [" << lo << ", " << hi
        << "]";
    throw std::runtime_error(msg.str());
  }
}

std::string default_baseline_path() { return std::string(MLIN_DATA_DIR) + "/baselines.txt"; }

}  // namespace mlin

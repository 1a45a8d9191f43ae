#pragma once

#include <span>
#include <string>
#include <vector>

#include "mlin/grid.hpp"

namespace mlin {

// Bessel-type radial kernel with logarithmic correction,
//   H_{t,gamma}(x) = (1 + 4 pi^2 |x|^2)^{-t/2} (1 + ln(1 + 4 pi^2 |x|^2))^{-gamma/2}.
struct HKernelParams {
  double t = 1.0;
  double gamma = 1.0;
  int n = 1;
};

// <x> = (1 + 4 pi^2 |x|^2)^{1/2}
double bracket(std::span<const double> x);
double bracket_radial(double rho);

double h_kernel_radial(double rho, const HKernelParams& params);
double h_kernel_eval(std::span<const double> x, const HKernelParams& params);

enum class LpVerdict { finite, infinite };

struct LpWitness {
  LpVerdict verdict;                // analytic verdict from the threshold law
  std::vector<double> radii;        // 2^k
  std::vector<double> masses;       // truncated-ball integrals of |H|^p
  bool trend_matches_verdict;       // numeric trend agrees with the verdict
  double tail_fraction;             // mass gained over the last decade of radii
};

// Analytic L^p finiteness verdict (t > n/p, or t = n/p and gamma > 2/p)
// plus truncated-ball quadrature evidence. Disagreement between verdict and
// trend is flagged, not fatal: log-rate divergence can be numerically flat.
LpWitness h_lp_finiteness_witness(const HKernelParams& params, double p);

struct HhatReport {
  double ratio_min = 0;      // min over the band of |Hhat| / small-freq law
  double ratio_max = 0;      // max over the band
  double tail_constant = 0;  // max over the tail band of |Hhat| e^{|xi|/2}
  double band_lo = 0.02, band_hi = 0.4;
  // beyond ~40 the true transform is under the discretization floor and the
  // exponential weight would only amplify roundoff
  double tail_from = 2.0, tail_to = 40.0;
  Grid grid;
};

// Transforms a sampled H on the given grid and compares against the
// two-sided small-frequency law |xi|^{-(n-t)} (1 + 2 ln(1/|xi|))^{-gamma/2}
// (asks 0 < t < n) and the exponential tail bound.
HhatReport h_hat_asymptotics_check(const HKernelParams& params, const Grid& grid);

// Versioned empirical-constant store, lines "check_id c_lower c_upper".
struct Baselines {
  explicit Baselines(const std::string& path);
  bool contains(const std::string& id) const;
  double lower(const std::string& id) const;
  double upper(const std::string& id) const;
  // asserts lower <= value <= upper, throws with a descriptive message otherwise
  void check(const std::string& id, double value) const;

 private:
  std::vector<std::pair<std::string, std::pair<double, double>>> entries_;
};

std::string default_baseline_path();

}  // namespace mlin

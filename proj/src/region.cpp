#include "mlin/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mlin {

namespace {

long long checked_mul(long long a, long long b) {
  __int128 r = static_cast<__int128>(a) * b;
  if (r > std::numeric_limits<long long>::max() || r < std::numeric_limits<long long>::min())
    throw std::overflow_error("Rational: overflow");
  return static_cast<long long>(r);
}

long long checked_add(long long a, long long b) {
  __int128 r = static_cast<__int128>(a) + b;
  if (r > std::numeric_limits<long long>::max() || r < std::numeric_limits<long long>::min())
    throw std::overflow_error("Rational: overflow");
  return static_cast<long long>(r);
}

}  // namespace

Rational::Rational(long long n) : num(n), den(1) {}

Rational::Rational(long long n, long long d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  long long g = std::gcd(n < 0 ? -n : n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num = n;
  den = d;
}

Rational Rational::operator+(const Rational& o) const {
  return Rational(checked_add(checked_mul(num, o.den), checked_mul(o.num, den)),
                  checked_mul(den, o.den));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  return Rational(checked_mul(num, o.num), checked_mul(den, o.den));
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num == 0) throw std::invalid_argument("Rational: division by zero");
  return Rational(checked_mul(num, o.den), checked_mul(den, o.num));
}

bool Rational::operator<(const Rational& o) const {
  return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational parse_rational(const std::string& text) {
  if (text == "inf" || text == "infinity")
    throw std::invalid_argument("parse_rational: infinity has no rational value; use reciprocal 0");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    long long n = std::stoll(text.substr(0, slash));
    long long d = std::stoll(text.substr(slash + 1));
    return Rational(n, d);
  }
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    int frac = static_cast<int>(text.size() - dot - 1);
    if (frac > 15) throw std::invalid_argument("parse_rational: too many decimal places");
    long long d = 1;
    for (int i = 0; i < frac; ++i) d *= 10;
    return Rational(std::stoll(digits), d);
  }
  return Rational(std::stoll(text));
}

Rational IndexTuple::inv_r_prime() const { return Rational(1) - Rational(1) / r; }

namespace {

// lexicographic comparison of subsets as sorted index lists
bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

RegionVerdict check_sufficiency(const IndexTuple& idx) {
  const int m = idx.m;
  if (static_cast<int>(idx.s.size()) != m || static_cast<int>(idx.inv_p.size()) != m)
    throw std::invalid_argument("check_sufficiency: s and inv_p must have m entries");
  if (!(Rational(1) < idx.r)) throw std::invalid_argument("check_sufficiency: need r > 1");

  RegionVerdict v;
  const Rational n_over_r = Rational(idx.n) / idx.r;
  const Rational neg_inv_rp = -idx.inv_r_prime();

  // smallest s_k decides the minimal-smoothness condition
  int argmin = 0;
  for (int k = 1; k < m; ++k)
    if (idx.s[k] < idx.s[argmin]) argmin = k;
  if (idx.s[argmin] <= n_over_r) {
    v.verdict = Boundedness::unbounded;
    v.failing_min_s = argmin + 1;
    v.witness = "prop_1_2";
    v.boundary = idx.s[argmin] == n_over_r;
    return v;
  }

  std::vector<int> best_J;
  bool boundary = false;
  for (int mask = 1; mask < (1 << m); ++mask) {
    Rational sum(0);
    std::vector<int> J;
    for (int k = 0; k < m; ++k) {
      if (mask & (1 << k)) {
        sum = sum + idx.s[k] / Rational(idx.n) - idx.inv_p[k];
        J.push_back(k + 1);
      }
    }
    if (sum == neg_inv_rp) boundary = true;
    if (sum <= neg_inv_rp) {
      if (best_J.empty() || lex_less(J, best_J)) best_J = J;
    }
  }
  if (!best_J.empty()) {
    v.verdict = Boundedness::unbounded;
    v.failing_J = best_J;
    v.witness = "prop_1_3";
    v.boundary = boundary;
    return v;
  }
  v.boundary = boundary;
  v.verdict = idx.r > Rational(2) ? Boundedness::open_sufficiency : Boundedness::bounded;
  return v;
}

bool theorem_bc_bounded(const IndexTuple& idx) {
  // classical r = 2 conditions: s_k > n/2 and all J-sums > -1/2
  const Rational half(1, 2);
  const Rational n_half = Rational(idx.n) / Rational(2);
  for (int k = 0; k < idx.m; ++k)
    if (!(idx.s[k] > n_half)) return false;
  for (int mask = 1; mask < (1 << idx.m); ++mask) {
    Rational sum(0);
    for (int k = 0; k < idx.m; ++k)
      if (mask & (1 << k)) sum = sum + idx.s[k] / Rational(idx.n) - idx.inv_p[k];
    if (!(sum > -half)) return false;
  }
  return true;
}

FuzzReport check_r2_equivalence(int m, int n, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FuzzReport rep;
  rep.samples = samples;
  std::uniform_int_distribution<int> num(0, 80);
  std::uniform_int_distribution<int> pden(1, 8);
  for (int i = 0; i < samples; ++i) {
    IndexTuple idx;
    idx.m = m;
    idx.n = n;
    idx.r = Rational(2);
    idx.s.resize(m);
    idx.inv_p.resize(m);
    for (int k = 0; k < m; ++k) {
      idx.s[k] = Rational(num(rng), 16);          // s in [0, 5] step 1/16
      int d = pden(rng);
      std::uniform_int_distribution<int> pn(0, 4 * d);
      idx.inv_p[k] = Rational(pn(rng), d);        // 1/p in [0, 4]
    }
    bool a = check_sufficiency(idx).verdict == Boundedness::bounded;
    bool b = theorem_bc_bounded(idx);
    if (a != b) {
      ++rep.mismatches;
      if (!rep.first_mismatch) rep.first_mismatch = idx;
    }
  }
  return rep;
}

bool gamma_membership(std::span<const Rational> s, std::span<const Rational> inv_p, Rational r,
                      int n) {
  const int m = static_cast<int>(s.size());
  const Rational neg_inv_rp = Rational(1) / r - Rational(1);
  for (int mask = 1; mask < (1 << m); ++mask) {
    Rational sum(0);
    for (int k = 0; k < m; ++k)
      if (mask & (1 << k)) sum = sum + s[k] / Rational(n) - inv_p[k];
    if (sum < neg_inv_rp) return false;
  }
  return true;
}

bool lambda_membership(int u, std::span<const Rational> s, std::span<const Rational> inv_p,
                       Rational r, int n) {
  const int m = static_cast<int>(s.size());
  if (u < 1 || u > m) throw std::invalid_argument("lambda_membership: u out of range");
  const Rational inv_rp = Rational(1) - Rational(1) / r;
  for (int k = 0; k < m; ++k) {
    Rational floor_k = Rational(n) * inv_p[k];
    if (k == u - 1) floor_k = floor_k - Rational(n) * inv_rp;
    if (s[k] < floor_k) return false;
  }
  return true;
}

namespace {

// phase-1 dense simplex with Bland's rule; returns true when the system
// {A x = b, x >= 0} is feasible within tol
bool lp_feasible(std::vector<std::vector<double>> A, std::vector<double> b, double tol) {
  const int rows = static_cast<int>(A.size());
  const int cols = rows > 0 ? static_cast<int>(A[0].size()) : 0;
  // make b nonnegative
  for (int i = 0; i < rows; ++i) {
    if (b[i] < 0) {
      b[i] = -b[i];
      for (int j = 0; j < cols; ++j) A[i][j] = -A[i][j];
    }
  }
  // tableau with artificial variables; minimize their sum
  const int total = cols + rows;
  std::vector<std::vector<double>> T(rows + 1, std::vector<double>(total + 1, 0.0));
  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) T[i][j] = A[i][j];
    T[i][cols + i] = 1.0;
    T[i][total] = b[i];
    basis[i] = cols + i;
  }
  // objective row: sum of artificial rows (negated reduced costs)
  for (int j = 0; j <= total; ++j) {
    double sum = 0;
    for (int i = 0; i < rows; ++i) sum += T[i][j];
    T[rows][j] = sum;
  }
  for (int i = 0; i < rows; ++i) T[rows][cols + i] = 0.0;

  const int max_iters = 10000;
  for (int iter = 0; iter < max_iters; ++iter) {
    // Bland: smallest index with positive reduced cost
    int pivot_col = -1;
    for (int j = 0; j < total; ++j) {
      if (T[rows][j] > tol) {
        pivot_col = j;
        break;
      }
    }
    if (pivot_col < 0) break;
    int pivot_row = -1;
    double best = 0;
    for (int i = 0; i < rows; ++i) {
      if (T[i][pivot_col] > tol) {
        double ratio = T[i][total] / T[i][pivot_col];
        if (pivot_row < 0 || ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[pivot_row])) {
          pivot_row = i;
          best = ratio;
        }
      }
    }
    if (pivot_row < 0) throw std::runtime_error("hull_membership: LP numerical failure (unbounded phase-1)");
    const double pv = T[pivot_row][pivot_col];
    for (int j = 0; j <= total; ++j) T[pivot_row][j] /= pv;
    for (int i = 0; i <= rows; ++i) {
      if (i == pivot_row) continue;
      const double f = T[i][pivot_col];
      if (f != 0.0) {
        for (int j = 0; j <= total; ++j) T[i][j] -= f * T[pivot_row][j];
      }
    }
    basis[pivot_row] = pivot_col;
    if (iter == max_iters - 1)
      throw std::runtime_error("hull_membership: LP numerical failure (iteration cap)");
  }
  return T[rows][total] <= tol;
}

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

}  // namespace

bool hull_membership(std::span<const double> s, std::span<const double> inv_p, double r, int n,
                     int m, double M) {
  if (static_cast<int>(s.size()) != m || static_cast<int>(inv_p.size()) != m)
    throw std::invalid_argument("hull_membership: s and inv_p must have m entries");
  double sum_invp = 0;
  for (double ip : inv_p) sum_invp += ip;
  if (!(M > m * n * sum_invp))
    throw std::invalid_argument("hull_membership: cap M must exceed m n sum(1/p_k)");
  for (double sk : s)
    if (sk > M + 1e-12) throw std::invalid_argument("hull_membership: s exceeds the cap M");

  const double inv_rp = 1.0 - 1.0 / r;
  if (m == 2) {
    // clockwise five-vertex polygon (the capped region of the two generators)
    const double l1 = n * inv_p[0] - n * inv_rp;
    const double l2 = n * inv_p[1] - n * inv_rp;
    const double f1 = n * inv_p[0];
    const double f2 = n * inv_p[1];
    const double vx[5] = {M, l1, l1, f1, M};
    const double vy[5] = {M, M, f2, l2, l2};
    // the listed order is counterclockwise: inside-or-on means every cross
    // product is nonnegative
    for (int i = 0; i < 5; ++i) {
      int k = (i + 1) % 5;
      if (cross(vx[i], vy[i], vx[k], vy[k], s[0], s[1]) < -1e-12 * std::max(1.0, M * M))
        return false;
    }
    return true;
  }

  // variables: theta_u (m of them), then w_{u,i} = theta_u v_{u,i} (m*m),
  // then slacks for the inequality rows
  // equalities: sum_u theta_u = 1 ; sum_u w_{u,i} = s_i
  // inequalities: w_{u,i} - theta_u floor_{u,i} >= 0 ; theta_u M - w_{u,i} >= 0
  const int nv = m + m * m;
  const int n_ineq = 2 * m * m;
  const int rows = 1 + m + n_ineq;
  const int cols = nv + n_ineq;  // slack per inequality
  std::vector<std::vector<double>> A(rows, std::vector<double>(cols, 0.0));
  std::vector<double> b(rows, 0.0);
  auto theta_var = [&](int u) { return u; };
  auto w_var = [&](int u, int i) { return m + u * m + i; };
  int row = 0;
  for (int u = 0; u < m; ++u) A[row][theta_var(u)] = 1.0;
  b[row++] = 1.0;
  for (int i = 0; i < m; ++i) {
    for (int u = 0; u < m; ++u) A[row][w_var(u, i)] = 1.0;
    b[row++] = s[i];
  }
  int slack = nv;
  for (int u = 0; u < m; ++u) {
    for (int i = 0; i < m; ++i) {
      double floor_ui = n * inv_p[i] - (i == u ? n * inv_rp : 0.0);
      // w - theta*floor - slack = 0
      A[row][w_var(u, i)] = 1.0;
      A[row][theta_var(u)] = -floor_ui;
      A[row][slack++] = -1.0;
      b[row++] = 0.0;
      // theta*M - w - slack = 0
      A[row][theta_var(u)] = M;
      A[row][w_var(u, i)] = -1.0;
      A[row][slack++] = -1.0;
      b[row++] = 0.0;
    }
  }
  return lp_feasible(std::move(A), std::move(b), 1e-9);
}

ScanReport hull_equivalence_scan(std::span<const double> inv_p, double r, int n, int m, double M,
                                 int sample_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, M);
  const double inv_rp = 1.0 - 1.0 / r;
  ScanReport rep;
  rep.samples = sample_count;
  std::vector<double> s(m);
  for (int it = 0; it < sample_count; ++it) {
    for (int k = 0; k < m; ++k) s[k] = uni(rng);
    // distance to the nearest constraint face
    double min_dist = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < (1 << m); ++mask) {
      double sum = 0;
      for (int k = 0; k < m; ++k)
        if (mask & (1 << k)) sum += s[k] / n - inv_p[k];
      min_dist = std::min(min_dist, std::abs(sum + inv_rp));
    }
    for (int k = 0; k < m; ++k) min_dist = std::min(min_dist, std::abs(M - s[k]));
    if (min_dist < 1e-9) {
      ++rep.boundary_skipped;
      continue;
    }
    bool in_gamma = true;
    for (int mask = 1; mask < (1 << m) && in_gamma; ++mask) {
      double sum = 0;
      for (int k = 0; k < m; ++k)
        if (mask & (1 << k)) sum += s[k] / n - inv_p[k];
      if (sum < -inv_rp) in_gamma = false;
    }
    bool in_hull = hull_membership(std::span<const double>(s.data(), s.size()), inv_p, r, n, m, M);
    if (in_gamma != in_hull) {
      ++rep.mismatches;
      rep.mismatch_points.push_back(s);
    }
  }
  return rep;
}

}  // namespace mlin

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mlin {

// Exact rational arithmetic for the index calculus; numerators and
// denominators stay tiny here, overflow checks throw rather than wrap.
struct Rational {
  long long num = 0;
  long long den = 1;  // > 0, gcd(num, den) = 1

  Rational() = default;
  Rational(long long n);  // NOLINT: implicit integers are convenient
  Rational(long long n, long long d);

  static Rational infinity_reciprocal() { return Rational(0); }  // 1/p for p = inf

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational operator-() const { return Rational(-num, den); }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

// Accepts "3/2", "0.51", "2", "inf".
Rational parse_rational(const std::string& text);

// Index bundle of the boundedness characterization. p is stored as
// reciprocals so p = infinity is plain zero.
struct IndexTuple {
  int m = 2;
  int n = 1;
  Rational r{2};
  std::vector<Rational> inv_p;  // size m
  std::vector<Rational> s;      // size m

  Rational inv_r_prime() const;  // 1/r' = 1 - 1/r
};

enum class Boundedness { bounded, unbounded, open_sufficiency };

struct RegionVerdict {
  Boundedness verdict = Boundedness::bounded;
  std::optional<int> failing_min_s;       // index k with s_k <= n/r (1-based)
  std::vector<int> failing_J;             // lexicographically smallest failing subset (1-based)
  std::string witness;                    // "prop_1_2" or "prop_1_3" when unbounded
  bool boundary = false;                  // some constraint held with equality
};

// Strict sufficiency conditions: s_k > n/r for all k and
// sum_{k in J} (s_k/n - 1/p_k) > -1/r' for every nonempty J.
// For r > 2 with the conditions satisfied the verdict is open_sufficiency.
RegionVerdict check_sufficiency(const IndexTuple& idx);

// Reference verdict specialized to r = 2 (the classical conditions).
bool theorem_bc_bounded(const IndexTuple& idx);

struct FuzzReport {
  int samples = 0;
  int mismatches = 0;
  std::optional<IndexTuple> first_mismatch;
};

// Fuzz agreement between check_sufficiency at r = 2 and the classical
// conditions.
FuzzReport check_r2_equivalence(int m, int n, int samples, std::uint64_t seed);

// Non-strict admissible region Gamma_m(p): all J-sums >= -1/r'.
bool gamma_membership(std::span<const Rational> s, std::span<const Rational> inv_p, Rational r,
                      int n);
// Generator set Lambda^u_m(p): s_u >= n/p_u - n/r', s_i >= n/p_i otherwise.
bool lambda_membership(int u, std::span<const Rational> s, std::span<const Rational> inv_p,
                       Rational r, int n);

// Convex-hull membership of the capped generator sets; closed-form polygon
// for m = 2, small dense LP feasibility otherwise. Throws on numerical
// failure rather than reporting false.
bool hull_membership(std::span<const double> s, std::span<const double> inv_p, double r, int n,
                     int m, double M);

struct ScanReport {
  int samples = 0;
  int mismatches = 0;
  int boundary_skipped = 0;
  std::vector<std::vector<double>> mismatch_points;
};

// Samples points of [0, M]^m and asserts capped-Gamma membership matches
// hull membership, excluding a 1e-9 band around every face.
ScanReport hull_equivalence_scan(std::span<const double> inv_p, double r, int n, int m, double M,
                                 int sample_count, std::uint64_t seed);

}  // namespace mlin

// Batch experiment harness: region verdicts, counterexample sweeps, norms of
// serialized fields, the invariant self-test, and SVG rendering of sweep CSVs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "mlin/field_io.hpp"
#include "mlin/frames.hpp"
#include "mlin/kernels.hpp"
#include "mlin/multiplier.hpp"
#include "mlin/norms.hpp"
#include "mlin/region.hpp"
#include "mlin/sharpness.hpp"
#include "mlin/sweep_io.hpp"

using namespace mlin;
using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) out.push_back(std::stoi(item));
  return out;
}

// config-file value lookup with CLI override; returns true when found
template <typename T, typename Parse>
void apply_key(const std::map<std::string, std::string>& cfg, const std::string& key, T& slot,
               Parse parse) {
  auto it = cfg.find(key);
  if (it != cfg.end()) slot = parse(it->second);
}

int run_check_region(const std::string& m_s, const std::string& n_s, const std::string& r_s,
                     const std::string& p_s, const std::string& s_s, bool hull, double cap) {
  IndexTuple idx;
  idx.m = std::stoi(m_s);
  idx.n = std::stoi(n_s);
  idx.r = parse_rational(r_s);
  for (const auto& item : split_list(p_s)) {
    if (item == "inf" || item == "infinity") {
      idx.inv_p.push_back(Rational(0));
    } else {
      idx.inv_p.push_back(Rational(1) / parse_rational(item));
    }
  }
  for (const auto& item : split_list(s_s)) idx.s.push_back(parse_rational(item));
  if (static_cast<int>(idx.inv_p.size()) != idx.m || static_cast<int>(idx.s.size()) != idx.m) {
    std::cerr << "check-region: p and s need exactly m entries\n";
    return 2;
  }
  RegionVerdict v = check_sufficiency(idx);
  json out;
  if (v.verdict == Boundedness::open_sufficiency) {
    out["bounded"] = nullptr;  // the sufficiency direction is open for r > 2
  } else {
    out["bounded"] = v.verdict == Boundedness::bounded;
  }
  out["verdict"] = v.verdict == Boundedness::bounded      ? "bounded"
                   : v.verdict == Boundedness::unbounded  ? "unbounded"
                                                          : "open_sufficiency";
  out["boundary"] = v.boundary;
  if (!v.witness.empty()) out["witness"] = v.witness;
  if (v.failing_min_s) out["failing_min_s"] = *v.failing_min_s;
  if (!v.failing_J.empty()) out["failing_J"] = v.failing_J;
  if (hull) {
    std::vector<double> s_d, ip_d;
    for (const auto& q : idx.s) s_d.push_back(q.to_double());
    for (const auto& q : idx.inv_p) ip_d.push_back(q.to_double());
    out["hull_member"] =
        hull_membership(std::span<const double>(s_d.data(), s_d.size()),
                        std::span<const double>(ip_d.data(), ip_d.size()),
                        idx.r.to_double(), idx.n, idx.m, cap);
  }
  std::cout << out.dump() << "\n";
  return 0;
}

const std::vector<std::string> kCe1Keys = {
    "N_list", "eps_list", "r", "delta", "s", "p", "support_scale", "seed", "timings",
    "sym_points", "sym_box", "norm_points", "norm_box", "slow_points", "slow_box"};

const std::vector<std::string> kCe2Keys = {
    "box_list", "r", "s", "p", "tau", "tau_tail", "support_scale", "seed", "timings",
    "sym_points", "sym_box", "hardy_dx", "norm1d_dx"};

int run_ce1(const std::map<std::string, std::string>& cfg, const std::string& out_dir,
            std::uint64_t seed, bool timings) {
  validate_keys(cfg, kCe1Keys);
  CE1Params P;
  P.s = {2.0 / 3, 2.0};
  P.p = {2.0, 2.0};
  std::vector<int> N_list = {16, 32, 64, 128, 256};
  std::vector<double> eps_list = {1.0 / 256, 1.0 / 128};
  apply_key(cfg, "N_list", N_list, parse_ints);
  apply_key(cfg, "eps_list", eps_list, parse_doubles);
  apply_key(cfg, "r", P.r, [](const std::string& v) { return std::stod(v); });
  apply_key(cfg, "delta", P.delta, [](const std::string& v) { return std::stod(v); });
  apply_key(cfg, "s", P.s, parse_doubles);
  apply_key(cfg, "p", P.p, parse_doubles);
  apply_key(cfg, "support_scale", P.support_scale,
            [](const std::string& v) { return std::stod(v); });
  apply_key(cfg, "sym_points", P.sym_points, [](const std::string& v) { return std::stoi(v); });
  apply_key(cfg, "sym_box", P.sym_box, [](const std::string& v) { return std::stod(v); });
  apply_key(cfg, "norm_points", P.norm_points, [](const std::string& v) { return std::stoi(v); });
  apply_key(cfg, "norm_box", P.norm_box, [](const std::string& v) { return std::stod(v); });
  apply_key(cfg, "slow_points", P.slow_points, [](const std::string& v) { return std::stoi(v); });
  apply_key(cfg, "slow_box", P.slow_box, [](const std::string& v) { return std::stod(v); });

  auto records = ce1_sweep(P, std::span<const int>(N_list.data(), N_list.size()),
                           std::span<const double>(eps_list.data(), eps_list.size()), timings);
  std::filesystem::create_directories(out_dir);
  std::ostringstream grid_note;
  grid_note << "sym P=" << P.sym_points << " L=" << P.sym_box << " slow P=" << P.slow_points
            << " L=" << P.slow_box;
  write_records_csv(records, out_dir + "/ce1_sweep.csv", seed, grid_note.str());

  // summary line: trend of the ratio across N at the smallest eps
  double first = 0, last = 0;
  for (const auto& r : records) {
    if (r.eps == eps_list.front()) {
      if (r.N_or_L == N_list.front()) first = r.ratio;
      if (r.N_or_L == N_list.back()) last = r.ratio;
    }
  }
  std::cout << "ce1-sweep: " << records.size() << " records, ratio growth "
            << (first > 0 ? last / first : 0.0) << " across N=" << N_list.front() << ".."
            << N_list.back() << "\n";
  return 0;
}

int run_ce2(const std::map<std::string, std::string>& cfg, const std::string& out_dir,
            std::uint64_t seed, bool timings) {
  validate_keys(cfg, kCe2Keys);
  CE2Params P;
  P.s = {0.7, 2.0};
  P.p = {30.0 / 31, 8.0};
  P.tau = 1.4;
  P.tau_tail = {0.3};
  std::vector<double> box_list = {8192.0, 16384.0, 32768.0};
  apply_key(cfg, "box_list", box_list, parse_doubles);
  apply_key(cfg, "r", P.r, [](const std::string& v) { return std::stod(v); });
  apply_key(cfg, "s", P.s, parse_doubles);
  apply_key(cfg, "p", P.p, parse_doubles);
  apply_key(cfg, "tau", P.tau, [](const std::string& v) { return std::stod(v); });
  apply_key(cfg, "tau_tail", P.tau_tail, parse_doubles);
  apply_key(cfg, "support_scale", P.support_scale,
            [](const std::string& v) { return std::stod(v); });
  apply_key(cfg, "sym_points", P.sym_points, [](const std::string& v) { return std::stoi(v); });
  apply_key(cfg, "sym_box", P.sym_box, [](const std::string& v) { return std::stod(v); });
  apply_key(cfg, "hardy_dx", P.hardy_dx, [](const std::string& v) { return std::stod(v); });
  apply_key(cfg, "norm1d_dx", P.norm1d_dx, [](const std::string& v) { return std::stod(v); });

  auto records =
      ce2_sweep(P, std::span<const double>(box_list.data(), box_list.size()), timings);
  std::filesystem::create_directories(out_dir);
  std::ostringstream grid_note;
  grid_note << "sym P=" << P.sym_points << " L=" << P.sym_box << " hardy dx=" << P.hardy_dx;
  write_records_csv(records, out_dir + "/ce2_sweep.csv", seed, grid_note.str());
  std::cout << "ce2-sweep: " << records.size() << " records, ratio growth "
            << records.back().ratio / records.front().ratio << " across L=" << box_list.front()
            << ".." << box_list.back() << "\n";
  return 0;
}

int run_norms(const std::string& input, const std::string& norm_id, double p, double r,
              const std::string& s_list, int m) {
  Field f = read_field(input);
  if (f.space == Space::spectral) f = inverse_ft(f);
  NormReport rep;
  rep.grid = f.grid;
  if (norm_id == "lp") {
    rep.value = lp_norm(f, p);
  } else if (norm_id == "standard-sobolev") {
    std::vector<double> s = parse_doubles(s_list);
    rep.value = standard_sobolev_norm(f, r, s.at(0));
  } else if (norm_id == "product-sobolev") {
    std::vector<double> s = parse_doubles(s_list);
    rep.value = product_sobolev_norm(f, m, r, std::span<const double>(s.data(), s.size()));
  } else if (norm_id == "hardy") {
    rep = hardy_norm(f, p);
  } else if (norm_id == "square") {
    ScaleWindow w = resolvable_window(f.grid);
    rep.value = square_function_norm(f, p);
    rep.j_min = w.j_min;
    rep.j_max = w.j_max;
  } else if (norm_id == "bmo") {
    rep.value = bmo_seminorm(f);
  } else {
    std::cerr << "norms: unknown norm id " << norm_id << "\n";
    return 2;
  }
  std::printf("%s,%.12g,%d,%d,%d,%d,%.12g\n", norm_id.c_str(), rep.value, rep.j_min, rep.j_max,
              rep.argmax_j, f.grid.points_per_axis, f.grid.box_length);
  return 0;
}

// ---------------------------------------------------------------------------
// self-test battery
// ---------------------------------------------------------------------------

struct SelfCheck {
  std::string id;
  double value;
  bool pass;
};

Field st_random_band(const Grid& g, int max_bin, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Field spec;
  spec.grid = g;
  spec.space = Space::spectral;
  spec.values.assign(g.total_points(), cplx(0, 0));
  for (int k = 0; k < g.points_per_axis; ++k)
    if (std::abs(g.signed_index(k)) <= max_bin) spec.values[k] = cplx(uni(rng), uni(rng));
  return inverse_ft(spec);
}

int run_selftest(const std::string& out_dir, std::uint64_t seed) {
  std::vector<SelfCheck> checks;
  auto push = [&](const std::string& id, double value, bool pass) {
    checks.push_back({id, value, pass});
  };

  {
    Grid g = make_grid(1, 512, 64.0);
    Field f = st_random_band(g, 128, seed + 1);
    double a = lp_norm(f, 2.0), b = lp_norm(forward_ft(f), 2.0);
    double err = std::abs(a - b) / a;
    push("parseval_rel_err", err, err < 1e-10);

    Field back = inverse_ft(forward_ft(f));
    double worst = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      worst = std::max(worst, std::abs(back.values[i] - f.values[i]));
    push("roundtrip_abs_err", worst, worst < 1e-10);
  }
  {
    // partition of unity over the resolvable window
    Grid g = make_grid(1, 1024, 32.0);
    ScaleWindow w = resolvable_window(g);
    double worst = 0;
    for (int k = 1; k < g.points_per_axis; ++k) {
      double rho = std::abs(g.freq(k));
      if (rho < 2.0 * std::exp2(w.j_min) || 2.0 * rho > std::exp2(w.j_max + 1)) continue;
      double xi[1] = {rho};
      double sum = 0;
      for (int j = w.j_min; j <= w.j_max; ++j) sum += psi_hat(std::span<const double>(xi, 1), j);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    push("partition_unity_err", worst, worst < 1e-12);
  }
  {
    // kernel submultiplicativity on the default lattice
    HKernelParams hp{1.0, 2.0, 1};
    std::mt19937_64 rng(seed + 2);
    std::uniform_int_distribution<int> lattice(-128, 127);
    int violations = 0;
    for (int it = 0; it < 10000; ++it) {
      double x = lattice(rng) * 0.25, y = lattice(rng) * 0.25;
      double lhs = h_kernel_radial(std::abs(x - y), hp);
      double rhs = h_kernel_radial(std::abs(x), hp) * h_kernel_radial(std::abs(y), hp);
      if (lhs < rhs * (1.0 - 1e-13)) ++violations;
    }
    push("kernel_submult_violations", violations, violations == 0);
  }
  {
    // multiplier identities
    Grid g = make_grid(1, 128, 16.0);
    Symbol one = make_symbol(g, 2);
    for (auto& v : one.values) v = cplx(1, 0);
    std::vector<Field> f = {st_random_band(g, 30, seed + 3), st_random_band(g, 30, seed + 4)};
    Field got = apply_multiplier(one, std::span<const Field>(f.data(), 2));
    double worst = 0;
    for (std::size_t i = 0; i < got.values.size(); ++i)
      worst = std::max(worst, std::abs(got.values[i] - f[0].values[i] * f[1].values[i]));
    push("product_identity_err", worst, worst < 1e-9);

    std::mt19937_64 rng(seed + 5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Symbol sigma = make_symbol(g, 2);
    std::vector<double> xi(2);
    for (std::size_t flat = 0; flat < sigma.values.size(); ++flat) {
      sigma.frequency(flat, xi.data());
      if (xi[0] != 0.0 && xi[1] != 0.0) sigma.values[flat] = cplx(uni(rng), uni(rng));
    }
    auto parts = kappa_decompose(sigma);
    auto [low, high] = low_high_split(parts[0]);
    double worst2 = 0, scale = 0;
    for (std::size_t flat = 0; flat < sigma.values.size(); ++flat) {
      cplx sum = parts[1].values[flat] + low.values[flat] + high.values[flat];
      worst2 = std::max(worst2, std::abs(sum - sigma.values[flat]));
      scale = std::max(scale, std::abs(sigma.values[flat]));
    }
    push("decomposition_rebuild_err", worst2 / scale, worst2 < 1e-12 * scale);
  }
  {
    // Peetre constant-function discrete oracle
    Grid g = make_grid(1, 16384, 1024.0);
    Field cf = sample([](std::span<const double>) { return cplx(1.0, 0); }, g);
    Field pm = peetre_maximal(cf, 2.0, 0, 1.0);
    long double acc = 0;
    for (int i = 0; i < g.points_per_axis; ++i)
      acc += std::pow(1.0 + std::abs(g.coord(i)), -2.0);
    double oracle = static_cast<double>(acc) * g.spacing();
    double err = std::abs(pm.values[100].real() - oracle) / oracle;
    push("peetre_const_oracle_err", err, err < 1e-9);
  }
  {
    // region fuzz at r = 2 and the hull scan
    FuzzReport fr = check_r2_equivalence(2, 1, 1000, seed + 6);
    push("region_r2_mismatches", fr.mismatches, fr.mismatches == 0);
    std::vector<double> inv_p = {1.0, 1.0};
    ScanReport sr = hull_equivalence_scan(std::span<const double>(inv_p.data(), 2), 2.0, 1, 2,
                                          10.0, 1000, seed + 7);
    push("hull_scan_mismatches", sr.mismatches, sr.mismatches == 0);
  }
  {
    // construction identities at reduced size
    CE1Params P;
    P.s = {2.0 / 3, 2.0};
    P.p = {2.0, 2.0};
    P.N = 16;
    P.eps = 0.5;
    CE1Build b = build_ce1(P);
    IdentityReport rep = ce1_factorization_check(b);
    push("ce1_identity_rel_err", rep.rel_err(), rep.rel_err() < 1e-8);
    push("ce1_support_lo", b.support_lo, b.support_lo >= b.bound_lo - 1e-9);
    push("ce1_support_hi", b.support_hi, b.support_hi <= b.bound_hi + 1e-9);
  }
  {
    int N_list[] = {16, 32};
    double eps_list[] = {1.0 / 64};
    CE1Params P;
    P.s = {2.0 / 3, 2.0};
    P.p = {2.0, 2.0};
    auto recs = ce1_sweep(P, std::span<const int>(N_list, 2), std::span<const double>(eps_list, 1));
    push("ce1_mass_monotone", recs[1].aux - recs[0].aux, recs[1].aux > recs[0].aux);
    push("ce1_ratio_monotone", recs[1].ratio - recs[0].ratio, recs[1].ratio > recs[0].ratio);
  }

  bool all = true;
  for (const auto& c : checks) all = all && c.pass;

  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/selftest.csv");
  csv << "check_id,value,pass\n";
  char buf[128];
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof buf, "%s,%.12g,%d\n", c.id.c_str(), c.value, c.pass ? 1 : 0);
    csv << buf;
  }
  csv << "#version 1\n#seed " << seed << "\n#grid selftest\n";
  for (const auto& c : checks)
    std::cout << (c.pass ? "pass " : "FAIL ") << c.id << " = " << c.value << "\n";
  std::cout << (all ? "selftest: all checks passed\n" : "selftest: FAILURES\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilinear multiplier laboratory"};
  app.require_subcommand(1);

  // check-region
  auto* region_cmd = app.add_subcommand("check-region", "classify an index tuple");
  std::string m_s = "2", n_s = "1", r_s = "2", p_s = "2,2", s_s = "1,1";
  bool hull = false;
  double cap = 16.0;
  region_cmd->add_option("--m", m_s, "multilinearity");
  region_cmd->add_option("--n", n_s, "dimension");
  region_cmd->add_option("--r", r_s, "integrability index (rational like 3/2)");
  region_cmd->add_option("--p", p_s, "comma list of Lebesgue exponents, inf allowed");
  region_cmd->add_option("--s", s_s, "comma list of smoothness orders");
  region_cmd->add_flag("--hull", hull, "also test capped-hull membership");
  region_cmd->add_option("--M", cap, "cap for the hull test");

  // sweeps
  auto* ce1_cmd = app.add_subcommand("ce1-sweep", "mollified-symbol sharpness sweep");
  auto* ce2_cmd = app.add_subcommand("ce2-sweep", "near-diagonal-symbol sharpness sweep");
  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  bool timings = false;
  bool seed_given = false;
  for (auto* cmd : {ce1_cmd, ce2_cmd}) {
    cmd->add_option("--config", config_path, "flat key = value file");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "seed stamped into the CSV");
    cmd->add_flag("--timings", timings, "record wall-clock times (non-reproducible bytes)");
  }

  // norms
  auto* norms_cmd = app.add_subcommand("norms", "compute a norm of a serialized field");
  std::string input, norm_id = "lp", s_list = "1";
  double p_exp = 2.0, r_exp = 2.0;
  int m_fac = 1;
  norms_cmd->add_option("--input", input, "field file")->required();
  norms_cmd->add_option("--norm", norm_id, "lp|standard-sobolev|product-sobolev|hardy|square|bmo");
  norms_cmd->add_option("--p", p_exp, "Lebesgue exponent");
  norms_cmd->add_option("--r", r_exp, "Sobolev integrability exponent");
  norms_cmd->add_option("--s", s_list, "smoothness order(s), comma list");
  norms_cmd->add_option("--m", m_fac, "number of factor blocks");

  // selftest
  auto* self_cmd = app.add_subcommand("selftest", "run the invariant battery");
  self_cmd->add_option("--out", out_dir, "output directory");
  self_cmd->add_option("--seed", seed, "seed for the randomized checks")
      ->each([&](const std::string&) { seed_given = true; });

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "render a sweep CSV to SVG");
  std::string csv_path, x_col = "N_or_L", y_col = "ratio", svg_path = "plot.svg";
  bool log_y = false;
  plot_cmd->add_option("--csv", csv_path, "input CSV")->required();
  plot_cmd->add_option("--x", x_col, "x column");
  plot_cmd->add_option("--y", y_col, "y column");
  plot_cmd->add_option("--out", svg_path, "output SVG");
  plot_cmd->add_flag("--log-y", log_y, "log10 scale on y");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (region_cmd->parsed()) return run_check_region(m_s, n_s, r_s, p_s, s_s, hull, cap);
    std::map<std::string, std::string> cfg;
    if (!config_path.empty()) cfg = parse_config_file(config_path);
    if (ce1_cmd->parsed()) return run_ce1(cfg, out_dir, seed, timings);
    if (ce2_cmd->parsed()) return run_ce2(cfg, out_dir, seed, timings);
    if (norms_cmd->parsed()) return run_norms(input, norm_id, p_exp, r_exp, s_list, m_fac);
    if (self_cmd->parsed()) {
      if (!seed_given) {
        std::cerr << "selftest: --seed is required for the randomized checks\n";
        return 2;
      }
      return run_selftest(out_dir, seed);
    }
    if (plot_cmd->parsed()) {
      emit_plot(csv_path, x_col, y_col, svg_path, log_y);
      std::cout << "wrote " << svg_path << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

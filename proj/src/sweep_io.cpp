#include "mlin/sweep_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mlin {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join_semicolon(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += fmt(v[i]);
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void write_records_csv(const std::vector<ExperimentRecord>& records, const std::string& path,
                       std::uint64_t seed, const std::string& grid_note) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_records_csv: cannot open " + path);
  out << "run_id,construction,N_or_L,eps,r,delta_or_tau,s_vec,p_vec,L_functional,hardy_norms,"
         "output_lp,ratio,wall_ms\n";
  // canonical order: by construction, then N_or_L, then eps
  std::vector<const ExperimentRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    if (a->construction != b->construction) return a->construction < b->construction;
    if (a->N_or_L != b->N_or_L) return a->N_or_L < b->N_or_L;
    return a->eps < b->eps;
  });
  for (const auto* r : sorted) {
    out << r->run_id << ',' << r->construction << ',' << fmt(r->N_or_L) << ',' << fmt(r->eps)
        << ',' << fmt(r->r) << ',' << fmt(r->delta_or_tau) << ',' << join_semicolon(r->s_vec)
        << ',' << join_semicolon(r->p_vec) << ',' << fmt(r->L_functional) << ','
        << join_semicolon(r->hardy_norms) << ',' << fmt(r->output_lp) << ',' << fmt(r->ratio)
        << ',' << r->wall_ms << '\n';
  }
  out << "#version 1\n#seed " << seed << "\n#grid " << grid_note << "\n";
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("parse_config_file: cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("parse_config_file: malformed line " + std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("parse_config_file: empty key at line " +
                                               std::to_string(lineno));
    out[key] = val;
  }
  return out;
}

void validate_keys(const std::map<std::string, std::string>& config,
                   const std::vector<std::string>& known) {
  for (const auto& [key, value] : config) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key: " + key);
  }
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  CsvTable table;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header) {
      table.columns = cells;
      header = false;
    } else {
      table.rows.push_back(cells);
    }
  }
  return table;
}

void emit_plot(const std::string& csv_path, const std::string& x_col, const std::string& y_col,
               const std::string& svg_path, bool log_y) {
  CsvTable table = read_csv(csv_path);
  const int xi = table.column(x_col);
  const int yi = table.column(y_col);
  if (xi < 0) throw std::invalid_argument("emit_plot: missing column " + x_col);
  if (yi < 0) throw std::invalid_argument("emit_plot: missing column " + y_col);
  if (table.rows.size() < 2) throw std::runtime_error("emit_plot: need at least 2 data rows");
  const int ci = table.column("construction");

  struct Pt {
    double x, y;
  };
  std::map<std::string, std::vector<Pt>> series;
  for (std::size_t rix = 0; rix < table.rows.size(); ++rix) {
    const auto& row = table.rows[rix];
    double x = std::stod(row[static_cast<std::size_t>(xi)]);
    double y = std::stod(row[static_cast<std::size_t>(yi)]);
    if (log_y) {
      if (!(y > 0))
        throw std::runtime_error("emit_plot: log scale with nonpositive value at data row " +
                                 std::to_string(rix + 1));
      y = std::log10(y);
    }
    std::string id = ci >= 0 ? row[static_cast<std::size_t>(ci)] : "series";
    series[id].push_back({x, y});
  }

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& [id, pts] : series) {
    (void)id;
    for (auto& p : pts) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;

  const double W = 640, H = 480, ml = 60, mr = 20, mt = 20, mb = 40;
  auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto Y = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
  char buf[256];

  std::ofstream out(svg_path);
  if (!out) throw std::runtime_error("emit_plot: cannot open " + svg_path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n");
  out << buf;
  // axes
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", ml,
                H - mb, W - mr, H - mb);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", ml,
                mt, ml, H - mb);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">%s</text>\n", W / 2, H - 8,
                x_col.c_str());
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" transform=\"rotate(-90 14 %.2f)\">%s%s</text>\n",
                14.0, H / 2, H / 2, log_y ? "log10 " : "", y_col.c_str());
  out << buf;
  // tick labels at the corners
  std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\">%.6g</text>\n", ml,
                H - mb + 14, xmin);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" text-anchor=\"end\">%.6g</text>\n",
                W - mr, H - mb + 14, xmax);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\">%.6g</text>\n", 4.0,
                H - mb, ymin);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\">%.6g</text>\n", 4.0,
                mt + 10, ymax);
  out << buf;

  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  int color = 0;
  for (auto& [id, pts] : series) {
    std::vector<Pt> sorted = pts;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Pt& a, const Pt& b) { return a.x < b.x; });
    out << "<polyline fill=\"none\" stroke=\"" << colors[color % 4] << "\" points=\"";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", X(sorted[i].x), Y(sorted[i].y));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" fill=\"%s\">%s</text>\n",
                  W - mr - 80, mt + 14.0 * (color + 1), colors[color % 4], id.c_str());
    out << buf;
    ++color;
  }
  out << "</svg>\n";
}

}  // namespace mlin

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlin/sharpness.hpp"

namespace mlin {

// Deterministic CSV with the sweep schema and a trailing metadata comment.
void write_records_csv(const std::vector<ExperimentRecord>& records, const std::string& path,
                       std::uint64_t seed, const std::string& grid_note);

// Flat "key = value" config file; '#' starts a comment. Unknown keys are the
// caller's problem: parse returns everything, validate_keys rejects strays.
std::map<std::string, std::string> parse_config_file(const std::string& path);
void validate_keys(const std::map<std::string, std::string>& config,
                   const std::vector<std::string>& known);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // comment lines excluded
  int column(const std::string& name) const;   // -1 when missing
};

CsvTable read_csv(const std::string& path);

// Standalone SVG: one polyline per distinct construction id, x/y from the
// named columns, optional log10 y-scale. Byte-deterministic for fixed input.
void emit_plot(const std::string& csv_path, const std::string& x_col, const std::string& y_col,
               const std::string& svg_path, bool log_y = false);

}  // namespace mlin

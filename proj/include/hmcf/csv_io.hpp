#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hmcf/immersion.hpp"

namespace hmcf {

// Shortest representation that round-trips a double at the given number of
// significant digits (17 = bit-exact through strtod).
std::string format_double(double v, int precision = 17);

// Long-format trajectory CSV: header "t,quantity,value", one row per snapshot
// per scalar diagnostic, LF line endings, '.' decimal separator. Byte-exact
// across identical runs.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header, int precision = 17);
  ~CsvWriter();
  void row(const std::vector<std::string>& cells);
  void numeric_row(const std::vector<double>& cells);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::string buffer_;
  int precision_;
};

// Plain-text mesh snapshot:
//   # hmcf-mesh dim=<n> shape=<N1[,N2]>
//   # meta ... (grid spacing/origin/topology, needed for exact round-trips)
//   v x y [z]        (row-major, 17 significant digits)
void write_mesh_snapshot(const std::filesystem::path& path, const Immersion& im);
Immersion read_mesh_snapshot(const std::filesystem::path& path);

}  // namespace hmcf

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace rtpinn {

std::string code_version();

// Identifies the run that produced an artifact. Written at the top of every
// file: as "# key: value" lines in CSV, an XML comment in SVG, and a "header"
// object in JSON.
struct ArtifactHeader {
  std::string problem;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string kind;  // short description of the file contents

  nlohmann::json to_json() const;
};

// CSV with a comment header block followed by one column-name line. Numbers
// are written with 17 significant digits so files round-trip exactly.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const ArtifactHeader& header, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  // Rows that mix labels and numbers; numbers must already be formatted.
  void text_row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

std::string format_number(double v);

void write_json(const std::filesystem::path& path, const ArtifactHeader& header, nlohmann::json body);

// Values on a regular nx x ny grid, row-major with x fastest; value(i, j) sits
// at x_lo + i (x_hi - x_lo) / (nx - 1), likewise in y.
struct HeatmapGrid {
  int nx = 0;
  int ny = 0;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  std::vector<double> values;
  std::string title, x_label, y_label;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

// Colored cells plus `contours` iso-lines (marching squares) and a color bar.
// Output depends only on the inputs, so repeated runs give identical bytes.
std::string heatmap_svg(const HeatmapGrid& grid, const ArtifactHeader& header, int contours = 8);
void write_heatmap(const std::filesystem::path& path, const HeatmapGrid& grid, const ArtifactHeader& header,
                   int contours = 8);

}  // namespace rtpinn

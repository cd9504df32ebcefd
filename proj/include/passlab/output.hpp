#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace passlab {

/// One CSV column: header (name with SI unit) and values.
struct CsvColumn {
  std::string header;
  std::span<const double> values;
};

/// "%.9e" formatting used for every number written to CSV.
std::string format_number(double v);

/// Header row then every `stride`-th row (the last row is always kept).
/// Columns must share one length. Throws std::ios_base::failure on IO errors.
void write_csv(const std::filesystem::path& path, const std::vector<CsvColumn>& columns, std::size_t stride = 1);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Matplotlib script that plots each CSV's first column against the others.
std::string plot_script(const std::vector<std::string>& csv_files);

}  // namespace passlab

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace breakcoag {

// Numeric CSV with a mandatory header row. Lines starting with '#' are
// comments.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column, or throws DataError.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Parses CSV text; `source` is used in error messages only.
CsvTable parse_csv(const std::string& text, const std::string& source = "<memory>");

}  // namespace breakcoag

#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace sf {

// CSV with '#'-prefixed metadata lines, comma separators, '.' decimals.
// Every file carries the tool version and the unit convention line.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns,
              const std::vector<std::string>& metadata = {});

    void row(const std::vector<double>& values);

  private:
    std::ofstream out_;
};

// FNV-1a of a file's bytes, for scenario provenance headers.
std::string file_hash_hex(const std::string& path);

std::string format_double(double v);

}  // namespace sf

#include "sf/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <stdexcept>

#include "sf/constants.hpp"

namespace sf {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns,
                     const std::vector<std::string>& metadata)
    : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    out_ << "# " << kToolVersion << "\n";
    out_ << "# units: " << kUnitConventionLine << "\n";
    for (const auto& m : metadata) out_ << "# " << m << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i)
        out_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

std::string file_hash_hex(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("file_hash_hex: cannot open " + path);
    uint64_t h = 1469598103934665603ull;
    int c;
    while ((c = std::fgetc(f)) != EOF) {
        h ^= static_cast<uint64_t>(c);
        h *= 1099511628211ull;
    }
    std::fclose(f);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace sf

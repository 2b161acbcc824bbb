#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsr {

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Deterministic CSV writer: 17 significant digits, comma separator, \n line
/// endings, one header row.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void write_row(const std::vector<double>& values);
    /// Mixed row: strings are emitted verbatim (no quoting needed for the
    /// token vocabulary used here).
    void write_mixed_row(const std::vector<std::string>& values);
    void close();

    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
};

/// Reads a whole file; throws on failure.
std::string read_file(const std::string& path);

}  // namespace tsr

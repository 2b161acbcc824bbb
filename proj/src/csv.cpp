#include "tsr/csv.hpp"

#include "tsr/signals.hpp"

#include <sstream>
#include <stdexcept>

namespace tsr {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) : path_(path) {
    out_.open(path, std::ios::binary);
    if (!out_) throw IoError("cannot open output file '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

void CsvWriter::write_row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << format_double(values[i]);
    }
    out_ << '\n';
}

void CsvWriter::write_mixed_row(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << values[i];
    }
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw IoError("failed to write '" + path_ + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace tsr

#pragma once

// CSV output with pinned number formatting: %.17g round-trips doubles, so two
// runs with the same config and seed produce byte-identical payloads. The
// generation timestamp sits on its own comment line, the one part a
// determinism comparison strips.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "svolterra/version.hpp"

namespace svolterra::io {

inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Cell {
    std::string text;
    Cell(double v) : text(format_number(v)) {}
    Cell(int v) : text(std::to_string(v)) {}
    Cell(long v) : text(std::to_string(v)) {}
    Cell(std::uint64_t v) : text(std::to_string(v)) {}
    Cell(bool v) : text(v ? "1" : "0") {}
    Cell(const char* s) : text(s) {}
    Cell(std::string s) : text(std::move(s)) {}
};

class CsvFile {
  public:
    CsvFile(const std::filesystem::path& path, std::initializer_list<const char*> columns,
            bool timestamp = true) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path, std::ios::binary);  // "\n" endings on every platform
        if (!out_) throw std::runtime_error("csv: cannot open " + path.string());
        out_ << "# svolterra " << SVOLTERRA_VERSION << "\n";
        if (timestamp) {
            std::time_t now = std::time(nullptr);
            char buf[32];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            out_ << "# generated " << buf << "\n";
        }
        bool first = true;
        for (const char* c : columns) {
            if (!first) out_ << ',';
            out_ << c;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<Cell> cells) {
        bool first = true;
        for (const Cell& c : cells) {
            if (c.text.find(',') != std::string::npos || c.text.find('\n') != std::string::npos)
                throw std::invalid_argument("csv: cell contains a separator: " + c.text);
            if (!first) out_ << ',';
            out_ << c.text;
            first = false;
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

// Newline-delimited number list (event times).
inline void write_number_lines(const std::filesystem::path& path,
                               const std::vector<double>& values) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    for (double v : values) out << format_number(v) << '\n';
}

// File payload with "# generated" lines removed, for determinism comparisons.
inline std::string read_stripped(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.rfind("# generated", 0) == 0) continue;
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace svolterra::io

#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

namespace bivruin {

// Shortest round-trip decimal form; locale independent.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Accumulates a CSV document: '#' metadata lines, one header row, data rows.
class CsvBuilder {
  public:
    void comment(const std::string& line) { text_ += "# " + line + "\n"; }

    void header(const std::vector<std::string>& names) { append_row(names); }

    void row(const std::vector<std::string>& cells) { append_row(cells); }

    void row_numeric(const std::vector<double>& cells) {
        std::vector<std::string> formatted;
        formatted.reserve(cells.size());
        for (const double v : cells) formatted.push_back(format_double(v));
        append_row(formatted);
    }

    const std::string& text() const { return text_; }

  private:
    void append_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }

    std::string text_;
};

}  // namespace bivruin

// csv.hpp: bit-stable CSV emission with a '.' decimal point, '\n' line endings and
// 17 significant digits in scientific notation, so every value round-trips.

#pragma once

#include "coopdecay/error.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <type_traits>

namespace coopdecay {

// snprintf with %e is locale independent for the "C" locale the CLI runs in;
// the decimal separator is still normalized in case a caller changed it.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    for (char* p = buf; *p; ++p)
        if (*p == ',') *p = '.';
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    }

    // A '#' comment line ahead of the header.
    void comment(std::string_view text) { out_ << "# " << text << '\n'; }

    void header(std::initializer_list<std::string_view> columns) {
        bool first = true;
        for (auto c : columns) {
            if (!first) out_ << ',';
            out_ << c;
            first = false;
        }
        out_ << '\n';
    }

    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((write_cell(cells, first)), ...);
        out_ << '\n';
        if (!out_) throw IoError("write failed on " + path_.string());
    }

private:
    template <class T>
    void write_cell(const T& v, bool& first) {
        if (!first) out_ << ',';
        first = false;
        if constexpr (std::is_floating_point_v<T>) {
            out_ << format_double(static_cast<double>(v));
        } else if constexpr (std::is_integral_v<T>) {
            out_ << std::to_string(v);
        } else {
            out_ << std::string_view(v);
        }
    }

    std::filesystem::path path_;
    std::ofstream out_;
};

} // namespace coopdecay

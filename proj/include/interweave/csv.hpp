#pragma once

// RFC 4180 style CSV writer. Floating point values use the shortest
// representation that round-trips, so output is byte-stable for a given
// input. Booleans are written as 1/0.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace interweave {

std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    // Provenance line written before the header as "# key: value".
    void comment(std::string_view key, std::string_view value) {
        os_ << "# " << key << ": " << value << "\r\n";
    }

    void header(std::initializer_list<std::string_view> names) {
        bool first = true;
        for (auto name : names) {
            if (!first) os_ << ',';
            write_field(name);
            first = false;
        }
        os_ << "\r\n";
    }

    template <typename... Ts>
    void row(const Ts&... values) {
        bool first = true;
        ((emit(values, first)), ...);
        os_ << "\r\n";
    }

private:
    template <typename T>
    void emit(const T& v, bool& first) {
        if (!first) os_ << ',';
        first = false;
        if constexpr (std::is_same_v<T, bool>) {
            os_ << (v ? '1' : '0');
        } else if constexpr (std::is_floating_point_v<T>) {
            os_ << format_double(static_cast<double>(v));
        } else if constexpr (std::is_integral_v<T>) {
            os_ << v;
        } else {
            write_field(std::string_view(v));
        }
    }

    void write_field(std::string_view s) {
        if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
            os_ << s;
            return;
        }
        os_ << '"';
        for (char c : s) {
            if (c == '"') os_ << '"';
            os_ << c;
        }
        os_ << '"';
    }

    std::ostream& os_;
};

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace interweave

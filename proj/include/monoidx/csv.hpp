#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "monoidx/errors.hpp"
#include "monoidx/series.hpp"

namespace monoidx {

// Shortest decimal form that parses back to the identical double.
inline void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline std::string format_double(double v) {
    std::string s;
    append_double(s, v);
    return s;
}

inline std::string series_to_csv(const SampledSeries& s) {
    std::string out = "t,y\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        append_double(out, s.t[i]);
        out.push_back(',');
        append_double(out, s.y[i]);
        out.push_back('\n');
    }
    return out;
}

namespace detail {

inline double parse_double_field(std::string_view text, std::size_t line_no,
                                 const char* field) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad " + field +
                         " value '" + std::string(text) + "'");
    return v;
}

}  // namespace detail

// Parses the two-column format written by series_to_csv: a "t,y" header and
// one decimal pair per line. Carriage returns are tolerated; anything else
// malformed reports its line number. The assembled series must satisfy the
// usual invariants, which is also what rejects duplicate or unsorted t.
inline SampledSeries series_from_csv(std::string_view text) {
    std::vector<double> t;
    std::vector<double> y;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (line_no == 1) {
            if (line != "t,y")
                throw ParseError("line 1: expected header 't,y'");
            continue;
        }
        if (line.empty()) {
            // only the empty chunk after a final newline is tolerated
            if (pos != text.size() + 1)
                throw ParseError("line " + std::to_string(line_no) + ": blank line");
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected 't,y' pair");
        t.push_back(detail::parse_double_field(line.substr(0, comma), line_no, "t"));
        y.push_back(detail::parse_double_field(line.substr(comma + 1), line_no, "y"));
    }
    return make_series(std::move(t), std::move(y));
}

inline SampledSeries read_series_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return series_from_csv(buf.str());
}

inline void write_series_file(const std::string& path, const SampledSeries& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << series_to_csv(s);
    if (!out) throw ParseError("failed writing '" + path + "'");
}

}  // namespace monoidx

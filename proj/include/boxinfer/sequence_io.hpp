#pragma once

// Sequence files. Two text layouts are read:
//   (a) one 0/1 value per line, optionally preceded by a single header line;
//   (b) two comma-separated columns, an index and a value column headed `x`,
//       with optional double quotes (e.g. `"","x"` then `"1",0`).
// Files are always written in layout (a) without a header.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "boxinfer/errors.hpp"
#include "boxinfer/sequence.hpp"

namespace boxinfer {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    const auto b = std::find_if(s.begin(), s.end(), not_space);
    const auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
    return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b)) : std::string_view{};
}

inline std::string_view unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(unquote(line.substr(start, comma - start)));
        if (comma == std::string_view::npos)
            return out;
        start = comma + 1;
    }
}

inline bool looks_numeric(std::string_view s) {
    if (s.empty())
        return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) || c == '-' || c == '+' || c == '.' || c == 'e' || c == 'E';
    }) && std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

} // namespace detail

inline ObservationSequence parse_sequence(std::istream& in, const std::string& path = "<stream>") {
    using Kind = ParseError::Kind;
    std::vector<Color> draws;
    std::optional<std::size_t> columns;
    bool seen_header = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty())
            continue;
        const auto fields = detail::split_fields(line);
        if (fields.size() > 2)
            throw ParseError(Kind::ColumnCount, path, line_no,
                             "expected 1 or 2 columns, found " + std::to_string(fields.size()));
        if (columns && *columns != fields.size())
            throw ParseError(Kind::ColumnCount, path, line_no,
                             "column count changed from " + std::to_string(*columns) + " to " +
                                 std::to_string(fields.size()));
        const bool header_like = std::any_of(fields.begin(), fields.end(),
                                             [](std::string_view f) { return !detail::looks_numeric(f); });
        if (header_like && !columns && !seen_header) {
            if (fields.size() == 2 && fields[1] != "x")
                throw ParseError(Kind::BadHeader, path, line_no,
                                 "two-column files need a value column named x, found '" +
                                     std::string(fields[1]) + "'");
            seen_header = true;
            columns = fields.size();
            continue;
        }
        columns = fields.size();
        const std::string_view token = fields.back();
        if (token != "0" && token != "1")
            throw ParseError(Kind::MalformedToken, path, line_no,
                             "malformed token '" + std::string(token) + "' (expected 0 or 1)");
        draws.push_back(token == "1" ? Color::White : Color::Black);
    }
    if (draws.empty())
        throw ParseError(Kind::EmptyFile, path, 0, "sequence file contains no draws");
    return ObservationSequence(std::move(draws), Loaded{path});
}

inline ObservationSequence read_sequence(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open sequence file '" + path + "' for reading");
    return parse_sequence(in, path);
}

inline void format_sequence(std::ostream& out, const ObservationSequence& seq) {
    for (Color c : seq.draws())
        out << to_int(c) << '\n';
}

inline void write_sequence(const ObservationSequence& seq, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    format_sequence(out, seq);
    out.flush();
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace boxinfer

#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/extrapolation.hpp"
#include "hardy/sequence.hpp"

namespace hardy {

/// Strict decimal parse of the whole string.
inline double parse_real(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw Error(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
    }
    return value;
}

namespace detail {

// "head:key=value,key=value" -> (head, {key: value}).
inline std::pair<std::string, std::map<std::string, std::string>> split_spec(std::string_view text) {
    const auto colon = text.find(':');
    std::string head(text.substr(0, colon));
    std::map<std::string, std::string> fields;
    if (colon == std::string_view::npos) {
        return {head, fields};
    }
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw Error(ErrorCode::ParseError, "expected key=value in '" + std::string(text) + "'");
        }
        const std::string key(item.substr(0, eq));
        if (!fields.emplace(key, std::string(item.substr(eq + 1))).second) {
            throw Error(ErrorCode::ParseError, "duplicate key '" + key + "'");
        }
        if (comma == std::string_view::npos) {
            break;
        }
        rest = rest.substr(comma + 1);
    }
    return {head, fields};
}

inline void expect_keys(const std::map<std::string, std::string>& fields, std::initializer_list<std::string_view> allowed,
                        std::string_view head) {
    for (const auto& [key, value] : fields) {
        bool known = false;
        for (auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw Error(ErrorCode::ParseError, "unknown key '" + key + "' for " + std::string(head));
        }
    }
}

inline const std::string& field(const std::map<std::string, std::string>& fields, const std::string& key,
                                std::string_view head) {
    const auto it = fields.find(key);
    if (it == fields.end()) {
        throw Error(ErrorCode::ParseError, std::string(head) + " needs '" + key + "'");
    }
    return it->second;
}

inline std::vector<std::vector<double>> read_columns(const std::string& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::vector<double> row;
        std::string token;
        while (fields >> token) {
            try {
                row.push_back(parse_real(token));
            } catch (const Error&) {
                throw Error(ErrorCode::ParseError, path + ": bad number '" + token + "'", line_no);
            }
        }
        if (row.empty()) {
            continue;
        }
        if (row.size() != columns) {
            throw Error(ErrorCode::ParseError, path + ": expected " + std::to_string(columns) + " column(s)", line_no);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

/// `power:alpha=<r>`, `powerlog:alpha=<r>,gamma=<r>`,
/// `explicit:file=<path>[,tail=<alpha>,tail_scale=<s>]` (one value per line, 1-indexed).
inline WeightSequence parse_weight(std::string_view text) {
    const auto [head, fields] = detail::split_spec(text);
    if (head == "power") {
        detail::expect_keys(fields, {"alpha"}, head);
        return WeightSequence(Power{parse_real(detail::field(fields, "alpha", head))}, std::string(text));
    }
    if (head == "powerlog") {
        detail::expect_keys(fields, {"alpha", "gamma"}, head);
        return WeightSequence(PowerLog{parse_real(detail::field(fields, "alpha", head)),
                                       parse_real(detail::field(fields, "gamma", head))},
                              std::string(text));
    }
    if (head == "explicit") {
        detail::expect_keys(fields, {"file", "tail", "tail_scale"}, head);
        std::vector<double> values;
        for (const auto& row : detail::read_columns(detail::field(fields, "file", head), 1)) {
            values.push_back(row[0]);
        }
        std::optional<PowerTail> tail;
        if (fields.count("tail") != 0) {
            tail = PowerTail{parse_real(fields.at("tail")),
                             fields.count("tail_scale") != 0 ? parse_real(fields.at("tail_scale")) : 1.0};
        } else if (fields.count("tail_scale") != 0) {
            throw Error(ErrorCode::ParseError, "tail_scale given without tail");
        }
        try {
            return WeightSequence(Explicit{std::move(values), tail}, std::string(text));
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseError, e.what(), e.index());
        }
    }
    throw Error(ErrorCode::ParseError, "unknown sequence family '" + head + "'");
}

/// `id`, `const:a=<r>`, `pow:a=<r>,r=<r>`, `table:file=<path>` (two columns x y).
inline PhiFunction parse_phi(std::string_view text) {
    const auto [head, fields] = detail::split_spec(text);
    try {
        if (head == "id") {
            detail::expect_keys(fields, {}, head);
            return PhiFunction::identity();
        }
        if (head == "const") {
            detail::expect_keys(fields, {"a"}, head);
            return PhiFunction::constant(parse_real(detail::field(fields, "a", head)));
        }
        if (head == "pow") {
            detail::expect_keys(fields, {"a", "r"}, head);
            return PhiFunction(PowerFn{parse_real(detail::field(fields, "a", head)),
                                       parse_real(detail::field(fields, "r", head))});
        }
        if (head == "table") {
            detail::expect_keys(fields, {"file"}, head);
            Tabulated table;
            for (const auto& row : detail::read_columns(detail::field(fields, "file", head), 2)) {
                table.points.emplace_back(row[0], row[1]);
            }
            return PhiFunction(std::move(table));
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) {
            throw;
        }
        throw Error(ErrorCode::ParseError, e.what());
    }
    throw Error(ErrorCode::ParseError, "unknown phi family '" + head + "'");
}

/// Comma-separated list of reals.
inline std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_real(text.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        text = text.substr(comma + 1);
    }
    return out;
}

} // namespace hardy

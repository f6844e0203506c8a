#pragma once

// Pretty-printer for ordered_json that writes every float with 17 significant
// digits, so reports round-trip doubles exactly and diff cleanly.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

namespace esos::cli {

using json = nlohmann::ordered_json;

inline std::string format_double(double x)
{
    if (!std::isfinite(x)) {
        return "null";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void write_json(const json &j, std::string &out, int depth)
{
    const auto newline = [&](int d) {
        out += '\n';
        out.append(std::size_t(2 * d), ' ');
    };
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (const auto &[key, value] : j.items()) {
            if (!first) {
                out += ',';
            }
            first = false;
            newline(depth + 1);
            out += json(key).dump();
            out += ": ";
            write_json(value, out, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // Short numeric arrays ([re, im] pairs) stay on one line.
        const bool flat = j.size() <= 2 && std::all_of(j.begin(), j.end(), [](const json &e) { return e.is_number(); });
        out += '[';
        bool first = true;
        for (const auto &e : j) {
            if (!first) {
                out += flat ? ", " : ",";
            }
            first = false;
            if (!flat) {
                newline(depth + 1);
            }
            write_json(e, out, depth + 1);
        }
        if (!flat) {
            newline(depth);
        }
        out += ']';
        return;
    }
    case json::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

} // namespace detail

inline std::string to_text(const json &j)
{
    std::string out;
    detail::write_json(j, out, 0);
    out += '\n';
    return out;
}

} // namespace esos::cli

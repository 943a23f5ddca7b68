#pragma once

// Internal helpers for "family:key=value,key=value" spec strings.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gclt::detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

inline std::map<std::string, double> parse_params(const std::string& body,
                                                  const std::string& what) {
    std::map<std::string, double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(what + " parameter missing '=': " + item);
        std::string key = lower(item.substr(0, eq));
        std::string val = item.substr(eq + 1);
        std::size_t used = 0;
        double x = std::stod(val, &used);
        if (used != val.size())
            throw std::invalid_argument("bad " + what + " parameter value: " + item);
        if (!out.emplace(key, x).second)
            throw std::invalid_argument("duplicate " + what + " parameter: " + key);
    }
    return out;
}

inline double take(std::map<std::string, double>& params, const std::string& key,
                   const std::string& what) {
    auto it = params.find(key);
    if (it == params.end())
        throw std::invalid_argument("missing " + what + " parameter: " + key);
    double v = it->second;
    params.erase(it);
    return v;
}

inline void reject_leftovers(const std::map<std::string, double>& params,
                             const std::string& what) {
    if (!params.empty())
        throw std::invalid_argument("unknown " + what + " parameter: " +
                                    params.begin()->first);
}

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace gclt::detail

#pragma once

// Parsing of `key = value` text fields shared by the scenario and experiment readers.

#include "microdisk/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace microdisk::detail
{

inline std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double to_double(const std::string &key, const std::string &v)
{
    try
    {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing");
        return d;
    }
    catch (const std::exception &)
    {
        throw ValidationError(key, "expected a number, got '" + v + "'");
    }
}

inline long to_long(const std::string &key, const std::string &v)
{
    const double d = to_double(key, v);
    if (d != std::floor(d))
        throw ValidationError(key, "expected an integer, got '" + v + "'");
    return static_cast<long>(d);
}

inline bool to_bool(const std::string &key, const std::string &v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ValidationError(key, "expected true/false, got '" + v + "'");
}

} // namespace microdisk::detail

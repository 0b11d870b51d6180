#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace hyiga {

/// 17 significant digits: round-trips every double, so output is bit-stable.
inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace hyiga

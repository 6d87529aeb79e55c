#pragma once

#include <cstdio>
#include <string>

namespace imbench {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double parsed = 0;
        std::sscanf(buf, "%lg", &parsed);
        if (parsed == v) break;
    }
    return buf;
}

} // namespace imbench

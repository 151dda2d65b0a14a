#pragma once

#include <cstdio>
#include <string>

namespace eitmem {

// Fixed 12-significant-digit formatting for reproducible (byte-identical)
// numeric artifacts.
inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
}

}  // namespace eitmem

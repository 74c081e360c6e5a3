#pragma once

#include <cstdio>
#include <string>

namespace peakspam::detail {

inline std::string fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

}  // namespace peakspam::detail

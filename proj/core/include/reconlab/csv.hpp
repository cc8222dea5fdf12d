#pragma once

#include <cstdio>
#include <string>

namespace reconlab {

/// Shortest round-trippable decimal form; fixed formatting keeps CSV bodies
/// byte-identical across runs and job counts.
inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace reconlab

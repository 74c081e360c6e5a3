#include "peakspam/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace peakspam {

std::size_t default_thread_count() {
    if (const char* env = std::getenv("PEAKSPAM_THREADS")) {
        std::size_t value = 0;
        const char* end = env + std::strlen(env);
        auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec == std::errc() && ptr == end && value > 0) return value;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace peakspam

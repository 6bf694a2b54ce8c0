#include "slabgreen/parallel.hpp"

#include <cstdlib>
#include <string>

namespace slabgreen {

unsigned worker_count() {
    if (const char* env = std::getenv("SLABGREEN_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace slabgreen

#include "covstat/parallel.hpp"

#include <cstdlib>
#include <string>

namespace covstat {

unsigned default_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("COVSTAT_WORKERS")) {
        try {
            long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
            // fall through to the serial default
        }
    }
    return 1;
}

} // namespace covstat

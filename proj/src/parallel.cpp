#include "ewl/parallel.hpp"

#include <cstdlib>
#include <string>

namespace ewl {

unsigned worker_count() {
  if (const char* env = std::getenv("EWL_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
      // ignored: fall back to the hardware count
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace ewl

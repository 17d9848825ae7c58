#include "qtrap/parallel.hpp"

#include <cstdlib>
#include <string>

namespace qtrap {

int thread_count() {
  if (const char* env = std::getenv("QTRAP_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace qtrap

#include "starpoly/parallel.hpp"

#include <cstdlib>
#include <string>

namespace starpoly {

int worker_count() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("STARPOLY_THREADS");
  if (env == nullptr || *env == '\0') return static_cast<int>(hw);
  try {
    const int n = std::stoi(env);
    if (n <= 0) return static_cast<int>(hw);
    return n;
  } catch (const std::exception&) {
    return static_cast<int>(hw);
  }
}

}  // namespace starpoly

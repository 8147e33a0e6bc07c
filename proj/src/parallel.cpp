#include "crad/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace crad {

namespace {
std::atomic<unsigned>& current() {
  static std::atomic<unsigned> n{env_thread_count() > 0 ? env_thread_count() : 1u};
  return n;
}
}  // namespace

unsigned env_thread_count() {
  const char* raw = std::getenv("CORNER_RADIANCE_THREADS");
  if (raw == nullptr) return 0;
  try {
    const long v = std::stol(raw);
    return v > 0 ? static_cast<unsigned>(v) : 0u;
  } catch (...) {
    return 0;
  }
}

unsigned thread_count() { return current().load(); }

void set_thread_count(unsigned n) { current().store(n == 0 ? 1u : n); }

}  // namespace crad

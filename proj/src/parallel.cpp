#include "hxd/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace hxd {

namespace {
std::atomic<unsigned> g_threads{0};

unsigned default_threads() {
  if (const char* env = std::getenv("HXD_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}
}  // namespace

void set_thread_count(unsigned count) { g_threads = count; }

unsigned thread_count() {
  const unsigned t = g_threads.load();
  return t == 0 ? default_threads() : t;
}

}  // namespace hxd

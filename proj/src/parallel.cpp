#include "hardy/parallel.hpp"

#include <atomic>

namespace hardy {

namespace {
std::atomic<unsigned> g_thread_cap{1};
}

void set_thread_cap(unsigned n) { g_thread_cap.store(n == 0 ? 1 : n); }
unsigned thread_cap() { return g_thread_cap.load(); }

} // namespace hardy

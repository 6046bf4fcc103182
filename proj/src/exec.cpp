#include "hmcf/exec.hpp"

#include <atomic>

namespace hmcf {

namespace {
std::atomic<ExecMode> g_mode{ExecMode::Parallel};
}

void set_exec_mode(ExecMode mode) { g_mode.store(mode, std::memory_order_relaxed); }
ExecMode exec_mode() { return g_mode.load(std::memory_order_relaxed); }

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace hmcf

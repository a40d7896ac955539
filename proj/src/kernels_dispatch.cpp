#include <atomic>
#include <cstdlib>
#include <cstring>

#include "wavedens/kernels.hpp"

namespace wavedens::kernels {

bool CpuSupportsAvx2() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported && Avx2Kernels() != nullptr;
#else
  return false;
#endif
}

namespace {

const KernelTable* DefaultTable() {
  const char* env = std::getenv("WAVEDENS_ISA");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return &ScalarKernels();
  if (CpuSupportsAvx2()) return Avx2Kernels();
  return &ScalarKernels();
}

std::atomic<const KernelTable*>& Slot() {
  static std::atomic<const KernelTable*> slot{DefaultTable()};
  return slot;
}

}  // namespace

const KernelTable& Active() { return *Slot().load(std::memory_order_relaxed); }

bool ForceIsa(Isa isa) {
  if (isa == Isa::kScalar) {
    Slot().store(&ScalarKernels());
    return true;
  }
  if (!CpuSupportsAvx2()) return false;
  Slot().store(Avx2Kernels());
  return true;
}

std::string_view IsaName(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

}  // namespace wavedens::kernels

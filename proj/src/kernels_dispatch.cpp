#include <cstdlib>
#include <string>

#include "phasesync/kernels.hpp"

namespace phasesync::kernels {

const Ops* avx2_ops_impl();  // kernels_avx2.cpp

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& select_ops() {
  const Ops* avx2 = cpu_has_avx2() ? avx2_ops_impl() : nullptr;
  const char* env = std::getenv("PHASESYNC_SIMD");
  const std::string mode = env ? env : "auto";
  if (mode == "scalar") return scalar_ops();
  if (mode == "avx2" && avx2) return *avx2;
  if (mode == "avx2") return scalar_ops();  // requested ISA unavailable
  return avx2 ? *avx2 : scalar_ops();
}

}  // namespace

const Ops* avx2_ops() { return cpu_has_avx2() ? avx2_ops_impl() : nullptr; }

const Ops& active_ops() {
  static const Ops& ops = select_ops();
  return ops;
}

}  // namespace phasesync::kernels

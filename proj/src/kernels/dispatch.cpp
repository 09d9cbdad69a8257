#include <atomic>
#include <cstdlib>
#include <string>

#include "morphgen/error.hpp"
#include "morphgen/kernels.hpp"

namespace morphgen::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(MORPHGEN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const FloatKernels* initial() {
  if (const char* env = std::getenv("MORPHGEN_ISA")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && isa_supported(Isa::Avx2)) return &kernels_for(Isa::Avx2);
  }
  return &kernels_for(best_isa());
}

std::atomic<const FloatKernels*>& slot() {
  static std::atomic<const FloatKernels*> current{initial()};
  return current;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  if (isa == Isa::Scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

Isa best_isa() { return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

const FloatKernels& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw UsageError("instruction set " + std::string(to_string(isa)) + " is not available");
  }
#if defined(MORPHGEN_HAVE_AVX2)
  if (isa == Isa::Avx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

const FloatKernels& active() { return *slot().load(std::memory_order_acquire); }

Isa active_isa() { return active().isa; }

void set_active_isa(Isa isa) { slot().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace morphgen::kernels

#pragma once

#include <cstddef>
#include <string_view>

// Dense inner-loop kernels of the classifier. Every kernel has a portable
// scalar reference and, on x86-64, an AVX2/FMA variant; the variant is chosen
// once at runtime from CPUID and can be forced with MORPHGEN_ISA=scalar|avx2.
// Variants agree to within float rounding, not bit-for-bit (FMA and
// reassociated sums), so results are reproducible per machine.
namespace morphgen::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct FloatKernels {
  Isa isa;
  // sum_i a[i] * b[i]
  float (*dot)(const float* a, const float* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
  // y = M x, M row-major rows x cols
  void (*gemv)(const float* m, std::size_t rows, std::size_t cols, const float* x, float* y);
  // y += M^T v. Rows with v[r] == 0 are skipped (max-pool gradients are
  // half zeros); ger_acc likewise for u[r] == 0.
  void (*gemv_t_acc)(const float* m, std::size_t rows, std::size_t cols, const float* v, float* y);
  // M += u v^T
  void (*ger_acc)(float* m, std::size_t rows, std::size_t cols, const float* u, const float* v);
};

bool isa_supported(Isa isa);
Isa best_isa();
// Throws UsageError when `isa` is not supported by this build or CPU.
const FloatKernels& kernels_for(Isa isa);
const FloatKernels& active();
Isa active_isa();
void set_active_isa(Isa isa);

const FloatKernels& scalar_kernels();
#if defined(MORPHGEN_HAVE_AVX2)
const FloatKernels& avx2_kernels();
#endif

// Scalar reference implementations, generic over the element type so the
// double-precision network used for gradient checking shares them.
namespace scalar {

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  T s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void gemv(const T* m, std::size_t rows, std::size_t cols, const T* x, T* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(m + r * cols, x, cols);
}

template <typename T>
void gemv_t_acc(const T* m, std::size_t rows, std::size_t cols, const T* v, T* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (v[r] != T(0)) axpy(v[r], m + r * cols, y, cols);
  }
}

template <typename T>
void ger_acc(T* m, std::size_t rows, std::size_t cols, const T* u, const T* v) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (u[r] != T(0)) axpy(u[r], v, m + r * cols, cols);
  }
}

}  // namespace scalar

}  // namespace morphgen::kernels

#include "morphgen/kernels.hpp"

namespace morphgen::kernels {

namespace {

float dot_f(const float* a, const float* b, std::size_t n) { return scalar::dot(a, b, n); }
void axpy_f(float alpha, const float* x, float* y, std::size_t n) { scalar::axpy(alpha, x, y, n); }
void gemv_f(const float* m, std::size_t rows, std::size_t cols, const float* x, float* y) {
  scalar::gemv(m, rows, cols, x, y);
}
void gemv_t_acc_f(const float* m, std::size_t rows, std::size_t cols, const float* v, float* y) {
  scalar::gemv_t_acc(m, rows, cols, v, y);
}
void ger_acc_f(float* m, std::size_t rows, std::size_t cols, const float* u, const float* v) {
  scalar::ger_acc(m, rows, cols, u, v);
}

}  // namespace

const FloatKernels& scalar_kernels() {
  static const FloatKernels k{Isa::Scalar, dot_f, axpy_f, gemv_f, gemv_t_acc_f, ger_acc_f};
  return k;
}

}  // namespace morphgen::kernels

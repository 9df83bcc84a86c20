#pragma once

#include <cstddef>
#include <string>

// Data-parallel primitives behind the heavy inner loops (convolutions, dense
// layers, CWT accumulation, sliding energy). Scalar reference implementations
// are always available; an AVX2+FMA variant is selected at runtime when the
// CPU supports it. Both variants are exposed for equivalence tests.

namespace wrenchval::kernels {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
void set_isa(Isa isa);  // tests and benchmarks; WRENCHVAL_ISA=scalar|avx2 env overrides at startup
bool avx2_supported();
std::string isa_name(Isa isa);

float dot(const float* a, const float* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(float alpha, const float* x, float* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);

// sum of squares
double sum_sq(const double* x, std::size_t n);
float sum_sq(const float* x, std::size_t n);

namespace scalar {
float dot_f32(const float* a, const float* b, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
void axpy_f32(float alpha, const float* x, float* y, std::size_t n);
void axpy_f64(double alpha, const double* x, double* y, std::size_t n);
float sum_sq_f32(const float* x, std::size_t n);
double sum_sq_f64(const double* x, std::size_t n);
}  // namespace scalar

namespace avx2 {
// Callable only when avx2_supported(); otherwise behavior is undefined (SIGILL).
float dot_f32(const float* a, const float* b, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
void axpy_f32(float alpha, const float* x, float* y, std::size_t n);
void axpy_f64(double alpha, const double* x, double* y, std::size_t n);
float sum_sq_f32(const float* x, std::size_t n);
double sum_sq_f64(const double* x, std::size_t n);
}  // namespace avx2

}  // namespace wrenchval::kernels

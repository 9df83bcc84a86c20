#include "wrenchval/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace wrenchval::kernels {

bool avx2_supported() {
#if defined(WRENCHVAL_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Isa pick_initial_isa() {
    if (const char* env = std::getenv("WRENCHVAL_ISA")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Isa::Avx2;
    }
    return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

Isa g_isa = pick_initial_isa();

}  // namespace

Isa active_isa() { return g_isa; }

void set_isa(Isa isa) {
    if (isa == Isa::Avx2 && !avx2_supported()) isa = Isa::Scalar;
    g_isa = isa;
}

std::string isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

#ifdef WRENCHVAL_HAVE_AVX2
#define WV_DISPATCH(fn, ...) \
    return g_isa == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define WV_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

float dot(const float* a, const float* b, std::size_t n) { WV_DISPATCH(dot_f32, a, b, n); }
double dot(const double* a, const double* b, std::size_t n) { WV_DISPATCH(dot_f64, a, b, n); }
void axpy(float alpha, const float* x, float* y, std::size_t n) { WV_DISPATCH(axpy_f32, alpha, x, y, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { WV_DISPATCH(axpy_f64, alpha, x, y, n); }
float sum_sq(const float* x, std::size_t n) { WV_DISPATCH(sum_sq_f32, x, n); }
double sum_sq(const double* x, std::size_t n) { WV_DISPATCH(sum_sq_f64, x, n); }

#ifndef WRENCHVAL_HAVE_AVX2
// keep the symbols linkable on builds without the AVX2 translation unit;
// avx2_supported() is false there, so these are never reached via dispatch
namespace avx2 {
float dot_f32(const float* a, const float* b, std::size_t n) { return scalar::dot_f32(a, b, n); }
double dot_f64(const double* a, const double* b, std::size_t n) { return scalar::dot_f64(a, b, n); }
void axpy_f32(float alpha, const float* x, float* y, std::size_t n) { scalar::axpy_f32(alpha, x, y, n); }
void axpy_f64(double alpha, const double* x, double* y, std::size_t n) { scalar::axpy_f64(alpha, x, y, n); }
float sum_sq_f32(const float* x, std::size_t n) { return scalar::sum_sq_f32(x, n); }
double sum_sq_f64(const double* x, std::size_t n) { return scalar::sum_sq_f64(x, n); }
}  // namespace avx2
#endif

}  // namespace wrenchval::kernels

#pragma once

#include <cstddef>
#include <string>

// Data-parallel f64 primitives behind the trainer and link-evaluation inner
// loops. Every operation has a scalar reference implementation (kern::ref)
// and, on x86-64, an AVX2 variant (kern::avx2). The top-level functions
// dispatch once at startup: CPUID decides unless the AEROSWARM_KERNELS
// environment variable ("scalar" | "avx2" | "auto") or set_backend() says
// otherwise. AVX2 reductions reassociate sums, so scalar and AVX2 results
// agree to rounding, not bit-for-bit; runs that compare outputs byte-wise
// must use one backend throughout.
namespace aeroswarm::kern {

enum class Backend { scalar, avx2 };

Backend active_backend();
void set_backend(Backend b);           // throws if unsupported on this CPU
bool cpu_has_avx2();
std::string backend_name(Backend b);

// y = W x + b, W row-major [rows x cols]; b may be null (then y = W x)
void matvec(const double* w, const double* x, const double* b, double* y,
            std::size_t rows, std::size_t cols);
// xg += W^T g  (input-gradient accumulation)
void matvec_t_acc(const double* w, const double* g, double* xg,
                  std::size_t rows, std::size_t cols);
// gw += g x^T  (weight-gradient accumulation)
void ger_acc(double* gw, const double* g, const double* x,
             std::size_t rows, std::size_t cols);
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double* x, double alpha, std::size_t n);
double reduce_sum(const double* x, std::size_t n);
double reduce_sumsq(const double* x, std::size_t n);
double reduce_max(const double* x, std::size_t n);
// out[i] = (xs[i]-cx)^2 + (ys[i]-cy)^2
void sq_dist2(const double* xs, const double* ys, double cx, double cy,
              double* out, std::size_t n);
// Adam parameter update with bias corrections bc1 = 1-beta1^t, bc2 = 1-beta2^t
void adam_step(double* p, const double* g, double* m, double* v, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               double bc1, double bc2);

namespace ref {
void matvec(const double* w, const double* x, const double* b, double* y,
            std::size_t rows, std::size_t cols);
void matvec_t_acc(const double* w, const double* g, double* xg,
                  std::size_t rows, std::size_t cols);
void ger_acc(double* gw, const double* g, const double* x,
             std::size_t rows, std::size_t cols);
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double* x, double alpha, std::size_t n);
double reduce_sum(const double* x, std::size_t n);
double reduce_sumsq(const double* x, std::size_t n);
double reduce_max(const double* x, std::size_t n);
void sq_dist2(const double* xs, const double* ys, double cx, double cy,
              double* out, std::size_t n);
void adam_step(double* p, const double* g, double* m, double* v, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               double bc1, double bc2);
}  // namespace ref

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void matvec(const double* w, const double* x, const double* b, double* y,
            std::size_t rows, std::size_t cols);
void matvec_t_acc(const double* w, const double* g, double* xg,
                  std::size_t rows, std::size_t cols);
void ger_acc(double* gw, const double* g, const double* x,
             std::size_t rows, std::size_t cols);
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double* x, double alpha, std::size_t n);
double reduce_sum(const double* x, std::size_t n);
double reduce_sumsq(const double* x, std::size_t n);
double reduce_max(const double* x, std::size_t n);
void sq_dist2(const double* xs, const double* ys, double cx, double cy,
              double* out, std::size_t n);
void adam_step(double* p, const double* g, double* m, double* v, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               double bc1, double bc2);
}  // namespace avx2
#endif

}  // namespace aeroswarm::kern

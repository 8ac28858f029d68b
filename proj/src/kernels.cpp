#include "aeroswarm/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace aeroswarm::kern {

namespace ref {

void matvec(const double* w, const double* x, const double* b, double* y,
            std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = b ? acc + b[r] : acc;
  }
}

void matvec_t_acc(const double* w, const double* g, double* xg,
                  std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) xg[c] += wr[c] * gr;
  }
}

void ger_acc(double* gw, const double* g, const double* x,
             std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = gw + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += gr * x[c];
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double reduce_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double reduce_sumsq(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double reduce_max(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void sq_dist2(const double* xs, const double* ys, double cx, double cy,
              double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    out[i] = dx * dx + dy * dy;
  }
}

void adam_step(double* p, const double* g, double* m, double* v, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               double bc1, double bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace ref

namespace {

std::atomic<Backend> g_backend{Backend::scalar};
std::once_flag g_init_flag;

Backend pick_default() {
  if (const char* e = std::getenv("AEROSWARM_KERNELS")) {
    const std::string v(e);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2") {
      if (!cpu_has_avx2())
        throw std::runtime_error("AEROSWARM_KERNELS=avx2 but CPU lacks AVX2");
      return Backend::avx2;
    }
    if (v != "auto" && !v.empty())
      throw std::runtime_error("AEROSWARM_KERNELS: unknown value '" + v + "'");
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend current() {
  std::call_once(g_init_flag, [] { g_backend.store(pick_default()); });
  return g_backend.load();
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() { return current(); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !cpu_has_avx2())
    throw std::runtime_error("AVX2 backend requested but CPU lacks AVX2");
  current();  // force init so a later getenv cannot override
  g_backend.store(b);
}

std::string backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

#if defined(__x86_64__) || defined(_M_X64)
#define AEROSWARM_DISPATCH(fn, ...)                            \
  do {                                                         \
    if (current() == Backend::avx2) return avx2::fn(__VA_ARGS__); \
    return ref::fn(__VA_ARGS__);                               \
  } while (0)
#else
#define AEROSWARM_DISPATCH(fn, ...) return ref::fn(__VA_ARGS__)
#endif

void matvec(const double* w, const double* x, const double* b, double* y,
            std::size_t rows, std::size_t cols) {
  AEROSWARM_DISPATCH(matvec, w, x, b, y, rows, cols);
}
void matvec_t_acc(const double* w, const double* g, double* xg,
                  std::size_t rows, std::size_t cols) {
  AEROSWARM_DISPATCH(matvec_t_acc, w, g, xg, rows, cols);
}
void ger_acc(double* gw, const double* g, const double* x,
             std::size_t rows, std::size_t cols) {
  AEROSWARM_DISPATCH(ger_acc, gw, g, x, rows, cols);
}
double dot(const double* a, const double* b, std::size_t n) {
  AEROSWARM_DISPATCH(dot, a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  AEROSWARM_DISPATCH(axpy, alpha, x, y, n);
}
void scale(double* x, double alpha, std::size_t n) {
  AEROSWARM_DISPATCH(scale, x, alpha, n);
}
double reduce_sum(const double* x, std::size_t n) {
  AEROSWARM_DISPATCH(reduce_sum, x, n);
}
double reduce_sumsq(const double* x, std::size_t n) {
  AEROSWARM_DISPATCH(reduce_sumsq, x, n);
}
double reduce_max(const double* x, std::size_t n) {
  AEROSWARM_DISPATCH(reduce_max, x, n);
}
void sq_dist2(const double* xs, const double* ys, double cx, double cy,
              double* out, std::size_t n) {
  AEROSWARM_DISPATCH(sq_dist2, xs, ys, cx, cy, out, n);
}
void adam_step(double* p, const double* g, double* m, double* v, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               double bc1, double bc2) {
  AEROSWARM_DISPATCH(adam_step, p, g, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
}

#undef AEROSWARM_DISPATCH

}  // namespace aeroswarm::kern

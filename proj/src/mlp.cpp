#include "aeroswarm/mlp.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "aeroswarm/kernels.hpp"

namespace aeroswarm {

Mlp::Mlp(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("mlp needs >= 2 dims");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    if (dims_[l] <= 0 || dims_[l + 1] <= 0)
      throw std::invalid_argument("mlp dims must be positive");
    w_off_.push_back(total);
    total += static_cast<std::size_t>(dims_[l + 1]) * dims_[l];
    b_off_.push_back(total);
    total += static_cast<std::size_t>(dims_[l + 1]);
  }
  params_.assign(total, 0.0);
}

void Mlp::init(RandomStream& rng) {
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    const double s = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    double* w = params_.data() + w_off_[l];
    const std::size_t nw = static_cast<std::size_t>(dims_[l + 1]) * dims_[l];
    for (std::size_t i = 0; i < nw; ++i) w[i] = rng.uniform(-s, s);
    double* b = params_.data() + b_off_[l];
    for (int i = 0; i < dims_[l + 1]; ++i) b[i] = 0.0;
  }
}

std::vector<double> Mlp::forward(const std::vector<double>& x) const {
  Trace tr;
  return forward_trace(x, tr);
}

std::vector<double> Mlp::forward_trace(const std::vector<double>& x,
                                       Trace& tr) const {
  if (static_cast<int>(x.size()) != dims_.front())
    throw std::invalid_argument("mlp input size mismatch");
  const std::size_t layers = dims_.size() - 1;
  tr.act.assign(layers + 1, {});
  tr.act[0] = x;
  for (std::size_t l = 0; l < layers; ++l) {
    const int rows = dims_[l + 1], cols = dims_[l];
    std::vector<double> y(static_cast<std::size_t>(rows));
    kern::matvec(params_.data() + w_off_[l], tr.act[l].data(),
                 params_.data() + b_off_[l], y.data(),
                 static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    if (l + 1 < layers)
      for (double& v : y) v = std::tanh(v);
    for (double v : y)
      if (!std::isfinite(v)) throw std::runtime_error("mlp forward not finite");
    tr.act[l + 1] = std::move(y);
  }
  return tr.act.back();
}

void Mlp::backward(const Trace& tr, const std::vector<double>& grad_out,
                   double* gflat) const {
  const std::size_t layers = dims_.size() - 1;
  if (tr.act.size() != layers + 1)
    throw std::invalid_argument("mlp backward needs a forward trace");
  if (static_cast<int>(grad_out.size()) != dims_.back())
    throw std::invalid_argument("mlp grad_out size mismatch");
  std::vector<double> delta = grad_out;  // d loss / d pre-activation
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t rows = static_cast<std::size_t>(dims_[l + 1]);
    const std::size_t cols = static_cast<std::size_t>(dims_[l]);
    kern::ger_acc(gflat + w_off_[l], delta.data(), tr.act[l].data(), rows,
                  cols);
    kern::axpy(1.0, delta.data(), gflat + b_off_[l], rows);
    if (l == 0) break;
    std::vector<double> prev(cols, 0.0);
    kern::matvec_t_acc(params_.data() + w_off_[l], delta.data(), prev.data(),
                       rows, cols);
    const std::vector<double>& a = tr.act[l];  // tanh outputs of layer l
    for (std::size_t i = 0; i < cols; ++i) prev[i] *= 1.0 - a[i] * a[i];
    delta = std::move(prev);
  }
}

std::uint64_t Mlp::checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  const unsigned char* bytes =
      reinterpret_cast<const unsigned char*>(params_.data());
  const std::size_t n = params_.size() * sizeof(double);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

void softmax(const std::vector<double>& z, std::vector<double>& p,
             std::vector<double>& logp) {
  const std::size_t n = z.size();
  p.resize(n);
  logp.resize(n);
  const double zmax = kern::reduce_max(z.data(), n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::exp(z[i] - zmax);
    sum += p[i];
  }
  const double logsum = std::log(sum);
  for (std::size_t i = 0; i < n; ++i) {
    logp[i] = z[i] - zmax - logsum;
    p[i] /= sum;
  }
}

double entropy(const std::vector<double>& p, const std::vector<double>& logp) {
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) h -= p[i] * logp[i];
  return h;
}

void AdamState::step(double* p, const double* g, std::size_t n, double lr) {
  if (m.size() != n || v.size() != n)
    throw std::invalid_argument("adam state size mismatch");
  ++t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  kern::adam_step(p, g, m.data(), v.data(), n, lr, beta1, beta2, eps, bc1, bc2);
}

void clip_grad_norm(std::vector<double>& g, double max_norm) {
  const double norm = std::sqrt(kern::reduce_sumsq(g.data(), g.size()));
  if (norm > max_norm && norm > 0.0)
    kern::scale(g.data(), max_norm / norm, g.size());
}

}  // namespace aeroswarm

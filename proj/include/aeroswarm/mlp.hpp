#pragma once
// Dense tanh MLP with identity output, flat parameter storage, and an
// explicit backward pass built on the kern:: primitives.

#include <cstdint>
#include <vector>

#include "aeroswarm/rng.hpp"

namespace aeroswarm {

class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> dims);

  // uniform(-s, s) with s = 1/sqrt(fan_in), layer by layer
  void init(RandomStream& rng);

  struct Trace {
    std::vector<std::vector<double>> act;  // act[0]=input, act[L]=output
  };

  std::vector<double> forward(const std::vector<double>& x) const;
  std::vector<double> forward_trace(const std::vector<double>& x,
                                    Trace& tr) const;

  // dL/d(output) -> accumulate parameter gradients into gflat
  // (param_count doubles, caller-zeroed)
  void backward(const Trace& tr, const std::vector<double>& grad_out,
                double* gflat) const;

  std::size_t param_count() const { return params_.size(); }
  double* data() { return params_.data(); }
  const double* data() const { return params_.data(); }
  const std::vector<int>& dims() const { return dims_; }
  int in_dim() const { return dims_.front(); }
  int out_dim() const { return dims_.back(); }

  std::uint64_t checksum() const;  // FNV over the raw parameter bytes

 private:
  std::vector<int> dims_;
  std::vector<double> params_;          // [W0|b0|W1|b1|...], W row-major
  std::vector<std::size_t> w_off_, b_off_;
};

// numerically stable softmax and its log, plus entropy
void softmax(const std::vector<double>& z, std::vector<double>& p,
             std::vector<double>& logp);
double entropy(const std::vector<double>& p, const std::vector<double>& logp);

struct AdamState {
  std::vector<double> m, v;
  long long t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  void init(std::size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    t = 0;
  }
  void step(double* p, const double* g, std::size_t n, double lr);
};

// scales g in place so its global l2 norm is at most max_norm
void clip_grad_norm(std::vector<double>& g, double max_norm);

}  // namespace aeroswarm

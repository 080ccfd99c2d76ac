#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace rq::nn {

enum class Activation { Tanh, Linear };

// Dense row-major matrix of doubles, also used as a batch of row vectors.
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }
  void fill(double v) { a.assign(a.size(), v); }
};

// Feed-forward network parameters. weights[l] has shape
// (layer_dims[l+1] x layer_dims[l]); hidden layers share one activation and
// the output layer has its own (tanh for policies, linear for critics).
struct Mlp {
  std::vector<int> layer_dims;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  Activation hidden_activation = Activation::Tanh;
  Activation output_activation = Activation::Tanh;

  int input_dim() const { return layer_dims.empty() ? 0 : layer_dims.front(); }
  int output_dim() const { return layer_dims.empty() ? 0 : layer_dims.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::size_t parameter_count() const;
  bool finite() const;
};

// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer; the final
// layer (weights and biases) is additionally scaled by final_layer_scale so
// policies can start near their neutral output.
Mlp mlp_init(const std::vector<int>& layer_dims, Activation hidden,
             Activation output, Rng& rng, double final_layer_scale = 1.0);

struct ForwardCache {
  // acts[0] is the input, acts[l+1] the activated output of layer l.
  std::vector<std::vector<double>> acts;
};

// Returns the network output; fills cache when given (needed for backward).
std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input,
                                ForwardCache* cache = nullptr);

struct MlpGrads {
  std::vector<Matrix> dweights;
  std::vector<std::vector<double>> dbiases;

  static MlpGrads zeros_like(const Mlp& net);
  void scale(double s);
  bool finite() const;
};

// Reverse-mode gradients of the forward map. Accumulates parameter
// gradients into grads (when non-null) and returns the gradient with
// respect to the input, which lets callers chain networks.
std::vector<double> mlp_backward(const Mlp& net, const ForwardCache& cache,
                                 std::span<const double> output_grad,
                                 MlpGrads* grads);

struct BatchCache {
  std::vector<Matrix> acts;  // acts[0] = inputs (B x in), acts[l+1] = layer outputs
};

// Batched forward over the rows of inputs.
Matrix mlp_forward_batch(const Mlp& net, const Matrix& inputs,
                         BatchCache* cache = nullptr);

// Batched backward; returns d(loss)/d(inputs). Parameter gradients are
// accumulated into grads when non-null (pass null when only the input
// gradient is needed, e.g. differentiating a critic with respect to the
// action).
Matrix mlp_backward_batch(const Mlp& net, const BatchCache& cache,
                          const Matrix& output_grad, MlpGrads* grads);

struct AdamState {
  std::vector<Matrix> m_w, v_w;
  std::vector<std::vector<double>> m_b, v_b;
  long step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState zeros_like(const Mlp& net, double beta1 = 0.9,
                              double beta2 = 0.999, double eps = 1e-8);
};

// One Adam update with bias correction. Throws DivergenceError on
// non-finite gradients.
void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double lr);

// target <- tau * source + (1 - tau) * target, elementwise.
void soft_update(Mlp& target, const Mlp& source, double tau);

}  // namespace rq::nn

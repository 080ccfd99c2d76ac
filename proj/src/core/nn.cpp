#include "core/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"

namespace rq::nn {

namespace {

// Dot product with four independent accumulators. The fixed association
// order keeps results reproducible while letting the CPU pipeline the adds.
inline double dot(const double* x, const double* w, int n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  int k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += x[k] * w[k];
    s1 += x[k + 1] * w[k + 1];
    s2 += x[k + 2] * w[k + 2];
    s3 += x[k + 3] * w[k + 3];
  }
  double tail = 0.0;
  for (; k < n; ++k) tail += x[k] * w[k];
  return ((s0 + s1) + (s2 + s3)) + tail;
}

inline void axpy(double alpha, const double* x, double* y, int n) {
  for (int k = 0; k < n; ++k) y[k] += alpha * x[k];
}

inline double activate(double x, Activation act) {
  return act == Activation::Tanh ? std::tanh(x) : x;
}

// Derivative expressed through the activated value: tanh' = 1 - y^2.
inline double activate_grad_from_output(double y, Activation act) {
  return act == Activation::Tanh ? 1.0 - y * y : 1.0;
}

void check_dims(const Mlp& net, int input_len, const char* what) {
  if (net.layer_dims.size() < 2)
    throw ConfigError(std::string(what) + ": network has no layers");
  if (input_len != net.input_dim())
    throw ConfigError(std::string(what) + ": input length " +
                      std::to_string(input_len) + " does not match layer_dims[0]=" +
                      std::to_string(net.input_dim()));
}

}  // namespace

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < layer_count(); ++l)
    n += weights[l].a.size() + biases[l].size();
  return n;
}

bool Mlp::finite() const {
  for (int l = 0; l < layer_count(); ++l) {
    for (double w : weights[l].a)
      if (!std::isfinite(w)) return false;
    for (double b : biases[l])
      if (!std::isfinite(b)) return false;
  }
  return true;
}

Mlp mlp_init(const std::vector<int>& layer_dims, Activation hidden,
             Activation output, Rng& rng, double final_layer_scale) {
  if (layer_dims.size() < 2)
    throw ConfigError("mlp_init: need at least input and output dims");
  for (int d : layer_dims)
    if (d <= 0) throw ConfigError("mlp_init: non-positive layer width");
  Mlp net;
  net.layer_dims = layer_dims;
  net.hidden_activation = hidden;
  net.output_activation = output;
  const int layers = static_cast<int>(layer_dims.size()) - 1;
  net.weights.reserve(layers);
  net.biases.reserve(layers);
  for (int l = 0; l < layers; ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    const double scale = (l == layers - 1) ? final_layer_scale : 1.0;
    Matrix w(fan_out, fan_in);
    for (double& v : w.a) v = scale * rng.uniform(-bound, bound);
    std::vector<double> b(static_cast<size_t>(fan_out));
    for (double& v : b) v = scale * rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input,
                                ForwardCache* cache) {
  check_dims(net, static_cast<int>(input.size()), "mlp_forward");
  if (cache) {
    cache->acts.assign(1, std::vector<double>(input.begin(), input.end()));
    cache->acts.reserve(net.layer_count() + 1);
  }
  std::vector<double> cur(input.begin(), input.end());
  for (int l = 0; l < net.layer_count(); ++l) {
    const Matrix& w = net.weights[l];
    const Activation act =
        (l == net.layer_count() - 1) ? net.output_activation : net.hidden_activation;
    std::vector<double> next(static_cast<size_t>(w.rows));
    for (int o = 0; o < w.rows; ++o)
      next[o] = activate(net.biases[l][o] + dot(cur.data(), w.row(o), w.cols), act);
    cur = std::move(next);
    if (cache) cache->acts.push_back(cur);
  }
  return cur;
}

MlpGrads MlpGrads::zeros_like(const Mlp& net) {
  MlpGrads g;
  g.dweights.reserve(net.layer_count());
  g.dbiases.reserve(net.layer_count());
  for (int l = 0; l < net.layer_count(); ++l) {
    g.dweights.emplace_back(net.weights[l].rows, net.weights[l].cols);
    g.dbiases.emplace_back(net.biases[l].size(), 0.0);
  }
  return g;
}

void MlpGrads::scale(double s) {
  for (auto& w : dweights)
    for (double& v : w.a) v *= s;
  for (auto& b : dbiases)
    for (double& v : b) v *= s;
}

bool MlpGrads::finite() const {
  for (const auto& w : dweights)
    for (double v : w.a)
      if (!std::isfinite(v)) return false;
  for (const auto& b : dbiases)
    for (double v : b)
      if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> mlp_backward(const Mlp& net, const ForwardCache& cache,
                                 std::span<const double> output_grad,
                                 MlpGrads* grads) {
  if (cache.acts.size() != static_cast<size_t>(net.layer_count()) + 1)
    throw ConfigError("mlp_backward: cache does not match network depth");
  if (static_cast<int>(output_grad.size()) != net.output_dim())
    throw ConfigError("mlp_backward: output_grad length mismatch");
  if (grads && static_cast<int>(grads->dweights.size()) != net.layer_count())
    throw ConfigError("mlp_backward: grads shape mismatch");

  std::vector<double> delta(output_grad.begin(), output_grad.end());
  for (int l = net.layer_count() - 1; l >= 0; --l) {
    const Matrix& w = net.weights[l];
    const Activation act =
        (l == net.layer_count() - 1) ? net.output_activation : net.hidden_activation;
    const std::vector<double>& out = cache.acts[l + 1];
    const std::vector<double>& in = cache.acts[l];
    if (static_cast<int>(in.size()) != w.cols ||
        static_cast<int>(out.size()) != w.rows)
      throw ConfigError("mlp_backward: cache layer size mismatch");
    // through the activation
    for (int o = 0; o < w.rows; ++o)
      delta[o] *= activate_grad_from_output(out[o], act);
    if (grads) {
      Matrix& dw = grads->dweights[l];
      for (int o = 0; o < w.rows; ++o) {
        axpy(delta[o], in.data(), dw.row(o), w.cols);
        grads->dbiases[l][o] += delta[o];
      }
    }
    if (l == 0) {
      std::vector<double> dinput(static_cast<size_t>(w.cols), 0.0);
      for (int o = 0; o < w.rows; ++o) axpy(delta[o], w.row(o), dinput.data(), w.cols);
      return dinput;
    }
    std::vector<double> prev(static_cast<size_t>(w.cols), 0.0);
    for (int o = 0; o < w.rows; ++o) axpy(delta[o], w.row(o), prev.data(), w.cols);
    delta = std::move(prev);
  }
  return {};  // unreachable
}

Matrix mlp_forward_batch(const Mlp& net, const Matrix& inputs, BatchCache* cache) {
  check_dims(net, inputs.cols, "mlp_forward_batch");
  if (cache) {
    cache->acts.clear();
    cache->acts.reserve(net.layer_count() + 1);
    cache->acts.push_back(inputs);
  }
  Matrix cur = inputs;
  for (int l = 0; l < net.layer_count(); ++l) {
    const Matrix& w = net.weights[l];
    const Activation act =
        (l == net.layer_count() - 1) ? net.output_activation : net.hidden_activation;
    Matrix next(cur.rows, w.rows);
    for (int b = 0; b < cur.rows; ++b) {
      const double* xr = cur.row(b);
      double* yr = next.row(b);
      for (int o = 0; o < w.rows; ++o)
        yr[o] = activate(net.biases[l][o] + dot(xr, w.row(o), w.cols), act);
    }
    cur = std::move(next);
    if (cache) cache->acts.push_back(cur);
  }
  return cur;
}

Matrix mlp_backward_batch(const Mlp& net, const BatchCache& cache,
                          const Matrix& output_grad, MlpGrads* grads) {
  if (cache.acts.size() != static_cast<size_t>(net.layer_count()) + 1)
    throw ConfigError("mlp_backward_batch: cache does not match network depth");
  if (output_grad.cols != net.output_dim() ||
      output_grad.rows != cache.acts[0].rows)
    throw ConfigError("mlp_backward_batch: output_grad shape mismatch");

  Matrix delta = output_grad;
  for (int l = net.layer_count() - 1; l >= 0; --l) {
    const Matrix& w = net.weights[l];
    const Activation act =
        (l == net.layer_count() - 1) ? net.output_activation : net.hidden_activation;
    const Matrix& out = cache.acts[l + 1];
    const Matrix& in = cache.acts[l];
    for (int b = 0; b < delta.rows; ++b) {
      double* dr = delta.row(b);
      const double* yr = out.row(b);
      for (int o = 0; o < w.rows; ++o)
        dr[o] *= activate_grad_from_output(yr[o], act);
    }
    if (grads) {
      Matrix& dw = grads->dweights[l];
      std::vector<double>& db = grads->dbiases[l];
      for (int b = 0; b < delta.rows; ++b) {
        const double* dr = delta.row(b);
        const double* xr = in.row(b);
        for (int o = 0; o < w.rows; ++o) {
          if (dr[o] != 0.0) axpy(dr[o], xr, dw.row(o), w.cols);
          db[o] += dr[o];
        }
      }
    }
    Matrix prev(delta.rows, w.cols);
    for (int b = 0; b < delta.rows; ++b) {
      const double* dr = delta.row(b);
      double* pr = prev.row(b);
      for (int o = 0; o < w.rows; ++o)
        if (dr[o] != 0.0) axpy(dr[o], w.row(o), pr, w.cols);
    }
    delta = std::move(prev);
  }
  return delta;
}

AdamState AdamState::zeros_like(const Mlp& net, double beta1, double beta2,
                                double eps) {
  AdamState s;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  for (int l = 0; l < net.layer_count(); ++l) {
    s.m_w.emplace_back(net.weights[l].rows, net.weights[l].cols);
    s.v_w.emplace_back(net.weights[l].rows, net.weights[l].cols);
    s.m_b.emplace_back(net.biases[l].size(), 0.0);
    s.v_b.emplace_back(net.biases[l].size(), 0.0);
  }
  return s;
}

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double lr) {
  if (static_cast<int>(grads.dweights.size()) != net.layer_count())
    throw ConfigError("adam_step: grads shape mismatch");
  if (!grads.finite())
    throw DivergenceError("adam_step: non-finite gradient");
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (int l = 0; l < net.layer_count(); ++l) {
    const size_t nw = net.weights[l].a.size();
    for (size_t i = 0; i < nw; ++i) {
      const double g = grads.dweights[l].a[i];
      double& m = state.m_w[l].a[i];
      double& v = state.v_w[l].a[i];
      m = state.beta1 * m + (1.0 - state.beta1) * g;
      v = state.beta2 * v + (1.0 - state.beta2) * g * g;
      net.weights[l].a[i] -= lr * (m / bc1) / (std::sqrt(v / bc2) + state.eps);
    }
    const size_t nb = net.biases[l].size();
    for (size_t i = 0; i < nb; ++i) {
      const double g = grads.dbiases[l][i];
      double& m = state.m_b[l][i];
      double& v = state.v_b[l][i];
      m = state.beta1 * m + (1.0 - state.beta1) * g;
      v = state.beta2 * v + (1.0 - state.beta2) * g * g;
      net.biases[l][i] -= lr * (m / bc1) / (std::sqrt(v / bc2) + state.eps);
    }
  }
}

void soft_update(Mlp& target, const Mlp& source, double tau) {
  if (target.layer_dims != source.layer_dims)
    throw ConfigError("soft_update: mismatched layer_dims");
  for (int l = 0; l < target.layer_count(); ++l) {
    const size_t nw = target.weights[l].a.size();
    for (size_t i = 0; i < nw; ++i)
      target.weights[l].a[i] =
          tau * source.weights[l].a[i] + (1.0 - tau) * target.weights[l].a[i];
    const size_t nb = target.biases[l].size();
    for (size_t i = 0; i < nb; ++i)
      target.biases[l][i] =
          tau * source.biases[l][i] + (1.0 - tau) * target.biases[l][i];
  }
}

}  // namespace rq::nn

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "oran/rng.hpp"

namespace oran {

// Row-major dense matrix. Batches are rows.
struct Tensor2 {
  int rows = 0, cols = 0;
  std::vector<double> data;

  Tensor2() = default;
  Tensor2(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return data.size(); }

  static Tensor2 zeros_like(const Tensor2& t) { return Tensor2(t.rows, t.cols); }
};

// Throws NumericError if any entry is NaN/Inf.
void check_finite(const Tensor2& t, const char* what);

enum class Activation { Linear, Relu, Sigmoid };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct DenseLayer {
  Tensor2 w;               // out x in
  std::vector<double> b;   // out
  Activation act = Activation::Linear;
};

struct DenseNet {
  std::vector<DenseLayer> layers;

  int input_dim() const { return layers.empty() ? 0 : layers.front().w.cols; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().w.rows; }

  // dims = {in, h1, ..., out}; acts has dims.size()-1 entries.
  // Weights init uniform in +-sqrt(6/(fan_in+fan_out)), biases zero.
  static DenseNet make(const std::vector<int>& dims,
                       const std::vector<Activation>& acts, Rng& rng);
};

struct ForwardCache {
  std::vector<Tensor2> inputs;   // input seen by each layer
  std::vector<Tensor2> pre;      // preactivations
  std::vector<Tensor2> mask;     // inverted dropout masks; empty tensor = none
  Tensor2 y;
  bool train_mode = false;
  double dropout_rate = 0.0;
};

// Affine + activation per layer; inverted dropout on every hidden activation
// in train mode (eval needs no rescale). rng may be null when no dropout is
// drawn. cache may be null for pure inference.
Tensor2 forward(const DenseNet& net, const Tensor2& x, bool train_mode,
                double dropout_rate, Rng* rng, ForwardCache* cache);

// Re-runs forward reusing the dropout masks of `donor` (finite-difference
// test hook for train-mode gradients).
Tensor2 forward_with_masks(const DenseNet& net, const Tensor2& x,
                           const ForwardCache& donor, ForwardCache* cache);

struct NetGrads {
  std::vector<Tensor2> dw;
  std::vector<std::vector<double>> db;
  Tensor2 dx;

  void add_scaled(const NetGrads& other, double scale);
  static NetGrads zeros_like(const DenseNet& net);
};

// Exact reverse-mode gradients for all weights/biases and the input.
NetGrads backward(const DenseNet& net, const ForwardCache& cache, const Tensor2& dLdy);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.99;   // table value; the conventional 0.9 is a config away
  double beta2 = 0.99;
  double weight_decay = 0.0;  // decoupled multiplier; table's 0.9 opt-in
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig hyper;
  long long step = 0;
  std::vector<Tensor2> m_w, v_w;
  std::vector<std::vector<double>> m_b, v_b;

  static AdamState init(const DenseNet& net, const AdamConfig& cfg);
};

// Bias-corrected Adam with decoupled weight decay. Throws NumericError on
// non-finite gradients.
void adam_step(AdamState& st, DenseNet& net, const NetGrads& grads);

// --- losses ---

// Mean over all entries.
double mse(const Tensor2& pred, const Tensor2& target);
Tensor2 mse_grad(const Tensor2& pred, const Tensor2& target);

// -1/2 sum(1 + logvar - mu^2 - exp(logvar)), summed over dims, averaged over
// the batch.
double kl_gaussian(const Tensor2& mu, const Tensor2& logvar);
void kl_gaussian_grad(const Tensor2& mu, const Tensor2& logvar, Tensor2& dmu,
                      Tensor2& dlogvar);

// z = mu + exp(0.5*logvar) .* eps with eps ~ N(0, I). eps_out feeds backward:
// dz/dmu = 1, dz/dlogvar = 0.5*exp(0.5*logvar)*eps.
Tensor2 reparameterize(const Tensor2& mu, const Tensor2& logvar, Rng& rng,
                       Tensor2* eps_out = nullptr);

// --- checkpoint io ---
// Versioned text header (dims, activation tags, step counter) followed by
// raw little-endian 64-bit floats in declaration order (per layer: W then b).
void write_net(std::ostream& out, const DenseNet& net, long long adam_step);
DenseNet read_net(std::istream& in, long long* adam_step);

}  // namespace oran

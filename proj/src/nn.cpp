#include "oran/nn.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "oran/errors.hpp"

namespace oran {

void check_finite(const Tensor2& t, const char* what) {
  for (double v : t.data)
    if (!std::isfinite(v))
      throw NumericError(std::string("non-finite value in ") + what);
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Linear: return "linear";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "linear";
}

Activation activation_from_name(const std::string& name) {
  if (name == "linear") return Activation::Linear;
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw CheckpointError("unknown activation tag: " + name);
}

DenseNet DenseNet::make(const std::vector<int>& dims,
                        const std::vector<Activation>& acts, Rng& rng) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1)
    throw ConfigError("DenseNet::make: dims/acts mismatch");
  DenseNet net;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    layer.w = Tensor2(dims[l + 1], dims[l]);
    layer.b.assign(dims[l + 1], 0.0);
    layer.act = acts[l];
    double bound = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
    for (double& v : layer.w.data) v = rng.uniform(-bound, bound);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

namespace {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::Linear: return z;
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

double activate_deriv(Activation a, double z) {
  switch (a) {
    case Activation::Linear: return 1.0;
    case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: {
      double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

// y = x * W^T + b
Tensor2 affine(const Tensor2& x, const DenseLayer& layer) {
  Tensor2 y(x.rows, layer.w.rows);
  for (int r = 0; r < x.rows; ++r)
    for (int o = 0; o < layer.w.rows; ++o) {
      double acc = layer.b[o];
      const double* xr = &x.data[static_cast<size_t>(r) * x.cols];
      const double* wr = &layer.w.data[static_cast<size_t>(o) * layer.w.cols];
      for (int c = 0; c < x.cols; ++c) acc += xr[c] * wr[c];
      y.at(r, o) = acc;
    }
  return y;
}

Tensor2 forward_impl(const DenseNet& net, const Tensor2& x, bool train_mode,
                     double dropout_rate, Rng* rng, const ForwardCache* donor,
                     ForwardCache* cache) {
  if (net.layers.empty()) throw ConfigError("forward: empty net");
  if (x.cols != net.input_dim()) throw ConfigError("forward: input dim mismatch");
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
    cache->mask.clear();
    cache->train_mode = train_mode;
    cache->dropout_rate = dropout_rate;
  }
  Tensor2 cur = x;
  const size_t L = net.layers.size();
  for (size_t l = 0; l < L; ++l) {
    if (cache) cache->inputs.push_back(cur);
    Tensor2 pre = affine(cur, net.layers[l]);
    Tensor2 post(pre.rows, pre.cols);
    for (size_t i = 0; i < pre.data.size(); ++i)
      post.data[i] = activate(net.layers[l].act, pre.data[i]);

    Tensor2 mask;
    const bool hidden = (l + 1 < L);
    if (hidden && dropout_rate > 0.0 && (train_mode || donor)) {
      if (donor) {
        mask = donor->mask[l];
      } else {
        mask = Tensor2(post.rows, post.cols);
        double keep = 1.0 - dropout_rate;
        for (double& v : mask.data)
          v = (rng->uniform() < keep) ? 1.0 / keep : 0.0;
      }
      for (size_t i = 0; i < post.data.size(); ++i) post.data[i] *= mask.data[i];
    }
    if (cache) {
      cache->pre.push_back(std::move(pre));
      cache->mask.push_back(std::move(mask));
    }
    cur = std::move(post);
  }
  check_finite(cur, "forward output");
  if (cache) cache->y = cur;
  return cur;
}

}  // namespace

Tensor2 forward(const DenseNet& net, const Tensor2& x, bool train_mode,
                double dropout_rate, Rng* rng, ForwardCache* cache) {
  if (train_mode && dropout_rate > 0.0 && rng == nullptr)
    throw ConfigError("forward: dropout in train mode needs an rng");
  return forward_impl(net, x, train_mode, dropout_rate, rng, nullptr, cache);
}

Tensor2 forward_with_masks(const DenseNet& net, const Tensor2& x,
                           const ForwardCache& donor, ForwardCache* cache) {
  return forward_impl(net, x, donor.train_mode, donor.dropout_rate, nullptr,
                      &donor, cache);
}

NetGrads NetGrads::zeros_like(const DenseNet& net) {
  NetGrads g;
  for (const auto& layer : net.layers) {
    g.dw.push_back(Tensor2(layer.w.rows, layer.w.cols));
    g.db.emplace_back(layer.b.size(), 0.0);
  }
  return g;
}

void NetGrads::add_scaled(const NetGrads& other, double scale) {
  for (size_t l = 0; l < dw.size(); ++l) {
    for (size_t i = 0; i < dw[l].data.size(); ++i)
      dw[l].data[i] += scale * other.dw[l].data[i];
    for (size_t i = 0; i < db[l].size(); ++i) db[l][i] += scale * other.db[l][i];
  }
}

NetGrads backward(const DenseNet& net, const ForwardCache& cache,
                  const Tensor2& dLdy) {
  const size_t L = net.layers.size();
  if (cache.inputs.size() != L)
    throw ConfigError("backward: cache does not match net");
  if (dLdy.rows != cache.y.rows || dLdy.cols != cache.y.cols)
    throw ConfigError("backward: dLdy shape mismatch");

  NetGrads g = NetGrads::zeros_like(net);
  Tensor2 dpost = dLdy;
  for (size_t li = L; li-- > 0;) {
    const DenseLayer& layer = net.layers[li];
    const Tensor2& pre = cache.pre[li];
    const Tensor2& input = cache.inputs[li];

    // Dropout sits after the activation.
    if (cache.mask[li].rows > 0)
      for (size_t i = 0; i < dpost.data.size(); ++i)
        dpost.data[i] *= cache.mask[li].data[i];

    Tensor2 dz(pre.rows, pre.cols);
    for (size_t i = 0; i < pre.data.size(); ++i)
      dz.data[i] = dpost.data[i] * activate_deriv(layer.act, pre.data[i]);

    // dW = dz^T * input, db = column sums of dz.
    for (int o = 0; o < layer.w.rows; ++o)
      for (int r = 0; r < dz.rows; ++r) {
        double d = dz.at(r, o);
        if (d == 0.0) continue;
        g.db[li][o] += d;
        double* wout = &g.dw[li].data[static_cast<size_t>(o) * layer.w.cols];
        const double* xr = &input.data[static_cast<size_t>(r) * input.cols];
        for (int c = 0; c < layer.w.cols; ++c) wout[c] += d * xr[c];
      }

    // dinput = dz * W
    Tensor2 dinput(input.rows, input.cols);
    for (int r = 0; r < dz.rows; ++r)
      for (int o = 0; o < layer.w.rows; ++o) {
        double d = dz.at(r, o);
        if (d == 0.0) continue;
        const double* wr = &layer.w.data[static_cast<size_t>(o) * layer.w.cols];
        double* dxr = &dinput.data[static_cast<size_t>(r) * input.cols];
        for (int c = 0; c < input.cols; ++c) dxr[c] += d * wr[c];
      }
    dpost = std::move(dinput);
  }
  g.dx = std::move(dpost);
  return g;
}

AdamState AdamState::init(const DenseNet& net, const AdamConfig& cfg) {
  AdamState st;
  st.hyper = cfg;
  for (const auto& layer : net.layers) {
    st.m_w.push_back(Tensor2(layer.w.rows, layer.w.cols));
    st.v_w.push_back(Tensor2(layer.w.rows, layer.w.cols));
    st.m_b.emplace_back(layer.b.size(), 0.0);
    st.v_b.emplace_back(layer.b.size(), 0.0);
  }
  return st;
}

namespace {

void adam_update(double& param, double g, double& m, double& v,
                 const AdamConfig& c, double bc1, double bc2) {
  if (!std::isfinite(g)) throw NumericError("non-finite gradient in adam_step");
  m = c.beta1 * m + (1.0 - c.beta1) * g;
  v = c.beta2 * v + (1.0 - c.beta2) * g * g;
  double mhat = m / bc1;
  double vhat = v / bc2;
  double p_old = param;
  param -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
  if (c.weight_decay != 0.0) param -= c.lr * c.weight_decay * p_old;
}

}  // namespace

void adam_step(AdamState& st, DenseNet& net, const NetGrads& grads) {
  if (st.m_w.size() != net.layers.size())
    throw ConfigError("adam_step: state does not match net");
  st.step += 1;
  double bc1 = 1.0 - std::pow(st.hyper.beta1, static_cast<double>(st.step));
  double bc2 = 1.0 - std::pow(st.hyper.beta2, static_cast<double>(st.step));
  for (size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    for (size_t i = 0; i < layer.w.data.size(); ++i)
      adam_update(layer.w.data[i], grads.dw[l].data[i], st.m_w[l].data[i],
                  st.v_w[l].data[i], st.hyper, bc1, bc2);
    for (size_t i = 0; i < layer.b.size(); ++i)
      adam_update(layer.b[i], grads.db[l][i], st.m_b[l][i], st.v_b[l][i], st.hyper,
                  bc1, bc2);
  }
}

double mse(const Tensor2& pred, const Tensor2& target) {
  if (pred.rows != target.rows || pred.cols != target.cols)
    throw ConfigError("mse: shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < pred.data.size(); ++i) {
    double d = pred.data[i] - target.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.data.size());
}

Tensor2 mse_grad(const Tensor2& pred, const Tensor2& target) {
  if (pred.rows != target.rows || pred.cols != target.cols)
    throw ConfigError("mse_grad: shape mismatch");
  Tensor2 g(pred.rows, pred.cols);
  double scale = 2.0 / static_cast<double>(pred.data.size());
  for (size_t i = 0; i < pred.data.size(); ++i)
    g.data[i] = scale * (pred.data[i] - target.data[i]);
  return g;
}

double kl_gaussian(const Tensor2& mu, const Tensor2& logvar) {
  if (mu.rows != logvar.rows || mu.cols != logvar.cols)
    throw ConfigError("kl_gaussian: shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < mu.data.size(); ++i)
    acc += 1.0 + logvar.data[i] - mu.data[i] * mu.data[i] - std::exp(logvar.data[i]);
  return -0.5 * acc / static_cast<double>(mu.rows);
}

void kl_gaussian_grad(const Tensor2& mu, const Tensor2& logvar, Tensor2& dmu,
                      Tensor2& dlogvar) {
  dmu = Tensor2(mu.rows, mu.cols);
  dlogvar = Tensor2(mu.rows, mu.cols);
  double inv_n = 1.0 / static_cast<double>(mu.rows);
  for (size_t i = 0; i < mu.data.size(); ++i) {
    dmu.data[i] = mu.data[i] * inv_n;
    dlogvar.data[i] = -0.5 * (1.0 - std::exp(logvar.data[i])) * inv_n;
  }
}

Tensor2 reparameterize(const Tensor2& mu, const Tensor2& logvar, Rng& rng,
                       Tensor2* eps_out) {
  if (mu.rows != logvar.rows || mu.cols != logvar.cols)
    throw ConfigError("reparameterize: shape mismatch");
  Tensor2 z(mu.rows, mu.cols);
  if (eps_out) *eps_out = Tensor2(mu.rows, mu.cols);
  for (size_t i = 0; i < mu.data.size(); ++i) {
    double eps = rng.normal();
    if (eps_out) eps_out->data[i] = eps;
    z.data[i] = mu.data[i] + std::exp(0.5 * logvar.data[i]) * eps;
  }
  return z;
}

void write_net(std::ostream& out, const DenseNet& net, long long adam_step) {
  out << "oran-net 1\n";
  out << "layers " << net.layers.size() << "\n";
  for (const auto& layer : net.layers)
    out << "layer " << layer.w.cols << " " << layer.w.rows << " "
        << activation_name(layer.act) << "\n";
  out << "adam_step " << adam_step << "\n";
  out << "data\n";
  for (const auto& layer : net.layers) {
    out.write(reinterpret_cast<const char*>(layer.w.data.data()),
              static_cast<std::streamsize>(layer.w.data.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(layer.b.data()),
              static_cast<std::streamsize>(layer.b.size() * sizeof(double)));
  }
  if (!out) throw IoError("failed writing net checkpoint");
}

DenseNet read_net(std::istream& in, long long* adam_step) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "oran-net" || version != 1)
    throw CheckpointError("bad net checkpoint header");
  std::string tok;
  size_t n_layers = 0;
  in >> tok >> n_layers;
  if (tok != "layers") throw CheckpointError("bad net checkpoint: expected layers");
  DenseNet net;
  for (size_t l = 0; l < n_layers; ++l) {
    int in_dim = 0, out_dim = 0;
    std::string act;
    in >> tok >> in_dim >> out_dim >> act;
    if (tok != "layer" || in_dim <= 0 || out_dim <= 0)
      throw CheckpointError("bad net checkpoint: layer line");
    DenseLayer layer;
    layer.w = Tensor2(out_dim, in_dim);
    layer.b.assign(out_dim, 0.0);
    layer.act = activation_from_name(act);
    net.layers.push_back(std::move(layer));
  }
  long long step = 0;
  in >> tok >> step;
  if (tok != "adam_step") throw CheckpointError("bad net checkpoint: adam_step");
  if (adam_step) *adam_step = step;
  in >> tok;
  if (tok != "data") throw CheckpointError("bad net checkpoint: data marker");
  in.get();  // consume newline before the binary block
  for (auto& layer : net.layers) {
    in.read(reinterpret_cast<char*>(layer.w.data.data()),
            static_cast<std::streamsize>(layer.w.data.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(layer.b.data()),
            static_cast<std::streamsize>(layer.b.size() * sizeof(double)));
  }
  if (!in) throw CheckpointError("truncated net checkpoint");
  return net;
}

}  // namespace oran

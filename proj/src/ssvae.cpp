#include "oran/ssvae.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "oran/errors.hpp"
#include "oran/metrics.hpp"

namespace oran {

void FeatureScaler::fit(const std::vector<const std::vector<double>*>& rows) {
  if (rows.empty()) throw ConfigError("FeatureScaler::fit: no rows");
  size_t dim = rows[0]->size();
  mean.assign(dim, 0.0);
  stddev.assign(dim, 0.0);
  for (const auto* r : rows)
    for (size_t i = 0; i < dim; ++i) mean[i] += (*r)[i];
  for (size_t i = 0; i < dim; ++i) mean[i] /= static_cast<double>(rows.size());
  for (const auto* r : rows)
    for (size_t i = 0; i < dim; ++i) {
      double d = (*r)[i] - mean[i];
      stddev[i] += d * d;
    }
  for (size_t i = 0; i < dim; ++i) {
    stddev[i] = std::sqrt(stddev[i] / static_cast<double>(rows.size()));
    if (stddev[i] < 1e-8) stddev[i] = 1e-8;
  }
}

void FeatureScaler::apply(std::vector<double>& row) const {
  for (size_t i = 0; i < row.size(); ++i) row[i] = (row[i] - mean[i]) / stddev[i];
}

void SsvaeHyper::apply_override(const std::string& key, const std::string& value) {
  auto as_int = [&]() { return std::stoi(value); };
  auto as_double = [&]() { return std::stod(value); };
  if (key == "epochs_total") epochs_total = as_int();
  else if (key == "stage_a_epochs") stage_a_epochs = as_int();
  else if (key == "batch_size") batch_size = as_int();
  else if (key == "lr") lr = as_double();
  else if (key == "beta1") adam_beta1 = as_double();
  else if (key == "beta2") adam_beta2 = as_double();
  else if (key == "weight_decay") weight_decay = as_double();
  else if (key == "dropout") dropout = as_double();
  else if (key == "latent_dim") latent_dim = as_int();
  else if (key == "tau") tau = as_double();
  else if (key == "lambda_rec") lambda_rec = as_double();
  else if (key == "lambda_kl") lambda_kl = as_double();
  else if (key == "lambda_sup") lambda_sup = as_double();
  else if (key == "lambda_con") lambda_con = as_double();
  else if (key == "stage_b_sup_factor") stage_b_sup_factor = as_double();
  else if (key == "pair_corr") pair_corr = as_double();
  else if (key == "val_split") val_split = as_double();
  else if (key == "literal_twenty_layers") literal_twenty_layers = as_int() != 0;
  else if (key == "ub_mean_input") ub_mean_input = as_int() != 0;
  else if (key == "labeled_limit") labeled_limit = as_int();
  else if (key == "seed") seed = std::stoull(value);
  else throw ConfigError("unknown hyper key '" + key + "'");
}

SsvaeModel make_ssvae_model(int input_dim, int output_dim, const SsvaeHyper& hyper,
                            Rng& rng) {
  SsvaeModel m;
  m.latent_dim = hyper.latent_dim;
  m.input_dim = input_dim;
  m.output_dim = output_dim;
  m.tau = hyper.tau;
  m.lambda_rec = hyper.lambda_rec;
  m.lambda_kl = hyper.lambda_kl;
  m.lambda_sup = hyper.lambda_sup;
  m.lambda_con = hyper.lambda_con;
  m.ub_mean_input = hyper.ub_mean_input;

  std::vector<int> enc_hidden = hyper.encoder_hidden;
  std::vector<int> dec_hidden = hyper.decoder_hidden;
  if (hyper.literal_twenty_layers) {
    enc_hidden.assign(20, 64);
    dec_hidden.assign(20, 64);
  }

  std::vector<int> enc_dims{input_dim};
  for (int w : enc_hidden) enc_dims.push_back(w);
  enc_dims.push_back(2 * hyper.latent_dim);
  std::vector<Activation> enc_acts(enc_dims.size() - 1, Activation::Relu);
  enc_acts.back() = Activation::Linear;
  m.encoder = DenseNet::make(enc_dims, enc_acts, rng);

  std::vector<int> dec_dims{hyper.latent_dim};
  for (int w : dec_hidden) dec_dims.push_back(w);
  dec_dims.push_back(input_dim);
  std::vector<Activation> dec_acts(dec_dims.size() - 1, Activation::Relu);
  dec_acts.back() = Activation::Linear;
  m.decoder = DenseNet::make(dec_dims, dec_acts, rng);

  std::vector<int> head_dims{hyper.latent_dim};
  for (int w : hyper.head_hidden) head_dims.push_back(w);
  head_dims.push_back(output_dim);
  std::vector<Activation> head_acts(head_dims.size() - 1, Activation::Relu);
  head_acts.back() = Activation::Linear;
  m.head = DenseNet::make(head_dims, head_acts, rng);
  return m;
}

std::vector<double> input_features(const std::vector<double>& gains,
                                   const NetworkConfig& cfg, bool ub_mean) {
  if (!ub_mean) return gains;
  int U = cfg.num_ues(), B = cfg.num_rus, M = cfg.num_prbs, S = cfg.num_slices();
  std::vector<double> out(static_cast<size_t>(U) * B, 0.0);
  for (int u = 0; u < U; ++u)
    for (int b = 0; b < B; ++b) {
      double acc = 0.0;
      for (int m = 0; m < M; ++m)
        for (int s = 0; s < S; ++s)
          acc += gains[((static_cast<size_t>(u) * B + b) * M + m) * S + s];
      out[static_cast<size_t>(u) * B + b] = acc / (M * S);
    }
  return out;
}

namespace {

void split_mu_logvar(const Tensor2& enc_out, int latent, Tensor2& mu, Tensor2& logvar) {
  mu = Tensor2(enc_out.rows, latent);
  logvar = Tensor2(enc_out.rows, latent);
  for (int r = 0; r < enc_out.rows; ++r)
    for (int c = 0; c < latent; ++c) {
      mu.at(r, c) = enc_out.at(r, c);
      logvar.at(r, c) = enc_out.at(r, c + latent);
    }
}

Tensor2 join_mu_logvar_grads(const Tensor2& dmu, const Tensor2& dlogvar) {
  Tensor2 out(dmu.rows, dmu.cols * 2);
  for (int r = 0; r < dmu.rows; ++r)
    for (int c = 0; c < dmu.cols; ++c) {
      out.at(r, c) = dmu.at(r, c);
      out.at(r, c + dmu.cols) = dlogvar.at(r, c);
    }
  return out;
}

// Eq.-(15)-style InfoNCE on L2-normalized embeddings. Returns the loss and
// fills gradient tensors when requested.
double contrastive_core(const Tensor2& mu_bar, const Tensor2& mu_und, double tau,
                        Tensor2* dmu_bar, Tensor2* dmu_und) {
  const int N = mu_bar.rows;
  const int L = mu_bar.cols;
  if (N < 2) throw ConfigError("contrastive loss needs a batch of at least 2");
  if (mu_und.rows != N || mu_und.cols != L)
    throw ConfigError("contrastive loss: shape mismatch");
  if (!(tau > 0.0)) throw ConfigError("contrastive loss: tau must be > 0");

  std::vector<double> na(N), nb(N);
  Tensor2 fa(N, L), fb(N, L);
  for (int i = 0; i < N; ++i) {
    double sa = 0.0, sb = 0.0;
    for (int c = 0; c < L; ++c) {
      sa += mu_bar.at(i, c) * mu_bar.at(i, c);
      sb += mu_und.at(i, c) * mu_und.at(i, c);
    }
    na[i] = std::sqrt(sa);
    nb[i] = std::sqrt(sb);
    if (na[i] == 0.0 || nb[i] == 0.0)
      throw NumericError("contrastive loss: zero-norm embedding");
    for (int c = 0; c < L; ++c) {
      fa.at(i, c) = mu_bar.at(i, c) / na[i];
      fb.at(i, c) = mu_und.at(i, c) / nb[i];
    }
  }

  Tensor2 sim(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double acc = 0.0;
      for (int c = 0; c < L; ++c) acc += fa.at(i, c) * fb.at(j, c);
      sim.at(i, j) = acc;
    }

  double loss = 0.0;
  Tensor2 softmax(N, N);
  for (int i = 0; i < N; ++i) {
    double mx = sim.at(i, 0) / tau;
    for (int j = 1; j < N; ++j) mx = std::max(mx, sim.at(i, j) / tau);
    double denom = 0.0;
    for (int j = 0; j < N; ++j) {
      softmax.at(i, j) = std::exp(sim.at(i, j) / tau - mx);
      denom += softmax.at(i, j);
    }
    for (int j = 0; j < N; ++j) softmax.at(i, j) /= denom;
    loss += -(sim.at(i, i) / tau - mx - std::log(denom));
  }
  loss /= N;

  if (dmu_bar && dmu_und) {
    *dmu_bar = Tensor2(N, L);
    *dmu_und = Tensor2(N, L);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double g = (softmax.at(i, j) - (i == j ? 1.0 : 0.0)) / (N * tau);
        if (g == 0.0) continue;
        for (int c = 0; c < L; ++c) {
          dmu_bar->at(i, c) += g * (fb.at(j, c) - sim.at(i, j) * fa.at(i, c)) / na[i];
          dmu_und->at(j, c) += g * (fa.at(i, c) - sim.at(i, j) * fb.at(j, c)) / nb[j];
        }
      }
  }
  return loss;
}

}  // namespace

EncodeResult encode(const SsvaeModel& model, const Tensor2& x, bool train_mode,
                    Rng* rng) {
  EncodeResult res;
  Tensor2 out = forward(model.encoder, x, false, 0.0, nullptr, nullptr);
  split_mu_logvar(out, model.latent_dim, res.mu, res.logvar);
  if (train_mode) {
    if (!rng) throw ConfigError("encode: train mode needs an rng");
    res.z = reparameterize(res.mu, res.logvar, *rng);
  } else {
    res.z = res.mu;
  }
  return res;
}

double loss_elbo(const SsvaeModel& model, const Tensor2& x, Rng& rng) {
  EncodeResult enc = encode(model, x, true, &rng);
  Tensor2 xhat = forward(model.decoder, enc.z, false, 0.0, nullptr, nullptr);
  return model.lambda_rec * mse(xhat, x) +
         model.lambda_kl * kl_gaussian(enc.mu, enc.logvar);
}

double loss_supervised(const SsvaeModel& model, const Tensor2& x, const Tensor2& gamma) {
  if (gamma.rows != x.rows) throw ConfigError("loss_supervised: batch mismatch");
  if (gamma.cols != model.output_dim)
    throw ConfigError("loss_supervised: target length mismatch");
  EncodeResult enc = encode(model, x, false, nullptr);
  Tensor2 pred = forward(model.head, enc.mu, false, 0.0, nullptr, nullptr);
  return mse(pred, gamma);
}

double loss_contrastive(const SsvaeModel& model, const Tensor2& anchors,
                        const Tensor2& positives, double tau) {
  EncodeResult ea = encode(model, anchors, false, nullptr);
  EncodeResult eb = encode(model, positives, false, nullptr);
  return contrastive_core(ea.mu, eb.mu, tau, nullptr, nullptr);
}

namespace {

struct BatchTensors {
  Tensor2 x;
  Tensor2 y;
};

BatchTensors gather_batch(const std::vector<std::vector<double>>& xs,
                          const std::vector<const std::vector<double>*>& ys,
                          const std::vector<int>& order, size_t begin, size_t end) {
  int bs = static_cast<int>(end - begin);
  BatchTensors bt;
  bt.x = Tensor2(bs, static_cast<int>(xs[order[begin]].size()));
  if (!ys.empty()) bt.y = Tensor2(bs, static_cast<int>(ys[order[begin]]->size()));
  for (int i = 0; i < bs; ++i) {
    const auto& row = xs[order[begin + i]];
    std::copy(row.begin(), row.end(), bt.x.data.begin() + static_cast<size_t>(i) * bt.x.cols);
    if (!ys.empty()) {
      const auto& yrow = *ys[order[begin + i]];
      std::copy(yrow.begin(), yrow.end(),
                bt.y.data.begin() + static_cast<size_t>(i) * bt.y.cols);
    }
  }
  return bt;
}

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
  for (size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
}

struct Trainer {
  const SsvaeHyper& hyper;
  SsvaeModel& model;
  AdamState adam_enc, adam_dec, adam_head;
  Rng& rng;
  long long steps = 0;

  Trainer(const SsvaeHyper& h, SsvaeModel& m, Rng& r)
      : hyper(h), model(m), rng(r) {
    AdamConfig ac;
    ac.lr = h.lr;
    ac.beta1 = h.adam_beta1;
    ac.beta2 = h.adam_beta2;
    ac.weight_decay = h.weight_decay;
    adam_enc = AdamState::init(m.encoder, ac);
    adam_dec = AdamState::init(m.decoder, ac);
    adam_head = AdamState::init(m.head, ac);
  }

  // One optimizer step over a batch. Any loss whose weight is zero is
  // skipped entirely (no forward, no rng draws), which keeps the pure
  // supervised configuration bit-identical to a standalone regression loop.
  struct StepLosses {
    double rec = 0.0, kl = 0.0, sup = 0.0;
  };
  StepLosses elbo_supervised_step(const Tensor2& x, const Tensor2* y,
                                  double lambda_sup_eff) {
    StepLosses out;
    ForwardCache enc_cache;
    Tensor2 enc_out = forward(model.encoder, x, true, hyper.dropout, &rng, &enc_cache);
    Tensor2 mu, logvar;
    split_mu_logvar(enc_out, model.latent_dim, mu, logvar);

    Tensor2 dmu(mu.rows, mu.cols);
    Tensor2 dlogvar(mu.rows, mu.cols);
    bool enc_dirty = false;

    NetGrads dec_grads, head_grads;
    bool dec_dirty = false, head_dirty = false;

    if (model.lambda_kl > 0.0) {
      out.kl = kl_gaussian(mu, logvar);
      Tensor2 gmu, glv;
      kl_gaussian_grad(mu, logvar, gmu, glv);
      for (size_t i = 0; i < dmu.data.size(); ++i) {
        dmu.data[i] += model.lambda_kl * gmu.data[i];
        dlogvar.data[i] += model.lambda_kl * glv.data[i];
      }
      enc_dirty = true;
    }
    if (model.lambda_rec > 0.0) {
      Tensor2 eps;
      Tensor2 z = reparameterize(mu, logvar, rng, &eps);
      ForwardCache dec_cache;
      Tensor2 xhat = forward(model.decoder, z, true, hyper.dropout, &rng, &dec_cache);
      out.rec = mse(xhat, x);
      Tensor2 dxhat = mse_grad(xhat, x);
      for (double& v : dxhat.data) v *= model.lambda_rec;
      dec_grads = backward(model.decoder, dec_cache, dxhat);
      // Through z = mu + exp(logvar/2) * eps.
      for (size_t i = 0; i < dmu.data.size(); ++i) {
        double dz = dec_grads.dx.data[i];
        dmu.data[i] += dz;
        dlogvar.data[i] += dz * 0.5 * std::exp(0.5 * logvar.data[i]) * eps.data[i];
      }
      enc_dirty = true;
      dec_dirty = true;
    }
    if (y != nullptr && lambda_sup_eff > 0.0) {
      ForwardCache head_cache;
      Tensor2 pred = forward(model.head, mu, true, hyper.dropout, &rng, &head_cache);
      out.sup = mse(pred, *y);
      Tensor2 dpred = mse_grad(pred, *y);
      for (double& v : dpred.data) v *= lambda_sup_eff;
      head_grads = backward(model.head, head_cache, dpred);
      for (size_t i = 0; i < dmu.data.size(); ++i) dmu.data[i] += head_grads.dx.data[i];
      enc_dirty = true;
      head_dirty = true;
    }

    if (enc_dirty) {
      NetGrads enc_grads =
          backward(model.encoder, enc_cache, join_mu_logvar_grads(dmu, dlogvar));
      adam_step(adam_enc, model.encoder, enc_grads);
      ++steps;
    }
    if (dec_dirty) adam_step(adam_dec, model.decoder, dec_grads);
    if (head_dirty) adam_step(adam_head, model.head, head_grads);
    return out;
  }

  // Stage B: contrastive fine-tune on generated pairs + reduced supervised.
  struct StageBLosses {
    double con = 0.0, sup = 0.0;
  };
  StageBLosses contrastive_step(const Tensor2& x_bar, const Tensor2& x_und,
                                const Tensor2& x_orig, const Tensor2& y,
                                double lambda_sup_eff) {
    StageBLosses out;
    NetGrads enc_total = NetGrads::zeros_like(model.encoder);
    bool enc_dirty = false;

    if (model.lambda_con > 0.0) {
      ForwardCache cache_bar, cache_und;
      Tensor2 out_bar = forward(model.encoder, x_bar, true, hyper.dropout, &rng, &cache_bar);
      Tensor2 out_und = forward(model.encoder, x_und, true, hyper.dropout, &rng, &cache_und);
      Tensor2 mu_bar, lv_bar, mu_und, lv_und;
      split_mu_logvar(out_bar, model.latent_dim, mu_bar, lv_bar);
      split_mu_logvar(out_und, model.latent_dim, mu_und, lv_und);

      Tensor2 dmu_bar, dmu_und;
      out.con = contrastive_core(mu_bar, mu_und, model.tau, &dmu_bar, &dmu_und);
      for (double& v : dmu_bar.data) v *= model.lambda_con;
      for (double& v : dmu_und.data) v *= model.lambda_con;

      Tensor2 zeros_bar(dmu_bar.rows, dmu_bar.cols);
      Tensor2 zeros_und(dmu_und.rows, dmu_und.cols);
      NetGrads g_bar =
          backward(model.encoder, cache_bar, join_mu_logvar_grads(dmu_bar, zeros_bar));
      NetGrads g_und =
          backward(model.encoder, cache_und, join_mu_logvar_grads(dmu_und, zeros_und));
      enc_total.add_scaled(g_bar, 1.0);
      enc_total.add_scaled(g_und, 1.0);
      enc_dirty = true;
    }

    NetGrads head_grads;
    bool head_dirty = false;
    if (lambda_sup_eff > 0.0) {
      ForwardCache enc_cache;
      Tensor2 enc_out = forward(model.encoder, x_orig, true, hyper.dropout, &rng, &enc_cache);
      Tensor2 mu, logvar;
      split_mu_logvar(enc_out, model.latent_dim, mu, logvar);
      ForwardCache head_cache;
      Tensor2 pred = forward(model.head, mu, true, hyper.dropout, &rng, &head_cache);
      out.sup = mse(pred, y);
      Tensor2 dpred = mse_grad(pred, y);
      for (double& v : dpred.data) v *= lambda_sup_eff;
      head_grads = backward(model.head, head_cache, dpred);
      Tensor2 zeros_lv(mu.rows, mu.cols);
      NetGrads g_sup =
          backward(model.encoder, enc_cache, join_mu_logvar_grads(head_grads.dx, zeros_lv));
      enc_total.add_scaled(g_sup, 1.0);
      enc_dirty = true;
      head_dirty = true;
    }

    if (enc_dirty) {
      adam_step(adam_enc, model.encoder, enc_total);
      ++steps;
    }
    if (head_dirty) adam_step(adam_head, model.head, head_grads);
    return out;
  }
};

}  // namespace

SsvaeTrainResult train_ssvae(const Dataset& ds, const SsvaeHyper& hyper) {
  const NetworkConfig& cfg = ds.cfg;
  cfg.validate();
  size_t n_labeled_all = ds.labeled.size();
  if (hyper.labeled_limit > 0)
    n_labeled_all = std::min(n_labeled_all, static_cast<size_t>(hyper.labeled_limit));
  if (n_labeled_all == 0)
    throw EmptyLabeledError("train_ssvae: dataset has no labeled samples");

  GammaLayout gl = gamma_layout(cfg);
  Rng rng(hyper.seed);

  // Inputs (raw, standardized later once the split is known).
  std::vector<std::vector<double>> lab_x(n_labeled_all);
  std::vector<const std::vector<double>*> lab_y(n_labeled_all);
  for (size_t i = 0; i < n_labeled_all; ++i) {
    lab_x[i] = input_features(ds.labeled[i].h_flat, cfg, hyper.ub_mean_input);
    lab_y[i] = &ds.labeled[i].gamma;
  }
  std::vector<std::vector<double>> unl_x(ds.unlabeled.size());
  for (size_t i = 0; i < ds.unlabeled.size(); ++i)
    unl_x[i] = input_features(ds.unlabeled[i].h_flat, cfg, hyper.ub_mean_input);

  int input_dim = static_cast<int>(lab_x[0].size());
  SsvaeModel model = make_ssvae_model(input_dim, gl.total(), hyper, rng);

  // Split labeled into train / validation.
  std::vector<int> lab_order(n_labeled_all);
  for (size_t i = 0; i < n_labeled_all; ++i) lab_order[i] = static_cast<int>(i);
  shuffle_indices(lab_order, rng);
  size_t n_val = static_cast<size_t>(hyper.val_split * static_cast<double>(n_labeled_all));
  if (n_val >= n_labeled_all) n_val = n_labeled_all - 1;
  std::vector<int> train_idx(lab_order.begin(), lab_order.end() - n_val);
  std::vector<int> val_idx(lab_order.end() - n_val, lab_order.end());

  // Standardize with training statistics (labeled train + unlabeled).
  {
    std::vector<const std::vector<double>*> rows;
    for (int i : train_idx) rows.push_back(&lab_x[i]);
    for (const auto& r : unl_x) rows.push_back(&r);
    model.scaler.fit(rows);
  }
  for (auto& r : lab_x) model.scaler.apply(r);
  for (auto& r : unl_x) model.scaler.apply(r);

  const bool elbo_active = model.lambda_rec > 0.0 || model.lambda_kl > 0.0;

  // Stage B mixes correlated fading redraws; rebuild the full channel
  // tensors from the recorded per-sample seeds.
  std::vector<ChannelTensor> train_channels;
  std::vector<int> channel_pos(n_labeled_all, -1);
  const bool stage_b_active =
      hyper.stage_a_epochs < hyper.epochs_total && model.lambda_con > 0.0;
  if (stage_b_active) {
    train_channels.reserve(train_idx.size());
    for (size_t t = 0; t < train_idx.size(); ++t) {
      int i = train_idx[t];
      Rng crng(ds.labeled[i].seed);
      ChannelTensor h = generate_channel(cfg, crng);
      for (size_t k = 0; k < h.gains.size(); ++k)
        if (std::fabs(h.gains[k] - ds.labeled[i].h_flat[k]) > 1e-9 * (1.0 + h.gains[k]))
          throw ConfigError(
              "train_ssvae: stage B needs generator-produced samples (seed " +
              std::to_string(ds.labeled[i].seed) + " does not reproduce the gains)");
      channel_pos[i] = static_cast<int>(t);
      train_channels.push_back(std::move(h));
    }
  }

  Trainer trainer(hyper, model, rng);
  SsvaeTrainResult result;

  auto validate = [&](SsvaeEpochStats& row) {
    if (val_idx.empty()) return;
    std::vector<double> yt, yp;
    for (int i : val_idx) {
      Tensor2 x(1, input_dim);
      x.data = lab_x[i];
      EncodeResult enc = encode(model, x, false, nullptr);
      Tensor2 pred = forward(model.head, enc.mu, false, 0.0, nullptr, nullptr);
      for (int c = 0; c < pred.cols; ++c) {
        yp.push_back(pred.at(0, c));
        yt.push_back((*lab_y[i])[c]);
      }
    }
    row.val_mae = mae(yt, yp);
    row.val_r2 = r2(yt, yp);
    row.val_cosine = cosine(yt, yp);
  };

  std::vector<int> order(train_idx);
  std::vector<int> unl_order(unl_x.size());
  for (size_t i = 0; i < unl_x.size(); ++i) unl_order[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < hyper.epochs_total; ++epoch) {
    const bool stage_a = epoch < hyper.stage_a_epochs;
    SsvaeEpochStats row;
    row.epoch = epoch;
    row.stage = stage_a ? 1 : 2;
    int batches = 0;

    if (stage_a) {
      shuffle_indices(order, rng);
      for (size_t begin = 0; begin < order.size(); begin += hyper.batch_size) {
        size_t end = std::min(order.size(), begin + hyper.batch_size);
        BatchTensors bt = gather_batch(lab_x, lab_y, order, begin, end);
        auto losses = trainer.elbo_supervised_step(bt.x, &bt.y, model.lambda_sup);
        row.loss_rec += losses.rec;
        row.loss_kl += losses.kl;
        row.loss_sup += losses.sup;
        ++batches;
      }
      if (elbo_active && !unl_x.empty()) {
        shuffle_indices(unl_order, rng);
        for (size_t begin = 0; begin < unl_order.size(); begin += hyper.batch_size) {
          size_t end = std::min(unl_order.size(), begin + hyper.batch_size);
          BatchTensors bt = gather_batch(unl_x, {}, unl_order, begin, end);
          auto losses = trainer.elbo_supervised_step(bt.x, nullptr, 0.0);
          row.loss_rec += losses.rec;
          row.loss_kl += losses.kl;
          ++batches;
        }
      }
    } else {
      shuffle_indices(order, rng);
      double sup_eff = hyper.stage_b_sup_factor * model.lambda_sup;
      for (size_t begin = 0; begin < order.size(); begin += hyper.batch_size) {
        size_t end = std::min(order.size(), begin + hyper.batch_size);
        size_t bs = end - begin;
        if (stage_b_active && bs < 2) continue;  // contrastive needs negatives
        BatchTensors orig = gather_batch(lab_x, lab_y, order, begin, end);
        Tensor2 x_bar, x_und;
        if (stage_b_active) {
          x_bar = Tensor2(static_cast<int>(bs), input_dim);
          x_und = Tensor2(static_cast<int>(bs), input_dim);
          for (size_t i = 0; i < bs; ++i) {
            const ChannelTensor& base = train_channels[channel_pos[order[begin + i]]];
            ChannelTensor hb =
                generate_contrastive_pair(base, cfg, rng, PairMode::Similar, hyper.pair_corr);
            ChannelTensor hu =
                generate_contrastive_pair(base, cfg, rng, PairMode::Similar, hyper.pair_corr);
            std::vector<double> fb = input_features(hb.gains, cfg, hyper.ub_mean_input);
            std::vector<double> fu = input_features(hu.gains, cfg, hyper.ub_mean_input);
            model.scaler.apply(fb);
            model.scaler.apply(fu);
            std::copy(fb.begin(), fb.end(),
                      x_bar.data.begin() + static_cast<size_t>(i) * input_dim);
            std::copy(fu.begin(), fu.end(),
                      x_und.data.begin() + static_cast<size_t>(i) * input_dim);
          }
        }
        auto losses = trainer.contrastive_step(x_bar, x_und, orig.x, orig.y, sup_eff);
        row.loss_con += losses.con;
        row.loss_sup += losses.sup;
        ++batches;
      }
    }

    if (batches > 0) {
      row.loss_rec /= batches;
      row.loss_kl /= batches;
      row.loss_sup /= batches;
      row.loss_con /= batches;
    }
    validate(row);
    result.history.push_back(row);
  }

  result.optimizer_steps = trainer.steps;
  result.model = std::move(model);
  return result;
}

PredictionRaw predict_allocation(const SsvaeModel& model, const ChannelTensor& h,
                                 const NetworkConfig& cfg) {
  if (!h.dims_match(cfg))
    throw ConfigError("predict_allocation: channel dims mismatch");
  std::vector<double> feat = input_features(h.gains, cfg, model.ub_mean_input);
  if (static_cast<int>(feat.size()) != model.input_dim)
    throw ConfigError("predict_allocation: input dim mismatch");
  model.scaler.apply(feat);
  Tensor2 x(1, model.input_dim);
  x.data = feat;
  EncodeResult enc = encode(model, x, false, nullptr);
  Tensor2 pred = forward(model.head, enc.mu, false, 0.0, nullptr, nullptr);

  GammaLayout gl = gamma_layout(cfg);
  PredictionRaw raw;
  raw.p_hat.assign(pred.data.begin(), pred.data.begin() + gl.p_len);
  raw.alpha_logits.assign(pred.data.begin() + gl.p_len,
                          pred.data.begin() + gl.p_len + gl.alpha_len);
  raw.beta_logits.assign(pred.data.begin() + gl.p_len + gl.alpha_len,
                         pred.data.end());
  return raw;
}

std::pair<Allocation, ViolationList> project_feasible(const PredictionRaw& raw,
                                                      const ChannelTensor& h,
                                                      const NetworkConfig& cfg) {
  int U = cfg.num_ues(), B = cfg.num_rus, M = cfg.num_prbs, S = cfg.num_slices();
  GammaLayout gl = gamma_layout(cfg);
  if (static_cast<int>(raw.p_hat.size()) != gl.p_len ||
      static_cast<int>(raw.alpha_logits.size()) != gl.alpha_len ||
      static_cast<int>(raw.beta_logits.size()) != gl.beta_len)
    throw ConfigError("project_feasible: raw prediction length mismatch");

  Allocation a = Allocation::zero(cfg);
  auto alpha_at = [&](int u, int b, int s) {
    return raw.alpha_logits[(static_cast<size_t>(u) * B + b) * S + s];
  };
  auto beta_at = [&](int u, int b, int m, int s) {
    return raw.beta_logits[((static_cast<size_t>(u) * B + b) * M + m) * S + s];
  };
  auto p_at = [&](int u, int b, int m, int s) {
    return raw.p_hat[((static_cast<size_t>(u) * B + b) * M + m) * S + s];
  };

  // One-hot association per served (u, s).
  for (int u = 0; u < U; ++u) {
    int su = cfg.slice_of_ue(u);
    int best_b = 0;
    double best = alpha_at(u, 0, su);
    for (int b = 1; b < B; ++b)
      if (alpha_at(u, b, su) > best) {
        best = alpha_at(u, b, su);
        best_b = b;
      }
    a.a(u, best_b, su) = 1;
  }

  // Per-slot grant to the best-logit associated UE; logit must clear 0.
  for (int b = 0; b < B; ++b)
    for (int m = 0; m < M; ++m)
      for (int s = 0; s < S; ++s) {
        int best_u = -1;
        double best = 0.0;  // grant threshold
        for (int u = 0; u < U; ++u) {
          if (cfg.slice_of_ue(u) != s || !a.a(u, b, s)) continue;
          double v = beta_at(u, b, m, s);
          if (v > best) {
            best = v;
            best_u = u;
          }
        }
        if (best_u >= 0) {
          a.bt(best_u, b, m, s) = 1;
          double p = p_at(best_u, b, m, s) * cfg.p_slice_max_w[s];
          p = std::clamp(p, 0.0, cfg.p_slice_max_w[s]);
          a.p(best_u, b, m, s) = p;
        }
      }

  // Per-RU uniform down-scale into the power budget.
  for (int b = 0; b < B; ++b) {
    double sum_hp = 0.0;
    for (int u = 0; u < U; ++u) {
      int su = cfg.slice_of_ue(u);
      if (!a.a(u, b, su)) continue;
      for (int m = 0; m < M; ++m) sum_hp += h.gain(u, b, m, su) * a.p(u, b, m, su);
    }
    double margin = cfg.p_ru_max_w - cfg.quant_noise_w;
    if (margin < 0.0) margin = 0.0;
    if (sum_hp > margin) {
      double scale = margin > 0.0 ? margin / sum_hp : 0.0;
      for (int u = 0; u < U; ++u) {
        int su = cfg.slice_of_ue(u);
        if (!a.a(u, b, su)) continue;
        for (int m = 0; m < M; ++m) a.p(u, b, m, su) *= scale;
      }
    }
  }

  return {a, check_feasible(h, a, cfg)};
}

void save_ssvae_checkpoint(const std::string& path, const SsvaeModel& model,
                           long long adam_step) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "oran-ssvae 1\nlatent %d\ntau %.17g\nlambda %.17g %.17g %.17g %.17g\n"
                "input_mode %s\ndims %d %d\nscaler\n",
                model.latent_dim, model.tau, model.lambda_rec, model.lambda_kl,
                model.lambda_sup, model.lambda_con,
                model.ub_mean_input ? "ub_mean" : "full", model.input_dim,
                model.output_dim);
  out << buf;
  out.write(reinterpret_cast<const char*>(model.scaler.mean.data()),
            static_cast<std::streamsize>(model.scaler.mean.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(model.scaler.stddev.data()),
            static_cast<std::streamsize>(model.scaler.stddev.size() * sizeof(double)));
  write_net(out, model.encoder, adam_step);
  write_net(out, model.decoder, adam_step);
  write_net(out, model.head, adam_step);
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

SsvaeModel load_ssvae_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "oran-ssvae" || version != 1)
    throw CheckpointError("bad ssvae checkpoint header: " + path);
  SsvaeModel m;
  std::string tok, mode;
  in >> tok >> m.latent_dim;
  if (tok != "latent") throw CheckpointError("bad ssvae checkpoint: latent");
  in >> tok >> m.tau;
  if (tok != "tau") throw CheckpointError("bad ssvae checkpoint: tau");
  in >> tok >> m.lambda_rec >> m.lambda_kl >> m.lambda_sup >> m.lambda_con;
  if (tok != "lambda") throw CheckpointError("bad ssvae checkpoint: lambda");
  in >> tok >> mode;
  if (tok != "input_mode") throw CheckpointError("bad ssvae checkpoint: input_mode");
  m.ub_mean_input = (mode == "ub_mean");
  in >> tok >> m.input_dim >> m.output_dim;
  if (tok != "dims") throw CheckpointError("bad ssvae checkpoint: dims");
  in >> tok;
  if (tok != "scaler") throw CheckpointError("bad ssvae checkpoint: scaler");
  in.get();
  m.scaler.mean.resize(m.input_dim);
  m.scaler.stddev.resize(m.input_dim);
  in.read(reinterpret_cast<char*>(m.scaler.mean.data()),
          static_cast<std::streamsize>(m.scaler.mean.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(m.scaler.stddev.data()),
          static_cast<std::streamsize>(m.scaler.stddev.size() * sizeof(double)));
  m.encoder = read_net(in, nullptr);
  m.decoder = read_net(in, nullptr);
  m.head = read_net(in, nullptr);
  if (!in) throw CheckpointError("truncated ssvae checkpoint: " + path);
  return m;
}

}  // namespace oran

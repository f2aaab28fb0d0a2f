#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "oran/dataset.hpp"
#include "oran/nn.hpp"

namespace oran {

struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> stddev;  // floored at 1e-8

  void fit(const std::vector<const std::vector<double>*>& rows);
  void apply(std::vector<double>& row) const;
};

struct SsvaeHyper {
  int epochs_total = 40;
  int stage_a_epochs = 30;  // supervised + ELBO; the rest is contrastive fine-tune
  int batch_size = 128;
  double lr = 0.001;
  double adam_beta1 = 0.99;
  double adam_beta2 = 0.99;
  double weight_decay = 0.0;  // table's 0.9 available via override
  double dropout = 0.3;
  int latent_dim = 20;
  double tau = 0.25;
  double lambda_rec = 1.0;
  double lambda_kl = 0.1;
  double lambda_sup = 10.0;
  double lambda_con = 1.0;
  double stage_b_sup_factor = 0.1;
  double pair_corr = 0.9;  // fading correlation of similar pairs
  double val_split = 0.2;
  std::vector<int> encoder_hidden{128, 96, 64, 32};
  std::vector<int> decoder_hidden{32, 64, 96, 128};
  std::vector<int> head_hidden{96, 96};
  bool literal_twenty_layers = false;  // "number of encoding layer = 20" read literally
  bool ub_mean_input = false;          // paper-literal U*B input (mean over m, s)
  int labeled_limit = 0;               // 0 = use all labeled samples
  uint64_t seed = 1;

  void apply_override(const std::string& key, const std::string& value);
};

struct SsvaeModel {
  DenseNet encoder;  // input -> hidden -> 2*latent (mu | logvar)
  DenseNet decoder;  // latent -> hidden -> input
  DenseNet head;     // mu -> hidden -> gamma vector
  int latent_dim = 0;
  int input_dim = 0;
  int output_dim = 0;
  double tau = 0.25;
  double lambda_rec = 1.0, lambda_kl = 0.1, lambda_sup = 10.0, lambda_con = 1.0;
  bool ub_mean_input = false;
  FeatureScaler scaler;
};

SsvaeModel make_ssvae_model(int input_dim, int output_dim, const SsvaeHyper& hyper,
                            Rng& rng);

// Raw channel gains -> model input features (before standardization).
std::vector<double> input_features(const std::vector<double>& gains,
                                   const NetworkConfig& cfg, bool ub_mean);

struct EncodeResult {
  Tensor2 mu;
  Tensor2 logvar;
  Tensor2 z;  // reparameterized in train mode, mu in eval
};

EncodeResult encode(const SsvaeModel& model, const Tensor2& x, bool train_mode,
                    Rng* rng);

// lambda_rec * MSE(decoder(z), x) + lambda_kl * KL. Standalone scalar for
// tests and logging; the trainer fuses the same math with gradients.
double loss_elbo(const SsvaeModel& model, const Tensor2& x, Rng& rng);

// MSE between head(mu(x)) and the targets.
double loss_supervised(const SsvaeModel& model, const Tensor2& x, const Tensor2& gamma);

// Temperature-scaled softmax over L2-normalized mu embeddings with in-batch
// negatives; mean over anchors. Needs batch >= 2.
double loss_contrastive(const SsvaeModel& model, const Tensor2& anchors,
                        const Tensor2& positives, double tau);

struct SsvaeEpochStats {
  int epoch = 0;
  int stage = 0;  // 1 = supervised+ELBO, 2 = contrastive fine-tune
  double loss_rec = 0.0, loss_kl = 0.0, loss_sup = 0.0, loss_con = 0.0;
  double val_mae = 0.0, val_r2 = 0.0, val_cosine = 0.0;
};

struct SsvaeTrainResult {
  SsvaeModel model;
  std::vector<SsvaeEpochStats> history;
  long long optimizer_steps = 0;
};

// Two-stage schedule: stage A minimizes ELBO + supervised on labeled batches
// (unlabeled batches contribute ELBO only); stage B fine-tunes the encoder
// with the contrastive loss on generated similar pairs while the supervised
// term stays active at stage_b_sup_factor * lambda_sup.
SsvaeTrainResult train_ssvae(const Dataset& ds, const SsvaeHyper& hyper);

struct PredictionRaw {
  std::vector<double> p_hat;        // normalized by the slice power cap
  std::vector<double> alpha_logits;
  std::vector<double> beta_logits;
};

PredictionRaw predict_allocation(const SsvaeModel& model, const ChannelTensor& h,
                                 const NetworkConfig& cfg);

// Decode raw outputs into a structurally feasible allocation: one-hot alpha
// per served (u, s), per-slot argmax beta (logit > 0 grants), powers clamped
// to [0, P_s^max] and scaled per RU into the P_b^max - sigma1^2 margin.
// Residual rate/delay/fronthaul violations are returned, never hidden.
std::pair<Allocation, ViolationList> project_feasible(const PredictionRaw& raw,
                                                      const ChannelTensor& h,
                                                      const NetworkConfig& cfg);

void save_ssvae_checkpoint(const std::string& path, const SsvaeModel& model,
                           long long adam_step);
SsvaeModel load_ssvae_checkpoint(const std::string& path);

}  // namespace oran

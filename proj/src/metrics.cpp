#include "oran/metrics.hpp"

#include <cmath>

#include "oran/errors.hpp"

namespace oran {

namespace {

void check_lengths(const std::vector<double>& y, const std::vector<double>& yhat,
                   const char* what) {
  if (y.empty() || y.size() != yhat.size())
    throw ConfigError(std::string(what) + ": inputs must be equal nonzero length");
}

double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

double mae(const std::vector<double>& y, const std::vector<double>& yhat) {
  check_lengths(y, yhat, "mae");
  double acc = 0.0;
  for (size_t i = 0; i < y.size(); ++i) acc += std::fabs(y[i] - yhat[i]);
  return acc / static_cast<double>(y.size());
}

double r2(const std::vector<double>& y, const std::vector<double>& yhat) {
  check_lengths(y, yhat, "r2");
  double ybar = mean(y);
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  if (ss_tot == 0.0) throw ConfigError("r2: zero-variance reference");
  return 1.0 - ss_res / ss_tot;
}

double cosine(const std::vector<double>& y, const std::vector<double>& yhat) {
  check_lengths(y, yhat, "cosine");
  double dot = 0.0, ny = 0.0, nyh = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    dot += y[i] * yhat[i];
    ny += y[i] * y[i];
    nyh += yhat[i] * yhat[i];
  }
  if (ny == 0.0 || nyh == 0.0)
    throw ConfigError("cosine: zero-magnitude vector");
  return dot / (std::sqrt(ny) * std::sqrt(nyh));
}

double pearson(const std::vector<double>& y, const std::vector<double>& yhat) {
  check_lengths(y, yhat, "pearson");
  double my = mean(y), myh = mean(yhat);
  double cov = 0.0, vy = 0.0, vyh = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    cov += (y[i] - my) * (yhat[i] - myh);
    vy += (y[i] - my) * (y[i] - my);
    vyh += (yhat[i] - myh) * (yhat[i] - myh);
  }
  if (vy == 0.0 || vyh == 0.0)
    throw ConfigError("pearson: zero-variance input");
  return cov / (std::sqrt(vy) * std::sqrt(vyh));
}

double association_error(const Allocation& a, const Allocation& b) {
  if (a.U != b.U || a.B != b.B || a.M != b.M || a.S != b.S)
    throw ConfigError("association_error: dimension mismatch");
  double diff = 0.0;
  for (size_t i = 0; i < a.alpha.size(); ++i)
    diff += std::fabs(static_cast<double>(a.alpha[i]) - static_cast<double>(b.alpha[i]));
  for (size_t i = 0; i < a.beta.size(); ++i)
    diff += std::fabs(static_cast<double>(a.beta[i]) - static_cast<double>(b.beta[i]));
  return diff / static_cast<double>(a.alpha.size() + a.beta.size());
}

}  // namespace oran

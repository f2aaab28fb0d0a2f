#pragma once

#include <vector>

#include "oran/allocation.hpp"

namespace oran {

// Regression metrics as defined in the evaluation section. pearson and r2
// throw ConfigError on zero-variance input instead of returning NaN.
double mae(const std::vector<double>& y, const std::vector<double>& yhat);
double r2(const std::vector<double>& y, const std::vector<double>& yhat);
double cosine(const std::vector<double>& y, const std::vector<double>& yhat);
double pearson(const std::vector<double>& y, const std::vector<double>& yhat);

// (|alpha_a - alpha_b| + |beta_a - beta_b|) / #(alpha & beta), in [0, 1].
double association_error(const Allocation& a, const Allocation& b);

}  // namespace oran

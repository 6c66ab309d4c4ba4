#pragma once

#include <optional>
#include <span>

#include "anet/common.hpp"

namespace anet::train {

double mse(std::span<const double> predictions, std::span<const double> labels);

// Rank-based AUC with midrank tie handling; identical to counting pairwise
// concordance with ties worth 0.5. labels are 0/1 with 1 the positive
// class. Returns nullopt when only one class is present.
std::optional<double> auc_score(std::span<const double> scores, std::span<const int> labels);

inline constexpr double kRemissionThreshold = 2.6;

struct ClassificationResult {
  double accuracy = 0.0;
  std::optional<double> auc;
  std::size_t n = 0;
};

// Remission/active-disease classification from predicted absolute scores.
// A score below the threshold means remission; the boundary value itself
// counts as active disease. AUC treats active disease as the positive
// class and uses the predicted absolute score as the ranking statistic.
ClassificationResult classify_and_score(std::span<const double> predicted_absolute,
                                        std::span<const double> true_future_scores,
                                        double threshold = kRemissionThreshold);

struct EvalReport {
  int fold = -1;  // -1 marks an aggregate row
  double history_years = 0.0;
  std::size_t n_samples = 0;
  double mse = 0.0;
  double accuracy = 0.0;
  std::optional<double> auc;
};

}  // namespace anet::train

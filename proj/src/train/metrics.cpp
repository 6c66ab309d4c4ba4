#include "anet/train/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace anet::train {

double mse(std::span<const double> predictions, std::span<const double> labels) {
  require(predictions.size() == labels.size() && !predictions.empty(),
          "mse: need equal-sized non-empty inputs");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - labels[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

std::optional<double> auc_score(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), "auc_score: size mismatch");
  std::size_t n_pos = 0;
  for (const int l : labels) {
    require(l == 0 || l == 1, "auc_score: labels must be 0/1");
    n_pos += static_cast<std::size_t>(l);
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // midranks over tie groups, summed for the positive class
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += midrank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

ClassificationResult classify_and_score(std::span<const double> predicted_absolute,
                                        std::span<const double> true_future_scores,
                                        double threshold) {
  require(predicted_absolute.size() == true_future_scores.size() && !predicted_absolute.empty(),
          "classify_and_score: need equal-sized non-empty inputs");
  ClassificationResult result;
  result.n = predicted_absolute.size();

  std::vector<int> truth(result.n);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < result.n; ++i) {
    const bool true_active = true_future_scores[i] >= threshold;
    const bool pred_active = predicted_absolute[i] >= threshold;
    truth[i] = true_active ? 1 : 0;
    if (true_active == pred_active) ++correct;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(result.n);
  result.auc = auc_score(predicted_absolute, truth);
  return result;
}

}  // namespace anet::train

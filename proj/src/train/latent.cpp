#include "anet/train/latent.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "anet/data/io.hpp"

namespace anet::train {

std::vector<LatentRow> collect_latents(const model::AdaptiveNet& model,
                                       std::span<const sample::StructuredSample> samples) {
  std::vector<LatentRow> rows;
  for (const sample::StructuredSample& s : samples) {
    for (const sample::TimedEvent& e : s.visit_events) {
      rows.push_back(LatentRow{false, model.encode_visit_latent(e.features)});
    }
    for (const sample::TimedEvent& e : s.med_events) {
      rows.push_back(LatentRow{true, model.encode_med_latent(e.features)});
    }
  }
  return rows;
}

void write_latents_csv(std::ostream& out, std::span<const LatentRow> rows) {
  if (rows.empty()) {
    out << "event_type\n";
    return;
  }
  out << "event_type";
  for (std::size_t i = 0; i < rows.front().z.size(); ++i) out << ",z" << i;
  out << '\n';
  for (const LatentRow& r : rows) {
    out << (r.is_med ? "med" : "visit");
    for (const double v : r.z) out << ',' << data::format_double(v);
    out << '\n';
  }
}

namespace {

// Solves A x = b for symmetric positive-definite A (in-place Cholesky).
bool cholesky_solve(std::vector<Vec>& a, Vec& b) {
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i][j];
      for (std::size_t k = 0; k < j; ++k) sum -= a[i][k] * a[j][k];
      if (i == j) {
        if (sum <= 0.0) return false;
        a[i][i] = std::sqrt(sum);
      } else {
        a[i][j] = sum / a[j][j];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {  // forward
    double sum = b[i];
    for (std::size_t k = 0; k < i; ++k) sum -= a[i][k] * b[k];
    b[i] = sum / a[i][i];
  }
  for (std::size_t i = n; i-- > 0;) {  // backward
    double sum = b[i];
    for (std::size_t k = i + 1; k < n; ++k) sum -= a[k][i] * b[k];
    b[i] = sum / a[i][i];
  }
  return true;
}

}  // namespace

double latent_separability(std::span<const LatentRow> rows, std::uint64_t seed) {
  std::vector<std::size_t> visits, meds;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    (rows[i].is_med ? meds : visits).push_back(i);
  }
  require(visits.size() >= 2 && meds.size() >= 2,
          "latent_separability: need at least 2 latents per event type");
  const std::size_t dim = rows.front().z.size() + 1;  // intercept

  std::mt19937_64 rng(derive_seed(seed, 0x5EBAu));
  std::shuffle(visits.begin(), visits.end(), rng);
  std::shuffle(meds.begin(), meds.end(), rng);

  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < visits.size(); ++i) {
    (i < visits.size() / 2 ? train_idx : test_idx).push_back(visits[i]);
  }
  for (std::size_t i = 0; i < meds.size(); ++i) {
    (i < meds.size() / 2 ? train_idx : test_idx).push_back(meds[i]);
  }

  // normal equations with a small ridge for numerical safety
  std::vector<Vec> a(dim, Vec(dim, 0.0));
  Vec b(dim, 0.0);
  Vec x(dim);
  for (const std::size_t idx : train_idx) {
    x[0] = 1.0;
    std::copy(rows[idx].z.begin(), rows[idx].z.end(), x.begin() + 1);
    const double y = rows[idx].is_med ? 1.0 : -1.0;
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j <= i; ++j) a[i][j] += x[i] * x[j];
      b[i] += x[i] * y;
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) a[i][j] = a[j][i];
  }

  double trace = 0.0;
  for (std::size_t i = 0; i < dim; ++i) trace += a[i][i];
  double ridge = 1e-8 * (trace / static_cast<double>(dim) + 1.0);
  Vec w;
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<Vec> a_copy = a;
    for (std::size_t i = 0; i < dim; ++i) a_copy[i][i] += ridge;
    Vec b_copy = b;
    if (cholesky_solve(a_copy, b_copy)) {
      w = std::move(b_copy);
      break;
    }
    ridge *= 1000.0;
  }
  require(!w.empty(), "latent_separability: normal equations not solvable");

  std::size_t correct = 0;
  for (const std::size_t idx : test_idx) {
    double score = w[0];
    for (std::size_t i = 0; i < rows[idx].z.size(); ++i) score += w[i + 1] * rows[idx].z[i];
    const bool predicted_med = score > 0.0;
    if (predicted_med == rows[idx].is_med) ++correct;
  }
  require(!test_idx.empty(), "latent_separability: empty held-out split");
  return static_cast<double>(correct) / static_cast<double>(test_idx.size());
}

}  // namespace anet::train

#pragma once

#include "anet/synth/synth.hpp"
#include "anet/train/cv.hpp"

namespace anet::cli {

// Effective run configuration: documented defaults, overridden first by the
// JSON config file and then by command-line flags. Unknown keys in the
// file are rejected. The canonical serialization (and its hash) covers the
// effective values, so equal hashes imply identical configurations.
struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  // synthetic
  std::size_t n_patients = 2000;
  double visits_per_year = 1.26;
  double med_adjust_rate = 0.5;
  double noise_sigma = 0.5;
  double horizon_years = 11.0;

  // sampling
  double max_history_years = 5.0;
  double min_horizon_years = 0.25;
  double max_horizon_years = 1.0;
  std::size_t min_visits = 3;

  // model
  train::ModelKind kind = train::ModelKind::AdaptiveNet;
  train::ModelHyper hyper;

  // train
  std::size_t batch_size = 256;
  std::size_t steps = 7000;
  double learning_rate = 1e-4;
  double l1_coeff = 1e-5;

  // eval
  std::size_t folds = 5;
  std::vector<double> history_lengths{0.5, 1.0, 2.0, 3.0, 4.0, 5.0};

  synth::SynthConfig synth_config() const;
  sample::SamplingConfig sampling_config() const;
  train::TrainConfig train_config() const;
  train::PipelineConfig pipeline_config() const;

  std::string canonical_json() const;
  std::string hash() const;        // 16 hex chars over canonical_json
  std::string short_hash() const;  // first 8
};

// Throws DataError on unreadable files, invalid JSON, unknown keys, or
// out-of-range values.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text, const std::string& origin);

}  // namespace anet::cli

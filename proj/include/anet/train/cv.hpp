#pragma once

#include <iosfwd>

#include "anet/model/checkpoint.hpp"
#include "anet/synth/synth.hpp"
#include "anet/train/metrics.hpp"
#include "anet/train/trainer.hpp"

namespace anet::train {

enum class ModelKind { AdaptiveNet, Fcn, Naive };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view s);

// Architecture knobs exposed by the configuration space.
struct ModelHyper {
  std::size_t latent_dim = 100;
  std::size_t encoder_hidden_layers = 1;
  std::size_t lstm_hidden_dim = 100;
  std::size_t rho_hidden_dim = 100;
  std::size_t rho_hidden_layers = 2;
  double dropout_rate = 0.0;
  bool share_encoder_last_layer = false;
  std::size_t fcn_hidden_dim = 32;
  std::size_t fcn_hidden_layers = 3;
  double fcn_dropout_rate = 0.1;
};

struct PipelineConfig {
  ModelKind kind = ModelKind::AdaptiveNet;
  ModelHyper hyper;
  TrainConfig train;
  std::size_t folds = 5;
  std::size_t threads = 1;
};

struct FittedModel {
  ModelKind kind = ModelKind::Naive;
  std::optional<model::AdaptiveNet> adaptivenet;
  std::optional<model::FcnModel> fcn;
  data::FeatureScaler scaler;
  std::size_t n_max = 0;  // fcn slot budgets, from the training fold
  std::size_t m_max = 0;
  std::vector<double> loss_trace;
};

// Fits the configured model on the given records: scaler fit, sample
// generation, and training all see the training records only. seed_stream
// separates folds (and repeated holdouts) deterministically.
FittedModel fit_model(std::span<const data::PatientRecord> train_records,
                      const PipelineConfig& cfg, std::uint64_t seed_stream);

// Per-sample predicted score change on freshly generated samples.
std::vector<double> predict_changes(FittedModel& fitted,
                                    std::span<const sample::StructuredSample> samples);

// Generates validation samples with the fitted scaler and scores them.
// fold_index only labels the report (and the zero-sample error message).
EvalReport evaluate_model(FittedModel& fitted, std::span<const data::PatientRecord> val_records,
                          const TrainConfig& train_cfg, int fold_index);

// Seeded round-robin patient fold assignment; independent of history
// length so sweeps reuse identical folds.
std::vector<std::size_t> assign_folds(std::size_t n_records, std::size_t folds,
                                      std::uint64_t seed);

struct CvResult {
  std::vector<EvalReport> folds;
  EvalReport aggregate;  // sample-count weighted
  std::vector<std::size_t> fold_of_record;
};

// Patient-level k-fold cross validation: per fold the scaler is fitted on
// the training patients, samples are generated separately for both sides,
// and one model is trained from scratch. Folds may run in parallel
// (cfg.threads); reports merge by fold index either way.
CvResult crossvalidate(std::span<const data::PatientRecord> records, const PipelineConfig& cfg);

// One crossvalidate run per history length with identical folds and seeds.
std::vector<CvResult> history_sweep(std::span<const data::PatientRecord> records,
                                    const PipelineConfig& cfg,
                                    std::span<const double> history_lengths);

void write_metrics_csv(std::ostream& out, std::span<const EvalReport> reports,
                       std::string_view config_hash);
void write_loss_trace_csv(std::ostream& out, std::span<const double> trace,
                          std::string_view config_hash);

}  // namespace anet::train

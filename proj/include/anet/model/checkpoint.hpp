#pragma once

#include "anet/data/scaler.hpp"
#include "anet/model/adaptivenet.hpp"
#include "anet/model/fcn.hpp"

namespace anet::model {

// Provenance and reproduction metadata carried by every checkpoint.
struct CheckpointMeta {
  std::string config_hash;
  std::string records_fingerprint;  // hash of the training record content
  std::uint64_t train_seed = 0;
  std::size_t n_max = 0;  // flattening slot budgets (fcn only)
  std::size_t m_max = 0;
  double max_history_years = 0.0;
  double min_horizon_years = 0.0;
  double max_horizon_years = 0.0;
};

inline constexpr int kCheckpointFormatVersion = 1;

// Self-describing JSON container: layer shapes, named parameter blocks,
// scaler state and the encoding layout version. Files are written to a
// temporary name and renamed, so an interrupted save never leaves a
// partial checkpoint behind.
void save_checkpoint(const std::string& path, AdaptiveNet& model,
                     const data::FeatureScaler& scaler, const CheckpointMeta& meta);
void save_checkpoint(const std::string& path, FcnModel& model,
                     const data::FeatureScaler& scaler, const CheckpointMeta& meta);

struct LoadedCheckpoint {
  std::string kind;  // "adaptivenet" | "fcn"
  std::optional<AdaptiveNet> adaptivenet;
  std::optional<FcnModel> fcn;
  data::FeatureScaler scaler;
  CheckpointMeta meta;
};

// Throws DataError on unreadable files, unknown kinds, parameter shape
// mismatches, or an encoding layout version other than this build's.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace anet::model

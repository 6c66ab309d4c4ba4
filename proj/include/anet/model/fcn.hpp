#pragma once

#include "anet/math/layers.hpp"
#include "anet/sample/samplegen.hpp"

namespace anet::model {

struct FcnConfig {
  std::size_t input_width = 0;  // must equal the flattened sample width
  std::size_t hidden_dim = 32;
  std::size_t hidden_layers = 3;
  double dropout_rate = 0.1;
  std::uint64_t init_seed = 0;

  void check() const {
    require(input_width >= 1, "FcnConfig: input_width must be >= 1");
    require(hidden_dim >= 1 && hidden_layers >= 1, "FcnConfig: dims must be >= 1");
    require(dropout_rate >= 0.0 && dropout_rate < 1.0, "FcnConfig: dropout in [0, 1)");
  }
};

// Fixed-input fully-connected baseline over flattened, -1 padded samples.
class FcnModel {
 public:
  explicit FcnModel(const FcnConfig& cfg);

  const FcnConfig& config() const { return cfg_; }

  double predict(const sample::FlatSample& s) const;
  math::NodeId forward(math::Tape& tape, const sample::FlatSample& s,
                       std::mt19937_64* dropout_rng = nullptr);
  std::vector<math::ParamBlock*> parameters();

 private:
  FcnConfig cfg_;
  std::vector<math::DenseLayer> stack_;
};

}  // namespace anet::model

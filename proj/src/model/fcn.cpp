#include "anet/model/fcn.hpp"

namespace anet::model {

FcnModel::FcnModel(const FcnConfig& cfg) : cfg_(cfg) {
  cfg_.check();
  std::size_t in = cfg_.input_width;
  for (std::size_t i = 0; i < cfg_.hidden_layers; ++i) {
    stack_.emplace_back("fcn" + std::to_string(i), cfg_.hidden_dim, in, math::Activation::ReLU);
    in = cfg_.hidden_dim;
  }
  stack_.emplace_back("fcn_out", 1, in, math::Activation::Identity);
  std::mt19937_64 rng(cfg_.init_seed);
  for (math::DenseLayer& l : stack_) l.init(rng);
}

double FcnModel::predict(const sample::FlatSample& s) const {
  require(s.features.size() == cfg_.input_width,
          "fcn_predict: input width " + std::to_string(s.features.size()) + " != " +
              std::to_string(cfg_.input_width));
  Vec h = s.features;
  for (const math::DenseLayer& l : stack_) h = l.forward(h);
  return h[0];
}

math::NodeId FcnModel::forward(math::Tape& tape, const sample::FlatSample& s,
                               std::mt19937_64* dropout_rng) {
  require(s.features.size() == cfg_.input_width,
          "fcn forward: input width " + std::to_string(s.features.size()) + " != " +
              std::to_string(cfg_.input_width));
  const bool training_dropout = dropout_rng != nullptr && cfg_.dropout_rate > 0.0;
  math::NodeId h = tape.leaf(s.features);
  for (std::size_t i = 0; i < stack_.size(); ++i) {
    h = stack_[i].forward(tape, h);
    if (training_dropout && i + 1 < stack_.size()) {
      h = math::dropout_forward(tape, h, cfg_.dropout_rate, true, *dropout_rng);
    }
  }
  return h;
}

std::vector<math::ParamBlock*> FcnModel::parameters() {
  std::vector<math::ParamBlock*> out;
  for (math::DenseLayer& l : stack_) {
    out.push_back(&l.weights);
    out.push_back(&l.bias);
  }
  return out;
}

}  // namespace anet::model

#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "anet/math/tape.hpp"

namespace anet::math {

enum class Activation { ReLU, Identity };

// Fully-connected layer y = act(W x + b), W is out_dim x in_dim.
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(std::string name, std::size_t out_dim, std::size_t in_dim, Activation act);

  // Glorot-uniform init in +-sqrt(6 / (fan_in + fan_out)).
  void init(std::mt19937_64& rng);

  std::size_t in_dim() const { return weights.cols; }
  std::size_t out_dim() const { return weights.rows; }
  Activation activation() const { return act_; }

  Vec forward(std::span<const double> input) const;
  NodeId forward(Tape& tape, NodeId input);

  std::vector<ParamBlock*> parameters() { return {&weights, &bias}; }

  ParamBlock weights;
  ParamBlock bias;

 private:
  Activation act_ = Activation::Identity;
};

// Standard LSTM cell. Four gate weight matrices of shape
// hidden_dim x (input_dim + hidden_dim) acting on [x ; h_prev], plus one
// bias vector per gate. Initial hidden and cell state are zeros; the empty
// sequence returns the initial hidden state unchanged.
class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(std::string name, std::size_t input_dim, std::size_t hidden_dim);

  // Glorot-uniform weights; forget-gate bias starts at 1.0, others at 0.
  void init(std::mt19937_64& rng);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }

  Vec forward(std::span<const Vec> sequence) const;

  struct State {
    NodeId hidden;
    NodeId cell;
  };
  State initial_state(Tape& tape) const;
  State step(Tape& tape, NodeId input, State prev);
  NodeId forward(Tape& tape, std::span<const NodeId> sequence);

  std::vector<ParamBlock*> parameters() {
    return {&w_input, &w_forget, &w_candidate, &w_output,
            &b_input, &b_forget, &b_candidate, &b_output};
  }

  ParamBlock w_input, w_forget, w_candidate, w_output;
  ParamBlock b_input, b_forget, b_candidate, b_output;

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
};

// Inverted dropout. Training mode zeroes each element with probability
// `rate` and scales survivors by 1/(1-rate); inference is the identity.
Vec dropout_forward(std::span<const double> input, double rate, bool training, std::mt19937_64& rng);
NodeId dropout_forward(Tape& tape, NodeId input, double rate, bool training, std::mt19937_64& rng);

}  // namespace anet::math

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "anet/common.hpp"

namespace anet::math {

// One named block of trainable parameters with a gradient slot of the same
// shape. Matrices are row-major (rows x cols); vectors have cols == 1.
struct ParamBlock {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 1;
  Vec value;
  Vec grad;
  bool regularize = true;  // false for biases: L1 skips them

  ParamBlock() = default;
  ParamBlock(std::string name_, std::size_t rows_, std::size_t cols_, bool regularize_ = true)
      : name(std::move(name_)),
        rows(rows_),
        cols(cols_),
        value(rows_ * cols_, 0.0),
        grad(rows_ * cols_, 0.0),
        regularize(regularize_) {}

  std::size_t size() const { return value.size(); }
  double& at(std::size_t r, std::size_t c) { return value[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return value[r * cols + c]; }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

inline void zero_grads(std::span<ParamBlock* const> params) {
  for (ParamBlock* p : params) p->zero_grad();
}

struct NodeId {
  std::uint32_t index = UINT32_MAX;
  bool valid() const { return index != UINT32_MAX; }
};

// Records primitive operations during a forward pass and replays their
// backward closures in exact reverse order. Activation values live on the
// tape; parameter gradients accumulate into the owning ParamBlock, so a
// block used several times (shared encoder layer, recurrent unrolling)
// collects contributions from every use.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  NodeId leaf(Vec value) {
    values_.push_back(std::move(value));
    grads_.emplace_back(values_.back().size(), 0.0);
    return NodeId{static_cast<std::uint32_t>(values_.size() - 1)};
  }

  NodeId zeros(std::size_t n) { return leaf(Vec(n, 0.0)); }

  const Vec& value(NodeId id) const { return values_[id.index]; }
  Vec& grad(NodeId id) { return grads_[id.index]; }

  void record(std::function<void()> backward_op) { ops_.push_back(std::move(backward_op)); }

  // Seeds d(loss)/d(loss) = 1 and runs every recorded backward closure in
  // reverse recording order.
  void backward(NodeId scalar_loss) {
    require(value(scalar_loss).size() == 1, "tape backward: loss node must be scalar");
    grads_[scalar_loss.index][0] = 1.0;
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
  }

  void reset() {
    values_.clear();
    grads_.clear();
    ops_.clear();
  }

  std::size_t num_ops() const { return ops_.size(); }
  std::size_t num_nodes() const { return values_.size(); }

 private:
  std::vector<Vec> values_;
  std::vector<Vec> grads_;
  std::vector<std::function<void()>> ops_;
};

// out = [a ; b]
NodeId concat(Tape& tape, NodeId a, NodeId b);

// Mean squared error over a batch of scalar predictions:
//   L = (1/B) * sum_i (pred_i - target_i)^2
NodeId mse_loss(Tape& tape, std::span<const NodeId> predictions, std::span<const double> targets);

}  // namespace anet::math

#include "anet/math/tape.hpp"

#include <algorithm>

namespace anet::math {

NodeId concat(Tape& tape, NodeId a, NodeId b) {
  const Vec& va = tape.value(a);
  const Vec& vb = tape.value(b);
  Vec out;
  out.reserve(va.size() + vb.size());
  out.insert(out.end(), va.begin(), va.end());
  out.insert(out.end(), vb.begin(), vb.end());
  NodeId id = tape.leaf(std::move(out));
  tape.record([&tape, a, b, id]() {
    const Vec& d = tape.grad(id);
    Vec& da = tape.grad(a);
    Vec& db = tape.grad(b);
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += d[i];
    for (std::size_t i = 0; i < db.size(); ++i) db[i] += d[da.size() + i];
  });
  return id;
}

NodeId mse_loss(Tape& tape, std::span<const NodeId> predictions, std::span<const double> targets) {
  require(predictions.size() == targets.size() && !predictions.empty(),
          "mse_loss: predictions and targets must be non-empty and equal-sized");
  const double inv_n = 1.0 / static_cast<double>(predictions.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    require(tape.value(predictions[i]).size() == 1, "mse_loss: predictions must be scalar nodes");
    const double d = tape.value(predictions[i])[0] - targets[i];
    loss += d * d;
  }
  loss *= inv_n;
  NodeId id = tape.leaf(Vec{loss});
  std::vector<NodeId> preds(predictions.begin(), predictions.end());
  Vec tgt(targets.begin(), targets.end());
  tape.record([&tape, preds = std::move(preds), tgt = std::move(tgt), inv_n, id]() {
    const double dl = tape.grad(id)[0];
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const double d = tape.value(preds[i])[0] - tgt[i];
      tape.grad(preds[i])[0] += dl * 2.0 * inv_n * d;
    }
  });
  return id;
}

}  // namespace anet::math

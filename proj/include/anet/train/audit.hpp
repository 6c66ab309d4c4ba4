#pragma once

#include "anet/math/gradcheck.hpp"
#include "anet/model/adaptivenet.hpp"

namespace anet::train {

struct GradientAuditResult {
  double max_rel_error = 0.0;
  std::string worst_case;
  std::size_t checks_run = 0;
  bool passed = false;
  std::vector<std::string> lines;  // one human-readable line per check
};

// Finite-difference audit of every differentiable building block and of
// the assembled model with the shared encoder layer enabled. Per seed:
// a ReLU/identity dense stack, an LSTM over a short sequence, and a
// compact full model; two seeds additionally run the full model at its
// default widths with a subsampled coordinate set.
GradientAuditResult gradient_audit(std::size_t n_seeds, double tolerance);

}  // namespace anet::train

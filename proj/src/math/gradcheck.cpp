#include "anet/math/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace anet::math {

GradCheckReport check_gradients(const std::function<double(bool with_grad)>& loss_fn,
                                std::span<ParamBlock* const> params,
                                const GradCheckOptions& options) {
  const double probe_a = loss_fn(false);
  const double probe_b = loss_fn(false);
  if (probe_a != probe_b) {
    throw ContractError("check_gradients: closure is non-deterministic (" +
                        std::to_string(probe_a) + " vs " + std::to_string(probe_b) + ")");
  }

  loss_fn(true);  // leaves analytic gradients in the blocks
  std::vector<Vec> analytic;
  analytic.reserve(params.size());
  std::size_t total = 0;
  for (const ParamBlock* p : params) {
    analytic.push_back(p->grad);
    total += p->size();
  }

  // (block, coord) pairs to probe
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  if (total <= options.max_coords) {
    coords.reserve(total);
    for (std::size_t b = 0; b < params.size(); ++b) {
      for (std::size_t i = 0; i < params[b]->size(); ++i) coords.emplace_back(b, i);
    }
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, total - 1);
    std::vector<std::size_t> flat(options.max_coords);
    for (std::size_t& f : flat) f = pick(rng);
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    std::size_t b = 0, offset = 0;
    coords.reserve(flat.size());
    for (std::size_t f : flat) {
      while (f - offset >= params[b]->size()) {
        offset += params[b]->size();
        ++b;
      }
      coords.emplace_back(b, f - offset);
    }
  }

  GradCheckReport report;
  report.tolerance = options.tolerance;
  const double h = options.fd_step;
  const double base = probe_a;
  auto rel_err = [](double a, double n) {
    return std::abs(a - n) / std::max(1.0, std::abs(a) + std::abs(n));
  };
  auto eval_at = [&](ParamBlock& p, std::size_t i, double value) {
    const double saved = p.value[i];
    p.value[i] = value;
    const double loss = loss_fn(false);
    p.value[i] = saved;
    return loss;
  };
  for (const auto& [b, i] : coords) {
    ParamBlock& p = *params[b];
    const double saved = p.value[i];
    const double up = eval_at(p, i, saved + h);
    const double down = eval_at(p, i, saved - h);
    const double forward = (up - base) / h;
    const double backward = (base - down) / h;
    const double a = analytic[b][i];

    double rel;
    if (rel_err(forward, backward) > options.kink_threshold) {
      // slope break inside (x-h, x+h): the subgradient must match one of
      // the one-sided slopes
      ++report.coords_kink_adjacent;
      rel = std::min(rel_err(a, forward), rel_err(a, backward));
    } else {
      const double up_fine = eval_at(p, i, saved + h / 4.0);
      const double down_fine = eval_at(p, i, saved - h / 4.0);
      rel = rel_err(a, (up_fine - down_fine) / (h / 2.0));
    }
    ++report.coords_checked;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_block = p.name;
      report.worst_coord = i;
    }
  }

  // restore the analytic gradients so callers can inspect them afterwards
  for (std::size_t b = 0; b < params.size(); ++b) params[b]->grad = analytic[b];

  report.passed = report.max_rel_error < options.tolerance && report.coords_checked > 0;
  return report;
}

}  // namespace anet::math

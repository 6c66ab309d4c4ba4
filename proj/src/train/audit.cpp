#include "anet/train/audit.hpp"

#include <random>

namespace anet::train {

using math::Activation;
using math::DenseLayer;
using math::GradCheckOptions;
using math::GradCheckReport;
using math::LstmCell;
using math::NodeId;
using math::ParamBlock;
using math::Tape;
using sample::StructuredSample;
using sample::TimedEvent;

namespace {

Vec random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

StructuredSample random_sample(const model::AdaptiveNetConfig& cfg, std::size_t n_visits,
                               std::size_t n_meds, std::mt19937_64& rng) {
  StructuredSample s;
  s.patient_vec = random_vec(cfg.patient_width, rng);
  std::int32_t day = 18000;
  for (std::size_t i = 0; i < n_visits; ++i) {
    day += static_cast<std::int32_t>(1 + rng() % 120);
    s.visit_events.push_back(TimedEvent{data::Date{day}, random_vec(cfg.visit_width, rng)});
  }
  day = 18030;
  for (std::size_t i = 0; i < n_meds; ++i) {
    day += static_cast<std::int32_t>(1 + rng() % 200);
    s.med_events.push_back(TimedEvent{data::Date{day}, random_vec(cfg.med_width, rng)});
  }
  return s;
}

GradCheckReport check_dense_stack(std::uint64_t seed, Activation act) {
  std::mt19937_64 rng(seed);
  DenseLayer a("a", 4 + seed % 3, 3 + seed % 4, act);
  a.init(rng);
  DenseLayer b("b", 1, a.out_dim(), Activation::Identity);
  b.init(rng);
  const std::vector<Vec> inputs{random_vec(a.in_dim(), rng), random_vec(a.in_dim(), rng)};
  const std::vector<double> targets{0.4, -0.7};

  std::vector<ParamBlock*> params = a.parameters();
  for (ParamBlock* p : b.parameters()) params.push_back(p);
  auto closure = [&](bool with_grad) -> double {
    if (!with_grad) {
      double loss = 0.0;
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        const double d = b.forward(a.forward(inputs[i]))[0] - targets[i];
        loss += d * d;
      }
      return loss / 2.0;
    }
    Tape tape;
    std::vector<NodeId> preds;
    for (const Vec& x : inputs) preds.push_back(b.forward(tape, a.forward(tape, tape.leaf(x))));
    NodeId loss = math::mse_loss(tape, preds, targets);
    math::zero_grads(params);
    tape.backward(loss);
    return tape.value(loss)[0];
  };
  return math::check_gradients(closure, params);
}

GradCheckReport check_lstm(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LstmCell cell("lstm", 3, 4);
  cell.init(rng);
  DenseLayer head("head", 1, 4, Activation::Identity);
  head.init(rng);
  std::vector<Vec> seq;
  for (int t = 0; t < 6; ++t) seq.push_back(random_vec(3, rng));
  const std::vector<double> targets{0.3};

  std::vector<ParamBlock*> params = cell.parameters();
  for (ParamBlock* p : head.parameters()) params.push_back(p);
  auto closure = [&](bool with_grad) -> double {
    if (!with_grad) {
      const double d = head.forward(cell.forward(seq))[0] - targets[0];
      return d * d;
    }
    Tape tape;
    std::vector<NodeId> nodes;
    for (const Vec& x : seq) nodes.push_back(tape.leaf(x));
    std::vector<NodeId> preds{head.forward(tape, cell.forward(tape, nodes))};
    NodeId loss = math::mse_loss(tape, preds, targets);
    math::zero_grads(params);
    tape.backward(loss);
    return tape.value(loss)[0];
  };
  return math::check_gradients(closure, params);
}

GradCheckReport check_full_model(std::uint64_t seed, const model::AdaptiveNetConfig& cfg,
                                 std::size_t max_coords) {
  model::AdaptiveNet net(cfg);
  std::mt19937_64 rng(seed + 7);
  // two-patient micro-batch
  std::vector<StructuredSample> batch{random_sample(cfg, 3, 2, rng),
                                      random_sample(cfg, 2, 1, rng)};
  const std::vector<double> targets{0.5, -0.9};

  auto params = net.parameters();
  auto closure = [&](bool with_grad) -> double {
    if (!with_grad) {
      double loss = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const double d = net.predict(batch[i]) - targets[i];
        loss += d * d;
      }
      return loss / 2.0;
    }
    Tape tape;
    std::vector<NodeId> preds;
    for (const auto& s : batch) preds.push_back(net.forward(tape, s));
    NodeId loss = math::mse_loss(tape, preds, targets);
    math::zero_grads(params);
    tape.backward(loss);
    return tape.value(loss)[0];
  };
  GradCheckOptions opt;
  opt.max_coords = max_coords;
  opt.seed = seed;
  return math::check_gradients(closure, params, opt);
}

}  // namespace

GradientAuditResult gradient_audit(std::size_t n_seeds, double tolerance) {
  GradientAuditResult result;
  auto record = [&result](const std::string& name, const GradCheckReport& report) {
    ++result.checks_run;
    result.lines.push_back(name + ": max rel error " + std::to_string(report.max_rel_error) +
                           " over " + std::to_string(report.coords_checked) + " coords, " +
                           std::to_string(report.coords_kink_adjacent) +
                           " kink-adjacent (worst " + report.worst_block + ")");
    if (report.max_rel_error > result.max_rel_error) {
      result.max_rel_error = report.max_rel_error;
      result.worst_case = name + "/" + report.worst_block;
    }
  };

  model::AdaptiveNetConfig compact;
  compact.visit_width = 6;
  compact.med_width = 5;
  compact.patient_width = 3;
  compact.latent_dim = 8;
  compact.lstm_hidden_dim = 7;
  compact.rho_hidden_dim = 8;
  compact.share_encoder_last_layer = true;

  for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
    record("dense-relu seed " + std::to_string(seed), check_dense_stack(seed, Activation::ReLU));
    record("dense-identity seed " + std::to_string(seed),
           check_dense_stack(seed, Activation::Identity));
    record("lstm seed " + std::to_string(seed), check_lstm(seed));
    model::AdaptiveNetConfig cfg = compact;
    cfg.init_seed = seed;
    record("adaptivenet seed " + std::to_string(seed), check_full_model(seed, cfg, 500));
  }

  // two seeds at the default widths, subsampled
  for (std::uint64_t seed = 1; seed <= std::min<std::size_t>(2, n_seeds); ++seed) {
    model::AdaptiveNetConfig full;  // default 100-wide config
    full.share_encoder_last_layer = true;
    full.init_seed = seed;
    record("adaptivenet-default-widths seed " + std::to_string(seed),
           check_full_model(seed, full, 300));
  }

  result.passed = result.max_rel_error < tolerance;
  return result;
}

}  // namespace anet::train

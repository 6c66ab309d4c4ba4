#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "anet/math/gradcheck.hpp"
#include "anet/model/checkpoint.hpp"
#include "oracles/model_ref.hpp"

using namespace anet;
using namespace anet::data;
using namespace anet::math;
using namespace anet::model;
using namespace anet::sample;

namespace {

Vec random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Vec v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

// Small dims keep the scalar oracle and gradient checks fast.
AdaptiveNetConfig small_config(bool share = false) {
  AdaptiveNetConfig cfg;
  cfg.visit_width = 5;
  cfg.med_width = 4;
  cfg.patient_width = 3;
  cfg.latent_dim = 6;
  cfg.lstm_hidden_dim = 5;
  cfg.rho_hidden_dim = 6;
  cfg.share_encoder_last_layer = share;
  cfg.init_seed = 11;
  return cfg;
}

StructuredSample random_sample(const AdaptiveNetConfig& cfg, std::size_t n_visits,
                               std::size_t n_meds, std::mt19937_64& rng) {
  StructuredSample s;
  s.patient_id = "x";
  s.patient_vec = random_vec(cfg.patient_width, rng);
  std::int32_t day = 18000;
  for (std::size_t i = 0; i < n_visits; ++i) {
    day += static_cast<std::int32_t>(1 + rng() % 90);
    s.visit_events.push_back(TimedEvent{Date{day}, random_vec(cfg.visit_width, rng)});
  }
  day = 18010;
  for (std::size_t i = 0; i < n_meds; ++i) {
    day += static_cast<std::int32_t>(1 + rng() % 140);
    s.med_events.push_back(TimedEvent{Date{day}, random_vec(cfg.med_width, rng)});
  }
  if (!s.visit_events.empty()) s.anchor_time = s.visit_events.back().time;
  s.delta_t = 0.5;
  return s;
}

void zero_params(std::vector<ParamBlock*> params) {
  for (ParamBlock* p : params) std::fill(p->value.begin(), p->value.end(), 0.0);
}

void copy_block(std::vector<ParamBlock*> params, const std::string& from_name,
                std::vector<ParamBlock*> into, const std::string& to_name) {
  const ParamBlock* src = nullptr;
  for (const ParamBlock* p : params) {
    if (p->name == from_name) src = p;
  }
  ParamBlock* dst = nullptr;
  for (ParamBlock* p : into) {
    if (p->name == to_name) dst = p;
  }
  REQUIRE(src != nullptr);
  REQUIRE(dst != nullptr);
  REQUIRE(src->size() == dst->size());
  dst->value = src->value;
}

}  // namespace

TEST_CASE("psi_pool: no events gives the zero hidden state") {
  AdaptiveNet net(small_config());
  const Vec h = net.psi_pool({}, {});
  REQUIRE(h.size() == 5);
  for (double x : h) CHECK(x == 0.0);
}

TEST_CASE("psi_pool: output is bit-identical under input permutations") {
  const AdaptiveNetConfig cfg = small_config(true);
  AdaptiveNet net(cfg);
  std::mt19937_64 rng(3);
  StructuredSample s = random_sample(cfg, 4, 3, rng);
  // force ties: a med on a visit day and two meds sharing a day
  s.med_events[0].time = s.visit_events[1].time;
  s.med_events[1].time = s.med_events[2].time;

  const double base = net.predict(s);
  std::mt19937_64 shuffle_rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    StructuredSample p = s;
    std::shuffle(p.visit_events.begin(), p.visit_events.end(), shuffle_rng);
    std::shuffle(p.med_events.begin(), p.med_events.end(), shuffle_rng);
    CHECK(net.predict(p) == base);
  }
}

TEST_CASE("psi_pool: one visit plus one med equals a hand-chained two-step LSTM") {
  const AdaptiveNetConfig cfg = small_config();
  AdaptiveNet net(cfg);
  std::mt19937_64 rng(5);
  const TimedEvent visit{Date{18100}, random_vec(cfg.visit_width, rng)};
  const TimedEvent med{Date{18200}, random_vec(cfg.med_width, rng)};

  const std::vector<TimedEvent> visits{visit};
  const std::vector<TimedEvent> meds{med};
  const Vec got = net.psi_pool(visits, meds);

  const oracle::ParamView pv(net.parameters());
  oracle::LstmWeights w;
  w.wi = pv.mat("lstm.wi");
  w.wf = pv.mat("lstm.wf");
  w.wg = pv.mat("lstm.wg");
  w.wo = pv.mat("lstm.wo");
  w.bi = pv.vec("lstm.bi");
  w.bf = pv.vec("lstm.bf");
  w.bg = pv.vec("lstm.bg");
  w.bo = pv.vec("lstm.bo");
  const std::vector<Vec> latents{net.encode_visit_latent(visit.features),
                                 net.encode_med_latent(med.features)};
  const Vec expect = oracle::lstm_ref(w, latents, cfg.lstm_hidden_dim);
  CHECK(oracle::max_rel_diff(expect, got) < 1e-12);
}

TEST_CASE("psi_pool: visit precedes medication on equal timestamps") {
  const AdaptiveNetConfig cfg = small_config();
  AdaptiveNet net(cfg);
  std::mt19937_64 rng(7);
  const TimedEvent visit{Date{18100}, random_vec(cfg.visit_width, rng)};
  const TimedEvent med{Date{18100}, random_vec(cfg.med_width, rng)};
  const std::vector<TimedEvent> visits{visit};
  const std::vector<TimedEvent> meds{med};

  const oracle::ParamView pv(net.parameters());
  oracle::LstmWeights w;
  w.wi = pv.mat("lstm.wi");
  w.wf = pv.mat("lstm.wf");
  w.wg = pv.mat("lstm.wg");
  w.wo = pv.mat("lstm.wo");
  w.bi = pv.vec("lstm.bi");
  w.bf = pv.vec("lstm.bf");
  w.bg = pv.vec("lstm.bg");
  w.bo = pv.vec("lstm.bo");
  const std::vector<Vec> visit_first{net.encode_visit_latent(visit.features),
                                     net.encode_med_latent(med.features)};
  const Vec expect = oracle::lstm_ref(w, visit_first, cfg.lstm_hidden_dim);
  CHECK(oracle::max_rel_diff(expect, net.psi_pool(visits, meds)) < 1e-12);
}

TEST_CASE("psi_pool rejects width mismatches") {
  AdaptiveNet net(small_config());
  const std::vector<TimedEvent> bad{TimedEvent{Date{18100}, Vec{1.0, 2.0}}};
  CHECK_THROWS_AS((void)net.psi_pool(bad, {}), ContractError);
}

TEST_CASE("predict: all-zero parameters give zero output") {
  const AdaptiveNetConfig cfg = small_config(true);
  AdaptiveNet net(cfg);
  zero_params(net.parameters());
  std::mt19937_64 rng(9);
  for (std::size_t n = 0; n < 4; ++n) {
    const StructuredSample s = random_sample(cfg, n, n / 2, rng);
    CHECK(net.predict(s) == 0.0);
  }
}

TEST_CASE("predict: patient vector reaches only the head") {
  const AdaptiveNetConfig cfg = small_config();
  AdaptiveNet net(cfg);
  std::mt19937_64 rng(13);
  StructuredSample a = random_sample(cfg, 3, 1, rng);
  StructuredSample b = a;
  b.patient_vec = random_vec(cfg.patient_width, rng);
  CHECK(net.psi_pool(a.visit_events, a.med_events) == net.psi_pool(b.visit_events, b.med_events));
  CHECK(net.predict(a) != net.predict(b));
}

TEST_CASE("predict matches the independent scalar reimplementation") {
  for (const bool share : {false, true}) {
    const AdaptiveNetConfig cfg = small_config(share);
    AdaptiveNet net(cfg);
    std::mt19937_64 rng(share ? 31 : 37);
    for (int trial = 0; trial < 5; ++trial) {
      const StructuredSample s = random_sample(cfg, 1 + trial, trial / 2, rng);
      const double expect = oracle::adaptivenet_ref(net, s);
      const double got = net.predict(s);
      CHECK(oracle::rel_diff(expect, got) < 1e-12);
    }
  }
}

TEST_CASE("predict handles 0, 1 and 120 events without padding") {
  const AdaptiveNetConfig cfg = small_config(true);
  AdaptiveNet net(cfg);
  std::mt19937_64 rng(41);
  for (const std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{120}}) {
    const StructuredSample s = random_sample(cfg, n, n / 3, rng);
    const double y = net.predict(s);
    CHECK(std::isfinite(y));
  }
}

TEST_CASE("training forward equals inference forward") {
  const AdaptiveNetConfig cfg = small_config(true);
  AdaptiveNet net(cfg);
  std::mt19937_64 rng(43);
  const StructuredSample s = random_sample(cfg, 3, 2, rng);
  Tape tape;
  const NodeId pred = net.forward(tape, s);
  CHECK(oracle::rel_diff(tape.value(pred)[0], net.predict(s)) < 1e-15);
}

TEST_CASE("predict_absolute: current score plus predicted change") {
  const AdaptiveNetConfig cfg = small_config();
  AdaptiveNet net(cfg);
  std::mt19937_64 rng(47);
  const StructuredSample s = random_sample(cfg, 2, 1, rng);
  const double change = net.predict(s);
  CHECK(predict_absolute(net, s, 3.0) == doctest::Approx(3.0 + change));
  CHECK(predict_absolute(net, s, 3.0) - 3.0 == change);

  AdaptiveNet zero(cfg);
  zero_params(zero.parameters());
  CHECK(predict_absolute(zero, s, 2.4) == 2.4);
}

TEST_CASE("naive predictor is always zero") {
  const AdaptiveNetConfig cfg = small_config();
  std::mt19937_64 rng(53);
  CHECK(naive_predict(random_sample(cfg, 3, 2, rng)) == 0.0);
  CHECK(naive_predict(random_sample(cfg, 0, 0, rng)) == 0.0);
}

TEST_CASE("shared last layer accumulates gradients from both encoder paths") {
  // the shared layer's gradient must equal the sum of the two layer
  // gradients of an unshared clone with identical weights
  const AdaptiveNetConfig shared_cfg = small_config(true);
  AdaptiveNet shared_net(shared_cfg);

  AdaptiveNetConfig clone_cfg = small_config(false);
  clone_cfg.encoder_hidden_layers = 2;
  AdaptiveNet clone_net(clone_cfg);

  auto sp = shared_net.parameters();
  auto cp = clone_net.parameters();
  copy_block(sp, "phi_visit0.w", cp, "phi_visit0.w");
  copy_block(sp, "phi_visit0.b", cp, "phi_visit0.b");
  copy_block(sp, "phi_med0.w", cp, "phi_med0.w");
  copy_block(sp, "phi_med0.b", cp, "phi_med0.b");
  copy_block(sp, "phi_shared.w", cp, "phi_visit1.w");
  copy_block(sp, "phi_shared.b", cp, "phi_visit1.b");
  copy_block(sp, "phi_shared.w", cp, "phi_med1.w");
  copy_block(sp, "phi_shared.b", cp, "phi_med1.b");
  for (const char* name : {"lstm.wi", "lstm.wf", "lstm.wg", "lstm.wo", "lstm.bi", "lstm.bf",
                           "lstm.bg", "lstm.bo", "rho0.w", "rho0.b", "rho1.w", "rho1.b",
                           "rho_out.w", "rho_out.b"}) {
    copy_block(sp, name, cp, name);
  }

  std::mt19937_64 rng(59);
  const StructuredSample s = random_sample(shared_cfg, 1, 1, rng);

  auto grad_of = [&s](AdaptiveNet& net, const std::string& block) {
    Tape tape;
    const NodeId pred = net.forward(tape, s);
    zero_grads(net.parameters());
    tape.backward(pred);
    for (const ParamBlock* p : net.parameters()) {
      if (p->name == block) return p->grad;
    }
    REQUIRE(false);
    return Vec{};
  };

  CHECK(oracle::rel_diff(shared_net.predict(s), clone_net.predict(s)) < 1e-15);

  const Vec shared_grad = grad_of(shared_net, "phi_shared.w");
  const Vec visit_grad = grad_of(clone_net, "phi_visit1.w");
  const Vec med_grad = grad_of(clone_net, "phi_med1.w");
  REQUIRE(shared_grad.size() == visit_grad.size());
  for (std::size_t i = 0; i < shared_grad.size(); ++i) {
    CHECK(shared_grad[i] == doctest::Approx(visit_grad[i] + med_grad[i]).epsilon(1e-10));
  }
}

TEST_CASE("full model gradient check stays under 1e-4") {
  const AdaptiveNetConfig cfg = small_config(true);
  AdaptiveNet net(cfg);
  std::mt19937_64 rng(61);
  std::vector<StructuredSample> batch{random_sample(cfg, 3, 2, rng),
                                      random_sample(cfg, 2, 0, rng)};
  const std::vector<double> targets{0.4, -0.8};

  auto params = net.parameters();
  auto closure = [&](bool with_grad) -> double {
    if (!with_grad) {
      double loss = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const double d = net.predict(batch[i]) - targets[i];
        loss += d * d;
      }
      return loss / static_cast<double>(batch.size());
    }
    Tape tape;
    std::vector<NodeId> preds;
    for (const auto& s : batch) preds.push_back(net.forward(tape, s));
    const NodeId loss = mse_loss(tape, preds, targets);
    zero_grads(params);
    tape.backward(loss);
    return tape.value(loss)[0];
  };

  const GradCheckReport report = check_gradients(closure, params);
  INFO("max rel error ", report.max_rel_error, " at ", report.worst_block);
  CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("default configuration: latent width 100 and med width 18") {
  AdaptiveNetConfig cfg;  // defaults
  cfg.init_seed = 1;
  AdaptiveNet net(cfg);
  std::mt19937_64 rng(67);
  const Vec visit_latent = net.encode_visit_latent(random_vec(cfg.visit_width, rng));
  const Vec med_latent = net.encode_med_latent(random_vec(cfg.med_width, rng));
  CHECK(visit_latent.size() == 100);
  CHECK(med_latent.size() == visit_latent.size());
  CHECK(cfg.med_width == 18);
  CHECK(cfg.visit_width == 33);
}

TEST_CASE("fcn: zero weights, determinism, and the scalar oracle") {
  FcnConfig cfg;
  cfg.input_width = 20;
  cfg.init_seed = 5;
  FcnModel net(cfg);

  std::mt19937_64 rng(71);
  FlatSample s;
  s.features = random_vec(20, rng);

  const double once = net.predict(s);
  CHECK(net.predict(s) == once);  // dropout is off at inference
  CHECK(oracle::rel_diff(oracle::fcn_ref(net, s), once) < 1e-12);

  FcnModel zero(cfg);
  zero_params(zero.parameters());
  CHECK(zero.predict(s) == 0.0);

  FlatSample bad;
  bad.features = random_vec(7, rng);
  CHECK_THROWS_AS((void)net.predict(bad), ContractError);
}

TEST_CASE("fcn gradient check") {
  FcnConfig cfg;
  cfg.input_width = 9;
  cfg.hidden_dim = 6;
  cfg.init_seed = 3;
  FcnModel net(cfg);
  std::mt19937_64 rng(73);
  std::vector<FlatSample> batch(2);
  batch[0].features = random_vec(9, rng);
  batch[1].features = random_vec(9, rng);
  const std::vector<double> targets{0.1, -0.4};

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
    const NodeId loss = mse_loss(tape, preds, targets);
    zero_grads(params);
    tape.backward(loss);
    return tape.value(loss)[0];
  };
  const GradCheckReport report = check_gradients(closure, params);
  CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("checkpoint: save/load round trip reproduces predictions exactly") {
  const AdaptiveNetConfig cfg = small_config(true);
  AdaptiveNet net(cfg);
  const data::FeatureScaler scaler = [] {
    data::FeatureScaler s;
    std::vector<PatientRecord> empty;
    s.fit(empty, 6.0);
    return s;
  }();
  CheckpointMeta meta;
  meta.config_hash = "cafe";
  meta.records_fingerprint = "beef";
  meta.train_seed = 7;
  meta.max_history_years = 5.0;

  const std::string path = "test_model_ckpt.json";
  save_checkpoint(path, net, scaler, meta);

  LoadedCheckpoint loaded = load_checkpoint(path);
  REQUIRE(loaded.kind == "adaptivenet");
  REQUIRE(loaded.adaptivenet.has_value());
  CHECK(loaded.meta.config_hash == "cafe");
  CHECK(loaded.meta.train_seed == 7);

  std::mt19937_64 rng(79);
  for (int i = 0; i < 5; ++i) {
    const StructuredSample s = random_sample(cfg, 2 + i, i, rng);
    CHECK(loaded.adaptivenet->predict(s) == net.predict(s));
  }

  // re-saving the loaded model is byte-identical
  const std::string path2 = "test_model_ckpt2.json";
  save_checkpoint(path2, *loaded.adaptivenet, loaded.scaler, loaded.meta);
  std::ifstream a(path), b(path2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("checkpoint: layout version mismatch fails loudly") {
  const AdaptiveNetConfig cfg = small_config();
  AdaptiveNet net(cfg);
  data::FeatureScaler scaler;
  std::vector<PatientRecord> empty;
  scaler.fit(empty, 6.0);
  const std::string path = "test_model_ckpt3.json";
  save_checkpoint(path, net, scaler, CheckpointMeta{});

  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  in.close();
  std::string text = buf.str();
  const auto pos = text.find("event-layout-v1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 15, "event-layout-v9");
  std::ofstream out(path, std::ios::trunc);
  out << text;
  out.close();

  try {
    (void)load_checkpoint(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("event-layout-v9") != std::string::npos);
    CHECK(msg.find("event-layout-v1") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("checkpoint: unreadable path and corrupt JSON raise DataError") {
  CHECK_THROWS_AS((void)load_checkpoint("does_not_exist.json"), DataError);
  const std::string path = "test_model_ckpt4.json";
  std::ofstream(path) << "{not json";
  CHECK_THROWS_AS((void)load_checkpoint(path), DataError);
  std::remove(path.c_str());
}

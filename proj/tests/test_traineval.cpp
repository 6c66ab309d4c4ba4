#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "anet/train/cv.hpp"
#include "anet/train/latent.hpp"

using namespace anet;
using namespace anet::data;
using namespace anet::math;
using namespace anet::sample;
using namespace anet::train;

namespace {

// O(n^2) pairwise concordance with ties counted 0.5; the oracle for the
// rank-based implementation.
std::optional<double> brute_auc(std::span<const double> scores, std::span<const int> labels) {
  double pairs = 0.0, win = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        win += 1.0;
      } else if (scores[i] == scores[j]) {
        win += 0.5;
      }
    }
  }
  if (pairs == 0.0) return std::nullopt;
  return win / pairs;
}

// single dense 1->1 unit so a full Adam step is hand-checkable
struct TinyModel {
  DenseLayer layer{"tiny", 1, 1, Activation::Identity};
  std::vector<ParamBlock*> parameters() { return layer.parameters(); }
  NodeId forward(Tape& tape, const FlatSample& s, std::mt19937_64*) {
    return layer.forward(tape, tape.leaf(s.features));
  }
};

synth::Cohort small_cohort(std::size_t n, std::uint64_t seed, double sigma = 0.5) {
  synth::SynthConfig cfg;
  cfg.n_patients = n;
  cfg.seed = seed;
  cfg.noise_sigma = sigma;
  return synth::generate_cohort(cfg);
}

PipelineConfig naive_pipeline(std::size_t folds = 5) {
  PipelineConfig cfg;
  cfg.kind = ModelKind::Naive;
  cfg.folds = folds;
  cfg.train.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("mse: exact identities") {
  const Vec a{1.0, -2.0, 0.5};
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(Vec{0.0, 0.0}, Vec{1.0, -1.0}) == 1.0);
  // naive-predictor identity: mse(0, y) = mean(y^2)
  const Vec y{0.3, -1.2, 2.0, 0.0};
  double mean_sq = 0.0;
  for (double v : y) mean_sq += v * v;
  mean_sq /= 4.0;
  CHECK(mse(Vec{0.0, 0.0, 0.0, 0.0}, y) == doctest::Approx(mean_sq));
}

TEST_CASE("auc: worked example with 3 of 4 concordant pairs") {
  const Vec scores{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> labels{0, 0, 1, 1};
  const auto auc = auc_score(scores, labels);
  REQUIRE(auc.has_value());
  CHECK(*auc == doctest::Approx(0.75));
}

TEST_CASE("auc: perfect, constant, and single-class inputs") {
  const auto perfect = auc_score(Vec{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1});
  REQUIRE(perfect.has_value());
  CHECK(*perfect == 1.0);

  const auto constant = auc_score(Vec{0.5, 0.5, 0.5, 0.5}, std::vector<int>{0, 1, 0, 1});
  REQUIRE(constant.has_value());
  CHECK(*constant == 0.5);

  CHECK(!auc_score(Vec{0.1, 0.9}, std::vector<int>{1, 1}).has_value());
  CHECK(!auc_score(Vec{0.1, 0.9}, std::vector<int>{0, 0}).has_value());
}

TEST_CASE("auc equals brute-force pairwise concordance on random sets") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    Vec scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid forces plenty of ties
      scores[i] = std::floor(unit(rng) * 8.0) / 8.0;
      labels[i] = rng() % 2;
    }
    const auto got = auc_score(scores, labels);
    const auto expect = brute_auc(scores, labels);
    REQUIRE(got.has_value() == expect.has_value());
    if (got) CHECK(*got == doctest::Approx(*expect).epsilon(1e-12));
  }
}

TEST_CASE("classification: boundary value counts as active disease") {
  // predicted exactly at the threshold, truly in remission -> wrong
  ClassificationResult r = classify_and_score(Vec{2.6}, Vec{2.59});
  CHECK(r.accuracy == 0.0);
  // predicted just below, truly at the threshold (active) -> wrong
  r = classify_and_score(Vec{2.59}, Vec{2.6});
  CHECK(r.accuracy == 0.0);
  // both exactly at the threshold -> both active -> correct
  r = classify_and_score(Vec{2.6}, Vec{2.6});
  CHECK(r.accuracy == 1.0);
}

TEST_CASE("classification: perfect predictor scores 1.0 accuracy and AUC") {
  const Vec truth{1.5, 2.0, 3.0, 4.5, 2.59, 2.61};
  const ClassificationResult r = classify_and_score(truth, truth);
  CHECK(r.accuracy == 1.0);
  REQUIRE(r.auc.has_value());
  CHECK(*r.auc == 1.0);
}

TEST_CASE("train: zero labels drive the loss toward zero") {
  model::FcnConfig fc;
  fc.input_width = 4;
  fc.hidden_dim = 6;
  fc.hidden_layers = 2;
  fc.dropout_rate = 0.0;
  fc.init_seed = 5;
  model::FcnModel net(fc);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<FlatSample> samples(32);
  for (auto& s : samples) {
    s.features = {unit(rng), unit(rng), unit(rng), unit(rng)};
    s.label = 0.0;
  }

  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.steps = 400;
  cfg.learning_rate = 1e-2;
  cfg.l1_coeff = 0.0;
  cfg.seed = 1;
  const TrainResult result = anet::train::train(net, std::span<const FlatSample>(samples), cfg);

  double head = 0.0, tail = 0.0;
  for (int i = 0; i < 20; ++i) {
    head += result.loss_trace[static_cast<std::size_t>(i)];
    tail += result.loss_trace[result.loss_trace.size() - 1 - static_cast<std::size_t>(i)];
  }
  CHECK(tail < 0.1 * head);
  CHECK(result.loss_trace.back() < 1e-3);
}

TEST_CASE("train: one step on a batch of one matches the hand-computed Adam update") {
  TinyModel net;
  net.layer.weights.value = {0.5};
  net.layer.bias.value = {0.0};

  std::vector<FlatSample> samples(1);
  samples[0].features = {2.0};
  samples[0].label = 3.0;

  TrainConfig cfg;
  cfg.batch_size = 1;
  cfg.steps = 1;
  cfg.learning_rate = 0.1;
  cfg.l1_coeff = 0.0;
  cfg.seed = 0;
  const TrainResult result = anet::train::train(net, std::span<const FlatSample>(samples), cfg);

  // initial loss: (0.5 * 2 + 0 - 3)^2 = 4
  REQUIRE(result.loss_trace.size() == 1);
  CHECK(result.loss_trace[0] == doctest::Approx(4.0));

  // hand-evaluated bias-corrected Adam step on dW = -8, db = -4
  auto adam_first_step = [](double param, double grad, double lr) {
    const double m_hat = grad;                    // m / (1 - beta1)
    const double v_hat = grad * grad;             // v / (1 - beta2)
    return param - lr * m_hat / (std::sqrt(v_hat) + 1e-8);
  };
  const double w1 = adam_first_step(0.5, -8.0, 0.1);
  const double b1 = adam_first_step(0.0, -4.0, 0.1);
  CHECK(net.layer.weights.value[0] == doctest::Approx(w1).epsilon(1e-12));
  CHECK(net.layer.bias.value[0] == doctest::Approx(b1).epsilon(1e-12));

  // the post-step loss is then computable in closed form
  Tape tape;
  const NodeId pred = net.forward(tape, samples[0], nullptr);
  const double expected_loss = (w1 * 2.0 + b1 - 3.0) * (w1 * 2.0 + b1 - 3.0);
  CHECK((tape.value(pred)[0] - 3.0) * (tape.value(pred)[0] - 3.0) ==
        doctest::Approx(expected_loss).epsilon(1e-12));
}

TEST_CASE("train: reported loss equals an independent recomputation") {
  model::FcnConfig fc;
  fc.input_width = 3;
  fc.hidden_dim = 4;
  fc.hidden_layers = 2;
  fc.dropout_rate = 0.0;
  fc.init_seed = 9;
  model::FcnModel trained(fc);
  model::FcnModel reference(fc);  // identical init, never trained

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<FlatSample> samples(6);
  for (auto& s : samples) {
    s.features = {unit(rng), unit(rng), unit(rng)};
    s.label = unit(rng);
  }

  TrainConfig cfg;
  cfg.batch_size = samples.size();  // one batch covers every sample
  cfg.steps = 1;
  cfg.learning_rate = 1e-3;
  cfg.l1_coeff = 1e-3;
  cfg.seed = 4;
  const TrainResult result = anet::train::train(trained, std::span<const FlatSample>(samples), cfg);

  double expected = 0.0;
  for (const auto& s : samples) {
    const double d = reference.predict(s) - s.label;
    expected += d * d;
  }
  expected /= static_cast<double>(samples.size());
  double l1 = 0.0;
  for (const ParamBlock* p : reference.parameters()) {
    if (!p->regularize) continue;
    for (double w : p->value) l1 += std::abs(w);
  }
  expected += cfg.l1_coeff * l1;
  CHECK(std::abs(result.loss_trace[0] - expected) < 1e-10);
}

TEST_CASE("train: deterministic given the seed") {
  auto run = [](std::uint64_t seed) {
    model::FcnConfig fc;
    fc.input_width = 3;
    fc.init_seed = 2;
    model::FcnModel net(fc);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<FlatSample> samples(10);
    for (auto& s : samples) {
      s.features = {unit(rng), unit(rng), unit(rng)};
      s.label = unit(rng);
    }
    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.steps = 25;
    cfg.seed = seed;
    return anet::train::train(net, std::span<const FlatSample>(samples), cfg).loss_trace;
  };
  CHECK(run(7) == run(7));
  CHECK(run(7) != run(8));
}

TEST_CASE("train: non-finite loss aborts with the step index") {
  TinyModel net;
  net.layer.weights.value = {1e308};
  std::vector<FlatSample> samples(1);
  samples[0].features = {1e308};
  samples[0].label = 0.0;
  TrainConfig cfg;
  cfg.batch_size = 1;
  cfg.steps = 3;
  try {
    (void)anet::train::train(net, std::span<const FlatSample>(samples), cfg);
    FAIL("expected TrainError");
  } catch (const TrainError& e) {
    CHECK(std::string(e.what()).find("step 0") != std::string::npos);
  }
}

TEST_CASE("assign_folds: balanced seeded partition") {
  const auto folds = assign_folds(10, 5, 42);
  REQUIRE(folds.size() == 10);
  std::vector<int> counts(5, 0);
  for (const std::size_t f : folds) {
    REQUIRE(f < 5);
    ++counts[f];
  }
  for (const int c : counts) CHECK(c == 2);
  CHECK(assign_folds(10, 5, 42) == folds);
  CHECK(assign_folds(10, 5, 43) != folds);
}

TEST_CASE("crossvalidate: five naive folds over ten patients") {
  const synth::Cohort cohort = small_cohort(10, 17);
  const CvResult result = crossvalidate(cohort.records, naive_pipeline());
  REQUIRE(result.folds.size() == 5);
  for (const EvalReport& r : result.folds) {
    CHECK(r.n_samples > 0);
    CHECK(std::isfinite(r.mse));
    CHECK(r.history_years == 5.0);
  }
  // aggregate equals the sample-count weighted recomputation
  double n = 0.0, mse_sum = 0.0;
  for (const EvalReport& r : result.folds) {
    n += static_cast<double>(r.n_samples);
    mse_sum += static_cast<double>(r.n_samples) * r.mse;
  }
  CHECK(result.aggregate.mse == doctest::Approx(mse_sum / n).epsilon(1e-12));
  CHECK(result.aggregate.n_samples == static_cast<std::size_t>(n));
  CHECK(result.aggregate.fold == -1);
}

TEST_CASE("crossvalidate: a fold without validation samples fails loudly") {
  synth::Cohort cohort = small_cohort(8, 19);
  PipelineConfig cfg = naive_pipeline(4);
  // strip every score from two patients: whatever fold holds them can
  // still train, but validation on a fold of only these must fail
  cfg.folds = 4;
  const auto folds = assign_folds(cohort.records.size(), 4, derive_seed(cfg.train.seed, 0xF01Du));
  for (std::size_t i = 0; i < cohort.records.size(); ++i) {
    if (folds[i] == 2) {
      for (auto& v : cohort.records[i].visits) v.das28bsr_score.reset();
    }
  }
  try {
    (void)crossvalidate(cohort.records, cfg);
    FAIL("expected TrainError");
  } catch (const TrainError& e) {
    CHECK(std::string(e.what()).find("fold 2") != std::string::npos);
  }
}

TEST_CASE("fit_model: scaler and slot budgets derive from training records only") {
  synth::Cohort cohort = small_cohort(8, 23);
  // give one patient an absurd outlier
  cohort.records[0].visits[0].crp = 10000.0;

  std::vector<PatientRecord> without_outlier(cohort.records.begin() + 1, cohort.records.end());
  PipelineConfig cfg = naive_pipeline();
  const FittedModel fitted = fit_model(without_outlier, cfg, 0);
  CHECK(fitted.scaler.range("visit.crp").max < 10000.0);

  const FittedModel with_outlier = fit_model(cohort.records, cfg, 0);
  CHECK(with_outlier.scaler.range("visit.crp").max == 10000.0);
}

TEST_CASE("fit_model: fcn slot budgets equal the training-fold event maxima") {
  const synth::Cohort cohort = small_cohort(10, 47);
  std::vector<PatientRecord> train_records(cohort.records.begin(), cohort.records.begin() + 7);

  PipelineConfig cfg;
  cfg.kind = ModelKind::Fcn;
  cfg.train.batch_size = 16;
  cfg.train.steps = 3;
  cfg.train.seed = 2;
  FittedModel fitted = fit_model(train_records, cfg, 0);

  std::size_t n_max = 0, m_max = 0;
  const auto samples =
      generate_samples(train_records, cfg.train.sampling(), fitted.scaler);
  for (const auto& s : samples) {
    n_max = std::max(n_max, s.visit_events.size());
    m_max = std::max(m_max, s.med_events.size());
  }
  CHECK(fitted.n_max == n_max);
  CHECK(fitted.m_max == m_max);
  CHECK(fitted.fcn->config().input_width == flat_width(n_max, m_max));

  // validation records with longer histories are truncated, not fatal
  std::vector<PatientRecord> val_records(cohort.records.begin() + 7, cohort.records.end());
  const auto report = evaluate_model(fitted, val_records, cfg.train, 0);
  CHECK(report.n_samples > 0);
}

TEST_CASE("crossvalidate: small adaptivenet run, threads do not change results") {
  const synth::Cohort cohort = small_cohort(12, 29);
  PipelineConfig cfg;
  cfg.kind = ModelKind::AdaptiveNet;
  cfg.folds = 3;
  cfg.hyper.latent_dim = 8;
  cfg.hyper.lstm_hidden_dim = 8;
  cfg.hyper.rho_hidden_dim = 8;
  cfg.train.batch_size = 16;
  cfg.train.steps = 20;
  cfg.train.seed = 5;

  const CvResult serial = crossvalidate(cohort.records, cfg);
  PipelineConfig threaded_cfg = cfg;
  threaded_cfg.threads = 2;
  const CvResult threaded = crossvalidate(cohort.records, threaded_cfg);

  REQUIRE(serial.folds.size() == threaded.folds.size());
  for (std::size_t f = 0; f < serial.folds.size(); ++f) {
    CHECK(serial.folds[f].mse == threaded.folds[f].mse);
    CHECK(serial.folds[f].accuracy == threaded.folds[f].accuracy);
    CHECK(serial.folds[f].n_samples == threaded.folds[f].n_samples);
  }
}

TEST_CASE("history_sweep: identical folds per length, naive constant across lengths") {
  const synth::Cohort cohort = small_cohort(10, 31);
  PipelineConfig cfg = naive_pipeline();
  const Vec lengths{0.5, 2.0, 5.0};
  const auto sweep = history_sweep(cohort.records, cfg, lengths);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0].fold_of_record == sweep[1].fold_of_record);
  CHECK(sweep[1].fold_of_record == sweep[2].fold_of_record);
  // the naive predictor ignores history: identical sample sets, identical MSE
  CHECK(sweep[0].aggregate.mse == sweep[1].aggregate.mse);
  CHECK(sweep[1].aggregate.mse == sweep[2].aggregate.mse);
  CHECK(sweep[0].aggregate.history_years == 0.5);
  CHECK(sweep[2].aggregate.history_years == 5.0);
}

TEST_CASE("metrics csv: layout and config hash comment") {
  std::vector<EvalReport> reports(2);
  reports[0].fold = 0;
  reports[0].history_years = 5.0;
  reports[0].n_samples = 10;
  reports[0].mse = 0.5;
  reports[0].accuracy = 0.75;
  reports[0].auc = 0.8;
  reports[1].fold = -1;
  reports[1].history_years = 5.0;
  reports[1].n_samples = 10;
  reports[1].mse = 0.5;
  reports[1].accuracy = 0.75;  // no auc

  std::ostringstream out;
  write_metrics_csv(out, reports, "abcd1234");
  const std::string expect =
      "# config_hash=abcd1234\n"
      "history_years,fold,n_samples,mse,accuracy,auc\n"
      "5,0,10,0.5,0.75,0.8\n"
      "5,-1,10,0.5,0.75,\n";
  CHECK(out.str() == expect);
}

TEST_CASE("latents: row counts, csv shape, determinism") {
  const synth::Cohort cohort = small_cohort(6, 37);
  FeatureScaler scaler;
  scaler.fit(cohort.records, 6.0);
  const auto samples = generate_samples(cohort.records, SamplingConfig{}, scaler);
  REQUIRE(!samples.empty());

  model::AdaptiveNetConfig mc;
  mc.latent_dim = 7;
  mc.lstm_hidden_dim = 5;
  mc.init_seed = 3;
  model::AdaptiveNet net(mc);

  const auto rows = collect_latents(net, samples);
  std::size_t expected_rows = 0;
  for (const auto& s : samples) expected_rows += s.visit_events.size() + s.med_events.size();
  CHECK(rows.size() == expected_rows);
  for (const auto& r : rows) CHECK(r.z.size() == 7);

  std::ostringstream a, b;
  write_latents_csv(a, rows);
  write_latents_csv(b, collect_latents(net, samples));
  CHECK(a.str() == b.str());
  std::istringstream header(a.str());
  std::string line;
  std::getline(header, line);
  CHECK(line == "event_type,z0,z1,z2,z3,z4,z5,z6");
}

TEST_CASE("latent_separability: chance level for identical distributions") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<LatentRow> rows;
  for (int i = 0; i < 400; ++i) {
    LatentRow r;
    r.is_med = i % 2 == 1;
    r.z = {normal(rng), normal(rng), normal(rng)};
    rows.push_back(r);
  }
  const double score = latent_separability(rows, 1);
  CHECK(score > 0.3);
  CHECK(score < 0.7);
}

TEST_CASE("latent_separability: well-separated clusters score high") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> normal(0.0, 0.3);
  std::vector<LatentRow> rows;
  for (int i = 0; i < 300; ++i) {
    LatentRow r;
    r.is_med = i % 2 == 1;
    const double center = r.is_med ? 2.0 : -2.0;
    r.z = {center + normal(rng), normal(rng)};
    rows.push_back(r);
  }
  CHECK(latent_separability(rows, 1) >= 0.95);
}

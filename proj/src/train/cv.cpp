#include "anet/train/cv.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include "anet/data/io.hpp"

namespace anet::train {

using data::PatientRecord;
using sample::FlatSample;
using sample::StructuredSample;

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::AdaptiveNet: return "adaptivenet";
    case ModelKind::Fcn: return "fcn";
    case ModelKind::Naive: return "naive";
  }
  return "?";
}

ModelKind model_kind_from_string(std::string_view s) {
  if (s == "adaptivenet") return ModelKind::AdaptiveNet;
  if (s == "fcn") return ModelKind::Fcn;
  if (s == "naive") return ModelKind::Naive;
  throw DataError("unknown model kind: '" + std::string(s) + "'");
}

FittedModel fit_model(std::span<const PatientRecord> train_records, const PipelineConfig& cfg,
                      std::uint64_t seed_stream) {
  require(!train_records.empty(), "fit_model: no training records");
  FittedModel fitted;
  fitted.kind = cfg.kind;
  fitted.scaler.fit(train_records, cfg.train.delta_t_max());

  if (cfg.kind == ModelKind::Naive) return fitted;

  const auto samples =
      sample::generate_samples(train_records, cfg.train.sampling(), fitted.scaler);
  require(!samples.empty(), "fit_model: training records yield no samples");

  const std::uint64_t init_seed = derive_seed(cfg.train.seed, 1000 + seed_stream);
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = derive_seed(cfg.train.seed, 2000 + seed_stream);

  if (cfg.kind == ModelKind::AdaptiveNet) {
    model::AdaptiveNetConfig mc;
    mc.latent_dim = cfg.hyper.latent_dim;
    mc.encoder_hidden_layers = cfg.hyper.encoder_hidden_layers;
    mc.lstm_hidden_dim = cfg.hyper.lstm_hidden_dim;
    mc.rho_hidden_dim = cfg.hyper.rho_hidden_dim;
    mc.rho_hidden_layers = cfg.hyper.rho_hidden_layers;
    mc.dropout_rate = cfg.hyper.dropout_rate;
    mc.share_encoder_last_layer = cfg.hyper.share_encoder_last_layer;
    mc.init_seed = init_seed;
    fitted.adaptivenet.emplace(mc);
    fitted.loss_trace =
        train(*fitted.adaptivenet, std::span<const StructuredSample>(samples), train_cfg)
            .loss_trace;
    return fitted;
  }

  // FCN: slot budgets come from the training fold only
  for (const StructuredSample& s : samples) {
    fitted.n_max = std::max(fitted.n_max, s.visit_events.size());
    fitted.m_max = std::max(fitted.m_max, s.med_events.size());
  }
  const auto flats =
      sample::flatten(samples, fitted.n_max, fitted.m_max, sample::OverflowPolicy::Strict);
  model::FcnConfig fc;
  fc.input_width = sample::flat_width(fitted.n_max, fitted.m_max);
  fc.hidden_dim = cfg.hyper.fcn_hidden_dim;
  fc.hidden_layers = cfg.hyper.fcn_hidden_layers;
  fc.dropout_rate = cfg.hyper.fcn_dropout_rate;
  fc.init_seed = init_seed;
  fitted.fcn.emplace(fc);
  fitted.loss_trace =
      train(*fitted.fcn, std::span<const FlatSample>(flats), train_cfg).loss_trace;
  return fitted;
}

std::vector<double> predict_changes(FittedModel& fitted,
                                    std::span<const StructuredSample> samples) {
  std::vector<double> preds;
  preds.reserve(samples.size());
  switch (fitted.kind) {
    case ModelKind::Naive:
      preds.assign(samples.size(), 0.0);
      break;
    case ModelKind::AdaptiveNet:
      require(fitted.adaptivenet.has_value(), "predict_changes: model missing");
      for (const StructuredSample& s : samples) preds.push_back(fitted.adaptivenet->predict(s));
      break;
    case ModelKind::Fcn: {
      require(fitted.fcn.has_value(), "predict_changes: model missing");
      // validation samples beyond the training budgets lose their oldest events
      const auto flats = sample::flatten(samples, fitted.n_max, fitted.m_max,
                                         sample::OverflowPolicy::TruncateOldest);
      for (const FlatSample& f : flats) preds.push_back(fitted.fcn->predict(f));
      break;
    }
  }
  return preds;
}

EvalReport evaluate_model(FittedModel& fitted, std::span<const PatientRecord> val_records,
                          const TrainConfig& train_cfg, int fold_index) {
  const auto samples =
      sample::generate_samples(val_records, train_cfg.sampling(), fitted.scaler);
  if (samples.empty()) {
    throw TrainError("evaluate_model: fold " + std::to_string(fold_index) +
                     " has zero validation samples");
  }
  const std::vector<double> preds = predict_changes(fitted, samples);

  std::vector<double> labels(samples.size()), f_abs(samples.size()), future(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    labels[i] = samples[i].label;
    f_abs[i] = samples[i].current_score + preds[i];
    future[i] = samples[i].future_score;
  }

  EvalReport report;
  report.fold = fold_index;
  report.history_years = train_cfg.max_history_years;
  report.n_samples = samples.size();
  report.mse = mse(preds, labels);
  const ClassificationResult cls = classify_and_score(f_abs, future);
  report.accuracy = cls.accuracy;
  report.auc = cls.auc;
  return report;
}

std::vector<std::size_t> assign_folds(std::size_t n_records, std::size_t folds,
                                      std::uint64_t seed) {
  require(folds >= 2, "assign_folds: need at least 2 folds");
  require(n_records >= folds, "assign_folds: need at least one record per fold");
  std::vector<std::size_t> order(n_records);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> fold_of(n_records);
  for (std::size_t i = 0; i < n_records; ++i) fold_of[order[i]] = i % folds;
  return fold_of;
}

namespace {

EvalReport aggregate_reports(std::span<const EvalReport> folds) {
  EvalReport agg;
  agg.fold = -1;
  double n = 0.0, mse_sum = 0.0, acc_sum = 0.0;
  double auc_n = 0.0, auc_sum = 0.0;
  for (const EvalReport& r : folds) {
    const double w = static_cast<double>(r.n_samples);
    n += w;
    mse_sum += w * r.mse;
    acc_sum += w * r.accuracy;
    if (r.auc) {
      auc_n += w;
      auc_sum += w * *r.auc;
    }
    agg.history_years = r.history_years;
  }
  agg.n_samples = static_cast<std::size_t>(n);
  if (n > 0.0) {
    agg.mse = mse_sum / n;
    agg.accuracy = acc_sum / n;
  }
  if (auc_n > 0.0) agg.auc = auc_sum / auc_n;
  return agg;
}

}  // namespace

CvResult crossvalidate(std::span<const PatientRecord> records, const PipelineConfig& cfg) {
  CvResult result;
  result.fold_of_record =
      assign_folds(records.size(), cfg.folds, derive_seed(cfg.train.seed, 0xF01Du));
  result.folds.resize(cfg.folds);

  std::vector<std::exception_ptr> errors(cfg.folds);
  auto run_fold = [&](std::size_t fold) {
    try {
      std::vector<PatientRecord> train_records, val_records;
      for (std::size_t i = 0; i < records.size(); ++i) {
        (result.fold_of_record[i] == fold ? val_records : train_records).push_back(records[i]);
      }
      FittedModel fitted = fit_model(train_records, cfg, fold);
      result.folds[fold] =
          evaluate_model(fitted, val_records, cfg.train, static_cast<int>(fold));
    } catch (...) {
      errors[fold] = std::current_exception();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, cfg.folds));
  if (workers == 1) {
    for (std::size_t fold = 0; fold < cfg.folds; ++fold) run_fold(fold);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (std::size_t fold = w; fold < cfg.folds; fold += workers) run_fold(fold);
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  result.aggregate = aggregate_reports(result.folds);
  return result;
}

std::vector<CvResult> history_sweep(std::span<const PatientRecord> records,
                                    const PipelineConfig& cfg,
                                    std::span<const double> history_lengths) {
  require(!history_lengths.empty(), "history_sweep: no history lengths given");
  std::vector<CvResult> out;
  out.reserve(history_lengths.size());
  for (const double years : history_lengths) {
    PipelineConfig run_cfg = cfg;
    run_cfg.train.max_history_years = years;
    out.push_back(crossvalidate(records, run_cfg));
  }
  return out;
}

void write_metrics_csv(std::ostream& out, std::span<const EvalReport> reports,
                       std::string_view config_hash) {
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << '\n';
  out << "history_years,fold,n_samples,mse,accuracy,auc\n";
  for (const EvalReport& r : reports) {
    out << data::format_double(r.history_years) << ',' << r.fold << ',' << r.n_samples << ','
        << data::format_double(r.mse) << ',' << data::format_double(r.accuracy) << ',';
    if (r.auc) out << data::format_double(*r.auc);
    out << '\n';
  }
}

void write_loss_trace_csv(std::ostream& out, std::span<const double> trace,
                          std::string_view config_hash) {
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << '\n';
  out << "step,train_loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i << ',' << data::format_double(trace[i]) << '\n';
  }
}

}  // namespace anet::train

// Command-line entry point: synthetic cohorts, sample export, training,
// evaluation, history sweeps, latent export and gradient audits.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "anet/cli/runconfig.hpp"
#include "anet/data/io.hpp"
#include "anet/train/audit.hpp"
#include "anet/train/latent.hpp"

namespace fs = std::filesystem;
using namespace anet;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> n_patients;
  std::optional<double> noise_sigma;
  std::optional<double> max_history;
  std::optional<std::string> model_kind;
  bool share_encoder = false;
  std::optional<double> dropout;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> folds;
  std::vector<double> history_lengths;
};

// defaults <- config file <- flags, flags win
cli::RunConfig effective_config(const std::string& config_path, const Overrides& o) {
  cli::RunConfig cfg;
  if (!config_path.empty()) cfg = cli::load_run_config(config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.n_patients) cfg.n_patients = *o.n_patients;
  if (o.noise_sigma) cfg.noise_sigma = *o.noise_sigma;
  if (o.max_history) cfg.max_history_years = *o.max_history;
  if (o.model_kind) cfg.kind = train::model_kind_from_string(*o.model_kind);
  if (o.share_encoder) cfg.hyper.share_encoder_last_layer = true;
  if (o.dropout) cfg.hyper.dropout_rate = *o.dropout;
  if (o.steps) cfg.steps = *o.steps;
  if (o.batch_size) cfg.batch_size = *o.batch_size;
  if (o.folds) cfg.folds = *o.folds;
  if (!o.history_lengths.empty()) cfg.history_lengths = o.history_lengths;
  return cfg;
}

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for fingerprinting: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return hex64(fnv1a64(buf.str()));
}

std::vector<data::PatientRecord> read_validated_records(const std::string& path) {
  auto records = data::read_records_jsonl(path);
  std::vector<std::string> problems;
  for (const auto& r : records) {
    for (const auto& v : data::validate_record(r)) {
      problems.push_back("record '" + r.id + "': " + v.field + " " + v.rule);
    }
  }
  if (!problems.empty()) {
    std::string msg = path + ": " + std::to_string(problems.size()) + " validation violations";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }
  return records;
}

fs::path make_run_dir(const std::string& out_dir, const std::string& command,
                      const cli::RunConfig& cfg) {
  const fs::path dir =
      fs::path(out_dir) / (command + "-" + cfg.short_hash() + "-s" + std::to_string(cfg.seed));
  fs::create_directories(dir);
  return dir;
}

void write_manifest_file(const fs::path& path, const std::string& command,
                         const cli::RunConfig& cfg, const std::string& records_fingerprint) {
  std::ofstream out(path);
  out << "{\"command\":\"" << command << "\",\"config_hash\":\"" << cfg.hash()
      << "\",\"records_fingerprint\":\"" << records_fingerprint
      << "\",\"config\":" << cfg.canonical_json() << "}\n";
}

void write_run_manifest(const fs::path& dir, const std::string& command,
                        const cli::RunConfig& cfg, const std::string& records_fingerprint) {
  write_manifest_file(dir / "run.json", command, cfg, records_fingerprint);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

std::string report_line(const train::EvalReport& r) {
  std::ostringstream line;
  line << "history " << r.history_years << "y fold " << r.fold << ": n=" << r.n_samples
       << " mse=" << r.mse << " accuracy=" << r.accuracy;
  if (r.auc) {
    line << " auc=" << *r.auc;
  } else {
    line << " auc=n/a";
  }
  return line.str();
}

int cmd_synth(const std::string& config_path, const Overrides& o, const std::string& out_path,
              std::string truth_path) {
  const cli::RunConfig cfg = effective_config(config_path, o);
  const synth::Cohort cohort = synth::generate_cohort(cfg.synth_config());
  data::write_records_jsonl(cohort.records, out_path);
  if (truth_path.empty()) truth_path = out_path + ".truth.json";
  write_file(truth_path, cohort.ground_truth.to_json() + "\n");
  write_manifest_file(out_path + ".run.json", "synth", cfg, file_fingerprint(out_path));

  const synth::CohortStats stats = synth::cohort_stats(cohort.records);
  std::size_t visits = 0, meds = 0;
  for (const auto& r : cohort.records) {
    visits += r.visits.size();
    meds += r.medications.size();
  }
  std::cout << "wrote " << cohort.records.size() << " patients to " << out_path << " ("
            << visits << " visits, " << meds << " medication events)\n"
            << "ground truth: " << truth_path << "\n"
            << "mean events in trailing 5y window: " << stats.mean_visits_5y << " visits, "
            << stats.mean_meds_5y << " medication adjustments\n"
            << "config_hash=" << cfg.hash() << "\n";
  return 0;
}

int cmd_samples(const std::string& config_path, const Overrides& o, const std::string& records_path,
                const std::string& out_path, bool flat) {
  const cli::RunConfig cfg = effective_config(config_path, o);
  const auto records = read_validated_records(records_path);

  data::FeatureScaler scaler;
  scaler.fit(records, cfg.train_config().delta_t_max());
  const auto samples = sample::generate_samples(records, cfg.sampling_config(), scaler);

  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write " + out_path);
  if (flat) {
    std::size_t n_max = 0, m_max = 0;
    for (const auto& s : samples) {
      n_max = std::max(n_max, s.visit_events.size());
      m_max = std::max(m_max, s.med_events.size());
    }
    const auto flats = sample::flatten(samples, n_max, m_max);
    sample::write_flat_csv(out, flats, n_max, m_max);
    std::cout << "flat width = " << data::kPatientEncodingWidth << " + " << n_max << "*"
              << data::kVisitEncodingWidth << " + " << m_max << "*" << data::kMedEncodingWidth
              << " = " << sample::flat_width(n_max, m_max) << "\n";
  } else {
    sample::write_samples_jsonl(samples, out);
  }
  out.close();
  write_manifest_file(out_path + ".run.json", "samples", cfg, file_fingerprint(records_path));
  std::cout << "wrote " << samples.size() << " samples from " << records.size()
            << " records to " << out_path << "\n"
            << "config_hash=" << cfg.hash() << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const Overrides& o, const std::string& records_path,
              const std::string& out_dir) {
  const cli::RunConfig cfg = effective_config(config_path, o);
  const auto records = read_validated_records(records_path);
  const std::string fingerprint = file_fingerprint(records_path);
  const train::PipelineConfig pipeline = cfg.pipeline_config();

  // deterministic patient-level holdout: fold 0 of the k-fold assignment
  const auto folds = train::assign_folds(records.size(), pipeline.folds,
                                         derive_seed(cfg.seed, 0xF01Du));
  std::vector<data::PatientRecord> train_records, val_records;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (folds[i] == 0 ? val_records : train_records).push_back(records[i]);
  }

  train::FittedModel fitted = train::fit_model(train_records, pipeline, 0);
  const train::EvalReport report = train::evaluate_model(fitted, val_records, pipeline.train, 0);

  const fs::path dir = make_run_dir(out_dir, "train", cfg);
  write_run_manifest(dir, "train", cfg, fingerprint);
  {
    std::ofstream metrics(dir / "metrics.csv");
    const std::vector<train::EvalReport> reports{report};
    train::write_metrics_csv(metrics, reports, cfg.hash());
  }
  {
    std::ofstream trace(dir / "loss_trace.csv");
    train::write_loss_trace_csv(trace, fitted.loss_trace, cfg.hash());
  }

  if (pipeline.kind != train::ModelKind::Naive) {
    model::CheckpointMeta meta;
    meta.config_hash = cfg.hash();
    meta.records_fingerprint = fingerprint;
    meta.train_seed = cfg.seed;
    meta.n_max = fitted.n_max;
    meta.m_max = fitted.m_max;
    meta.max_history_years = cfg.max_history_years;
    meta.min_horizon_years = cfg.min_horizon_years;
    meta.max_horizon_years = cfg.max_horizon_years;
    const std::string ckpt = (dir / "checkpoint.json").string();
    if (pipeline.kind == train::ModelKind::AdaptiveNet) {
      model::save_checkpoint(ckpt, *fitted.adaptivenet, fitted.scaler, meta);
    } else {
      model::save_checkpoint(ckpt, *fitted.fcn, fitted.scaler, meta);
    }
    std::cout << "checkpoint: " << ckpt << "\n";
  } else {
    std::cout << "naive baseline: evaluation-only, no checkpoint written\n";
  }
  std::cout << "run dir: " << dir.string() << "\n" << report_line(report) << "\n";
  return 0;
}

train::FittedModel fitted_from_checkpoint(model::LoadedCheckpoint&& loaded) {
  train::FittedModel fitted;
  fitted.kind = train::model_kind_from_string(loaded.kind);
  fitted.adaptivenet = std::move(loaded.adaptivenet);
  fitted.fcn = std::move(loaded.fcn);
  fitted.scaler = std::move(loaded.scaler);
  fitted.n_max = loaded.meta.n_max;
  fitted.m_max = loaded.meta.m_max;
  return fitted;
}

int cmd_eval(const std::string& config_path, const Overrides& o, const std::string& checkpoint,
             const std::string& records_path, const std::string& out_dir) {
  const cli::RunConfig cfg = effective_config(config_path, o);
  model::LoadedCheckpoint loaded = model::load_checkpoint(checkpoint);
  const auto records = read_validated_records(records_path);
  const std::string fingerprint = file_fingerprint(records_path);
  if (fingerprint == loaded.meta.records_fingerprint) {
    std::cerr << "warning: evaluating the checkpoint on its own training records (fingerprint "
              << fingerprint << "); metrics are not held-out\n";
  }

  train::FittedModel fitted = fitted_from_checkpoint(std::move(loaded));
  const train::EvalReport report =
      train::evaluate_model(fitted, records, cfg.train_config(), 0);

  const fs::path dir = make_run_dir(out_dir, "eval", cfg);
  write_run_manifest(dir, "eval", cfg, fingerprint);
  {
    std::ofstream metrics(dir / "metrics.csv");
    const std::vector<train::EvalReport> reports{report};
    train::write_metrics_csv(metrics, reports, cfg.hash());
  }
  std::cout << "run dir: " << dir.string() << "\n" << report_line(report) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const Overrides& o, const std::string& records_path,
              const std::string& out_dir) {
  const cli::RunConfig cfg = effective_config(config_path, o);
  const auto records = read_validated_records(records_path);
  const std::string fingerprint = file_fingerprint(records_path);

  const auto results =
      train::history_sweep(records, cfg.pipeline_config(), cfg.history_lengths);

  std::vector<train::EvalReport> rows;
  for (const auto& cv : results) {
    rows.insert(rows.end(), cv.folds.begin(), cv.folds.end());
    rows.push_back(cv.aggregate);
  }
  const fs::path dir = make_run_dir(out_dir, "sweep", cfg);
  write_run_manifest(dir, "sweep", cfg, fingerprint);
  {
    std::ofstream metrics(dir / "metrics.csv");
    train::write_metrics_csv(metrics, rows, cfg.hash());
  }
  std::cout << "run dir: " << dir.string() << "\n";
  for (const auto& cv : results) std::cout << report_line(cv.aggregate) << "\n";
  return 0;
}

int cmd_export_latents(const std::string& config_path, const Overrides& o,
                       const std::string& checkpoint, const std::string& records_path,
                       const std::string& out_path) {
  const cli::RunConfig cfg = effective_config(config_path, o);
  model::LoadedCheckpoint loaded = model::load_checkpoint(checkpoint);
  if (!loaded.adaptivenet) {
    throw DataError("export-latents requires an adaptivenet checkpoint, got " + loaded.kind);
  }
  const auto records = read_validated_records(records_path);
  const auto samples =
      sample::generate_samples(records, cfg.sampling_config(), loaded.scaler);
  const auto rows = train::collect_latents(*loaded.adaptivenet, samples);

  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write " + out_path);
  train::write_latents_csv(out, rows);
  std::cout << "wrote " << rows.size() << " latent vectors (" << samples.size()
            << " samples) to " << out_path << "\n";
  return 0;
}

int cmd_check_gradients(std::size_t seeds, double tolerance) {
  const train::GradientAuditResult result = train::gradient_audit(seeds, tolerance);
  for (const std::string& line : result.lines) std::cout << line << "\n";
  std::cout << "max rel error " << result.max_rel_error << " over " << result.checks_run
            << " checks (worst " << result.worst_case << "), tolerance " << tolerance << ": "
            << (result.passed ? "PASS" : "FAIL") << "\n";
  return result.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recurrent disease-progression prediction over clinical event streams"};
  app.require_subcommand(1);
  app.fallthrough();  // global options remain valid after the subcommand name

  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration")
      ->envname("ANET_CONFIG")
      ->check(CLI::ExistingFile);

  Overrides o;
  app.add_option("--seed", o.seed, "override config seed");
  app.add_option("--threads", o.threads, "fold-level parallelism (default 1, bit-reproducible)");

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic cohort + ground truth");
  std::string out_path, truth_path;
  synth_cmd->add_option("--out", out_path, "record file to write")
      ->envname("ANET_OUT")
      ->required();
  synth_cmd->add_option("--ground-truth", truth_path, "sidecar path (default <out>.truth.json)");
  synth_cmd->add_option("--n-patients", o.n_patients, "override cohort size");
  synth_cmd->add_option("--noise-sigma", o.noise_sigma, "override score noise");

  auto* samples_cmd = app.add_subcommand("samples", "emit training samples from records");
  std::string records_path, samples_out;
  bool flat = false;
  samples_cmd->add_option("--records", records_path, "record file")
      ->envname("ANET_RECORDS")
      ->required();
  samples_cmd->add_option("--out", samples_out, "output path")->required();
  samples_cmd->add_flag("--flat", flat, "padded fixed-width CSV instead of structured samples");
  samples_cmd->add_option("--max-history", o.max_history, "history window in years");

  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  std::string train_records, out_dir;
  train_cmd->add_option("--records", train_records, "record file")
      ->envname("ANET_RECORDS")
      ->required();
  train_cmd->add_option("--out-dir", out_dir, "output directory")
      ->envname("ANET_OUT_DIR")
      ->required();
  train_cmd->add_option("--model", o.model_kind, "adaptivenet|fcn|naive")
      ->check(CLI::IsMember({"adaptivenet", "fcn", "naive"}));
  train_cmd->add_flag("--share-encoder", o.share_encoder, "share the last encoder layer");
  train_cmd->add_option("--steps", o.steps, "training steps");
  train_cmd->add_option("--batch-size", o.batch_size, "minibatch size");
  train_cmd->add_option("--max-history", o.max_history, "history window in years");
  train_cmd->add_option("--dropout", o.dropout, "dropout rate");
  train_cmd->add_option("--folds", o.folds, "holdout split granularity");

  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint on fresh records");
  std::string checkpoint_path, eval_records, eval_out_dir;
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")
      ->envname("ANET_CHECKPOINT")
      ->required();
  eval_cmd->add_option("--records", eval_records, "record file")->required();
  eval_cmd->add_option("--out-dir", eval_out_dir, "output directory")->required();
  eval_cmd->add_option("--max-history", o.max_history, "history window in years");

  auto* sweep_cmd = app.add_subcommand("sweep", "cross-validated history-length sweep");
  std::string sweep_records, sweep_out_dir;
  sweep_cmd->add_option("--records", sweep_records, "record file")->required();
  sweep_cmd->add_option("--out-dir", sweep_out_dir, "output directory")->required();
  sweep_cmd->add_option("--history", o.history_lengths, "history lengths in years");
  sweep_cmd->add_option("--model", o.model_kind, "adaptivenet|fcn|naive")
      ->check(CLI::IsMember({"adaptivenet", "fcn", "naive"}));
  sweep_cmd->add_flag("--share-encoder", o.share_encoder, "share the last encoder layer");
  sweep_cmd->add_option("--steps", o.steps, "training steps");
  sweep_cmd->add_option("--batch-size", o.batch_size, "minibatch size");
  sweep_cmd->add_option("--folds", o.folds, "cross-validation folds");

  auto* latents_cmd = app.add_subcommand("export-latents", "dump encoder latents as CSV");
  std::string lat_checkpoint, lat_records, lat_out;
  latents_cmd->add_option("--checkpoint", lat_checkpoint, "checkpoint file")->required();
  latents_cmd->add_option("--records", lat_records, "record file")->required();
  latents_cmd->add_option("--out", lat_out, "CSV path")->required();
  latents_cmd->add_option("--max-history", o.max_history, "history window in years");

  auto* grad_cmd = app.add_subcommand("check-gradients", "finite-difference gradient audit");
  std::size_t grad_seeds = 20;
  double grad_tolerance = 1e-4;
  grad_cmd->add_option("--seeds", grad_seeds, "random seeds to audit");
  grad_cmd->add_option("--tolerance", grad_tolerance, "max relative error allowed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) return cmd_synth(config_path, o, out_path, truth_path);
    if (samples_cmd->parsed()) {
      return cmd_samples(config_path, o, records_path, samples_out, flat);
    }
    if (train_cmd->parsed()) return cmd_train(config_path, o, train_records, out_dir);
    if (eval_cmd->parsed()) {
      return cmd_eval(config_path, o, checkpoint_path, eval_records, eval_out_dir);
    }
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, o, sweep_records, sweep_out_dir);
    if (latents_cmd->parsed()) {
      return cmd_export_latents(config_path, o, lat_checkpoint, lat_records, lat_out);
    }
    if (grad_cmd->parsed()) return cmd_check_gradients(grad_seeds, grad_tolerance);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

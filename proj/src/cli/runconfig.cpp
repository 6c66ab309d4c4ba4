#include "anet/cli/runconfig.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace anet::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) throw DataError(where + ": unknown config key '" + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

synth::SynthConfig RunConfig::synth_config() const {
  synth::SynthConfig cfg;
  cfg.n_patients = n_patients;
  cfg.visits_per_year = visits_per_year;
  cfg.med_adjust_rate = med_adjust_rate;
  cfg.noise_sigma = noise_sigma;
  cfg.horizon_years = horizon_years;
  cfg.seed = seed;
  return cfg;
}

sample::SamplingConfig RunConfig::sampling_config() const {
  sample::SamplingConfig cfg;
  cfg.max_history_years = max_history_years;
  cfg.min_horizon_years = min_horizon_years;
  cfg.max_horizon_years = max_horizon_years;
  cfg.min_visits = min_visits;
  return cfg;
}

train::TrainConfig RunConfig::train_config() const {
  train::TrainConfig cfg;
  cfg.batch_size = batch_size;
  cfg.steps = steps;
  cfg.learning_rate = learning_rate;
  cfg.l1_coeff = l1_coeff;
  cfg.seed = seed;
  cfg.max_history_years = max_history_years;
  cfg.min_horizon_years = min_horizon_years;
  cfg.max_horizon_years = max_horizon_years;
  return cfg;
}

train::PipelineConfig RunConfig::pipeline_config() const {
  train::PipelineConfig cfg;
  cfg.kind = kind;
  cfg.hyper = hyper;
  cfg.train = train_config();
  cfg.folds = folds;
  cfg.threads = threads;
  return cfg;
}

std::string RunConfig::canonical_json() const {
  json j;
  j["seed"] = seed;
  j["threads"] = threads;
  j["synthetic"] = {{"n_patients", n_patients},
                    {"visits_per_year", visits_per_year},
                    {"med_adjust_rate", med_adjust_rate},
                    {"noise_sigma", noise_sigma},
                    {"horizon_years", horizon_years}};
  j["sampling"] = {{"max_history_years", max_history_years},
                   {"min_horizon_years", min_horizon_years},
                   {"max_horizon_years", max_horizon_years},
                   {"min_visits", min_visits}};
  j["model"] = {{"kind", std::string(train::to_string(kind))},
                {"latent_dim", hyper.latent_dim},
                {"encoder_hidden_layers", hyper.encoder_hidden_layers},
                {"lstm_hidden_dim", hyper.lstm_hidden_dim},
                {"rho_hidden_dim", hyper.rho_hidden_dim},
                {"rho_hidden_layers", hyper.rho_hidden_layers},
                {"dropout_rate", hyper.dropout_rate},
                {"share_encoder_last_layer", hyper.share_encoder_last_layer},
                {"fcn_hidden_dim", hyper.fcn_hidden_dim},
                {"fcn_hidden_layers", hyper.fcn_hidden_layers},
                {"fcn_dropout_rate", hyper.fcn_dropout_rate}};
  j["train"] = {{"batch_size", batch_size},
                {"steps", steps},
                {"learning_rate", learning_rate},
                {"l1_coeff", l1_coeff}};
  j["eval"] = {{"folds", folds}, {"history_lengths_years", history_lengths}};
  return j.dump();
}

std::string RunConfig::hash() const { return hex64(fnv1a64(canonical_json())); }
std::string RunConfig::short_hash() const { return hash().substr(0, 8); }

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(origin + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError(origin + ": config must be a JSON object");
  reject_unknown(j, {"seed", "threads", "synthetic", "sampling", "model", "train", "eval"},
                 origin);

  RunConfig cfg;
  read(j, "seed", cfg.seed);
  read(j, "threads", cfg.threads);

  if (const auto it = j.find("synthetic"); it != j.end()) {
    reject_unknown(*it,
                   {"n_patients", "visits_per_year", "med_adjust_rate", "noise_sigma",
                    "horizon_years"},
                   origin + ".synthetic");
    read(*it, "n_patients", cfg.n_patients);
    read(*it, "visits_per_year", cfg.visits_per_year);
    read(*it, "med_adjust_rate", cfg.med_adjust_rate);
    read(*it, "noise_sigma", cfg.noise_sigma);
    read(*it, "horizon_years", cfg.horizon_years);
  }
  if (const auto it = j.find("sampling"); it != j.end()) {
    reject_unknown(*it,
                   {"max_history_years", "min_horizon_years", "max_horizon_years", "min_visits"},
                   origin + ".sampling");
    read(*it, "max_history_years", cfg.max_history_years);
    read(*it, "min_horizon_years", cfg.min_horizon_years);
    read(*it, "max_horizon_years", cfg.max_horizon_years);
    read(*it, "min_visits", cfg.min_visits);
  }
  if (const auto it = j.find("model"); it != j.end()) {
    reject_unknown(*it,
                   {"kind", "latent_dim", "encoder_hidden_layers", "lstm_hidden_dim",
                    "rho_hidden_dim", "rho_hidden_layers", "dropout_rate",
                    "share_encoder_last_layer", "fcn_hidden_dim", "fcn_hidden_layers",
                    "fcn_dropout_rate"},
                   origin + ".model");
    std::string kind(train::to_string(cfg.kind));
    read(*it, "kind", kind);
    cfg.kind = train::model_kind_from_string(kind);
    read(*it, "latent_dim", cfg.hyper.latent_dim);
    read(*it, "encoder_hidden_layers", cfg.hyper.encoder_hidden_layers);
    read(*it, "lstm_hidden_dim", cfg.hyper.lstm_hidden_dim);
    read(*it, "rho_hidden_dim", cfg.hyper.rho_hidden_dim);
    read(*it, "rho_hidden_layers", cfg.hyper.rho_hidden_layers);
    read(*it, "dropout_rate", cfg.hyper.dropout_rate);
    read(*it, "share_encoder_last_layer", cfg.hyper.share_encoder_last_layer);
    read(*it, "fcn_hidden_dim", cfg.hyper.fcn_hidden_dim);
    read(*it, "fcn_hidden_layers", cfg.hyper.fcn_hidden_layers);
    read(*it, "fcn_dropout_rate", cfg.hyper.fcn_dropout_rate);
  }
  if (const auto it = j.find("train"); it != j.end()) {
    reject_unknown(*it, {"batch_size", "steps", "learning_rate", "l1_coeff"}, origin + ".train");
    read(*it, "batch_size", cfg.batch_size);
    read(*it, "steps", cfg.steps);
    read(*it, "learning_rate", cfg.learning_rate);
    read(*it, "l1_coeff", cfg.l1_coeff);
  }
  if (const auto it = j.find("eval"); it != j.end()) {
    reject_unknown(*it, {"folds", "history_lengths_years"}, origin + ".eval");
    read(*it, "folds", cfg.folds);
    read(*it, "history_lengths_years", cfg.history_lengths);
  }

  // fail fast on out-of-range values
  try {
    cfg.synth_config().check();
    cfg.sampling_config().check();
    cfg.train_config().check();
    require(cfg.folds >= 2, "eval.folds must be >= 2");
  } catch (const ContractError& e) {
    throw DataError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path);
}

}  // namespace anet::cli

#include "anet/model/checkpoint.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace anet::model {
namespace {

using nlohmann::json;

json meta_to_json(const CheckpointMeta& meta) {
  json j;
  j["config_hash"] = meta.config_hash;
  j["records_fingerprint"] = meta.records_fingerprint;
  j["train_seed"] = meta.train_seed;
  j["n_max"] = meta.n_max;
  j["m_max"] = meta.m_max;
  j["max_history_years"] = meta.max_history_years;
  j["min_horizon_years"] = meta.min_horizon_years;
  j["max_horizon_years"] = meta.max_horizon_years;
  return j;
}

CheckpointMeta meta_from_json(const json& j) {
  CheckpointMeta meta;
  meta.config_hash = j.at("config_hash").get<std::string>();
  meta.records_fingerprint = j.at("records_fingerprint").get<std::string>();
  meta.train_seed = j.at("train_seed").get<std::uint64_t>();
  meta.n_max = j.at("n_max").get<std::size_t>();
  meta.m_max = j.at("m_max").get<std::size_t>();
  meta.max_history_years = j.at("max_history_years").get<double>();
  meta.min_horizon_years = j.at("min_horizon_years").get<double>();
  meta.max_horizon_years = j.at("max_horizon_years").get<double>();
  return meta;
}

json params_to_json(std::span<math::ParamBlock* const> params) {
  json j = json::object();
  for (const math::ParamBlock* p : params) {
    require(!j.contains(p->name), "checkpoint: duplicate parameter block " + p->name);
    j[p->name] = json{{"rows", p->rows}, {"cols", p->cols}, {"values", p->value}};
  }
  return j;
}

void params_from_json(const json& j, std::span<math::ParamBlock* const> params) {
  std::size_t restored = 0;
  for (math::ParamBlock* p : params) {
    const auto it = j.find(p->name);
    if (it == j.end()) throw DataError("checkpoint: missing parameter block " + p->name);
    if (it->at("rows").get<std::size_t>() != p->rows ||
        it->at("cols").get<std::size_t>() != p->cols) {
      throw DataError("checkpoint: shape mismatch for block " + p->name);
    }
    Vec values = it->at("values").get<Vec>();
    if (values.size() != p->size()) {
      throw DataError("checkpoint: value count mismatch for block " + p->name);
    }
    p->value = std::move(values);
    ++restored;
  }
  if (restored != j.size()) {
    throw DataError("checkpoint: file contains " + std::to_string(j.size()) +
                    " parameter blocks, model expects " + std::to_string(restored));
  }
}

json scaler_to_json(const data::FeatureScaler& scaler) {
  json j = json::object();
  for (const auto& [key, range] : scaler.ranges()) {
    j[key] = json{{"min", range.min}, {"max", range.max}, {"has_data", range.has_data}};
  }
  return j;
}

data::FeatureScaler scaler_from_json(const json& j) {
  std::map<std::string, data::FeatureScaler::Range, std::less<>> ranges;
  for (const auto& [key, value] : j.items()) {
    data::FeatureScaler::Range r;
    r.min = value.at("min").get<double>();
    r.max = value.at("max").get<double>();
    r.has_data = value.at("has_data").get<bool>();
    ranges.emplace(key, r);
  }
  data::FeatureScaler scaler;
  scaler.set_ranges(std::move(ranges));
  return scaler;
}

void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint: " + tmp);
    out << content;
    out.flush();
    if (!out) throw DataError("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw DataError("cannot rename " + tmp + " to " + path);
  }
}

json adaptivenet_config_to_json(const AdaptiveNetConfig& c) {
  json j;
  j["visit_width"] = c.visit_width;
  j["med_width"] = c.med_width;
  j["patient_width"] = c.patient_width;
  j["latent_dim"] = c.latent_dim;
  j["encoder_hidden_layers"] = c.encoder_hidden_layers;
  j["lstm_hidden_dim"] = c.lstm_hidden_dim;
  j["rho_hidden_dim"] = c.rho_hidden_dim;
  j["rho_hidden_layers"] = c.rho_hidden_layers;
  j["dropout_rate"] = c.dropout_rate;
  j["share_encoder_last_layer"] = c.share_encoder_last_layer;
  j["init_seed"] = c.init_seed;
  return j;
}

AdaptiveNetConfig adaptivenet_config_from_json(const json& j) {
  AdaptiveNetConfig c;
  c.visit_width = j.at("visit_width").get<std::size_t>();
  c.med_width = j.at("med_width").get<std::size_t>();
  c.patient_width = j.at("patient_width").get<std::size_t>();
  c.latent_dim = j.at("latent_dim").get<std::size_t>();
  c.encoder_hidden_layers = j.at("encoder_hidden_layers").get<std::size_t>();
  c.lstm_hidden_dim = j.at("lstm_hidden_dim").get<std::size_t>();
  c.rho_hidden_dim = j.at("rho_hidden_dim").get<std::size_t>();
  c.rho_hidden_layers = j.at("rho_hidden_layers").get<std::size_t>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.share_encoder_last_layer = j.at("share_encoder_last_layer").get<bool>();
  c.init_seed = j.at("init_seed").get<std::uint64_t>();
  return c;
}

json fcn_config_to_json(const FcnConfig& c) {
  json j;
  j["input_width"] = c.input_width;
  j["hidden_dim"] = c.hidden_dim;
  j["hidden_layers"] = c.hidden_layers;
  j["dropout_rate"] = c.dropout_rate;
  j["init_seed"] = c.init_seed;
  return j;
}

FcnConfig fcn_config_from_json(const json& j) {
  FcnConfig c;
  c.input_width = j.at("input_width").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.hidden_layers = j.at("hidden_layers").get<std::size_t>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.init_seed = j.at("init_seed").get<std::uint64_t>();
  return c;
}

json checkpoint_shell(const char* kind, const data::FeatureScaler& scaler,
                      const CheckpointMeta& meta) {
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["layout_version"] = data::kEncodingLayoutVersion;
  j["model_kind"] = kind;
  j["meta"] = meta_to_json(meta);
  j["scaler"] = scaler_to_json(scaler);
  return j;
}

}  // namespace

void save_checkpoint(const std::string& path, AdaptiveNet& model,
                     const data::FeatureScaler& scaler, const CheckpointMeta& meta) {
  json j = checkpoint_shell("adaptivenet", scaler, meta);
  j["model_config"] = adaptivenet_config_to_json(model.config());
  j["params"] = params_to_json(model.parameters());
  write_atomically(path, j.dump());
}

void save_checkpoint(const std::string& path, FcnModel& model,
                     const data::FeatureScaler& scaler, const CheckpointMeta& meta) {
  json j = checkpoint_shell("fcn", scaler, meta);
  j["model_config"] = fcn_config_to_json(model.config());
  j["params"] = params_to_json(model.parameters());
  write_atomically(path, j.dump());
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError("invalid checkpoint JSON in " + path + ": " + e.what());
  }

  const int version = j.at("format_version").get<int>();
  if (version != kCheckpointFormatVersion) {
    throw DataError("checkpoint format version " + std::to_string(version) +
                    " unsupported (this build writes " +
                    std::to_string(kCheckpointFormatVersion) + ")");
  }
  const std::string layout = j.at("layout_version").get<std::string>();
  if (layout != data::kEncodingLayoutVersion) {
    throw DataError("encoding layout mismatch: checkpoint has '" + layout +
                    "', this build uses '" + std::string(data::kEncodingLayoutVersion) + "'");
  }

  LoadedCheckpoint loaded;
  loaded.kind = j.at("model_kind").get<std::string>();
  loaded.meta = meta_from_json(j.at("meta"));
  loaded.scaler = scaler_from_json(j.at("scaler"));
  if (loaded.kind == "adaptivenet") {
    loaded.adaptivenet.emplace(adaptivenet_config_from_json(j.at("model_config")));
    params_from_json(j.at("params"), loaded.adaptivenet->parameters());
  } else if (loaded.kind == "fcn") {
    loaded.fcn.emplace(fcn_config_from_json(j.at("model_config")));
    params_from_json(j.at("params"), loaded.fcn->parameters());
  } else {
    throw DataError("unknown model kind in checkpoint: " + loaded.kind);
  }
  return loaded;
}

}  // namespace anet::model

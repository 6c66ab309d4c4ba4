#pragma once

#include <optional>

#include "anet/math/layers.hpp"
#include "anet/sample/samplegen.hpp"

namespace anet::model {

struct AdaptiveNetConfig {
  std::size_t visit_width = data::kVisitEncodingWidth;
  std::size_t med_width = data::kMedEncodingWidth;
  std::size_t patient_width = data::kPatientEncodingWidth;
  std::size_t latent_dim = 100;           // F: shared event-space width
  std::size_t encoder_hidden_layers = 1;  // dense ReLU layers per encoder
  std::size_t lstm_hidden_dim = 100;      // H
  std::size_t rho_hidden_dim = 100;
  std::size_t rho_hidden_layers = 2;
  double dropout_rate = 0.0;
  bool share_encoder_last_layer = false;  // extra latent->latent layer used by both encoders
  std::uint64_t init_seed = 0;

  void check() const {
    require(latent_dim >= 1 && lstm_hidden_dim >= 1 && rho_hidden_dim >= 1,
            "AdaptiveNetConfig: dims must be >= 1");
    require(encoder_hidden_layers >= 1 && rho_hidden_layers >= 1,
            "AdaptiveNetConfig: layer counts must be >= 1");
    require(dropout_rate >= 0.0 && dropout_rate < 1.0,
            "AdaptiveNetConfig: dropout_rate must be in [0, 1)");
  }
};

// Per-type encoders project visit and medication events into one latent
// event space; the time-sorted stream of latent events is pooled by an
// LSTM, and a dense head maps [pooled-history ; patient-vector] to the
// predicted score change.
class AdaptiveNet {
 public:
  explicit AdaptiveNet(const AdaptiveNetConfig& cfg);

  const AdaptiveNetConfig& config() const { return cfg_; }

  // Encoder outputs (including the shared last layer when configured).
  Vec encode_visit_latent(std::span<const double> features) const;
  Vec encode_med_latent(std::span<const double> features) const;

  // Encodes every event, merges both lists sorted ascending by event time
  // (visits before medications on ties, then by feature content so the
  // result is invariant under input permutation), runs the LSTM and
  // returns the final hidden state. No events at all -> zero vector.
  Vec psi_pool(std::span<const sample::TimedEvent> visit_events,
               std::span<const sample::TimedEvent> med_events) const;

  double predict(const sample::StructuredSample& s) const;

  // Training-mode forward through the tape; dropout is active only when a
  // dropout RNG is supplied.
  math::NodeId forward(math::Tape& tape, const sample::StructuredSample& s,
                       std::mt19937_64* dropout_rng = nullptr);

  std::vector<math::ParamBlock*> parameters();

 private:
  AdaptiveNetConfig cfg_;
  std::vector<math::DenseLayer> phi_visit_;
  std::vector<math::DenseLayer> phi_med_;
  std::optional<math::DenseLayer> shared_last_;
  math::LstmCell lstm_;
  std::vector<math::DenseLayer> rho_;

  struct EventRef {
    const sample::TimedEvent* event;
    bool is_med;
  };
  std::vector<EventRef> sorted_events(std::span<const sample::TimedEvent> visit_events,
                                      std::span<const sample::TimedEvent> med_events) const;
};

inline double naive_predict(const sample::StructuredSample&) { return 0.0; }

// Absolute future score: current score plus the predicted change.
inline double predict_absolute(const AdaptiveNet& model, const sample::StructuredSample& s,
                               double current_score) {
  return current_score + model.predict(s);
}

}  // namespace anet::model

#include "anet/model/adaptivenet.hpp"

#include <algorithm>

namespace anet::model {

using math::DenseLayer;
using math::NodeId;
using math::Tape;
using sample::TimedEvent;

namespace {

std::vector<DenseLayer> make_stack(const std::string& name, std::size_t input,
                                   std::size_t hidden, std::size_t hidden_layers,
                                   bool linear_head) {
  std::vector<DenseLayer> stack;
  std::size_t in = input;
  for (std::size_t i = 0; i < hidden_layers; ++i) {
    stack.emplace_back(name + std::to_string(i), hidden, in, math::Activation::ReLU);
    in = hidden;
  }
  if (linear_head) stack.emplace_back(name + "_out", 1, in, math::Activation::Identity);
  return stack;
}

}  // namespace

AdaptiveNet::AdaptiveNet(const AdaptiveNetConfig& cfg)
    : cfg_(cfg),
      phi_visit_(make_stack("phi_visit", cfg.visit_width, cfg.latent_dim,
                            cfg.encoder_hidden_layers, false)),
      phi_med_(make_stack("phi_med", cfg.med_width, cfg.latent_dim, cfg.encoder_hidden_layers,
                          false)),
      lstm_("lstm", cfg.latent_dim, cfg.lstm_hidden_dim),
      rho_(make_stack("rho", cfg.lstm_hidden_dim + cfg.patient_width, cfg.rho_hidden_dim,
                      cfg.rho_hidden_layers, true)) {
  cfg_.check();
  if (cfg_.share_encoder_last_layer) {
    shared_last_.emplace("phi_shared", cfg_.latent_dim, cfg_.latent_dim, math::Activation::ReLU);
  }
  std::mt19937_64 rng(cfg_.init_seed);
  for (DenseLayer& l : phi_visit_) l.init(rng);
  for (DenseLayer& l : phi_med_) l.init(rng);
  if (shared_last_) shared_last_->init(rng);
  lstm_.init(rng);
  for (DenseLayer& l : rho_) l.init(rng);
}

Vec AdaptiveNet::encode_visit_latent(std::span<const double> features) const {
  Vec h(features.begin(), features.end());
  for (const DenseLayer& l : phi_visit_) h = l.forward(h);
  if (shared_last_) h = shared_last_->forward(h);
  return h;
}

Vec AdaptiveNet::encode_med_latent(std::span<const double> features) const {
  Vec h(features.begin(), features.end());
  for (const DenseLayer& l : phi_med_) h = l.forward(h);
  if (shared_last_) h = shared_last_->forward(h);
  return h;
}

std::vector<AdaptiveNet::EventRef> AdaptiveNet::sorted_events(
    std::span<const TimedEvent> visit_events, std::span<const TimedEvent> med_events) const {
  for (const TimedEvent& e : visit_events) {
    require(e.features.size() == cfg_.visit_width,
            "psi_pool: visit event width " + std::to_string(e.features.size()) + " != " +
                std::to_string(cfg_.visit_width));
  }
  for (const TimedEvent& e : med_events) {
    require(e.features.size() == cfg_.med_width,
            "psi_pool: med event width " + std::to_string(e.features.size()) + " != " +
                std::to_string(cfg_.med_width));
  }
  std::vector<EventRef> refs;
  refs.reserve(visit_events.size() + med_events.size());
  for (const TimedEvent& e : visit_events) refs.push_back(EventRef{&e, false});
  for (const TimedEvent& e : med_events) refs.push_back(EventRef{&e, true});
  std::sort(refs.begin(), refs.end(), [](const EventRef& a, const EventRef& b) {
    if (a.event->time != b.event->time) return a.event->time < b.event->time;
    if (a.is_med != b.is_med) return !a.is_med;  // visit before medication
    return std::lexicographical_compare(a.event->features.begin(), a.event->features.end(),
                                        b.event->features.begin(), b.event->features.end());
  });
  return refs;
}

Vec AdaptiveNet::psi_pool(std::span<const TimedEvent> visit_events,
                          std::span<const TimedEvent> med_events) const {
  const auto refs = sorted_events(visit_events, med_events);
  std::vector<Vec> latents;
  latents.reserve(refs.size());
  for (const EventRef& ref : refs) {
    latents.push_back(ref.is_med ? encode_med_latent(ref.event->features)
                                 : encode_visit_latent(ref.event->features));
  }
  return lstm_.forward(latents);
}

double AdaptiveNet::predict(const sample::StructuredSample& s) const {
  require(s.patient_vec.size() == cfg_.patient_width,
          "predict: patient vector width mismatch");
  Vec h = psi_pool(s.visit_events, s.med_events);
  h.insert(h.end(), s.patient_vec.begin(), s.patient_vec.end());
  for (const DenseLayer& l : rho_) h = l.forward(h);
  return h[0];
}

NodeId AdaptiveNet::forward(Tape& tape, const sample::StructuredSample& s,
                            std::mt19937_64* dropout_rng) {
  require(s.patient_vec.size() == cfg_.patient_width,
          "forward: patient vector width mismatch");
  const bool training_dropout = dropout_rng != nullptr && cfg_.dropout_rate > 0.0;
  auto maybe_dropout = [&](NodeId node) {
    if (!training_dropout) return node;
    return math::dropout_forward(tape, node, cfg_.dropout_rate, true, *dropout_rng);
  };

  const auto refs = sorted_events(s.visit_events, s.med_events);
  std::vector<NodeId> latents;
  latents.reserve(refs.size());
  for (const EventRef& ref : refs) {
    NodeId h = tape.leaf(ref.event->features);
    auto& stack = ref.is_med ? phi_med_ : phi_visit_;
    for (DenseLayer& l : stack) h = maybe_dropout(l.forward(tape, h));
    if (shared_last_) h = maybe_dropout(shared_last_->forward(tape, h));
    latents.push_back(h);
  }
  NodeId pooled = lstm_.forward(tape, latents);
  NodeId h = math::concat(tape, pooled, tape.leaf(s.patient_vec));
  for (std::size_t i = 0; i < rho_.size(); ++i) {
    h = rho_[i].forward(tape, h);
    if (i + 1 < rho_.size()) h = maybe_dropout(h);  // never after the linear head
  }
  return h;
}

std::vector<math::ParamBlock*> AdaptiveNet::parameters() {
  std::vector<math::ParamBlock*> out;
  auto add = [&out](std::vector<math::ParamBlock*> blocks) {
    out.insert(out.end(), blocks.begin(), blocks.end());
  };
  for (DenseLayer& l : phi_visit_) add(l.parameters());
  for (DenseLayer& l : phi_med_) add(l.parameters());
  if (shared_last_) add(shared_last_->parameters());
  add(lstm_.parameters());
  for (DenseLayer& l : rho_) add(l.parameters());
  return out;
}

}  // namespace anet::model

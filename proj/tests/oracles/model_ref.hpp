#pragma once

// Scalar-loop reimplementation of the full event-encoder/LSTM/head
// pipeline, driven only by the named parameter blocks a model exposes.
// Used as the oracle for model forward-pass tests; assumes the default
// topology of one hidden encoder layer, an optional shared layer, and a
// two-hidden-layer head.

#include <algorithm>
#include <map>
#include <string>

#include "anet/model/adaptivenet.hpp"
#include "oracles/scalar_ref.hpp"

namespace oracle {

struct ParamView {
  std::map<std::string, const anet::math::ParamBlock*> blocks;

  explicit ParamView(std::vector<anet::math::ParamBlock*> params) {
    for (const auto* p : params) blocks.emplace(p->name, p);
  }

  Mat mat(const std::string& name) const {
    const anet::math::ParamBlock& p = *blocks.at(name);
    Mat m(p.rows, std::vector<double>(p.cols));
    for (std::size_t r = 0; r < p.rows; ++r)
      for (std::size_t c = 0; c < p.cols; ++c) m[r][c] = p.at(r, c);
    return m;
  }

  Vec vec(const std::string& name) const { return blocks.at(name)->value; }
  bool has(const std::string& name) const { return blocks.contains(name); }
};

inline Vec encoder_ref(const ParamView& pv, const std::string& prefix, const Vec& features) {
  Vec h = relu_ref(matvec_ref(pv.mat(prefix + "0.w"), features, pv.vec(prefix + "0.b")));
  if (pv.has("phi_shared.w")) {
    h = relu_ref(matvec_ref(pv.mat("phi_shared.w"), h, pv.vec("phi_shared.b")));
  }
  return h;
}

inline double adaptivenet_ref(anet::model::AdaptiveNet& net,
                              const anet::sample::StructuredSample& s) {
  const ParamView pv(net.parameters());

  struct Tagged {
    anet::data::Date time;
    bool is_med;
    const anet::sample::TimedEvent* event;
  };
  std::vector<Tagged> events;
  for (const auto& e : s.visit_events) events.push_back({e.time, false, &e});
  for (const auto& e : s.med_events) events.push_back({e.time, true, &e});
  std::sort(events.begin(), events.end(), [](const Tagged& a, const Tagged& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.is_med != b.is_med) return !a.is_med;
    return std::lexicographical_compare(a.event->features.begin(), a.event->features.end(),
                                        b.event->features.begin(), b.event->features.end());
  });

  std::vector<Vec> latents;
  for (const Tagged& t : events) {
    latents.push_back(encoder_ref(pv, t.is_med ? "phi_med" : "phi_visit", t.event->features));
  }

  LstmWeights w;
  w.wi = pv.mat("lstm.wi");
  w.wf = pv.mat("lstm.wf");
  w.wg = pv.mat("lstm.wg");
  w.wo = pv.mat("lstm.wo");
  w.bi = pv.vec("lstm.bi");
  w.bf = pv.vec("lstm.bf");
  w.bg = pv.vec("lstm.bg");
  w.bo = pv.vec("lstm.bo");
  Vec h = lstm_ref(w, latents, net.config().lstm_hidden_dim);

  h.insert(h.end(), s.patient_vec.begin(), s.patient_vec.end());
  h = relu_ref(matvec_ref(pv.mat("rho0.w"), h, pv.vec("rho0.b")));
  h = relu_ref(matvec_ref(pv.mat("rho1.w"), h, pv.vec("rho1.b")));
  h = matvec_ref(pv.mat("rho_out.w"), h, pv.vec("rho_out.b"));
  return h[0];
}

inline double fcn_ref(anet::model::FcnModel& net, const anet::sample::FlatSample& s) {
  const ParamView pv(net.parameters());
  Vec h = s.features;
  for (std::size_t i = 0; i < net.config().hidden_layers; ++i) {
    const std::string prefix = "fcn" + std::to_string(i);
    h = relu_ref(matvec_ref(pv.mat(prefix + ".w"), h, pv.vec(prefix + ".b")));
  }
  return matvec_ref(pv.mat("fcn_out.w"), h, pv.vec("fcn_out.b"))[0];
}

}  // namespace oracle

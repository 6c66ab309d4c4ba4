#pragma once

// Brute-force sample enumerator, written independently of the library's
// generate_samples: plain nested loops and linear scans only. Used as the
// oracle for sample-generation equivalence tests.

#include <algorithm>
#include <vector>

#include "anet/sample/samplegen.hpp"

namespace oracle {

inline std::vector<anet::sample::StructuredSample> brute_force_samples(
    std::vector<anet::data::PatientRecord> records, const anet::sample::SamplingConfig& cfg,
    const anet::data::FeatureScaler& scaler) {
  using anet::data::years_between;
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.id < b.id; });

  std::vector<anet::sample::StructuredSample> out;
  for (const anet::data::PatientRecord& record : records) {
    std::size_t scored_count = 0;
    for (const auto& v : record.visits) {
      if (v.das28bsr_score.has_value()) ++scored_count;
    }
    if (scored_count < cfg.min_visits) continue;

    for (std::size_t i = 0; i < record.visits.size(); ++i) {
      const auto& anchor = record.visits[i];
      if (!anchor.das28bsr_score) continue;
      for (std::size_t j = 0; j < record.visits.size(); ++j) {
        const auto& follow = record.visits[j];
        if (!follow.das28bsr_score) continue;
        if (!(follow.time > anchor.time)) continue;
        const double horizon = years_between(anchor.time, follow.time);
        if (horizon < cfg.min_horizon_years) continue;
        if (horizon > cfg.max_horizon_years) continue;

        bool med_between = false;
        for (const auto& m : record.medications) {
          if (anchor.time <= m.time && m.time <= follow.time) med_between = true;
        }
        if (med_between) continue;

        anet::sample::StructuredSample s;
        s.patient_id = record.id;
        s.patient_vec = anet::data::encode_patient(record.patient, scaler);
        s.anchor_time = anchor.time;
        s.delta_t = horizon;
        s.current_score = *anchor.das28bsr_score;
        s.future_score = *follow.das28bsr_score;
        s.label = *follow.das28bsr_score - *anchor.das28bsr_score;
        for (const auto& v : record.visits) {
          if (v.time > anchor.time) continue;
          if (years_between(v.time, anchor.time) >= cfg.max_history_years) continue;
          s.visit_events.push_back(anet::sample::TimedEvent{
              v.time, anet::data::encode_visit(v, years_between(v.time, follow.time), scaler)});
        }
        for (const auto& m : record.medications) {
          if (m.time > anchor.time) continue;
          if (years_between(m.time, anchor.time) >= cfg.max_history_years) continue;
          s.med_events.push_back(anet::sample::TimedEvent{
              m.time, anet::data::encode_med(m, years_between(m.time, follow.time), scaler)});
        }
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

}  // namespace oracle

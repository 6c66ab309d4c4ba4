#pragma once

#include <iosfwd>

#include "anet/data/encode.hpp"

namespace anet::sample {

struct SamplingConfig {
  double max_history_years = 5.0;
  double min_horizon_years = 0.25;  // 3 months
  double max_horizon_years = 1.0;
  std::size_t min_visits = 3;  // scored visits required per patient

  void check() const {
    require(min_horizon_years > 0.0 && min_horizon_years <= max_horizon_years,
            "SamplingConfig: need 0 < min_horizon <= max_horizon");
    require(max_history_years > 0.0, "SamplingConfig: max_history must be > 0");
  }
};

struct TimedEvent {
  data::Date time;
  Vec features;

  bool operator==(const TimedEvent&) const = default;
};

// One training instance: the encoded history up to anchor time t, the
// prediction horizon delta_t = t' - t, and the observed score change.
struct StructuredSample {
  std::string patient_id;
  Vec patient_vec;                       // width 8
  std::vector<TimedEvent> visit_events;  // ascending time, all <= anchor_time
  std::vector<TimedEvent> med_events;    // ascending time, all <= anchor_time
  double delta_t = 0.0;                  // years
  double label = 0.0;                    // score(t') - score(t)
  double current_score = 0.0;            // score(t)
  double future_score = 0.0;             // score(t'), evaluation bookkeeping
  data::Date anchor_time;                // t
};

// Emits one sample per (anchor visit t, follow-up visit t') pair where both
// visits carry a score, min_horizon <= t'-t <= max_horizon, and no
// medication event falls in the closed interval [t, t']. Patients with
// fewer than cfg.min_visits scored visits yield nothing. Event history is
// restricted to (t - max_history, t]; each event's delta-t feature is the
// time from the event to t'. Output is ordered by patient id, then t,
// then t'. Records must pass validate_record.
std::vector<StructuredSample> generate_samples(std::span<const data::PatientRecord> records,
                                               const SamplingConfig& cfg,
                                               const data::FeatureScaler& scaler);

// Keeps events with time in (t - max_history, t]; stable order.
template <typename Event>
std::vector<Event> truncate_history(std::span<const Event> events, data::Date t,
                                    double max_history_years) {
  std::vector<Event> out;
  for (const Event& e : events) {
    if (e.time <= t && data::years_between(e.time, t) < max_history_years) out.push_back(e);
  }
  return out;
}

struct FlatSample {
  Vec features;
  double label = 0.0;
  double current_score = 0.0;
  double future_score = 0.0;
};

enum class OverflowPolicy {
  Strict,          // sample exceeding n_max/m_max is an error
  TruncateOldest,  // drop oldest events beyond the slot budget
};

inline std::size_t flat_width(std::size_t n_max, std::size_t m_max) {
  return data::kPatientEncodingWidth + n_max * data::kVisitEncodingWidth +
         m_max * data::kMedEncodingWidth;
}

// Fixed-width padded form for fixed-input baselines: patient block, then
// n_max visit slots most-recent-first, then m_max med slots; every unused
// slot position is filled with -1.
std::vector<FlatSample> flatten(std::span<const StructuredSample> samples, std::size_t n_max,
                                std::size_t m_max, OverflowPolicy policy = OverflowPolicy::Strict);

std::vector<std::string> flat_slot_names(std::size_t n_max, std::size_t m_max);

// Line-delimited structured sample format (one JSON object per sample).
std::string sample_to_json_line(const StructuredSample& s);
StructuredSample sample_from_json_line(const std::string& line);
void write_samples_jsonl(std::span<const StructuredSample> samples, std::ostream& out);

// CSV: flat feature columns, then the label.
void write_flat_csv(std::ostream& out, std::span<const FlatSample> samples, std::size_t n_max,
                    std::size_t m_max);

}  // namespace anet::sample

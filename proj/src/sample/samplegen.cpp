#include "anet/sample/samplegen.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "anet/data/io.hpp"

namespace anet::sample {

using data::Date;
using data::PatientRecord;
using data::years_between;

std::vector<StructuredSample> generate_samples(std::span<const PatientRecord> records,
                                               const SamplingConfig& cfg,
                                               const data::FeatureScaler& scaler) {
  cfg.check();
  require(scaler.fitted(), "generate_samples: scaler not fitted");

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });

  std::vector<StructuredSample> out;
  for (const std::size_t idx : order) {
    const PatientRecord& record = records[idx];
    const auto violations = data::validate_record(record);
    if (!violations.empty()) {
      throw ContractError("generate_samples: record '" + record.id + "' is invalid: " +
                          violations.front().field + " " + violations.front().rule);
    }

    std::vector<std::size_t> scored;
    for (std::size_t i = 0; i < record.visits.size(); ++i) {
      if (record.visits[i].das28bsr_score) scored.push_back(i);
    }
    if (scored.size() < cfg.min_visits) continue;

    const Vec patient_vec = data::encode_patient(record.patient, scaler);

    for (const std::size_t anchor : scored) {
      const Date t = record.visits[anchor].time;
      for (const std::size_t follow : scored) {
        const Date t_next = record.visits[follow].time;
        if (!(t_next > t)) continue;
        const double horizon = years_between(t, t_next);
        if (horizon < cfg.min_horizon_years || horizon > cfg.max_horizon_years) continue;

        // medication cutoff: no adjustment inside [t, t']
        const auto first_med = std::lower_bound(
            record.medications.begin(), record.medications.end(), t,
            [](const data::MedicationEvent& m, Date d) { return m.time < d; });
        if (first_med != record.medications.end() && first_med->time <= t_next) continue;

        StructuredSample s;
        s.patient_id = record.id;
        s.patient_vec = patient_vec;
        s.anchor_time = t;
        s.delta_t = horizon;
        s.current_score = *record.visits[anchor].das28bsr_score;
        s.future_score = *record.visits[follow].das28bsr_score;
        s.label = s.future_score - s.current_score;

        for (const data::VisitEvent& v : record.visits) {
          if (v.time > t || years_between(v.time, t) >= cfg.max_history_years) continue;
          s.visit_events.push_back(
              TimedEvent{v.time, data::encode_visit(v, years_between(v.time, t_next), scaler)});
        }
        for (const data::MedicationEvent& m : record.medications) {
          if (m.time > t || years_between(m.time, t) >= cfg.max_history_years) continue;
          s.med_events.push_back(
              TimedEvent{m.time, data::encode_med(m, years_between(m.time, t_next), scaler)});
        }
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

namespace {

void place_events(Vec& features, std::size_t base, std::size_t slot_count, std::size_t width,
                  std::span<const TimedEvent> events, OverflowPolicy policy,
                  const char* what) {
  if (events.size() > slot_count && policy == OverflowPolicy::Strict) {
    throw ContractError(std::string("flatten: sample has ") + std::to_string(events.size()) +
                        " " + what + " events but only " + std::to_string(slot_count) +
                        " slots");
  }
  // most-recent-first: the anchor event always lands in slot 0
  const std::size_t used = std::min(events.size(), slot_count);
  for (std::size_t k = 0; k < used; ++k) {
    const TimedEvent& e = events[events.size() - 1 - k];
    require(e.features.size() == width, "flatten: event width mismatch");
    std::copy(e.features.begin(), e.features.end(),
              features.begin() + static_cast<std::ptrdiff_t>(base + k * width));
  }
}

}  // namespace

std::vector<FlatSample> flatten(std::span<const StructuredSample> samples, std::size_t n_max,
                                std::size_t m_max, OverflowPolicy policy) {
  std::vector<FlatSample> out;
  out.reserve(samples.size());
  const std::size_t width = flat_width(n_max, m_max);
  for (const StructuredSample& s : samples) {
    FlatSample f;
    f.label = s.label;
    f.current_score = s.current_score;
    f.future_score = s.future_score;
    f.features.assign(width, -1.0);
    require(s.patient_vec.size() == data::kPatientEncodingWidth,
            "flatten: patient vector width mismatch");
    std::copy(s.patient_vec.begin(), s.patient_vec.end(), f.features.begin());
    place_events(f.features, data::kPatientEncodingWidth, n_max, data::kVisitEncodingWidth,
                 s.visit_events, policy, "visit");
    place_events(f.features, data::kPatientEncodingWidth + n_max * data::kVisitEncodingWidth,
                 m_max, data::kMedEncodingWidth, s.med_events, policy, "med");
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<std::string> flat_slot_names(std::size_t n_max, std::size_t m_max) {
  std::vector<std::string> names = data::patient_slot_names();
  const auto visit = data::visit_slot_names();
  const auto med = data::med_slot_names();
  for (std::size_t k = 0; k < n_max; ++k) {
    for (const std::string& s : visit) names.push_back("visit" + std::to_string(k) + "." + s);
  }
  for (std::size_t k = 0; k < m_max; ++k) {
    for (const std::string& s : med) names.push_back("med" + std::to_string(k) + "." + s);
  }
  return names;
}

namespace {

using nlohmann::json;

json events_to_json(std::span<const TimedEvent> events) {
  json arr = json::array();
  for (const TimedEvent& e : events) {
    arr.push_back(json{{"time", data::format_date(e.time)}, {"features", e.features}});
  }
  return arr;
}

std::vector<TimedEvent> events_from_json(const json& arr) {
  std::vector<TimedEvent> out;
  for (const json& e : arr) {
    out.push_back(TimedEvent{data::parse_date(e.at("time").get<std::string>()),
                             e.at("features").get<Vec>()});
  }
  return out;
}

}  // namespace

std::string sample_to_json_line(const StructuredSample& s) {
  json j;
  j["patient_id"] = s.patient_id;
  j["anchor_time"] = data::format_date(s.anchor_time);
  j["delta_t"] = s.delta_t;
  j["label"] = s.label;
  j["current_score"] = s.current_score;
  j["future_score"] = s.future_score;
  j["patient_vec"] = s.patient_vec;
  j["visit_events"] = events_to_json(s.visit_events);
  j["med_events"] = events_to_json(s.med_events);
  return j.dump();
}

StructuredSample sample_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid sample JSON: ") + e.what());
  }
  StructuredSample s;
  try {
    s.patient_id = j.at("patient_id").get<std::string>();
    s.anchor_time = data::parse_date(j.at("anchor_time").get<std::string>());
    s.delta_t = j.at("delta_t").get<double>();
    s.label = j.at("label").get<double>();
    s.current_score = j.at("current_score").get<double>();
    s.future_score = j.at("future_score").get<double>();
    s.patient_vec = j.at("patient_vec").get<Vec>();
    s.visit_events = events_from_json(j.at("visit_events"));
    s.med_events = events_from_json(j.at("med_events"));
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid sample line: ") + e.what());
  }
  return s;
}

void write_samples_jsonl(std::span<const StructuredSample> samples, std::ostream& out) {
  for (const StructuredSample& s : samples) out << sample_to_json_line(s) << '\n';
}

void write_flat_csv(std::ostream& out, std::span<const FlatSample> samples, std::size_t n_max,
                    std::size_t m_max) {
  const auto names = flat_slot_names(n_max, m_max);
  for (const std::string& n : names) out << n << ',';
  out << "label\n";
  for (const FlatSample& s : samples) {
    require(s.features.size() == names.size(), "write_flat_csv: width mismatch");
    for (const double v : s.features) out << data::format_double(v) << ',';
    out << data::format_double(s.label) << '\n';
  }
}

}  // namespace anet::sample

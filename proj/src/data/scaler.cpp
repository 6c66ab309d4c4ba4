#include "anet/data/scaler.hpp"

#include <algorithm>

namespace anet::data {

void FeatureScaler::fit(std::span<const PatientRecord> training_records,
                        double delta_t_max_years) {
  require(delta_t_max_years > 0.0, "FeatureScaler::fit: delta_t_max_years must be > 0");
  ranges_.clear();

  auto observe = [this](std::string_view key, double value) {
    auto it = ranges_.find(key);
    if (it == ranges_.end()) {
      it = ranges_.emplace(std::string(key), Range{}).first;
    }
    Range& r = it->second;
    if (!r.has_data) {
      r.min = r.max = value;
      r.has_data = true;
    } else {
      r.min = std::min(r.min, value);
      r.max = std::max(r.max, value);
    }
  };

  for (const PatientRecord& record : training_records) {
    observe(kAgeKey, record.patient.age);
    if (record.patient.disease_duration) observe(kDurationKey, *record.patient.disease_duration);
    for (const VisitEvent& v : record.visits) {
      for (const VisitNumericField& f : visit_numeric_fields()) {
        if (const auto& value = v.*(f.member)) observe(visit_key(f.name), *value);
      }
    }
  }

  observe(kDeltaTKey, 0.0);
  observe(kDeltaTKey, delta_t_max_years);
  fitted_ = true;
}

double FeatureScaler::scale(std::string_view key, double raw) const {
  require(fitted_, "FeatureScaler: not fitted");
  const auto it = ranges_.find(key);
  if (it == ranges_.end() || !it->second.has_data) return 0.0;
  const Range& r = it->second;
  if (r.max <= r.min) return 0.0;
  return std::clamp((raw - r.min) / (r.max - r.min), 0.0, 1.0);
}

double FeatureScaler::unscale(std::string_view key, double scaled) const {
  require(fitted_, "FeatureScaler: not fitted");
  const auto it = ranges_.find(key);
  if (it == ranges_.end() || !it->second.has_data) return 0.0;
  const Range& r = it->second;
  return r.min + scaled * (r.max - r.min);
}

const FeatureScaler::Range& FeatureScaler::range(std::string_view key) const {
  const auto it = ranges_.find(key);
  require(it != ranges_.end(), "FeatureScaler: unknown feature '" + std::string(key) + "'");
  return it->second;
}

void FeatureScaler::set_ranges(std::map<std::string, Range, std::less<>> ranges) {
  ranges_ = std::move(ranges);
  fitted_ = true;
}

}  // namespace anet::data

#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "anet/data/record.hpp"

namespace anet::data {

// Min-max scaler to [0,1], fitted per numeric feature on training records
// only. Out-of-range values at apply time are clipped into [0,1]. The
// delta-t feature has no per-record sample at fit time, so its range is
// fixed from the sampling configuration: [0, max_history + max_horizon].
class FeatureScaler {
 public:
  struct Range {
    double min = 0.0;
    double max = 0.0;
    bool has_data = false;
  };

  void fit(std::span<const PatientRecord> training_records, double delta_t_max_years);

  bool fitted() const { return fitted_; }
  double scale(std::string_view key, double raw) const;
  double unscale(std::string_view key, double scaled) const;
  const Range& range(std::string_view key) const;

  const std::map<std::string, Range, std::less<>>& ranges() const { return ranges_; }
  void set_ranges(std::map<std::string, Range, std::less<>> ranges);  // checkpoint restore

  static std::string visit_key(std::string_view field) { return "visit." + std::string(field); }
  static constexpr std::string_view kAgeKey = "patient.age";
  static constexpr std::string_view kDurationKey = "patient.disease_duration";
  static constexpr std::string_view kDeltaTKey = "delta_t";

 private:
  std::map<std::string, Range, std::less<>> ranges_;
  bool fitted_ = false;
};

}  // namespace anet::data

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anet/common.hpp"

namespace anet::data {

// Calendar day, stored as days since 1970-01-01.
struct Date {
  std::int32_t days = 0;
  auto operator<=>(const Date&) const = default;
};

Date parse_date(std::string_view iso);  // "YYYY-MM-DD", throws DataError
std::string format_date(Date d);
inline Date add_days(Date d, std::int32_t n) { return Date{d.days + n}; }
inline double years_between(Date from, Date to) {
  return static_cast<double>(to.days - from.days) / 365.25;
}

enum class Gender { Male, Female };
enum class TriState { Yes, No };
enum class MorningStiffness {
  AllDay,
  LtHalfHour,
  HalfToOneHour,
  GtFourHours,
  TwelveHours,
  TwentyFourHours,
  No
};
enum class Smoker { Current, Former, Never };
enum class Drug {
  DmardMtx,
  Prednison,
  Adalimumab,
  Etanercept,
  Tocilizumab,
  Abatacept,
  Rituximab,
  Golimumab,
  Other
};
enum class MedType { Prednison, Dmard, Biologic, Other };
enum class Dose { No, Lt10mg, From10To15mg, Gt15mg };

inline constexpr std::size_t kMorningStiffnessCount = 7;
inline constexpr std::size_t kSmokerCount = 3;
inline constexpr std::size_t kDrugCount = 9;
inline constexpr std::size_t kMedTypeCount = 4;
inline constexpr std::size_t kDoseCount = 4;

std::string_view to_string(Gender g);
std::string_view to_string(TriState t);
std::string_view to_string(MorningStiffness m);
std::string_view to_string(Smoker s);
std::string_view to_string(Drug d);
std::string_view to_string(MedType t);
std::string_view to_string(Dose d);

// All throw DataError on unknown names.
Gender gender_from_string(std::string_view s);
TriState tristate_from_string(std::string_view s);
MorningStiffness morning_stiffness_from_string(std::string_view s);
Smoker smoker_from_string(std::string_view s);
Drug drug_from_string(std::string_view s);
MedType med_type_from_string(std::string_view s);
Dose dose_from_string(std::string_view s);

struct PatientStatic {
  double age = 0.0;  // years
  std::optional<double> disease_duration;  // years
  Gender gender = Gender::Female;
  std::optional<TriState> rheumatoid_factor;
  std::optional<TriState> anti_ccp;
};

struct VisitEvent {
  Date time;
  std::optional<double> minimal_disease_activity;
  std::optional<double> number_swollen_joints;
  std::optional<double> number_painful_joints;
  std::optional<double> bsr;
  std::optional<double> das28bsr_score;  // prediction target score
  std::optional<double> pain_level;
  std::optional<double> disease_activity_index;
  std::optional<double> haq_score;
  std::optional<double> weight_kg;
  std::optional<double> height_cm;
  std::optional<double> crp;
  std::optional<MorningStiffness> morning_stiffness;
  std::optional<Smoker> smoker;
};

// The numeric visit fields in encoding order.
struct VisitNumericField {
  const char* name;
  std::optional<double> VisitEvent::* member;
};
std::span<const VisitNumericField> visit_numeric_fields();
inline constexpr std::size_t kVisitNumericCount = 11;

struct MedicationEvent {
  Date time;
  Drug drug = Drug::Other;
  MedType type = MedType::Other;
  Dose dose = Dose::No;
};

struct PatientRecord {
  std::string id;
  PatientStatic patient;
  std::vector<VisitEvent> visits;        // sorted non-decreasing by time
  std::vector<MedicationEvent> medications;  // sorted non-decreasing by time
};

struct Violation {
  std::string field;
  std::string rule;
};

// Returns every invariant breach; empty means the record is valid. Never
// throws: malformed content is reported, not fatal.
std::vector<Violation> validate_record(const PatientRecord& record, Date epoch = Date{0});

}  // namespace anet::data

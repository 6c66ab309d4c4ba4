#include "anet/data/record.hpp"

#include <array>
#include <charconv>
#include <chrono>

namespace anet::data {
namespace {

template <typename E, std::size_t N>
E from_name(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table,
            const char* what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw DataError(std::string("unknown ") + what + " value: '" + std::string(s) + "'");
}

constexpr std::array<std::pair<std::string_view, Gender>, 2> kGenderNames{
    {{"male", Gender::Male}, {"female", Gender::Female}}};
constexpr std::array<std::pair<std::string_view, TriState>, 2> kTriStateNames{
    {{"yes", TriState::Yes}, {"no", TriState::No}}};
constexpr std::array<std::pair<std::string_view, MorningStiffness>, 7> kStiffnessNames{
    {{"all_day", MorningStiffness::AllDay},
     {"<0.5h", MorningStiffness::LtHalfHour},
     {"0.5-1h", MorningStiffness::HalfToOneHour},
     {">4h", MorningStiffness::GtFourHours},
     {"12h", MorningStiffness::TwelveHours},
     {"24h", MorningStiffness::TwentyFourHours},
     {"no", MorningStiffness::No}}};
constexpr std::array<std::pair<std::string_view, Smoker>, 3> kSmokerNames{
    {{"current", Smoker::Current}, {"former", Smoker::Former}, {"never", Smoker::Never}}};
constexpr std::array<std::pair<std::string_view, Drug>, 9> kDrugNames{
    {{"dmard_mtx", Drug::DmardMtx},
     {"prednison", Drug::Prednison},
     {"adalimumab", Drug::Adalimumab},
     {"etanercept", Drug::Etanercept},
     {"tocilizumab", Drug::Tocilizumab},
     {"abatacept", Drug::Abatacept},
     {"rituximab", Drug::Rituximab},
     {"golimumab", Drug::Golimumab},
     {"other", Drug::Other}}};
constexpr std::array<std::pair<std::string_view, MedType>, 4> kMedTypeNames{
    {{"prednison", MedType::Prednison},
     {"dmard", MedType::Dmard},
     {"biologic", MedType::Biologic},
     {"other", MedType::Other}}};
constexpr std::array<std::pair<std::string_view, Dose>, 4> kDoseNames{
    {{"no", Dose::No},
     {"<10mg", Dose::Lt10mg},
     {"10-15mg", Dose::From10To15mg},
     {">15mg", Dose::Gt15mg}}};

}  // namespace

Date parse_date(std::string_view iso) {
  int y = 0, m = 0, d = 0;
  auto parse_int = [](std::string_view s, int& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
  };
  const bool shape_ok = iso.size() == 10 && iso[4] == '-' && iso[7] == '-' &&
                        parse_int(iso.substr(0, 4), y) && parse_int(iso.substr(5, 2), m) &&
                        parse_int(iso.substr(8, 2), d);
  if (!shape_ok) throw DataError("invalid date '" + std::string(iso) + "', expected YYYY-MM-DD");
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(iso) + "'");
  const std::chrono::sys_days days{ymd};
  return Date{static_cast<std::int32_t>(days.time_since_epoch().count())};
}

std::string format_date(Date d) {
  const std::chrono::sys_days days{std::chrono::days{d.days}};
  const std::chrono::year_month_day ymd{days};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string_view to_string(Gender g) { return g == Gender::Male ? "male" : "female"; }
std::string_view to_string(TriState t) { return t == TriState::Yes ? "yes" : "no"; }
std::string_view to_string(MorningStiffness m) {
  return kStiffnessNames[static_cast<std::size_t>(m)].first;
}
std::string_view to_string(Smoker s) { return kSmokerNames[static_cast<std::size_t>(s)].first; }
std::string_view to_string(Drug d) { return kDrugNames[static_cast<std::size_t>(d)].first; }
std::string_view to_string(MedType t) { return kMedTypeNames[static_cast<std::size_t>(t)].first; }
std::string_view to_string(Dose d) { return kDoseNames[static_cast<std::size_t>(d)].first; }

Gender gender_from_string(std::string_view s) { return from_name(s, kGenderNames, "gender"); }
TriState tristate_from_string(std::string_view s) {
  return from_name(s, kTriStateNames, "tri-state");
}
MorningStiffness morning_stiffness_from_string(std::string_view s) {
  return from_name(s, kStiffnessNames, "morning_stiffness");
}
Smoker smoker_from_string(std::string_view s) { return from_name(s, kSmokerNames, "smoker"); }
Drug drug_from_string(std::string_view s) { return from_name(s, kDrugNames, "drug"); }
MedType med_type_from_string(std::string_view s) { return from_name(s, kMedTypeNames, "type"); }
Dose dose_from_string(std::string_view s) { return from_name(s, kDoseNames, "dose"); }

std::span<const VisitNumericField> visit_numeric_fields() {
  static const std::array<VisitNumericField, kVisitNumericCount> fields{{
      {"minimal_disease_activity", &VisitEvent::minimal_disease_activity},
      {"number_swollen_joints", &VisitEvent::number_swollen_joints},
      {"number_painful_joints", &VisitEvent::number_painful_joints},
      {"bsr", &VisitEvent::bsr},
      {"das28bsr_score", &VisitEvent::das28bsr_score},
      {"pain_level", &VisitEvent::pain_level},
      {"disease_activity_index", &VisitEvent::disease_activity_index},
      {"haq_score", &VisitEvent::haq_score},
      {"weight_kg", &VisitEvent::weight_kg},
      {"height_cm", &VisitEvent::height_cm},
      {"crp", &VisitEvent::crp},
  }};
  return fields;
}

std::vector<Violation> validate_record(const PatientRecord& record, Date epoch) {
  std::vector<Violation> out;
  auto flag = [&out](std::string field, std::string rule) {
    out.push_back(Violation{std::move(field), std::move(rule)});
  };

  if (record.patient.age < 0.0) flag("patient.age", "must be >= 0");
  if (record.patient.disease_duration && *record.patient.disease_duration < 0.0) {
    flag("patient.disease_duration", "must be >= 0 when present");
  }

  for (std::size_t i = 0; i < record.visits.size(); ++i) {
    const VisitEvent& v = record.visits[i];
    const std::string where = "visits[" + std::to_string(i) + "]";
    if (i > 0 && v.time < record.visits[i - 1].time) {
      flag("visits", "not time-ordered at index " + std::to_string(i));
    }
    if (v.time < epoch) flag(where + ".time", "before epoch " + format_date(epoch));
    if (v.number_swollen_joints && *v.number_swollen_joints < 0.0) {
      flag(where + ".number_swollen_joints", "count must be >= 0");
    }
    if (v.number_painful_joints && *v.number_painful_joints < 0.0) {
      flag(where + ".number_painful_joints", "count must be >= 0");
    }
  }

  for (std::size_t i = 0; i < record.medications.size(); ++i) {
    const MedicationEvent& m = record.medications[i];
    if (i > 0 && m.time < record.medications[i - 1].time) {
      flag("medications", "not time-ordered at index " + std::to_string(i));
    }
    if (m.time < epoch) {
      flag("medications[" + std::to_string(i) + "].time", "before epoch " + format_date(epoch));
    }
  }

  return out;
}

}  // namespace anet::data

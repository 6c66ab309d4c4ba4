#include "anet/data/encode.hpp"

namespace anet::data {

std::vector<std::string> visit_slot_names() {
  std::vector<std::string> names;
  names.reserve(kVisitEncodingWidth);
  for (const VisitNumericField& f : visit_numeric_fields()) {
    names.push_back("visit." + std::string(f.name));
    names.push_back("visit." + std::string(f.name) + "_missing");
  }
  for (std::size_t i = 0; i < kMorningStiffnessCount; ++i) {
    names.push_back("visit.morning_stiffness=" +
                    std::string(to_string(static_cast<MorningStiffness>(i))));
  }
  for (std::size_t i = 0; i < kSmokerCount; ++i) {
    names.push_back("visit.smoker=" + std::string(to_string(static_cast<Smoker>(i))));
  }
  names.push_back("visit.delta_t");
  return names;
}

std::vector<std::string> med_slot_names() {
  std::vector<std::string> names;
  names.reserve(kMedEncodingWidth);
  for (std::size_t i = 0; i < kDrugCount; ++i) {
    names.push_back("med.drug=" + std::string(to_string(static_cast<Drug>(i))));
  }
  for (std::size_t i = 0; i < kMedTypeCount; ++i) {
    names.push_back("med.type=" + std::string(to_string(static_cast<MedType>(i))));
  }
  for (std::size_t i = 0; i < kDoseCount; ++i) {
    names.push_back("med.dose=" + std::string(to_string(static_cast<Dose>(i))));
  }
  names.push_back("med.delta_t");
  return names;
}

std::vector<std::string> patient_slot_names() {
  return {"patient.age",          "patient.disease_duration", "patient.gender=male",
          "patient.gender=female", "patient.r_factor=yes",     "patient.r_factor=no",
          "patient.anti_ccp=yes",  "patient.anti_ccp=no"};
}

Vec encode_visit(const VisitEvent& v, double delta_t_years, const FeatureScaler& scaler) {
  require(scaler.fitted(), "encode_visit: scaler not fitted");
  Vec out;
  out.reserve(kVisitEncodingWidth);
  for (const VisitNumericField& f : visit_numeric_fields()) {
    const auto& value = v.*(f.member);
    if (value) {
      out.push_back(scaler.scale(FeatureScaler::visit_key(f.name), *value));
      out.push_back(0.0);
    } else {
      out.push_back(0.0);
      out.push_back(1.0);
    }
  }
  for (std::size_t i = 0; i < kMorningStiffnessCount; ++i) {
    out.push_back(v.morning_stiffness && static_cast<std::size_t>(*v.morning_stiffness) == i
                      ? 1.0
                      : 0.0);
  }
  for (std::size_t i = 0; i < kSmokerCount; ++i) {
    out.push_back(v.smoker && static_cast<std::size_t>(*v.smoker) == i ? 1.0 : 0.0);
  }
  out.push_back(scaler.scale(FeatureScaler::kDeltaTKey, delta_t_years));
  return out;
}

Vec encode_med(const MedicationEvent& m, double delta_t_years, const FeatureScaler& scaler) {
  require(scaler.fitted(), "encode_med: scaler not fitted");
  Vec out(kMedEncodingWidth, 0.0);
  out[static_cast<std::size_t>(m.drug)] = 1.0;
  out[kDrugCount + static_cast<std::size_t>(m.type)] = 1.0;
  out[kDrugCount + kMedTypeCount + static_cast<std::size_t>(m.dose)] = 1.0;
  out[kMedEncodingWidth - 1] = scaler.scale(FeatureScaler::kDeltaTKey, delta_t_years);
  return out;
}

Vec encode_patient(const PatientStatic& p, const FeatureScaler& scaler) {
  require(scaler.fitted(), "encode_patient: scaler not fitted");
  Vec out(kPatientEncodingWidth, 0.0);
  out[0] = scaler.scale(FeatureScaler::kAgeKey, p.age);
  out[1] = p.disease_duration ? scaler.scale(FeatureScaler::kDurationKey, *p.disease_duration)
                              : 0.0;
  out[2 + (p.gender == Gender::Male ? 0 : 1)] = 1.0;
  if (p.rheumatoid_factor) out[4 + (*p.rheumatoid_factor == TriState::Yes ? 0 : 1)] = 1.0;
  if (p.anti_ccp) out[6 + (*p.anti_ccp == TriState::Yes ? 0 : 1)] = 1.0;
  return out;
}

}  // namespace anet::data

#pragma once

#include <vector>

#include "anet/data/scaler.hpp"

namespace anet::data {

// Fixed event-vector layouts. Every numeric visit feature occupies two
// slots: the scaled value (0 when missing) and a missing-indicator bit.
// Categorical features are one-hot blocks; a fully-zero block means the
// value was missing. Delta-t (years from the event to the prediction time
// point) is appended last and scaled like any numeric feature.
//
// visit  : 11 x (value, missing) + 7 morning-stiffness + 3 smoker + dt = 33
// med    : 9 drug + 4 type + 4 dose + dt                               = 18
// patient: age + disease_duration + 2 gender + 2 r-factor + 2 anti-ccp =  8
inline constexpr std::size_t kVisitEncodingWidth = 2 * kVisitNumericCount +
                                                   kMorningStiffnessCount + kSmokerCount + 1;
inline constexpr std::size_t kMedEncodingWidth = kDrugCount + kMedTypeCount + kDoseCount + 1;
inline constexpr std::size_t kPatientEncodingWidth = 8;

// Bumped whenever any slot order or width above changes; checkpoints and
// sample files carry it so stale layouts fail loudly.
inline constexpr const char* kEncodingLayoutVersion = "event-layout-v1";

std::vector<std::string> visit_slot_names();
std::vector<std::string> med_slot_names();
std::vector<std::string> patient_slot_names();

Vec encode_visit(const VisitEvent& v, double delta_t_years, const FeatureScaler& scaler);
Vec encode_med(const MedicationEvent& m, double delta_t_years, const FeatureScaler& scaler);
Vec encode_patient(const PatientStatic& p, const FeatureScaler& scaler);

}  // namespace anet::data

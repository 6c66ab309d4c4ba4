#pragma once

// Shared hand-written fixtures for data-model and sample-generation tests.

#include <vector>

#include "anet/data/record.hpp"
#include "anet/data/scaler.hpp"

namespace fixtures {

using namespace anet::data;

// Two records whose fields span known ranges, so scaled fixture values are
// easy to compute by hand:
//   mda [0.5, 2.5]   swollen [0, 10]   painful [2, 12]  bsr [5, 45]
//   das28bsr [2, 6]  pain [1, 9]       dai [1, 8]       haq [0.2, 2.2]
//   weight [60, 90]  height [160, 180] crp [1, 21]
//   age [30, 70]     duration [0, 20]
inline std::vector<PatientRecord> scaler_training_records() {
  VisitEvent lo;
  lo.time = parse_date("2019-01-01");
  lo.minimal_disease_activity = 0.5;
  lo.number_swollen_joints = 0.0;
  lo.number_painful_joints = 2.0;
  lo.bsr = 5.0;
  lo.das28bsr_score = 2.0;
  lo.pain_level = 1.0;
  lo.disease_activity_index = 1.0;
  lo.haq_score = 0.2;
  lo.weight_kg = 60.0;
  lo.height_cm = 160.0;
  lo.crp = 1.0;

  VisitEvent hi = lo;
  hi.time = parse_date("2020-01-01");
  hi.minimal_disease_activity = 2.5;
  hi.number_swollen_joints = 10.0;
  hi.number_painful_joints = 12.0;
  hi.bsr = 45.0;
  hi.das28bsr_score = 6.0;
  hi.pain_level = 9.0;
  hi.disease_activity_index = 8.0;
  hi.haq_score = 2.2;
  hi.weight_kg = 90.0;
  hi.height_cm = 180.0;
  hi.crp = 21.0;

  PatientRecord a;
  a.id = "fix-a";
  a.patient.age = 30.0;
  a.patient.disease_duration = 0.0;
  a.patient.gender = Gender::Male;
  a.patient.rheumatoid_factor = TriState::No;
  a.visits = {lo, hi};

  PatientRecord b;
  b.id = "fix-b";
  b.patient.age = 70.0;
  b.patient.disease_duration = 20.0;
  b.patient.gender = Gender::Female;
  b.patient.rheumatoid_factor = TriState::Yes;
  b.patient.anti_ccp = TriState::Yes;
  b.visits = {lo};

  return {a, b};
}

inline FeatureScaler fitted_scaler(double delta_t_max = 6.0) {
  FeatureScaler scaler;
  const auto records = scaler_training_records();
  scaler.fit(records, delta_t_max);
  return scaler;
}

// A visit whose scaled values are all exactly representable midpoints or
// boundaries of the ranges above.
inline VisitEvent midpoint_visit() {
  VisitEvent v;
  v.time = parse_date("2020-06-01");
  v.minimal_disease_activity = 1.5;   // -> 0.5
  v.number_swollen_joints = 10.0;     // -> 1.0 (fitted max)
  v.number_painful_joints = 7.0;      // -> 0.5
  v.bsr = 25.0;                       // -> 0.5
  v.das28bsr_score = 4.0;             // -> 0.5
  v.pain_level = 5.0;                 // -> 0.5
  v.disease_activity_index = 4.5;     // -> 0.5
  v.haq_score = 1.2;                  // -> 0.5
  v.weight_kg = 75.0;                 // -> 0.5
  v.height_cm = 170.0;                // -> 0.5
  v.crp = 11.0;                       // -> 0.5
  v.morning_stiffness = MorningStiffness::HalfToOneHour;  // one-hot index 2
  v.smoker = Smoker::Never;                               // one-hot index 2
  return v;
}

}  // namespace fixtures

#pragma once

#include <cstdint>

#include "anet/sample/samplegen.hpp"

namespace anet::synth {

// Closed-form progression law behind the synthetic cohort; the full
// description lives in docs/synthetic_data.md. The clean score of a
// patient at time tau is
//
//   S(tau) = clamp( base + sum_m effect(type_m, tau - t_m)
//                        + relapse_rate * min(u_last, relapse_cap),
//                   clean_min, clean_max )
//
// where base derives from the static patient features, the medication
// response is a smooth bump peaking effect_peak_years after the
// adjustment and fading out over roughly two years,
//
//   effect(type, u) = -amp(type) * (u/T) * exp((1 - (u/T)^2) / 2),
//
// and u_last is the time since the most recent adjustment (the cap when
// the patient was never treated). Observed visit scores add i.i.d.
// Gaussian noise: score = clamp(S + eps, 0, 10), eps ~ N(0, sigma^2).
struct SynthLaw {
  double base_intercept = 3.4;
  double base_rfactor = 0.5;
  double base_anticcp = 0.35;
  double base_male = 0.25;
  double base_age = 0.6;  // spread over ages 20..80
  double effect_peak_years = 0.8;
  double amp_prednison = 0.40;
  double amp_dmard = 0.55;
  double amp_biologic = 0.72;
  double amp_other = 0.32;
  // optional second response phase: a rebound overshoot of this fraction
  // of the amplitude, peaking rebound_peak_years after the adjustment.
  // Zero keeps the response a single suppression bump. A nonzero rebound
  // makes the disease level alone ambiguous about the future (the same
  // level occurs falling and rising), so event timing carries signal that
  // no current observable can substitute for.
  double rebound_fraction = 0.0;
  double rebound_peak_years = 1.8;
  double relapse_rate = 0.25;  // per untreated year
  double relapse_cap_years = 2.5;
  double clean_min = 0.5;
  double clean_max = 9.5;
};

// Per-feature probability that a generated value is absent.
struct MissingRates {
  double minimal_disease_activity = 0.016;
  double number_swollen_joints = 0.066;
  double number_painful_joints = 0.069;
  double bsr = 0.146;
  double das28bsr_score = 0.164;
  double pain_level = 0.224;
  double disease_activity_index = 0.227;
  double haq_score = 0.278;
  double weight_kg = 0.365;
  double height_cm = 0.408;
  double crp = 0.454;
  double morning_stiffness = 0.227;
  double smoker = 0.602;
  double disease_duration = 0.027;
  double r_factor = 0.091;
  double anti_ccp = 0.316;
};

struct SynthConfig {
  std::size_t n_patients = 2000;
  double visits_per_year = 1.26;   // Poisson arrival rate
  double med_adjust_rate = 0.5;    // Poisson arrival rate
  double noise_sigma = 0.5;
  std::uint64_t seed = 1;
  double horizon_years = 11.0;     // record span per patient
  // multiplies the noise of every symptom feature; larger values make the
  // visit features weaker proxies of the underlying disease level
  double symptom_noise_scale = 1.0;
  SynthLaw law{};
  MissingRates missing{};

  void check() const {
    require(n_patients >= 1, "SynthConfig: n_patients must be >= 1");
    require(visits_per_year > 0.0 && med_adjust_rate > 0.0, "SynthConfig: rates must be > 0");
    require(noise_sigma >= 0.0, "SynthConfig: noise_sigma must be >= 0");
    require(horizon_years > 0.0, "SynthConfig: horizon_years must be > 0");
  }
};

inline constexpr const char* kSynthEpochIso = "2010-01-01";

// Evaluates the law exactly; tests use it as a known optimum.
class GroundTruth {
 public:
  GroundTruth() = default;
  GroundTruth(SynthLaw law, double noise_sigma) : law_(law), noise_sigma_(noise_sigma) {}

  double base_score(const data::PatientStatic& p) const;
  double medication_effect(data::MedType type, double years_since) const;
  double clean_score(const data::PatientRecord& record, data::Date tau) const;
  // S(t') - S(t); the optimal score-change prediction given the record
  double expected_change(const data::PatientRecord& record, data::Date t,
                         data::Date t_prime) const;

  const SynthLaw& law() const { return law_; }
  double noise_sigma() const { return noise_sigma_; }

  std::string to_json() const;
  static GroundTruth from_json(const std::string& text);

 private:
  SynthLaw law_{};
  double noise_sigma_ = 0.0;
};

struct Cohort {
  std::vector<data::PatientRecord> records;
  GroundTruth ground_truth;
};

// Reproducible given the seed: every patient derives an independent
// substream, so output does not depend on generation order.
Cohort generate_cohort(const SynthConfig& cfg);

struct BayesReport {
  double irreducible = 0.0;       // noise_sigma^2
  double ground_truth_mse = 0.0;  // empirical MSE of the law's predictor
};

BayesReport bayes_mse(const Cohort& cohort, std::span<const sample::StructuredSample> samples);

struct CohortStats {
  double mean_visits_5y = 0.0;
  double mean_meds_5y = 0.0;
  std::size_t n_patients = 0;
};

// Event counts inside the trailing five-year window of each record.
CohortStats cohort_stats(std::span<const data::PatientRecord> records);

}  // namespace anet::synth

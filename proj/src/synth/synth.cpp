#include "anet/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include <json.hpp>

namespace anet::synth {

using data::Date;
using data::MedType;
using data::PatientRecord;
using data::years_between;

double GroundTruth::base_score(const data::PatientStatic& p) const {
  double base = law_.base_intercept;
  if (p.rheumatoid_factor && *p.rheumatoid_factor == data::TriState::Yes) {
    base += law_.base_rfactor;
  }
  if (p.anti_ccp && *p.anti_ccp == data::TriState::Yes) base += law_.base_anticcp;
  if (p.gender == data::Gender::Male) base += law_.base_male;
  base += law_.base_age * (std::clamp(p.age, 20.0, 80.0) - 20.0) / 60.0;
  return base;
}

double GroundTruth::medication_effect(MedType type, double years_since) const {
  if (years_since < 0.0) return 0.0;
  double amp = 0.0;
  switch (type) {
    case MedType::Prednison: amp = law_.amp_prednison; break;
    case MedType::Dmard: amp = law_.amp_dmard; break;
    case MedType::Biologic: amp = law_.amp_biologic; break;
    case MedType::Other: amp = law_.amp_other; break;
  }
  const double x = years_since / law_.effect_peak_years;
  double effect = -amp * x * std::exp(0.5 * (1.0 - x * x));
  if (law_.rebound_fraction != 0.0) {
    // sharper second bump (peak value 1 at u = rebound_peak_years)
    const double r = years_since / law_.rebound_peak_years;
    effect += amp * law_.rebound_fraction * r * r * r * std::exp(1.5 * (1.0 - r * r));
  }
  return effect;
}

double GroundTruth::clean_score(const PatientRecord& record, Date tau) const {
  double s = base_score(record.patient);
  double last_med_years = law_.relapse_cap_years;  // never treated
  for (const data::MedicationEvent& m : record.medications) {
    if (m.time > tau) break;  // sorted
    s += medication_effect(m.type, years_between(m.time, tau));
    last_med_years = years_between(m.time, tau);
  }
  s += law_.relapse_rate * std::min(last_med_years, law_.relapse_cap_years);
  return std::clamp(s, law_.clean_min, law_.clean_max);
}

double GroundTruth::expected_change(const PatientRecord& record, Date t, Date t_prime) const {
  return clean_score(record, t_prime) - clean_score(record, t);
}

std::string GroundTruth::to_json() const {
  nlohmann::json j;
  j["noise_sigma"] = noise_sigma_;
  nlohmann::json& l = j["law"];
  l["base_intercept"] = law_.base_intercept;
  l["base_rfactor"] = law_.base_rfactor;
  l["base_anticcp"] = law_.base_anticcp;
  l["base_male"] = law_.base_male;
  l["base_age"] = law_.base_age;
  l["effect_peak_years"] = law_.effect_peak_years;
  l["amp_prednison"] = law_.amp_prednison;
  l["amp_dmard"] = law_.amp_dmard;
  l["amp_biologic"] = law_.amp_biologic;
  l["amp_other"] = law_.amp_other;
  l["rebound_fraction"] = law_.rebound_fraction;
  l["rebound_peak_years"] = law_.rebound_peak_years;
  l["relapse_rate"] = law_.relapse_rate;
  l["relapse_cap_years"] = law_.relapse_cap_years;
  l["clean_min"] = law_.clean_min;
  l["clean_max"] = law_.clean_max;
  return j.dump(2);
}

GroundTruth GroundTruth::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("invalid ground-truth JSON: ") + e.what());
  }
  SynthLaw law;
  const nlohmann::json& l = j.at("law");
  law.base_intercept = l.at("base_intercept").get<double>();
  law.base_rfactor = l.at("base_rfactor").get<double>();
  law.base_anticcp = l.at("base_anticcp").get<double>();
  law.base_male = l.at("base_male").get<double>();
  law.base_age = l.at("base_age").get<double>();
  law.effect_peak_years = l.at("effect_peak_years").get<double>();
  law.amp_prednison = l.at("amp_prednison").get<double>();
  law.amp_dmard = l.at("amp_dmard").get<double>();
  law.amp_biologic = l.at("amp_biologic").get<double>();
  law.amp_other = l.at("amp_other").get<double>();
  law.rebound_fraction = l.at("rebound_fraction").get<double>();
  law.rebound_peak_years = l.at("rebound_peak_years").get<double>();
  law.relapse_rate = l.at("relapse_rate").get<double>();
  law.relapse_cap_years = l.at("relapse_cap_years").get<double>();
  law.clean_min = l.at("clean_min").get<double>();
  law.clean_max = l.at("clean_max").get<double>();
  return GroundTruth(law, j.at("noise_sigma").get<double>());
}

namespace {

std::vector<std::int32_t> poisson_arrival_days(double rate_per_year, double horizon_years,
                                               std::mt19937_64& rng) {
  std::exponential_distribution<double> gap(rate_per_year);
  std::vector<std::int32_t> days;
  double t = gap(rng);
  while (t <= horizon_years) {
    const auto day = static_cast<std::int32_t>(std::lround(t * 365.25));
    if (days.empty() || day > days.back()) days.push_back(day);
    t += gap(rng);
  }
  return days;
}

data::Drug pick_drug(data::MedType type, std::mt19937_64& rng) {
  switch (type) {
    case MedType::Prednison: return data::Drug::Prednison;
    case MedType::Dmard: return data::Drug::DmardMtx;
    case MedType::Other: return data::Drug::Other;
    case MedType::Biologic: break;
  }
  // biologics weighted by observed prescription shares
  static constexpr double w[6] = {7.9, 7.3, 4.0, 4.0, 3.5, 2.4};
  static constexpr data::Drug drugs[6] = {data::Drug::Adalimumab, data::Drug::Etanercept,
                                          data::Drug::Tocilizumab, data::Drug::Abatacept,
                                          data::Drug::Rituximab, data::Drug::Golimumab};
  std::discrete_distribution<int> pick(std::begin(w), std::end(w));
  return drugs[pick(rng)];
}

PatientRecord generate_patient(const SynthConfig& cfg, const GroundTruth& truth,
                               std::uint64_t patient_seed, const std::string& id) {
  std::mt19937_64 rng(patient_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  PatientRecord r;
  r.id = id;
  r.patient.age = 25.0 + 55.0 * unit(rng);
  if (unit(rng) >= cfg.missing.disease_duration) r.patient.disease_duration = 25.0 * unit(rng);
  r.patient.gender = unit(rng) < 0.26 ? data::Gender::Male : data::Gender::Female;
  if (unit(rng) >= cfg.missing.r_factor) {
    r.patient.rheumatoid_factor = unit(rng) < 0.692 ? data::TriState::Yes : data::TriState::No;
  }
  if (unit(rng) >= cfg.missing.anti_ccp) {
    r.patient.anti_ccp = unit(rng) < 0.62 ? data::TriState::Yes : data::TriState::No;
  }

  const Date epoch = data::parse_date(kSynthEpochIso);
  const auto visit_days = poisson_arrival_days(cfg.visits_per_year, cfg.horizon_years, rng);
  const auto med_days = poisson_arrival_days(cfg.med_adjust_rate, cfg.horizon_years, rng);

  std::discrete_distribution<int> med_type_pick({16.8, 24.1, 29.0, 30.1});
  static constexpr MedType kTypes[4] = {MedType::Prednison, MedType::Dmard, MedType::Biologic,
                                        MedType::Other};
  std::discrete_distribution<int> dose_pick({41.3, 9.6, 12.6, 36.5});
  for (const std::int32_t day : med_days) {
    data::MedicationEvent m;
    m.time = data::add_days(epoch, day);
    m.type = kTypes[med_type_pick(rng)];
    m.drug = pick_drug(m.type, rng);
    m.dose = static_cast<data::Dose>(dose_pick(rng));
    r.medications.push_back(m);
  }

  // persistent per-patient baselines for inert features
  const double weight_base = 50.0 + 50.0 * unit(rng);
  const double height_base = 150.0 + 45.0 * unit(rng);
  const data::Smoker smoker =
      static_cast<data::Smoker>(std::discrete_distribution<int>({9.3, 12.3, 18.2})(rng));

  const MissingRates& miss = cfg.missing;
  for (const std::int32_t day : visit_days) {
    data::VisitEvent v;
    v.time = data::add_days(epoch, day);
    const double s = truth.clean_score(r, v.time);  // meds are already in place

    if (unit(rng) >= miss.das28bsr_score) {
      v.das28bsr_score = std::clamp(s + cfg.noise_sigma * normal(rng), 0.0, 10.0);
    }
    // symptom features follow the clean score with independent noise, so
    // they never expose the score noise itself
    const double sn = cfg.symptom_noise_scale;
    if (unit(rng) >= miss.minimal_disease_activity) {
      v.minimal_disease_activity = std::clamp(0.4 * s + sn * 0.4 * normal(rng), 0.0, 10.0);
    }
    if (unit(rng) >= miss.number_swollen_joints) {
      v.number_swollen_joints =
          std::round(std::clamp(0.9 * s + sn * 2.0 * normal(rng), 0.0, 28.0));
    }
    if (unit(rng) >= miss.number_painful_joints) {
      v.number_painful_joints =
          std::round(std::clamp(1.0 * s + sn * 2.5 * normal(rng), 0.0, 28.0));
    }
    if (unit(rng) >= miss.bsr) v.bsr = std::clamp(6.0 * s + sn * 6.0 * normal(rng), 0.0, 120.0);
    if (unit(rng) >= miss.pain_level) {
      v.pain_level = std::clamp(0.9 * s + sn * 1.2 * normal(rng), 0.0, 10.0);
    }
    if (unit(rng) >= miss.disease_activity_index) {
      v.disease_activity_index = std::clamp(0.95 * s + sn * 1.0 * normal(rng), 0.0, 10.0);
    }
    if (unit(rng) >= miss.haq_score) {
      v.haq_score = std::clamp(0.22 * s + sn * 0.3 * normal(rng), 0.0, 3.0);
    }
    if (unit(rng) >= miss.weight_kg) v.weight_kg = weight_base + normal(rng);
    if (unit(rng) >= miss.height_cm) v.height_cm = height_base + 0.5 * normal(rng);
    if (unit(rng) >= miss.crp) {
      v.crp = std::clamp(2.5 * s + sn * 4.0 * normal(rng), 0.0, 100.0);
    }
    if (unit(rng) >= miss.morning_stiffness) {
      const int idx = static_cast<int>(std::clamp(std::round(0.8 * s + normal(rng) - 1.0), 0.0,
                                                  6.0));
      v.morning_stiffness = static_cast<data::MorningStiffness>(idx);
    }
    if (unit(rng) >= miss.smoker) v.smoker = smoker;
    r.visits.push_back(v);
  }
  return r;
}

}  // namespace

Cohort generate_cohort(const SynthConfig& cfg) {
  cfg.check();
  Cohort cohort;
  cohort.ground_truth = GroundTruth(cfg.law, cfg.noise_sigma);
  cohort.records.reserve(cfg.n_patients);
  const int digits = static_cast<int>(std::to_string(cfg.n_patients - 1).size());
  for (std::size_t i = 0; i < cfg.n_patients; ++i) {
    std::string id = std::to_string(i);
    id.insert(0, static_cast<std::size_t>(digits) - std::min<std::size_t>(id.size(), digits), '0');
    cohort.records.push_back(
        generate_patient(cfg, cohort.ground_truth, derive_seed(cfg.seed, i), "synth-" + id));
  }
  return cohort;
}

BayesReport bayes_mse(const Cohort& cohort, std::span<const sample::StructuredSample> samples) {
  std::unordered_map<std::string_view, const PatientRecord*> by_id;
  for (const PatientRecord& r : cohort.records) by_id.emplace(r.id, &r);

  BayesReport report;
  report.irreducible = cohort.ground_truth.noise_sigma() * cohort.ground_truth.noise_sigma();
  if (samples.empty()) return report;

  double sum = 0.0;
  for (const sample::StructuredSample& s : samples) {
    const auto it = by_id.find(s.patient_id);
    require(it != by_id.end(), "bayes_mse: sample references unknown patient " + s.patient_id);
    const Date t_prime =
        data::add_days(s.anchor_time, static_cast<std::int32_t>(std::lround(s.delta_t * 365.25)));
    const double pred =
        cohort.ground_truth.clean_score(*it->second, t_prime) - s.current_score;
    const double err = s.label - pred;
    sum += err * err;
  }
  report.ground_truth_mse = sum / static_cast<double>(samples.size());
  return report;
}

CohortStats cohort_stats(std::span<const data::PatientRecord> records) {
  CohortStats stats;
  stats.n_patients = records.size();
  if (records.empty()) return stats;
  // anchor the five-year window at the cohort-wide latest event
  Date end = data::parse_date(kSynthEpochIso);
  for (const PatientRecord& r : records) {
    for (const auto& v : r.visits) end = std::max(end, v.time);
    for (const auto& m : r.medications) end = std::max(end, m.time);
  }
  double visits = 0.0, meds = 0.0;
  for (const PatientRecord& r : records) {
    for (const auto& v : r.visits) {
      if (years_between(v.time, end) < 5.0) visits += 1.0;
    }
    for (const auto& m : r.medications) {
      if (years_between(m.time, end) < 5.0) meds += 1.0;
    }
  }
  stats.mean_visits_5y = visits / static_cast<double>(records.size());
  stats.mean_meds_5y = meds / static_cast<double>(records.size());
  return stats;
}

}  // namespace anet::synth

#include "anet/data/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace anet::data {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) throw DataError(where + ": unknown field '" + key + "'");
  }
}

std::optional<double> opt_number(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw DataError(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

std::optional<std::string> opt_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::string req_string(const json& obj, const char* key) {
  const auto value = opt_string(obj, key);
  if (!value) throw DataError(std::string("missing required field '") + key + "'");
  return *value;
}

json patient_to_json(const PatientStatic& p) {
  json j;
  j["age"] = p.age;
  if (p.disease_duration) j["disease_duration"] = *p.disease_duration;
  j["gender"] = to_string(p.gender);
  if (p.rheumatoid_factor) j["r_factor"] = to_string(*p.rheumatoid_factor);
  if (p.anti_ccp) j["anti_ccp"] = to_string(*p.anti_ccp);
  return j;
}

PatientStatic patient_from_json(const json& j) {
  check_keys(j, {"age", "disease_duration", "gender", "r_factor", "anti_ccp"}, "patient");
  PatientStatic p;
  const auto age = opt_number(j, "age");
  if (!age) throw DataError("patient: missing required field 'age'");
  p.age = *age;
  p.disease_duration = opt_number(j, "disease_duration");
  p.gender = gender_from_string(req_string(j, "gender"));
  if (const auto s = opt_string(j, "r_factor")) p.rheumatoid_factor = tristate_from_string(*s);
  if (const auto s = opt_string(j, "anti_ccp")) p.anti_ccp = tristate_from_string(*s);
  return p;
}

json visit_to_json(const VisitEvent& v) {
  json j;
  j["time"] = format_date(v.time);
  for (const VisitNumericField& f : visit_numeric_fields()) {
    if (const auto& value = v.*(f.member)) j[f.name] = *value;
  }
  if (v.morning_stiffness) j["morning_stiffness"] = to_string(*v.morning_stiffness);
  if (v.smoker) j["smoker"] = to_string(*v.smoker);
  return j;
}

VisitEvent visit_from_json(const json& j) {
  check_keys(j,
             {"time", "minimal_disease_activity", "number_swollen_joints",
              "number_painful_joints", "bsr", "das28bsr_score", "pain_level",
              "disease_activity_index", "haq_score", "weight_kg", "height_cm", "crp",
              "morning_stiffness", "smoker"},
             "visit");
  VisitEvent v;
  v.time = parse_date(req_string(j, "time"));
  for (const VisitNumericField& f : visit_numeric_fields()) {
    v.*(f.member) = opt_number(j, f.name);
  }
  if (const auto s = opt_string(j, "morning_stiffness")) {
    v.morning_stiffness = morning_stiffness_from_string(*s);
  }
  if (const auto s = opt_string(j, "smoker")) v.smoker = smoker_from_string(*s);
  return v;
}

json med_to_json(const MedicationEvent& m) {
  json j;
  j["time"] = format_date(m.time);
  j["drug"] = to_string(m.drug);
  j["type"] = to_string(m.type);
  j["dose"] = to_string(m.dose);
  return j;
}

MedicationEvent med_from_json(const json& j) {
  check_keys(j, {"time", "drug", "type", "dose"}, "medication");
  MedicationEvent m;
  m.time = parse_date(req_string(j, "time"));
  m.drug = drug_from_string(req_string(j, "drug"));
  m.type = med_type_from_string(req_string(j, "type"));
  m.dose = dose_from_string(req_string(j, "dose"));
  return m;
}

json record_to_json(const PatientRecord& r) {
  json j;
  j["id"] = r.id;
  j["patient"] = patient_to_json(r.patient);
  json visits = json::array();
  for (const VisitEvent& v : r.visits) visits.push_back(visit_to_json(v));
  j["visits"] = std::move(visits);
  json meds = json::array();
  for (const MedicationEvent& m : r.medications) meds.push_back(med_to_json(m));
  j["medications"] = std::move(meds);
  return j;
}

PatientRecord record_from_json(const json& j) {
  check_keys(j, {"id", "patient", "visits", "medications"}, "record");
  PatientRecord r;
  r.id = req_string(j, "id");
  const auto patient = j.find("patient");
  if (patient == j.end()) throw DataError("record: missing required field 'patient'");
  r.patient = patient_from_json(*patient);
  if (const auto visits = j.find("visits"); visits != j.end()) {
    if (!visits->is_array()) throw DataError("record: 'visits' must be an array");
    for (const json& v : *visits) r.visits.push_back(visit_from_json(v));
  }
  if (const auto meds = j.find("medications"); meds != j.end()) {
    if (!meds->is_array()) throw DataError("record: 'medications' must be an array");
    for (const json& m : *meds) r.medications.push_back(med_from_json(m));
  }
  return r;
}

}  // namespace

std::vector<PatientRecord> parse_records_jsonl(std::istream& in, const std::string& origin) {
  std::vector<PatientRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json_line(line));
    } catch (const std::exception& e) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<PatientRecord> read_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open record file: " + path);
  return parse_records_jsonl(in, path);
}

void write_records_jsonl(std::span<const PatientRecord> records, std::ostream& out) {
  for (const PatientRecord& r : records) out << record_to_json_line(r) << '\n';
}

void write_records_jsonl(std::span<const PatientRecord> records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write record file: " + path);
  write_records_jsonl(records, out);
}

std::string record_to_json_line(const PatientRecord& record) {
  return record_to_json(record).dump();
}

PatientRecord record_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("record line must be a JSON object");
  return record_from_json(j);
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  require(ec == std::errc{}, "format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_encoded_csv(std::ostream& out, std::span<const std::string> slot_names,
                       std::span<const Vec> rows) {
  for (std::size_t i = 0; i < slot_names.size(); ++i) {
    if (i) out << ',';
    out << slot_names[i];
  }
  out << '\n';
  for (const Vec& row : rows) {
    require(row.size() == slot_names.size(), "write_encoded_csv: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

}  // namespace anet::data

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "anet/data/record.hpp"

namespace anet::data {

// Line-delimited record format: one JSON object per patient. Field names
// and value spellings follow docs/record_format.md; a missing value is an
// absent field or an explicit null. Unknown field names are rejected.
std::vector<PatientRecord> parse_records_jsonl(std::istream& in, const std::string& origin);
std::vector<PatientRecord> read_records_jsonl(const std::string& path);
void write_records_jsonl(std::span<const PatientRecord> records, std::ostream& out);
void write_records_jsonl(std::span<const PatientRecord> records, const std::string& path);

std::string record_to_json_line(const PatientRecord& record);
PatientRecord record_from_json_line(const std::string& line);

// CSV with a header row naming each slot; one row per encoded vector.
void write_encoded_csv(std::ostream& out, std::span<const std::string> slot_names,
                       std::span<const Vec> rows);

// Canonical numeric formatting shared by every CSV writer (shortest
// round-trip form, so identical doubles always print identically).
std::string format_double(double v);

}  // namespace anet::data

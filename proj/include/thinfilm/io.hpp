#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "thinfilm/harness.hpp"

namespace thinfilm {

// records.csv with the fixed header
// t,mass,E,e,J,D_accum,re_h1,im_h1,phi_h1,h_min,h_max
// and 17-significant-digit fields (round-trip exact), LF line endings.
void write_records_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_records_csv(std::istream& in);

// Length-prefixed little-endian f64 snapshot: uint64 count, then the values.
void write_field_f64(const std::string& path, const std::vector<double>& values);
std::vector<double> read_field_f64(const std::string& path);

// Snapshot file name "t_<seconds>.f64" (shortest round-trip time format).
std::string snapshot_filename(double t);

// report.json content (key order fixed for byte-stable output).
nlohmann::ordered_json report_to_json(const TrajectoryReport& report);

// Write records.csv, report.json, and fields/t_*.f64 under out_dir.
void write_run_outputs(const TrajectoryReport& report, const std::string& out_dir);

}  // namespace thinfilm

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tailrisk/engine/sequential.hpp"
#include "tailrisk/engine/study.hpp"

namespace tailrisk {

/// A delimited table as written by the bundle writers: a `# key=value ...`
/// provenance line, one header line, then data rows.
struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws std::out_of_range
  double number(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

/// File contents of the per-run tables; exposed so tests can compare them
/// without touching the filesystem.
std::string trajectory_csv(const RunRecord& rec);
std::string allocation_csv(const RunRecord& rec, const Eigen::VectorXd* truth);
std::string posterior_csv(const RunRecord& rec);
std::string run_summary_csv(const RunRecord& rec);
std::string record_json(const RunRecord& rec, const RunConfig& config);

/// Writes trajectory/allocation/posterior/summary tables (format "csv") and
/// record.json (format "json") into `dir`.
void write_run_bundle(const std::string& dir, const RunConfig& config, const RunRecord& rec,
                      const Eigen::VectorXd* truth);

std::string study_summary_csv(const StudySummary& s, std::uint64_t config_hash, std::uint64_t seed);
std::string study_runs_csv(const StudySummary& s, std::uint64_t config_hash, std::uint64_t seed);
std::string bias_by_stage_csv(const StudySummary& s, std::uint64_t config_hash, std::uint64_t seed);

std::string reference_csv(const ReferenceValue& ref, const RunConfig& config, std::uint64_t seed);

/// Writes `text` to `dir/name`, creating `dir` when needed.
void write_text(const std::string& dir, const std::string& name, const std::string& text);

/// Shortest round-trip decimal form of a double.
std::string fmt_double(double v);

}  // namespace tailrisk

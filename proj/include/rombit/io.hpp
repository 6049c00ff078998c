#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rombit/core.hpp"

namespace rombit {

// Instance files are JSON lines. Every number is an integer, a JSON float
// (converted to the nearest rational with denominator <= 10^6), or a
// [numerator, denominator] pair; the writer always emits pairs for
// non-integers.

Instance parse_instance(const std::string& line, std::size_t line_no = 1);
std::string format_instance(const Instance& instance);

/// Blank lines are skipped. Instances without an id get "<line>".
std::vector<Instance> read_instances(std::istream& in);
std::vector<Instance> read_instances(const std::string& path);
void write_instances(std::ostream& out, const std::vector<Instance>& instances);
void write_instances(const std::string& path, const std::vector<Instance>& instances);

struct ReportRow {
  std::string instance_id;
  std::string problem;
  std::string model;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double mean_alg = 0;
  double opt = 0;
  double empirical_ratio = 0;
  std::optional<double> stderr_;  // absent for exact rows
};

enum class ReportFormat { csv, jsonl };
ReportFormat parse_format(const std::string& tag);

inline constexpr const char* kReportHeader =
    "instance_id,problem,model,trials,seed,mean_alg,opt,empirical_ratio,stderr";

void write_report(std::ostream& out, const std::vector<ReportRow>& rows, ReportFormat format);
void write_report(const std::string& path, const std::vector<ReportRow>& rows, ReportFormat format);
/// Reads a CSV report written by write_report.
std::vector<ReportRow> read_report_csv(std::istream& in);

}  // namespace rombit

#pragma once

#include <string>
#include <vector>

#include "vvl/config.hpp"
#include "vvl/stats.hpp"
#include "vvl/weak_form.hpp"

namespace vvl {

struct MemberRange {
  int first = 0;  // 1-based, inclusive; 0 means "all"
  int last = 0;
};

/// Parses "A..B" or "A"; throws Error(kConfig).
MemberRange parse_member_range(const std::string& text);

struct MemberRecord {
  int index = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string status;  // "complete" | "blowup"
  std::string message;
  std::vector<std::string> files;  // relative to the run directory
  std::vector<double> times;
  std::vector<double> dissipation;
  std::size_t floor_hits = 0;
  double wall_seconds = 0.0;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::string config_json;  // normalized
  std::vector<MemberRecord> members;  // sorted by index
};

RunManifest read_manifest(const std::string& run_dir);
void write_manifest(const std::string& run_dir, const RunManifest& manifest);

struct RunOptions {
  std::string out_dir;  // empty: config output dir
  MemberRange members;
  int threads = 1;
};

struct RunResult {
  RunManifest manifest;
  std::vector<int> recomputed;
  std::vector<int> skipped;
  std::vector<int> blown_up;
};

/// Solves the selected members in parallel and persists snapshots, index.csv and
/// manifest.json. Members already complete in a manifest with the same config hash
/// whose files read back are skipped. A manifest with a different hash is an error.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options);

struct LoadedRun {
  ExperimentConfig config;
  RunManifest manifest;
  Ensemble ensemble;           // complete members in index order
  std::vector<int> excluded;   // members missing or blown up
};

LoadedRun load_run(const std::string& run_dir, MemberRange members = {});

struct DiagnosticRow {
  std::size_t n = 0;
  std::string diagnostic;
  std::string observable;
  std::string window;
  double value = 0.0;
};

struct ReportOptions {
  std::string run_dir;
  std::string out_dir;  // empty: <run_dir>/report
  MemberRange members;
  bool strict = false;
  int threads = 1;
};

struct ReportResult {
  std::vector<DiagnosticRow> rows;
  std::vector<std::pair<std::string, std::string>> header;
  std::string summary;
};

ReportResult run_report(const ReportOptions& options);

/// Writes equivalence.csv into out_dir and returns the rows.
std::vector<EquivalenceRow> run_equivalence(const std::string& run_a, const std::string& run_b,
                                            const std::string& out_dir);

}  // namespace vvl

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vvl/grid.hpp"
#include "vvl/solver.hpp"
#include "vvl/test_function.hpp"
#include "vvl/thermo.hpp"

namespace vvl {

struct EpsilonSchedule {
  enum class Kind { kHarmonic, kGeometric };
  Kind kind = Kind::kHarmonic;
  double eps0 = 0.05;
  double ratio = 0.5;  // geometric only

  /// eps0 / n or eps0 ratio^n, n >= 1.
  double at(int n) const;
};

enum class InitialFamily { kFarField, kGaussianBump, kShearInflow };

struct InitialSpec {
  InitialFamily family = InitialFamily::kFarField;
  double amplitude = 0.1;
  double width = 0.25;
  Vec2 center;
  int mode = 2;
};

struct SolverSpec {
  double cfl = 0.4;
  double t_end = 0.1;
  std::vector<double> snapshots;  // filled from snapshot_count when not given
  FluxKind flux = FluxKind::kRusanov;
  TimeIntegrator integrator = TimeIntegrator::kSsp2;
  Reconstruction reconstruction = Reconstruction::kFirstOrder;
};

struct ObservableSpec {
  int scalars = 32;
  int vectors = 16;
  int composites = 16;
  TimeWeight psi{0.0, 0.0, 0.0};  // zero width: derived from the snapshot window
};

struct DiagnosticSpec {
  double budget = 0.0;                 // configured E-bar; 0 disables the flag
  std::vector<std::size_t> schedule;   // empty: powers of two plus N_max
  std::array<double, 4> region{};      // K as {x0, x1, y0, y1}
  double threshold = 0.05;             // i8 epsilon
  std::vector<double> decay_L;
  std::vector<double> pairing_L;
  double profile_radius = 0.0;
  double profile_plateau = 1.0;
  int library_checks = 4;              // vector test functions used for residual rows
};

struct ExperimentConfig {
  GridConfig grid;
  GasLaw law;
  FarField far;
  ViscosityPair visc;
  EpsilonSchedule epsilon;
  int members = 4;
  std::uint64_t seed = 1;
  bool dirac = false;
  InitialSpec initial;
  SolverSpec solver;
  ObservableSpec observables;
  DiagnosticSpec diagnostics;
  std::string output_dir = "vvl_out";
};

/// Parses JSON text; missing keys take defaults, unknown keys are rejected. Throws Error(kConfig).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON with every default filled in (keys sorted).
std::string normalized_config(const ExperimentConfig& cfg, bool include_output = true);

/// FNV-1a 64 over the normalized config without the output directory, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

/// Counter-based generator: the k-th draw is splitmix64(seed + k * golden gamma).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// base_seed XOR member index, or base_seed for every member in Dirac mode.
std::uint64_t member_seed(const ExperimentConfig& cfg, int member);
/// epsilon schedule at member n, or eps_1 for every member in Dirac mode.
double member_epsilon(const ExperimentConfig& cfg, int member);

FluidState make_initial_state(const ExperimentConfig& cfg, const Grid& grid, int member);
SolverConfig make_solver_config(const ExperimentConfig& cfg, int member);

/// Fills derived defaults (snapshot times, psi window, region K, L schedules,
/// profile radius) and validates every section. parse_config calls it.
void finalize_config(ExperimentConfig& cfg, int snapshot_count = 5);

TimeWeight default_time_weight(const std::vector<double>& times);

}  // namespace vvl

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "vvl/grid.hpp"
#include "vvl/quadrature.hpp"
#include "vvl/thermo.hpp"

namespace vvl {

/// Density and momentum on every grid cell at one time. Solid cells hold zeros,
/// ghost cells hold (rho_inf, m_inf).
struct FluidState {
  double time = 0.0;
  std::vector<double> rho;
  std::vector<double> mx;
  std::vector<double> my;

  Vec2 m(std::size_t c) const { return {mx[c], my[c]}; }
  std::size_t size() const { return rho.size(); }
};

enum class FluxKind { kRusanov, kHll };
enum class TimeIntegrator { kForwardEuler, kSsp2 };
/// kMuscl: minmod-limited linear reconstruction of (rho, u) per direction. Cells next to
/// a solid cell or the box edge fall back to constant states.
enum class Reconstruction { kFirstOrder, kMuscl };

/// Optional forcing added to the right-hand side at cell centers.
using SourceTerm = std::function<void(Vec2 x, double t, double& s_rho, Vec2& s_m)>;

struct SolverConfig {
  double cfl = 0.4;
  double t_end = 0.1;
  std::vector<double> snapshot_times;
  FluxKind flux = FluxKind::kRusanov;
  TimeIntegrator integrator = TimeIntegrator::kSsp2;
  Reconstruction reconstruction = Reconstruction::kFirstOrder;
  double epsilon = 1.0;
};

void validate(const SolverConfig& cfg);

struct StepOptions {
  FluxKind flux = FluxKind::kRusanov;
  TimeIntegrator integrator = TimeIntegrator::kSsp2;
  Reconstruction reconstruction = Reconstruction::kFirstOrder;
  double cfl = 0.4;
  double density_floor = 1e-10;
  SourceTerm source;
};

struct StepStats {
  std::size_t floor_hits = 0;
};

enum class TrajectoryStatus { kComplete, kBlowUp };

struct Trajectory {
  std::vector<FluidState> states;
  double epsilon = 0.0;
  /// Cumulative eps * int int S(grad u) : grad u up to each snapshot time.
  std::vector<double> dissipation;
  std::size_t floor_hits = 0;
  TrajectoryStatus status = TrajectoryStatus::kComplete;
  std::string message;

  std::vector<double> times() const;
  double dissipation_total() const { return dissipation.empty() ? 0.0 : dissipation.back(); }
};

/// Constant far-field state with the grid conventions applied.
FluidState uniform_state(const Grid& grid, const FarField& far, double time = 0.0);
/// Zeros solid cells and resets ghost cells to the far-field state.
void apply_cell_conventions(FluidState& state, const Grid& grid, const FarField& far);

/// Velocity m / max(rho, floor) on fluid and ghost cells; zero on solid cells.
std::vector<Vec2> velocity_field(const FluidState& s, const Grid& grid, double density_floor,
                                 std::size_t* floor_hits = nullptr);

/// Cell-centered velocity gradients by central differences. Solid neighbours
/// contribute the mirrored velocity (zero at the wall face), ghost neighbours the
/// far-field velocity. Non-fluid entries are zero. Entry (i, j) = d_j u_i.
std::vector<Mat2> velocity_gradients(const FluidState& s, const Grid& grid, double density_floor);

/// eps * sum over fluid cells of S(G) : G dx dy.
double dissipation_rate(const FluidState& s, const Grid& grid, const ViscosityPair& visc, double epsilon,
                        double density_floor);

/// Largest dt satisfying both the convective and viscous bounds for the given cfl.
double max_stable_dt(const FluidState& s, const Grid& grid, const GasLaw& law, const ViscosityPair& visc,
                     double epsilon, double cfl, double density_floor);

/// One explicit step. Throws Error(kCflViolation), Error(kNonFinite) or Error(kNegativeDensity).
FluidState step(const FluidState& state, const Grid& grid, const GasLaw& law, const ViscosityPair& visc,
                double epsilon, double dt, const StepOptions& options = {}, StepStats* stats = nullptr);

/// Advances to t_end recording the configured snapshots. Blow-up ends the run
/// early with status kBlowUp and the snapshots reached so far.
Trajectory solve(const FluidState& initial, const SolverConfig& cfg, const Grid& grid, const GasLaw& law,
                 const ViscosityPair& visc, const FarField& far, const SourceTerm& source = {});

/// Residuals of the continuity and momentum weak forms (viscous stress included)
/// for the tensor test functions psi(t) phi(x) and psi(t) phi_vec(x).
struct WeakResidual {
  double continuity = 0.0;
  double momentum = 0.0;
};

WeakResidual weak_residual_ns(const Trajectory& traj, const Grid& grid, const GasLaw& law, const ViscosityPair& visc,
                              const ScalarTestFunction& phi, const VectorTestFunction& phi_vec, const TimeWeight& psi,
                              double density_floor = 1e-10);

}  // namespace vvl

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "loopcoord/sa_simulator.hpp"
#include "loopcoord/stability.hpp"
#include "loopcoord/synthesis.hpp"
#include "loopcoord/system_model.hpp"

namespace loopcoord {

/// Hata-style path loss in dB for a distance in km.
double path_loss_db(double d_km);

/// Scenario knobs for the 19-cell wrap-around network. Defaults follow the
/// bundled desk-scale configuration; radio-level choices without an
/// authoritative source (rate mapping, power boxes, FD steps) are ours and
/// documented in the README.
struct HexScenario {
  double intersite_m = 500.0;
  double bandwidth_hz = 20e6;
  double noise_dbm_hz = -174.0;
  double pixel_m = 20.0;
  double base_arrival_rate = 40.0;   // users/s, uniform over the network
  double hotspot_rate = 2.0;         // users/s, additional, on cell 0
  double hotspot_diameter_m = 330.0;
  double mean_file_mbit = 10.0;
  double pilot_dbm = 30.0;
  double data_dbm = 43.0;
  double max_spectral_eff = 6.0;     // bit/s/Hz cap on the Shannon map
  double min_sinr_db = 0.0;          // coverage threshold
  double load_cap = 0.98;
  double blocking_target = 0.02;
  double coverage_target = 0.82;
  int n_active = 7;                  // center cell plus first ring
  double pilot_box_db = 10.0;        // pilots within +- this of the default
  double data_box_db = 10.0;
  double adm_min = 0.0;
  double adm_max = 30.0;
  double adm_default = 10.0;
  double fd_pilot_db = 0.5;          // linearization step sizes
  double fd_adm = 0.5;
  double fd_data_db = 0.5;

  nlohmann::json to_json() const;
  static HexScenario from_json(const nlohmann::json& j);
};

/// 19-cell hexagonal layout on a torus: the network is surrounded by six
/// translated copies of itself, so every distance is the wrap-around minimum.
/// Pixels form an equal-area lattice over the fundamental domain and
/// partition exactly into serving areas by strongest received pilot.
class HexNetwork {
 public:
  static HexNetwork build(const HexScenario& scenario);

  const HexScenario& scenario() const { return scenario_; }
  int n_cells() const { return 19; }
  int n_pixels() const { return static_cast<int>(pixel_pos_.size()); }
  int n_active() const { return scenario_.n_active; }
  const Eigen::Vector2d& cell_position(int s) const { return cell_pos_[s]; }
  double torus_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const;
  /// Path gain (negative dB) from cell s to pixel p at wrap-minimal distance.
  double gain_db(int p, int s) const { return gain_db_(p, s); }
  double arrival_rate(int p) const { return arrival_[p]; }
  double noise_mw() const { return noise_mw_; }
  /// Hex-adjacency between cells (wrap distance ~ one intersite distance).
  bool adjacent(int s, int t) const;

  /// Serving cell per pixel for given pilot powers (dBm). Depends only on
  /// pilot differences.
  std::vector<int> serving_cells(const Eigen::VectorXd& pilot_dbm) const;

 private:
  HexScenario scenario_;
  std::vector<Eigen::Vector2d> cell_pos_;
  Eigen::Vector2d t1_, t2_;
  std::vector<Eigen::Vector2d> pixel_pos_;
  Eigen::MatrixXd gain_db_;   // n_pixels x 19
  Eigen::MatrixXd gain_lin_;  // linear power gains
  std::vector<double> arrival_;
  double noise_mw_ = 0.0;

  friend struct KpiComputer;
};

/// Per-cell tunables of the three SON loops plus the fixed targets.
struct SonState {
  Eigen::VectorXd pilot_dbm;      // 19
  Eigen::VectorXd adm_threshold;  // 19
  Eigen::VectorXd data_dbm;       // 19

  static SonState defaults(const HexScenario& s);
};

struct CellKpis {
  Eigen::VectorXd load;      // rho_s, capped
  Eigen::VectorXd blocking;  // B_s
  Eigen::VectorXd coverage;  // K_s (fraction of area at or above R_min)
  Eigen::VectorXd cell_arrival;
  std::vector<bool> defined;  // false for empty serving areas
};

CellKpis evaluate_kpis(const HexNetwork& net, const SonState& state);

/// Loop layout: 3 loops per active cell, cell-major order (LB, AC, OP):
/// theta = [P_dB_0, x_0, D_0, P_dB_1, x_1, D_1, ...]. The load-balancing
/// reference is active cell 0, whose LB component is structurally zero.
int n_loops(const HexNetwork& net);
Eigen::VectorXd state_to_theta(const HexNetwork& net, const SonState& state);
SonState theta_to_state(const HexNetwork& net, const SonState& base,
                        const Eigen::VectorXd& theta);

/// Update vector over the active loops:
///   LB_s: rho_ref - rho_s,  AC_s: B_s - B_target,  OP_s: -(K_s - K_target).
Eigen::VectorXd son_vector_field(const HexNetwork& net, const SonState& state);

/// KpiEvaluator adapter for the SA simulator and the estimation module.
class LteEvaluator : public KpiEvaluator {
 public:
  LteEvaluator(const HexNetwork& net, SonState base)
      : net_(net), base_(std::move(base)) {}
  int dim() const override { return n_loops(net_); }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& theta) const override {
    return son_vector_field(net_, theta_to_state(net_, base_, theta));
  }

 private:
  const HexNetwork& net_;
  SonState base_;
};

/// SA projection boxes per loop, from the scenario.
std::vector<std::pair<double, double>> loop_boxes(const HexNetwork& net,
                                                  const SonState& base);

/// Connectivity pattern over the given loop subset: loops may exchange
/// information when co-located in one cell or when their cells are
/// hex-adjacent (X2 links).
SparsityPattern loop_pattern(const HexNetwork& net,
                             const std::vector<int>& loops);

struct CoordinationArtifacts {
  Eigen::MatrixXd A;             // full loop-space Jacobian estimate
  Eigen::VectorXd b;
  std::vector<int> effective_loops;  // rows/cols kept for synthesis
  Eigen::MatrixXd A_eff;
  StabilityReport uncoordinated;      // on the effective subsystem
  StabilityReport uncoordinated_full; // includes structurally-null loops
  SynthesisSolution solution;         // on the effective subsystem
  Eigen::MatrixXd C;             // full loop space; identity on null loops
  std::optional<StabilityReport> coordinated;  // of C_eff * A_eff
};

/// Finite-difference linearization of the SON vector field around state0,
/// connectivity-constrained synthesis on the non-degenerate loop subset, and
/// stability reports before/after. The load-balancing loop of the reference
/// cell has an identically-zero update; it is excluded from synthesis (its
/// row would make CA singular) and carried through with a unit gain.
CoordinationArtifacts linearize_and_coordinate(
    const HexNetwork& net, const SonState& state0,
    const std::optional<WeightVector>& loop_weights = {},
    const SynthesisConfig& config = {});

struct KpiSeries {
  std::vector<long> iterations;
  // One row per recorded iteration, per active cell.
  std::vector<Eigen::VectorXd> load, blocking, coverage;

  /// CSV "iter,cell,load,blocking,outage" (cells are 1-based in the file).
  void write_csv(std::ostream& os) const;
  /// Max over active cells and the three loop families of the KPI error at
  /// a recorded index (load error is the imbalance to the reference cell).
  double max_error(const HexNetwork& net, std::size_t idx) const;
  double outage_error(const HexNetwork& net, std::size_t idx) const;
  double load_imbalance(const HexNetwork& net, std::size_t idx) const;
};

/// Simulates the coordinated (C) or uncoordinated (identity) system via the
/// projected SA recursion and records per-cell KPI series. Each iteration
/// represents 6 s of simulated time.
KpiSeries run_experiment(const HexNetwork& net, const SonState& state0,
                         const Eigen::MatrixXd& C, const SaConfig& sa);

constexpr double kSecondsPerIteration = 6.0;

struct DemoResult {
  HexScenario scenario_used;          // after any hotspot sweep
  double hotspot_multiplier = 1.0;
  CoordinationArtifacts artifacts;    // equal weights
  SynthesisSolution weighted_solution;
  Eigen::MatrixXd C_weighted;
  KpiSeries uncoordinated, coordinated, weighted;
  double initial_max_error = 0.0;
  double terminal_max_error_uncoordinated = 0.0;
  double terminal_max_error_coordinated = 0.0;
  double terminal_outage_error_equal = 0.0;
  double terminal_outage_error_weighted = 0.0;
  double terminal_load_imbalance_equal = 0.0;
  double terminal_load_imbalance_weighted = 0.0;
};

struct DemoConfig {
  long sa_steps = 400;
  double sa_eps = 0.5;
  double noise_std = 0.005;
  double outage_weight = 20.0;
  int max_hotspot_sweeps = 12;
  double hotspot_sweep_factor = 1.5;
  long record_every = 1;
};

/// Full desk-scale experiment: sweep the hotspot until the linearized
/// effective system is unstable, coordinate it, and run the
/// uncoordinated / coordinated / outage-prioritized SA experiments.
DemoResult run_demo(const HexScenario& scenario, const DemoConfig& config,
                    std::uint64_t seed);

}  // namespace loopcoord

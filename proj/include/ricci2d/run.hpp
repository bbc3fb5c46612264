#pragma once

#include "ricci2d/diagnostics.hpp"
#include "ricci2d/kahler.hpp"
#include "ricci2d/potential.hpp"
#include "ricci2d/scenarios.hpp"
#include "ricci2d/timeseries.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ricci2d {

/// Quantities recorded alongside each TimeSeries row.
struct RecordDetail
{
  double dt = 0.0;               ///< last step taken
  double dt_max_used = 0.0;      ///< largest step so far
  long steps = 0;
  double sup_abs_f = 0.0;
  double identity_residual = 0.0;
  double defect = 0.0;           ///< ||e^u - e^{u0} - lap psi|| on interior nodes
  double f_integral_gap = 0.0;   ///< ||f - (f0 + int R ds)||
  double psi_rate_gap = 0.0;     ///< ||f + (u - u0 - f0)||
  double metric_rec_gap = 0.0;   ///< ||log(e^{u0} + lap psi) - u||
  double min_R = 0.0;
  double f_oscillation = 0.0;    ///< max_K |f - f(0)|
  double ck0 = std::numeric_limits<double>::quiet_NaN();
  double ck2 = std::numeric_limits<double>::quiet_NaN();
  double scale = std::numeric_limits<double>::quiet_NaN();
  double grad_invariance = std::numeric_limits<double>::quiet_NaN();
};

struct RunOptions
{
  bool co_evolve = true;        ///< evolve f, psi and the int R reconstruction
  bool allow_extinction = false;
  bool diagnostics = true;      ///< rescaling, C^k norms, gradient invariance
  /// Called at every recorded time with the state and, when available, the
  /// rescaled metric.
  std::function<void(const FlowState &, const TimeSeriesRow &, const RecordDetail &, const RescaledState *)> on_record;
};

struct RunResult
{
  Scenario scenario;
  ExistenceVerdict existence;
  TimeSeries series;
  std::vector<RecordDetail> details;
  FlowState final_state;
  std::vector<std::string> warnings;
  std::string stop_reason = "t_end"; ///< t_end or positivity-lost
  double h = 0.0;
  double sup_R0 = 0.0;
  long steps = 0;
  double area_slope = std::numeric_limits<double>::quiet_NaN(); ///< d area / dt fitted over the run
};

/// Record times: 0, 0.01 * 1.3^k below t_end, 1 and t_end itself.
std::vector<double> record_schedule(double t_end);

/// Implicit step size at time t.
double implicit_dt(const SolverConfig &cfg, double t);

/// Evolves the scenario to t_end, recording monitors. FiniteTime scenarios
/// need allow_extinction; with it, positivity loss ends the run early.
/// Errors carry the failing time.
RunResult run_flow(const Scenario &scenario, const RunOptions &options = {});

/// Everything derived from a finished run.
struct RunAnalysis
{
  std::vector<DecayFit> fits; ///< k = 0, 1, 2 (only those that could be fitted)
  std::vector<std::string> fit_errors;
  std::optional<DecayFit> gradient_fit;
  FlatnessReport flatness;
  MaxPrincipleResult max_principle;
  bool max_principle_applicable = true;
  bool identity_ok = true;       ///< identity residual and int R gap within 10 (dt + h^2) sup|R0|
  double identity_worst_ratio = 0.0;
};

RunAnalysis analyse(const RunResult &run);

/// Per-record monitors of a state, shared by the run and by verification.
TimeSeriesRow measure(const FlowState &s, const Scenario &scenario);

} // namespace ricci2d

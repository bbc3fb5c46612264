#include "ricci2d/run.hpp"
#include "ricci2d/detail/linear_system.hpp"
#include "ricci2d/error.hpp"
#include "ricci2d/geometry.hpp"
#include "ricci2d/operators.hpp"

#include <algorithm>
#include <cmath>

namespace ricci2d {

std::vector<double> record_schedule(double t_end)
{
  std::vector<double> times{0.0};
  for (int k = 0;; ++k) {
    const double t = 0.01 * std::pow(1.3, k);
    if (t >= t_end)
      break;
    times.push_back(t);
  }
  if (t_end > 1.0)
    times.push_back(1.0);
  times.push_back(t_end);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

double implicit_dt(const SolverConfig &cfg, double t)
{
  return std::min(cfg.dt_max, std::max(cfg.dt_min, cfg.dt_relative * t));
}

TimeSeriesRow measure(const FlowState &s, const Scenario &scenario)
{
  const CurvatureMonitors c = curvature_monitors(s.m);
  const MonitorReport p = potential_monitors(s.f, s.m, s.t);
  TimeSeriesRow row;
  row.t = s.t;
  row.supR = c.sup_R;
  row.supGradR2 = c.sup_grad_R2;
  row.supGrad2R2 = c.sup_grad2_R2;
  row.supGradF2g = p.sup_gradf2_g;
  row.supF = p.sup_F;
  row.area = conformal_area(s.m, s.m.grid().extent);
  row.u0 = s.m.u.at_origin();
  if (s.m.grid().radial() && scenario.diagnostics.aperture) {
    try {
      row.aperture = aperture(s.m).value;
    } catch (const Error &e) {
      if (e.code() != "domain-too-small")
        throw;
    }
  }
  return row;
}

namespace {

double interior_gap(const GridSpec &grid, const Eigen::VectorXd &a, const Eigen::VectorXd &b)
{
  double worst = 0.0;
  for (Index k = 0; k < a.size(); ++k)
    if (!grid.on_boundary(k))
      worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

std::string at_time(double t)
{
  return " (t = " + std::to_string(t) + ")";
}

class Runner
{
public:
  Runner(const Scenario &scenario, const RunOptions &options)
    : sc_(scenario), opt_(options), grid_(scenario.grid), lap_(scenario.grid), boundary_(scenario.boundary_data())
  {}

  RunResult run();

private:
  void record(double last_dt);
  void explicit_steps(double t_target, bool stride_mode, long stride);
  void implicit_steps(double t_target, bool stride_mode, long stride);
  void after_step(double dt, Eigen::VectorXd &r_new);

  const Scenario &sc_;
  const RunOptions &opt_;
  GridSpec grid_;
  LaplacianOperator lap_;
  BoundaryData boundary_;
  RunResult res_;
  FlowState s_;
  PotentialFlowState pot_;
  Eigen::VectorXd f_rec_, r_prev_;
  double dt_max_used_ = 0.0, last_dt_ = 0.0;
  bool warned_pullback_ = false;
};

void Runner::record(double last_dt)
{
  TimeSeriesRow row = measure(s_, sc_);
  RecordDetail d;
  d.dt = last_dt;
  d.dt_max_used = dt_max_used_;
  d.steps = s_.step_count;
  d.sup_abs_f = sup_norm(s_.f);
  d.identity_residual = identity_residual(s_.f, s_.m);
  d.defect = equivalence_defect(s_.psi, pot_.u0_ref, s_.m);
  d.f_integral_gap = interior_gap(grid_, s_.f.values, f_rec_);
  d.psi_rate_gap = (s_.f.values + potential_rate(pot_, s_.m.u.values)).cwiseAbs().maxCoeff();
  {
    PotentialFlowState p = pot_;
    p.psi = s_.psi;
    d.metric_rec_gap = reconstruct_metric(p, s_.m).sup_error;
  }
  d.min_R = scalar_curvature(s_.m).values.minCoeff();
  d.f_oscillation = oscillation(s_.f, sc_.diagnostics.compact_fraction * grid_.extent);

  std::optional<RescaledState> rs;
  if (opt_.diagnostics) {
    try {
      rs = rescale(s_.m, s_.t, sc_.diagnostics.grid());
      d.scale = rs->scale;
      d.ck0 = ck_norm(*rs, 0, sc_.diagnostics.ck_radius);
      d.ck2 = ck_norm(*rs, 2, sc_.diagnostics.ck_radius);
      d.grad_invariance = gradient_invariance_check(s_.m, s_.f, *rs);
    } catch (const Error &e) {
      if (e.code() != "pullback-out-of-domain")
        throw;
      rs.reset();
      if (!warned_pullback_)
        res_.warnings.push_back(std::string(e.what()) + at_time(s_.t));
      warned_pullback_ = true;
    }
  }
  res_.series.push_back(row);
  res_.details.push_back(d);
  if (opt_.on_record)
    opt_.on_record(s_, row, d, rs ? &*rs : nullptr);
}

// Bookkeeping shared by both schemes once u has moved from u_old by dt:
// prescribed boundary values of f, and the int R ds reconstruction.
// f_t = R = -u_t on prescribed boundary nodes.
void shift_prescribed(const GridSpec &grid, Eigen::VectorXd &f, const Eigen::VectorXd &u_new,
                      const Eigen::VectorXd &u_old)
{
  if (grid.boundary == BoundaryModel::Prescribed)
    for (Index k = 0; k < f.size(); ++k)
      if (grid.on_boundary(k))
        f[k] -= u_new[k] - u_old[k];
}

// r_new holds R at the end of the step and is swapped into r_prev_.
void Runner::after_step(double dt, Eigen::VectorXd &r_new)
{
  f_rec_ += (0.5 * dt) * (r_prev_ + r_new);
  r_prev_.swap(r_new);
  dt_max_used_ = std::max(dt_max_used_, dt);
  last_dt_ = dt;
}

void Runner::explicit_steps(double t_target, bool stride_mode, long stride)
{
  ExplicitIntegrator integ(grid_, sc_.solver, boundary_);
  Eigen::VectorXd &u = s_.m.u.values;
  integ.reset(u);
  const auto fixed = detail::fixed_rows(grid_);
  Eigen::VectorXd lap_f(u.size()), u_old, r_new(u.size());
  long taken = 0;
  while (stride_mode ? (taken < stride && s_.t < sc_.solver.t_end) : s_.t < t_target) {
    const double cap = (stride_mode ? sc_.solver.t_end : t_target) - s_.t;
    const double dt = std::min({cap, sc_.solver.dt_max, integ.stable_dt()});
    if (opt_.co_evolve) {
      u_old = u;
      const Eigen::VectorXd &w = integ.inverse_factor();
      lap_.apply(s_.f.values, lap_f);
      for (Index k = 0; k < u.size(); ++k)
        if (!fixed[k])
          s_.f.values[k] += dt * w[k] * lap_f[k];
      s_.psi.values += (0.5 * dt) * potential_rate(pot_, u);
    }
    double taken_dt;
    try {
      taken_dt = integ.step(u, s_.t, dt);
    } catch (const Error &e) {
      throw Error(e.code(), std::string(e.what()) + at_time(s_.t));
    }
    const bool last = taken_dt >= cap;
    s_.t = last ? (stride_mode ? sc_.solver.t_end : t_target) : s_.t + taken_dt;
    ++s_.step_count;
    ++taken;
    if (opt_.co_evolve) {
      lap_.apply(u, r_new);
      r_new.array() *= -integ.inverse_factor().array();
      s_.psi.values += (0.5 * taken_dt) * potential_rate(pot_, u);
      shift_prescribed(grid_, s_.f.values, u, u_old);
      after_step(taken_dt, r_new);
    }
    else {
      dt_max_used_ = std::max(dt_max_used_, taken_dt);
      last_dt_ = taken_dt;
    }
  }
  if (!s_.m.u.values.allFinite() || !std::isfinite(std::exp(-s_.m.u.values.minCoeff())))
    throw Error("positivity-lost", "conformal factor lost positivity" + at_time(s_.t));
}

void Runner::implicit_steps(double t_target, bool stride_mode, long stride)
{
  long taken = 0;
  const double t_stop = stride_mode ? sc_.solver.t_end : t_target;
  while (stride_mode ? (taken < stride && s_.t < t_stop) : s_.t < t_stop) {
    double dt = std::min(implicit_dt(sc_.solver, s_.t), t_stop - s_.t);
    if (t_stop - s_.t - dt < 1e-9 * dt)
      dt = t_stop - s_.t;
    FlowState next;
    for (int halvings = 0;; ++halvings) {
      try {
        next = step_implicit(s_, dt, sc_.solver, boundary_);
        break;
      } catch (const Error &e) {
        if (e.code() != "newton-diverged" || halvings == 20)
          throw Error(e.code(), std::string(e.what()) + at_time(s_.t));
        dt *= 0.5;
      }
    }
    const bool last = s_.t + dt >= t_stop;
    const Eigen::VectorXd u_old = s_.m.u.values;
    if (opt_.co_evolve) {
      // boundary values of f move first so the solve sees the new Dirichlet data
      ScalarField f_in = s_.f;
      shift_prescribed(grid_, f_in.values, next.m.u.values, u_old);
      next.f = step_heat(f_in, s_.m, dt, Scheme::ImplicitNewton);
      next.psi.values += dt * potential_rate(pot_, next.m.u.values);
    }
    next.t = last ? t_stop : s_.t + dt;
    s_ = std::move(next);
    ++taken;
    if (opt_.co_evolve) {
      Eigen::VectorXd r_new = scalar_curvature(s_.m).values;
      after_step(dt, r_new);
    }
    else {
      dt_max_used_ = std::max(dt_max_used_, dt);
      last_dt_ = dt;
    }
  }
}

RunResult Runner::run()
{
  sc_.validate();
  res_.scenario = sc_;
  res_.h = grid_.spacing();
  const ConformalField m0 = sc_.initial_metric();
  res_.existence = classify_global_existence(m0);
  if (res_.existence.verdict == Existence::FiniteTime && !opt_.allow_extinction)
    throw Error("finite-time-existence",
                "initial area int e^{u0} dx is finite (about " + std::to_string(res_.existence.area_total) +
                    ", tail exponent " + std::to_string(res_.existence.tail_exponent) +
                    " > 2), so the flow cannot exist for all time; pass --allow-extinction to run it anyway");

  s_.t = 0.0;
  s_.m = m0;
  s_.f = solve_initial_potential(m0, sc_.gauge, &res_.warnings);
  s_.psi = ScalarField::constant(grid_, 0.0);
  pot_ = make_potential_state(m0, s_.f);
  f_rec_ = s_.f.values;
  r_prev_ = scalar_curvature(m0).values;
  res_.sup_R0 = r_prev_.cwiseAbs().maxCoeff();

  record(0.0);
  const bool stride_mode = sc_.solver.monitor_stride > 0;
  const std::vector<double> times = stride_mode ? std::vector<double>{} : record_schedule(sc_.solver.t_end);
  std::size_t next = 1;
  try {
    while (s_.t < sc_.solver.t_end) {
      const double target = stride_mode ? sc_.solver.t_end : times[next++];
      if (sc_.solver.scheme == Scheme::ExplicitCFL)
        explicit_steps(target, stride_mode, sc_.solver.monitor_stride);
      else
        implicit_steps(target, stride_mode, sc_.solver.monitor_stride);
      record(last_dt_);
    }
  } catch (const Error &e) {
    if (e.code() != "positivity-lost" || !opt_.allow_extinction)
      throw;
    res_.stop_reason = "positivity-lost";
    res_.warnings.push_back(e.what());
  }
  res_.final_state = s_;
  res_.steps = s_.step_count;

  if (res_.series.size() >= 2) {
    double st = 0, sa = 0, stt = 0, sta = 0;
    const double n = static_cast<double>(res_.series.size());
    for (const auto &r : res_.series) {
      st += r.t;
      sa += r.area;
      stt += r.t * r.t;
      sta += r.t * r.area;
    }
    const double den = n * stt - st * st;
    if (den > 0.0)
      res_.area_slope = (n * sta - st * sa) / den;
  }
  return std::move(res_);
}

} // namespace

RunResult run_flow(const Scenario &scenario, const RunOptions &options)
{
  Runner runner(scenario, options);
  return runner.run();
}

RunAnalysis analyse(const RunResult &run)
{
  RunAnalysis a;
  const Scenario &sc = run.scenario;
  const double t_end = run.series.empty() ? 0.0 : run.series.back().t;
  for (int k = 0; k <= 2; ++k) {
    try {
      a.fits.push_back(fit_decay(run.series, k, sc.diagnostics.fit_t_min, t_end));
    } catch (const Error &e) {
      a.fit_errors.push_back("k=" + std::to_string(k) + ": " + e.what());
    }
  }
  try {
    a.gradient_fit = fit_decay(run.series, -1, sc.diagnostics.fit_t_min, t_end);
  } catch (const Error &) {
  }

  FlatnessInputs in;
  in.fits = a.fits;
  in.fit_errors = a.fit_errors;
  for (std::size_t i = 0; i < run.series.size(); ++i) {
    in.ck2.emplace_back(run.series[i].t, run.details[i].ck2);
    in.f_osc.emplace_back(run.series[i].t, run.details[i].f_oscillation);
  }
  in.reference_time = 1.0;
  a.flatness = flatness_verdict(in);

  std::vector<double> sup_f;
  for (const auto &d : run.details)
    sup_f.push_back(d.sup_abs_f);
  a.max_principle = max_principle_check(sup_f, run.h);
  a.max_principle_applicable =
      std::find(run.warnings.begin(), run.warnings.end(), "f0-unbounded") == run.warnings.end();

  for (const auto &d : run.details) {
    const double tol = 10.0 * (d.dt_max_used + run.h * run.h) * run.sup_R0;
    const double worst = std::max(d.identity_residual, d.f_integral_gap);
    if (tol > 0.0)
      a.identity_worst_ratio = std::max(a.identity_worst_ratio, worst / tol);
    else if (worst > 0.0)
      a.identity_worst_ratio = std::numeric_limits<double>::infinity();
  }
  a.identity_ok = a.identity_worst_ratio <= 1.0;
  return a;
}

} // namespace ricci2d

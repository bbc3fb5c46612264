#include "ricci2d/commands.hpp"
#include "ricci2d/error.hpp"
#include "ricci2d/geometry.hpp"
#include "ricci2d/run.hpp"
#include "ricci2d/snapshot.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#ifndef RICCI2D_VERSION
#define RICCI2D_VERSION "0.0.0"
#endif

namespace ricci2d {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fnv1a_hex(const std::string &text)
{
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

unsigned diagnostics_threads()
{
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char *cap = std::getenv("RICCI2D_THREADS")) {
    char *end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && v >= 1)
      n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

namespace {

// Runs fn(i) for i in [0, count) on up to diagnostics_threads() workers.
template <typename Fn> void parallel_for(std::size_t count, Fn &&fn)
{
  const unsigned workers = std::min<std::size_t>(diagnostics_threads(), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure)
            failure = std::current_exception();
        }
      }
    });
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

Scenario resolve(const ScenarioSource &src)
{
  Scenario s;
  if (src.config)
    s = load_scenario(*src.config);
  else if (src.scenario)
    s = build(*src.scenario);
  else
    throw Error("bad-config", "give --config or --scenario");
  if (src.t_end)
    s.solver.t_end = *src.t_end;
  if (src.grid_n)
    s.grid.n = *src.grid_n;
  if (src.scheme)
    s.solver.scheme = parse_scheme(*src.scheme);
  s.validate();
  return s;
}

std::string iso_now()
{
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string snapshot_name(const std::string &field, std::size_t index)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu.txt", field.c_str(), index);
  return buf;
}

json fit_json(const DecayFit &f)
{
  return {{"k", f.k},
          {"slope", f.slope},
          {"intercept", f.intercept},
          {"residual", f.residual},
          {"window", {f.window.first, f.window.second}},
          {"points", f.points},
          {"bound_constant", f.bound_constant},
          {"bound_ratio", f.bound_ratio},
          {"threshold", f.threshold},
          {"vanishing", f.vanishing},
          {"passes", f.passes}};
}

// JSON has no NaN; store null instead.
json number(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

json flatness_json(const RunResult &run, const RunAnalysis &a)
{
  json fits = json::array();
  for (const auto &f : a.fits)
    fits.push_back(fit_json(f));
  const bool applicable = run.existence.verdict != Existence::FiniteTime;
  const auto &fl = a.flatness;
  json out = {{"verdict", applicable ? (fl.pass ? "PASS" : "FAIL") : "not-applicable"},
              {"clauses", {{"a_decay_fits", fl.decay_fits}, {"b_ck_drop", fl.ck_drop}, {"c_f_flattens", fl.f_flattens}}},
              {"failed", fl.failed},
              {"fits", fits},
              {"fit_errors", a.fit_errors},
              {"window", {run.scenario.diagnostics.fit_t_min, run.series.empty() ? 0.0 : run.series.back().t}},
              {"ck2_reference", number(fl.ck2_reference)},
              {"ck2_end", number(fl.ck2_end)},
              {"f_oscillation_reference", number(fl.osc_reference)},
              {"f_oscillation_end", number(fl.osc_end)}};
  if (a.gradient_fit)
    out["gradient_fit"] = fit_json(*a.gradient_fit);
  return out;
}

void write_text(const fs::path &path, const std::string &text)
{
  std::ofstream out(path);
  out << text;
  if (!out)
    throw Error("io", "cannot write " + path.string());
}

json read_json(const fs::path &path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("io", "missing " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw Error("io", path.string() + ": " + e.what());
  }
}

} // namespace

int cmd_run(const RunCommand &cmd, std::ostream &out, std::ostream &err)
{
  try {
    const Scenario sc = resolve(cmd.source);
    const std::string start = iso_now();
    const auto wall0 = std::chrono::steady_clock::now();
    fs::create_directories(cmd.out_dir / "snapshots");
    fs::create_directories(cmd.out_dir / "rescaled_snapshots");
    std::vector<std::string> files;

    RunOptions opt;
    opt.allow_extinction = cmd.allow_extinction;
    std::size_t index = 0;
    opt.on_record = [&](const FlowState &s, const TimeSeriesRow &, const RecordDetail &, const RescaledState *r) {
      for (auto [name, field] : {std::pair<const char *, const ScalarField *>{"u", &s.m.u}, {"f", &s.f}, {"psi", &s.psi}}) {
        const std::string rel = "snapshots/" + snapshot_name(name, index);
        write_snapshot(cmd.out_dir / rel, *field, s.t, name);
        files.push_back(rel);
      }
      if (r) {
        const std::string rel = "rescaled_snapshots/" + snapshot_name("uhat", index);
        write_snapshot(cmd.out_dir / rel, r->u_hat, s.t, "uhat");
        files.push_back(rel);
      }
      ++index;
    };
    const RunResult run = run_flow(sc, opt);
    const RunAnalysis a = analyse(run);

    write_timeseries(cmd.out_dir / "timeseries.csv", run.series);
    std::vector<std::pair<double, double>> residual, defect;
    for (std::size_t i = 0; i < run.series.size(); ++i) {
      residual.emplace_back(run.series[i].t, run.details[i].identity_residual);
      defect.emplace_back(run.series[i].t, run.details[i].defect);
    }
    write_pairs(cmd.out_dir / "identity_residual.csv", "t,residual", residual);
    write_pairs(cmd.out_dir / "equivalence_defect.csv", "t,defect", defect);
    const json flat = flatness_json(run, a);
    write_text(cmd.out_dir / "flatness_report.json", flat.dump(2) + "\n");
    for (const char *f : {"timeseries.csv", "identity_residual.csv", "equivalence_defect.csv", "flatness_report.json"})
      files.emplace_back(f);

    json records = json::array();
    for (const auto &d : run.details)
      records.push_back({{"dt", d.dt},
                         {"dt_max_used", d.dt_max_used},
                         {"steps", d.steps},
                         {"sup_abs_f", d.sup_abs_f},
                         {"f_integral_gap", d.f_integral_gap},
                         {"psi_rate_gap", d.psi_rate_gap},
                         {"metric_reconstruction_gap", number(d.metric_rec_gap)},
                         {"min_R", d.min_R},
                         {"f_oscillation", d.f_oscillation},
                         {"ck0", number(d.ck0)},
                         {"ck2", number(d.ck2)},
                         {"scale", number(d.scale)},
                         {"gradient_invariance", number(d.grad_invariance)}});
    const std::string config = scenario_to_ini(sc);
    const bool applicable = run.existence.verdict != Existence::FiniteTime;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    json manifest = {
        {"tool", "ricci2d"},
        {"version", RICCI2D_VERSION},
        {"scenario_hash", fnv1a_hex(config)},
        {"config", config},
        {"start_time", start},
        {"end_time", iso_now()},
        {"wall_seconds", wall},
        {"files", files},
        {"h", run.h},
        {"sup_R0", run.sup_R0},
        {"steps", run.steps},
        {"stop_reason", run.stop_reason},
        {"warnings", run.warnings},
        {"area_slope", number(run.area_slope)},
        {"existence",
         {{"verdict", to_string(run.existence.verdict)},
          {"area_inner", run.existence.area_inner},
          {"tail_exponent", run.existence.tail_exponent},
          {"tail_residual", run.existence.tail_residual},
          {"area_total", number(run.existence.area_total)}}},
        {"verdicts",
         {{"flatness", flat["verdict"]},
          {"max_principle", a.max_principle_applicable ? (a.max_principle.holds ? "PASS" : "FAIL") : "not-applicable"},
          {"max_principle_worst_excess", a.max_principle.worst_excess},
          {"identity", a.identity_ok ? "PASS" : "FAIL"},
          {"identity_worst_ratio", number(a.identity_worst_ratio)}}},
        {"records", records}};
    const fs::path tmp = cmd.out_dir / "manifest.json.tmp";
    write_text(tmp, manifest.dump(2) + "\n");
    fs::rename(tmp, cmd.out_dir / "manifest.json");

    for (const auto &w : run.warnings)
      err << "warning: " << w << '\n';
    out << "scenario " << sc.name << ": " << run.series.size() << " records, " << run.steps << " steps, stopped at t = "
        << format_real(run.final_state.t) << " (" << run.stop_reason << ")\n";
    out << "existence: " << to_string(run.existence.verdict) << "\n";
    if (!applicable) {
      out << "flatness: not applicable (finite-time data), area slope " << format_real(run.area_slope) << '\n';
      return 0;
    }
    out << "flatness: " << (a.flatness.pass ? "PASS" : "FAIL") << '\n';
    for (const auto &f : a.flatness.failed)
      out << "  failed clause " << f << '\n';
    return a.flatness.pass ? 0 : 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_aperture(const ScenarioSource &src, std::ostream &out, std::ostream &err)
{
  try {
    const Scenario sc = resolve(src);
    const ConformalField m = sc.initial_metric(sc.diagnostics.aperture_grid());
    const ApertureEstimate est = aperture(m);
    out << "aperture = " << format_real(est.value) << '\n';
    out << "extrapolated = " << (est.extrapolated ? "true" : "false") << '\n';
    out << "r,ratio\n";
    for (const auto &[r, ratio] : est.samples)
      out << format_real(r) << ',' << format_real(ratio) << '\n';
    return 0;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_classify(const ScenarioSource &src, std::ostream &out, std::ostream &err)
{
  try {
    const Scenario sc = resolve(src);
    const ExistenceVerdict v = classify_global_existence(sc.initial_metric());
    out << "verdict = " << to_string(v.verdict) << '\n';
    out << "area_inner = " << format_real(v.area_inner) << '\n';
    out << "tail_exponent = " << format_real(v.tail_exponent) << '\n';
    out << "tail_residual = " << format_real(v.tail_residual) << '\n';
    out << "area_total = " << format_real(v.area_total) << '\n';
    return 0;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_verify(const fs::path &out_dir, std::ostream &out, std::ostream &err)
{
  Scenario sc;
  json manifest, report;
  TimeSeries series;
  std::vector<std::pair<double, double>> residuals, defects;
  try {
    manifest = read_json(out_dir / "manifest.json");
    report = read_json(out_dir / "flatness_report.json");
    for (const auto &f : manifest.at("files"))
      if (!fs::exists(out_dir / f.get<std::string>()))
        throw Error("io", "listed file missing: " + f.get<std::string>());
    sc = parse_scenario(manifest.at("config").get<std::string>());
    series = read_timeseries(out_dir / "timeseries.csv");
    residuals = read_pairs(out_dir / "identity_residual.csv");
    defects = read_pairs(out_dir / "equivalence_defect.csv");
    if (residuals.size() != series.size() || defects.size() != series.size() ||
        manifest.at("records").size() != series.size())
      throw Error("io", "record counts disagree between output files");
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  std::vector<std::string> failures;
  std::mutex mu;
  auto fail = [&](const std::string &what) {
    std::lock_guard lock(mu);
    failures.push_back(what);
  };
  const double h = manifest.at("h").get<double>();
  const double sup_R0 = manifest.at("sup_R0").get<double>();
  std::vector<double> sup_f(series.size(), 0.0);
  ScalarField u0;
  try {
    const Snapshot first = read_snapshot(out_dir / "snapshots" / snapshot_name("u", 0), sc.grid.boundary);
    u0 = first.field;
    u0.grid = sc.grid;
    parallel_for(series.size(), [&](std::size_t i) {
      const auto &rec = manifest.at("records").at(i);
      FlowState s;
      auto load = [&](const char *name) {
        Snapshot snap = read_snapshot(out_dir / "snapshots" / snapshot_name(name, i), sc.grid.boundary);
        if (snap.field.grid.kind != sc.grid.kind || snap.field.grid.n != sc.grid.n ||
            snap.field.grid.extent != sc.grid.extent)
          throw Error("bad-snapshot", "snapshot grid does not match the configuration");
        snap.field.grid = sc.grid;
        s.t = snap.t;
        return snap.field;
      };
      s.m = ConformalField(load("u"));
      s.f = load("f");
      s.psi = load("psi");
      const std::string at = " at t = " + format_real(s.t);
      if (!(measure(s, sc) == series[i]))
        fail("monitors recomputed from snapshots differ from timeseries.csv" + at);
      const double res = identity_residual(s.f, s.m);
      const double tol = 10.0 * (rec.at("dt_max_used").get<double>() + h * h) * sup_R0;
      if (res != residuals[i].second)
        fail("identity residual differs from identity_residual.csv" + at);
      if (!(res <= tol))
        fail("identity residual " + format_real(res) + " above " + format_real(tol) + at);
      const double gap = rec.at("f_integral_gap").get<double>();
      if (!(gap <= tol))
        fail("int R ds reconstruction gap " + format_real(gap) + " above " + format_real(tol) + at);
      const double defect = equivalence_defect(s.psi, ConformalField(u0), s.m);
      if (defect != defects[i].second)
        fail("equivalence defect differs from equivalence_defect.csv" + at);
      const double dt = rec.at("dt_max_used").get<double>();
      const double bound = std::max(1.0, static_cast<double>(rec.at("steps").get<long>())) * 10.0 * dt * (dt + h * h) * sup_R0;
      if (!(defect <= bound + 1e-12))
        fail("equivalence defect " + format_real(defect) + " above " + format_real(bound) + at);
      sup_f[i] = sup_norm(s.f);
    });
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  const auto warnings = manifest.at("warnings").get<std::vector<std::string>>();
  const bool bounded = std::find(warnings.begin(), warnings.end(), "f0-unbounded") == warnings.end();
  if (bounded) {
    const MaxPrincipleResult mp = max_principle_check(sup_f, h);
    if (!mp.holds)
      failures.push_back("maximum principle violated by " + format_real(mp.worst_excess));
  }

  // fits must be reproducible from the stored series
  const double t_end = series.empty() ? 0.0 : series.back().t;
  std::size_t stored = 0;
  for (int k = 0; k <= 2; ++k) {
    try {
      const DecayFit fit = fit_decay(series, k, sc.diagnostics.fit_t_min, t_end);
      const auto &fits = report.at("fits");
      if (stored >= fits.size() || fits[stored].at("slope").get<double>() != fit.slope ||
          fits[stored].at("bound_constant").get<double>() != fit.bound_constant ||
          fits[stored].at("passes").get<bool>() != fit.passes)
        failures.push_back("decay fit k=" + std::to_string(k) + " differs from flatness_report.json");
      ++stored;
    } catch (const Error &) {
    }
  }
  if (stored != report.at("fits").size())
    failures.push_back("flatness_report.json lists fits that cannot be reproduced");

  for (const auto &f : failures)
    out << "FAIL " << f << '\n';
  if (failures.empty())
    out << "verify: all " << series.size() << " records consistent\n";
  return failures.empty() ? 0 : 2;
}

int cmd_fit(const fs::path &out_dir, std::optional<double> t_min, std::optional<double> t_max, std::ostream &out,
            std::ostream &err)
{
  try {
    const json manifest = read_json(out_dir / "manifest.json");
    const Scenario sc = parse_scenario(manifest.at("config").get<std::string>());
    const TimeSeries series = read_timeseries(out_dir / "timeseries.csv");
    const double lo = t_min.value_or(sc.diagnostics.fit_t_min);
    const double hi = t_max.value_or(series.empty() ? 0.0 : series.back().t);
    bool all = true;
    out << "k,slope,threshold,residual,bound_constant,bound_ratio,points,passes\n";
    for (int k = -1; k <= 2; ++k) {
      const DecayFit f = fit_decay(series, k, lo, hi);
      all = all && f.passes;
      out << (k < 0 ? std::string("gradf") : std::to_string(k)) << ',' << format_real(f.slope) << ','
          << format_real(f.threshold) << ',' << format_real(f.residual) << ',' << format_real(f.bound_constant) << ','
          << format_real(f.bound_ratio) << ',' << f.points << ','
          << (f.passes ? "true" : "false") << '\n';
    }
    return all ? 0 : 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace ricci2d

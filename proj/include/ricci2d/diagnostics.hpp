#pragma once

#include "ricci2d/field.hpp"
#include "ricci2d/timeseries.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ricci2d {

/// Pullback of the metric by x = scale a with scale = e^{-u(0,t)/2}:
/// u_hat(a) = u(scale a) - u(0), so phi* g = e^{u_hat} g_E.
struct RescaledState
{
  ScalarField u_hat;
  double scale = 1.0;
  double t = 0.0;
};

/// Largest A_max whose scaled diagnostic grid stays inside the flow grid.
double max_pullback_extent(const GridSpec &flow_grid, const GridSpec &diag_grid, double scale);

/// Throws Error("pullback-out-of-domain") when scale * A_max leaves the grid.
RescaledState rescale(const ConformalField &m, double t, const GridSpec &diag_grid);

/// w(scale a) on the diagnostic grid, same domain check as rescale.
ScalarField pull_back(const ScalarField &w, double scale, const GridSpec &diag_grid);

/// max over |a| <= radius of |grad^j u_hat| for j = 0..k (k <= 2).
double ck_norm(const RescaledState &r, int k, double radius);
double ck_norm(const ScalarField &w, int k, double radius);

/// sup|R|, sup |grad R|^2_g and sup |grad^2 R|^2_g of the metric.
struct CurvatureMonitors
{
  double sup_R = 0.0;
  double sup_grad_R2 = 0.0;
  double sup_grad2_R2 = 0.0;
};
CurvatureMonitors curvature_monitors(const ConformalField &m);

/// Log-log fit of sup|grad^k R|^2 against (1 + t).
struct DecayFit
{
  int k = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  std::size_t points = 0;
  double bound_constant = 0.0;    ///< max over the window of value (1+t)^{-slope}
  double bound_ratio = 0.0;       ///< max / min of that constant over the window
  double threshold = 0.0;         ///< required slope upper bound
  bool vanishing = false;         ///< every value is zero
  bool passes = false;
};

/// Fits values ~ (1+t)^slope over times in [t_min, t_max]. `exponent` is the
/// bound's decay rate (k + 2 for curvature, 1 for |grad f|^2); the fit passes
/// when slope <= -exponent + 0.5 and value (1+t)^{-slope} stays within a
/// factor of ten over the window. Throws Error("window-too-short") with fewer
/// than 12 points or less than 1.5 decades of (1 + t).
DecayFit fit_power_law(const std::vector<double> &times, const std::vector<double> &values, double exponent,
                       double t_min, double t_max);

/// Fit of sup|grad^k R|^2 from a recorded series (k = 0 uses supR^2), with
/// exponent k + 2. k = -1 fits sup |grad f|^2_g with exponent 1.
DecayFit fit_decay(const TimeSeries &series, int k, double t_min, double t_max);

/// |grad_g f| at x = scale a versus |grad (f o phi)|_{phi* g} at a, max over
/// the diagnostic grid. Both are equal analytically.
double gradient_invariance_check(const ConformalField &m, const ScalarField &f, const RescaledState &r);

/// max over |x| <= radius of |w(x) - w(0)|.
double oscillation(const ScalarField &w, double radius);

struct FlatnessInputs
{
  std::vector<DecayFit> fits;                     // k = 0, 1, 2
  std::vector<std::string> fit_errors;            // fits that could not be computed
  std::vector<std::pair<double, double>> ck2;     // (t, ck_norm k = 2)
  std::vector<std::pair<double, double>> f_osc;   // (t, oscillation of f on K)
  double reference_time = 1.0;
};

struct FlatnessReport
{
  bool pass = false;
  bool decay_fits = false;   // clause (a)
  bool ck_drop = false;      // clause (b)
  bool f_flattens = false;   // clause (c)
  double ck2_reference = 0.0, ck2_end = 0.0;
  double osc_reference = 0.0, osc_end = 0.0;
  std::vector<std::string> failed; ///< names of violated clauses
};

FlatnessReport flatness_verdict(const FlatnessInputs &in);

} // namespace ricci2d

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lspace/mathutil.hpp"

namespace lspace {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  int subdivisions = 0;
  bool converged = false;
  /// For open-ended integrals: cumulative values at block edges (u, value).
  std::vector<std::pair<double, double>> partials;
};

struct QuadratureOptions {
  double tol = 1e-9;       // absolute
  int max_panels = 20000;
  int max_blocks = 26;     // open-end block doublings (first block width 4)
  double explode_at = 1e100;
};

/// Integrand given as log phi(u), where the target integral is
/// ∫ phi(u) du over the requested u-range; -inf means phi = 0.
using LogIntegrand = std::function<double(double)>;

/// Adaptive Simpson over a finite u-interval [u_lo, u_hi].
/// Throws std::runtime_error naming the offending point on a NaN sample.
QuadratureResult integrate_u(const LogIntegrand& log_phi, double u_lo, double u_hi,
                             const QuadratureOptions& opt = {});

/// Open upper end: blocks of doubling width from u_lo until the tail is
/// below tol/10 (converged) or the block budget / explosion cap is hit.
/// Cumulative values at block edges land in QuadratureResult::partials.
QuadratureResult integrate_u_open(const LogIntegrand& log_phi, double u_lo,
                                  const QuadratureOptions& opt = {});

/// ∫_(lo,hi] g(t) dt for an endpoint-singular integrand, computed after the
/// substitution u = log(e/t). lo = 0 is allowed (open-ended in u).
QuadratureResult integrate_graded(const std::function<double(double)>& g, double lo,
                                  double hi, double tol = 1e-9);

/// Partial sums of term(j) from j_start through each level, ascending j,
/// compensated summation. Throws on a non-finite term naming j.
std::vector<double> series_partial_sums(const std::function<double(long)>& term,
                                        long j_start, const std::vector<long>& levels);

struct GrowthReport {
  enum class Model { bounded, log, loglog, power };
  enum class Verdict { convergent, divergent, inconclusive };

  std::vector<double> levels;
  std::vector<double> values;
  bool levels_are_log = false;  // levels hold log(L) instead of L
  Model model = Model::bounded;
  double fit_quality = 0.0;  // r^2 of the chosen model
  double fitted_rate = 0.0;  // slope / exponent of the chosen model
  /// Increment-decay exponent beta: partial increments behave like
  /// (log L)^(-beta); beta > 1 signals convergence, beta <= 1 divergence.
  double increment_exponent = kNaN;
  Verdict verdict = Verdict::inconclusive;
  std::string note;
};

std::string to_string(GrowthReport::Model m);
std::string to_string(GrowthReport::Verdict v);

/// Classify partial values at increasing truncation levels. Requires >= 4
/// levels spanning >= 3 decades and values non-decreasing within 1e-12 slack.
/// With levels_are_log, `levels` carries log(L) (span check: >= 3 ln 10).
GrowthReport classify_growth(const std::vector<double>& levels,
                             const std::vector<double>& values,
                             bool levels_are_log = false);

/// Golden-section refinement of a maximum of f inside [lo, hi].
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double* best_value = nullptr, int max_iter = 200);

}  // namespace lspace

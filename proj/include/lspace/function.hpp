#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lspace/mathutil.hpp"

namespace lspace {

/// Piecewise-constant function on (0,1] with cells (break_i, break_{i+1}].
///
/// Breakpoints are stored in u-coordinates (u = log(e/t), descending, the
/// first entry is +inf for t = 0) and cell values are stored as logarithms.
/// This keeps geometric cell families t_j = e^{-j} representable far past
/// the double underflow threshold, which plain t-space breakpoints hit
/// around t ~ 1e-308.
class StepFunction {
 public:
  StepFunction() = default;

  /// Build from plain t-space breakpoints [0, ..., 1] and cell values >= 0.
  static StepFunction from_values(const std::vector<double>& breaks,
                                  const std::vector<double>& values);

  /// Build from t-space breakpoints and log-space cell values.
  static StepFunction from_log_values(const std::vector<double>& breaks,
                                      const std::vector<double>& log_values);

  /// Build from u-space breakpoints (descending, front may be +inf for t=0,
  /// back must be 1 for t=1) and log-space cell values.
  static StepFunction from_u_cells(std::vector<double> u_breaks,
                                   std::vector<double> log_values);

  std::size_t cell_count() const { return log_values_.size(); }
  /// Cell index containing t in (0,1]; cells are (t_i, t_{i+1}].
  std::size_t cell_index(double t) const;
  /// Cell index in u-coordinates; cell i covers [u_lo(i), u_hi(i)).
  std::size_t cell_index_u(double u) const;

  double log_value(std::size_t cell) const { return log_values_[cell]; }
  double value(std::size_t cell) const { return std::exp(log_values_[cell]); }
  double log_value_at(double t) const { return log_values_[cell_index(t)]; }
  double value_at(double t) const { return std::exp(log_value_at(t)); }

  /// u-coordinates of the cell: [u_lo(cell), u_hi(cell)) with u_hi >= u_lo;
  /// u_hi corresponds to the LEFT (small-t) edge.
  double u_lo(std::size_t cell) const { return u_breaks_[cell + 1]; }
  double u_hi(std::size_t cell) const { return u_breaks_[cell]; }

  /// log of the cell width in t, stable for arbitrarily deep cells.
  double log_width(std::size_t cell) const;
  double width(std::size_t cell) const { return std::exp(log_width(cell)); }

  /// t-space breakpoints, ascending; deep breakpoints may underflow to 0.
  std::vector<double> breaks() const;
  /// Cell values; may overflow to +inf for cells whose log value is huge.
  std::vector<double> values() const;

  const std::vector<double>& u_breaks() const { return u_breaks_; }
  const std::vector<double>& log_values() const { return log_values_; }

  bool is_zero() const;
  double max_log_value() const;

  /// log of ∫ f^p dt = logsumexp_i ( p * log_value_i + log_width_i ).
  double log_moment(double p) const;

 private:
  std::vector<double> u_breaks_;   // descending; size = cells + 1
  std::vector<double> log_values_;
};

/// Analytic family scale * t^(-a) * log(e/t)^b * loglog(.)^c on (0, valid_to],
/// held constant at its valid_to value on (valid_to, 1].
///
/// The iterated-log factor defaults to loglog(e^e/t), which is >= 1 on all of
/// (0,1]. Call sites that need the bare loglog(e/t) form set shift_ee = false
/// and keep valid_to < 1 so the factor stays positive.
struct PowerLogLog {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double scale = 1.0;
  double valid_to = 1.0;
  bool shift_ee = true;

  double log_value_at(double t) const;
  double value_at(double t) const { return std::exp(log_value_at(t)); }
  /// log f(e^{1-u}); stable for u far beyond the t-underflow range.
  double log_value_at_u(double u) const;

  /// True if the value grows without bound as t -> 0+.
  bool unbounded_at_zero() const;
};

/// Carrier for externally supplied data: a strictly decreasing grid t_k in
/// (0,1] with one value per grid point, read as piecewise constant on cells.
struct SampledFunction {
  std::vector<double> grid;    // strictly decreasing
  std::vector<double> values;  // >= 0, same length

  StepFunction to_step() const;
};

using FunctionSpec = std::variant<StepFunction, PowerLogLog, SampledFunction>;

/// Pointwise value at t in (0,1]. Throws std::domain_error outside.
double evaluate(const FunctionSpec& f, double t);
double log_evaluate(const FunctionSpec& f, double t);

/// Step-series coefficients a_j for the geometric-cell family; computed in
/// log space so truncation indices up to 1e6 stay representable.
struct SeriesCoefficients {
  double b = 1.5;
  double theta = 1.0;
  long truncation = 3;

  /// log a_j for 2 <= j <= truncation.
  double log_a(long j) const;
};

/// Step function equal to a_j on (e^{-j-1}, e^{-j}] for 2 <= j <= J, a_2 on
/// (e^{-2}, 1], and a_J on the truncation cell (0, e^{-J-1}].
StepFunction build_example_no_var_small(double b, double theta, long J);

/// [loglog(e/t) / (t log(e/t)^{1-theta})]^{1/p0} on (0,t0], constant beyond;
/// t0 is shrunk if a grid check finds the profile non-monotone on (0,t0].
PowerLogLog build_example_no_rearrange(double p0, double theta, double t0);

/// Parse the structured text form, e.g. {"kind":"step",...}. If `text` does
/// not start with '{' it is treated as a path to a file holding the JSON.
FunctionSpec parse_function_spec(const std::string& text);

/// Canonical one-line identifier used in reports.
std::string function_spec_id(const FunctionSpec& f);

}  // namespace lspace

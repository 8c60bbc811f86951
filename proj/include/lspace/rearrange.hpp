#pragma once

#include <vector>

#include "lspace/function.hpp"

namespace lspace {

/// |{t in (0,1] : f(t) > lambda}|. Exact cell-width sums for step input,
/// bracketed inversion for monotone analytic families.
double distribution(const FunctionSpec& f, double lambda);

/// Sample an analytic profile onto a fine graded step grid.
StepFunction sample_to_step(const PowerLogLog& f, std::size_t points = 4096);

/// A non-increasing profile equimeasurable with its source.
struct RearrangedFunction {
  FunctionSpec representation;  // evaluate at t, or at 1-t when reflected
  FunctionSpec source;
  bool reflected = false;

  double log_value_at(double t) const;
  double value_at(double t) const { return std::exp(log_value_at(t)); }

  /// The profile as a plain FunctionSpec; reflected analytic inputs are
  /// materialized onto a graded grid.
  FunctionSpec as_function_spec() const;

  /// Step view when the representation is exact step data, else nullptr.
  const StepFunction* as_step() const;
};

RearrangedFunction decreasing_rearrangement(const FunctionSpec& f);

/// Reflection about t = 1/2 of the decreasing rearrangement.
RearrangedFunction increasing_rearrangement(const FunctionSpec& f);

struct EquimeasurabilityReport {
  struct Row {
    double p = 0;
    double moment_source = 0;      // ∫ f^p
    double moment_rearranged = 0;  // ∫ f_*^p
    double rel_gap = 0;
    bool divergent = false;
  };
  std::vector<Row> rows;
  double worst_rel_gap = 0;

  bool all_within(double tol) const { return worst_rel_gap <= tol; }
};

/// Moment identity ∫ f^p = ∫ f_*^p for each requested p; divergent moments
/// are flagged, not errors.
EquimeasurabilityReport equimeasurability_check(const FunctionSpec& f,
                                                const std::vector<double>& exponents);

}  // namespace lspace

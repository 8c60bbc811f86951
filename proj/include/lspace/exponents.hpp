#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lspace/function.hpp"

namespace lspace {

/// base * (1 + theta * loglog(e/t)/log(e/t)) on (0,t0], constant beyond;
/// increasing, with infimum `base` approached at t -> 0.
struct ExampleExponent {
  double base = 2.0;
  double theta = 1.0;
  double t0 = 0.1353352832366127;  // e^-2

  double value_at_u(double u) const;
  double value_at(double t) const { return value_at_u(u_of_t(t)); }
};

/// 1/p(t) = 1/base + (A + D loglog(e/t) + E logloglog(e/t)) / log(e/t) on
/// (0,t0], constant beyond. Decreasing for A,D,E >= 0 with supremum `base`
/// at t -> 0; negative coefficients give the mirrored increasing family.
struct ReciprocalLogExponent {
  double base = 2.0;
  double A = 0.0;
  double D = 0.0;
  double E = 0.0;
  double t0 = 0.1353352832366127;  // e^-2

  double value_at_u(double u) const;
  double value_at(double t) const { return value_at_u(u_of_t(t)); }
};

using ExponentRep =
    std::variant<StepFunction, SampledFunction, ExampleExponent, ReciprocalLogExponent>;

/// An exponent function p(.) with 1 < p_- <= p_+ < inf, exposing pointwise
/// evaluation, conjugation, and its decreasing/increasing rearrangements as
/// cheap views over one immutable payload.
class ExponentSpec {
 public:
  enum class Channel { direct, star, star_up };

  explicit ExponentSpec(ExponentRep rep);
  static ExponentSpec constant(double p);

  /// View value at t in (0,1].
  double operator()(double t) const;
  /// View value at u = log(e/t); star/star_up channels of reflected carriers
  /// fall back to the t-space path.
  double value_at_u(double u) const;

  double p_minus() const;
  double p_plus() const;

  bool conjugated() const { return conjugated_; }
  Channel channel() const { return channel_; }

  /// Pointwise conjugate q with 1/p + 1/q = 1. Involution.
  ExponentSpec conjugate() const;
  /// Decreasing rearrangement p_* as a view.
  ExponentSpec star() const;
  /// Increasing rearrangement p^* = p_*(1-t) as a view.
  ExponentSpec star_up() const;

  /// Materialize the current view as a step exponent (exact for step-backed
  /// payloads, graded sampling otherwise).
  StepFunction materialize_step(std::size_t points = 2048) const;

  /// Step payload of the current view, or nullptr for analytic carriers.
  const StepFunction* step_view() const;

  /// True when the payload is step data (even if the view is conjugated).
  bool step_backed() const;

  std::string id() const;

 private:
  struct Payload;
  std::shared_ptr<const Payload> payload_;
  bool conjugated_ = false;
  Channel channel_ = Channel::direct;

  double rep_value_at(double t, Channel ch) const;
};

inline ExponentSpec conjugate(const ExponentSpec& p) { return p.conjugate(); }

/// The increasing example exponent with `base` in place of 2.
ExponentSpec exponent_for_theta(double theta, double base);

ExponentSpec parse_exponent_spec(const std::string& text);

/// sigma_* carriers for the Musielak-Orlicz scale; values may be negative.
struct SigmaConstant {
  double value = 0.0;
};
struct SigmaStep {
  std::vector<double> breaks;  // t-space, 0 ... 1
  std::vector<double> values;  // non-increasing
};
/// sigma0 - B/loglog(e/t) on (0,t0], constant beyond (B >= 0, decreasing).
struct SigmaCappedRecipLogLog {
  double sigma0 = 0.0;
  double B = 0.0;
  double t0 = 0.1353352832366127;
};
using SigmaSpec = std::variant<SigmaConstant, SigmaStep, SigmaCappedRecipLogLog>;

double sigma_value(const SigmaSpec& s, double t);
double sigma_zero(const SigmaSpec& s);  // sigma_*(0+)
void validate_sigma(const SigmaSpec& s);
SigmaSpec parse_sigma_spec(const std::string& text);
std::string sigma_spec_id(const SigmaSpec& s);

enum class ConditionKind {
  var_small,         // 1/p^*(0) - 1/p^*(t) >= (theta/p_-' + eps) loglog/log
  grand_var,         // 1/p_*(t) - 1/p_*(0) >= (theta/p_+ + eps) loglog/log
  weaker_var_small,  // ... >= theta/p_-' loglog/log + (1+eps) logloglog/log
  no_var_small,      // 1/p^*(0) - 1/p^*(t) <= theta/p_-' loglog/log
  rearranged,        // 1/p_*(t) - 1/p_*(0) <= A/log + (theta-1)/p_*(0) loglog/log
  no_rearrange,      // 1/p_*(t) - 1/p_*(0) >= (theta+eps)/p_*(0) loglog/log
  gen_orlicz_sigma,  // sigma(0) - sigma(t) <= B/loglog
  gen_orlicz_p,      // 1/p_*(t) - 1/p_*(0) <= A/log + (theta-1+sigma(0))/p_*(0) loglog/log
};

std::string to_string(ConditionKind kind);
std::optional<ConditionKind> condition_kind_from_string(const std::string& name);

struct ConditionParams {
  double theta = 1.0;
  double eps = 0.0;
  double A = 0.0;
  double B = 0.0;
  double t0 = 1.0;
  std::optional<SigmaSpec> sigma;  // required for the sigma-coupled kinds
};

struct ConditionReport {
  bool holds = false;
  double worst_margin = 0.0;  // min over the grid; >= -1e-12 means holds
  double witness_t = 0.0;
  std::size_t grid_size = 0;
};

/// Geometric grid on (t_lo, t_hi], descending toward 0.
std::vector<double> geometric_grid(double t_hi, double t_lo, std::size_t n);

/// Evaluate the kind's inequality verbatim over a geometric grid in (0,t0]
/// (default 2048 points down to 1e-12, plus deep probes toward t -> 0).
/// When `margins` is given it receives every (t, margin) pair scanned.
ConditionReport check_condition(const ExponentSpec& p, ConditionKind kind,
                                const ConditionParams& params,
                                std::size_t grid_points = 2048,
                                std::vector<std::pair<double, double>>* margins = nullptr);

}  // namespace lspace

#include "lspace/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lspace/quadrature.hpp"

namespace lspace {

namespace {

double step_distribution(const StepFunction& f, double lambda) {
  const double log_lambda = lambda == 0.0 ? kNegInf : std::log(lambda);
  CompensatedSum measure;
  for (std::size_t i = 0; i < f.cell_count(); ++i)
    if (f.log_value(i) > log_lambda) measure.add(f.width(i));
  return std::min(1.0, measure.value());
}

enum class Monotonicity { constant, non_increasing, non_decreasing, mixed };

Monotonicity probe_monotonicity(const PowerLogLog& f) {
  // Geometric sweep over (0,1], dense in u.
  bool up = false, down = false;
  double prev = f.log_value_at_u(1.0);
  for (int k = 1; k <= 4096; ++k) {
    const double u = 1.0 + k * (200.0 / 4096.0);
    const double lv = f.log_value_at_u(u);
    if (lv > prev + 1e-14) up = true;       // value grows toward t -> 0
    if (lv < prev - 1e-14) down = true;
    prev = lv;
  }
  if (up && down) return Monotonicity::mixed;
  if (!up && !down) return Monotonicity::constant;
  // "up toward u" means larger at small t, i.e. non-increasing in t.
  return up ? Monotonicity::non_increasing : Monotonicity::non_decreasing;
}

double analytic_distribution(const PowerLogLog& f, double lambda) {
  const Monotonicity mono = probe_monotonicity(f);
  const double log_lambda = lambda == 0.0 ? kNegInf : std::log(lambda);
  if (mono == Monotonicity::mixed)
    return step_distribution(sample_to_step(f), lambda);
  if (mono == Monotonicity::constant)
    return f.log_value_at_u(1.0) > log_lambda ? 1.0 : 0.0;

  const bool decreasing = mono == Monotonicity::non_increasing;
  const double at_one = f.log_value_at_u(1.0);
  const double u_deep = 700.0;
  const double deep = f.log_value_at_u(u_deep);
  const double hi = decreasing ? deep : at_one;
  const double lo = decreasing ? at_one : deep;
  if (log_lambda >= hi && !(decreasing && f.unbounded_at_zero())) return 0.0;
  if (log_lambda < lo) return 1.0;

  // Bisect for the level-crossing in u.
  double ua = 1.0, ub = u_deep;
  for (int i = 0; i < 200; ++i) {
    const double um = 0.5 * (ua + ub);
    const bool above = f.log_value_at_u(um) > log_lambda;
    if (decreasing == above)
      ub = um;
    else
      ua = um;
  }
  const double t_cross = t_of_u(0.5 * (ua + ub));
  // Decreasing: {f > lambda} = (0, t_cross); increasing: (t_cross, 1].
  return decreasing ? t_cross : 1.0 - t_cross;
}

StepFunction sorted_step(const StepFunction& f, bool descending) {
  const std::size_t n = f.cell_count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return descending ? f.log_value(i) > f.log_value(j) : f.log_value(i) < f.log_value(j);
  });

  const bool already_sorted = std::is_sorted(order.begin(), order.end());
  if (already_sorted) return f;

  // Reassemble breakpoints from cumulative widths in log space so that deep
  // geometric cells survive; a cell that collapses onto its predecessor at
  // double resolution carries measure below representation and is dropped.
  std::vector<double> u_breaks{kPosInf};
  std::vector<double> logs;
  double log_pos = kNegInf;  // log of cumulative measure from t = 0
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t cell = order[k];  // comparator already encodes direction
    log_pos = log_add_exp(log_pos, f.log_width(cell));
    const double u_break = 1.0 - std::min(log_pos, 0.0);
    if (u_break < u_breaks.back()) {
      u_breaks.push_back(u_break);
      logs.push_back(f.log_value(cell));
    }
  }
  u_breaks.back() = 1.0;
  return StepFunction::from_u_cells(std::move(u_breaks), std::move(logs));
}

}  // namespace

StepFunction sample_to_step(const PowerLogLog& f, std::size_t points) {
  std::vector<double> u_breaks{kPosInf};
  std::vector<double> logs;
  const double u_deep = 200.0;
  logs.push_back(f.log_value_at_u(u_deep));
  for (std::size_t k = points; k-- > 1;) {
    const double u = 1.0 + (u_deep - 1.0) * static_cast<double>(k) / static_cast<double>(points);
    u_breaks.push_back(u);
    logs.push_back(f.log_value_at_u(u));
  }
  u_breaks.push_back(1.0);
  return StepFunction::from_u_cells(std::move(u_breaks), std::move(logs));
}

double distribution(const FunctionSpec& f, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("distribution: lambda must be >= 0");
  return std::visit(
      [lambda](const auto& rep) -> double {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, StepFunction>)
          return step_distribution(rep, lambda);
        else if constexpr (std::is_same_v<T, SampledFunction>)
          return step_distribution(rep.to_step(), lambda);
        else
          return analytic_distribution(rep, lambda);
      },
      f);
}

double RearrangedFunction::log_value_at(double t) const {
  if (!(t > 0.0) || t > 1.0) throw std::domain_error("rearrangement: t outside (0,1]");
  if (!reflected) return log_evaluate(representation, t);
  const double s = 1.0 - t;
  if (s <= 0.0) {
    // right endpoint of a reflected profile: constant continuation
    return log_evaluate(representation, 1e-300);
  }
  return log_evaluate(representation, s);
}

FunctionSpec RearrangedFunction::as_function_spec() const {
  if (!reflected) return representation;
  // Materialize the reflection onto a fine graded grid.
  const int points = 4096;
  SampledFunction out;
  out.grid.reserve(points);
  out.values.reserve(points);
  for (int k = 0; k < points; ++k) {
    const double t = 1.0 - (k + 0.5) / points;
    out.grid.push_back(t);
    out.values.push_back(value_at(t));
  }
  return out;
}

const StepFunction* RearrangedFunction::as_step() const {
  if (reflected) return nullptr;
  return std::get_if<StepFunction>(&representation);
}

RearrangedFunction decreasing_rearrangement(const FunctionSpec& f) {
  RearrangedFunction out;
  out.source = f;
  std::visit(
      [&out](const auto& rep) {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, StepFunction>) {
          out.representation = sorted_step(rep, /*descending=*/true);
        } else if constexpr (std::is_same_v<T, SampledFunction>) {
          out.representation = sorted_step(rep.to_step(), /*descending=*/true);
        } else {
          switch (probe_monotonicity(rep)) {
            case Monotonicity::constant:
            case Monotonicity::non_increasing:
              out.representation = rep;
              break;
            case Monotonicity::non_decreasing:
              out.representation = rep;
              out.reflected = true;
              break;
            case Monotonicity::mixed:
              if (rep.unbounded_at_zero())
                throw std::invalid_argument(
                    "decreasing_rearrangement: unbounded non-monotone profile unsupported");
              out.representation = sorted_step(sample_to_step(rep), /*descending=*/true);
              break;
          }
        }
      },
      f);
  return out;
}

RearrangedFunction increasing_rearrangement(const FunctionSpec& f) {
  RearrangedFunction out;
  out.source = f;
  std::visit(
      [&out](const auto& rep) {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, StepFunction>) {
          out.representation = sorted_step(rep, /*descending=*/false);
        } else if constexpr (std::is_same_v<T, SampledFunction>) {
          out.representation = sorted_step(rep.to_step(), /*descending=*/false);
        } else {
          switch (probe_monotonicity(rep)) {
            case Monotonicity::constant:
            case Monotonicity::non_decreasing:
              out.representation = rep;
              break;
            case Monotonicity::non_increasing:
              out.representation = rep;
              out.reflected = true;
              break;
            case Monotonicity::mixed:
              if (rep.unbounded_at_zero())
                throw std::invalid_argument(
                    "increasing_rearrangement: unbounded non-monotone profile unsupported");
              out.representation = sorted_step(sample_to_step(rep), /*descending=*/false);
              break;
          }
        }
      },
      f);
  return out;
}

namespace {

/// log ∫ f^p for moment comparisons; quadrature for analytic input.
std::pair<double, bool> log_moment_of(const FunctionSpec& f, double p) {
  if (const auto* step = std::get_if<StepFunction>(&f)) return {step->log_moment(p), true};
  if (const auto* sampled = std::get_if<SampledFunction>(&f))
    return {sampled->to_step().log_moment(p), true};
  const auto& an = std::get<PowerLogLog>(f);
  const LogIntegrand log_phi = [&an, p](double u) { return p * an.log_value_at_u(u) + 1.0 - u; };
  QuadratureResult q = integrate_u_open(log_phi, 1.0, {});
  return {std::log(q.value), q.converged};
}

}  // namespace

EquimeasurabilityReport equimeasurability_check(const FunctionSpec& f,
                                                const std::vector<double>& exponents) {
  EquimeasurabilityReport rep;
  const RearrangedFunction fs = decreasing_rearrangement(f);
  const FunctionSpec star = fs.as_function_spec();
  for (double p : exponents) {
    if (!(p >= 1.0)) throw std::invalid_argument("equimeasurability: exponents must be >= 1");
    EquimeasurabilityReport::Row row;
    row.p = p;
    const auto [m_src, ok_src] = log_moment_of(f, p);
    const auto [m_star, ok_star] = log_moment_of(star, p);
    row.divergent = !ok_src || !ok_star;
    row.moment_source = std::exp(m_src);
    row.moment_rearranged = std::exp(m_star);
    if (!row.divergent) {
      if (m_src == kNegInf && m_star == kNegInf)
        row.rel_gap = 0.0;
      else
        row.rel_gap = std::abs(std::expm1(m_src - m_star));
      rep.worst_rel_gap = std::max(rep.worst_rel_gap, row.rel_gap);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace lspace

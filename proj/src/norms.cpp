#include "lspace/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace lspace {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre panels in log space
// ---------------------------------------------------------------------------

constexpr double kGl16Nodes[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                  0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                  0.9445750230732326, 0.9894009349916499};
constexpr double kGl16Weights[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                    0.0622535239386479, 0.0271524594117541};
constexpr double kGl8Nodes[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
constexpr double kGl8Weights[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                   0.1012285362903763};

/// log ∫_a^b e^{log_g(u)} du by a fixed GL rule; stable under huge |log_g|.
double log_integral_gl(const std::function<double(double)>& log_g, double a, double b,
                       bool coarse = false) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double lg[16];
  int n = 0;
  if (coarse) {
    for (int i = 0; i < 4; ++i) {
      lg[n++] = log_g(mid - half * kGl8Nodes[i]);
      lg[n++] = log_g(mid + half * kGl8Nodes[i]);
    }
  } else {
    for (int i = 0; i < 8; ++i) {
      lg[n++] = log_g(mid - half * kGl16Nodes[i]);
      lg[n++] = log_g(mid + half * kGl16Nodes[i]);
    }
  }
  double hi = kNegInf;
  for (int i = 0; i < n; ++i) hi = std::max(hi, lg[i]);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = coarse ? kGl8Weights[i / 2] : kGl16Weights[i / 2];
    acc += w * std::exp(lg[i] - hi);
  }
  return hi + std::log(half * acc);
}

/// log ∫_a^b over unit panels, GL16 per panel.
double log_integral_panels(const std::function<double(double)>& log_g, double a, double b) {
  if (!(b > a)) return kNegInf;
  const int panels = std::max(1, static_cast<int>(std::ceil(b - a)));
  double acc = kNegInf;
  for (int k = 0; k < panels; ++k) {
    const double pa = a + (b - a) * k / panels;
    const double pb = a + (b - a) * (k + 1) / panels;
    acc = log_add_exp(acc, log_integral_gl(log_g, pa, pb));
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Full (0,1] integrals with divergence analysis
// ---------------------------------------------------------------------------

struct FullIntegral {
  double log_value = kNegInf;
  double error = 0.0;        // absolute, on the linear value
  bool finite = true;        // false: divergence verdict produced
  bool converged = true;     // quadrature confidence
  std::optional<GrowthReport> growth;
  std::string note;
};

/// Local power of the integrand at deep u: log_phi ~ -s log u + const.
/// Returns the fitted s over a doubling ladder, or NaN when unusable.
///
/// The ladder is capped near u = 3e12: log-integrands built from modular
/// compositions carry O(u) terms that cancel down to O(log u), so probing
/// much deeper buries the exponent under rounding noise (u * eps).
double tail_exponent(const LogIntegrand& log_phi, double u_from, bool* exploding) {
  *exploding = false;
  const double u0 = std::max(64.0, std::min(u_from, 1e10));
  std::vector<double> lu, lphi;
  for (int k = 0; k <= 8; ++k) {
    const double u = u0 * std::pow(2.0, k);
    const double lp = log_phi(u);
    if (std::isnan(lp)) return kNaN;
    if (lp == kPosInf) {
      *exploding = true;
      return kNaN;
    }
    if (lp == kNegInf) return kPosInf;  // integrand died: tail is empty
    lu.push_back(std::log(u));
    lphi.push_back(lp);
  }
  // Use the deepest four slopes; they are past transient corrections.
  double worst = kNegInf;
  for (std::size_t i = lu.size() - 4; i < lu.size(); ++i) {
    const double slope = (lphi[i] - lphi[i - 1]) / (lu[i] - lu[i - 1]);
    worst = std::max(worst, slope);
  }
  return -worst;
}

FullIntegral integrate_full(const LogIntegrand& log_phi, double u_lo, double tol) {
  QuadratureOptions opt;
  opt.tol = tol;
  opt.max_blocks = 30;
  FullIntegral out;
  QuadratureResult q = integrate_u_open(log_phi, u_lo, opt);
  out.log_value = q.value > 0.0 ? std::log(q.value) : kNegInf;
  out.error = q.abs_error_estimate;
  if (q.converged) return out;

  // The blocks did not settle: decide from the integrand's deep tail.
  bool exploding = false;
  const double u_edge = q.partials.empty() ? u_lo + 4.0 : q.partials.back().first;
  const double s = tail_exponent(log_phi, std::max(u_edge, 64.0), &exploding);

  std::optional<GrowthReport> partial_report;
  if (q.partials.size() >= 4) {
    std::vector<double> levels, values;
    for (const auto& [u, v] : q.partials) {
      levels.push_back(u);
      values.push_back(v);
    }
    bool nondecreasing = true;
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] < values[i - 1] - 1e-12 * std::max(1.0, std::abs(values.back())))
        nondecreasing = false;
    if (nondecreasing && levels.back() - levels.front() >= 3.0 * std::log(10.0)) {
      try {
        partial_report = classify_growth(levels, values, /*levels_are_log=*/true);
      } catch (const std::invalid_argument&) {
      }
    }
  }

  out.converged = false;
  if (exploding || (std::isfinite(s) && s <= 0.95)) {
    out.finite = false;
    GrowthReport rep = partial_report.value_or(GrowthReport{});
    rep.verdict = GrowthReport::Verdict::divergent;
    if (exploding) {
      rep.model = GrowthReport::Model::power;
      rep.fit_quality = 1.0;
      rep.note = "integrand mass explodes toward t = 0";
    } else {
      rep.note = "integrand tail exponent " + std::to_string(s) + " <= 1";
      rep.increment_exponent = s;
    }
    out.growth = rep;
    out.note = rep.note;
    return out;
  }
  if (std::isfinite(s) && s >= 1.05) {
    // Convergent tail; extrapolate ∫_U^inf phi ~ phi(U) U / (s - 1).
    const double lp_edge = log_phi(u_edge);
    double tail = 0.0;
    if (lp_edge > kNegInf) tail = std::exp(lp_edge + std::log(u_edge) - std::log(s - 1.0));
    out.log_value = log_add_exp(out.log_value, tail > 0.0 ? std::log(tail) : kNegInf);
    out.error += tail;  // the whole extrapolated tail is uncertain
    GrowthReport rep = partial_report.value_or(GrowthReport{});
    rep.verdict = GrowthReport::Verdict::convergent;
    rep.note = "integrand tail exponent " + std::to_string(s) + " > 1; tail extrapolated";
    rep.increment_exponent = s;
    out.growth = rep;
    out.note = rep.note;
    return out;
  }
  if (s == kPosInf) {
    // Integrand support ended; the blocks' value is the full integral.
    out.converged = true;
    return out;
  }
  GrowthReport rep = partial_report.value_or(GrowthReport{});
  if (!partial_report || rep.verdict == GrowthReport::Verdict::convergent)
    rep.verdict = GrowthReport::Verdict::inconclusive;
  rep.note = "tail exponent near the integrability boundary";
  out.growth = rep;
  out.note = rep.note;
  return out;
}

// ---------------------------------------------------------------------------
// FunctionSpec adapters
// ---------------------------------------------------------------------------

struct StepView {
  std::optional<StepFunction> owned;
  const StepFunction* ptr = nullptr;
  explicit operator bool() const { return ptr != nullptr; }
};

StepView as_step(const FunctionSpec& f) {
  StepView view;
  if (const auto* step = std::get_if<StepFunction>(&f)) {
    view.ptr = step;
  } else if (const auto* sampled = std::get_if<SampledFunction>(&f)) {
    view.owned = sampled->to_step();
    view.ptr = &*view.owned;
  }
  return view;
}

/// log f(e^{1-u}) for any representation; u may exceed the t-underflow range.
LogIntegrand log_value_u_fn(const FunctionSpec& f) {
  if (const auto* an = std::get_if<PowerLogLog>(&f)) {
    const PowerLogLog copy = *an;
    return [copy](double u) { return copy.log_value_at_u(u); };
  }
  StepView view = as_step(f);
  const StepFunction copy = *view.ptr;
  return [copy](double u) { return copy.log_value(copy.cell_index_u(u)); };
}

bool spec_is_zero(const FunctionSpec& f) {
  if (const auto* an = std::get_if<PowerLogLog>(&f)) return an->scale == 0.0;
  StepView view = as_step(f);
  return view.ptr->is_zero();
}

// ---------------------------------------------------------------------------
// Modulars (variable-exponent and Musielak) in log space
// ---------------------------------------------------------------------------

struct ModularOutcome {
  double log_value = kNegInf;
  bool finite = true;
  bool converged = true;
  double rel_error = 0.0;
  std::optional<GrowthReport> growth;
  std::string note;
};

/// log( log(e + e^{lb}) ): the log of the Musielak log factor's base.
double log_log_e_plus(double lb) {
  const double l = log_add_exp(1.0, lb);  // log(e + b)
  return std::log(l);
}

bool sigma_is_cellwise(const SigmaSpec& s) {
  return std::holds_alternative<SigmaConstant>(s) || std::holds_alternative<SigmaStep>(s);
}

/// Merge u-breakpoint lists (descending, +inf heads) into refined cells.
std::vector<double> merge_u_breaks(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> merged;
  merged.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged),
             [](double x, double y) { return x > y; });
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  return merged;
}

ModularOutcome modular_log(const FunctionSpec& f, const ExponentSpec& p, double log_lambda,
                           const SigmaSpec* sigma, double tol) {
  ModularOutcome out;
  StepView fstep = as_step(f);

  if (fstep) {
    const StepFunction& fs = *fstep.ptr;
    const StepFunction* pstep = p.step_view();
    std::optional<StepFunction> p_owned;
    if (!pstep && p.step_backed()) {
      p_owned = p.materialize_step();  // conjugated step views stay exact
      pstep = &*p_owned;
    }
    const bool exact_sigma = sigma == nullptr || sigma_is_cellwise(*sigma);

    if (pstep && exact_sigma) {
      // Exact closed form on the common refinement.
      std::vector<double> cuts = merge_u_breaks(fs.u_breaks(), pstep->u_breaks());
      if (sigma != nullptr) {
        if (const auto* sstep = std::get_if<SigmaStep>(sigma)) {
          std::vector<double> sigma_u(sstep->breaks.size());
          sigma_u[0] = kPosInf;
          for (std::size_t i = 1; i < sstep->breaks.size(); ++i)
            sigma_u[i] = u_of_t(sstep->breaks[i]);
          cuts = merge_u_breaks(cuts, sigma_u);
        }
      }
      double acc = kNegInf;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double u_hi = cuts[k], u_lo = cuts[k + 1];
        const double lb = fs.log_value(fs.cell_index_u(u_lo)) - log_lambda;
        if (lb == kNegInf) continue;
        const double q = pstep->value(pstep->cell_index_u(u_lo));
        const double log_w = (1.0 - u_lo) + std::log(-std::expm1(-(u_hi - u_lo)));
        double term = q * lb + log_w;
        if (sigma != nullptr) {
          const double t_rep = t_of_u(u_lo);
          term += sigma_value(*sigma, t_rep > 0.0 ? t_rep : 1e-300) * log_log_e_plus(lb);
        }
        acc = log_add_exp(acc, term);
      }
      out.log_value = acc;
      return out;
    }

    // Cellwise quadrature: the exponent (and sigma) vary inside f-cells.
    double acc = kNegInf;
    for (std::size_t i = 0; i < fs.cell_count(); ++i) {
      const double lb = fs.log_value(i) - log_lambda;
      if (lb == kNegInf) continue;
      const auto log_g = [&](double u) {
        double term = p.value_at_u(u) * lb + (1.0 - u);
        if (sigma != nullptr) {
          const double t = t_of_u(u);
          term += sigma_value(*sigma, t > 0.0 ? t : 1e-300) * log_log_e_plus(lb);
        }
        return term;
      };
      const double u_lo = fs.u_lo(i);
      const double u_hi = fs.u_hi(i);
      double term;
      if (u_hi == kPosInf) {
        // Deepest cell: the integrand decays like e^{-u}; a doubling ladder
        // of panels converges quickly.
        double cell_acc = kNegInf;
        double a = u_lo, w = 4.0;
        for (int blk = 0; blk < 40; ++blk) {
          const double piece = log_integral_panels(log_g, a, a + w);
          const double before = cell_acc;
          cell_acc = log_add_exp(cell_acc, piece);
          if (piece == kNegInf || (before > kNegInf && piece < before - 46.0)) break;
          a += w;
          w *= 2.0;
        }
        term = cell_acc;
      } else {
        term = log_integral_panels(log_g, u_lo, u_hi);
      }
      acc = log_add_exp(acc, term);
    }
    out.log_value = acc;
    out.rel_error = 1e-12;
    return out;
  }

  // Analytic profile: integrate over the exponent's pieces.
  const LogIntegrand lf = log_value_u_fn(f);
  const auto log_phi = [&](double u) {
    const double lb = lf(u) - log_lambda;
    if (lb == kNegInf) return kNegInf;
    double term = p.value_at_u(u) * lb + (1.0 - u);
    if (sigma != nullptr) {
      const double t = t_of_u(u);
      term += sigma_value(*sigma, t > 0.0 ? t : 1e-300) * log_log_e_plus(lb);
    }
    return term;
  };

  std::vector<double> pieces{1.0};
  if (const StepFunction* pstep = p.step_view()) {
    for (double u : pstep->u_breaks())
      if (std::isfinite(u) && u > 1.0) pieces.push_back(u);
    std::sort(pieces.begin(), pieces.end());
    pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());
  }

  QuadratureOptions qopt;
  qopt.tol = tol;
  double acc = kNegInf;
  double err = 0.0;
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    QuadratureResult q = integrate_u(log_phi, pieces[k], pieces[k + 1], qopt);
    acc = log_add_exp(acc, q.value > 0.0 ? std::log(q.value) : kNegInf);
    err += q.abs_error_estimate;
  }
  FullIntegral tail = integrate_full(log_phi, pieces.back(), tol);
  acc = log_add_exp(acc, tail.log_value);
  out.log_value = acc;
  out.finite = tail.finite;
  out.converged = tail.converged;
  out.growth = tail.growth;
  out.note = tail.note;
  out.rel_error = (err + tail.error) / std::max(std::exp(acc), 1e-300);
  return out;
}

// ---------------------------------------------------------------------------
// Luxemburg construction
// ---------------------------------------------------------------------------

using LogModular = std::function<ModularOutcome(double /*log_lambda*/)>;

NormResult luxemburg_from_modular(const LogModular& modular, double hint_log_lambda) {
  NormResult res;
  constexpr double kLogFloor = -690.0;
  constexpr double kLogCeil = 690.0;

  double lo = hint_log_lambda;  // will hold log rho > 0 side (lambda too small)
  double hi = hint_log_lambda;
  int iterations = 0;

  ModularOutcome at_hint = modular(hint_log_lambda);
  const auto above_one = [](const ModularOutcome& m) {
    return !m.finite || m.log_value > 0.0;
  };

  if (above_one(at_hint)) {
    // Walk λ upward until the modular drops to 1 or below.
    ModularOutcome last = at_hint;
    bool bracketed = false;
    for (int k = 0; k < 60; ++k) {
      hi += std::log(2.0);
      ++iterations;
      last = modular(hi);
      if (!above_one(last)) {
        bracketed = true;
        break;
      }
      if (hi > kLogCeil) break;
    }
    if (!bracketed) {
      res.infinite = true;
      res.value = kPosInf;
      res.diag.iterations = iterations;
      res.diag.growth = last.growth;
      res.diag.notes.push_back("modular stayed above 1 beyond the doubling cap");
      return res;
    }
    lo = hi - std::log(2.0);
  } else {
    // Walk λ downward until the modular crosses above 1.
    bool bracketed = false;
    for (int k = 0; k < 60; ++k) {
      lo -= std::log(2.0);
      ++iterations;
      if (above_one(modular(lo))) {
        bracketed = true;
        break;
      }
      if (lo < kLogFloor) break;
    }
    if (!bracketed) {
      // modular stays <= 1 down to the floor: the norm is 0 for practical
      // purposes (caller screens true zero input)
      res.value = std::exp(lo);
      res.diag.iterations = iterations;
      res.diag.notes.push_back("modular never exceeded 1 above the floor");
      return res;
    }
    hi = lo + std::log(2.0);
  }

  // Bisection to the contracted bracket width.
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    ++iterations;
    if (above_one(modular(mid)))
      lo = mid;
    else
      hi = mid;
    if (iterations > 200) break;
  }

  // Secant polish on log rho(log lambda) = 0 within the bracket.
  double x0 = lo, x1 = hi;
  ModularOutcome m0 = modular(x0);
  ModularOutcome m1 = modular(x1);
  double f0 = m0.finite ? m0.log_value : 1.0;
  double f1 = m1.log_value;
  double best = x1;
  for (int k = 0; k < 4; ++k) {
    if (f0 == f1) break;
    double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!(x2 >= lo - 1e-8 && x2 <= hi + 1e-8)) break;
    ModularOutcome m2 = modular(x2);
    ++iterations;
    if (!m2.finite) break;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = m2.log_value;
    best = x2;
  }
  ModularOutcome final_mod = modular(best);
  if (!final_mod.finite || final_mod.log_value > std::log1p(1e-6)) {
    best = hi;
    final_mod = modular(best);
  }

  res.value = std::exp(best);
  res.error_estimate = res.value * 1e-8;
  res.diag.iterations = iterations;
  res.diag.modular_at_norm = std::exp(final_mod.log_value);
  return res;
}

double step_hint_log_lambda(const FunctionSpec& f, double p_for_hint) {
  StepView view = as_step(f);
  if (view) return view.ptr->log_moment(p_for_hint) / p_for_hint;
  return 0.0;
}

// ---------------------------------------------------------------------------
// Cumulative integrals of f_*^p on the graded grid
// ---------------------------------------------------------------------------

class GradedCumulative {
 public:
  GradedCumulative(LogIntegrand log_phi, double u_lo, double u_hi, int segments)
      : log_phi_(std::move(log_phi)) {
    grid_.resize(segments + 1);
    for (int k = 0; k <= segments; ++k)
      grid_[k] = u_lo + (u_hi - u_lo) * static_cast<double>(k) / segments;
    seg_log_.resize(segments);
    for (int k = 0; k < segments; ++k)
      seg_log_[k] = log_integral_gl(log_phi_, grid_[k], grid_[k + 1]);
    prefix_log_.assign(segments + 1, kNegInf);
    for (int k = 0; k < segments; ++k)
      prefix_log_[k + 1] = log_add_exp(prefix_log_[k], seg_log_[k]);
    suffix_log_.assign(segments + 1, kNegInf);
    for (int k = segments; k-- > 0;)
      suffix_log_[k] = log_add_exp(suffix_log_[k + 1], seg_log_[k]);
  }

  void set_log_tail(double log_tail) {
    log_tail_ = log_tail;
    for (double& s : suffix_log_) s = log_add_exp(s, log_tail);
  }

  double u_hi() const { return grid_.back(); }

  /// log ∫_{u' >= u} phi du' (mass on (0, t(u)]), including the deep tail.
  double log_suffix(double u) const {
    if (u >= grid_.back()) return log_tail_;
    if (u <= grid_.front()) return suffix_log_.front();
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
    const double partial = log_integral_gl(log_phi_, u, grid_[k + 1]);
    return log_add_exp(partial, suffix_log_[k + 1]);
  }

  /// log ∫_{u_lo}^{u} phi du' (mass on [t(u), 1]).
  double log_prefix(double u) const {
    if (u <= grid_.front()) return kNegInf;
    if (u >= grid_.back()) return prefix_log_.back();
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
    const double partial = log_integral_gl(log_phi_, grid_[k], u);
    return log_add_exp(prefix_log_[k], partial);
  }

 private:
  LogIntegrand log_phi_;
  std::vector<double> grid_, seg_log_, prefix_log_, suffix_log_;
  double log_tail_ = kNegInf;
};

// Step prefix/suffix tables of log ∫ f^p over whole cells.
struct StepPowerTable {
  const StepFunction* f = nullptr;
  double p = 1.0;
  std::vector<double> prefix_log;  // prefix_log[i] = log ∫_0^{t_i} f^p
  std::vector<double> suffix_log;  // suffix_log[i] = log ∫_{t_i}^1 f^p

  StepPowerTable(const StepFunction& fs, double pw) : f(&fs), p(pw) {
    const std::size_t n = fs.cell_count();
    prefix_log.assign(n + 1, kNegInf);
    for (std::size_t i = 0; i < n; ++i) {
      const double term =
          fs.log_value(i) == kNegInf ? kNegInf : p * fs.log_value(i) + fs.log_width(i);
      prefix_log[i + 1] = log_add_exp(prefix_log[i], term);
    }
    suffix_log.assign(n + 1, kNegInf);
    for (std::size_t i = n; i-- > 0;) {
      const double term =
          fs.log_value(i) == kNegInf ? kNegInf : p * fs.log_value(i) + fs.log_width(i);
      suffix_log[i] = log_add_exp(suffix_log[i + 1], term);
    }
  }

  /// log ∫_0^{t(u)} f^p, any u >= 1.
  double log_lower(double u) const {
    const std::size_t i = f->cell_index_u(u);
    const double lv = f->log_value(i);
    // within cell i: prefix at its left edge + v^p (t - t_lo)
    const double u_hi = f->u_hi(i);
    double inner = kNegInf;
    if (lv != kNegInf) {
      const double log_dt = u_hi == kPosInf
                                ? 1.0 - u
                                : (1.0 - u) + std::log(-std::expm1(-(u_hi - u)));
      inner = p * lv + log_dt;
    }
    return log_add_exp(prefix_log[i], inner);
  }

  /// log ∫_{t(u)}^1 f^p, any u >= 1.
  double log_upper(double u) const {
    const std::size_t i = f->cell_index_u(u);
    const double lv = f->log_value(i);
    // within cell i: suffix beyond its right edge + v^p (t_hi - t)
    const double u_lo = f->u_lo(i);
    double inner = kNegInf;
    if (lv != kNegInf && u > u_lo) {
      const double log_dt = (1.0 - u_lo) + std::log(-std::expm1(-(u - u_lo)));
      inner = p * lv + log_dt;
    }
    return log_add_exp(suffix_log[i + 1], inner);
  }
};

// Divergence sweep over a supremum scan: classify values observed at an
// expanding sequence of depths.
std::optional<GrowthReport> classify_sup_sweep(const std::vector<double>& u_levels,
                                               const std::vector<double>& values) {
  if (u_levels.size() < 4) return std::nullopt;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[i - 1] - 1e-12 * std::max(1.0, std::abs(values.back())))
      return std::nullopt;  // not growing: nothing to classify
  if (u_levels.back() - u_levels.front() < 3.0 * std::log(10.0)) return std::nullopt;
  try {
    return classify_growth(u_levels, values, /*levels_are_log=*/true);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

NormResult lp_norm(const FunctionSpec& f, double p, const NormOptions& opt) {
  require(p >= 1.0, "lp_norm: p must be >= 1");
  NormResult res;
  StepView view = as_step(f);
  if (view) {
    const double log_i = view.ptr->log_moment(p);
    res.diag.log_value = log_i / p;
    res.value = std::exp(log_i / p);
    res.error_estimate = std::abs(res.value) * 1e-14;
    return res;
  }
  const LogIntegrand lf = log_value_u_fn(f);
  const auto log_phi = [&lf, p](double u) {
    const double lv = lf(u);
    return lv == kNegInf ? kNegInf : p * lv + (1.0 - u);
  };
  FullIntegral full = integrate_full(log_phi, 1.0, opt.tol);
  if (!full.finite) {
    res.infinite = true;
    res.value = kPosInf;
    res.diag.growth = full.growth;
    res.diag.notes.push_back("∫ f^p diverges");
    return res;
  }
  res.diag.log_value = full.log_value / p;
  res.value = std::exp(full.log_value / p);
  res.error_estimate = full.error / p * std::max(res.value, 1e-300);
  res.diag.growth = full.growth;
  if (!full.converged) res.diag.notes.push_back(full.note);
  return res;
}

NormResult variable_modular(const FunctionSpec& f, const ExponentSpec& p, double lambda,
                            const NormOptions& opt) {
  require(lambda > 0.0, "variable_modular: lambda must be positive");
  ModularOutcome m = modular_log(f, p, std::log(lambda), nullptr, opt.tol);
  NormResult res;
  res.diag.log_value = m.log_value;
  res.diag.growth = m.growth;
  if (!m.finite) {
    res.infinite = true;
    res.value = kPosInf;
    return res;
  }
  res.value = std::exp(m.log_value);
  res.error_estimate = m.rel_error * std::max(res.value, 1e-300);
  if (!m.converged) res.diag.notes.push_back(m.note);
  return res;
}

NormResult luxemburg_norm(const FunctionSpec& f, const ExponentSpec& p,
                          const NormOptions& opt) {
  NormResult res;
  if (spec_is_zero(f)) return res;
  const LogModular modular = [&](double log_lambda) {
    return modular_log(f, p, log_lambda, nullptr, opt.tol);
  };
  return luxemburg_from_modular(modular, step_hint_log_lambda(f, p.p_minus()));
}

NormResult grand_norm_def(const FunctionSpec& f, const GrandParams& gp,
                          const NormOptions& opt) {
  require(gp.p > 1.0 && std::isfinite(gp.p), "grand norm: p must lie in (1, inf)");
  require(gp.theta >= 0.0, "grand norm: theta must be >= 0");
  NormResult res;
  if (spec_is_zero(f)) return res;

  StepView view = as_step(f);
  const LogIntegrand lf = view ? LogIntegrand{} : log_value_u_fn(f);

  // log ∫ f^q with divergence awareness.
  const auto log_I = [&](double q) -> std::pair<double, bool> {
    if (view) return {view.ptr->log_moment(q), true};
    const auto log_phi = [&lf, q](double u) {
      const double lv = lf(u);
      return lv == kNegInf ? kNegInf : q * lv + (1.0 - u);
    };
    FullIntegral full = integrate_full(log_phi, 1.0, opt.tol);
    return {full.log_value, full.finite};
  };
  const auto log_phi_eps = [&](double eps) -> std::pair<double, bool> {
    const auto [li, finite] = log_I(gp.p - eps);
    if (!finite) return {kPosInf, false};
    if (li == kNegInf) return {kNegInf, true};
    const double le = gp.theta == 0.0 ? 0.0 : gp.theta * std::log(eps);
    return {(le + li) / (gp.p - eps), true};
  };

  const double span = gp.p - 1.0;
  const double off = std::min(1e-6, span * 1e-3);

  // q -> 1+ end: integrability there is a precondition.
  {
    const auto [v, finite] = log_phi_eps(span - off);
    if (!finite) {
      res.infinite = true;
      res.value = kPosInf;
      res.diag.notes.push_back("∫ f^{p-eps} diverges with eps near p-1");
      return res;
    }
    (void)v;
  }

  // eps -> 0 screen: divergent moments or unbounded growth of the bracket
  // term force the +inf flag.
  {
    std::vector<double> levels, values;
    bool divergent_moment = false;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
      if (eps >= span) continue;
      const auto [v, finite] = log_phi_eps(eps);
      if (!finite) {
        divergent_moment = true;
        break;
      }
      levels.push_back(1.0 / eps);
      values.push_back(v);
    }
    if (divergent_moment) {
      res.infinite = true;
      res.value = kPosInf;
      res.diag.notes.push_back("∫ f^{p-eps} diverges as eps -> 0");
      return res;
    }
    bool increasing = levels.size() >= 4;
    for (std::size_t i = 1; i < values.size() && increasing; ++i)
      if (values[i] < values[i - 1] + 1e-12) increasing = false;
    if (increasing) {
      try {
        GrowthReport rep = classify_growth(levels, values, /*levels_are_log=*/false);
        if (rep.verdict == GrowthReport::Verdict::divergent) {
          res.infinite = true;
          res.value = kPosInf;
          res.diag.growth = rep;
          res.diag.notes.push_back("supremum grows without bound as eps -> 0");
          return res;
        }
      } catch (const std::invalid_argument&) {
      }
    }
  }

  // Grid scan + golden refinement + Richardson limit probes at both ends.
  const int grid_n = 256;
  double best_log = kNegInf, best_eps = off;
  for (int k = 0; k < grid_n; ++k) {
    const double eps = off + (span - 2.0 * off) * (k + 0.5) / grid_n;
    const auto [v, finite] = log_phi_eps(eps);
    if (finite && v > best_log) {
      best_log = v;
      best_eps = eps;
    }
  }
  {
    const double lo = std::max(off, best_eps - (span - 2.0 * off) / grid_n);
    const double hi = std::min(span - off, best_eps + (span - 2.0 * off) / grid_n);
    double refined_val = kNegInf;
    const double refined_eps = golden_section_max(
        [&](double eps) { return log_phi_eps(eps).first; }, lo, hi, &refined_val);
    if (refined_val > best_log) {
      best_log = refined_val;
      best_eps = refined_eps;
    }
  }
  const auto limit_probe = [&](double edge, double direction) {
    const double h = off;
    const double f1 = log_phi_eps(edge + direction * h).first;
    const double f2 = log_phi_eps(edge + direction * h / 2.0).first;
    const double f3 = log_phi_eps(edge + direction * h / 4.0).first;
    const double r1 = 2.0 * f2 - f1;
    const double r2 = 2.0 * f3 - f2;
    const double extrap = 2.0 * r2 - r1;
    // The sup over the open interval dominates every interior probe; the
    // extrapolated limit joins the candidates only when it is sane.
    double cand = std::max(f3, std::isfinite(extrap) ? extrap : kNegInf);
    return std::make_pair(cand, edge + direction * h / 4.0);
  };
  const auto [lo_cand, lo_eps] = limit_probe(0.0, +1.0);
  if (lo_cand > best_log) {
    best_log = lo_cand;
    best_eps = lo_eps;
  }
  const auto [hi_cand, hi_eps] = limit_probe(span, -1.0);
  if (hi_cand > best_log) {
    best_log = hi_cand;
    best_eps = hi_eps;
  }

  res.value = std::exp(best_log);
  res.diag.log_value = best_log;
  res.diag.supremum_location = best_eps;
  res.error_estimate = std::max(1e-12, 1e-9 * std::abs(res.value));
  return res;
}

NormResult grand_norm_rearr(const FunctionSpec& f, const GrandParams& gp,
                            const NormOptions& opt) {
  require(gp.p > 1.0 && std::isfinite(gp.p), "grand norm: p must lie in (1, inf)");
  require(gp.theta >= 0.0, "grand norm: theta must be >= 0");
  NormResult res;
  if (spec_is_zero(f)) return res;

  const RearrangedFunction fstar = decreasing_rearrangement(f);
  const double p = gp.p;

  // log L(u) = -(theta/p) log u + (1/p) log ∫_{t(u)}^1 f_*^p.
  std::function<double(double)> log_L;
  double u_deep = 60.0;
  std::optional<StepPowerTable> table;
  std::optional<GradedCumulative> cum;

  if (const StepFunction* step = fstar.as_step()) {
    table.emplace(*step, p);
    const auto& u_breaks = step->u_breaks();
    for (double u : u_breaks)
      if (std::isfinite(u)) u_deep = std::max(u_deep, u + 4.0);
    u_deep = std::min(u_deep, 4096.0);  // the scan grid stays desk-sized
    log_L = [tbl = &*table, p, theta = gp.theta](double u) {
      return -(theta / p) * std::log(u) + tbl->log_upper(u) / p;
    };
  } else {
    FunctionSpec rep = fstar.as_function_spec();
    const bool reflected = fstar.reflected;
    LogIntegrand lf;
    if (reflected) {
      const FunctionSpec inner = fstar.representation;
      lf = [inner](double u) {
        const double t = t_of_u(u);
        const double s = t > 0.0 ? 1.0 - t : 1.0;
        return log_evaluate(inner, s > 0.0 ? s : 1e-300);
      };
    } else {
      lf = log_value_u_fn(rep);
    }
    const auto log_phi = [lf, p](double u) {
      const double lv = lf(u);
      return lv == kNegInf ? kNegInf : p * lv + (1.0 - u);
    };
    u_deep = 600.0;
    cum.emplace(log_phi, 1.0, u_deep, 4096);
    FullIntegral tail = integrate_full(log_phi, u_deep, opt.tol);
    if (!tail.finite) {
      // ∫ f_*^p itself diverges: L(t) grows without bound as t -> 0.
      res.infinite = true;
      res.value = kPosInf;
      res.diag.growth = tail.growth;
      res.diag.notes.push_back("∫_t^1 f_*^p grows without bound as t -> 0");
      return res;
    }
    cum->set_log_tail(tail.log_value);
    log_L = [c = &*cum, p, theta = gp.theta](double u) {
      return -(theta / p) * std::log(u) + c->log_prefix(u) / p;
    };
  }

  // Supremum scan over a geometric t-grid (linear in u), with refinement.
  const int scan_n = 1024;
  double best_log = kNegInf, best_u = 1.0;
  std::vector<double> sweep_u, sweep_vals;
  for (int k = 0; k <= scan_n; ++k) {
    const double u = 1.0 + (u_deep - 1.0) * static_cast<double>(k) / scan_n;
    const double v = log_L(u);
    if (v > best_log) {
      best_log = v;
      best_u = u;
    }
    if (k % (scan_n / 16) == 0) {
      sweep_u.push_back(u);
      sweep_vals.push_back(v);
    }
  }
  {
    const double du = (u_deep - 1.0) / scan_n;
    double refined_val = kNegInf;
    const double refined_u =
        golden_section_max(log_L, std::max(1.0, best_u - du), best_u + du, &refined_val);
    if (refined_val > best_log) {
      best_log = refined_val;
      best_u = refined_u;
    }
  }

  // Values still growing at the deep end: classify the trend.
  std::vector<double> vals_exp(sweep_vals.size());
  for (std::size_t i = 0; i < sweep_vals.size(); ++i) vals_exp[i] = std::exp(sweep_vals[i]);
  if (auto rep = classify_sup_sweep(sweep_u, vals_exp)) {
    res.diag.growth = rep;
    if (rep->verdict == GrowthReport::Verdict::divergent) {
      res.infinite = true;
      res.value = kPosInf;
      res.diag.notes.push_back("supremum grows without bound as t -> 0");
      return res;
    }
  }

  res.value = std::exp(best_log);
  res.diag.log_value = best_log;
  res.diag.supremum_location = t_of_u(best_u);
  res.error_estimate = std::max(1e-12, 1e-9 * std::abs(res.value));
  return res;
}

NormResult small_norm(const FunctionSpec& f, const GrandParams& gp, const NormOptions& opt) {
  require(gp.p > 1.0 && std::isfinite(gp.p), "small norm: p must lie in (1, inf)");
  require(gp.theta >= 0.0, "small norm: theta must be >= 0");
  NormResult res;
  if (spec_is_zero(f)) return res;

  const double p = gp.p;
  const double p_conj = p / (p - 1.0);
  const double alpha = gp.theta / p_conj - 1.0;  // exponent of log(e/t)

  const RearrangedFunction fstar = decreasing_rearrangement(f);

  if (const StepFunction* step = fstar.as_step()) {
    StepPowerTable table(*step, p);
    // Outer integral cellwise: log integrand = alpha log u + (1/p) log F(u).
    const auto log_outer = [&](double u) {
      return alpha * std::log(u) + table.log_lower(u) / p;
    };
    double acc = kNegInf;
    const std::size_t n = step->cell_count();
    for (std::size_t i = n; i-- > 0;) {
      const double u_lo = step->u_lo(i);
      const double u_hi = step->u_hi(i);
      if (u_hi != kPosInf) {
        acc = log_add_exp(acc, log_integral_panels(log_outer, u_lo, u_hi));
        continue;
      }
      // Deepest cell: F(t) = v_0^p t, integrand ~ u^alpha e^{-u/p}.
      double a = u_lo, w = 4.0;
      for (int blk = 0; blk < 60; ++blk) {
        const double piece = log_integral_panels(log_outer, a, a + w);
        const double before = acc;
        acc = log_add_exp(acc, piece);
        if (piece == kNegInf || (before > kNegInf && piece < before - 46.0)) break;
        a += w;
        w *= 2.0;
      }
    }
    res.value = std::exp(acc);
    res.diag.log_value = acc;
    res.error_estimate = std::max(1e-12, 1e-10 * res.value);
    return res;
  }

  // Analytic profile: cumulative lower integrals via the graded structure.
  FunctionSpec rep = fstar.as_function_spec();
  LogIntegrand lf;
  if (fstar.reflected) {
    const FunctionSpec inner = fstar.representation;
    lf = [inner](double u) {
      const double t = t_of_u(u);
      const double s = t > 0.0 ? 1.0 - t : 1.0;
      return log_evaluate(inner, s > 0.0 ? s : 1e-300);
    };
  } else {
    lf = log_value_u_fn(rep);
  }
  const auto log_phi = [lf, p](double u) {
    const double lv = lf(u);
    return lv == kNegInf ? kNegInf : p * lv + (1.0 - u);
  };
  const double u_deep = 600.0;
  GradedCumulative cum(log_phi, 1.0, u_deep, 4096);
  FullIntegral inner_tail = integrate_full(log_phi, u_deep, opt.tol);
  if (!inner_tail.finite) {
    res.infinite = true;
    res.value = kPosInf;
    res.diag.growth = inner_tail.growth;
    res.diag.notes.push_back("inner ∫_0^t f_*^p diverges");
    return res;
  }
  cum.set_log_tail(inner_tail.log_value);

  const auto log_outer = [&](double u) {
    const double lF = cum.log_suffix(u);
    if (lF == kNegInf) return kNegInf;
    return alpha * std::log(u) + lF / p;
  };
  FullIntegral outer = integrate_full(log_outer, 1.0, opt.tol);
  res.diag.growth = outer.growth;
  if (!outer.finite) {
    res.infinite = true;
    res.value = kPosInf;
    res.diag.notes.push_back("outer integral diverges");
    return res;
  }
  res.value = std::exp(outer.log_value);
  res.diag.log_value = outer.log_value;
  res.error_estimate = outer.error;
  if (!outer.converged) res.diag.notes.push_back(outer.note);
  return res;
}

NormResult musielak_modular(const FunctionSpec& f, const MusielakParams& mp, double lambda,
                            const NormOptions& opt) {
  require(lambda > 0.0, "musielak_modular: lambda must be positive");
  validate_sigma(mp.sigma_star);
  ModularOutcome m = modular_log(f, mp.p_star, std::log(lambda), &mp.sigma_star, opt.tol);
  NormResult res;
  res.diag.log_value = m.log_value;
  res.diag.growth = m.growth;
  if (!m.finite) {
    res.infinite = true;
    res.value = kPosInf;
    return res;
  }
  res.value = std::exp(m.log_value);
  res.error_estimate = m.rel_error * std::max(res.value, 1e-300);
  if (!m.converged) res.diag.notes.push_back(m.note);
  return res;
}

NormResult musielak_norm(const FunctionSpec& f, const MusielakParams& mp,
                         const NormOptions& opt) {
  validate_sigma(mp.sigma_star);
  NormResult res;
  if (spec_is_zero(f)) return res;
  const LogModular modular = [&](double log_lambda) {
    return modular_log(f, mp.p_star, log_lambda, &mp.sigma_star, opt.tol);
  };
  return luxemburg_from_modular(modular, step_hint_log_lambda(f, mp.p_star.p_minus()));
}

double holder_pairing(const FunctionSpec& f, const FunctionSpec& g, const NormOptions& opt) {
  StepView fs = as_step(f);
  StepView gs = as_step(g);
  if (fs && gs) {
    std::vector<double> cuts = merge_u_breaks(fs.ptr->u_breaks(), gs.ptr->u_breaks());
    double acc = kNegInf;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double u_hi = cuts[k], u_lo = cuts[k + 1];
      const double lf = fs.ptr->log_value(fs.ptr->cell_index_u(u_lo));
      const double lg = gs.ptr->log_value(gs.ptr->cell_index_u(u_lo));
      if (lf == kNegInf || lg == kNegInf) continue;
      const double log_w = (1.0 - u_lo) + std::log(-std::expm1(-(u_hi - u_lo)));
      acc = log_add_exp(acc, lf + lg + log_w);
    }
    return std::exp(acc);
  }
  const LogIntegrand lf = log_value_u_fn(f);
  const LogIntegrand lg = log_value_u_fn(g);
  const auto log_phi = [&](double u) {
    const double a = lf(u), b = lg(u);
    if (a == kNegInf || b == kNegInf) return kNegInf;
    return a + b + (1.0 - u);
  };
  FullIntegral full = integrate_full(log_phi, 1.0, opt.tol);
  if (!full.finite) return kPosInf;
  return std::exp(full.log_value);
}

}  // namespace lspace

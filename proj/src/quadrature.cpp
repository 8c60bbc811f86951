#include "lspace/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace lspace {

namespace {

double sample(const LogIntegrand& log_phi, double u) {
  const double lp = log_phi(u);
  if (std::isnan(lp) || lp == kPosInf) {
    std::ostringstream msg;
    msg << "non-finite integrand sample at t = " << t_of_u(u) << " (u = " << u << ")";
    throw std::runtime_error(msg.str());
  }
  return std::exp(lp);
}

struct Panel {
  double a, b;
  double fa, fm, fb;    // phi at a, midpoint, b
  double flm, frm;      // phi at the two quarter points
  double coarse;        // Simpson over [a,b]
  double refined;       // two-half Simpson
  double err;           // |refined - coarse| / 15
};

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

Panel make_panel(const LogIntegrand& log_phi, double a, double b, double fa, double fm,
                 double fb) {
  Panel p{a, b, fa, fm, fb, 0, 0, 0, 0, 0};
  const double m = 0.5 * (a + b);
  p.flm = sample(log_phi, 0.5 * (a + m));
  p.frm = sample(log_phi, 0.5 * (m + b));
  p.coarse = simpson(fa, fm, fb, b - a);
  const double left = simpson(fa, p.flm, fm, m - a);
  const double right = simpson(fm, p.frm, fb, b - m);
  p.refined = left + right;
  p.err = std::abs(p.refined - p.coarse) / 15.0;
  return p;
}

struct PanelWorse {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.err != y.err) return x.err < y.err;
    return x.a > y.a;  // deterministic tie-break
  }
};

}  // namespace

QuadratureResult integrate_u(const LogIntegrand& log_phi, double u_lo, double u_hi,
                             const QuadratureOptions& opt) {
  QuadratureResult res;
  if (!(u_hi > u_lo)) {
    res.converged = true;
    return res;
  }

  std::priority_queue<Panel, std::vector<Panel>, PanelWorse> queue;
  const int seed_panels = std::clamp(static_cast<int>(std::ceil((u_hi - u_lo) / 2.0)), 1, 64);
  double prev_u = u_lo;
  double prev_f = sample(log_phi, u_lo);
  double err_total = 0.0;
  for (int i = 1; i <= seed_panels; ++i) {
    const double u = u_lo + (u_hi - u_lo) * i / seed_panels;
    const double fu = sample(log_phi, u);
    const double fm = sample(log_phi, 0.5 * (prev_u + u));
    Panel p = make_panel(log_phi, prev_u, u, prev_f, fm, fu);
    err_total += p.err;
    queue.push(p);
    prev_u = u;
    prev_f = fu;
  }

  int panels = seed_panels;
  while (err_total > opt.tol && panels < opt.max_panels) {
    Panel worst = queue.top();
    queue.pop();
    err_total -= worst.err;
    const double m = 0.5 * (worst.a + worst.b);
    Panel left = make_panel(log_phi, worst.a, m, worst.fa, worst.flm, worst.fm);
    Panel right = make_panel(log_phi, m, worst.b, worst.fm, worst.frm, worst.fb);
    err_total += left.err + right.err;
    queue.push(left);
    queue.push(right);
    ++panels;
    if (!std::isfinite(err_total)) break;
  }

  // Accumulate in ascending-u order with the Richardson correction.
  std::vector<Panel> final_panels;
  final_panels.reserve(queue.size());
  while (!queue.empty()) {
    final_panels.push_back(queue.top());
    queue.pop();
  }
  std::sort(final_panels.begin(), final_panels.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  CompensatedSum acc;
  CompensatedSum err_acc;
  for (const Panel& p : final_panels) {
    acc.add(p.refined + (p.refined - p.coarse) / 15.0);
    err_acc.add(p.err);
  }
  res.value = acc.value();
  res.abs_error_estimate = err_acc.value();
  res.subdivisions = panels;
  res.converged = std::isfinite(res.value) && res.abs_error_estimate <= opt.tol;
  return res;
}

QuadratureResult integrate_u_open(const LogIntegrand& log_phi, double u_lo,
                                  const QuadratureOptions& opt) {
  QuadratureResult res;
  CompensatedSum total;
  double width = 4.0;
  double edge = u_lo;
  double prev_block = kNaN;
  int panels = 0;

  for (int k = 0; k < opt.max_blocks; ++k) {
    QuadratureOptions block_opt = opt;
    block_opt.tol = opt.tol / std::min(64.0, 4.0 * std::pow(2.0, k));
    const double next = edge + width;
    QuadratureResult block = integrate_u(log_phi, edge, next, block_opt);
    total.add(block.value);
    res.abs_error_estimate += block.abs_error_estimate;
    panels += block.subdivisions;
    res.partials.emplace_back(next, total.value());

    const double mass = std::abs(block.value);
    if (!std::isfinite(total.value()) || std::abs(total.value()) > opt.explode_at) {
      res.value = total.value();
      res.subdivisions = panels;
      res.converged = false;
      return res;
    }
    if (k >= 1 && mass <= opt.tol / 10.0) {
      // Tail estimate from the block decay ratio. Blocks that are not
      // clearly decaying give no tail bound: a tiny but growing block can
      // precede the whole mass of the integrand.
      const double prev = std::abs(prev_block);
      double tail = kPosInf;
      if (prev == 0.0 && mass == 0.0) {
        tail = 0.0;
      } else if (mass < 0.9 * prev) {
        const double r = mass / prev;
        tail = mass * r / (1.0 - r);
      }
      if (tail <= opt.tol / 10.0) {
        res.value = total.value();
        res.abs_error_estimate += tail;
        res.subdivisions = panels;
        res.converged = res.abs_error_estimate <= opt.tol;
        if (res.converged) return res;
      }
    }
    prev_block = block.value;
    edge = next;
    width *= 2.0;
  }

  res.value = total.value();
  res.subdivisions = panels;
  res.converged = false;
  return res;
}

QuadratureResult integrate_graded(const std::function<double(double)>& g, double lo,
                                  double hi, double tol) {
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
    throw std::invalid_argument("integrate_graded: need 0 <= lo < hi <= 1");
  QuadratureOptions opt;
  opt.tol = tol;
  // phi(u) = g(e^{1-u}) e^{1-u}, evaluated through the log channel so that
  // singular-endpoint magnitudes cannot overflow before the jacobian damps
  // them. One-signed integrands only; the sign is probed and folded back.
  const double u_hi_edge = u_of_t(hi);
  bool negative_seen = false, positive_seen = false;
  for (int i = 0; i <= 16; ++i) {
    const double u = u_hi_edge + i * 0.5;
    const double t = t_of_u(u);
    if (lo > 0.0 && t <= lo) break;
    const double v = g(t);
    if (v > 0) positive_seen = true;
    if (v < 0) negative_seen = true;
  }
  if (positive_seen && negative_seen)
    throw std::invalid_argument("integrate_graded: mixed-sign integrands are unsupported");
  const double sign = negative_seen ? -1.0 : 1.0;
  const LogIntegrand log_phi = [&g, sign](double u) {
    const double t = t_of_u(u);
    if (t <= 0.0) return kNegInf;
    const double v = sign * g(t) * t;
    if (std::isnan(v) || v < 0.0) return kNaN;
    return v == 0.0 ? kNegInf : std::log(v);
  };

  QuadratureResult res = lo == 0.0 ? integrate_u_open(log_phi, u_hi_edge, opt)
                                   : integrate_u(log_phi, u_hi_edge, u_of_t(lo), opt);
  res.value *= sign;
  return res;
}

std::vector<double> series_partial_sums(const std::function<double(long)>& term,
                                        long j_start, const std::vector<long>& levels) {
  if (levels.empty()) return {};
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1])
      throw std::invalid_argument("series_partial_sums: levels must be increasing");

  std::vector<double> sums;
  sums.reserve(levels.size());
  CompensatedSum acc;
  long j = j_start;
  for (long level : levels) {
    for (; j <= level; ++j) {
      const double t = term(j);
      if (!std::isfinite(t)) {
        std::ostringstream msg;
        msg << "series term non-finite at j = " << j;
        throw std::runtime_error(msg.str());
      }
      acc.add(t);
    }
    sums.push_back(acc.value());
  }
  return sums;
}

std::string to_string(GrowthReport::Model m) {
  switch (m) {
    case GrowthReport::Model::bounded: return "BOUNDED";
    case GrowthReport::Model::log: return "LOG";
    case GrowthReport::Model::loglog: return "LOGLOG";
    case GrowthReport::Model::power: return "POWER";
  }
  return "?";
}

std::string to_string(GrowthReport::Verdict v) {
  switch (v) {
    case GrowthReport::Verdict::convergent: return "CONVERGENT";
    case GrowthReport::Verdict::divergent: return "DIVERGENT";
    case GrowthReport::Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms = kPosInf;
  double r2 = 0.0;
};

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.rms = std::sqrt(ss_res / static_cast<double>(n));
  fit.r2 = syy == 0.0 ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
  return fit;
}

}  // namespace

GrowthReport classify_growth(const std::vector<double>& levels,
                             const std::vector<double>& values, bool levels_are_log) {
  const std::size_t n = levels.size();
  if (n < 4 || values.size() != n)
    throw std::invalid_argument("classify_growth: need >= 4 (level, value) pairs");
  for (std::size_t i = 1; i < n; ++i)
    if (!(levels[i] > levels[i - 1]))
      throw std::invalid_argument("classify_growth: levels must be increasing");

  std::vector<double> u(n);  // log-levels
  if (levels_are_log) {
    u = levels;
    if (u.back() - u.front() < 3.0 * std::log(10.0) * 0.999)
      throw std::invalid_argument("classify_growth: levels must span >= 3 decades");
  } else {
    if (!(levels.front() >= 2.0))
      throw std::invalid_argument("classify_growth: levels must be >= 2");
    if (levels.back() / levels.front() < 999.99)
      throw std::invalid_argument("classify_growth: levels must span >= 3 decades");
    for (std::size_t i = 0; i < n; ++i) u[i] = std::log(levels[i]);
  }

  const double scale = std::max({std::abs(values.front()), std::abs(values.back()), 1e-300});
  for (std::size_t i = 1; i < n; ++i)
    if (values[i] < values[i - 1] - 1e-12 * std::max(1.0, scale))
      throw std::invalid_argument("classify_growth: values must be non-decreasing");

  GrowthReport rep;
  rep.levels = levels;
  rep.values = values;
  rep.levels_are_log = levels_are_log;

  const double range = values.back() - values.front();

  // Flat sequences and sequences whose increments have already died out.
  const double last_inc = values[n - 1] - values[n - 2];
  if (range <= 1e-9 * std::max(1.0, scale) || last_inc <= 1e-12 * std::max(1.0, scale)) {
    rep.model = GrowthReport::Model::bounded;
    rep.verdict = GrowthReport::Verdict::convergent;
    rep.fit_quality = 1.0 - std::clamp(range / scale, 0.0, 1.0);
    rep.note = "increments exhausted";
    return rep;
  }

  // Runaway growth needs no model comparison.
  if (values.front() > 0.0 && values.back() / values.front() > 1e10) {
    rep.model = GrowthReport::Model::power;
    rep.verdict = GrowthReport::Verdict::divergent;
    rep.fit_quality = 1.0;
    rep.fitted_rate = (std::log(values.back()) - std::log(values.front())) / (u.back() - u.front());
    rep.note = "runaway growth";
    return rep;
  }

  // Candidate models: V = a + b * x with x = log L, loglog L, or L^alpha.
  const LinearFit log_fit = fit_linear(u, values);
  std::vector<double> x_ll(n);
  for (std::size_t i = 0; i < n; ++i) x_ll[i] = std::log(u[i]);
  const LinearFit loglog_fit = fit_linear(x_ll, values);

  LinearFit power_fit;
  double power_alpha = 0.0;
  const double alpha_cap = std::min(4.0, 600.0 / u.back());
  for (int k = 0; k <= 80; ++k) {
    const double alpha = alpha_cap * std::pow(10.0, -2.0 * (1.0 - k / 80.0));
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(alpha * u[i]);
    const LinearFit fit = fit_linear(x, values);
    if (fit.rms < power_fit.rms) {
      power_fit = fit;
      power_alpha = alpha;
    }
  }

  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double bounded_rms = std::sqrt(var / static_cast<double>(n));
  const double bounded_quality = 1.0 - std::clamp(range / scale, 0.0, 1.0);

  // Growth density exponent: increments per unit log-level decay like
  // u^(-s); s > 1 is the convergent side of the integral comparison test.
  // Only the deepest half of the increments enters the fit, where transient
  // corrections to the asymptotic rate have died down.
  double s_hat = kNaN;
  {
    std::vector<double> xs, ys;
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i) {
      const double du = u[i] - u[i - 1];
      const double dv = values[i] - values[i - 1];
      if (!(dv > 0.0) || !(du > 0.0)) {
        ok = false;
        break;
      }
      xs.push_back(std::log(0.5 * (u[i] + u[i - 1])));
      ys.push_back(std::log(dv / du));
    }
    if (ok && xs.size() >= 3) {
      const std::size_t keep = std::max<std::size_t>(3, xs.size() / 2);
      const std::size_t from = xs.size() - keep;
      const std::vector<double> xs_deep(xs.begin() + from, xs.end());
      const std::vector<double> ys_deep(ys.begin() + from, ys.end());
      s_hat = -fit_linear(xs_deep, ys_deep).slope;
    }
  }
  rep.increment_exponent = s_hat;

  const auto pick_unbounded = [&]() {
    if (log_fit.rms <= loglog_fit.rms && log_fit.rms <= power_fit.rms) {
      rep.model = GrowthReport::Model::log;
      rep.fit_quality = log_fit.r2;
      rep.fitted_rate = log_fit.slope;
    } else if (loglog_fit.rms <= power_fit.rms) {
      rep.model = GrowthReport::Model::loglog;
      rep.fit_quality = loglog_fit.r2;
      rep.fitted_rate = loglog_fit.slope;
    } else {
      rep.model = GrowthReport::Model::power;
      rep.fit_quality = power_fit.r2;
      rep.fitted_rate = power_alpha;
    }
  };

  // An essentially exact fit by one of the two parameter-free unbounded
  // shapes is decisive on its own.
  const double exact_threshold = 1e-8 * range;
  if (log_fit.slope > 0.0 && log_fit.rms <= exact_threshold) {
    rep.model = GrowthReport::Model::log;
    rep.verdict = GrowthReport::Verdict::divergent;
    rep.fit_quality = log_fit.r2;
    rep.fitted_rate = log_fit.slope;
    rep.note = "exact log fit";
    return rep;
  }
  if (loglog_fit.slope > 0.0 && loglog_fit.rms <= exact_threshold) {
    rep.model = GrowthReport::Model::loglog;
    rep.verdict = GrowthReport::Verdict::divergent;
    rep.fit_quality = loglog_fit.r2;
    rep.fitted_rate = loglog_fit.slope;
    rep.note = "exact loglog fit";
    return rep;
  }

  if (std::isfinite(s_hat) && s_hat >= 1.05) {
    rep.model = GrowthReport::Model::bounded;
    rep.verdict = GrowthReport::Verdict::convergent;
    rep.fit_quality = bounded_quality;
    rep.note = "increment decay exponent above 1";
    return rep;
  }
  if (std::isfinite(s_hat) && s_hat <= 0.95) {
    pick_unbounded();
    const double best_r2 = std::max({log_fit.r2, loglog_fit.r2, power_fit.r2});
    if (best_r2 >= 0.99 && values.back() > values.front()) {
      rep.verdict = GrowthReport::Verdict::divergent;
      rep.note = "increment decay exponent below 1";
    } else {
      rep.verdict = GrowthReport::Verdict::inconclusive;
      rep.note = "slow growth but unbounded-model fit below 0.99";
    }
    return rep;
  }

  if (bounded_rms <= std::min({log_fit.rms, loglog_fit.rms, power_fit.rms})) {
    rep.model = GrowthReport::Model::bounded;
    rep.fit_quality = bounded_quality;
  } else {
    pick_unbounded();
  }
  rep.verdict = GrowthReport::Verdict::inconclusive;
  rep.note = "increment decay exponent near the boundary";
  return rep;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double* best_value, int max_iter) {
  const double gr = (std::sqrt(5.0) + 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - (b - a) / gr;
  double d = a + (b - a) / gr;
  for (int i = 0; i < max_iter && std::abs(b - a) > 1e-13 * (std::abs(a) + std::abs(b) + 1e-6);
       ++i) {
    if (f(c) > f(d))
      b = d;
    else
      a = c;
    c = b - (b - a) / gr;
    d = a + (b - a) / gr;
  }
  const double x = 0.5 * (a + b);
  if (best_value) *best_value = f(x);
  return x;
}

}  // namespace lspace

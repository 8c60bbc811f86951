#include "lspace/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lspace/rearrange.hpp"

namespace lspace {

namespace {

constexpr double kMarginTolerance = 1e-12;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double conj_value(double p) { return p / (p - 1.0); }

}  // namespace

double ExampleExponent::value_at_u(double u) const {
  const double u0 = u_of_t(t0);
  if (u < u0) u = u0;
  return base * (1.0 + theta * std::log(u) / u);
}

double ReciprocalLogExponent::value_at_u(double u) const {
  const double u0 = u_of_t(t0);
  if (u < u0) u = u0;
  const double lu = std::log(u);
  double recip = 1.0 / base + (A + D * lu + (E != 0.0 ? E * std::log(lu) : 0.0)) / u;
  return 1.0 / recip;
}

struct ExponentSpec::Payload {
  ExponentRep rep;
  double p_minus = 0.0;
  double p_plus = 0.0;
  int direction = 0;  // sign of dp/dt: +1 increasing, -1 decreasing, 0 constant
  // Exact sorted views for step-backed payloads.
  std::shared_ptr<const StepFunction> step;  // the direct view as a step
  std::shared_ptr<const StepFunction> sorted_desc;
  std::shared_ptr<const StepFunction> sorted_asc;
};

namespace {

void analytic_extremes(const std::function<double(double)>& value_at_u, double u0,
                       double limit_at_zero, double& p_minus, double& p_plus,
                       int& direction) {
  double lo = limit_at_zero, hi = limit_at_zero;
  bool up = false, down = false;
  double prev = value_at_u(u0);
  lo = std::min(lo, prev);
  hi = std::max(hi, prev);
  for (int k = 1; k <= 2048; ++k) {
    const double u = u0 + k * (700.0 / 2048.0);
    const double v = value_at_u(u);
    require(std::isfinite(v) && v > 1.0, "exponent: values must stay in (1, inf)");
    if (v > prev + 1e-14) up = true;
    if (v < prev - 1e-14) down = true;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    prev = v;
  }
  require(!(up && down), "exponent: analytic carrier must be monotone");
  p_minus = lo;
  p_plus = hi;
  // increasing toward u means decreasing in t
  direction = up ? -1 : (down ? +1 : 0);
}

}  // namespace

ExponentSpec::ExponentSpec(ExponentRep rep) {
  auto payload = std::make_shared<Payload>();
  payload->rep = std::move(rep);

  if (const auto* step = std::get_if<StepFunction>(&payload->rep)) {
    payload->step = std::make_shared<StepFunction>(*step);
  } else if (const auto* sampled = std::get_if<SampledFunction>(&payload->rep)) {
    payload->step = std::make_shared<StepFunction>(sampled->to_step());
  }

  if (payload->step) {
    double lo = kPosInf, hi = kNegInf;
    for (std::size_t i = 0; i < payload->step->cell_count(); ++i) {
      const double v = payload->step->value(i);
      require(std::isfinite(v) && v > 1.0, "exponent: values must stay in (1, inf)");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    payload->p_minus = lo;
    payload->p_plus = hi;
    payload->sorted_desc = std::make_shared<StepFunction>(
        std::get<StepFunction>(decreasing_rearrangement(*payload->step).representation));
    payload->sorted_asc = std::make_shared<StepFunction>(
        std::get<StepFunction>(increasing_rearrangement(*payload->step).representation));
  } else if (const auto* ex = std::get_if<ExampleExponent>(&payload->rep)) {
    require(ex->base > 1.0, "example exponent: base must exceed 1");
    require(ex->theta > 0.0, "example exponent: theta must be positive");
    require(ex->t0 > 0.0 && ex->t0 <= std::exp(1.0 - std::exp(1.0)) + 1e-12,
            "example exponent: t0 must satisfy log(e/t0) >= e");
    const auto eval = [ex](double u) { return ex->value_at_u(u); };
    analytic_extremes(eval, u_of_t(ex->t0), ex->base, payload->p_minus, payload->p_plus,
                      payload->direction);
  } else {
    const auto& rl = std::get<ReciprocalLogExponent>(payload->rep);
    require(rl.base > 1.0, "reciprocal-log exponent: base must exceed 1");
    require(rl.t0 > 0.0 && rl.t0 < 1.0, "reciprocal-log exponent: t0 must lie in (0,1)");
    if (rl.E != 0.0)
      require(u_of_t(rl.t0) > 1.0, "reciprocal-log exponent: triple log needs t0 < 1");
    const auto eval = [&rl](double u) { return rl.value_at_u(u); };
    analytic_extremes(eval, u_of_t(rl.t0), rl.base, payload->p_minus, payload->p_plus,
                      payload->direction);
  }
  require(payload->p_minus > 1.0 && std::isfinite(payload->p_plus),
          "exponent: need 1 < p_- <= p_+ < inf");
  payload_ = std::move(payload);
}

ExponentSpec ExponentSpec::constant(double p) {
  return ExponentSpec(StepFunction::from_values({0.0, 1.0}, {p}));
}

double ExponentSpec::rep_value_at(double t, Channel ch) const {
  const Payload& pl = *payload_;
  if (pl.step) {
    switch (ch) {
      case Channel::direct: return pl.step->value_at(t);
      case Channel::star: return pl.sorted_desc->value_at(t);
      case Channel::star_up: return pl.sorted_asc->value_at(t);
    }
  }
  const auto analytic = [&pl](double s) -> double {
    if (const auto* ex = std::get_if<ExampleExponent>(&pl.rep)) return ex->value_at(s);
    return std::get<ReciprocalLogExponent>(pl.rep).value_at(s);
  };
  const auto analytic_limit_at_zero = [&pl]() -> double {
    if (const auto* ex = std::get_if<ExampleExponent>(&pl.rep)) return ex->base;
    return std::get<ReciprocalLogExponent>(pl.rep).base;
  };
  const bool increasing = pl.direction >= 0;
  bool reflect = false;
  switch (ch) {
    case Channel::direct: break;
    case Channel::star: reflect = increasing; break;
    case Channel::star_up: reflect = !increasing; break;
  }
  if (!reflect) return analytic(t);
  const double s = 1.0 - t;
  if (s <= 0.0) return analytic_limit_at_zero();
  return analytic(s);
}

double ExponentSpec::operator()(double t) const {
  if (!(t > 0.0) || t > 1.0) throw std::domain_error("exponent: t outside (0,1]");
  const double v = rep_value_at(t, channel_);
  return conjugated_ ? conj_value(v) : v;
}

double ExponentSpec::value_at_u(double u) const {
  const Payload& pl = *payload_;
  if (!pl.step && channel_ == Channel::direct) {
    const double v = std::visit(
        [u](const auto& rep) -> double {
          using T = std::decay_t<decltype(rep)>;
          if constexpr (std::is_same_v<T, ExampleExponent> ||
                        std::is_same_v<T, ReciprocalLogExponent>)
            return rep.value_at_u(u);
          else
            return kNaN;  // unreachable: step payloads take the t path
        },
        pl.rep);
    return conjugated_ ? conj_value(v) : v;
  }
  if (pl.step && channel_ != Channel::direct) {
    // sorted step views evaluated in u-space directly
    const StepFunction& view =
        channel_ == Channel::star ? *pl.sorted_desc : *pl.sorted_asc;
    const double t = t_of_u(u);
    const double v = t > 0.0 ? view.value_at(t) : view.value(0);
    return conjugated_ ? conj_value(v) : v;
  }
  const double t = t_of_u(u);
  return (*this)(t > 0.0 ? t : 1e-300);
}

double ExponentSpec::p_minus() const {
  return conjugated_ ? conj_value(payload_->p_plus) : payload_->p_minus;
}

double ExponentSpec::p_plus() const {
  return conjugated_ ? conj_value(payload_->p_minus) : payload_->p_plus;
}

ExponentSpec ExponentSpec::conjugate() const {
  ExponentSpec out = *this;
  out.conjugated_ = !conjugated_;
  return out;
}

ExponentSpec ExponentSpec::star() const {
  ExponentSpec out = *this;
  // Conjugation flips monotonicity, so the decreasing rearrangement of the
  // conjugated view routes through the increasing rearrangement of the rep.
  out.channel_ = conjugated_ ? Channel::star_up : Channel::star;
  return out;
}

ExponentSpec ExponentSpec::star_up() const {
  ExponentSpec out = *this;
  out.channel_ = conjugated_ ? Channel::star : Channel::star_up;
  return out;
}

bool ExponentSpec::step_backed() const { return payload_->step != nullptr; }

const StepFunction* ExponentSpec::step_view() const {
  if (conjugated_ || !payload_->step) return nullptr;
  switch (channel_) {
    case Channel::direct: return payload_->step.get();
    case Channel::star: return payload_->sorted_desc.get();
    case Channel::star_up: return payload_->sorted_asc.get();
  }
  return nullptr;
}

StepFunction ExponentSpec::materialize_step(std::size_t points) const {
  if (const StepFunction* exact = step_view()) return *exact;
  if (payload_->step) {
    // conjugated step view: conjugate each cell value, exact
    const StepFunction* base = nullptr;
    switch (channel_) {
      case Channel::direct: base = payload_->step.get(); break;
      case Channel::star: base = payload_->sorted_desc.get(); break;
      case Channel::star_up: base = payload_->sorted_asc.get(); break;
    }
    std::vector<double> logs(base->cell_count());
    for (std::size_t i = 0; i < base->cell_count(); ++i)
      logs[i] = std::log(conj_value(base->value(i)));
    return StepFunction::from_u_cells(base->u_breaks(), std::move(logs));
  }
  // graded sampling of the analytic view
  std::vector<double> u_breaks{kPosInf};
  std::vector<double> logs;
  const double u_deep = 30.0;
  logs.push_back(std::log(value_at_u(u_deep)));
  for (std::size_t k = points; k-- > 1;) {
    const double u = 1.0 + (u_deep - 1.0) * static_cast<double>(k) / static_cast<double>(points);
    u_breaks.push_back(u);
    logs.push_back(std::log(value_at_u(u)));
  }
  u_breaks.push_back(1.0);
  return StepFunction::from_u_cells(std::move(u_breaks), std::move(logs));
}

std::string ExponentSpec::id() const {
  std::ostringstream out;
  std::visit(
      [&out](const auto& rep) {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, StepFunction>)
          out << "step-exponent[" << rep.cell_count() << " cells]";
        else if constexpr (std::is_same_v<T, SampledFunction>)
          out << "sampled-exponent[" << rep.grid.size() << " points]";
        else if constexpr (std::is_same_v<T, ExampleExponent>)
          out << "example-exponent[theta=" << rep.theta << ",base=" << rep.base << "]";
        else
          out << "recip-log-exponent[base=" << rep.base << ",A=" << rep.A << ",D=" << rep.D
              << ",E=" << rep.E << ",t0=" << rep.t0 << "]";
      },
      payload_->rep);
  if (conjugated_) out << "'";
  if (channel_ == Channel::star) out << "_*";
  if (channel_ == Channel::star_up) out << "^*";
  return out.str();
}

ExponentSpec exponent_for_theta(double theta, double base) {
  require(theta > 0.0, "exponent_for_theta: theta must be positive");
  require(base > 1.0, "exponent_for_theta: base must exceed 1");
  ExampleExponent ex;
  ex.base = base;
  ex.theta = theta;
  return ExponentSpec(ex);
}

namespace {

using nlohmann::json;

std::string read_text(const std::string& text) {
  if (!text.empty() && text.front() == '{') return text;
  std::ifstream in(text);
  if (!in) throw std::invalid_argument("spec file not readable: " + text);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ExponentSpec parse_exponent_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(read_text(text));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("exponent spec is not valid JSON: ") + e.what());
  }
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("exponent spec missing field: kind");
  const std::string kind = j["kind"].get<std::string>();

  if (kind == "example-exponent") {
    ExampleExponent ex;
    ex.theta = j.at("theta").get<double>();
    ex.base = j.contains("base") ? j.at("base").get<double>() : 2.0;
    return ExponentSpec(ex);
  }
  if (kind == "recip-log-exponent") {
    ReciprocalLogExponent rl;
    rl.base = j.at("base").get<double>();
    rl.A = j.value("A", 0.0);
    rl.D = j.value("D", 0.0);
    rl.E = j.value("E", 0.0);
    rl.t0 = j.value("t0", std::exp(-2.0));
    return ExponentSpec(rl);
  }
  if (kind == "constant") {
    return ExponentSpec::constant(j.at("value").get<double>());
  }
  if (kind == "step" || kind == "sampled") {
    FunctionSpec f = parse_function_spec(text);
    if (auto* step = std::get_if<StepFunction>(&f)) return ExponentSpec(std::move(*step));
    return ExponentSpec(std::get<SampledFunction>(std::move(f)));
  }
  if (kind == "powerloglog")
    throw std::invalid_argument(
        "exponent spec: powerloglog carriers are not valid exponents (unbounded or below 1)");
  throw std::invalid_argument("exponent spec: unknown kind '" + kind + "'");
}

double sigma_value(const SigmaSpec& s, double t) {
  if (!(t > 0.0) || t > 1.0) throw std::domain_error("sigma: t outside (0,1]");
  if (const auto* c = std::get_if<SigmaConstant>(&s)) return c->value;
  if (const auto* step = std::get_if<SigmaStep>(&s)) {
    auto it = std::lower_bound(step->breaks.begin(), step->breaks.end(), t);
    std::size_t k = static_cast<std::size_t>(it - step->breaks.begin());
    if (k == 0) k = 1;
    return step->values[k - 1];
  }
  const auto& cap = std::get<SigmaCappedRecipLogLog>(s);
  const double u = u_of_t(std::min(t, cap.t0));
  return cap.sigma0 - cap.B / std::log(u);
}

double sigma_zero(const SigmaSpec& s) {
  if (const auto* c = std::get_if<SigmaConstant>(&s)) return c->value;
  if (const auto* step = std::get_if<SigmaStep>(&s)) return step->values.front();
  return std::get<SigmaCappedRecipLogLog>(s).sigma0;
}

void validate_sigma(const SigmaSpec& s) {
  if (const auto* step = std::get_if<SigmaStep>(&s)) {
    require(step->breaks.size() >= 2 && step->breaks.size() == step->values.size() + 1,
            "sigma step: breakpoint/value count mismatch");
    require(step->breaks.front() == 0.0 && step->breaks.back() == 1.0,
            "sigma step: breakpoints must span [0,1]");
    for (std::size_t i = 1; i < step->breaks.size(); ++i)
      require(step->breaks[i] > step->breaks[i - 1], "sigma step: breakpoints must increase");
    for (std::size_t i = 1; i < step->values.size(); ++i)
      require(step->values[i] <= step->values[i - 1] + 1e-15,
              "sigma step: values must be non-increasing");
    for (double v : step->values)
      require(std::isfinite(v), "sigma step: values must be finite");
  } else if (const auto* cap = std::get_if<SigmaCappedRecipLogLog>(&s)) {
    require(cap->B >= 0.0, "sigma: B must be >= 0");
    require(cap->t0 > 0.0 && cap->t0 < 1.0, "sigma: t0 must lie in (0,1)");
  }
}

SigmaSpec parse_sigma_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(read_text(text));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("sigma spec is not valid JSON: ") + e.what());
  }
  const std::string kind = j.at("kind").get<std::string>();
  SigmaSpec out;
  if (kind == "const") {
    out = SigmaConstant{j.at("value").get<double>()};
  } else if (kind == "step") {
    SigmaStep s;
    s.breaks = j.at("breaks").get<std::vector<double>>();
    s.values = j.at("values").get<std::vector<double>>();
    out = s;
  } else if (kind == "capped-recip-loglog") {
    SigmaCappedRecipLogLog s;
    s.sigma0 = j.at("sigma0").get<double>();
    s.B = j.at("B").get<double>();
    s.t0 = j.value("t0", std::exp(-2.0));
    out = s;
  } else {
    throw std::invalid_argument("sigma spec: unknown kind '" + kind + "'");
  }
  validate_sigma(out);
  return out;
}

std::string sigma_spec_id(const SigmaSpec& s) {
  std::ostringstream out;
  if (const auto* c = std::get_if<SigmaConstant>(&s))
    out << "sigma-const[" << c->value << "]";
  else if (const auto* step = std::get_if<SigmaStep>(&s))
    out << "sigma-step[" << step->values.size() << " cells]";
  else {
    const auto& cap = std::get<SigmaCappedRecipLogLog>(s);
    out << "sigma-capped[sigma0=" << cap.sigma0 << ",B=" << cap.B << ",t0=" << cap.t0 << "]";
  }
  return out.str();
}

std::string to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::var_small: return "var-small";
    case ConditionKind::grand_var: return "grand-var";
    case ConditionKind::weaker_var_small: return "weaker-var-small";
    case ConditionKind::no_var_small: return "no-var-small";
    case ConditionKind::rearranged: return "rearranged";
    case ConditionKind::no_rearrange: return "no-rearrange";
    case ConditionKind::gen_orlicz_sigma: return "gen-orlicz-sigma";
    case ConditionKind::gen_orlicz_p: return "gen-orlicz-p";
  }
  return "?";
}

std::optional<ConditionKind> condition_kind_from_string(const std::string& name) {
  if (name == "var-small") return ConditionKind::var_small;
  if (name == "grand-var") return ConditionKind::grand_var;
  if (name == "weaker-var-small") return ConditionKind::weaker_var_small;
  if (name == "no-var-small") return ConditionKind::no_var_small;
  if (name == "rearranged") return ConditionKind::rearranged;
  if (name == "no-rearrange") return ConditionKind::no_rearrange;
  if (name == "gen-orlicz-sigma") return ConditionKind::gen_orlicz_sigma;
  if (name == "gen-orlicz-p") return ConditionKind::gen_orlicz_p;
  return std::nullopt;
}

std::vector<double> geometric_grid(double t_hi, double t_lo, std::size_t n) {
  require(n >= 2, "geometric grid: need at least two points");
  require(t_lo > 0.0 && t_lo < t_hi && t_hi <= 1.0, "geometric grid: need 0 < t_lo < t_hi <= 1");
  const double u_hi = u_of_t(t_hi), u_lo = u_of_t(t_lo);
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k)
    grid[k] = t_of_u(u_hi + (u_lo - u_hi) * static_cast<double>(k) / static_cast<double>(n - 1));
  return grid;
}

ConditionReport check_condition(const ExponentSpec& p, ConditionKind kind,
                                const ConditionParams& params, std::size_t grid_points,
                                std::vector<std::pair<double, double>>* margins) {
  require(params.t0 > 0.0 && params.t0 <= 1.0, "condition: t0 must lie in (0,1]");
  if (kind == ConditionKind::weaker_var_small)
    require(params.t0 <= std::exp(-2.0) + 1e-12,
            "condition grid: weaker-var-small requires t0 <= e^-2 so iterated logs stay positive");
  const bool needs_sigma =
      kind == ConditionKind::gen_orlicz_sigma || kind == ConditionKind::gen_orlicz_p;
  if (needs_sigma)
    require(params.sigma.has_value(), "condition: sigma function required for this kind");

  std::vector<double> grid = geometric_grid(params.t0, std::min(1e-12, params.t0 * 0.5),
                                            grid_points);
  for (double deep : {1e-30, 1e-100, 1e-300})
    if (deep < params.t0) grid.push_back(deep);

  const double p_minus = p.p_minus();
  const double p_plus = p.p_plus();
  const double p_minus_conj = conj_value(p_minus);
  const ExponentSpec star = p.star();
  const ExponentSpec star_up = p.star_up();
  const double sigma0 = needs_sigma ? sigma_zero(*params.sigma) : 0.0;

  ConditionReport rep;
  rep.grid_size = grid.size();
  rep.worst_margin = kPosInf;
  rep.witness_t = grid.front();

  for (double t : grid) {
    const double u = u_of_t(t);
    const double v = std::log(u) / u;  // loglog(e/t) / log(e/t)
    double margin = 0.0;
    switch (kind) {
      case ConditionKind::var_small:
        margin = (1.0 / p_minus - 1.0 / star_up(t)) - (params.theta / p_minus_conj + params.eps) * v;
        break;
      case ConditionKind::grand_var:
        margin = (1.0 / star(t) - 1.0 / p_plus) - (params.theta / p_plus + params.eps) * v;
        break;
      case ConditionKind::weaker_var_small: {
        const double w3 = std::log(std::log(u)) / u;
        margin = (1.0 / p_minus - 1.0 / star_up(t)) -
                 (params.theta / p_minus_conj) * v - (1.0 + params.eps) * w3;
        break;
      }
      case ConditionKind::no_var_small:
        margin = (params.theta / p_minus_conj) * v - (1.0 / p_minus - 1.0 / star_up(t));
        break;
      case ConditionKind::rearranged:
      case ConditionKind::gen_orlicz_p: {
        const double s0 = kind == ConditionKind::rearranged ? 0.0 : sigma0;
        margin = params.A / u + ((params.theta - 1.0 + s0) / p_plus) * v -
                 (1.0 / star(t) - 1.0 / p_plus);
        break;
      }
      case ConditionKind::no_rearrange:
        margin = (1.0 / star(t) - 1.0 / p_plus) - ((params.theta + params.eps) / p_plus) * v;
        break;
      case ConditionKind::gen_orlicz_sigma: {
        const double lls = std::log(u);  // loglog(e/t)
        const double sigma_diff = sigma0 - sigma_value(*params.sigma, t);
        margin = lls > 0.0 ? params.B / lls - sigma_diff
                           : (sigma_diff <= 0.0 ? kPosInf : kNegInf);
        break;
      }
    }
    if (margins) margins->emplace_back(t, margin);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.witness_t = t;
    }
  }
  rep.holds = rep.worst_margin >= -kMarginTolerance;
  return rep;
}

}  // namespace lspace

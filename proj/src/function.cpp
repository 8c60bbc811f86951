#include "lspace/function.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace lspace {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double iterated_log_u(double u, bool shift_ee) {
  // loglog(e^e/t) = log(u + e - 1), loglog(e/t) = log(u), with u = log(e/t).
  return shift_ee ? std::log(u + std::exp(1.0) - 1.0) : std::log(u);
}

}  // namespace

StepFunction StepFunction::from_values(const std::vector<double>& breaks,
                                       const std::vector<double>& values) {
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(values[i]) && values[i] >= 0.0,
            "step function: values must be finite and >= 0");
    logs[i] = values[i] == 0.0 ? kNegInf : std::log(values[i]);
  }
  return from_log_values(breaks, logs);
}

StepFunction StepFunction::from_log_values(const std::vector<double>& breaks,
                                           const std::vector<double>& log_values) {
  require(breaks.size() >= 2, "step function: need at least two breakpoints");
  require(breaks.size() == log_values.size() + 1,
          "step function: breakpoint/value count mismatch");
  require(breaks.front() == 0.0, "step function: first breakpoint must be 0");
  require(breaks.back() == 1.0, "step function: last breakpoint must be 1");
  for (std::size_t i = 1; i < breaks.size(); ++i)
    require(breaks[i] > breaks[i - 1], "step function: breakpoints must be strictly increasing");

  std::vector<double> u(breaks.size());
  u[0] = kPosInf;
  for (std::size_t i = 1; i < breaks.size(); ++i) u[i] = u_of_t(breaks[i]);
  return from_u_cells(std::move(u), log_values);
}

StepFunction StepFunction::from_u_cells(std::vector<double> u_breaks,
                                        std::vector<double> log_values) {
  require(u_breaks.size() == log_values.size() + 1,
          "step function: breakpoint/value count mismatch");
  require(u_breaks.back() == 1.0, "step function: domain must end at t = 1");
  for (std::size_t i = 1; i < u_breaks.size(); ++i)
    require(u_breaks[i] < u_breaks[i - 1], "step function: u-breakpoints must be strictly decreasing");
  for (double lv : log_values)
    require(!std::isnan(lv) && lv < kPosInf, "step function: log values must be < +inf");

  StepFunction f;
  f.u_breaks_ = std::move(u_breaks);
  f.log_values_ = std::move(log_values);
  return f;
}

std::size_t StepFunction::cell_index(double t) const {
  if (!(t > 0.0) || t > 1.0) throw std::domain_error("step function: t outside (0,1]");
  return cell_index_u(u_of_t(t));
}

std::size_t StepFunction::cell_index_u(double u) const {
  if (u < 1.0) u = 1.0;
  // Cells are (t_i, t_{i+1}], i.e. u in [u_{i+1}, u_i); a breakpoint belongs
  // to the cell to its left in t. u_breaks_ is descending; find the first
  // index whose breakpoint is <= u.
  auto it = std::lower_bound(u_breaks_.begin(), u_breaks_.end(), u,
                             [](double elem, double val) { return elem > val; });
  std::size_t k = static_cast<std::size_t>(it - u_breaks_.begin());
  if (k == 0) return 0;
  if (k >= u_breaks_.size()) return cell_count() - 1;
  return k - 1;
}

double StepFunction::log_width(std::size_t cell) const {
  const double lo = u_lo(cell), hi = u_hi(cell);
  // width = t_hi - t_lo = e^{1-lo} (1 - e^{-(hi-lo)}).
  return (1.0 - lo) + std::log(-std::expm1(-(hi - lo)));
}

std::vector<double> StepFunction::breaks() const {
  std::vector<double> out(u_breaks_.size());
  for (std::size_t i = 0; i < u_breaks_.size(); ++i)
    out[i] = u_breaks_[i] == kPosInf ? 0.0 : t_of_u(u_breaks_[i]);
  return out;
}

std::vector<double> StepFunction::values() const {
  std::vector<double> out(log_values_.size());
  for (std::size_t i = 0; i < log_values_.size(); ++i) out[i] = std::exp(log_values_[i]);
  return out;
}

bool StepFunction::is_zero() const {
  for (double lv : log_values_)
    if (lv != kNegInf) return false;
  return true;
}

double StepFunction::max_log_value() const {
  double hi = kNegInf;
  for (double lv : log_values_) hi = std::max(hi, lv);
  return hi;
}

double StepFunction::log_moment(double p) const {
  double hi = kNegInf;
  const std::size_t n = cell_count();
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    terms[i] = log_values_[i] == kNegInf ? kNegInf : p * log_values_[i] + log_width(i);
    hi = std::max(hi, terms[i]);
  }
  if (hi == kNegInf) return kNegInf;
  CompensatedSum acc;
  for (double term : terms) acc.add(std::exp(term - hi));
  return hi + std::log(acc.value());
}

double PowerLogLog::log_value_at(double t) const {
  if (!(t > 0.0) || t > 1.0) throw std::domain_error("power-log-log: t outside (0,1]");
  return log_value_at_u(u_of_t(t));
}

double PowerLogLog::log_value_at_u(double u) const {
  const double u0 = u_of_t(valid_to);
  if (u < u0) u = u0;  // constant continuation on (valid_to, 1]
  double lv = std::log(scale) + a * (u - 1.0) + b * std::log(u);
  if (c != 0.0) lv += c * std::log(iterated_log_u(u, shift_ee));
  return lv;
}

bool PowerLogLog::unbounded_at_zero() const {
  if (valid_to <= 0.0) return false;
  if (a != 0.0) return a > 0.0;
  if (b != 0.0) return b > 0.0;
  return c > 0.0;
}

StepFunction SampledFunction::to_step() const {
  require(!grid.empty() && grid.size() == values.size(),
          "sampled function: grid/value count mismatch");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0.0 && grid[i] <= 1.0, "sampled function: grid points must lie in (0,1]");
    if (i > 0) require(grid[i] < grid[i - 1], "sampled function: grid must be strictly decreasing");
    require(std::isfinite(values[i]) && values[i] >= 0.0,
            "sampled function: values must be finite and >= 0");
  }

  // Cells: (0, t_{n-1}] takes the deepest sample; (t_{k+1}, t_k] takes
  // values[k]; (t_0, 1] repeats values[0] when t_0 < 1.
  std::vector<double> u_breaks;
  std::vector<double> logs;
  u_breaks.push_back(kPosInf);
  const std::size_t n = grid.size();
  for (std::size_t k = n; k-- > 0;) {
    u_breaks.push_back(u_of_t(grid[k]));
    const std::size_t src = (k + 1 < n) ? k + 1 : k;
    logs.push_back(values[src] == 0.0 ? kNegInf : std::log(values[src]));
  }
  if (grid[0] < 1.0) {
    u_breaks.push_back(1.0);
    logs.push_back(values[0] == 0.0 ? kNegInf : std::log(values[0]));
  }
  return StepFunction::from_u_cells(std::move(u_breaks), std::move(logs));
}

double evaluate(const FunctionSpec& f, double t) {
  return std::exp(log_evaluate(f, t));
}

double log_evaluate(const FunctionSpec& f, double t) {
  if (!(t > 0.0) || t > 1.0) throw std::domain_error("evaluate: t outside (0,1]");
  return std::visit(
      [t](const auto& rep) -> double {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, StepFunction>)
          return rep.log_value_at(t);
        else if constexpr (std::is_same_v<T, PowerLogLog>)
          return rep.log_value_at(t);
        else
          return rep.to_step().log_value_at(t);
      },
      f);
}

double SeriesCoefficients::log_a(long j) const {
  const double dj = static_cast<double>(j);
  const double s = 0.5 * (dj + 1.0) / (dj + 1.0 + theta * std::log(dj + 2.0));
  return s * (dj - std::log(dj) - b * std::log(std::log(dj)));
}

StepFunction build_example_no_var_small(double b, double theta, long J) {
  require(b > 1.0 && b < 2.0, "example series: b must lie in (1,2)");
  require(theta > 0.0, "example series: theta must be positive");
  require(J >= 3, "example series: truncation index must be >= 3");

  const SeriesCoefficients coeff{b, theta, J};

  // u-breakpoints, ascending in t: 0, e^{-J-1}, e^{-J}, ..., e^{-2}, 1.
  std::vector<double> u_breaks;
  std::vector<double> logs;
  u_breaks.reserve(static_cast<std::size_t>(J) + 2);
  logs.reserve(static_cast<std::size_t>(J) + 1);

  u_breaks.push_back(kPosInf);
  logs.push_back(coeff.log_a(J));  // truncation cell (0, e^{-J-1}]
  for (long j = J; j >= 2; --j) {
    u_breaks.push_back(static_cast<double>(j) + 2.0);  // u(e^{-j-1}) = j+2
    logs.push_back(coeff.log_a(j));
  }
  u_breaks.push_back(3.0);  // u(e^{-2})
  logs.push_back(coeff.log_a(2));  // constant extension on (e^{-2}, 1]
  u_breaks.push_back(1.0);

  return StepFunction::from_u_cells(std::move(u_breaks), std::move(logs));
}

PowerLogLog build_example_no_rearrange(double p0, double theta, double t0) {
  require(p0 > 1.0, "example profile: p0 must exceed 1");
  require(theta > 0.0, "example profile: theta must be positive");
  require(t0 > 0.0 && t0 < 1.0, "example profile: t0 must lie in (0,1)");

  PowerLogLog f;
  f.a = 1.0 / p0;
  f.b = (theta - 1.0) / p0;
  f.c = 1.0 / p0;
  f.scale = 1.0;
  f.shift_ee = false;  // the bare loglog(e/t) factor, positive since t0 < 1
  f.valid_to = t0;

  // Shrink t0 until the profile is non-increasing on a geometric grid.
  for (int attempt = 0; attempt < 64; ++attempt) {
    bool monotone = true;
    const int n = 1000;
    const double u_start = u_of_t(f.valid_to);
    double prev = f.log_value_at_u(u_start);
    for (int k = 1; k <= n; ++k) {
      const double u = u_start + 0.05 * k;
      const double lv = f.log_value_at_u(u);
      if (lv < prev - 1e-13) {
        monotone = false;
        break;
      }
      prev = lv;
    }
    if (monotone) return f;
    f.valid_to *= 0.5;
  }
  throw std::invalid_argument("example profile: could not find a monotone t0");
}

namespace {

using nlohmann::json;

std::string read_spec_text(const std::string& text) {
  if (!text.empty() && text.front() == '{') return text;
  std::ifstream in(text);
  if (!in) throw std::invalid_argument("spec file not readable: " + text);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> as_doubles(const json& arr, const std::string& field) {
  if (!arr.is_array()) throw std::invalid_argument("spec field must be an array: " + field);
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw std::invalid_argument("spec field must be numeric: " + field);
    out.push_back(v.get<double>());
  }
  return out;
}

double as_double(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_number())
    throw std::invalid_argument("spec field missing or non-numeric: " + field);
  return j[field].get<double>();
}

}  // namespace

FunctionSpec parse_function_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(read_spec_text(text));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("function spec is not valid JSON: ") + e.what());
  }
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("function spec missing field: kind");
  const std::string kind = j["kind"].get<std::string>();

  if (kind == "step") {
    return StepFunction::from_values(as_doubles(j.value("breaks", json::array()), "breaks"),
                                     as_doubles(j.value("values", json::array()), "values"));
  }
  if (kind == "powerloglog") {
    PowerLogLog f;
    f.a = as_double(j, "a");
    f.b = as_double(j, "b");
    f.c = j.contains("c") ? as_double(j, "c") : 0.0;
    f.scale = j.contains("scale") ? as_double(j, "scale") : 1.0;
    f.valid_to = j.contains("t0") ? as_double(j, "t0") : 1.0;
    if (j.contains("shift_ee")) f.shift_ee = j["shift_ee"].get<bool>();
    if (!(f.scale > 0.0)) throw std::invalid_argument("powerloglog: scale must be positive");
    if (!(f.valid_to > 0.0 && f.valid_to <= 1.0))
      throw std::invalid_argument("powerloglog: t0 must lie in (0,1]");
    if (!f.shift_ee && f.valid_to >= 1.0)
      throw std::invalid_argument("powerloglog: bare loglog form needs t0 < 1");
    return f;
  }
  if (kind == "example-no-var-small") {
    return build_example_no_var_small(as_double(j, "b"), as_double(j, "theta"),
                                      static_cast<long>(as_double(j, "J")));
  }
  if (kind == "example-no-rearrange") {
    const double t0 = j.contains("t0") ? as_double(j, "t0") : std::exp(-2.0);
    return build_example_no_rearrange(as_double(j, "p0"), as_double(j, "theta"), t0);
  }
  if (kind == "sampled") {
    SampledFunction f;
    f.grid = as_doubles(j.value("grid", json::array()), "grid");
    f.values = as_doubles(j.value("values", json::array()), "values");
    f.to_step();  // validates
    return f;
  }
  throw std::invalid_argument("function spec: unknown kind '" + kind + "'");
}

std::string function_spec_id(const FunctionSpec& f) {
  std::ostringstream out;
  std::visit(
      [&out](const auto& rep) {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, StepFunction>) {
          out << "step[" << rep.cell_count() << " cells]";
        } else if constexpr (std::is_same_v<T, PowerLogLog>) {
          out << "powerloglog[a=" << rep.a << ",b=" << rep.b << ",c=" << rep.c
              << ",scale=" << rep.scale << ",t0=" << rep.valid_to
              << (rep.shift_ee ? "" : ",loglog(e/t)") << "]";
        } else {
          out << "sampled[" << rep.grid.size() << " points]";
        }
      },
      f);
  return out.str();
}

}  // namespace lspace

#include "lspace/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lspace/experiments.hpp"
#include "lspace/norms.hpp"
#include "lspace/report.hpp"

namespace lspace::cli {

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kAssertionFailed = 2, kInconclusive = 3 };

struct OutputSink {
  std::string path;             // empty: stdout
  std::string format = "json";  // json | csv
  bool plot_data = false;

  void write(const std::string& payload) const {
    if (path.empty()) {
      std::cout << payload;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("output path not writable: " + path);
    out << payload;
  }
};

Json growth_to_json(const GrowthReport& g) {
  Json j = Json::object();
  j.set("verdict", to_string(g.verdict));
  j.set("model", to_string(g.model));
  j.set("fit_quality", g.fit_quality);
  j.set("fitted_rate", g.fitted_rate);
  j.set("increment_exponent", g.increment_exponent);
  j.set("levels_are_log", g.levels_are_log);
  Json levels = Json::array();
  for (double x : g.levels) levels.push(x);
  j.set("levels", std::move(levels));
  Json values = Json::array();
  for (double x : g.values) values.push(x);
  j.set("values", std::move(values));
  if (!g.note.empty()) j.set("note", g.note);
  return j;
}

Json norm_result_to_json(const NormResult& r) {
  Json j = Json::object();
  j.set("value", r.infinite ? Json(nullptr) : Json(r.value));
  j.set("infinite", r.infinite);
  j.set("error_estimate", r.error_estimate);
  Json diag = Json::object();
  diag.set("iterations", static_cast<long>(r.diag.iterations));
  if (std::isfinite(r.diag.supremum_location))
    diag.set("supremum_location", r.diag.supremum_location);
  if (std::isfinite(r.diag.modular_at_norm)) diag.set("modular_at_norm", r.diag.modular_at_norm);
  if (std::isfinite(r.diag.log_value)) diag.set("log_value", r.diag.log_value);
  if (r.diag.growth) diag.set("growth", growth_to_json(*r.diag.growth));
  if (!r.diag.notes.empty()) {
    Json notes = Json::array();
    for (const auto& n : r.diag.notes) notes.push(n);
    diag.set("notes", std::move(notes));
  }
  j.set("diagnostics", std::move(diag));
  return j;
}

Json condition_to_json(const ConditionReport& c) {
  Json j = Json::object();
  j.set("holds", c.holds);
  j.set("worst_margin", c.worst_margin);
  j.set("witness_t", c.witness_t);
  j.set("grid_size", static_cast<long>(c.grid_size));
  return j;
}

Json embedding_to_json(const EmbeddingReport& r) {
  Json j = Json::object();
  j.set("function", r.function_id);
  j.set("exponent", r.exponent_id);
  j.set("theta", r.theta);
  Json norms = Json::array();
  for (const auto& n : r.norms) {
    Json row = Json::object();
    row.set("label", n.label);
    row.set("value", n.infinite ? Json(nullptr) : Json(n.value));
    row.set("infinite", n.infinite);
    norms.push(std::move(row));
  }
  j.set("norms", std::move(norms));
  Json memberships = Json::array();
  for (const auto& m : r.memberships) {
    Json row = Json::object();
    row.set("label", m.label);
    row.set("growth", growth_to_json(m.growth));
    memberships.push(std::move(row));
  }
  j.set("memberships", std::move(memberships));
  Json conditions = Json::array();
  for (const auto& c : r.conditions) {
    Json row = Json::object();
    row.set("label", c.label);
    row.set("report", condition_to_json(c.report));
    conditions.push(std::move(row));
  }
  j.set("conditions", std::move(conditions));
  Json metrics = Json::array();
  for (const auto& m : r.metrics) {
    Json row = Json::object();
    row.set("label", m.label);
    row.set("value", m.value);
    metrics.push(std::move(row));
  }
  j.set("metrics", std::move(metrics));
  j.set("inconclusive", r.inconclusive);
  j.set("assertions_ok", r.assertions_ok);
  Json notes = Json::array();
  for (const auto& n : r.notes) notes.push(n);
  j.set("notes", std::move(notes));
  return j;
}

std::string json_payload(Json j) { return j.dump(); }

int report_exit(bool assertions_ok, bool inconclusive) {
  if (inconclusive) return kInconclusive;
  return assertions_ok ? kOk : kAssertionFailed;
}

std::vector<std::vector<std::string>> growth_rows(const GrowthReport& g) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < g.levels.size(); ++i)
    rows.push_back({csv_cell(g.levels[i]), csv_cell(g.values[i])});
  return rows;
}

double env_default_tol() {
  if (const char* env = std::getenv("LSPACE_TOL")) {
    try {
      const double v = std::stod(env);
      if (v > 0.0 && v < 1.0) return v;
    } catch (...) {
    }
  }
  return 1e-9;
}

// --------------------------- norm command ---------------------------------

int run_norm(const std::string& space, const std::string& function_spec,
             const std::string& exponent_spec, const std::string& sigma_spec, double p,
             double theta, double lambda, double tol, const OutputSink& sink) {
  const FunctionSpec f = parse_function_spec(function_spec);
  NormOptions opt;
  opt.tol = tol;
  NormResult result;

  if (space == "lp") {
    result = lp_norm(f, p, opt);
  } else if (space == "grand") {
    result = grand_norm_def(f, {p, theta}, opt);
  } else if (space == "grand-rearr") {
    result = grand_norm_rearr(f, {p, theta}, opt);
  } else if (space == "small") {
    result = small_norm(f, {p, theta}, opt);
  } else if (space == "variable" || space == "variable-modular") {
    if (exponent_spec.empty())
      throw std::invalid_argument("norm: --exponent is required for variable spaces");
    const ExponentSpec pe = parse_exponent_spec(exponent_spec);
    result = space == "variable" ? luxemburg_norm(f, pe, opt)
                                 : variable_modular(f, pe, lambda, opt);
  } else if (space == "musielak" || space == "musielak-modular") {
    if (exponent_spec.empty())
      throw std::invalid_argument("norm: --exponent is required for musielak spaces");
    MusielakParams mp{parse_exponent_spec(exponent_spec),
                      sigma_spec.empty() ? SigmaSpec{SigmaConstant{0.0}}
                                         : parse_sigma_spec(sigma_spec)};
    result = space == "musielak" ? musielak_norm(f, mp, opt)
                                 : musielak_modular(f, mp, lambda, opt);
  } else {
    throw std::invalid_argument("norm: unknown space '" + space + "'");
  }

  if (sink.format == "csv") {
    std::vector<std::string> header{"quantity (name)", "value (dimensionless)"};
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"norm_or_modular", result.infinite ? "inf" : csv_cell(result.value)});
    rows.push_back({"error_estimate", csv_cell(result.error_estimate)});
    if (sink.plot_data && result.diag.growth) {
      rows.push_back({"-- sweep level", "partial value"});
      for (auto& row : growth_rows(*result.diag.growth)) rows.push_back(row);
    }
    sink.write(to_csv(header, rows));
  } else {
    Json j = Json::object();
    j.set("command", "norm");
    j.set("space", space);
    Json params = Json::object();
    params.set("p", p);
    params.set("theta", theta);
    if (space == "variable-modular" || space == "musielak-modular") params.set("lambda", lambda);
    params.set("tol", tol);
    j.set("params", std::move(params));
    j.set("function", function_spec_id(f));
    j.set("result", norm_result_to_json(result));
    if (sink.plot_data) {
      Json plot = Json::array();
      for (int k = 0; k <= 256; ++k) {
        const double u = 1.0 + 27.0 * k / 256.0;
        const double t = t_of_u(u);
        Json pt = Json::array();
        pt.push(t);
        pt.push(evaluate(f, t));
        plot.push(std::move(pt));
      }
      j.set("plot_data", std::move(plot));
    }
    sink.write(json_payload(std::move(j)));
  }
  return kOk;
}

// ------------------------- rearrange command -------------------------------

int run_rearrange(const std::string& function_spec, bool increasing, const OutputSink& sink) {
  const FunctionSpec f = parse_function_spec(function_spec);
  const RearrangedFunction r = increasing ? increasing_rearrangement(f)
                                          : decreasing_rearrangement(f);

  // Graded samples of the rearranged profile.
  std::vector<std::pair<double, double>> samples;
  for (int k = 0; k <= 128; ++k) {
    const double u = 1.0 + 26.0 * k / 128.0;
    const double t = t_of_u(u);
    samples.emplace_back(t, r.value_at(t));
  }

  if (sink.format == "csv") {
    std::vector<std::string> header{"t (dimensionless)", "rearranged_value (dimensionless)"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& [t, v] : samples) rows.push_back({csv_cell(t), csv_cell(v)});
    sink.write(to_csv(header, rows));
    return kOk;
  }

  Json j = Json::object();
  j.set("command", "rearrange");
  j.set("direction", increasing ? "increasing" : "decreasing");
  j.set("source", function_spec_id(f));
  if (const StepFunction* step = r.as_step()) {
    Json rep = Json::object();
    rep.set("kind", "step");
    Json breaks = Json::array();
    for (double b : step->breaks()) breaks.push(b);
    rep.set("breaks", std::move(breaks));
    Json values = Json::array();
    for (double lv : step->log_values()) {
      const double v = std::exp(lv);
      values.push(std::isfinite(v) ? Json(v) : Json(nullptr));
    }
    rep.set("values", std::move(values));
    Json logv = Json::array();
    for (double lv : step->log_values()) logv.push(lv == kNegInf ? Json(nullptr) : Json(lv));
    rep.set("log_values", std::move(logv));
    j.set("representation", std::move(rep));
  } else {
    Json rep = Json::object();
    rep.set("kind", "analytic");
    rep.set("id", function_spec_id(r.representation));
    rep.set("reflected", r.reflected);
    j.set("representation", std::move(rep));
  }
  if (sink.plot_data) {
    Json plot = Json::array();
    for (const auto& [t, v] : samples) {
      Json pt = Json::array();
      pt.push(t);
      pt.push(v);
      plot.push(std::move(pt));
    }
    j.set("plot_data", std::move(plot));
  }
  sink.write(json_payload(std::move(j)));
  return kOk;
}

// --------------------------- check command ---------------------------------

int run_check(const std::string& kind_name, const std::string& exponent_spec,
              const ConditionParams& params, std::size_t grid_points, const OutputSink& sink) {
  const auto kind = condition_kind_from_string(kind_name);
  if (!kind) throw std::invalid_argument("check: unknown kind '" + kind_name + "'");
  const ExponentSpec p = parse_exponent_spec(exponent_spec);
  std::vector<std::pair<double, double>> margins;
  const ConditionReport rep =
      check_condition(p, *kind, params, grid_points, sink.plot_data ? &margins : nullptr);

  if (sink.format == "csv") {
    std::vector<std::string> header{"quantity (name)", "value (dimensionless)"};
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"holds", rep.holds ? "1" : "0"});
    rows.push_back({"worst_margin", csv_cell(rep.worst_margin)});
    rows.push_back({"witness_t", csv_cell(rep.witness_t)});
    if (sink.plot_data) {
      rows.push_back({"-- t", "margin"});
      for (const auto& [t, m] : margins) rows.push_back({csv_cell(t), csv_cell(m)});
    }
    sink.write(to_csv(header, rows));
  } else {
    Json j = Json::object();
    j.set("command", "check");
    j.set("kind", kind_name);
    j.set("exponent", p.id());
    Json prm = Json::object();
    prm.set("theta", params.theta);
    prm.set("eps", params.eps);
    prm.set("A", params.A);
    prm.set("B", params.B);
    prm.set("t0", params.t0);
    if (params.sigma) prm.set("sigma", sigma_spec_id(*params.sigma));
    j.set("params", std::move(prm));
    j.set("report", condition_to_json(rep));
    if (sink.plot_data) {
      Json plot = Json::array();
      for (const auto& [t, m] : margins) {
        Json pt = Json::array();
        pt.push(t);
        pt.push(m);
        plot.push(std::move(pt));
      }
      j.set("plot_data", std::move(plot));
    }
    sink.write(json_payload(std::move(j)));
  }
  return rep.holds ? kOk : kAssertionFailed;
}

// --------------------------- sweep command ---------------------------------

int run_sweep(const std::string& kind_name, const std::string& exponent_spec,
              const std::vector<double>& theta_grid, const std::vector<double>& eps_grid,
              const std::vector<double>& a_grid, const std::vector<double>& b_grid, double t0,
              const std::string& sigma_spec, std::size_t grid_points, const OutputSink& sink) {
  const auto kind = condition_kind_from_string(kind_name);
  if (!kind) throw std::invalid_argument("sweep: unknown kind '" + kind_name + "'");
  const ExponentSpec p = parse_exponent_spec(exponent_spec);
  std::optional<SigmaSpec> sigma;
  if (!sigma_spec.empty()) sigma = parse_sigma_spec(sigma_spec);

  const auto axis = [](const std::vector<double>& grid) {
    return grid.empty() ? std::vector<double>{0.0} : grid;
  };
  Json rows = Json::array();
  std::vector<std::vector<std::string>> csv_rows;
  for (double theta : axis(theta_grid))
    for (double eps : axis(eps_grid))
      for (double a : axis(a_grid))
        for (double b : axis(b_grid)) {
          ConditionParams prm;
          prm.theta = theta;
          prm.eps = eps;
          prm.A = a;
          prm.B = b;
          prm.t0 = t0;
          prm.sigma = sigma;
          const ConditionReport rep = check_condition(p, *kind, prm, grid_points);
          Json row = Json::object();
          row.set("theta", theta);
          row.set("eps", eps);
          row.set("A", a);
          row.set("B", b);
          row.set("holds", rep.holds);
          row.set("worst_margin", rep.worst_margin);
          row.set("witness_t", rep.witness_t);
          rows.push(std::move(row));
          csv_rows.push_back({csv_cell(theta), csv_cell(eps), csv_cell(a), csv_cell(b),
                              rep.holds ? "1" : "0", csv_cell(rep.worst_margin),
                              csv_cell(rep.witness_t)});
        }

  if (sink.format == "csv") {
    sink.write(to_csv({"theta (dimensionless)", "eps (dimensionless)", "A (dimensionless)",
                       "B (dimensionless)", "holds (0/1)", "worst_margin (dimensionless)",
                       "witness_t (dimensionless)"},
                      csv_rows));
  } else {
    Json j = Json::object();
    j.set("command", "sweep");
    j.set("kind", kind_name);
    j.set("exponent", p.id());
    j.set("t0", t0);
    j.set("rows", std::move(rows));
    sink.write(json_payload(std::move(j)));
  }
  return kOk;
}

// ------------------------- reproduce command --------------------------------

int emit_embedding(const EmbeddingReport& rep, const std::string& subcommand,
                   const OutputSink& sink) {
  if (sink.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : rep.memberships)
      for (std::size_t i = 0; i < m.growth.levels.size(); ++i)
        rows.push_back({m.label, csv_cell(m.growth.levels[i]), csv_cell(m.growth.values[i]),
                        to_string(m.growth.verdict)});
    sink.write(to_csv({"sweep (name)", "level (count)", "value (dimensionless)",
                       "verdict (label)"},
                      rows));
  } else {
    Json j = Json::object();
    j.set("command", "reproduce");
    j.set("subcommand", subcommand);
    j.set("report", embedding_to_json(rep));
    sink.write(json_payload(std::move(j)));
  }
  return report_exit(rep.assertions_ok, rep.inconclusive);
}

int run_reproduce_frs(std::uint64_t seed, std::size_t count, bool constant_exponents,
                      bool with_anomaly, const OutputSink& sink) {
  std::vector<CorpusMember> corpus = make_step_corpus(seed, count, constant_exponents);
  if (with_anomaly) {
    // u in L^{p(.)} whose rearrangement leaves L^{p_*(.)}: the singular mass
    // sits where the exponent is small, the rearranged exponent is large.
    PowerLogLog u;
    u.a = 1.0 / 3.0;
    ExponentSpec p(StepFunction::from_values({0.0, 0.5, 1.0}, {2.0, 4.0}));
    corpus.push_back({"planted-anomaly", u, p});
  }
  const FRSReport rep = frs_inequality_check(corpus);

  if (sink.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
      rows.push_back({r.id, csv_cell(r.norm_var), csv_cell(r.norm_star_up),
                      r.star_infinite ? "inf" : csv_cell(r.norm_star), csv_cell(r.r1),
                      csv_cell(r.r2)});
    sink.write(to_csv({"member (id)", "norm_var (dimensionless)", "norm_star_up (dimensionless)",
                       "norm_star (dimensionless)", "r1 (ratio)", "r2 (ratio)"},
                      rows));
  } else {
    Json j = Json::object();
    j.set("command", "reproduce");
    j.set("subcommand", "frs");
    j.set("seed", static_cast<long>(seed));
    j.set("count", static_cast<long>(count));
    j.set("constant_exponents", constant_exponents);
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
      Json row = Json::object();
      row.set("id", r.id);
      row.set("norm_var", r.norm_var);
      row.set("norm_star_up", r.norm_star_up);
      row.set("norm_star", r.star_infinite ? Json(nullptr) : Json(r.norm_star));
      row.set("star_infinite", r.star_infinite);
      row.set("r1", std::isfinite(r.r1) ? Json(r.r1) : Json(nullptr));
      row.set("r2", std::isfinite(r.r2) ? Json(r.r2) : Json(nullptr));
      rows.push(std::move(row));
    }
    j.set("rows", std::move(rows));
    Json env = Json::object();
    env.set("r1_min", rep.r1_min);
    env.set("r1_max", rep.r1_max);
    env.set("r2_min", rep.r2_min);
    env.set("r2_max", rep.r2_max);
    env.set("anomalies", static_cast<long>(rep.anomalies));
    j.set("envelope", std::move(env));
    sink.write(json_payload(std::move(j)));
  }
  return kOk;
}

int run_reproduce_chain(const std::string& function_spec, double p, double theta,
                        std::vector<double> eps_grid, const OutputSink& sink) {
  const FunctionSpec f = parse_function_spec(function_spec);
  if (eps_grid.empty()) {
    for (int k = 1; k <= 50; ++k) eps_grid.push_back((p - 1.0) * k / 51.0);
  }
  const ChainReport rep = embedding_chain_check(f, p, theta, eps_grid);

  if (sink.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
      rows.push_back({csv_cell(r.eps), csv_cell(r.lhs), csv_cell(r.bound), r.holds ? "1" : "0"});
    sink.write(to_csv({"eps (dimensionless)", "lp_norm (dimensionless)",
                       "bound (dimensionless)", "holds (0/1)"},
                      rows));
  } else {
    Json j = Json::object();
    j.set("command", "reproduce");
    j.set("subcommand", "chain");
    j.set("function", rep.function_id);
    j.set("p", rep.p);
    j.set("theta", rep.theta);
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
      Json row = Json::object();
      row.set("eps", r.eps);
      row.set("lp_norm", r.lhs);
      row.set("bound", r.bound);
      row.set("holds", r.holds);
      rows.push(std::move(row));
    }
    j.set("rows", std::move(rows));
    j.set("small_finite", rep.small_finite);
    j.set("lp_finite", rep.lp_finite);
    j.set("grand_finite", rep.grand_finite);
    j.set("chain_consistent", rep.chain_consistent);
    j.set("all_hold", rep.all_hold);
    sink.write(json_payload(std::move(j)));
  }
  return rep.all_hold && rep.chain_consistent ? kOk : kAssertionFailed;
}

int run_reproduce_pointwise(const std::string& function_spec, const std::string& exponent_spec,
                            const std::string& sigma_spec, double theta, std::size_t grid_points,
                            const OutputSink& sink) {
  const FunctionSpec u = parse_function_spec(function_spec);
  const ExponentSpec p = parse_exponent_spec(exponent_spec);
  std::optional<SigmaSpec> sigma;
  if (!sigma_spec.empty()) sigma = parse_sigma_spec(sigma_spec);
  const PointwiseBoundReport rep = pointwise_bound_check(u, p, sigma, theta, grid_points);

  if (sink.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"c_variable", csv_cell(rep.c_variable)});
    rows.push_back({"c_final", csv_cell(rep.c_final)});
    rows.push_back({"a_hat", csv_cell(rep.a_hat)});
    rows.push_back({"b_hat", csv_cell(rep.b_hat)});
    rows.push_back({"modular", csv_cell(rep.modular)});
    rows.push_back({"grand_norm", rep.grand.infinite ? "inf" : csv_cell(rep.grand.value)});
    sink.write(to_csv({"quantity (name)", "value (dimensionless)"}, rows));
  } else {
    Json j = Json::object();
    j.set("command", "reproduce");
    j.set("subcommand", "pointwise-bound");
    j.set("function", rep.function_id);
    j.set("exponent", rep.exponent_id);
    j.set("sigma", rep.sigma_id);
    j.set("theta", rep.theta);
    j.set("sigma0", rep.sigma0);
    j.set("modular", rep.modular);
    j.set("c_variable", rep.c_variable);
    j.set("c_final", rep.c_final);
    j.set("a_hat", rep.a_hat);
    j.set("b_hat", rep.b_hat);
    j.set("log_exponent_max", rep.log_exponent_max);
    j.set("conditions_hold", rep.conditions_hold);
    j.set("grid_size", static_cast<long>(rep.grid_size));
    Json grand = Json::object();
    grand.set("label", rep.grand.label);
    grand.set("value", rep.grand.infinite ? Json(nullptr) : Json(rep.grand.value));
    grand.set("infinite", rep.grand.infinite);
    j.set("grand", std::move(grand));
    sink.write(json_payload(std::move(j)));
  }
  const bool ok = std::isfinite(rep.c_variable) && std::isfinite(rep.c_final) &&
                  !rep.grand.infinite && rep.log_exponent_max <= 1e-12;
  return ok ? kOk : kAssertionFailed;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"numerical toolkit for grand, small, and variable Lebesgue spaces on (0,1]"};
  app.require_subcommand(1);

  OutputSink sink;
  double tol = env_default_tol();
  app.add_option("--tol", tol, "absolute quadrature tolerance");
  app.add_option("--out", sink.path, "output file (default: stdout)");
  app.add_option("--format", sink.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--plot-data", sink.plot_data, "emit (x,y) columns for external plotting");

  // norm ---------------------------------------------------------------
  auto* norm = app.add_subcommand("norm", "compute a norm or modular");
  std::string space = "lp", function_spec, exponent_spec, sigma_spec;
  double p = 2.0, theta = 1.0, lambda = 1.0;
  norm->add_option("--space", space,
                   "lp | variable | variable-modular | grand | grand-rearr | small | musielak | "
                   "musielak-modular")
      ->required();
  norm->add_option("--function", function_spec, "function spec (inline JSON or path)")
      ->required();
  norm->add_option("--exponent", exponent_spec, "exponent spec (variable/musielak spaces)");
  norm->add_option("--sigma", sigma_spec, "sigma spec (musielak spaces)");
  norm->add_option("--p", p, "classical/grand/small exponent p");
  norm->add_option("--theta", theta, "grand/small parameter theta");
  norm->add_option("--lambda", lambda, "scaling for modular evaluation");

  // rearrange ----------------------------------------------------------
  auto* rearr = app.add_subcommand("rearrange", "decreasing/increasing rearrangement");
  std::string rearr_function;
  bool increasing = false;
  rearr->add_option("--function", rearr_function, "function spec")->required();
  rearr->add_flag("--increasing", increasing, "emit the increasing rearrangement");

  // check ----------------------------------------------------------------
  auto* check = app.add_subcommand("check", "embedding-condition checker");
  std::string check_kind, check_exponent, check_sigma;
  ConditionParams check_params;
  std::size_t check_grid = 2048;
  check->add_option("--kind", check_kind,
                    "var-small | grand-var | weaker-var-small | no-var-small | rearranged | "
                    "no-rearrange | gen-orlicz-sigma | gen-orlicz-p")
      ->required();
  check->add_option("--exponent", check_exponent, "exponent spec")->required();
  check->add_option("--theta", check_params.theta, "theta");
  check->add_option("--eps", check_params.eps, "eps");
  check->add_option("--A", check_params.A, "A");
  check->add_option("--B", check_params.B, "B");
  check->add_option("--t0", check_params.t0, "condition domain (0, t0]");
  check->add_option("--sigma", check_sigma, "sigma spec for the gen-orlicz kinds");
  check->add_option("--grid-points", check_grid, "geometric grid size");

  // sweep ----------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "checker over a parameter grid");
  std::string sweep_kind, sweep_exponent, sweep_sigma;
  std::vector<double> theta_grid, eps_grid, a_grid, b_grid;
  double sweep_t0 = std::exp(-2.0);
  std::size_t sweep_grid_points = 2048;
  sweep->add_option("--kind", sweep_kind, "condition kind")->required();
  sweep->add_option("--exponent", sweep_exponent, "exponent spec")->required();
  sweep->add_option("--theta-grid", theta_grid, "theta values")->delimiter(',');
  sweep->add_option("--eps-grid", eps_grid, "eps values")->delimiter(',');
  sweep->add_option("--A-grid", a_grid, "A values")->delimiter(',');
  sweep->add_option("--B-grid", b_grid, "B values")->delimiter(',');
  sweep->add_option("--t0", sweep_t0, "condition domain (0, t0]");
  sweep->add_option("--sigma", sweep_sigma, "sigma spec");
  sweep->add_option("--grid-points", sweep_grid_points, "geometric grid size");

  // reproduce -------------------------------------------------------------
  auto* reproduce = app.add_subcommand("reproduce", "end-to-end reproductions");
  reproduce->require_subcommand(1);

  auto* rnvs = reproduce->add_subcommand("no-var-small", "step-series sharpness example");
  double rb = 1.5, rtheta = 1.0, rbase = 2.0;
  std::vector<long> rlevels{1000, 10000, 100000, 1000000};
  std::vector<double> reps_probes{0.01, 0.1};
  rnvs->add_option("--b", rb, "series parameter b in (1,2)")->required();
  rnvs->add_option("--theta", rtheta, "theta")->required();
  rnvs->add_option("--levels", rlevels, "truncation levels")->delimiter(',');
  rnvs->add_option("--base", rbase, "exponent base value");
  rnvs->add_option("--eps", reps_probes, "eps probes for the failing condition")->delimiter(',');

  auto* rnr = reproduce->add_subcommand("no-rearrange", "decreasing-profile sharpness example");
  double np0 = 2.0, ntheta = 1.0, neps = 0.5;
  rnr->add_option("--p0", np0, "p_*(0)")->required();
  rnr->add_option("--theta", ntheta, "theta")->required();
  rnr->add_option("--eps", neps, "eps")->required();

  auto* rfrs = reproduce->add_subcommand("frs", "rearranged-norm sandwich over a corpus");
  std::uint64_t frs_seed = 20250810;
  std::size_t frs_count = 30;
  bool frs_constant = false, frs_no_anomaly = false;
  rfrs->add_option("--seed", frs_seed, "corpus seed");
  rfrs->add_option("--count", frs_count, "corpus size");
  rfrs->add_flag("--constant-exponents", frs_constant, "draw constant exponents");
  rfrs->add_flag("--no-anomaly", frs_no_anomaly, "skip the planted anomaly member");

  auto* rchain = reproduce->add_subcommand("chain", "grand/small embedding chain");
  std::string chain_function;
  double chain_p = 2.0, chain_theta = 1.0;
  std::vector<double> chain_eps;
  rchain->add_option("--function", chain_function, "function spec")->required();
  rchain->add_option("--p", chain_p, "p")->required();
  rchain->add_option("--theta", chain_theta, "theta")->required();
  rchain->add_option("--eps-grid", chain_eps, "eps grid (default: 50 points)")->delimiter(',');

  auto* rpb = reproduce->add_subcommand("pointwise-bound", "pointwise domination constants");
  std::string pb_function, pb_exponent, pb_sigma;
  double pb_theta = 1.0;
  std::size_t pb_grid = 2048;
  rpb->add_option("--function", pb_function, "function spec")->required();
  rpb->add_option("--exponent", pb_exponent, "exponent spec")->required();
  rpb->add_option("--sigma", pb_sigma, "sigma spec (omit for the sigma = 0 path)");
  rpb->add_option("--theta", pb_theta, "theta")->required();
  rpb->add_option("--grid-points", pb_grid, "bound grid size");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (norm->parsed())
      return run_norm(space, function_spec, exponent_spec, sigma_spec, p, theta, lambda, tol,
                      sink);
    if (rearr->parsed()) return run_rearrange(rearr_function, increasing, sink);
    if (check->parsed()) {
      if (!check_sigma.empty()) check_params.sigma = parse_sigma_spec(check_sigma);
      return run_check(check_kind, check_exponent, check_params, check_grid, sink);
    }
    if (sweep->parsed())
      return run_sweep(sweep_kind, sweep_exponent, theta_grid, eps_grid, a_grid, b_grid,
                       sweep_t0, sweep_sigma, sweep_grid_points, sink);
    if (reproduce->parsed()) {
      if (rnvs->parsed())
        return emit_embedding(reproduce_no_var_small(rb, rtheta, rlevels, rbase, reps_probes),
                              "no-var-small", sink);
      if (rnr->parsed())
        return emit_embedding(reproduce_no_rearrange(np0, ntheta, neps), "no-rearrange", sink);
      if (rfrs->parsed())
        return run_reproduce_frs(frs_seed, frs_count, frs_constant, !frs_no_anomaly, sink);
      if (rchain->parsed())
        return run_reproduce_chain(chain_function, chain_p, chain_theta, chain_eps, sink);
      if (rpb->parsed())
        return run_reproduce_pointwise(pb_function, pb_exponent, pb_sigma, pb_theta, pb_grid,
                                       sink);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace lspace::cli

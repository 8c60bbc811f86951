#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lspace/exponents.hpp"
#include "lspace/norms.hpp"

namespace lspace {

struct LabeledValue {
  std::string label;
  double value = 0.0;
};

struct NormSummary {
  std::string label;
  double value = 0.0;
  bool infinite = false;
};

struct MembershipVerdict {
  std::string label;
  GrowthReport growth;
};

struct LabeledCondition {
  std::string label;
  ConditionReport report;
};

/// Shared result shell for the end-to-end reproductions.
struct EmbeddingReport {
  std::string function_id;
  std::string exponent_id;
  double theta = 0.0;
  std::vector<NormSummary> norms;
  std::vector<MembershipVerdict> memberships;
  std::vector<LabeledCondition> conditions;
  std::vector<LabeledValue> metrics;
  bool inconclusive = false;
  bool assertions_ok = true;
  std::vector<std::string> notes;
};

/// Step-series family: convergent variable modular, divergent small norm,
/// with the example-side condition holding and the embedding condition
/// failing for every tested eps.
EmbeddingReport reproduce_no_var_small(double b, double theta, const std::vector<long>& j_levels,
                                       double base = 2.0,
                                       const std::vector<double>& eps_probes = {0.01, 0.1});

/// Decreasing-profile family: convergent modular against the extremal
/// rearranged exponent, with the truncated grand-norm bracket growing like
/// an iterated logarithm.
EmbeddingReport reproduce_no_rearrange(double p0, double theta, double eps,
                                       const std::vector<double>& sweep_u = {10, 15, 20, 25, 30,
                                                                             35, 40});

struct ChainReport {
  struct Row {
    double eps = 0.0;
    double lhs = 0.0;    // ||f||_{p-eps}
    double bound = 0.0;  // eps^{-theta/(p-eps)} ||f||_{p),theta}
    bool holds = false;
  };
  std::string function_id;
  double p = 0.0;
  double theta = 0.0;
  std::vector<Row> rows;
  bool small_finite = false, lp_finite = false, grand_finite = false;
  bool chain_consistent = false;  // finite-small => finite-lp => finite-grand
  bool all_hold = false;
};

ChainReport embedding_chain_check(const FunctionSpec& f, double p, double theta,
                                  const std::vector<double>& eps_grid);

struct CorpusMember {
  std::string id;
  FunctionSpec u;
  ExponentSpec p;
};

/// Deterministic random step corpus; constant_exponents draws p(.) constant.
std::vector<CorpusMember> make_step_corpus(std::uint64_t seed, std::size_t count,
                                           bool constant_exponents);

struct FRSReport {
  struct Row {
    std::string id;
    double norm_var = 0.0;       // ||u||_{p(.)}
    double norm_star_up = 0.0;   // ||u_*||_{p^*(.)}
    double norm_star = 0.0;      // ||u_*||_{p_*(.)}
    bool star_infinite = false;  // ||u_*||_{p_*(.)} = +inf
    double r1 = kNaN;            // norm_star_up / norm_var
    double r2 = kNaN;            // norm_var / norm_star
  };
  std::vector<Row> rows;
  double r1_min = kPosInf, r1_max = kNegInf;
  double r2_min = kPosInf, r2_max = kNegInf;
  std::size_t anomalies = 0;  // finite ||u||_{p(.)} with infinite ||u_*||_{p_*(.)}
};

FRSReport frs_inequality_check(const std::vector<CorpusMember>& corpus);

struct PointwiseBoundReport {
  std::string function_id;
  std::string exponent_id;
  std::string sigma_id;
  double theta = 0.0;
  double modular = 0.0;             // rho(u_*) at lambda = 1
  double c_variable = 0.0;          // minimal C vs (e/t)^{1/p_*(t)} log^{-sigma/p_*} bound
  double c_final = 0.0;             // minimal C vs (e/t)^{1/p_*(0)} log^{(theta-1)/p_*(0)}
  double a_hat = 0.0;               // empirical A in the rearranged condition
  double b_hat = 0.0;               // empirical B in the sigma condition
  double sigma0 = 0.0;
  double log_exponent_max = 0.0;    // max over grid of sigma(t)(1/p_*(0) - 1/p_*(t))
  NormSummary grand;                // grand norm of u_* at (p_+, theta)
  std::size_t grid_size = 0;
  bool conditions_hold = false;
};

/// Minimal pointwise domination constants for a rearranged profile, the
/// empirical condition constants, and the grand-norm membership they imply.
PointwiseBoundReport pointwise_bound_check(const FunctionSpec& u, const ExponentSpec& p,
                                           const std::optional<SigmaSpec>& sigma, double theta,
                                           std::size_t grid_points = 2048);

/// The extremal decreasing exponent with equality in the rearranged-side
/// condition: 1/p(t) = 1/base + (A + D loglog(e/t))/log(e/t).
ExponentSpec extremal_rearranged_exponent(double base, double A, double coeff_loglog,
                                          double t0 = 0.1353352832366127);

}  // namespace lspace

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lspace/exponents.hpp"
#include "lspace/function.hpp"
#include "lspace/quadrature.hpp"
#include "lspace/rearrange.hpp"

namespace lspace {

struct GrandParams {
  double p = 2.0;
  double theta = 1.0;  // theta = 0 degenerates to classical L^p
};

struct MusielakParams {
  ExponentSpec p_star;  // plays the decreasing-rearrangement role
  SigmaSpec sigma_star = SigmaConstant{0.0};
};

struct NormOptions {
  double tol = 1e-9;
};

struct NormDiagnostics {
  int iterations = 0;                  // bisection iterations, when applicable
  double supremum_location = kNaN;     // maximizing epsilon or t
  double modular_at_norm = kNaN;       // rho(f/lambda*) for Luxemburg norms
  double log_value = kNaN;             // log of the value, for overflow-prone modulars
  std::optional<GrowthReport> growth;  // attached when a divergence sweep ran
  std::vector<std::string> notes;
};

struct NormResult {
  double value = 0.0;
  bool infinite = false;  // set iff a divergence verdict was produced
  double error_estimate = 0.0;
  NormDiagnostics diag;
};

/// (∫ f^p)^(1/p); exact on step input, graded quadrature otherwise.
NormResult lp_norm(const FunctionSpec& f, double p, const NormOptions& opt = {});

/// rho(f/lambda) = ∫ (f/lambda)^{p(t)} dt.
NormResult variable_modular(const FunctionSpec& f, const ExponentSpec& p, double lambda,
                            const NormOptions& opt = {});

/// inf{lambda > 0 : rho(f/lambda) <= 1} by bisection on the monotone modular.
NormResult luxemburg_norm(const FunctionSpec& f, const ExponentSpec& p,
                          const NormOptions& opt = {});

/// sup over 0 < eps < p-1 of (eps^theta ∫ f^{p-eps})^{1/(p-eps)}.
NormResult grand_norm_def(const FunctionSpec& f, const GrandParams& gp,
                          const NormOptions& opt = {});

/// sup over 0 < t < 1 of log(e/t)^{-theta/p} (∫_t^1 f_*^p)^{1/p}.
NormResult grand_norm_rearr(const FunctionSpec& f, const GrandParams& gp,
                            const NormOptions& opt = {});

/// ∫_0^1 log(e/t)^{theta/p'-1} (∫_0^t f_*^p)^{1/p} dt/t.
NormResult small_norm(const FunctionSpec& f, const GrandParams& gp,
                      const NormOptions& opt = {});

/// ∫ (f/lambda)^{p_*(t)} log(e + f/lambda)^{sigma_*(t)} dt.
NormResult musielak_modular(const FunctionSpec& f, const MusielakParams& mp, double lambda,
                            const NormOptions& opt = {});

/// Luxemburg construction over the Musielak modular.
NormResult musielak_norm(const FunctionSpec& f, const MusielakParams& mp,
                         const NormOptions& opt = {});

/// ∫ f g dt; +inf on divergence.
double holder_pairing(const FunctionSpec& f, const FunctionSpec& g,
                      const NormOptions& opt = {});

}  // namespace lspace

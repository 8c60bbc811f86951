#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "lspace/norms.hpp"

using namespace lspace;

namespace {

FunctionSpec indicator(double a) {
  return StepFunction::from_values({0.0, a, 1.0}, {1.0, 0.0});
}

FunctionSpec constant_fn(double c) { return StepFunction::from_values({0.0, 1.0}, {c}); }

StepFunction random_step(std::mt19937_64& rng, std::size_t cells) {
  std::vector<double> breaks{0.0};
  while (breaks.size() < cells) {
    const double t = 0.05 + 0.9 * uniform01(rng);
    bool ok = true;
    for (double b : breaks)
      if (std::abs(b - t) < 1e-4) ok = false;
    if (ok) breaks.push_back(t);
  }
  breaks.push_back(1.0);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> values(cells);
  for (double& v : values) v = 0.1 + 5.0 * uniform01(rng);
  return StepFunction::from_values(breaks, values);
}

// Independent log-space oracle for the series coefficients.
double oracle_log_a(long j, double b, double theta) {
  const double dj = static_cast<double>(j);
  const double s = 0.5 * (dj + 1.0) / (dj + 1.0 + theta * std::log(dj + 2.0));
  return s * (dj - std::log(dj) - b * std::log(std::log(dj)));
}

}  // namespace

TEST_CASE("classical norm") {
  SUBCASE("indicator") {
    for (double p : {1.0, 2.0, 3.7})
      CHECK(lp_norm(indicator(0.4), p).value ==
            doctest::Approx(std::pow(0.4, 1.0 / p)).epsilon(1e-13));
  }
  SUBCASE("integrable power profile") {
    const FunctionSpec f = PowerLogLog{0.25, 0.0, 0.0, 1.0, 1.0, true};
    CHECK(lp_norm(f, 2.0).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  }
  SUBCASE("non-integrable power profile flags +inf") {
    const FunctionSpec f = PowerLogLog{0.5, 0.0, 0.0, 1.0, 1.0, true};
    const NormResult r = lp_norm(f, 2.0);
    CHECK(r.infinite);
    REQUIRE(r.diag.growth.has_value());
    CHECK(r.diag.growth->verdict == GrowthReport::Verdict::divergent);
  }
  SUBCASE("p below 1 is rejected") {
    CHECK_THROWS_AS(lp_norm(indicator(0.5), 0.5), std::invalid_argument);
  }
}

TEST_CASE("variable modular") {
  SUBCASE("constant function at lambda = value gives 1") {
    const ExponentSpec p = exponent_for_theta(1.0, 2.0);
    CHECK(variable_modular(constant_fn(3.3), p, 3.3).value ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("indicator against a constant exponent") {
    const ExponentSpec p = ExponentSpec::constant(2.0);
    CHECK(variable_modular(indicator(0.3), p, 0.5).value ==
          doctest::Approx(4.0 * 0.3).epsilon(1e-13));
  }
  SUBCASE("series example modular matches a direct cellwise oracle to 1%") {
    const double b = 1.5, theta = 1.0;
    const long J = 10000;
    const StepFunction f = build_example_no_var_small(b, theta, J);
    const ExponentSpec p = exponent_for_theta(theta, 2.0);
    const double computed = variable_modular(f, p, 1.0).value;

    // Oracle: Simpson in t over each geometric cell, with the exponent and
    // the coefficients written out directly; everything in log space.
    const auto p_of_t = [theta](double t) {
      const double u = 1.0 - std::log(t);
      return 2.0 + 2.0 * theta * std::log(u) / u;
    };
    double acc = kNegInf;
    // head cell (e^-2, 1]: integrand constant in the function value
    {
      const double la = oracle_log_a(2, b, theta);
      const double t1 = std::exp(-2.0);
      // Simpson on [t1, 1]
      const double lg1 = p_of_t(t1) * la, lgm = p_of_t(0.5 * (1 + t1)) * la,
                   lg3 = p_of_t(1.0) * la;
      const double hi = std::max({lg1, lgm, lg3});
      acc = log_add_exp(acc, hi + std::log((1.0 - t1) / 6.0 *
                                           (std::exp(lg1 - hi) + 4.0 * std::exp(lgm - hi) +
                                            std::exp(lg3 - hi))));
    }
    for (long j = 2; j <= J + 200; ++j) {
      const double la = oracle_log_a(std::min(j, J), b, theta);
      const double ta = std::exp(-static_cast<double>(j) - 1.0);
      const double tb = std::exp(-static_cast<double>(j));
      const double lg1 = p_of_t(ta) * la, lgm = p_of_t(0.5 * (ta + tb)) * la,
                   lg3 = p_of_t(tb) * la;
      const double hi = std::max({lg1, lgm, lg3});
      const double piece = hi + std::log((tb - ta) / 6.0 *
                                         (std::exp(lg1 - hi) + 4.0 * std::exp(lgm - hi) +
                                          std::exp(lg3 - hi)));
      acc = log_add_exp(acc, piece);
    }
    const double oracle = std::exp(acc);
    CHECK(std::abs(computed - oracle) / oracle <= 0.01);
  }
}

TEST_CASE("Luxemburg norm") {
  SUBCASE("constant exponent coincides with the classical norm") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
      const StepFunction f = random_step(rng, 2 + trial % 5);
      const double q = 1.3 + 2.0 * uniform01(rng);
      const double lux = luxemburg_norm(f, ExponentSpec::constant(q)).value;
      const double lp = lp_norm(f, q).value;
      REQUIRE(relative_gap(lux, lp) <= 1e-8);
    }
  }
  SUBCASE("constant function has norm equal to its value") {
    const ExponentSpec p = exponent_for_theta(0.7, 2.0);
    CHECK(luxemburg_norm(constant_fn(2.5), p).value == doctest::Approx(2.5).epsilon(1e-8));
  }
  SUBCASE("zero input returns zero") {
    const FunctionSpec zero = StepFunction::from_values({0.0, 1.0}, {0.0});
    CHECK(luxemburg_norm(zero, ExponentSpec::constant(2.0)).value == 0.0);
  }
  SUBCASE("indicator against an increasing step exponent stays below t^(1/r(t))") {
    const ExponentSpec r =
        ExponentSpec(StepFunction::from_values({0.0, 0.3, 1.0}, {1.5, 2.5}));
    for (double t : {0.2, 0.3, 0.7}) {
      const double norm = luxemburg_norm(indicator(t), r).value;
      const double bound = std::pow(t, 1.0 / r(t));
      CHECK(norm <= bound * (1.0 + 1e-8));
    }
  }
  SUBCASE("unit ball property at the returned norm") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
      const StepFunction f = random_step(rng, 3);
      const ExponentSpec p =
          ExponentSpec(StepFunction::from_values({0.0, 0.4, 1.0},
                                                 {1.2 + uniform01(rng), 2.0 + uniform01(rng)}));
      const double lam = luxemburg_norm(f, p).value;
      REQUIRE(lam > 0.0);
      const double rho = variable_modular(f, p, lam).value;
      REQUIRE(rho > 1.0 - 1e-6);
      REQUIRE(rho <= 1.0 + 1e-6);
      REQUIRE(variable_modular(f, p, 0.99 * lam).value > 1.0 - 1e-6);
    }
  }
  SUBCASE("function outside the space flags +inf") {
    const FunctionSpec f = PowerLogLog{0.8, 0.0, 0.0, 1.0, 1.0, true};
    const NormResult r = luxemburg_norm(f, ExponentSpec::constant(2.0));
    CHECK(r.infinite);
  }
}

TEST_CASE("grand norm, definitional form") {
  SUBCASE("theta = 0 reduces to the classical norm") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 8; ++trial) {
      const StepFunction f = random_step(rng, 2 + trial % 4);
      const double p = 1.5 + 2.0 * uniform01(rng);
      const double grand = grand_norm_def(f, {p, 0.0}).value;
      const double lp = lp_norm(f, p).value;
      REQUIRE(relative_gap(grand, lp) <= 1e-9);
    }
  }
  SUBCASE("indicator approaches 1 as the supremum moves to the boundary") {
    // oracle: maximize eps^{1/(2-eps)} on a dense grid
    double oracle = 0.0;
    for (int k = 1; k < 100000; ++k) {
      const double eps = static_cast<double>(k) / 100000.0;
      oracle = std::max(oracle, std::pow(eps, 1.0 / (2.0 - eps)));
    }
    const double v = grand_norm_def(indicator(1.0), {2.0, 1.0}).value;
    CHECK(std::abs(v - oracle) <= 1e-3);
  }
  SUBCASE("borderline profile is in the grand space at theta = 1") {
    const FunctionSpec f = PowerLogLog{0.5, 0.0, 0.0, 1.0, 1.0, true};
    const NormResult r = grand_norm_def(f, {2.0, 1.0});
    CHECK_FALSE(r.infinite);
    // sup of (eps * 2/eps)^{1/(2-eps)} = 2 approached as eps -> 1
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-3));
  }
  SUBCASE("the same profile leaves the grand space for theta < 1") {
    const FunctionSpec f = PowerLogLog{0.5, 0.0, 0.0, 1.0, 1.0, true};
    const NormResult r = grand_norm_def(f, {2.0, 0.5});
    CHECK(r.infinite);
  }
  SUBCASE("homogeneity to 1e-9 relative") {
    std::mt19937_64 rng(37);
    const StepFunction f = random_step(rng, 4);
    const GrandParams gp{2.3, 1.2};
    const double base = grand_norm_def(f, gp).value;
    std::vector<double> scaled_logs(f.log_values());
    for (double& lv : scaled_logs) lv += std::log(7.5);
    const StepFunction g = StepFunction::from_u_cells(f.u_breaks(), std::move(scaled_logs));
    CHECK(relative_gap(grand_norm_def(g, gp).value, 7.5 * base) <= 1e-9);
  }
}

TEST_CASE("grand norm, rearrangement form") {
  SUBCASE("indicator spot value against a dense scan oracle") {
    // oracle: maximize log(e/t)^{-1/2} (1-t)^{1/2} on a 1e5-point grid
    double oracle = 0.0;
    for (int k = 1; k < 100000; ++k) {
      const double t = static_cast<double>(k) / 100000.0;
      oracle = std::max(oracle, std::sqrt((1.0 - t) / (1.0 - std::log(t))));
    }
    const NormResult r = grand_norm_rearr(indicator(1.0), {2.0, 1.0});
    CHECK(std::abs(r.value - oracle) <= 1e-3);
    CHECK(r.diag.supremum_location == doctest::Approx(0.317).epsilon(0.02));
  }
  SUBCASE("theta = 0 recovers the classical norm as t -> 0") {
    const FunctionSpec f = StepFunction::from_values({0.0, 0.5, 1.0}, {2.0, 1.0});
    const double lp = lp_norm(f, 2.0).value;
    CHECK(grand_norm_rearr(f, {2.0, 0.0}).value == doctest::Approx(lp).epsilon(1e-9));
  }
  SUBCASE("rearrangement invariance is exact") {
    std::mt19937_64 rng(41);
    const StepFunction f = random_step(rng, 5);
    const FunctionSpec fs{f};
    const FunctionSpec fstar = decreasing_rearrangement(fs).as_function_spec();
    const GrandParams gp{2.0, 1.0};
    CHECK(grand_norm_rearr(fs, gp).value == grand_norm_rearr(fstar, gp).value);
  }
  SUBCASE("truncated decreasing-profile values grow as the cutoff shrinks") {
    const GrandParams gp{2.0, 1.0};
    double prev = 0.0;
    for (double t0 : {std::exp(-3.0), std::exp(-6.0), std::exp(-12.0), std::exp(-24.0)}) {
      const PowerLogLog f = build_example_no_rearrange(2.0, 1.0, t0);
      const NormResult r = grand_norm_rearr(FunctionSpec{f}, gp);
      REQUIRE_FALSE(r.infinite);
      REQUIRE(r.value > prev);
      prev = r.value;
    }
  }
}

TEST_CASE("small norm") {
  SUBCASE("indicator with theta = p' gives an exact closed form") {
    // exponent of the log factor vanishes; ∫_0^1 t^{-1/2} dt = 2
    const NormResult r = small_norm(indicator(1.0), {2.0, 2.0});
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("indicator at theta = 1 is reproducible across tolerances") {
    const double v1 = small_norm(indicator(1.0), {2.0, 1.0}, {1e-8}).value;
    const double v2 = small_norm(indicator(1.0), {2.0, 1.0}, {1e-11}).value;
    CHECK(relative_gap(v1, v2) <= 1e-6);
    CHECK(v1 > 0.0);
  }
  SUBCASE("homogeneity") {
    std::mt19937_64 rng(43);
    const StepFunction f = random_step(rng, 4);
    const GrandParams gp{2.0, 1.0};
    const double base = small_norm(f, gp).value;
    std::vector<double> scaled_logs(f.log_values());
    for (double& lv : scaled_logs) lv += std::log(0.35);
    const StepFunction g = StepFunction::from_u_cells(f.u_breaks(), std::move(scaled_logs));
    CHECK(relative_gap(small_norm(g, gp).value, 0.35 * base) <= 1e-9);
  }
}

TEST_CASE("Musielak-Orlicz modular and norm") {
  const ExponentSpec p2 = ExponentSpec::constant(2.0);
  SUBCASE("sigma = 0 coincides with the variable modular") {
    std::mt19937_64 rng(47);
    const StepFunction f = random_step(rng, 4);
    const MusielakParams mp{p2, SigmaConstant{0.0}};
    const double a = musielak_modular(f, mp, 1.7).value;
    const double b = variable_modular(f, p2, 1.7).value;
    CHECK(a == b);  // bit-identical shared path
  }
  SUBCASE("zero function has zero modular") {
    const FunctionSpec zero = StepFunction::from_values({0.0, 1.0}, {0.0});
    CHECK(musielak_modular(zero, {p2, SigmaConstant{1.0}}, 1.0).value == 0.0);
  }
  SUBCASE("constant integrand value") {
    // f = c, p = 2, sigma = 1, lambda = c: rho = log(e + 1)
    const MusielakParams mp{p2, SigmaConstant{1.0}};
    CHECK(musielak_modular(constant_fn(2.0), mp, 2.0).value ==
          doctest::Approx(std::log(std::exp(1.0) + 1.0)).epsilon(1e-13));
  }
  SUBCASE("sigma = 0 norm equals the Luxemburg norm") {
    std::mt19937_64 rng(53);
    const StepFunction f = random_step(rng, 3);
    const MusielakParams mp{p2, SigmaConstant{0.0}};
    CHECK(relative_gap(musielak_norm(f, mp).value, luxemburg_norm(f, p2).value) <= 1e-8);
  }
  SUBCASE("norm of the unit constant against a scalar root oracle") {
    // rho(1/lambda) = (1/lambda)^2 log(e + 1/lambda) = 1
    double lo = 0.1, hi = 10.0;
    for (int k = 0; k < 200; ++k) {
      const double x = 0.5 * (lo + hi);  // x = 1/lambda
      (x * x * std::log(std::exp(1.0) + x) > 1.0 ? hi : lo) = x;
    }
    const double oracle_lambda = 1.0 / (0.5 * (lo + hi));
    const MusielakParams mp{p2, SigmaConstant{1.0}};
    CHECK(musielak_norm(constant_fn(1.0), mp).value ==
          doctest::Approx(oracle_lambda).epsilon(1e-6));
  }
  SUBCASE("doubling the input at most doubles the norm") {
    std::mt19937_64 rng(59);
    const StepFunction f = random_step(rng, 3);
    const MusielakParams mp{p2, SigmaConstant{0.8}};
    const double n1 = musielak_norm(f, mp).value;
    std::vector<double> logs(f.log_values());
    for (double& lv : logs) lv += std::log(2.0);
    const StepFunction g = StepFunction::from_u_cells(f.u_breaks(), std::move(logs));
    const double n2 = musielak_norm(g, mp).value;
    CHECK(n2 <= 2.0 * n1 * (1.0 + 1e-8));
    CHECK(n2 >= n1 * (1.0 - 1e-8));
  }
}

TEST_CASE("Hoelder pairing") {
  SUBCASE("indicator pair") {
    CHECK(holder_pairing(indicator(0.3), indicator(0.3)) ==
          doctest::Approx(0.3).epsilon(1e-13));
  }
  SUBCASE("power profile against the unit constant") {
    const FunctionSpec f = PowerLogLog{0.25, 0.0, 0.0, 1.0, 1.0, true};
    CHECK(holder_pairing(f, constant_fn(1.0)) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  }
  SUBCASE("pairing is bounded by 4 ||f|| ||g|| on a random corpus") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 15; ++trial) {
      const StepFunction f = random_step(rng, 2 + trial % 4);
      const StepFunction g = random_step(rng, 2 + (trial + 1) % 4);
      const ExponentSpec p =
          ExponentSpec(StepFunction::from_values({0.0, 0.5, 1.0},
                                                 {1.3 + uniform01(rng), 2.1 + uniform01(rng)}));
      const double pairing = holder_pairing(f, g);
      const double bound =
          4.0 * luxemburg_norm(f, p).value * luxemburg_norm(g, p.conjugate()).value;
      REQUIRE(pairing <= bound * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("pointwise domination implies norm domination") {
  std::mt19937_64 rng(67);
  const StepFunction f = random_step(rng, 4);
  std::vector<double> bigger_logs(f.log_values());
  for (std::size_t i = 0; i < bigger_logs.size(); ++i)
    bigger_logs[i] = log_add_exp(bigger_logs[i], std::log(0.5 + uniform01(rng)));
  const StepFunction g = StepFunction::from_u_cells(f.u_breaks(), std::move(bigger_logs));
  const GrandParams gp{2.0, 1.0};
  CHECK(lp_norm(f, 2.0).value <= lp_norm(g, 2.0).value * (1.0 + 1e-9));
  CHECK(grand_norm_def(f, gp).value <= grand_norm_def(g, gp).value * (1.0 + 1e-9));
  CHECK(grand_norm_rearr(f, gp).value <= grand_norm_rearr(g, gp).value * (1.0 + 1e-9));
  CHECK(small_norm(f, gp).value <= small_norm(g, gp).value * (1.0 + 1e-9));
  const ExponentSpec p = ExponentSpec::constant(2.0);
  CHECK(luxemburg_norm(f, p).value <= luxemburg_norm(g, p).value * (1.0 + 1e-9));
}

TEST_CASE("definitional embedding inequality on an eps grid") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const StepFunction f = random_step(rng, 3 + trial);
    const GrandParams gp{2.0, 1.0};
    const double grand = grand_norm_def(f, gp).value;
    for (int k = 1; k <= 20; ++k) {
      const double eps = (gp.p - 1.0) * k / 21.0;
      const double lhs = lp_norm(f, gp.p - eps).value;
      const double bound = std::pow(eps, -gp.theta / (gp.p - eps)) * grand;
      REQUIRE(lhs <= bound * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("the two grand forms stay within the frozen equivalence bracket") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    const StepFunction f = random_step(rng, 2 + trial % 5);
    const GrandParams gp{2.0, 1.0};
    const double ratio = grand_norm_def(f, gp).value / grand_norm_rearr(f, gp).value;
    REQUIRE(ratio >= 1.0 / 20.0);
    REQUIRE(ratio <= 20.0);
  }
}

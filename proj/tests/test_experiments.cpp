#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lspace/experiments.hpp"

using namespace lspace;

TEST_CASE("no-var-small reproduction at the reference parameters") {
  const EmbeddingReport rep = reproduce_no_var_small(1.5, 1.0, {1000, 10000, 100000});
  REQUIRE(rep.memberships.size() == 2);
  CHECK(rep.memberships[0].label == "variable-modular");
  CHECK(rep.memberships[0].growth.verdict == GrowthReport::Verdict::convergent);
  CHECK(rep.memberships[1].label == "small-norm");
  CHECK(rep.memberships[1].growth.verdict == GrowthReport::Verdict::divergent);
  CHECK(rep.memberships[1].growth.fit_quality >= 0.99);

  bool example_side = false, embed_side_all_fail = true;
  for (const auto& c : rep.conditions) {
    if (c.label == "no-var-small") example_side = c.report.holds;
    if (c.label.rfind("var-small[", 0) == 0) embed_side_all_fail &= !c.report.holds;
  }
  CHECK(example_side);
  CHECK(embed_side_all_fail);
  CHECK(rep.assertions_ok);
  CHECK_FALSE(rep.inconclusive);

  // The series lower-bound cross-check is pinned at these parameters.
  double ratio_min = 0.0, ratio_max = 0.0;
  for (const auto& m : rep.metrics) {
    if (m.label == "lower-bound-ratio-min") ratio_min = m.value;
    if (m.label == "lower-bound-ratio-max") ratio_max = m.value;
  }
  CHECK(ratio_min >= 0.1);
  CHECK(ratio_max <= 10.0);
}

TEST_CASE("no-var-small verdicts are stable under doubling the top level") {
  const EmbeddingReport a = reproduce_no_var_small(1.5, 1.0, {1000, 10000, 50000});
  const EmbeddingReport b = reproduce_no_var_small(1.5, 1.0, {1000, 10000, 100000});
  for (std::size_t k = 0; k < a.memberships.size(); ++k) {
    CHECK(a.memberships[k].growth.verdict == b.memberships[k].growth.verdict);
  }
}

TEST_CASE("no-var-small parameter validation") {
  CHECK_THROWS_AS(reproduce_no_var_small(2.5, 1.0, {1000, 10000}), std::invalid_argument);
  CHECK_THROWS_AS(reproduce_no_var_small(1.5, -1.0, {1000, 10000}), std::invalid_argument);
  CHECK_THROWS_AS(reproduce_no_var_small(1.5, 1.0, {10, 100}), std::invalid_argument);
}

TEST_CASE("no-rearrange reproduction at the reference parameters") {
  const EmbeddingReport rep = reproduce_no_rearrange(2.0, 1.0, 0.5);
  CHECK(rep.assertions_ok);
  CHECK_FALSE(rep.inconclusive);
  REQUIRE(!rep.conditions.empty());
  CHECK(rep.conditions[0].report.holds);

  double r_min = 0.0, spread = kPosInf;
  for (const auto& m : rep.metrics) {
    if (m.label == "grand-bracket-ratio-min") r_min = m.value;
    if (m.label == "grand-bracket-ratio-spread") spread = m.value;
  }
  CHECK(r_min > 0.0);
  CHECK(spread <= 1.2);
}

TEST_CASE("no-rearrange parameter validation") {
  CHECK_THROWS_AS(reproduce_no_rearrange(2.0, -1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(reproduce_no_rearrange(0.9, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(reproduce_no_rearrange(2.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("embedding chain check") {
  SUBCASE("indicator at the pinned closed-form point") {
    const FunctionSpec chi = StepFunction::from_values({0.0, 1.0}, {1.0});
    const ChainReport rep = embedding_chain_check(chi, 2.0, 1.0, {0.5});
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].lhs == doctest::Approx(1.0).epsilon(1e-9));
    // bound = 0.5^{-1/1.5} * ||chi||_{2),1} with the norm approaching 1
    CHECK(rep.rows[0].bound == doctest::Approx(std::pow(0.5, -1.0 / 1.5)).epsilon(1e-3));
    CHECK(rep.rows[0].holds);
    CHECK(rep.all_hold);
    CHECK(rep.chain_consistent);
  }
  SUBCASE("zero function chain holds trivially") {
    const FunctionSpec zero = StepFunction::from_values({0.0, 1.0}, {0.0});
    const ChainReport rep = embedding_chain_check(zero, 2.0, 1.0, {0.25, 0.5});
    CHECK(rep.all_hold);
    CHECK(rep.chain_consistent);
  }
  SUBCASE("verdicts are monotone along the power family t^(-1/2 + delta)") {
    // delta > 0: everything finite; delta < 0: lp and grand blow up in turn.
    const ChainReport inside =
        embedding_chain_check(PowerLogLog{0.4, 0.0, 0.0, 1.0, 1.0, true}, 2.0, 1.0, {0.5});
    CHECK(inside.lp_finite);
    CHECK(inside.grand_finite);
    CHECK(inside.chain_consistent);
    const ChainReport border =
        embedding_chain_check(PowerLogLog{0.5, 0.0, 0.0, 1.0, 1.0, true}, 2.0, 1.0, {0.5});
    CHECK_FALSE(border.lp_finite);
    CHECK(border.grand_finite);  // borderline profile stays in the grand space
    CHECK(border.chain_consistent);
    const ChainReport outside =
        embedding_chain_check(PowerLogLog{0.8, 0.0, 0.0, 1.0, 1.0, true}, 2.0, 1.0, {0.5});
    CHECK_FALSE(outside.lp_finite);
    CHECK_FALSE(outside.grand_finite);
  }
}

TEST_CASE("rearranged-norm sandwich over corpora") {
  SUBCASE("constant exponents force both ratios to 1") {
    const auto corpus = make_step_corpus(911, 12, /*constant_exponents=*/true);
    const FRSReport rep = frs_inequality_check(corpus);
    CHECK(rep.anomalies == 0);
    CHECK(rep.r1_min >= 1.0 - 1e-8);
    CHECK(rep.r1_max <= 1.0 + 1e-8);
    CHECK(rep.r2_min >= 1.0 - 1e-8);
    CHECK(rep.r2_max <= 1.0 + 1e-8);
  }
  SUBCASE("an already-sorted pair pins both norms") {
    // u decreasing and p decreasing: u = u_*, p = p_*.
    const FunctionSpec u = StepFunction::from_values({0.0, 0.5, 1.0}, {3.0, 1.0});
    ExponentSpec p(StepFunction::from_values({0.0, 0.5, 1.0}, {3.0, 2.0}));
    const FRSReport rep = frs_inequality_check({{"sorted", u, p}});
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].r2 == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("mixed corpus has finite ratio envelopes") {
    const auto corpus = make_step_corpus(913, 12, /*constant_exponents=*/false);
    const FRSReport rep = frs_inequality_check(corpus);
    CHECK(rep.r1_min > 0.0);
    CHECK(std::isfinite(rep.r1_max));
    CHECK(rep.r2_min > 0.0);
    CHECK(std::isfinite(rep.r2_max));
  }
  SUBCASE("the planted pair realizes the infinite right end") {
    PowerLogLog u;
    u.a = 1.0 / 3.0;
    ExponentSpec p(StepFunction::from_values({0.0, 0.5, 1.0}, {2.0, 4.0}));
    const FRSReport rep = frs_inequality_check({{"anomaly", u, p}});
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].star_infinite);
    CHECK(std::isfinite(rep.rows[0].norm_var));
    CHECK(rep.anomalies == 1);
  }
}

TEST_CASE("pointwise bound check") {
  SUBCASE("bounded profile has C at most 1") {
    const FunctionSpec chi = StepFunction::from_values({0.0, 1.0}, {1.0});
    const PointwiseBoundReport rep =
        pointwise_bound_check(chi, ExponentSpec::constant(2.0), std::nullopt, 1.0);
    CHECK(rep.c_variable <= 1.0 + 1e-12);
    CHECK_FALSE(rep.grand.infinite);
  }
  SUBCASE("algebraic cancellation pins C = 1 exactly") {
    // u_* = (e/t)^{1/3} against p_* = 3: the ratio is 1 at every grid point.
    PowerLogLog u;
    u.a = 1.0 / 3.0;
    u.scale = std::exp(1.0 / 3.0);
    const PointwiseBoundReport rep =
        pointwise_bound_check(u, ExponentSpec::constant(3.0), std::nullopt, 1.0);
    CHECK(rep.c_variable == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("extremal family: stability, conditions, and grand membership") {
    PowerLogLog u;  // (e/t)^{1/2} log(e/t)^{-1}, cut at e^-2
    u.a = 0.5;
    u.b = -1.0;
    u.scale = std::exp(0.5);
    u.valid_to = std::exp(-2.0);
    const ExponentSpec p = extremal_rearranged_exponent(2.0, 0.5, 0.0);
    const PointwiseBoundReport coarse = pointwise_bound_check(u, p, std::nullopt, 1.0, 2048);
    const PointwiseBoundReport fine = pointwise_bound_check(u, p, std::nullopt, 1.0, 4096);
    CHECK(std::isfinite(coarse.c_variable));
    CHECK(std::abs(fine.c_variable - coarse.c_variable) <= 0.1 * coarse.c_variable);
    CHECK(std::abs(fine.c_final - coarse.c_final) <= 0.1 * coarse.c_final);
    CHECK(coarse.conditions_hold);
    CHECK_FALSE(coarse.grand.infinite);
    CHECK(coarse.a_hat <= 0.5 + 1e-6);  // the family was built with A = 0.5
  }
  SUBCASE("the sigma = 0 path and the plain path produce identical reports") {
    PowerLogLog u;
    u.a = 0.5;
    u.b = -1.0;
    u.scale = std::exp(0.5);
    u.valid_to = std::exp(-2.0);
    const ExponentSpec p = extremal_rearranged_exponent(2.0, 0.5, 0.0);
    const PointwiseBoundReport plain = pointwise_bound_check(u, p, std::nullopt, 1.0);
    const PointwiseBoundReport zero =
        pointwise_bound_check(u, p, SigmaSpec{SigmaConstant{0.0}}, 1.0);
    CHECK(plain.modular == zero.modular);
    CHECK(plain.c_variable == zero.c_variable);
    CHECK(plain.c_final == zero.c_final);
    CHECK(plain.a_hat == zero.a_hat);
    CHECK(plain.b_hat == zero.b_hat);
    CHECK(plain.grand.value == zero.grand.value);
  }
  SUBCASE("log-term exponent stays non-positive for non-negative sigma") {
    PowerLogLog u;
    u.a = 0.5;
    u.b = -1.0;
    u.scale = std::exp(0.5);
    u.valid_to = std::exp(-2.0);
    const ExponentSpec p = extremal_rearranged_exponent(2.0, 0.5, 0.25);
    const SigmaSpec sigma = SigmaCappedRecipLogLog{1.0, 0.5, std::exp(-2.0)};
    const PointwiseBoundReport rep = pointwise_bound_check(u, p, sigma, 1.5);
    CHECK(rep.log_exponent_max <= 1e-12);
    CHECK(std::isfinite(rep.c_variable));
    CHECK_FALSE(rep.grand.infinite);
  }
  SUBCASE("preconditions") {
    const FunctionSpec chi = StepFunction::from_values({0.0, 1.0}, {1.0});
    // sigma_*(0) below 1 - theta
    CHECK_THROWS_AS(pointwise_bound_check(chi, ExponentSpec::constant(2.0),
                                          SigmaSpec{SigmaConstant{-1.0}}, 0.5),
                    std::invalid_argument);
    // profile outside the space
    PowerLogLog bad;
    bad.a = 0.8;
    CHECK_THROWS_AS(
        pointwise_bound_check(bad, ExponentSpec::constant(2.0), std::nullopt, 1.0),
        std::invalid_argument);
  }
}

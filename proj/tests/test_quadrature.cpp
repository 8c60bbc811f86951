#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lspace/quadrature.hpp"

using namespace lspace;

TEST_CASE("graded quadrature reproduces closed forms") {
  SUBCASE("borderline log-singular integrand") {
    // ∫_0^1 dt / (t log(e/t)^2) = ∫_1^inf u^-2 du = 1
    const auto g = [](double t) { return 1.0 / (t * std::pow(1.0 - std::log(t), 2.0)); };
    const QuadratureResult q = integrate_graded(g, 0.0, 1.0, 1e-10);
    CHECK(q.converged);
    CHECK(q.value == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("inverse square root") {
    const auto g = [](double t) { return 1.0 / std::sqrt(t); };
    const QuadratureResult q = integrate_graded(g, 0.0, 1.0, 1e-10);
    CHECK(q.converged);
    CHECK(q.value == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("constant on a window") {
    const auto g = [](double) { return 1.0; };
    const QuadratureResult q = integrate_graded(g, 0.25, 0.75, 1e-12);
    CHECK(q.value == doctest::Approx(0.5).epsilon(1e-11));
  }
}

TEST_CASE("calibration family t^-a log(e/t)^b") {
  // ∫_0^1 t^-a log(e/t)^b dt with kappa = 1 - a:
  //   b = 0: 1/kappa;  b = 1: 1/kappa + 1/kappa^2;
  //   b = 2: 1/kappa + 2/kappa^2 + 2/kappa^3.
  for (double a : {0.2, 0.5, 0.9}) {
    const double kappa = 1.0 - a;
    const auto anti0 = 1.0 / kappa;
    const auto anti1 = 1.0 / kappa + 1.0 / (kappa * kappa);
    const auto anti2 = 1.0 / kappa + 2.0 / (kappa * kappa) + 2.0 / (kappa * kappa * kappa);
    const double tol = 1e-10;
    for (auto [b, expected] : std::vector<std::pair<double, double>>{
             {0.0, anti0}, {1.0, anti1}, {2.0, anti2}}) {
      const auto g = [a, b](double t) {
        return std::pow(t, -a) * std::pow(1.0 - std::log(t), b);
      };
      const QuadratureResult q = integrate_graded(g, 0.0, 1.0, tol);
      CHECK(q.converged);
      CHECK(std::abs(q.value - expected) <= 10.0 * tol * std::max(1.0, expected));
    }
  }
}

TEST_CASE("quadrature is deterministic and monotone in the interval") {
  const auto g = [](double t) { return std::pow(t, -0.3) * (2.0 - std::log(t)); };
  const QuadratureResult q1 = integrate_graded(g, 0.0, 1.0, 1e-9);
  const QuadratureResult q2 = integrate_graded(g, 0.0, 1.0, 1e-9);
  CHECK(q1.value == q2.value);  // bit-identical
  const QuadratureResult smaller = integrate_graded(g, 0.1, 0.9, 1e-9);
  CHECK(smaller.value <= q1.value);
}

TEST_CASE("non-finite integrand samples raise an evaluation error") {
  const auto g = [](double t) { return t < 0.5 ? kNaN : 1.0; };
  CHECK_THROWS_AS(integrate_graded(g, 0.0, 1.0, 1e-9), std::runtime_error);
}

TEST_CASE("series partial sums") {
  SUBCASE("geometric tail") {
    const auto term = [](long j) { return std::pow(2.0, -static_cast<double>(j)); };
    const auto sums = series_partial_sums(term, 0, {20});
    CHECK(sums.size() == 1);
    CHECK(sums[0] == doctest::Approx(2.0 - std::pow(2.0, -20.0)).epsilon(1e-15));
  }
  SUBCASE("non-finite term names the index") {
    const auto term = [](long j) { return j == 5 ? kPosInf : 1.0; };
    CHECK_THROWS_WITH_AS(series_partial_sums(term, 2, {10}), doctest::Contains("j = 5"),
                         std::runtime_error);
  }
  SUBCASE("levels must increase") {
    const auto term = [](long) { return 1.0; };
    CHECK_THROWS_AS(series_partial_sums(term, 0, {10, 10}), std::invalid_argument);
  }
}

namespace {

std::vector<long> geometric_levels(long lo, long hi, int count) {
  std::vector<long> out;
  for (int k = 0; k < count; ++k) {
    const double x = lo * std::pow(static_cast<double>(hi) / lo,
                                   static_cast<double>(k) / (count - 1));
    out.push_back(static_cast<long>(std::llround(x)));
  }
  return out;
}

}  // namespace

TEST_CASE("growth classification") {
  SUBCASE("flat values are bounded and convergent") {
    const GrowthReport rep =
        classify_growth({10.0, 100.0, 1000.0, 10000.0}, {1.0, 1.0, 1.0, 1.0});
    CHECK(rep.model == GrowthReport::Model::bounded);
    CHECK(rep.verdict == GrowthReport::Verdict::convergent);
  }
  SUBCASE("exact loglog data is divergent") {
    std::vector<double> levels, values;
    for (double level : {1e3, 1e4, 1e5, 1e6, 1e7}) {
      levels.push_back(level);
      values.push_back(std::log(std::log(level)));
    }
    const GrowthReport rep = classify_growth(levels, values);
    CHECK(rep.model == GrowthReport::Model::loglog);
    CHECK(rep.verdict == GrowthReport::Verdict::divergent);
    CHECK(rep.fit_quality >= 0.99);
  }
  SUBCASE("convergent comparison series: 1/(j log^1.5 j)") {
    const auto term = [](long j) {
      const double x = static_cast<double>(j);
      return 1.0 / (x * std::pow(std::log(x), 1.5));
    };
    const auto levels = geometric_levels(1000, 1000000, 8);
    const auto sums = series_partial_sums(term, 2, levels);
    std::vector<double> dl(levels.begin(), levels.end());
    const GrowthReport rep = classify_growth(dl, sums);
    CHECK(rep.verdict == GrowthReport::Verdict::convergent);
    CHECK(rep.increment_exponent == doctest::Approx(1.5).epsilon(0.05));
  }
  SUBCASE("divergent comparison series: 1/(j log^0.75 j)") {
    const auto term = [](long j) {
      const double x = static_cast<double>(j);
      return 1.0 / (x * std::pow(std::log(x), 0.75));
    };
    const auto levels = geometric_levels(1000, 1000000, 8);
    const auto sums = series_partial_sums(term, 2, levels);
    std::vector<double> dl(levels.begin(), levels.end());
    const GrowthReport rep = classify_growth(dl, sums);
    CHECK(rep.verdict == GrowthReport::Verdict::divergent);
    CHECK(rep.fit_quality >= 0.99);
    CHECK(rep.increment_exponent == doctest::Approx(0.75).epsilon(0.07));
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(classify_growth({1e3, 1e4, 1e5}, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(classify_growth({1e3, 2e3, 3e3, 4e3}, {1.0, 2.0, 3.0, 4.0}),
                    std::invalid_argument);  // span < 3 decades
    CHECK_THROWS_AS(classify_growth({1e3, 1e4, 1e5, 1e6}, {2.0, 1.0, 3.0, 4.0}),
                    std::invalid_argument);  // not non-decreasing
  }
}

TEST_CASE("divergence verdicts are stable under deepening the sweep") {
  const auto term = [](long j) {
    const double x = static_cast<double>(j);
    return 1.0 / (x * std::pow(std::log(x), 0.75));
  };
  const auto levels1 = geometric_levels(1000, 500000, 8);
  const auto levels2 = geometric_levels(1000, 1000000, 8);
  const auto sums1 = series_partial_sums(term, 2, levels1);
  const auto sums2 = series_partial_sums(term, 2, levels2);
  const GrowthReport r1 =
      classify_growth(std::vector<double>(levels1.begin(), levels1.end()), sums1);
  const GrowthReport r2 =
      classify_growth(std::vector<double>(levels2.begin(), levels2.end()), sums2);
  CHECK(r1.verdict == GrowthReport::Verdict::divergent);
  CHECK(r2.verdict == r1.verdict);
  CHECK(r2.fit_quality >= r1.fit_quality - 0.005);
}

TEST_CASE("golden section refinement finds an interior maximum") {
  const auto f = [](double x) { return -(x - 0.37) * (x - 0.37) + 2.0; };
  double best = 0.0;
  const double x = golden_section_max(f, 0.0, 1.0, &best);
  CHECK(x == doctest::Approx(0.37).epsilon(1e-9));
  CHECK(best == doctest::Approx(2.0).epsilon(1e-12));
}

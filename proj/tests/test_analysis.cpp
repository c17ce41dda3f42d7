#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "fbmhedge/analysis.hpp"

using namespace fbmhedge;

TEST_CASE("expected hedging error closed-form pins") {
  CHECK(expected_hedging_error_call(1.0, HurstParameter(0.5)) ==
        Catch::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-9));
  CHECK(expected_hedging_error_call(1.0, HurstParameter(0.75)) ==
        Catch::Approx(1.0 / (0.25 * std::sqrt(2.0 * std::numbers::pi))).epsilon(1e-9));
  // at ln K = 0 the pin holds for any H
  for (double h : {0.51, 0.6666, 0.9, 0.97})
    CHECK(expected_hedging_error_call(1.0, HurstParameter(h)) ==
          Catch::Approx(1.0 / ((1.0 - h) * std::sqrt(2.0 * std::numbers::pi))).epsilon(1e-9));
  CHECK_THROWS_AS(expected_hedging_error_call(0.0, HurstParameter(0.75)), std::domain_error);
  CHECK_THROWS_AS(expected_hedging_error_call(-1.0, HurstParameter(0.75)), std::domain_error);
}

TEST_CASE("factorization: E(J) = prefactor * K * E l(ln K) through separate routes") {
  for (double k : {0.4, 1.0, 2.5}) {
    for (double hv : {0.55, 0.75, 0.9}) {
      const HurstParameter h(hv);
      const double k0 = 0.8;
      const double direct = expected_hedging_error_call(k, h, k0);
      const double factored =
          std::sqrt(2.0 / std::numbers::pi) * k0 * k * expected_local_time(std::log(k), h, 1.0);
      CHECK(direct == Catch::Approx(factored).epsilon(1e-14));
    }
  }
}

TEST_CASE("strike ratio identity: integrals depend on ln^2 K only") {
  const HurstParameter h(0.75);
  const double ratio =
      expected_hedging_error_call(2.0, h) / expected_hedging_error_call(0.5, h);
  CHECK(ratio == Catch::Approx(4.0).epsilon(1e-10));
  CHECK(expected_hedging_error_call(2.0, h) != expected_hedging_error_call(0.5, h));
}

TEST_CASE("tail decay in the strike") {
  const HurstParameter h(0.75);
  const double peak = expected_hedging_error_call(1.0, h);
  double prev = peak;
  for (double k : {1.5, 2.0, 3.0, 5.0, 10.0}) {
    const double v = expected_hedging_error_call(k, h);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(expected_hedging_error_call(10.0, h) < 0.05 * peak);
}

TEST_CASE("quadrature self-consistency under tolerance halving") {
  const double a = expected_hedging_error_call(1.7, HurstParameter(0.65), 1.0, 1e-10);
  const double b = expected_hedging_error_call(1.7, HurstParameter(0.65), 1.0, 5e-11);
  CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("error surface: positivity, closed-form column, max at the strike nearest 1") {
  std::vector<double> strikes;
  for (int i = 2; i <= 30; ++i) strikes.push_back(static_cast<double>(i) / 10.0);
  const std::vector<double> hursts{0.55, 0.75, 0.95};
  const ErrorSurface surface = error_surface(strikes, hursts);

  for (double v : surface.values) {
    CHECK(v > 0.0);
    CHECK(std::isfinite(v));
  }
  for (std::size_t hi = 0; hi < hursts.size(); ++hi) {
    // strike grid contains 1.0 exactly at index 8
    CHECK(surface.at(8, hi) ==
          Catch::Approx(1.0 / ((1.0 - hursts[hi]) * std::sqrt(2.0 * std::numbers::pi)))
              .epsilon(1e-9));
    CHECK(surface.argmax_strike(hi) == 8);
  }

  CHECK_THROWS_AS(error_surface(std::vector<double>{}, hursts), std::domain_error);
  CHECK_THROWS_AS(error_surface(std::vector<double>{-1.0}, hursts), std::domain_error);
}

TEST_CASE("default figure grids bracket the critical strike") {
  const auto ks = default_strike_grid();
  const auto hs = default_hurst_grid();
  CHECK(ks.front() == 0.2);
  CHECK(ks.back() == 3.0);
  CHECK(std::find(ks.begin(), ks.end(), 1.0) != ks.end());
  CHECK(hs.front() == 0.55);
  CHECK(hs.back() == 0.95);
}

TEST_CASE("H-continuity study approaches the Brownian value monotonically") {
  const std::vector<double> hs{0.75, 0.65, 0.6, 0.55, 0.52, 0.51};

  // K = 1: closed form 1/((1-H) sqrt(2 pi)) decreasing to 2/sqrt(2 pi)
  const ContinuityStudy at_one = h_continuity_study(1.0, hs);
  CHECK(at_one.limit_value == Catch::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-9));
  CHECK(at_one.gaps_decreasing);

  // K = e (ln K = 1): quadrature route
  const ContinuityStudy at_e = h_continuity_study(std::exp(1.0), hs);
  CHECK(at_e.gaps_decreasing);
  CHECK(at_e.rows.back().gap_to_limit < at_e.rows.front().gap_to_limit);

  // ordering sanity: H = 0.51 row is closer to the limit than H = 0.6
  double gap51 = 0.0, gap60 = 0.0;
  for (const auto& row : at_e.rows) {
    if (row.hurst == 0.51) gap51 = row.gap_to_limit;
    if (row.hurst == 0.6) gap60 = row.gap_to_limit;
  }
  CHECK(gap51 < gap60);
}

TEST_CASE("H-continuity study validates the sequence") {
  CHECK_THROWS_AS(h_continuity_study(1.0, std::vector<double>{0.5}), std::domain_error);
  CHECK_THROWS_AS(h_continuity_study(1.0, std::vector<double>{0.6, 0.7}), std::domain_error);
  CHECK_THROWS_AS(h_continuity_study(1.0, std::vector<double>{}), std::domain_error);
}

TEST_CASE("monte carlo agrees with quadrature at moderate scale", "[mc]") {
  const McQuadReport r = mc_vs_quadrature(1.0, HurstParameter(0.5), 4096, 1500, 7);
  CHECK(std::abs(r.z_score) < 4.0);
  CHECK(std::abs(r.mc_mean - r.quadrature_value) < 0.03 * r.quadrature_value);
  CHECK(r.mc_stderr > 0.0);
}

TEST_CASE("monte carlo and quadrature both nearly vanish far out of the money", "[mc]") {
  const McQuadReport r = mc_vs_quadrature(20.0, HurstParameter(0.75), 4096, 1500, 11);
  CHECK(r.quadrature_value < 0.02);
  CHECK(std::abs(r.mc_mean - r.quadrature_value) < 4.0 * std::max(r.mc_stderr, 1e-4));
}

TEST_CASE("mc_vs_quadrature validates inputs") {
  CHECK_THROWS_AS(mc_vs_quadrature(-1.0, HurstParameter(0.75), 64, 10, 1), std::domain_error);
  CHECK_THROWS_AS(mc_vs_quadrature(1.0, HurstParameter(0.75), 64, 1, 1), std::domain_error);
}

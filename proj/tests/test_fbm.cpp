#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "fbmhedge/fbm.hpp"
#include "fbmhedge/stats.hpp"

using namespace fbmhedge;

TEST_CASE("hurst parameter domain") {
  CHECK_NOTHROW(HurstParameter(0.5));
  CHECK_NOTHROW(HurstParameter(0.01));
  CHECK_THROWS_AS(HurstParameter(0.0), std::domain_error);
  CHECK_THROWS_AS(HurstParameter(1.0), std::domain_error);
  CHECK_THROWS_AS(HurstParameter(-0.2), std::domain_error);
}

TEST_CASE("uniform grid invariants") {
  UniformGrid grid(1.0, 8);
  CHECK(grid.node_count() == 9);
  CHECK(grid.mesh() == 0.125);
  CHECK(grid.time_at(0) == 0.0);
  CHECK(grid.time_at(8) == 1.0);
  CHECK_THROWS_AS(UniformGrid(0.0, 4), std::domain_error);
  CHECK_THROWS_AS(UniformGrid(1.0, 0), std::domain_error);
}

TEST_CASE("fbm covariance closed forms") {
  CHECK(fbm_covariance(1.0, 1.0, HurstParameter(0.75)) == 1.0);
  CHECK(fbm_covariance(0.0, 0.7, HurstParameter(0.6)) == 0.0);
  CHECK(fbm_covariance(0.5, 1.0, HurstParameter(0.5)) == Catch::Approx(0.5));  // min(s,t) for BM
  CHECK(fbm_covariance(0.3, 0.8, HurstParameter(0.65)) ==
        fbm_covariance(0.8, 0.3, HurstParameter(0.65)));
  CHECK_THROWS_AS(fbm_covariance(-0.1, 1.0, HurstParameter(0.75)), std::domain_error);
}

TEST_CASE("price path construction and round trip") {
  UniformGrid grid(1.0, 4);
  FbmPath flat{grid, HurstParameter(0.7), {0.0, 0.0, 0.0, 0.0, 0.0}, {}};
  const PricePath constant = to_price_path(flat, 2.0);
  for (double p : constant.prices) CHECK(p == 2.0);

  FbmPath path{grid, HurstParameter(0.7), {0.0, std::log(3.0), -0.4, 0.2, 1.1}, {}};
  const PricePath prices = to_price_path(path, 1.0);
  CHECK(prices.prices[1] == Catch::Approx(3.0));
  for (std::size_t i = 0; i < prices.prices.size(); ++i)
    CHECK(std::log(prices.prices[i] / prices.s0) == Catch::Approx(path.values[i]).margin(1e-15));

  CHECK_THROWS_AS(to_price_path(path, 0.0), std::domain_error);
  CHECK_THROWS_AS(to_price_path(path, -1.0), std::domain_error);
}

TEST_CASE("refine_restrict subsamples exactly") {
  UniformGrid grid(1.0, 4);
  FbmPath path{grid, HurstParameter(0.8), {0.0, 1.0, 2.0, 3.0, 4.0}, {5, 6}};

  const FbmPath same = refine_restrict(path, 4);
  CHECK(same.values == path.values);

  const FbmPath half = refine_restrict(path, 2);
  CHECK(half.values == std::vector<double>{0.0, 2.0, 4.0});
  CHECK(half.grid.steps() == 2);
  CHECK(half.grid.horizon() == 1.0);
  CHECK(half.values.back() == path.values.back());

  CHECK_THROWS_AS(refine_restrict(path, 3), std::domain_error);
  CHECK_THROWS_AS(refine_restrict(path, 0), std::domain_error);
}

TEST_CASE("samplers are deterministic in the seed key") {
  UniformGrid grid(1.0, 16);
  HurstParameter h(0.75);
  FbmCirculantSampler circ(grid, h);
  FbmCholeskySampler chol(grid, h);

  CHECK(circ.sample({42, 7}).values == circ.sample({42, 7}).values);
  CHECK(chol.sample({42, 7}).values == chol.sample({42, 7}).values);
  CHECK(circ.sample({42, 7}).values != circ.sample({42, 8}).values);
  CHECK(circ.sample({42, 7}).values != circ.sample({43, 7}).values);
}

TEST_CASE("cholesky sampler matches the fbm law", "[mc]") {
  // oracle: fbm_covariance gives Var(B_1) = 1 and E|B_t - B_s|^2 = |t-s|^{2H}
  const int n_paths = 20000;
  UniformGrid grid(1.0, 8);
  HurstParameter h(0.6);
  FbmCholeskySampler sampler(grid, h);
  std::vector<double> b1sq(n_paths), incr_sq(n_paths), prod(n_paths);
  for (int p = 0; p < n_paths; ++p) {
    const FbmPath path = sampler.sample({101, static_cast<std::uint64_t>(p)});
    CHECK(path.values[0] == 0.0);
    b1sq[p] = path.values[8] * path.values[8];
    const double d = path.values[6] - path.values[2];  // t = 0.75, s = 0.25
    incr_sq[p] = d * d;
    prod[p] = path.values[4] * path.values[8];  // cov(B_0.5, B_1)
  }
  const double se_var = std::sqrt(2.0 / n_paths);  // SE of mean of X^2, X ~ N(0,1)
  CHECK(std::abs(mean(b1sq) - 1.0) < 4.0 * se_var);

  const double expect_incr = std::pow(0.5, 1.2);  // 0.4353
  CHECK(std::abs(mean(incr_sq) - expect_incr) < 4.0 * std::sqrt(2.0 / n_paths) * expect_incr);

  const double expect_cov = fbm_covariance(0.5, 1.0, h);
  CHECK(std::abs(mean(prod) - expect_cov) < 4.0 * standard_error(prod));
}

TEST_CASE("circulant sampler law: marginals, self-similarity, KS", "[mc]") {
  const int n_paths = 20000;
  UniformGrid grid(1.0, 8);
  HurstParameter h(0.75);
  FbmCirculantSampler sampler(grid, h);
  REQUIRE_FALSE(sampler.used_fallback());

  std::vector<double> b1(n_paths), mid_sq(n_paths), b1sq(n_paths);
  for (int p = 0; p < n_paths; ++p) {
    const FbmPath path = sampler.sample({77, static_cast<std::uint64_t>(p)});
    b1[p] = path.values[8];
    mid_sq[p] = path.values[4] * path.values[4];
    b1sq[p] = b1[p] * b1[p];
  }
  CHECK(std::abs(mean(b1sq) - 1.0) < 4.0 * std::sqrt(2.0 / n_paths));

  // self-similarity: Var(B_{1/2}) = (1/2)^{2H} Var(B_1)
  const double expect_mid = std::pow(0.5, 1.5);
  CHECK(std::abs(mean(mid_sq) - expect_mid) < 4.0 * std::sqrt(2.0 / n_paths) * expect_mid);

  // exact marginal law of B_1
  const auto ks = ks_test(std::vector<double>(b1.begin(), b1.begin() + 10000),
                          [](double x) { return normal_cdf(x); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("cholesky and circulant samplers agree in distribution", "[mc]") {
  UniformGrid grid(1.0, 8);
  HurstParameter h(0.75);
  FbmCirculantSampler circ(grid, h);
  FbmCholeskySampler chol(grid, h);
  const int n_paths = 10000;
  std::vector<double> a(n_paths), b(n_paths);
  for (int p = 0; p < n_paths; ++p) {
    a[p] = circ.sample({1, static_cast<std::uint64_t>(p)}).values.back();
    b[p] = chol.sample({2, static_cast<std::uint64_t>(p)}).values.back();
  }
  CHECK(ks_test_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("single-step circulant grid gives one exact increment") {
  UniformGrid grid(1.0, 1);
  HurstParameter h(0.8);
  FbmCirculantSampler sampler(grid, h);
  const int n_paths = 20000;
  std::vector<double> sq(n_paths);
  for (int p = 0; p < n_paths; ++p) {
    const FbmPath path = sampler.sample({3, static_cast<std::uint64_t>(p)});
    REQUIRE(path.values.size() == 2);
    sq[p] = path.values[1] * path.values[1];
  }
  CHECK(std::abs(mean(sq) - 1.0) < 4.0 * std::sqrt(2.0 / n_paths));  // Delta^{2H} = 1
}

TEST_CASE("circulant sampler matches a naive DFT reconstruction") {
  // independent oracle: rebuild the embedding spectrum and synthesize the
  // same draw with an O(M^2) DFT, consuming the identical Gaussian stream
  const std::size_t n = 16;
  const std::size_t m = 2 * n;
  const double hv = 0.7;
  UniformGrid grid(1.0, n);
  HurstParameter h(hv);
  const SeedKey key{314, 15};

  const auto gamma = [hv](std::size_t k) {
    const double kd = static_cast<double>(k);
    const double e = 2.0 * hv;
    return 0.5 * (std::pow(kd + 1.0, e) - 2.0 * std::pow(kd, e) + std::pow(std::abs(kd - 1.0), e));
  };
  std::vector<double> lambda(m, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k)
      lambda[j] += gamma(k <= n ? k : m - k) *
                   std::cos(2.0 * std::numbers::pi * static_cast<double>(j * k) / m);

  GaussianStream normal(key);
  std::vector<std::complex<double>> harmonics(m);
  harmonics[0] = std::sqrt(lambda[0] / m) * normal();
  for (std::size_t j = 1; j < n; ++j) {
    const double u = normal();
    const double v = normal();
    harmonics[j] = std::sqrt(lambda[j] / (2.0 * m)) * std::complex<double>(u, v);
    harmonics[m - j] = std::conj(harmonics[j]);
  }
  harmonics[n] = std::sqrt(lambda[n] / m) * normal();

  std::vector<double> noise(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < m; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(j * k) / m;
      noise[k] += harmonics[j].real() * std::cos(angle) - harmonics[j].imag() * std::sin(angle);
    }

  const double scale = std::pow(grid.mesh(), hv);
  std::vector<double> expected(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) expected[i + 1] = expected[i] + scale * noise[i];

  const FbmPath path = FbmCirculantSampler(grid, h).sample(key);
  for (std::size_t i = 0; i <= n; ++i)
    CHECK(path.values[i] == Catch::Approx(expected[i]).margin(1e-10));
}

TEST_CASE("circulant fallback delegates to the cholesky sampler") {
  UniformGrid grid(1.0, 16);
  HurstParameter h(0.75);
  // impossible spectrum tolerance forces the fallback branch
  FbmCirculantSampler forced(grid, h, -1.0);
  CHECK(forced.used_fallback());
  FbmCholeskySampler chol(grid, h);
  CHECK(forced.sample({9, 4}).values == chol.sample({9, 4}).values);
}

TEST_CASE("sample covariance matrix matches fbm_covariance entrywise", "[mc]") {
  const std::size_t n_paths = 100000;
  UniformGrid grid(1.0, 7);  // 8 nodes
  HurstParameter h(0.7);
  FbmCirculantSampler sampler(grid, h);
  // accumulate products over all node pairs
  const std::size_t nodes = 7;
  std::vector<std::vector<double>> products(nodes * nodes);
  for (auto& v : products) v.resize(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const FbmPath path = sampler.sample({404, p});
    for (std::size_t i = 1; i <= nodes; ++i)
      for (std::size_t j = 1; j <= nodes; ++j)
        products[(i - 1) * nodes + (j - 1)][p] = path.values[i] * path.values[j];
  }
  for (std::size_t i = 1; i <= nodes; ++i)
    for (std::size_t j = 1; j <= i; ++j) {
      auto& cell = products[(i - 1) * nodes + (j - 1)];
      const double expect = fbm_covariance(grid.time_at(i), grid.time_at(j), h);
      const double got = mean(cell);
      const double se = standard_error(cell);
      INFO("entry (" << i << "," << j << ")");
      CHECK(std::abs(got - expect) < 4.0 * se);
    }
}

TEST_CASE("non power-of-two grids sample correctly", "[mc]") {
  UniformGrid grid(1.0, 7);  // 8 nodes
  HurstParameter h(0.55);
  FbmCirculantSampler sampler(grid, h);
  REQUIRE_FALSE(sampler.used_fallback());
  const int n_paths = 20000;
  std::vector<double> sq(n_paths);
  for (int p = 0; p < n_paths; ++p) {
    const double v = sampler.sample({8, static_cast<std::uint64_t>(p)}).values.back();
    sq[p] = v * v;
  }
  CHECK(std::abs(mean(sq) - 1.0) < 4.0 * std::sqrt(2.0 / n_paths));
}

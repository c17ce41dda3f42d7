#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "fbmhedge/grid.hpp"
#include "fbmhedge/rng.hpp"

namespace fbmhedge {

// Covariance of standard fBm: cov(s,t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2.
inline double fbm_covariance(double s, double t, const HurstParameter& h) {
  if (s < 0.0 || t < 0.0)
    throw std::domain_error("fbm_covariance: times must be nonnegative");
  const double e = 2.0 * h.value();
  return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(t - s), e));
}

// One sampled fBm trajectory on a uniform grid; values[0] == 0.
struct FbmPath {
  UniformGrid grid;
  HurstParameter hurst;
  std::vector<double> values;  // steps+1 nodes
  SeedKey key;                 // provenance of the draw
};

// Geometric price path S_i = s0 * exp(B_i) over the same grid.
struct PricePath {
  double s0;
  FbmPath underlying;
  std::vector<double> prices;
};

inline PricePath to_price_path(const FbmPath& path, double s0) {
  if (!(s0 > 0.0))
    throw std::domain_error("to_price_path: initial price must be positive");
  PricePath out{s0, path, {}};
  out.prices.resize(path.values.size());
  for (std::size_t i = 0; i < path.values.size(); ++i)
    out.prices[i] = s0 * std::exp(path.values[i]);
  return out;
}

// Restriction of a fine path to a coarser grid sharing its nodes; exact
// subsampling, no interpolation. Needed by the two-scale experiments: the
// coarse trading path must be the restriction of the simulated fine path,
// never an independent draw.
inline FbmPath refine_restrict(const FbmPath& fine, std::size_t coarse_steps) {
  if (coarse_steps == 0 || fine.grid.steps() % coarse_steps != 0)
    throw std::domain_error("refine_restrict: coarse step count must divide the fine step count");
  const std::size_t stride = fine.grid.steps() / coarse_steps;
  FbmPath out{UniformGrid(fine.grid.horizon(), coarse_steps), fine.hurst, {}, fine.key};
  out.values.reserve(coarse_steps + 1);
  for (std::size_t i = 0; i <= coarse_steps; ++i)
    out.values.push_back(fine.values[i * stride]);
  return out;
}

inline PricePath restrict_price_path(const PricePath& fine, std::size_t coarse_steps) {
  PricePath out{fine.s0, refine_restrict(fine.underlying, coarse_steps), {}};
  const std::size_t stride = fine.underlying.grid.steps() / coarse_steps;
  out.prices.reserve(coarse_steps + 1);
  for (std::size_t i = 0; i <= coarse_steps; ++i)
    out.prices.push_back(fine.prices[i * stride]);
  return out;
}

// Exact sampler from the dense node covariance and its LLT factor.
// O(n^2) memory / O(n^3) setup: the reference implementation, meant for
// modest grids; the circulant sampler is the fast path for fine meshes.
class FbmCholeskySampler {
 public:
  FbmCholeskySampler(const UniformGrid& grid, const HurstParameter& h) : grid_(grid), hurst_(h) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid.steps());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double c = fbm_covariance(grid.time_at(static_cast<std::size_t>(i) + 1),
                                        grid.time_at(static_cast<std::size_t>(j) + 1), h);
        cov(i, j) = c;
        cov(j, i) = c;
      }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw NumericError("fBm covariance not numerically positive definite (steps=" +
                         std::to_string(grid.steps()) + ", H=" + std::to_string(h.value()) + ")");
    factor_ = llt.matrixL();
  }

  FbmPath sample(const SeedKey& key) const {
    GaussianStream normal(key);
    const Eigen::Index n = factor_.rows();
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal();
    const Eigen::VectorXd nodes = factor_.triangularView<Eigen::Lower>() * z;
    FbmPath path{grid_, hurst_, std::vector<double>(grid_.node_count(), 0.0), key};
    for (Eigen::Index i = 0; i < n; ++i)
      path.values[static_cast<std::size_t>(i) + 1] = nodes(i);
    return path;
  }

  const UniformGrid& grid() const { return grid_; }

 private:
  UniformGrid grid_;
  HurstParameter hurst_;
  Eigen::MatrixXd factor_;
};

inline FbmPath sample_fbm_cholesky(const UniformGrid& grid, const HurstParameter& h, const SeedKey& key) {
  return FbmCholeskySampler(grid, h).sample(key);
}

// Exact O(n log n) sampler: Davies-Harte circulant embedding of the
// fractional Gaussian noise covariance. The minimal 2n embedding of fGn
// has a nonnegative spectrum; values below -tol*max(lambda,1) mean the
// embedding failed numerically and the sampler falls back to Cholesky
// with a logged warning. Smaller negatives are clamped as roundoff.
class FbmCirculantSampler {
 public:
  explicit FbmCirculantSampler(const UniformGrid& grid, const HurstParameter& h,
                               double spectrum_tolerance = 1e-10)
      : grid_(grid), hurst_(h) {
    const std::size_t n = grid.steps();
    const std::size_t m = 2 * n;
    const double e = 2.0 * h.value();

    // fGn autocovariance at unit mesh; the actual mesh enters as delta^H
    // at synthesis time via self-similarity.
    auto gamma = [e](std::size_t k) {
      const double kd = static_cast<double>(k);
      return 0.5 * (std::pow(kd + 1.0, e) - 2.0 * std::pow(kd, e) +
                    std::pow(std::abs(kd - 1.0), e));
    };

    std::vector<std::complex<double>> row(m);
    for (std::size_t j = 0; j < m; ++j)
      row[j] = gamma(j <= n ? j : m - j);

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum(m);
    fft.fwd(spectrum, row);

    double max_lambda = 0.0;
    double min_lambda = 0.0;
    for (const auto& lam : spectrum) {
      max_lambda = std::max(max_lambda, lam.real());
      min_lambda = std::min(min_lambda, lam.real());
    }
    if (min_lambda < -spectrum_tolerance * std::max(max_lambda, 1.0)) {
      std::fprintf(stderr,
                   "fbmhedge: circulant embedding produced negative eigenvalue %.3e "
                   "(steps=%zu, H=%g); falling back to Cholesky sampling\n",
                   min_lambda, n, h.value());
      fallback_.emplace(grid, h);
      return;
    }

    coefficients_.resize(m);
    const double md = static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double lam = std::max(spectrum[j].real(), 0.0);
      const double denom = (j == 0 || j == n) ? md : 2.0 * md;
      coefficients_[j] = std::sqrt(lam / denom);
    }
  }

  FbmPath sample(const SeedKey& key) const {
    if (fallback_) return fallback_->sample(key);

    const std::size_t n = grid_.steps();
    const std::size_t m = 2 * n;
    GaussianStream normal(key);

    std::vector<std::complex<double>> harmonics(m);
    harmonics[0] = coefficients_[0] * normal();
    for (std::size_t j = 1; j < n; ++j) {
      const double u = normal();
      const double v = normal();
      harmonics[j] = coefficients_[j] * std::complex<double>(u, v);
      harmonics[m - j] = std::conj(harmonics[j]);
    }
    harmonics[n] = coefficients_[n] * normal();

    thread_local Eigen::FFT<double> fft;
    std::vector<std::complex<double>> noise(m);
    fft.fwd(noise, harmonics);

    const double scale = std::pow(grid_.mesh(), hurst_.value());
    FbmPath path{grid_, hurst_, std::vector<double>(grid_.node_count()), key};
    path.values[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      path.values[i + 1] = path.values[i] + scale * noise[i].real();
    return path;
  }

  bool used_fallback() const { return fallback_.has_value(); }
  const UniformGrid& grid() const { return grid_; }

 private:
  UniformGrid grid_;
  HurstParameter hurst_;
  std::vector<double> coefficients_;
  std::optional<FbmCholeskySampler> fallback_;
};

inline FbmPath sample_fbm_circulant(const UniformGrid& grid, const HurstParameter& h, const SeedKey& key) {
  return FbmCirculantSampler(grid, h).sample(key);
}

}  // namespace fbmhedge

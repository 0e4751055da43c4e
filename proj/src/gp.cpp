#include "pimsbo/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pimsbo/parallel.hpp"

namespace pimsbo {

namespace {

void check_noise_var(double noise_var) {
  if (!(noise_var > 0.0) || !std::isfinite(noise_var))
    throw std::invalid_argument("noise variance must be positive and finite");
}

Matrix noisy_gram(const KernelSpec& kernel, const Dataset& data) {
  Matrix k = kernel.gram(data.inputs());
  k.diagonal().array() += data.noise_var();
  return k;
}

Matrix cholesky_lower(const Matrix& a, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(what) +
                         ": Cholesky factorization failed (Gram ill-conditioned even with noise)");
  return llt.matrixL();
}

}  // namespace

Dataset::Dataset(Index dim, double noise_var)
    : inputs_(0, dim), observations_(0), noise_var_(noise_var) {
  check_noise_var(noise_var);
  if (dim < 1) throw std::invalid_argument("dataset dimension must be >= 1");
}

Dataset::Dataset(PointMatrix inputs, Vector observations, double noise_var)
    : inputs_(std::move(inputs)), observations_(std::move(observations)), noise_var_(noise_var) {
  check_noise_var(noise_var);
  if (inputs_.rows() != observations_.size())
    throw std::invalid_argument("dataset: inputs and observations differ in length");
  if (inputs_.cols() < 1) throw std::invalid_argument("dataset dimension must be >= 1");
  if (!inputs_.allFinite() || !observations_.allFinite())
    throw std::invalid_argument("dataset: non-finite entries");
}

void Dataset::add(ConstPointRef x, double y) {
  if (x.size() != dim()) throw std::invalid_argument("dataset: dimension mismatch on add");
  if (!x.allFinite() || !std::isfinite(y)) throw std::invalid_argument("dataset: non-finite entry");
  const Index n = size();
  inputs_.conservativeResize(n + 1, Eigen::NoChange);
  inputs_.row(n) = x.transpose();
  observations_.conservativeResize(n + 1);
  observations_(n) = y;
}

GpPosterior GpPosterior::fit(const KernelSpec& kernel, const Dataset& data) {
  const Index n = data.size();
  if (n == 0) return GpPosterior(kernel, data, Matrix(0, 0), Vector(0));
  Matrix chol = cholesky_lower(noisy_gram(kernel, data), "fit_posterior");
  Vector alpha = chol.triangularView<Eigen::Lower>().solve(data.observations());
  chol.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha);
  return GpPosterior(kernel, data, std::move(chol), std::move(alpha));
}

double clamp_variance(double var) {
  if (var >= 0.0) return var;
  if (var < -kVarianceClampTolerance)
    throw NumericalError("posterior variance " + std::to_string(var) +
                         " is negative beyond the clamp tolerance");
  return 0.0;
}

MeanVar GpPosterior::mean_var(ConstPointRef x) const {
  if (x.size() != dim())
    throw std::invalid_argument("posterior_mean_var: dimension mismatch (" +
                                std::to_string(x.size()) + " vs " + std::to_string(dim()) + ")");
  const double prior = kernel_(x, x);
  if (num_observations() == 0) return {0.0, prior};
  Vector kx(num_observations());
  for (Index i = 0; i < num_observations(); ++i) kx(i) = kernel_(data_.inputs().row(i).transpose(), x);
  const double mean = kx.dot(alpha_);
  chol_.triangularView<Eigen::Lower>().solveInPlace(kx);
  return {mean, clamp_variance(prior - kx.squaredNorm())};
}

PosteriorMoments GpPosterior::moments(const PointMatrix& points) const {
  if (points.cols() != dim()) throw std::invalid_argument("posterior moments: dimension mismatch");
  return kernels::posterior_moments(*this, points);
}

Matrix GpPosterior::whitened_cross(const PointMatrix& points) const {
  Matrix cross = kernel_.gram(data_.inputs(), points);
  if (num_observations() > 0) chol_.triangularView<Eigen::Lower>().solveInPlace(cross);
  return cross;
}

Matrix GpPosterior::covariance(const PointMatrix& points) const {
  if (points.cols() != dim()) throw std::invalid_argument("posterior covariance: dimension mismatch");
  Matrix cov = kernel_.gram(points);
  if (num_observations() > 0) {
    const Matrix v = whitened_cross(points);
    cov.noalias() -= v.transpose() * v;
  }
  return cov;
}

GpPosterior GpPosterior::with_observation(ConstPointRef x, double y) const {
  Dataset next = data_;
  next.add(x, y);
  return fit(kernel_, next);
}

double log_marginal_likelihood(const KernelSpec& kernel, const Dataset& data) {
  const Index n = data.size();
  if (n == 0) return 0.0;
  const Matrix chol = cholesky_lower(noisy_gram(kernel, data), "log_marginal_likelihood");
  const Vector white = chol.triangularView<Eigen::Lower>().solve(data.observations());
  const double log_det = 2.0 * chol.diagonal().array().log().sum();
  return -0.5 * white.squaredNorm() - 0.5 * log_det -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

KernelSpec fit_lengthscale(const KernelSpec& base, const Dataset& data,
                           std::span<const double> candidate_lengthscales) {
  if (candidate_lengthscales.empty())
    throw std::invalid_argument("fit_lengthscale: empty candidate list");
  for (double l : candidate_lengthscales)
    if (!(l > 0.0)) throw std::invalid_argument("fit_lengthscale: candidates must be positive");

  KernelSpec best = base.with_lengthscale(candidate_lengthscales.front());
  double best_lml = -std::numeric_limits<double>::infinity();
  for (double l : candidate_lengthscales) {
    const KernelSpec candidate = base.with_lengthscale(l);
    const double lml = log_marginal_likelihood(candidate, data);
    if (lml > best_lml || (lml == best_lml && l < best.lengthscale())) {
      best = candidate;
      best_lml = lml;
    }
  }
  return best;
}

double posterior_var_floor(double noise_var, Index num_observations) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("posterior_var_floor: noise variance must be positive");
  if (num_observations < 0) throw std::invalid_argument("posterior_var_floor: negative observation count");
  return noise_var / (noise_var + static_cast<double>(num_observations));
}

}  // namespace pimsbo

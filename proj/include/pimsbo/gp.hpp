#ifndef PIMSBO_GP_HPP
#define PIMSBO_GP_HPP

#include <span>
#include <vector>

#include "pimsbo/kernel.hpp"

namespace pimsbo {

/// Noisy observations y_i = f(x_i) + eps_i, eps_i ~ N(0, noise_var).
class Dataset {
 public:
  Dataset(Index dim, double noise_var);
  Dataset(PointMatrix inputs, Vector observations, double noise_var);

  Index size() const { return inputs_.rows(); }
  Index dim() const { return inputs_.cols(); }
  bool empty() const { return size() == 0; }
  double noise_var() const { return noise_var_; }
  const PointMatrix& inputs() const { return inputs_; }
  const Vector& observations() const { return observations_; }

  void add(ConstPointRef x, double y);

 private:
  PointMatrix inputs_;
  Vector observations_;
  double noise_var_;
};

struct MeanVar {
  double mean;
  double var;
};

/// Posterior mean and variance evaluated over a batch of points.
struct PosteriorMoments {
  Vector mean;
  Vector var;

  Vector stddev() const { return var.array().sqrt().matrix(); }
  Index size() const { return mean.size(); }
};

/// Largest negative variance silently clamped to zero; anything more negative
/// is reported as a NumericalError.
inline constexpr double kVarianceClampTolerance = 1e-12;

/// Zero-mean GP posterior given a dataset. Immutable after construction, so
/// concurrent queries are safe.
class GpPosterior {
 public:
  static GpPosterior fit(const KernelSpec& kernel, const Dataset& data);

  const KernelSpec& kernel() const { return kernel_; }
  const Dataset& data() const { return data_; }
  Index num_observations() const { return data_.size(); }
  Index dim() const { return data_.dim(); }
  double noise_var() const { return data_.noise_var(); }

  /// Lower Cholesky factor of K + noise_var * I.
  const Matrix& chol() const { return chol_; }
  /// (K + noise_var * I)^{-1} y.
  const Vector& alpha() const { return alpha_; }

  MeanVar mean_var(ConstPointRef x) const;

  /// Batched moments over the rows of `points` (OpenMP kernel).
  PosteriorMoments moments(const PointMatrix& points) const;

  /// Full posterior covariance over the rows of `points`.
  Matrix covariance(const PointMatrix& points) const;

  /// L^{-1} k(X, points): the whitened cross-covariance used by the
  /// variance and covariance formulas.
  Matrix whitened_cross(const PointMatrix& points) const;

  GpPosterior with_observation(ConstPointRef x, double y) const;

 private:
  GpPosterior(KernelSpec kernel, Dataset data, Matrix chol, Vector alpha)
      : kernel_(std::move(kernel)),
        data_(std::move(data)),
        chol_(std::move(chol)),
        alpha_(std::move(alpha)) {}

  KernelSpec kernel_;
  Dataset data_;
  Matrix chol_;
  Vector alpha_;
};

/// Clamp a computed variance at zero, throwing if the negative excess is
/// larger than kVarianceClampTolerance.
double clamp_variance(double var);

/// -1/2 y^T (K + s I)^{-1} y - 1/2 log det(K + s I) - n/2 log(2 pi).
double log_marginal_likelihood(const KernelSpec& kernel, const Dataset& data);

/// Grid search over lengthscales maximizing the log marginal likelihood.
/// Ties go to the smallest lengthscale.
KernelSpec fit_lengthscale(const KernelSpec& base, const Dataset& data,
                           std::span<const double> candidate_lengthscales);

/// Lower bound noise_var / (noise_var + n) on the posterior variance of any
/// unit-variance kernel after n observations.
double posterior_var_floor(double noise_var, Index num_observations);

}  // namespace pimsbo

#endif  // PIMSBO_GP_HPP

#ifndef PIMSBO_SAMPLING_HPP
#define PIMSBO_SAMPLING_HPP

#include <memory>
#include <optional>

#include "pimsbo/gp.hpp"
#include "pimsbo/rng.hpp"

namespace pimsbo {

inline constexpr Index kDefaultRffFeatures = 2000;
inline constexpr double kGridSamplerJitter = 1e-10;

/// Random Fourier features phi(x) = sqrt(2/m) cos(W x + b) whose inner
/// products approximate a stationary unit-variance kernel.
class FeatureMap {
 public:
  FeatureMap(Matrix frequencies, Vector phases);

  Index num_features() const { return frequencies_.rows(); }
  Index dim() const { return frequencies_.cols(); }
  const Matrix& frequencies() const { return frequencies_; }
  const Vector& phases() const { return phases_; }
  double scale() const { return scale_; }

  Vector features(ConstPointRef x) const;
  /// One feature row per input row.
  Matrix features(const PointMatrix& points) const;

  /// phi(x)^T phi(x').
  double approx_kernel(ConstPointRef x, ConstPointRef xp) const;

 private:
  Matrix frequencies_;
  Vector phases_;
  double scale_;
};

/// RBF: W ~ N(0, l^-2 I). Matern-nu: multivariate Student-t rows with 2 nu
/// degrees of freedom scaled by 1/l. Phases ~ U[0, 2 pi).
FeatureMap build_rff(const KernelSpec& kernel, Index dim, Index num_features, Rng& rng);

/// A draw from the posterior, either continuous (RFF weight space) or exact
/// on a finite grid.
class SamplePath {
 public:
  static SamplePath continuous(std::shared_ptr<const FeatureMap> fmap, Vector weights);
  static SamplePath on_grid(PointMatrix grid, Vector values);

  bool is_grid() const { return !fmap_; }
  const Vector& weights() const { return weights_; }
  const Vector& grid_values() const { return values_; }
  const PointMatrix& grid() const { return grid_; }
  const FeatureMap* feature_map() const { return fmap_.get(); }

  double eval(ConstPointRef x) const;
  /// Values at every row of `points`; for grid paths each row must be a grid member.
  Vector eval_batch(const PointMatrix& points) const;

 private:
  std::shared_ptr<const FeatureMap> fmap_;
  Vector weights_;
  PointMatrix grid_;
  Vector values_;
};

enum class RffMethod {
  kAuto,         // weight space when n >= m, data space otherwise
  kWeightSpace,  // factor the m x m matrix Phi^T Phi + s I
  kDataSpace     // prior draw updated through the n x n matrix Phi Phi^T + s I
};

/// w ~ N(A^{-1} Phi^T y, s A^{-1}), A = Phi^T Phi + s I. Both methods draw
/// from this law exactly; they differ only in cost.
SamplePath draw_posterior_sample(const GpPosterior& post, std::shared_ptr<const FeatureMap> fmap,
                                 Rng& rng, RffMethod method = RffMethod::kAuto);

/// Exact multivariate normal draws of the posterior restricted to a grid.
/// The covariance factor is computed once and reused across draws.
class ExactGridSampler {
 public:
  ExactGridSampler(const GpPosterior& post, PointMatrix grid);

  Index size() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov_factor() const { return factor_; }
  const PointMatrix& grid() const { return grid_; }

  Vector draw(Rng& rng) const;
  SamplePath draw_path(Rng& rng) const { return SamplePath::on_grid(grid_, draw(rng)); }

 private:
  PointMatrix grid_;
  Vector mean_;
  Matrix factor_;
};

SamplePath exact_grid_sample(const GpPosterior& post, const PointMatrix& grid, Rng& rng);

inline double sample_path_eval(const SamplePath& path, ConstPointRef x) { return path.eval(x); }

}  // namespace pimsbo

#endif  // PIMSBO_SAMPLING_HPP

#include "pimsbo/sampling.hpp"

#include <cmath>
#include <numbers>

#include "pimsbo/parallel.hpp"

namespace pimsbo {

FeatureMap::FeatureMap(Matrix frequencies, Vector phases)
    : frequencies_(std::move(frequencies)), phases_(std::move(phases)) {
  if (frequencies_.rows() < 1) throw std::invalid_argument("feature map needs at least one feature");
  if (phases_.size() != frequencies_.rows())
    throw std::invalid_argument("feature map: phases and frequencies differ in count");
  scale_ = std::sqrt(2.0 / static_cast<double>(frequencies_.rows()));
}

Vector FeatureMap::features(ConstPointRef x) const {
  if (x.size() != dim()) throw std::invalid_argument("feature map: dimension mismatch");
  return scale_ * (frequencies_ * x + phases_).array().cos().matrix();
}

Matrix FeatureMap::features(const PointMatrix& points) const {
  if (points.cols() != dim()) throw std::invalid_argument("feature map: dimension mismatch");
  return kernels::rff_features(*this, points);
}

double FeatureMap::approx_kernel(ConstPointRef x, ConstPointRef xp) const {
  return features(x).dot(features(xp));
}

FeatureMap build_rff(const KernelSpec& kernel, Index dim, Index num_features, Rng& rng) {
  if (num_features < 1) throw std::invalid_argument("build_rff: need at least one feature");
  if (dim < 1) throw std::invalid_argument("build_rff: dimension must be >= 1");
  if (kernel.family() == KernelFamily::kLinear)
    throw std::invalid_argument(
        "build_rff: linear kernel has no spectral density; use the exact grid sampler");
  if (kernel.family() == KernelFamily::kMatern && kernel.nu() != 1.5 && kernel.nu() != 2.5)
    throw std::invalid_argument("build_rff: matern kernel requires nu in {1.5, 2.5}");

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  const double inv_l = 1.0 / kernel.lengthscale();

  Matrix freq(num_features, dim);
  Vector phases(num_features);
  if (kernel.family() == KernelFamily::kRbf) {
    for (Index i = 0; i < num_features; ++i)
      for (Index j = 0; j < dim; ++j) freq(i, j) = normal(rng) * inv_l;
  } else {
    // Student-t as a Gaussian scaled by sqrt(df / chi2_df).
    const double df = 2.0 * kernel.nu();
    std::chi_squared_distribution<double> chi2(df);
    for (Index i = 0; i < num_features; ++i) {
      const double mix = std::sqrt(df / chi2(rng)) * inv_l;
      for (Index j = 0; j < dim; ++j) freq(i, j) = normal(rng) * mix;
    }
  }
  for (Index i = 0; i < num_features; ++i) phases(i) = uniform(rng);
  return FeatureMap(std::move(freq), std::move(phases));
}

SamplePath SamplePath::continuous(std::shared_ptr<const FeatureMap> fmap, Vector weights) {
  if (!fmap) throw std::invalid_argument("sample path: null feature map");
  if (weights.size() != fmap->num_features())
    throw std::invalid_argument("sample path: weight count does not match feature count");
  SamplePath path;
  path.fmap_ = std::move(fmap);
  path.weights_ = std::move(weights);
  return path;
}

SamplePath SamplePath::on_grid(PointMatrix grid, Vector values) {
  if (grid.rows() != values.size())
    throw std::invalid_argument("sample path: grid and value counts differ");
  SamplePath path;
  path.grid_ = std::move(grid);
  path.values_ = std::move(values);
  return path;
}

double SamplePath::eval(ConstPointRef x) const {
  if (fmap_) return fmap_->features(x).dot(weights_);
  if (x.size() != grid_.cols()) throw std::invalid_argument("sample path: dimension mismatch");
  for (Index i = 0; i < grid_.rows(); ++i)
    if (grid_.row(i).transpose() == x) return values_(i);
  throw std::invalid_argument("sample path: grid-form path queried off its grid");
}

Vector SamplePath::eval_batch(const PointMatrix& points) const {
  if (fmap_) return fmap_->features(points) * weights_;
  if (points.rows() == grid_.rows() && points == grid_) return values_;
  Vector out(points.rows());
  for (Index i = 0; i < points.rows(); ++i) out(i) = eval(points.row(i).transpose());
  return out;
}

namespace {

Vector weight_space_draw(const Matrix& phi, const Vector& y, double noise_var, Rng& rng) {
  const Index m = phi.cols();
  Matrix a = Matrix::Identity(m, m) * noise_var;
  a.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw NumericalError("draw_posterior_sample: factorization of Phi^T Phi + s I failed");
  const Vector mean = llt.solve(phi.transpose() * y);
  // Cov = s A^{-1} = s L^{-T} L^{-1}.
  Vector z = standard_normal_vector(m, rng);
  llt.matrixU().solveInPlace(z);
  return mean + std::sqrt(noise_var) * z;
}

Vector data_space_draw(const Matrix& phi, const Vector& y, double noise_var, Rng& rng) {
  const Index m = phi.cols();
  const Index n = phi.rows();
  Vector w0 = standard_normal_vector(m, rng);
  if (n == 0) return w0;
  const Vector eps0 = std::sqrt(noise_var) * standard_normal_vector(n, rng);
  Matrix b = Matrix::Identity(n, n) * noise_var;
  b.selfadjointView<Eigen::Lower>().rankUpdate(phi);
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success)
    throw NumericalError("draw_posterior_sample: factorization of Phi Phi^T + s I failed");
  const Vector resid = y - phi * w0 - eps0;
  return w0 + phi.transpose() * llt.solve(resid);
}

}  // namespace

SamplePath draw_posterior_sample(const GpPosterior& post, std::shared_ptr<const FeatureMap> fmap,
                                 Rng& rng, RffMethod method) {
  if (!fmap) throw std::invalid_argument("draw_posterior_sample: null feature map");
  if (fmap->dim() != post.dim())
    throw std::invalid_argument("draw_posterior_sample: feature map dimension mismatch");
  const Matrix phi = fmap->features(post.data().inputs());
  const Vector& y = post.data().observations();
  if (method == RffMethod::kAuto)
    method = phi.rows() >= phi.cols() ? RffMethod::kWeightSpace : RffMethod::kDataSpace;
  Vector w = method == RffMethod::kWeightSpace ? weight_space_draw(phi, y, post.noise_var(), rng)
                                               : data_space_draw(phi, y, post.noise_var(), rng);
  return SamplePath::continuous(std::move(fmap), std::move(w));
}

ExactGridSampler::ExactGridSampler(const GpPosterior& post, PointMatrix grid) : grid_(std::move(grid)) {
  if (grid_.rows() < 1) throw std::invalid_argument("exact_grid_sample: empty grid");
  mean_ = post.moments(grid_).mean;
  Matrix cov = post.covariance(grid_);
  cov.diagonal().array() += kGridSamplerJitter;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalError("exact_grid_sample: posterior covariance not factorizable after jitter");
  factor_ = llt.matrixL();
}

Vector ExactGridSampler::draw(Rng& rng) const {
  const Vector z = standard_normal_vector(size(), rng);
  return mean_ + factor_.triangularView<Eigen::Lower>() * z;
}

SamplePath exact_grid_sample(const GpPosterior& post, const PointMatrix& grid, Rng& rng) {
  return ExactGridSampler(post, grid).draw_path(rng);
}

}  // namespace pimsbo

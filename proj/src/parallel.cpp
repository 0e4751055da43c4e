#include "pimsbo/parallel.hpp"

#include <omp.h>

#include "pimsbo/sampling.hpp"

namespace pimsbo::kernels {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n < 1) throw std::invalid_argument("set_threads: need at least one thread");
  omp_set_num_threads(n);
}

Matrix gram(const KernelSpec& kernel, const PointMatrix& a, const PointMatrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("gram: dimension mismatch");
  const Index rows = a.rows();
  const Index cols = b.rows();
  Matrix k(rows, cols);
  if (rows == 0 || cols == 0) return k;
  // Surface evaluation errors (unsupported Matern nu) before the parallel loop.
  (void)kernel(a.row(0).transpose(), b.row(0).transpose());
  const bool par = rows * cols >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) k(i, j) = kernel(a.row(i).transpose(), b.row(j).transpose());
  }
  return k;
}

PosteriorMoments posterior_moments(const GpPosterior& post, const PointMatrix& points) {
  const Index count = points.rows();
  PosteriorMoments out{Vector::Zero(count), Vector(count)};
  const KernelSpec& kernel = post.kernel();
  const Index n = post.num_observations();
  if (n == 0) {
    for (Index i = 0; i < count; ++i)
      out.var(i) = kernel(points.row(i).transpose(), points.row(i).transpose());
    return out;
  }
  Matrix cross = gram(kernel, post.data().inputs(), points);
  out.mean.noalias() = cross.transpose() * post.alpha();
  const Matrix& chol = post.chol();
  const bool par = n * count >= kParallelThreshold;
  // Column-wise forward substitution: every query point is independent.
#pragma omp parallel for schedule(static) if (par)
  for (Index j = 0; j < count; ++j) {
    auto col = cross.col(j);
    chol.triangularView<Eigen::Lower>().solveInPlace(col);
    const auto x = points.row(j).transpose();
    out.var(j) = kernel(x, x) - col.squaredNorm();
  }
  // Clamp outside the parallel region so a NumericalError can propagate.
  for (Index j = 0; j < count; ++j) out.var(j) = clamp_variance(out.var(j));
  return out;
}

Matrix rff_features(const FeatureMap& fmap, const PointMatrix& points) {
  const Index rows = points.rows();
  const Index m = fmap.num_features();
  Matrix phi(rows, m);
  const Matrix& w = fmap.frequencies();
  const Vector& b = fmap.phases();
  const double scale = fmap.scale();
  const bool par = rows * m >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (Index i = 0; i < rows; ++i) {
    phi.row(i) = (scale * (w * points.row(i).transpose() + b).array().cos()).transpose();
  }
  return phi;
}

namespace serial {

Matrix gram(const KernelSpec& kernel, const PointMatrix& a, const PointMatrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("gram: dimension mismatch");
  Matrix k(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j) k(i, j) = kernel(a.row(i).transpose(), b.row(j).transpose());
  return k;
}

PosteriorMoments posterior_moments(const GpPosterior& post, const PointMatrix& points) {
  PosteriorMoments out{Vector(points.rows()), Vector(points.rows())};
  for (Index i = 0; i < points.rows(); ++i) {
    const MeanVar mv = post.mean_var(points.row(i).transpose());
    out.mean(i) = mv.mean;
    out.var(i) = mv.var;
  }
  return out;
}

Matrix rff_features(const FeatureMap& fmap, const PointMatrix& points) {
  Matrix phi(points.rows(), fmap.num_features());
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index k = 0; k < fmap.num_features(); ++k) {
      double arg = fmap.phases()(k);
      for (Index j = 0; j < points.cols(); ++j) arg += fmap.frequencies()(k, j) * points(i, j);
      phi(i, k) = fmap.scale() * std::cos(arg);
    }
  }
  return phi;
}

}  // namespace serial
}  // namespace pimsbo::kernels

#ifndef PIMSBO_PARALLEL_HPP
#define PIMSBO_PARALLEL_HPP

// Data-parallel inner loops. Every OpenMP kernel in `kernels` has a serial
// counterpart in `kernels::serial` that the tests compare against and the
// benchmark target times side by side.

#include "pimsbo/gp.hpp"
#include "pimsbo/kernel.hpp"

namespace pimsbo {

class FeatureMap;

namespace kernels {

/// Below this many output entries the OpenMP kernels run on one thread.
inline constexpr Index kParallelThreshold = 4096;

Matrix gram(const KernelSpec& kernel, const PointMatrix& a, const PointMatrix& b);

PosteriorMoments posterior_moments(const GpPosterior& post, const PointMatrix& points);

/// Feature matrix Phi with one row phi(x)^T per row of `points`.
Matrix rff_features(const FeatureMap& fmap, const PointMatrix& points);

/// Number of threads the OpenMP kernels will use.
int max_threads();
void set_threads(int n);

namespace serial {

Matrix gram(const KernelSpec& kernel, const PointMatrix& a, const PointMatrix& b);

/// One GpPosterior::mean_var call per point: no batching or factor reuse.
PosteriorMoments posterior_moments(const GpPosterior& post, const PointMatrix& points);

Matrix rff_features(const FeatureMap& fmap, const PointMatrix& points);

}  // namespace serial
}  // namespace kernels
}  // namespace pimsbo

#endif  // PIMSBO_PARALLEL_HPP

#include "pimsbo/kernel.hpp"

#include <cmath>

#include "pimsbo/parallel.hpp"

namespace pimsbo {

KernelSpec KernelSpec::rbf(double lengthscale) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale))
    throw std::invalid_argument("rbf kernel: lengthscale must be positive and finite");
  return KernelSpec(KernelFamily::kRbf, lengthscale, 0.0);
}

KernelSpec KernelSpec::matern(double nu, double lengthscale) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale))
    throw std::invalid_argument("matern kernel: lengthscale must be positive and finite");
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("matern kernel: nu must be positive and finite");
  return KernelSpec(KernelFamily::kMatern, lengthscale, nu);
}

KernelSpec KernelSpec::linear() { return KernelSpec(KernelFamily::kLinear, 1.0, 0.0); }

KernelSpec KernelSpec::with_lengthscale(double lengthscale) const {
  switch (family_) {
    case KernelFamily::kRbf:
      return rbf(lengthscale);
    case KernelFamily::kMatern:
      return matern(nu_, lengthscale);
    case KernelFamily::kLinear:
      break;
  }
  return *this;
}

double KernelSpec::from_sq_dist(double sq_dist) const {
  if (family_ == KernelFamily::kRbf)
    return std::exp(-sq_dist / (2.0 * lengthscale_ * lengthscale_));
  // Closed forms only; other smoothness values would need a Bessel function.
  const double r = std::sqrt(sq_dist) / lengthscale_;
  if (nu_ == 1.5) {
    const double s = std::sqrt(3.0) * r;
    return (1.0 + s) * std::exp(-s);
  }
  if (nu_ == 2.5) {
    const double s = std::sqrt(5.0) * r;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
  }
  throw std::invalid_argument("matern kernel: only nu in {1.5, 2.5} can be evaluated");
}

double KernelSpec::operator()(ConstPointRef x, ConstPointRef xp) const {
  if (family_ == KernelFamily::kLinear) return x.dot(xp);
  return from_sq_dist((x - xp).squaredNorm());
}

Matrix KernelSpec::gram(const PointMatrix& a, const PointMatrix& b) const {
  return kernels::gram(*this, a, b);
}

std::string KernelSpec::name() const {
  switch (family_) {
    case KernelFamily::kRbf:
      return "rbf(l=" + std::to_string(lengthscale_) + ")";
    case KernelFamily::kMatern:
      return "matern(nu=" + std::to_string(nu_) + ", l=" + std::to_string(lengthscale_) + ")";
    case KernelFamily::kLinear:
      return "linear";
  }
  return "unknown";
}

double kernel_eval(const KernelSpec& kernel, ConstPointRef x, ConstPointRef xp) {
  if (x.size() != xp.size())
    throw std::invalid_argument("kernel_eval: dimension mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(xp.size()) + ")");
  if (!x.allFinite() || !xp.allFinite())
    throw std::invalid_argument("kernel_eval: non-finite coordinate");
  return kernel(x, xp);
}

double lipschitz_sigma(const KernelSpec& kernel) {
  switch (kernel.family()) {
    case KernelFamily::kLinear:
      return 1.0;
    case KernelFamily::kRbf:
      return std::sqrt(2.0) / kernel.lengthscale();
    case KernelFamily::kMatern: {
      const double nu = kernel.nu();
      if (!(nu > 1.0))
        throw std::invalid_argument("lipschitz_sigma: matern kernel requires nu > 1");
      return std::sqrt(2.0) / kernel.lengthscale() * std::sqrt(nu / (nu - 1.0));
    }
  }
  throw std::invalid_argument("lipschitz_sigma: unknown kernel family");
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "rbf") return KernelFamily::kRbf;
  if (name == "matern") return KernelFamily::kMatern;
  if (name == "linear") return KernelFamily::kLinear;
  throw std::invalid_argument("unknown kernel family '" + name + "'");
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::kRbf:
      return "rbf";
    case KernelFamily::kMatern:
      return "matern";
    case KernelFamily::kLinear:
      return "linear";
  }
  return "unknown";
}

}  // namespace pimsbo

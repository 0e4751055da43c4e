#ifndef PIMSBO_KERNEL_HPP
#define PIMSBO_KERNEL_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace pimsbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Point sets are stored one point per row.
using PointMatrix = Eigen::MatrixXd;
using ConstPointRef = Eigen::Ref<const Eigen::VectorXd>;

/// Raised when a factorization fails or a numerical guard trips.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KernelFamily { kRbf, kMatern, kLinear };

/// Unit-variance kernel. RBF and Matern are stationary with k(x, x) = 1;
/// the linear kernel is x^T x'.
class KernelSpec {
 public:
  static KernelSpec rbf(double lengthscale);
  static KernelSpec matern(double nu, double lengthscale);
  static KernelSpec linear();

  KernelFamily family() const { return family_; }
  double lengthscale() const { return lengthscale_; }
  double nu() const { return nu_; }
  bool stationary() const { return family_ != KernelFamily::kLinear; }

  /// Copy with a different lengthscale (ignored for the linear kernel).
  KernelSpec with_lengthscale(double lengthscale) const;

  double operator()(ConstPointRef x, ConstPointRef xp) const;

  /// Cross-covariance between the rows of a and the rows of b.
  Matrix gram(const PointMatrix& a, const PointMatrix& b) const;
  Matrix gram(const PointMatrix& a) const { return gram(a, a); }

  std::string name() const;

  bool operator==(const KernelSpec&) const = default;

 private:
  KernelSpec(KernelFamily family, double lengthscale, double nu)
      : family_(family), lengthscale_(lengthscale), nu_(nu) {}

  double from_sq_dist(double sq_dist) const;

  KernelFamily family_;
  double lengthscale_;
  double nu_;
};

/// k(x, x'), validating dimensions and finiteness.
double kernel_eval(const KernelSpec& kernel, ConstPointRef x, ConstPointRef xp);

/// L1 Lipschitz constant of the posterior standard deviation for a
/// unit-variance kernel: 1 (linear), sqrt(2)/l (RBF),
/// sqrt(2)/l * sqrt(nu / (nu - 1)) (Matern, nu > 1).
double lipschitz_sigma(const KernelSpec& kernel);

KernelFamily parse_kernel_family(const std::string& name);
std::string to_string(KernelFamily family);

}  // namespace pimsbo

#endif  // PIMSBO_KERNEL_HPP

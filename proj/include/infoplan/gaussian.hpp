#pragma once

#include <Eigen/Dense>
#include <memory>

#include "infoplan/engine.hpp"

namespace infoplan {

/// Joint Gaussian over a variable catalog: sensing variables X (grouped in
/// regions) plus verification variables V, with per-sensing-index
/// measurement-noise variances (Z_s = X_s + W_s, W_s ~ N(0, noise[s])).
struct JointGaussian {
  VariableCatalog catalog;
  Eigen::VectorXd mean;       // catalog-ordered
  Eigen::MatrixXd cov;        // catalog-ordered, symmetric PSD
  std::vector<double> noise;  // one entry per catalog index; used for sensing indices only

  /// When true, the verification target is the whole sensing state X itself
  /// (Cov(X|V) = 0); the catalog then needs no verification indices.
  bool verification_is_state = false;

  void validate() const;
};

/// Cov(target | given) = S_tt - S_tg S_gg^{-1} S_gt, symmetrized.
/// Conditioning on the empty set returns Cov(target) unchanged. A singular
/// Cov(given) gets one jitter rescue (1e-10 * trace/n on the diagonal);
/// a second failure is a NumericError.
Eigen::MatrixXd condition_on(const Eigen::MatrixXd& cov, const IndexSet& target,
                             const IndexSet& given);

/// Prior and verification-conditioned covariances over the sensing indices,
/// in catalog sensing order. Immutable after build; MI queries extract
/// principal submatrices only.
struct ConditionedCache {
  Eigen::MatrixXd cov_prior;    // Cov(X_S)
  Eigen::MatrixXd cov_given_v;  // Cov(X_S | V)
  std::vector<double> noise;    // per sensing position
  IndexSet sensing;             // catalog index per sensing position
};

ConditionedCache build_cache(const JointGaussian& jg);

/// I(V; Z_sel | Z_given) = 1/2 [log det(P + R_sel) - log det(P|V + R_sel)]
/// where P is Cov(X_sel | Z_given), i.e. the cached matrices conditioned on
/// the noisy measurements at the given indices. Indices are catalog indices.
double gaussian_mi(const ConditionedCache& cache, const IndexSet& sel, const IndexSet& given);

/// Linear-Gaussian information engine over a ConditionedCache.
class GaussianEngine : public InformationEngine {
 public:
  explicit GaussianEngine(JointGaussian jg);

  const VariableCatalog& catalog() const override { return jg_.catalog; }
  const ConditionedCache& cache() const { return cache_; }
  const JointGaussian& model() const { return jg_; }

 protected:
  double evaluate(const IndexSet& sel, const IndexSet& given) const override;

 private:
  JointGaussian jg_;
  ConditionedCache cache_;
};

namespace detail {
/// In-place Cholesky log-determinant of a dense symmetric matrix stored
/// row-major in a[0..n*n). Applies one jitter rescue before failing.
double logdet_spd_inplace(double* a, int n);
}  // namespace detail

}  // namespace infoplan

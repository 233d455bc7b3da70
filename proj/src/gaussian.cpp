#include "infoplan/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace infoplan {

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const IndexSet& rows, const IndexSet& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(i, j) = m(rows[i], cols[j]);
  return out;
}

std::string matrix_to_string(const double* a, int n) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) os << a[i * n + j] << (j + 1 < n ? " " : "");
    os << (i + 1 < n ? "; " : "]");
  }
  return os.str();
}

// Cholesky factorization of the leading n x n row-major block; returns false
// on a nonpositive pivot. Destroys the buffer.
bool try_cholesky(double* a, int n) {
  for (int j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (int k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (d <= 0.0) return false;
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (int i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  return true;
}

// Eliminates the first g variables of a k x k symmetric row-major matrix,
// leaving Cov(rest | first g) in the trailing (k-g) x (k-g) block. One jitter
// rescue on a singular leading block.
void schur_eliminate(double* a, int k, int g, std::vector<double>& backup) {
  if (g == 0) return;
  backup.assign(a, a + k * k);
  for (int attempt = 0; attempt < 2; ++attempt) {
    bool ok = true;
    for (int j = 0; j < g && ok; ++j) {
      double d = a[j * k + j];
      if (d <= 0.0) {
        ok = false;
        break;
      }
      for (int i = j + 1; i < k; ++i) {
        double f = a[i * k + j] / d;
        for (int m = j + 1; m <= i; ++m) a[i * k + m] -= f * a[j * k + m];
        a[i * k + j] = f;  // scratch; trailing block is what matters
      }
      // keep symmetry of the updated trailing block
      for (int i = j + 1; i < k; ++i)
        for (int m = i + 1; m < k; ++m) a[i * k + m] = a[m * k + i];
    }
    if (ok) return;
    if (attempt == 0) {
      std::copy(backup.begin(), backup.end(), a);
      double tr = 0.0;
      for (int i = 0; i < k; ++i) tr += a[i * k + i];
      double jitter = 1e-10 * tr / k;
      for (int i = 0; i < k; ++i) a[i * k + i] += jitter;
    }
  }
  throw NumericError("conditioning block singular beyond jitter rescue: " + matrix_to_string(backup.data(), std::min(k, 8)));
}

}  // namespace

namespace detail {

double logdet_spd_inplace(double* a, int n) {
  if (n == 0) return 0.0;
  std::vector<double> backup(a, a + n * n);
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (try_cholesky(a, n)) {
      double ld = 0.0;
      for (int i = 0; i < n; ++i) ld += std::log(a[i * n + i]);
      return 2.0 * ld;
    }
    std::copy(backup.begin(), backup.end(), a);
    if (attempt == 0) {
      double tr = 0.0;
      for (int i = 0; i < n; ++i) tr += a[i * n + i];
      double jitter = 1e-10 * (tr > 0 ? tr / n : 1.0);
      for (int i = 0; i < n; ++i) a[i * n + i] += jitter;
    }
  }
  throw NumericError("matrix not positive definite after jitter: " + matrix_to_string(backup.data(), n));
}

}  // namespace detail

void JointGaussian::validate() const {
  const auto n = static_cast<Eigen::Index>(catalog.size());
  if (cov.rows() != n || cov.cols() != n)
    throw ArgumentError("covariance dimension does not match catalog size");
  if (mean.size() != 0 && mean.size() != n)
    throw ArgumentError("mean dimension does not match catalog size");
  if (noise.size() != catalog.size())
    throw ArgumentError("noise vector does not match catalog size");
  double scale = std::max(1.0, cov.diagonal().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ArgumentError("covariance not symmetric within tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9 * scale)
    throw ArgumentError("covariance not PSD: min eigenvalue " +
                        std::to_string(es.eigenvalues().minCoeff()));
  for (std::size_t i = 0; i < catalog.size(); ++i)
    if (catalog.is_sensing(i) && noise[i] < 0.0)
      throw ArgumentError("negative noise variance at index " + std::to_string(i));
  if (!verification_is_state && catalog.verification_indices().empty())
    throw ArgumentError("catalog has no verification variables");
}

Eigen::MatrixXd condition_on(const Eigen::MatrixXd& cov, const IndexSet& target,
                             const IndexSet& given) {
  detail::require_disjoint(target, given, "condition_on");
  Eigen::MatrixXd tt = submatrix(cov, target, target);
  if (given.empty()) return tt;

  Eigen::MatrixXd gg = submatrix(cov, given, given);
  Eigen::MatrixXd tg = submatrix(cov, target, given);
  Eigen::LLT<Eigen::MatrixXd> llt(gg);
  if (llt.info() != Eigen::Success) {
    double jitter = 1e-10 * gg.trace() / static_cast<double>(gg.rows());
    gg.diagonal().array() += jitter;
    llt.compute(gg);
    if (llt.info() != Eigen::Success)
      throw NumericError("Cov(given) singular beyond jitter rescue in condition_on");
  }
  Eigen::MatrixXd out = tt - tg * llt.solve(tg.transpose());
  return 0.5 * (out + out.transpose());
}

ConditionedCache build_cache(const JointGaussian& jg) {
  jg.validate();
  ConditionedCache cache;
  cache.sensing = jg.catalog.sensing_indices();
  cache.cov_prior = submatrix(jg.cov, cache.sensing, cache.sensing);
  if (jg.verification_is_state) {
    cache.cov_given_v = Eigen::MatrixXd::Zero(cache.sensing.size(), cache.sensing.size());
  } else {
    cache.cov_given_v = condition_on(jg.cov, cache.sensing, jg.catalog.verification_indices());
  }
  cache.noise.reserve(cache.sensing.size());
  for (VariableIndex v : cache.sensing) cache.noise.push_back(jg.noise[v]);
  return cache;
}

double gaussian_mi(const ConditionedCache& cache, const IndexSet& sel, const IndexSet& given) {
  const int g = static_cast<int>(given.size());
  const int s = static_cast<int>(sel.size());
  const int k = g + s;
  if (s == 0) throw ArgumentError("gaussian_mi: empty selection");

  // catalog index -> sensing position (cache.sensing is ascending)
  auto pos = [&cache](VariableIndex v) -> int {
    auto it = std::lower_bound(cache.sensing.begin(), cache.sensing.end(), v);
    if (it == cache.sensing.end() || *it != v)
      throw CatalogError("index " + std::to_string(v) + " is not a sensing variable");
    return static_cast<int>(it - cache.sensing.begin());
  };

  thread_local std::vector<int> p;
  thread_local std::vector<double> a, b, scratch;
  p.clear();
  for (VariableIndex v : given) p.push_back(pos(v));
  for (VariableIndex v : sel) p.push_back(pos(v));

  a.resize(static_cast<std::size_t>(k) * k);
  b.resize(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      a[i * k + j] = cache.cov_prior(p[i], p[j]);
      b[i * k + j] = cache.cov_given_v(p[i], p[j]);
    }
  // conditioning is on the noisy measurements Z_given, so R enters here too
  for (int i = 0; i < g; ++i) {
    double r = cache.noise[p[i]];
    a[i * k + i] += r;
    b[i * k + i] += r;
  }
  schur_eliminate(a.data(), k, g, scratch);
  schur_eliminate(b.data(), k, g, scratch);

  // trailing s x s blocks are Cov(X_sel | Z_given) and Cov(X_sel | Z_given, V)
  thread_local std::vector<double> pa, pb;
  pa.resize(static_cast<std::size_t>(s) * s);
  pb.resize(static_cast<std::size_t>(s) * s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      pa[i * s + j] = a[(g + i) * k + (g + j)];
      pb[i * s + j] = b[(g + i) * k + (g + j)];
    }
  for (int i = 0; i < s; ++i) {
    double r = cache.noise[p[g + i]];
    pa[i * s + i] += r;
    pb[i * s + i] += r;
  }
  return 0.5 * (detail::logdet_spd_inplace(pa.data(), s) - detail::logdet_spd_inplace(pb.data(), s));
}

GaussianEngine::GaussianEngine(JointGaussian jg) : jg_(std::move(jg)), cache_(build_cache(jg_)) {}

double GaussianEngine::evaluate(const IndexSet& sel, const IndexSet& given) const {
  if (sel.empty()) return 0.0;
  return gaussian_mi(cache_, sel, given);
}

}  // namespace infoplan

#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "infoplan/common.hpp"

namespace infoplan {

/// Contract every utility and potential is computed through. An engine
/// evaluates I(V; Z_sel) and I(V; Z_sel | Z_given) over disjoint subsets
/// of its sensing catalog, in nats. Implementations must be safe for
/// concurrent read-only evaluation once constructed.
class InformationEngine {
 public:
  virtual ~InformationEngine() = default;

  virtual const VariableCatalog& catalog() const = 0;

  /// Tolerance below which negative MI values are treated as roundoff.
  virtual double clamp_tolerance() const { return 1e-9; }

  /// I(V; Z_sel | Z_given), nats. sel and given must be disjoint sensing
  /// index sets. Values in (-tol, 0) are clamped to 0; anything more
  /// negative raises NumericError.
  double conditional_mi(const IndexSet& sel, const IndexSet& given) const {
    validate(sel, given);
    double v = evaluate(sel, given);
    if (v < 0.0) {
      if (v < -clamp_tolerance())
        throw NumericError("negative mutual information " + std::to_string(v) + " beyond tolerance; covariance is broken");
      v = 0.0;
    }
    return v;
  }

  /// I(V; Z_sel), nats.
  double mi(const IndexSet& sel) const { return conditional_mi(sel, {}); }

 protected:
  virtual double evaluate(const IndexSet& sel, const IndexSet& given) const = 0;

  void validate(const IndexSet& sel, const IndexSet& given) const {
    const auto& cat = catalog();
    for (VariableIndex v : sel)
      if (!cat.is_sensing(v)) throw CatalogError("index " + std::to_string(v) + " is not a sensing variable");
    for (VariableIndex v : given)
      if (!cat.is_sensing(v)) throw CatalogError("index " + std::to_string(v) + " is not a sensing variable");
    detail::require_unique(sel, "sel");
    detail::require_unique(given, "given");
    detail::require_disjoint(sel, given, "conditional_mi");
  }
};

/// Residual of the chain-rule identity
///   I(V; union sets) = sum_k I(V; sets[perm[k]] | sets[perm[0..k-1]])
/// for pairwise-disjoint sets. Returned for test assertion.
inline double chain_rule_check(const InformationEngine& engine,
                               const std::vector<IndexSet>& sets,
                               const std::vector<std::size_t>& permutation) {
  if (permutation.size() != sets.size())
    throw ArgumentError("permutation size does not match set count");
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      detail::require_disjoint(sets[i], sets[j], "chain_rule_check");

  IndexSet all;
  for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
  double lhs = engine.mi(all);

  double rhs = 0.0;
  IndexSet given;
  for (std::size_t k : permutation) {
    rhs += engine.conditional_mi(sets[k], given);
    given.insert(given.end(), sets[k].begin(), sets[k].end());
  }
  return std::abs(lhs - rhs);
}

}  // namespace infoplan

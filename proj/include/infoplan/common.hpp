#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace infoplan {

/// Index into a scenario's variable catalog.
using VariableIndex = std::size_t;
using IndexSet = std::vector<VariableIndex>;

/// Malformed arguments (overlapping index sets, bad partitions, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Index outside the catalog, or used with the wrong role (sensing vs verification).
class CatalogError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Broken numerics: non-PSD covariance, failed factorization, blown-up integration.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Catalog of scenario variables. Sensing variables carry a region id
/// (0..num_regions-1); verification variables are tagged -1. Regions are
/// disjoint by construction since each index has exactly one tag.
class VariableCatalog {
 public:
  VariableCatalog() = default;
  explicit VariableCatalog(std::vector<int> region_tags) : tags_(std::move(region_tags)) {
    for (int t : tags_) {
      if (t >= num_regions_) num_regions_ = t + 1;
    }
  }

  std::size_t size() const { return tags_.size(); }
  int num_regions() const { return num_regions_; }

  bool is_sensing(VariableIndex v) const { return tag(v) >= 0; }
  bool is_verification(VariableIndex v) const { return tag(v) < 0; }

  int tag(VariableIndex v) const {
    if (v >= tags_.size()) throw CatalogError("variable index " + std::to_string(v) + " outside catalog of size " + std::to_string(tags_.size()));
    return tags_[v];
  }

  IndexSet region(int r) const {
    IndexSet out;
    for (std::size_t i = 0; i < tags_.size(); ++i)
      if (tags_[i] == r) out.push_back(i);
    return out;
  }
  IndexSet sensing_indices() const {
    IndexSet out;
    for (std::size_t i = 0; i < tags_.size(); ++i)
      if (tags_[i] >= 0) out.push_back(i);
    return out;
  }
  IndexSet verification_indices() const {
    IndexSet out;
    for (std::size_t i = 0; i < tags_.size(); ++i)
      if (tags_[i] < 0) out.push_back(i);
    return out;
  }

 private:
  std::vector<int> tags_;
  int num_regions_ = 0;
};

namespace detail {

inline void require_disjoint(const IndexSet& a, const IndexSet& b, const char* what) {
  for (VariableIndex x : a)
    for (VariableIndex y : b)
      if (x == y) throw ArgumentError(std::string(what) + ": sets overlap at index " + std::to_string(x));
}

inline void require_unique(const IndexSet& a, const char* what) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (a[i] == a[j]) throw ArgumentError(std::string(what) + ": duplicate index " + std::to_string(a[i]));
}

}  // namespace detail

}  // namespace infoplan

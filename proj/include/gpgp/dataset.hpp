// Copyright 2026 The GPGP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gpgp/error.hpp"

namespace gpgp {

// n items with p real covariates each. Row i of `covariates` belongs to ids[i].
struct ItemTable {
  std::vector<std::string> ids;
  Eigen::MatrixXd covariates;

  std::size_t size() const { return static_cast<std::size_t>(covariates.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(covariates.cols()); }
};

// One observed comparison. y = +1 means `first` beat `second`.
struct Duel {
  std::size_t first = 0;
  std::size_t second = 0;
  int y = 1;

  friend bool operator==(const Duel&, const Duel&) = default;
};

struct PreferenceDataset {
  ItemTable items;
  std::vector<Duel> duels;

  std::size_t num_items() const { return items.size(); }
};

// Checks the dataset invariants: finite covariates, one id per row, valid
// indices, no self-duels, labels in {-1,+1}.
inline void validate(const PreferenceDataset& ds) {
  const auto n = ds.items.size();
  if (!ds.items.ids.empty() && ds.items.ids.size() != n)
    throw InputError("item table has " + std::to_string(ds.items.ids.size()) +
                     " ids for " + std::to_string(n) + " rows");
  if (!ds.items.covariates.allFinite())
    throw InputError("item covariates must be finite");
  for (std::size_t k = 0; k < ds.duels.size(); ++k) {
    const Duel& d = ds.duels[k];
    if (d.first >= n || d.second >= n)
      throw InputError("duel " + std::to_string(k) + " references item out of range");
    if (d.first == d.second)
      throw InputError("duel " + std::to_string(k) + " is a self-duel");
    if (d.y != 1 && d.y != -1)
      throw InputError("duel " + std::to_string(k) + " has label " +
                       std::to_string(d.y) + "; expected +1 or -1");
  }
}

// Per-column zero mean, unit variance. Constant columns are centred only.
inline Eigen::MatrixXd standardize(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x;
  const auto n = x.rows();
  if (n == 0) return out;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mean = x.col(c).mean();
    out.col(c).array() -= mean;
    const double var = out.col(c).squaredNorm() / static_cast<double>(n);
    if (var > 0.0) out.col(c) /= std::sqrt(var);
  }
  return out;
}

// Canonical unordered key of a pair, smaller index first.
inline std::pair<std::size_t, std::size_t> unordered_key(std::size_t i, std::size_t j) {
  return i < j ? std::pair{i, j} : std::pair{j, i};
}

}  // namespace gpgp

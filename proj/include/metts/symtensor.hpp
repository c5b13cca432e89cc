// Copyright 2026 The metts-trotter Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef METTS_SYMTENSOR_HPP
#define METTS_SYMTENSOR_HPP

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace metts {

using cplx = std::complex<double>;

enum class Direction { in, out };

/// One charge sector of an index: all basis states carrying `charge`.
struct Sector {
  int charge = 0;
  int dim = 1;
  friend bool operator==(const Sector&, const Sector&) = default;
};

/// Tensor index graded by U(1) particle number.
///
/// Sectors are sorted by strictly increasing charge. Dense positions are laid
/// out sector by sector in that order.
class ChargeIndex {
 public:
  ChargeIndex() = default;
  ChargeIndex(std::vector<Sector> sectors, Direction dir);

  const std::vector<Sector>& sectors() const { return sectors_; }
  const Sector& sector(int k) const { return sectors_[k]; }
  Direction direction() const { return dir_; }
  /// +1 for outgoing, -1 for incoming.
  int sign() const { return dir_ == Direction::out ? 1 : -1; }
  int num_sectors() const { return static_cast<int>(sectors_.size()); }
  int dim() const { return dim_; }
  int offset(int k) const { return offsets_[k]; }
  /// Position of the sector with the given charge, or -1.
  int find(int charge) const;
  ChargeIndex dual() const;

  friend bool operator==(const ChargeIndex& a, const ChargeIndex& b) {
    return a.dir_ == b.dir_ && a.sectors_ == b.sectors_;
  }

 private:
  std::vector<Sector> sectors_;
  std::vector<int> offsets_;
  Direction dir_ = Direction::in;
  int dim_ = 0;
};

/// Row-major dense array of complex numbers.
class DenseArray {
 public:
  DenseArray() : data_(1, cplx{}) {}
  explicit DenseArray(std::vector<int> shape);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::size_t size() const { return data_.size(); }
  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  std::vector<cplx>& values() { return data_; }
  const std::vector<cplx>& values() const { return data_; }

  cplx& operator()(std::span<const int> idx) { return data_[linear(idx)]; }
  const cplx& operator()(std::span<const int> idx) const { return data_[linear(idx)]; }
  std::size_t linear(std::span<const int> idx) const;

  /// Result axis k is source axis perm[k].
  DenseArray permuted(std::span<const int> perm) const;
  double norm_sq() const;

 private:
  std::vector<int> shape_;
  std::vector<cplx> data_;
};

/// Sector position per index.
using BlockKey = std::vector<int>;

/// Block-sparse tensor with an additive U(1) charge law.
///
/// A block keyed by sector positions (k_0, ..., k_{r-1}) may exist only if
/// sum_i sign_i * charge(index_i, k_i) == total_charge, where sign is +1 for
/// outgoing and -1 for incoming indices. Absent blocks are zero.
class SymTensor {
 public:
  SymTensor() = default;
  SymTensor(std::vector<ChargeIndex> indices, int total_charge);

  int rank() const { return static_cast<int>(indices_.size()); }
  const ChargeIndex& index(int k) const { return indices_[k]; }
  const std::vector<ChargeIndex>& indices() const { return indices_; }
  int total_charge() const { return total_charge_; }

  const std::map<BlockKey, DenseArray>& blocks() const { return blocks_; }
  std::size_t num_blocks() const { return blocks_.size(); }

  bool allowed(const BlockKey& key) const;
  std::vector<int> block_shape(const BlockKey& key) const;
  const DenseArray* find_block(const BlockKey& key) const;
  /// Returns the block, inserting zeros if absent. Throws on a forbidden key.
  DenseArray& block(const BlockKey& key);
  void set_block(const BlockKey& key, DenseArray data);
  void erase_block(const BlockKey& key) { blocks_.erase(key); }

  double norm_sq() const;
  double norm() const;
  /// Throws StructuralError if any stored block breaks the charge law or its
  /// shape disagrees with the sector degeneracies.
  void check_invariants() const;

 private:
  std::vector<ChargeIndex> indices_;
  int total_charge_ = 0;
  std::map<BlockKey, DenseArray> blocks_;
};

/// Contracts a's index pairs[i].first with b's index pairs[i].second.
/// Result indices are a's free indices followed by b's, in original order.
SymTensor contract(const SymTensor& a, const SymTensor& b,
                   std::span<const std::pair<int, int>> pairs);
SymTensor contract(const SymTensor& a, const SymTensor& b,
                   std::initializer_list<std::pair<int, int>> pairs);

/// Result index k is source index perm[k].
SymTensor permute(const SymTensor& t, std::span<const int> perm);
SymTensor permute(const SymTensor& t, std::initializer_list<int> perm);

/// Complex conjugate with every index direction flipped.
SymTensor conj(const SymTensor& t);
SymTensor scaled(const SymTensor& t, cplx factor);
/// a + alpha * b on identical index structure.
SymTensor add(const SymTensor& a, const SymTensor& b, cplx alpha = 1.0);
/// Elementwise sum of conj(a) * b.
cplx inner_product(const SymTensor& a, const SymTensor& b);

/// Multiplies slice j of sector k along `axis` by weights[k][j].
SymTensor scale_along(const SymTensor& t, int axis,
                      const std::vector<std::vector<double>>& weights);

DenseArray to_dense(const SymTensor& t);
/// Inverse of to_dense. Entries in charge-forbidden positions must be below
/// `tol` in magnitude; blocks that are identically zero are not stored.
SymTensor from_dense(std::vector<ChargeIndex> indices, int total_charge,
                     const DenseArray& dense, double tol = 1e-12);

struct TruncationSpec {
  int max_bond = 1 << 20;
  /// Discarded squared-singular-value weight relative to the squared norm.
  double cutoff = 0.0;

  void validate() const;
  static TruncationSpec exact() { return {}; }
};

struct SvdResult {
  /// Left indices followed by the new outgoing bond; total charge 0.
  SymTensor u;
  /// New incoming bond followed by the remaining indices.
  SymTensor v;
  /// Kept singular values per sector of the new bond.
  std::vector<std::vector<double>> values;
  /// All kept singular values, descending.
  std::vector<double> sorted;
  /// Absolute squared weight of the dropped singular values.
  double discarded_weight = 0.0;
  /// Sum of all squared singular values before truncation.
  double norm_sq = 0.0;

  int bond_dim() const { return static_cast<int>(sorted.size()); }
};

/// Charge-block SVD of t grouped as (left | rest). Singular values are ranked
/// across sectors; values degenerate with the last kept one are kept too.
SvdResult svd_truncate(const SymTensor& t, std::span<const int> left,
                       const TruncationSpec& spec);
SvdResult svd_truncate(const SymTensor& t, std::initializer_list<int> left,
                       const TruncationSpec& spec);

}  // namespace metts

#endif  // METTS_SYMTENSOR_HPP

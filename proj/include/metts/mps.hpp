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

#ifndef METTS_MPS_HPP
#define METTS_MPS_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "metts/rng.hpp"
#include "metts/symtensor.hpp"

namespace metts {

/// Local Hilbert space of one chain site. State s carries charges[s]; charges
/// are strictly increasing so that s is also the dense position on the index.
struct LocalSpace {
  std::vector<int> charges;

  /// Boson site with occupations 0..d-1.
  static LocalSpace boson(int d);
  /// Purification partner of a d-level boson site. State s holds d-1-s
  /// quanta counted with negative sign, i.e. charge s-(d-1).
  static LocalSpace ancilla(int d);

  int dim() const { return static_cast<int>(charges.size()); }
  ChargeIndex index(Direction dir) const;
  friend bool operator==(const LocalSpace&, const LocalSpace&) = default;
};

/// Occupation-basis product configuration (local state per site).
struct CpsConfig {
  std::vector<int> occupations;

  int size() const { return static_cast<int>(occupations.size()); }
  int total() const;
  friend bool operator==(const CpsConfig&, const CpsConfig&) = default;
  friend auto operator<=>(const CpsConfig&, const CpsConfig&) = default;
};

/// Finite matrix product state.
///
/// Site tensors are rank 3 with indices (left bond: in, physical: in,
/// right bond: out) and total charge 0, so the right bond carries the
/// cumulative charge. The first left bond is the single sector {0}; the last
/// right bond holds the global charge.
class MatrixProductState {
 public:
  MatrixProductState(std::vector<SymTensor> sites, std::vector<LocalSpace> spaces,
                     std::optional<int> center);

  int length() const { return static_cast<int>(sites_.size()); }
  const SymTensor& site(int m) const { return sites_[m]; }
  /// Replaces a site tensor; the orthogonality center is forgotten.
  void set_site(int m, SymTensor t);
  /// Replaces the tensor at the orthogonality center, keeping the gauge.
  void set_center_site(SymTensor t);
  const LocalSpace& space(int m) const { return spaces_[m]; }
  const std::vector<LocalSpace>& spaces() const { return spaces_; }
  std::vector<int> local_dims() const;

  std::optional<int> center() const { return center_; }
  int global_charge() const;
  int bond_dim(int bond) const { return sites_[bond].index(2).dim(); }
  int max_bond() const;

  /// Moves the orthogonality center from `center()` to center()+1 or -1.
  /// Truncation applies to the bond being crossed; returns discarded weight.
  double move_center_right(const TruncationSpec& spec = TruncationSpec::exact());
  double move_center_left(const TruncationSpec& spec = TruncationSpec::exact());

  /// Stores a two-site tensor (left, phys_m, phys_m+1, right) back into sites
  /// m and m+1 via SVD; the center ends on m+1. Returns the SVD.
  SvdResult split_two_site(const SymTensor& theta, int m, const TruncationSpec& spec,
                           bool normalize);
  SymTensor two_site(int m) const;

  void check_invariants() const;

 private:
  friend MatrixProductState canonicalize(MatrixProductState psi, int new_center);
  void shift_right(int m, const TruncationSpec& spec, double* discarded);
  void shift_left(int m, const TruncationSpec& spec, double* discarded);

  std::vector<SymTensor> sites_;
  std::vector<LocalSpace> spaces_;
  std::optional<int> center_;
};

/// Bond-dimension-1 state for a configuration of local states.
MatrixProductState from_cps(const CpsConfig& config, const std::vector<LocalSpace>& spaces);
/// Boson chain with the same local dimension on every site.
MatrixProductState from_cps(const CpsConfig& config, int local_dim);

MatrixProductState canonicalize(MatrixProductState psi, int new_center);

cplx inner(const MatrixProductState& a, const MatrixProductState& b);
/// Rescales to unit norm; throws NumericalError on a vanishing norm.
void normalize(MatrixProductState& psi);
double norm(const MatrixProductState& psi);

/// Environment helpers. A left environment has indices (bra bond: in,
/// ket bond: out); a right environment has (bra bond: out, ket bond: in).
SymTensor left_boundary(const MatrixProductState& bra, const MatrixProductState& ket);
SymTensor right_boundary(const MatrixProductState& bra, const MatrixProductState& ket);
SymTensor transfer_right(const SymTensor& env, const SymTensor& bra_site, const SymTensor& ket_site);
SymTensor transfer_left(const SymTensor& env, const SymTensor& bra_site, const SymTensor& ket_site);
cplx close_environments(const SymTensor& left, const SymTensor& right);

/// Multiplies a site tensor's physical slice s by values[s].
SymTensor apply_diagonal(const SymTensor& site, std::span<const double> values);

/// Two-site operator as a tensor (out_1: in, out_2: in, in_1: out, in_2: out)
/// from a (d1*d2)x(d1*d2) matrix indexed by s1*d2+s2. Throws StructuralError
/// if the matrix does not conserve particle number.
SymTensor bond_operator(const Eigen::MatrixXcd& m, const LocalSpace& s1, const LocalSpace& s2);
/// Applies a bond_operator to a two-site tensor (left, s1, s2, right).
SymTensor apply_bond_operator(const SymTensor& op, const SymTensor& theta);

/// <psi| term_{bond,bond+1} |psi> / <psi|psi>. term must be Hermitian.
double expect_bond(const MatrixProductState& psi, const Eigen::MatrixXcd& term, int bond);

/// Matrix of <o_i o_j> for a diagonal single-site operator with eigenvalue
/// values[s] on local state s, over sites first..first+count-1.
Eigen::MatrixXd correlation_matrix(const MatrixProductState& psi, std::span<const double> values,
                                   int first = 0, int count = -1);

struct CollapseResult {
  CpsConfig config;  // local states on the collapsed range
  MatrixProductState state;
  double log_probability = 0.0;
};

/// Sequentially samples sites first..last (inclusive, left to right) in the
/// local basis with Born probabilities and projects onto the outcome.
CollapseResult collapse_to_cps(MatrixProductState psi, Rng& rng, int first, int last);
CollapseResult collapse_to_cps(MatrixProductState psi, Rng& rng);

}  // namespace metts

#endif  // METTS_MPS_HPP

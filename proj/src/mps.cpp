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

#include "metts/mps.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "metts/errors.hpp"

namespace metts {

// ----------------------------------------------------------------- LocalSpace

LocalSpace LocalSpace::boson(int d) {
  if (d < 1) throw DomainError("LocalSpace: dimension must be positive");
  LocalSpace s;
  for (int n = 0; n < d; ++n) s.charges.push_back(n);
  return s;
}

LocalSpace LocalSpace::ancilla(int d) {
  if (d < 1) throw DomainError("LocalSpace: dimension must be positive");
  LocalSpace s;
  for (int k = 0; k < d; ++k) s.charges.push_back(k - (d - 1));
  return s;
}

ChargeIndex LocalSpace::index(Direction dir) const {
  std::vector<Sector> sec;
  for (int q : charges) sec.push_back({q, 1});
  return ChargeIndex(std::move(sec), dir);
}

int CpsConfig::total() const { return std::accumulate(occupations.begin(), occupations.end(), 0); }

// ------------------------------------------------------------ MatrixProductState

MatrixProductState::MatrixProductState(std::vector<SymTensor> sites, std::vector<LocalSpace> spaces,
                                       std::optional<int> center)
    : sites_(std::move(sites)), spaces_(std::move(spaces)), center_(center) {
  check_invariants();
}

void MatrixProductState::set_center_site(SymTensor t) {
  if (!center_) throw StructuralError("set_center_site: state has no orthogonality center");
  sites_[*center_] = std::move(t);
}

void MatrixProductState::set_site(int m, SymTensor t) {
  sites_[m] = std::move(t);
  center_.reset();
}

std::vector<int> MatrixProductState::local_dims() const {
  std::vector<int> d;
  for (const auto& s : spaces_) d.push_back(s.dim());
  return d;
}

int MatrixProductState::global_charge() const {
  const auto& last = sites_.back().index(2);
  return last.sector(0).charge;
}

int MatrixProductState::max_bond() const {
  int b = 1;
  for (int m = 0; m + 1 < length(); ++m) b = std::max(b, bond_dim(m));
  return b;
}

void MatrixProductState::check_invariants() const {
  const int n = length();
  if (n == 0) throw StructuralError("MatrixProductState: empty chain");
  if (static_cast<int>(spaces_.size()) != n)
    throw StructuralError("MatrixProductState: one local space per site required");
  if (center_ && (*center_ < 0 || *center_ >= n))
    throw StructuralError("MatrixProductState: center out of range");
  for (int m = 0; m < n; ++m) {
    const auto& t = sites_[m];
    if (t.rank() != 3 || t.total_charge() != 0)
      throw StructuralError("MatrixProductState: site tensor must be rank 3 with zero charge");
    if (t.index(0).direction() != Direction::in || t.index(2).direction() != Direction::out)
      throw StructuralError("MatrixProductState: bond directions must be (in, *, out)");
    if (!(t.index(1) == spaces_[m].index(Direction::in)))
      throw StructuralError("MatrixProductState: physical index does not match local space");
    if (m + 1 < n && !(t.index(2) == sites_[m + 1].index(0).dual()))
      throw StructuralError("MatrixProductState: neighbouring bond indices differ");
  }
  const auto& first = sites_.front().index(0);
  if (first.num_sectors() != 1 || first.sector(0).charge != 0 || first.sector(0).dim != 1)
    throw StructuralError("MatrixProductState: left edge bond must be the trivial sector");
  const auto& last = sites_.back().index(2);
  if (last.num_sectors() != 1 || last.sector(0).dim != 1)
    throw StructuralError("MatrixProductState: right edge bond must be one-dimensional");
}

void MatrixProductState::shift_right(int m, const TruncationSpec& spec, double* discarded) {
  auto svd = svd_truncate(sites_[m], {0, 1}, spec);
  if (discarded) *discarded += svd.discarded_weight;
  SymTensor carry = scale_along(svd.v, 0, svd.values);
  sites_[m] = std::move(svd.u);
  sites_[m + 1] = contract(carry, sites_[m + 1], {{1, 0}});
}

void MatrixProductState::shift_left(int m, const TruncationSpec& spec, double* discarded) {
  auto svd = svd_truncate(sites_[m], {0}, spec);
  if (discarded) *discarded += svd.discarded_weight;
  SymTensor carry = scale_along(svd.u, 1, svd.values);
  sites_[m] = std::move(svd.v);
  sites_[m - 1] = contract(sites_[m - 1], carry, {{2, 0}});
}

double MatrixProductState::move_center_right(const TruncationSpec& spec) {
  if (!center_ || *center_ + 1 >= length()) throw StructuralError("move_center_right: no center to move");
  double d = 0.0;
  shift_right(*center_, spec, &d);
  ++*center_;
  return d;
}

double MatrixProductState::move_center_left(const TruncationSpec& spec) {
  if (!center_ || *center_ == 0) throw StructuralError("move_center_left: no center to move");
  double d = 0.0;
  shift_left(*center_, spec, &d);
  --*center_;
  return d;
}

SymTensor MatrixProductState::two_site(int m) const { return contract(sites_[m], sites_[m + 1], {{2, 0}}); }

SvdResult MatrixProductState::split_two_site(const SymTensor& theta, int m, const TruncationSpec& spec,
                                             bool normalize) {
  SvdResult svd = svd_truncate(theta, {0, 1}, spec);
  if (normalize) {
    double kept = 0.0;
    for (double s : svd.sorted) kept += s * s;
    const double f = 1.0 / std::sqrt(kept);
    for (auto& sec : svd.values)
      for (auto& s : sec) s *= f;
    for (auto& s : svd.sorted) s *= f;
  }
  sites_[m] = svd.u;
  sites_[m + 1] = scale_along(svd.v, 0, svd.values);
  center_ = m + 1;
  return svd;
}

MatrixProductState from_cps(const CpsConfig& config, const std::vector<LocalSpace>& spaces) {
  const int n = config.size();
  if (n == 0 || static_cast<int>(spaces.size()) != n)
    throw StructuralError("from_cps: configuration length must match the number of sites");
  std::vector<SymTensor> sites;
  int cum = 0;
  for (int m = 0; m < n; ++m) {
    const int s = config.occupations[m];
    if (s < 0 || s >= spaces[m].dim())
      throw DomainError("from_cps: occupation " + std::to_string(s) + " outside local space at site " +
                        std::to_string(m));
    const int q = spaces[m].charges[s];
    SymTensor t({ChargeIndex({{cum, 1}}, Direction::in), spaces[m].index(Direction::in),
                 ChargeIndex({{cum + q, 1}}, Direction::out)},
                0);
    t.block({0, s, 0}).values()[0] = 1.0;
    sites.push_back(std::move(t));
    cum += q;
  }
  return MatrixProductState(std::move(sites), spaces, 0);
}

MatrixProductState from_cps(const CpsConfig& config, int local_dim) {
  return from_cps(config, std::vector<LocalSpace>(config.size(), LocalSpace::boson(local_dim)));
}

MatrixProductState canonicalize(MatrixProductState psi, int new_center) {
  const int n = psi.length();
  if (new_center < 0 || new_center >= n) throw StructuralError("canonicalize: center out of range");
  const auto exact = TruncationSpec::exact();
  if (psi.center_) {
    while (*psi.center_ < new_center) psi.move_center_right(exact);
    while (*psi.center_ > new_center) psi.move_center_left(exact);
    return psi;
  }
  for (int m = 0; m < new_center; ++m) psi.shift_right(m, exact, nullptr);
  for (int m = n - 1; m > new_center; --m) psi.shift_left(m, exact, nullptr);
  psi.center_ = new_center;
  return psi;
}

// --------------------------------------------------------------- environments

namespace {

SymTensor identity_env(const ChargeIndex& bra_side, const ChargeIndex& ket_side) {
  if (bra_side.sectors() != ket_side.sectors())
    throw StructuralError("environment: edge bonds of bra and ket differ");
  SymTensor e({bra_side, ket_side}, 0);
  for (int k = 0; k < bra_side.num_sectors(); ++k) {
    DenseArray& b = e.block({k, k});
    const int d = bra_side.sector(k).dim;
    for (int i = 0; i < d; ++i) b.values()[i * d + i] = 1.0;
  }
  return e;
}

void check_compatible(const MatrixProductState& a, const MatrixProductState& b) {
  if (a.length() != b.length() || a.spaces() != b.spaces())
    throw StructuralError("states have different lengths or local spaces");
}

}  // namespace

SymTensor left_boundary(const MatrixProductState& bra, const MatrixProductState& ket) {
  check_compatible(bra, ket);
  return identity_env(bra.site(0).index(0), ket.site(0).index(0).dual());
}

SymTensor right_boundary(const MatrixProductState& bra, const MatrixProductState& ket) {
  check_compatible(bra, ket);
  const int n = bra.length();
  const auto& bi = bra.site(n - 1).index(2);
  const auto& ki = ket.site(n - 1).index(2);
  if (bi.sector(0).charge != ki.sector(0).charge) {
    // Different global charges: the overlap vanishes identically.
    return SymTensor({bi, ki.dual()}, 0);
  }
  return identity_env(bi, ki.dual());
}

SymTensor transfer_right(const SymTensor& env, const SymTensor& bra_site, const SymTensor& ket_site) {
  SymTensor t = contract(env, ket_site, {{1, 0}});
  return contract(conj(bra_site), t, {{0, 0}, {1, 1}});
}

SymTensor transfer_left(const SymTensor& env, const SymTensor& bra_site, const SymTensor& ket_site) {
  SymTensor t = contract(ket_site, env, {{2, 1}});
  return contract(conj(bra_site), t, {{1, 1}, {2, 2}});
}

cplx close_environments(const SymTensor& left, const SymTensor& right) {
  SymTensor s = contract(left, right, {{0, 0}, {1, 1}});
  const DenseArray* b = s.find_block({});
  return b ? b->values()[0] : cplx{};
}

cplx inner(const MatrixProductState& a, const MatrixProductState& b) {
  check_compatible(a, b);
  if (a.global_charge() != b.global_charge()) return 0.0;
  SymTensor env = left_boundary(a, b);
  for (int m = 0; m < a.length(); ++m) env = transfer_right(env, a.site(m), b.site(m));
  return close_environments(env, right_boundary(a, b));
}

double norm(const MatrixProductState& psi) {
  if (psi.center()) return psi.site(*psi.center()).norm();
  return std::sqrt(std::abs(inner(psi, psi)));
}

void normalize(MatrixProductState& psi) {
  if (!psi.center()) psi = canonicalize(std::move(psi), 0);
  const double nrm = psi.site(*psi.center()).norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("normalize: state norm vanished");
  psi.set_center_site(scaled(psi.site(*psi.center()), 1.0 / nrm));
}

SymTensor apply_diagonal(const SymTensor& site, std::span<const double> values) {
  std::vector<std::vector<double>> w;
  for (double v : values) w.push_back({v});
  return scale_along(site, 1, w);
}

// ------------------------------------------------------------------ operators

SymTensor bond_operator(const Eigen::MatrixXcd& m, const LocalSpace& s1, const LocalSpace& s2) {
  const int d1 = s1.dim(), d2 = s2.dim();
  if (m.rows() != d1 * d2 || m.cols() != d1 * d2)
    throw StructuralError("bond_operator: matrix dimension does not match local spaces");
  DenseArray dense({d1, d2, d1, d2});
  for (int a = 0; a < d1; ++a)
    for (int b = 0; b < d2; ++b)
      for (int c = 0; c < d1; ++c)
        for (int d = 0; d < d2; ++d) {
          const int idx[4] = {a, b, c, d};
          dense(idx) = m(a * d2 + b, c * d2 + d);
        }
  return from_dense({s1.index(Direction::in), s2.index(Direction::in), s1.index(Direction::out),
                     s2.index(Direction::out)},
                    0, dense, 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()));
}

SymTensor apply_bond_operator(const SymTensor& op, const SymTensor& theta) {
  return permute(contract(op, theta, {{2, 1}, {3, 2}}), {2, 0, 1, 3});
}

double expect_bond(const MatrixProductState& psi, const Eigen::MatrixXcd& term, int bond) {
  if (bond < 0 || bond + 1 >= psi.length()) throw StructuralError("expect_bond: bond out of range");
  const double scale = std::max(1.0, term.cwiseAbs().maxCoeff());
  if ((term - term.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("expect_bond: term is not Hermitian");
  const MatrixProductState c = canonicalize(psi, bond);
  const SymTensor theta = c.two_site(bond);
  const SymTensor op = bond_operator(term, psi.space(bond), psi.space(bond + 1));
  const cplx v = inner_product(theta, apply_bond_operator(op, theta)) / theta.norm_sq();
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
    throw NumericalError("expect_bond: expectation of a Hermitian term has an imaginary part");
  return v.real();
}

Eigen::MatrixXd correlation_matrix(const MatrixProductState& psi, std::span<const double> values,
                                   int first, int count) {
  const int n = psi.length();
  if (count < 0) count = n - first;
  if (first < 0 || first + count > n) throw StructuralError("correlation_matrix: site range out of bounds");
  for (int m = first; m < first + count; ++m)
    if (static_cast<int>(values.size()) != psi.space(m).dim())
      throw StructuralError("correlation_matrix: operator size does not match local space");
  std::vector<double> sq(values.size());
  for (std::size_t s = 0; s < values.size(); ++s) sq[s] = values[s] * values[s];

  std::vector<SymTensor> left(n + 1), right(n + 1);
  left[0] = left_boundary(psi, psi);
  for (int m = 0; m < n; ++m) left[m + 1] = transfer_right(left[m], psi.site(m), psi.site(m));
  right[n] = right_boundary(psi, psi);
  for (int m = n - 1; m >= 0; --m) right[m] = transfer_left(right[m + 1], psi.site(m), psi.site(m));
  const double nrm = close_environments(left[n], right[n]).real();
  if (!(nrm > 0.0)) throw NumericalError("correlation_matrix: state has zero norm");

  Eigen::MatrixXd c(count, count);
  for (int i = 0; i < count; ++i) {
    const int si = first + i;
    const SymTensor& a = psi.site(si);
    c(i, i) = close_environments(transfer_right(left[si], a, apply_diagonal(a, sq)), right[si + 1]).real() / nrm;
    SymTensor f = transfer_right(left[si], a, apply_diagonal(a, values));
    for (int j = i + 1; j < count; ++j) {
      const int sj = first + j;
      const SymTensor& b = psi.site(sj);
      c(i, j) = c(j, i) =
          close_environments(transfer_right(f, b, apply_diagonal(b, values)), right[sj + 1]).real() / nrm;
      if (j + 1 < count) f = transfer_right(f, b, b);
    }
  }
  return c;
}

// ------------------------------------------------------------------- collapse

CollapseResult collapse_to_cps(MatrixProductState psi, Rng& rng, int first, int last) {
  const int n = psi.length();
  if (first < 0 || last >= n || first > last) throw StructuralError("collapse_to_cps: invalid site range");
  psi = canonicalize(std::move(psi), first);
  CollapseResult res{CpsConfig{}, psi, 0.0};
  for (int m = first; m <= last; ++m) {
    const SymTensor& a = psi.site(m);
    const int d = psi.space(m).dim();
    std::vector<double> p(d, 0.0);
    for (const auto& [key, blk] : a.blocks()) p[key[1]] += blk.norm_sq();
    double total = 0.0;
    for (double x : p) total += x;
    if (!(std::abs(total - 1.0) <= 1e-8))
      throw NumericalError("collapse_to_cps: local distribution at site " + std::to_string(m) +
                           " sums to " + std::to_string(total));
    int pick = -1;
    for (int attempt = 0; attempt < 64 && pick < 0; ++attempt) {
      const double u = rng.uniform() * total;
      double cum = 0.0;
      int s = 0;
      for (; s < d; ++s) {
        cum += p[s];
        if (u < cum) break;
      }
      if (s < d && p[s] > 0.0) pick = s;
    }
    if (pick < 0) throw NumericalError("collapse_to_cps: could not draw a nonzero-probability outcome");

    SymTensor proj(a.indices(), 0);
    const double f = 1.0 / std::sqrt(p[pick]);
    for (const auto& [key, blk] : a.blocks()) {
      if (key[1] != pick) continue;
      DenseArray b = blk;
      for (auto& x : b.values()) x *= f;
      proj.set_block(key, std::move(b));
    }
    psi.set_center_site(std::move(proj));
    res.config.occupations.push_back(pick);
    res.log_probability += std::log(p[pick] / total);
    if (m + 1 < n) psi.move_center_right();
  }
  res.state = std::move(psi);
  return res;
}

CollapseResult collapse_to_cps(MatrixProductState psi, Rng& rng) {
  const int last = psi.length() - 1;
  return collapse_to_cps(std::move(psi), rng, 0, last);
}

}  // namespace metts

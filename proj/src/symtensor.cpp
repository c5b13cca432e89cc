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

#include "metts/symtensor.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "metts/errors.hpp"

namespace metts {

namespace {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

long product(std::span<const int> dims) {
  long p = 1;
  for (int d : dims) p *= d;
  return p;
}

std::vector<int> strides_of(const std::vector<int>& shape) {
  std::vector<int> s(shape.size(), 1);
  for (int k = static_cast<int>(shape.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * shape[k + 1];
  return s;
}

// Advances a multi-index in row-major order; false once exhausted.
bool next_index(std::vector<int>& idx, const std::vector<int>& shape) {
  for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
    if (++idx[k] < shape[k]) return true;
    idx[k] = 0;
  }
  return false;
}

BlockKey select(const BlockKey& key, std::span<const int> positions) {
  BlockKey out;
  out.reserve(positions.size());
  for (int p : positions) out.push_back(key[p]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- ChargeIndex

ChargeIndex::ChargeIndex(std::vector<Sector> sectors, Direction dir)
    : sectors_(std::move(sectors)), dir_(dir) {
  offsets_.reserve(sectors_.size());
  for (std::size_t k = 0; k < sectors_.size(); ++k) {
    if (sectors_[k].dim < 1) throw StructuralError("ChargeIndex: sector degeneracy must be >= 1");
    if (k > 0 && sectors_[k].charge <= sectors_[k - 1].charge)
      throw StructuralError("ChargeIndex: sector charges must be strictly increasing");
    offsets_.push_back(dim_);
    dim_ += sectors_[k].dim;
  }
}

int ChargeIndex::find(int charge) const {
  auto it = std::lower_bound(sectors_.begin(), sectors_.end(), charge,
                             [](const Sector& s, int c) { return s.charge < c; });
  if (it == sectors_.end() || it->charge != charge) return -1;
  return static_cast<int>(it - sectors_.begin());
}

ChargeIndex ChargeIndex::dual() const {
  return ChargeIndex(sectors_, dir_ == Direction::in ? Direction::out : Direction::in);
}

// ----------------------------------------------------------------- DenseArray

DenseArray::DenseArray(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(static_cast<std::size_t>(product(shape_)), cplx{});
}

std::size_t DenseArray::linear(std::span<const int> idx) const {
  std::size_t pos = 0;
  for (std::size_t k = 0; k < shape_.size(); ++k) pos = pos * shape_[k] + idx[k];
  return pos;
}

DenseArray DenseArray::permuted(std::span<const int> perm) const {
  const int r = rank();
  if (static_cast<int>(perm.size()) != r) throw StructuralError("permute: rank mismatch");
  bool identity = true;
  for (int k = 0; k < r; ++k) identity = identity && perm[k] == k;
  if (identity) return *this;

  std::vector<int> out_shape(r);
  for (int k = 0; k < r; ++k) out_shape[k] = shape_[perm[k]];
  DenseArray out(out_shape);
  if (out.size() == 0) return out;

  const auto in_strides = strides_of(shape_);
  std::vector<int> step(r);
  for (int k = 0; k < r; ++k) step[k] = in_strides[perm[k]];

  // Innermost output axis is handled as a strided copy.
  const int inner = out_shape[r - 1];
  const int inner_step = step[r - 1];
  std::vector<int> idx(r, 0);
  std::size_t w = 0;
  while (true) {
    std::size_t src = 0;
    for (int k = 0; k < r - 1; ++k) src += static_cast<std::size_t>(idx[k]) * step[k];
    for (int j = 0; j < inner; ++j) out.data_[w++] = data_[src + static_cast<std::size_t>(j) * inner_step];
    int k = r - 2;
    for (; k >= 0; --k) {
      if (++idx[k] < out_shape[k]) break;
      idx[k] = 0;
    }
    if (k < 0) break;
  }
  return out;
}

double DenseArray::norm_sq() const {
  double s = 0.0;
  for (const auto& x : data_) s += std::norm(x);
  return s;
}

// ------------------------------------------------------------------ SymTensor

SymTensor::SymTensor(std::vector<ChargeIndex> indices, int total_charge)
    : indices_(std::move(indices)), total_charge_(total_charge) {}

bool SymTensor::allowed(const BlockKey& key) const {
  if (key.size() != indices_.size()) return false;
  int q = 0;
  for (std::size_t k = 0; k < key.size(); ++k) {
    if (key[k] < 0 || key[k] >= indices_[k].num_sectors()) return false;
    q += indices_[k].sign() * indices_[k].sector(key[k]).charge;
  }
  return q == total_charge_;
}

std::vector<int> SymTensor::block_shape(const BlockKey& key) const {
  std::vector<int> shape(key.size());
  for (std::size_t k = 0; k < key.size(); ++k) shape[k] = indices_[k].sector(key[k]).dim;
  return shape;
}

const DenseArray* SymTensor::find_block(const BlockKey& key) const {
  auto it = blocks_.find(key);
  return it == blocks_.end() ? nullptr : &it->second;
}

DenseArray& SymTensor::block(const BlockKey& key) {
  auto it = blocks_.find(key);
  if (it != blocks_.end()) return it->second;
  if (!allowed(key)) throw StructuralError("SymTensor: block forbidden by charge law");
  return blocks_.emplace(key, DenseArray(block_shape(key))).first->second;
}

void SymTensor::set_block(const BlockKey& key, DenseArray data) {
  if (!allowed(key)) throw StructuralError("SymTensor: block forbidden by charge law");
  if (data.shape() != block_shape(key)) throw StructuralError("SymTensor: block shape mismatch");
  blocks_[key] = std::move(data);
}

double SymTensor::norm_sq() const {
  double s = 0.0;
  for (const auto& [key, b] : blocks_) s += b.norm_sq();
  return s;
}

double SymTensor::norm() const { return std::sqrt(norm_sq()); }

void SymTensor::check_invariants() const {
  for (const auto& [key, b] : blocks_) {
    if (!allowed(key)) throw StructuralError("SymTensor: stored block violates charge law");
    if (b.shape() != block_shape(key)) throw StructuralError("SymTensor: stored block has wrong shape");
  }
  if (!std::isfinite(norm_sq())) throw NumericalError("SymTensor: non-finite entries");
}

// ---------------------------------------------------------------- operations

SymTensor contract(const SymTensor& a, const SymTensor& b,
                   std::span<const std::pair<int, int>> pairs) {
  std::vector<char> a_used(a.rank(), 0), b_used(b.rank(), 0);
  std::vector<int> a_con, b_con;
  for (auto [ia, ib] : pairs) {
    if (ia < 0 || ia >= a.rank() || ib < 0 || ib >= b.rank() || a_used[ia] || b_used[ib])
      throw StructuralError("contract: invalid index pair");
    const auto& x = a.index(ia);
    const auto& y = b.index(ib);
    if (x.sectors() != y.sectors())
      throw StructuralError("contract: paired indices have different sectors");
    if (x.direction() == y.direction())
      throw StructuralError("contract: paired indices must have opposite directions");
    a_used[ia] = b_used[ib] = 1;
    a_con.push_back(ia);
    b_con.push_back(ib);
  }
  std::vector<int> a_free, b_free;
  for (int k = 0; k < a.rank(); ++k)
    if (!a_used[k]) a_free.push_back(k);
  for (int k = 0; k < b.rank(); ++k)
    if (!b_used[k]) b_free.push_back(k);

  std::vector<ChargeIndex> out_indices;
  for (int k : a_free) out_indices.push_back(a.index(k));
  for (int k : b_free) out_indices.push_back(b.index(k));
  SymTensor out(std::move(out_indices), a.total_charge() + b.total_charge());

  // b blocks reshaped to (contracted, free) matrices, grouped by contracted key.
  struct Prepared {
    BlockKey free_key;
    DenseArray data;
    long rows, cols;
  };
  std::map<BlockKey, std::vector<Prepared>> b_groups;
  std::vector<int> b_perm = b_con;
  b_perm.insert(b_perm.end(), b_free.begin(), b_free.end());
  for (const auto& [key, blk] : b.blocks()) {
    Prepared p;
    p.free_key = select(key, b_free);
    p.data = blk.permuted(b_perm);
    const auto& sh = p.data.shape();
    p.rows = product(std::span<const int>(sh.data(), b_con.size()));
    p.cols = product(std::span<const int>(sh.data() + b_con.size(), b_free.size()));
    b_groups[select(key, b_con)].push_back(std::move(p));
  }

  std::vector<int> a_perm = a_free;
  a_perm.insert(a_perm.end(), a_con.begin(), a_con.end());
  for (const auto& [key, blk] : a.blocks()) {
    auto it = b_groups.find(select(key, a_con));
    if (it == b_groups.end()) continue;
    const DenseArray ap = blk.permuted(a_perm);
    const auto& sh = ap.shape();
    const long rows = product(std::span<const int>(sh.data(), a_free.size()));
    const long inner = product(std::span<const int>(sh.data() + a_free.size(), a_con.size()));
    ConstRowMap am(ap.data(), rows, inner);
    const BlockKey a_free_key = select(key, a_free);
    for (const auto& p : it->second) {
      BlockKey out_key = a_free_key;
      out_key.insert(out_key.end(), p.free_key.begin(), p.free_key.end());
      DenseArray& dst = out.block(out_key);
      RowMap dm(dst.data(), rows, p.cols);
      ConstRowMap bm(p.data.data(), p.rows, p.cols);
      dm.noalias() += am * bm;
    }
  }
  return out;
}

SymTensor contract(const SymTensor& a, const SymTensor& b,
                   std::initializer_list<std::pair<int, int>> pairs) {
  return contract(a, b, std::span<const std::pair<int, int>>(pairs.begin(), pairs.size()));
}

SymTensor permute(const SymTensor& t, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != t.rank()) throw StructuralError("permute: rank mismatch");
  std::vector<ChargeIndex> idx;
  for (int p : perm) idx.push_back(t.index(p));
  SymTensor out(std::move(idx), t.total_charge());
  for (const auto& [key, blk] : t.blocks()) out.set_block(select(key, perm), blk.permuted(perm));
  return out;
}

SymTensor permute(const SymTensor& t, std::initializer_list<int> perm) {
  return permute(t, std::span<const int>(perm.begin(), perm.size()));
}

SymTensor conj(const SymTensor& t) {
  std::vector<ChargeIndex> idx;
  for (const auto& i : t.indices()) idx.push_back(i.dual());
  SymTensor out(std::move(idx), -t.total_charge());
  for (const auto& [key, blk] : t.blocks()) {
    DenseArray c = blk;
    for (auto& x : c.values()) x = std::conj(x);
    out.set_block(key, std::move(c));
  }
  return out;
}

SymTensor scaled(const SymTensor& t, cplx factor) {
  SymTensor out = t;
  for (const auto& [key, blk] : t.blocks()) {
    DenseArray& dst = out.block(key);
    for (auto& x : dst.values()) x *= factor;
  }
  return out;
}

SymTensor add(const SymTensor& a, const SymTensor& b, cplx alpha) {
  if (a.indices() != b.indices() || a.total_charge() != b.total_charge())
    throw StructuralError("add: operands have different structure");
  SymTensor out = a;
  for (const auto& [key, blk] : b.blocks()) {
    DenseArray& dst = out.block(key);
    for (std::size_t i = 0; i < blk.size(); ++i) dst.values()[i] += alpha * blk.values()[i];
  }
  return out;
}

cplx inner_product(const SymTensor& a, const SymTensor& b) {
  if (a.indices() != b.indices() || a.total_charge() != b.total_charge())
    throw StructuralError("inner_product: operands have different structure");
  cplx s{};
  for (const auto& [key, blk] : a.blocks()) {
    const DenseArray* other = b.find_block(key);
    if (!other) continue;
    for (std::size_t i = 0; i < blk.size(); ++i) s += std::conj(blk.values()[i]) * other->values()[i];
  }
  return s;
}

SymTensor scale_along(const SymTensor& t, int axis, const std::vector<std::vector<double>>& weights) {
  if (axis < 0 || axis >= t.rank()) throw StructuralError("scale_along: bad axis");
  const auto& ix = t.index(axis);
  if (static_cast<int>(weights.size()) != ix.num_sectors())
    throw StructuralError("scale_along: weight sectors do not match index");
  SymTensor out = t;
  for (const auto& [key, blk] : t.blocks()) {
    const auto& w = weights[key[axis]];
    if (static_cast<int>(w.size()) != ix.sector(key[axis]).dim)
      throw StructuralError("scale_along: weight length does not match sector");
    DenseArray& dst = out.block(key);
    const auto& sh = dst.shape();
    long outer = 1, inner = 1;
    for (int k = 0; k < axis; ++k) outer *= sh[k];
    for (int k = axis + 1; k < dst.rank(); ++k) inner *= sh[k];
    const int n = sh[axis];
    cplx* d = dst.data();
    for (long o = 0; o < outer; ++o)
      for (int j = 0; j < n; ++j)
        for (long i = 0; i < inner; ++i) d[(o * n + j) * inner + i] *= w[j];
  }
  return out;
}

DenseArray to_dense(const SymTensor& t) {
  std::vector<int> shape;
  for (const auto& i : t.indices()) shape.push_back(i.dim());
  DenseArray out(shape);
  const int r = t.rank();
  for (const auto& [key, blk] : t.blocks()) {
    if (r == 0) {
      out.values()[0] += blk.values()[0];
      continue;
    }
    std::vector<int> local(r, 0), full(r);
    const auto& bs = blk.shape();
    std::size_t pos = 0;
    do {
      for (int k = 0; k < r; ++k) full[k] = t.index(k).offset(key[k]) + local[k];
      out(full) = blk.values()[pos++];
    } while (next_index(local, bs));
  }
  return out;
}

SymTensor from_dense(std::vector<ChargeIndex> indices, int total_charge, const DenseArray& dense,
                     double tol) {
  SymTensor out(std::move(indices), total_charge);
  const int r = out.rank();
  std::vector<int> expect;
  for (const auto& i : out.indices()) expect.push_back(i.dim());
  if (dense.shape() != expect) throw StructuralError("from_dense: shape does not match indices");
  if (r == 0) {
    if (total_charge == 0) {
      DenseArray s;
      s.values()[0] = dense.values()[0];
      if (s.values()[0] != cplx{}) out.set_block({}, s);
    } else if (std::abs(dense.values()[0]) > tol) {
      throw StructuralError("from_dense: charge-forbidden entry exceeds tolerance");
    }
    return out;
  }
  std::vector<int> nsec;
  for (const auto& i : out.indices()) nsec.push_back(i.num_sectors());
  BlockKey key(r, 0);
  do {
    const bool ok = out.allowed(key);
    DenseArray blk(out.block_shape(key));
    std::vector<int> local(r, 0), full(r);
    std::size_t pos = 0;
    double maxabs = 0.0;
    do {
      for (int k = 0; k < r; ++k) full[k] = out.index(k).offset(key[k]) + local[k];
      const cplx v = dense(full);
      blk.values()[pos++] = v;
      maxabs = std::max(maxabs, std::abs(v));
    } while (next_index(local, blk.shape()));
    if (ok) {
      if (maxabs > 0.0) out.set_block(key, std::move(blk));
    } else if (maxabs > tol) {
      throw StructuralError("from_dense: charge-forbidden entry exceeds tolerance");
    }
  } while (next_index(key, nsec));
  return out;
}

// ----------------------------------------------------------------------- SVD

void TruncationSpec::validate() const {
  if (max_bond < 1) throw DomainError("TruncationSpec: max_bond must be positive");
  if (!(cutoff >= 0.0 && cutoff < 1.0)) throw DomainError("TruncationSpec: cutoff must lie in [0, 1)");
}

SvdResult svd_truncate(const SymTensor& t, std::span<const int> left, const TruncationSpec& spec) {
  spec.validate();
  const int r = t.rank();
  std::vector<char> is_left(r, 0);
  for (int k : left) {
    if (k < 0 || k >= r || is_left[k]) throw StructuralError("svd_truncate: invalid left index set");
    is_left[k] = 1;
  }
  std::vector<int> lpos(left.begin(), left.end()), rpos;
  for (int k = 0; k < r; ++k)
    if (!is_left[k]) rpos.push_back(k);
  std::vector<int> perm = lpos;
  perm.insert(perm.end(), rpos.begin(), rpos.end());

  struct Slot {
    long offset;
    long dim;
  };
  struct Group {
    std::map<BlockKey, Slot> rows, cols;
    long nrows = 0, ncols = 0;
    std::vector<const std::pair<const BlockKey, DenseArray>*> members;
    Eigen::MatrixXcd u, v;
    Eigen::VectorXd s;
  };
  std::map<int, Group> groups;

  auto bond_charge = [&](const BlockKey& key) {
    int q = 0;
    for (int k : lpos) q += t.index(k).sign() * t.index(k).sector(key[k]).charge;
    return -q;
  };
  for (const auto& entry : t.blocks()) {
    const BlockKey& key = entry.first;
    Group& g = groups[bond_charge(key)];
    g.members.push_back(&entry);
    const BlockKey lk = select(key, lpos), rk = select(key, rpos);
    const auto shape = t.block_shape(key);
    if (!g.rows.count(lk)) {
      long d = 1;
      for (int k : lpos) d *= shape[k];
      g.rows[lk] = {g.nrows, d};
      g.nrows += d;
    }
    if (!g.cols.count(rk)) {
      long d = 1;
      for (int k : rpos) d *= shape[k];
      g.cols[rk] = {g.ncols, d};
      g.ncols += d;
    }
  }

  struct Ranked {
    double value;
    int charge;
    int position;
  };
  std::vector<Ranked> ranked;
  double total = 0.0;
  for (auto& [q, g] : groups) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(g.nrows, g.ncols);
    for (const auto* entry : g.members) {
      const auto& [key, blk] = *entry;
      const Slot& rs = g.rows.at(select(key, lpos));
      const Slot& cs = g.cols.at(select(key, rpos));
      const DenseArray p = blk.permuted(perm);
      m.block(rs.offset, cs.offset, rs.dim, cs.dim) = ConstRowMap(p.data(), rs.dim, cs.dim);
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    g.u = svd.matrixU();
    g.v = svd.matrixV();
    g.s = svd.singularValues();
    for (int j = 0; j < g.s.size(); ++j) {
      ranked.push_back({g.s[j], q, j});
      total += g.s[j] * g.s[j];
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.value > b.value; });
  if (ranked.empty() || !(ranked.front().value > 0.0))
    throw NumericalError("svd_truncate: tensor has no nonzero singular value");

  const double smax = ranked.front().value;
  const int n = static_cast<int>(ranked.size());
  int npos = 0;
  while (npos < n && ranked[npos].value > 1e-14 * smax) ++npos;

  // tail[k] = weight of ranked values k, k+1, ...
  std::vector<double> tail(n + 1, 0.0);
  for (int k = n - 1; k >= 0; --k) tail[k] = tail[k + 1] + ranked[k].value * ranked[k].value;
  int keep = 1;
  while (keep < npos && tail[keep] > spec.cutoff * total) ++keep;
  keep = std::min(keep, spec.max_bond);
  while (keep < npos && ranked[keep].value >= ranked[keep - 1].value * (1.0 - 1e-12)) ++keep;

  SvdResult res;
  res.norm_sq = total;
  res.discarded_weight = tail[keep];
  std::map<int, int> kept_per_charge;
  for (int k = 0; k < keep; ++k) {
    ++kept_per_charge[ranked[k].charge];
    res.sorted.push_back(ranked[k].value);
  }

  std::vector<Sector> bond_sectors;
  for (const auto& [q, cnt] : kept_per_charge) bond_sectors.push_back({q, cnt});
  const ChargeIndex bond_out(bond_sectors, Direction::out);

  std::vector<ChargeIndex> u_idx, v_idx;
  for (int k : lpos) u_idx.push_back(t.index(k));
  u_idx.push_back(bond_out);
  v_idx.push_back(bond_out.dual());
  for (int k : rpos) v_idx.push_back(t.index(k));
  res.u = SymTensor(std::move(u_idx), 0);
  res.v = SymTensor(std::move(v_idx), t.total_charge());

  int kb = 0;
  for (const auto& [q, cnt] : kept_per_charge) {
    const Group& g = groups.at(q);
    res.values.emplace_back(g.s.data(), g.s.data() + cnt);
    for (const auto& [lk, slot] : g.rows) {
      BlockKey key = lk;
      key.push_back(kb);
      DenseArray blk(res.u.block_shape(key));
      RowMap(blk.data(), slot.dim, cnt) = g.u.block(slot.offset, 0, slot.dim, cnt);
      res.u.set_block(key, std::move(blk));
    }
    for (const auto& [rk, slot] : g.cols) {
      BlockKey key{kb};
      key.insert(key.end(), rk.begin(), rk.end());
      DenseArray blk(res.v.block_shape(key));
      RowMap(blk.data(), cnt, slot.dim) = g.v.block(slot.offset, 0, slot.dim, cnt).adjoint();
      res.v.set_block(key, std::move(blk));
    }
    ++kb;
  }
  return res;
}

SvdResult svd_truncate(const SymTensor& t, std::initializer_list<int> left, const TruncationSpec& spec) {
  return svd_truncate(t, std::span<const int>(left.begin(), left.size()), spec);
}

}  // namespace metts

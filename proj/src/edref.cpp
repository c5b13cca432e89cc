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

#include "metts/edref.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <string>

namespace metts {

int FockBasis::find(const std::vector<int>& config) const {
  const auto it = index.find(config);
  return it == index.end() ? -1 : it->second;
}

FockBasis enumerate_basis(int L, int N, int n_max) {
  if (L < 1 || N < 0 || n_max < 0) throw DomainError("enumerate_basis: invalid (L, N, n_max)");
  FockBasis b{L, N, n_max, {}, {}};
  std::vector<int> c(L, 0);
  // Depth-first fill in lexicographic order; `left` particles remain for sites m..L-1.
  auto rec = [&](auto&& self, int m, int left) -> void {
    if (m == L - 1) {
      if (left <= n_max) {
        c[m] = left;
        b.configs.push_back(c);
      }
      return;
    }
    for (int k = 0; k <= std::min(n_max, left); ++k) {
      c[m] = k;
      self(self, m + 1, left - k);
    }
  };
  rec(rec, 0, N);
  if (b.configs.empty()) throw DomainError("enumerate_basis: no configuration with the requested filling");
  for (int i = 0; i < b.size(); ++i) b.index.emplace(b.configs[i], i);
  return b;
}

Eigen::MatrixXd dense_hamiltonian(const ModelSpec& spec, const FockBasis& basis) {
  const int D = basis.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(D, D);
  for (int a = 0; a < D; ++a) {
    const auto& c = basis.configs[a];
    double diag = 0.0;
    for (int n : c) diag += 0.5 * spec.U * n * (n - 1) - spec.mu * n;
    H(a, a) = diag;
    for (int m = 0; m + 1 < basis.L; ++m) {
      // b+_m b_{m+1}; the conjugate fills the transposed entry.
      if (c[m + 1] == 0 || c[m] == basis.n_max) continue;
      auto t = c;
      ++t[m];
      --t[m + 1];
      const int b = basis.find(t);
      const double amp = -spec.J * std::sqrt(static_cast<double>((c[m] + 1) * c[m + 1]));
      H(b, a) += amp;
      H(a, b) += amp;
    }
  }
  return H;
}

Eigen::MatrixXcd dense_from_bonds(const std::vector<BondTerm>& terms, const FockBasis& basis) {
  const int D = basis.size();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(D, D);
  for (const auto& term : terms) {
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(term.matrix.rows()))));
    if (term.site < 0 || term.site + 1 >= basis.L) throw DomainError("dense_from_bonds: bond outside the chain");
    for (int a = 0; a < D; ++a) {
      const auto& c = basis.configs[a];
      const int m = term.site;
      if (c[m] >= d || c[m + 1] >= d) throw DomainError("dense_from_bonds: basis exceeds the local dimension");
      const int s = c[m] * d + c[m + 1];
      for (int r = 0; r < d * d; ++r) {
        const cplx v = term.matrix(r, s);
        if (v == cplx(0.0)) continue;
        auto t = c;
        t[m] = r / d;
        t[m + 1] = r % d;
        const int b = basis.find(t);
        if (b < 0) throw DomainError("dense_from_bonds: term leaves the basis");
        H(b, a) += v;
      }
    }
  }
  return H;
}

namespace {

// Boltzmann weights e^{-beta (E - E_min)} of a real symmetric spectrum.
Eigen::VectorXd shifted_weights(const Eigen::VectorXd& evals, double beta) {
  const double e0 = evals.minCoeff();
  return (-beta * (evals.array() - e0)).exp().matrix();
}

}  // namespace

double thermal_expectation(const Eigen::MatrixXd& H, const Eigen::MatrixXd& O, double beta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXd w = shifted_weights(es.eigenvalues(), beta);
  const Eigen::MatrixXd Ot = es.eigenvectors().transpose() * O * es.eigenvectors();
  return w.dot(Ot.diagonal()) / w.sum();
}

Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXcd& H, std::complex<double> s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const Eigen::VectorXcd f = (-s * es.eigenvalues().cast<cplx>().array()).exp().matrix();
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

TransitionMatrix transition_matrix(const ModelSpec& spec, const FockBasis& basis, double beta, double tau,
                                   int n, double u_prime) {
  if (beta < 0.0 || tau < 0.0 || n < 1) throw DomainError("transition_matrix: invalid (beta, tau, n)");
  const Eigen::MatrixXd H = dense_hamiltonian(spec, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXd w = shifted_weights(es.eigenvalues(), 0.5 * beta);
  // The common factor e^{beta E_min / 2} cancels in every normalized probability.
  const Eigen::MatrixXd M = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd M2 = M * M;
  const int D = basis.size();

  TransitionMatrix t{Eigen::MatrixXd::Zero(D, D), beta, tau, n, u_prime};
  if (tau == 0.0) {
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) t.p(i, j) = M(j, i) * M(j, i) / M2(i, i);
    return t;
  }

  ModelSpec rot = spec;
  rot.u_prime = u_prime;
  const TrotterHamiltonians th = trotter_hamiltonians(rot);
  const double s = tau / n;
  const Eigen::MatrixXcd step = hermitian_exp(dense_from_bonds(th.even, basis), cplx(0.0, s)) *
                                hermitian_exp(dense_from_bonds(th.odd, basis), cplx(0.0, s));
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(D, D);
  for (int k = 0; k < n; ++k) U = step * U;

  const Eigen::MatrixXcd A = U.adjoint() * M.cast<cplx>();  // <k|U+ M|i> = A(k, i)
  const Eigen::MatrixXcd B = M.cast<cplx>() * U;             // <j|M U|k> = B(j, k)
  Eigen::MatrixXd q(D, D), r(D, D);
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) q(i, k) = std::norm(A(k, i)) / M2(i, i);
  for (int k = 0; k < D; ++k) {
    double norm = 0.0;
    for (int j = 0; j < D; ++j) norm += std::norm(B(j, k));
    for (int j = 0; j < D; ++j) r(k, j) = std::norm(B(j, k)) / norm;
  }
  t.p = q * r;
  return t;
}

SlmeConvergenceError::SlmeConvergenceError(double previous, double last)
    : NumericalError("slme: no convergence (last estimates " + std::to_string(previous) + ", " +
                     std::to_string(last) + ")"),
      previous_(previous),
      last_(last) {}

SlmeResult slme(const Eigen::MatrixXd& p) {
  const int D = static_cast<int>(p.rows());
  if (D == 0 || p.cols() != D) throw DomainError("slme: matrix must be square and non-empty");
  for (int i = 0; i < D; ++i)
    if (std::abs(p.row(i).sum() - 1.0) > 1e-8) throw DomainError("slme: matrix is not row-stochastic");
  constexpr int kMaxSquarings = 64;

  // Stationary distribution: rows of p^(2^k) approach Pi for an ergodic chain.
  Eigen::MatrixXd P = p;
  for (int k = 0; k < kMaxSquarings; ++k) {
    Eigen::MatrixXd next = P * P;
    // Row sums drift by rounding; left alone they compound over the squarings.
    for (int i = 0; i < D; ++i) next.row(i) /= next.row(i).sum();
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    if (change < 1e-14) break;
  }
  Eigen::RowVectorXd pi = P.colwise().mean();
  for (int k = 0; k < 4; ++k) {
    pi = pi * p;
    pi /= pi.sum();
  }

  // Deflated operator p - 1 Pi; its spectral radius is |lambda_2|. The
  // growth rate of ||Q^m|| over doubling m is tracked on a log scale.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(D);
  auto project = [&](Eigen::MatrixXd& Q) {
    Q -= ones * (pi * Q);
    Q -= (Q * ones) * pi;
  };
  Eigen::MatrixXd Q = p - ones * pi;
  project(Q);
  double log_scale = 0.0;  // Q = p'^m / e^{log_scale}
  double m = 1.0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  double last = prev;
  double log_norm = std::log(Q.norm());
  for (int k = 0; k < kMaxSquarings; ++k) {
    if (!std::isfinite(log_norm) || log_norm + log_scale < m * std::log(1e-13)) return {0.0, 0.0};
    log_scale += log_norm;
    Q /= std::exp(log_norm);
    Q = Q * Q;
    project(Q);
    log_scale *= 2.0;
    const double new_log_norm = std::log(Q.norm());
    // log||p'^{2m}|| - log||p'^m|| over m.
    const double estimate = std::exp((new_log_norm + log_scale - 0.5 * log_scale) / m);
    m *= 2.0;
    log_norm = new_log_norm;
    prev = last;
    last = estimate;
    if (k >= 3 && std::abs(last - prev) <= 1e-10 * std::max(1.0, last)) break;
    if (k == kMaxSquarings - 1) throw SlmeConvergenceError(prev, last);
  }
  SlmeResult res;
  res.lambda2_mag = last < 1e-12 ? 0.0 : std::min(last, 1.0);
  if (res.lambda2_mag >= 1.0 - 1e-12)
    res.bound = std::numeric_limits<double>::infinity();
  else if (res.lambda2_mag == 0.0)
    res.bound = 0.0;
  else
    res.bound = -1.0 / std::log(res.lambda2_mag);
  return res;
}

double stationarity_check(const TransitionMatrix& t, const Eigen::MatrixXd& H, double beta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXd w = shifted_weights(es.eigenvalues(), beta);
  const Eigen::MatrixXd& V = es.eigenvectors();
  Eigen::RowVectorXd pi(H.rows());
  for (int i = 0; i < H.rows(); ++i) pi(i) = (V.row(i).array().square() * w.transpose().array()).sum();
  pi /= pi.sum();
  return (pi * t.p - pi).cwiseAbs().maxCoeff();
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "tau,n,u_prime,lambda2_mag,bound\n";
  out << std::setprecision(17);
  for (const auto& pt : points)
    out << pt.tau << ',' << pt.n << ',' << pt.u_prime << ',' << pt.slme.lambda2_mag << ',' << pt.slme.bound
        << '\n';
}

}  // namespace metts

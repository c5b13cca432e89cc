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

#include <doctest.h>

#include <cmath>

#include "metts/errors.hpp"
#include "metts/propagator.hpp"
#include "test_support.hpp"

using namespace metts;

namespace {

ModelSpec soft(int L, double U, int n_max) {
  ModelSpec s;
  s.L = L;
  s.U = U;
  s.n_max = n_max;
  s.u_prime = U;
  return s;
}

Eigen::MatrixXcd power(const Eigen::MatrixXcd& m, int n) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  for (int k = 0; k < n; ++k) r = m * r;
  return r;
}

// Distance between normalized vectors up to a global phase.
double state_distance(Eigen::VectorXcd a, Eigen::VectorXcd b) {
  a.normalize();
  b.normalize();
  const cplx o = a.dot(b);
  return (a * (o / std::abs(o)) - b).norm();
}

double imaginary_error(const SweepSchedule& sched, double dtau) {
  std::mt19937_64 g(41);
  const ModelSpec s = soft(4, 1.5, 2);
  MatrixProductState psi = testing::random_mps(4, 3, 4, g);
  normalize(psi);
  const Eigen::VectorXcd v = testing::mps_to_vector(psi);
  const double beta_half = 0.5;
  const Eigen::VectorXcd exact = testing::dense_exp(testing::full_hamiltonian(s), beta_half) * v;
  const EvolutionResult r =
      evolve_imaginary(psi, hamiltonian_bonds(s), beta_half, dtau, sched, TruncationSpec::exact());
  CHECK(norm(r.state) == doctest::Approx(1.0).epsilon(1e-12));
  return state_distance(testing::mps_to_vector(r.state), exact);
}

}  // namespace

TEST_CASE("sweep schedules") {
  const SweepSchedule so = SweepSchedule::second_order();
  REQUIRE(so.stages.size() == 3);
  CHECK(so.stages[0].layer == Layer::even);
  CHECK(so.stages[0].coefficient == 0.5);
  CHECK(so.stages[1].layer == Layer::odd);
  CHECK_NOTHROW(so.validate());
  CHECK_NOTHROW(SweepSchedule::forest_ruth().validate());
  SweepSchedule bad{{{Layer::even, 0.7}, {Layer::odd, 1.0}}};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK(layer_of_bond(0) == Layer::odd);
  CHECK(layer_of_bond(1) == Layer::even);
}

TEST_CASE("gate from term is the matrix exponential") {
  const ModelSpec s = soft(2, 1.0, 2);
  const Eigen::MatrixXcd term = hamiltonian_bonds(s)[0].matrix;
  const cplx step(0.0, 0.37);
  CHECK((gate_from_term(term, step) - testing::dense_exp(term, step)).norm() < 1e-12);
  const Eigen::MatrixXcd u = gate_from_term(term, step);
  CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(9, 9)).norm() < 1e-12);
}

TEST_CASE("a single gate matches the dense update") {
  std::mt19937_64 g(43);
  const ModelSpec s = soft(4, 0.8, 2);
  const auto terms = hamiltonian_bonds(s);
  MatrixProductState psi = testing::random_mps(4, 3, 3, g);
  for (int bond = 0; bond < 3; ++bond) {
    const Eigen::VectorXcd before = testing::mps_to_vector(psi);
    const Eigen::MatrixXcd gate = gate_from_term(terms[bond].matrix, cplx(0.0, 0.5));
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(81, 81);
    // Place the 9x9 gate on sites (bond, bond+1).
    int left = 1, right = 1;
    for (int k = 0; k < bond; ++k) left *= 3;
    for (int k = bond + 2; k < 4; ++k) right *= 3;
    for (int a = 0; a < left; ++a)
      for (int r = 0; r < 9; ++r)
        for (int c2 = 0; c2 < 9; ++c2)
          for (int c = 0; c < right; ++c) full((a * 9 + r) * right + c, (a * 9 + c2) * right + c) = gate(r, c2);
    const double disc = apply_gate(psi, gate, bond, TruncationSpec::exact());
    CHECK(disc < 1e-20);
    CHECK((testing::mps_to_vector(psi) - full * before).norm() < 1e-11 * before.norm());
  }
}

TEST_CASE("rotation unitary matches the dense product and is unitary") {
  std::mt19937_64 g(47);
  for (double u_prime : {0.0, 1.0}) {
    ModelSpec s = soft(4, 1.0, 2);
    s.u_prime = u_prime;
    MatrixProductState psi = testing::random_mps(4, 3, 4, g);
    normalize(psi);
    const Eigen::VectorXcd v = testing::mps_to_vector(psi);
    const double tau = 1.0;
    const int n = 2;
    const auto [He, Ho] = testing::full_trotter(s);
    const Eigen::MatrixXcd U =
        power(testing::dense_exp(He, cplx(0.0, tau / n)) * testing::dense_exp(Ho, cplx(0.0, tau / n)), n);
    CHECK((U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols())).norm() < 1e-10);

    const EvolutionResult f =
        apply_symmetric_unitary(psi, tau, n, s, TruncationSpec::exact(), Sense::forward);
    CHECK(norm(f.state) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((testing::mps_to_vector(f.state) - U * v).norm() < 1e-10);

    const EvolutionResult b =
        apply_symmetric_unitary(f.state, tau, n, s, TruncationSpec::exact(), Sense::adjoint);
    CHECK((testing::mps_to_vector(b.state) - v).norm() < 1e-10);
  }
}

TEST_CASE("zero rotation time is the identity") {
  const ModelSpec s = soft(4, 1.0, 1);
  const MatrixProductState psi = from_cps(CpsConfig{{1, 0, 1, 0}}, 2);
  CHECK(compile_symmetric_unitary(s, 0.0, 3, Sense::forward, psi).empty());
}

TEST_CASE("second-order Trotter error scales as dtau^2") {
  const SweepSchedule so = SweepSchedule::second_order();
  const double e1 = imaginary_error(so, 0.25);
  const double e2 = imaginary_error(so, 0.125);
  const double e3 = imaginary_error(so, 0.0625);
  CHECK(e1 > 1e-8);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("fourth-order schedule converges faster") {
  const SweepSchedule fr = SweepSchedule::forest_ruth();
  const double e1 = imaginary_error(fr, 0.25);
  const double e2 = imaginary_error(fr, 0.125);
  CHECK(e1 / e2 > 10.0);
  CHECK(e2 < imaginary_error(SweepSchedule::second_order(), 0.125));
}

TEST_CASE("imaginary step must divide beta/2") {
  const ModelSpec s = soft(4, 1.0, 1);
  const MatrixProductState psi = from_cps(CpsConfig{{1, 0, 1, 0}}, 2);
  CHECK_THROWS_AS(compile_imaginary(hamiltonian_bonds(s), 0.5, 0.3, SweepSchedule::second_order(), psi),
                  DomainError);
  CHECK_THROWS_AS(compile_imaginary(hamiltonian_bonds(s), 0.5, 0.0, SweepSchedule::second_order(), psi),
                  DomainError);
  CHECK(compile_imaginary(hamiltonian_bonds(s), 0.0, 0.1, SweepSchedule::second_order(), psi).empty());
}

TEST_CASE("truncation is reported") {
  const ModelSpec s = soft(6, 0.0, 1);
  const MatrixProductState psi = from_cps(CpsConfig{{1, 0, 1, 0, 1, 0}}, 2);
  const EvolutionResult r = evolve_imaginary(psi, hamiltonian_bonds(s), 1.0, 0.125,
                                             SweepSchedule::second_order(), {2, 1e-10});
  CHECK(r.state.max_bond() <= 2);
  CHECK(r.total_discarded > 1e-6);
  CHECK(r.truncation_warnings > 0);
  const EvolutionResult exact = evolve_imaginary(psi, hamiltonian_bonds(s), 1.0, 0.125,
                                                 SweepSchedule::second_order(), TruncationSpec::exact());
  CHECK(exact.truncation_warnings == 0);
}

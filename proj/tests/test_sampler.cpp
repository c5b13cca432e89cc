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
#include <map>

#include "metts/edref.hpp"
#include "metts/errors.hpp"
#include "metts/oracle.hpp"
#include "metts/sampler.hpp"
#include "metts/stats.hpp"
#include "test_support.hpp"

using namespace metts;

namespace {

ChainConfig small_canonical(double tau) {
  ChainConfig c;
  c.model.L = 4;
  c.model.U = 1.0;
  c.model.n_max = 2;
  c.model.u_prime = 1.0;
  c.beta = 1.0;
  c.dtau = 0.05;
  c.tau = tau;
  c.n = 2;
  c.trunc = {1 << 20, 0.0};
  c.initial = CpsConfig{{1, 0, 1, 0}};
  return c;
}

// Compares observed transition counts with a reference stochastic matrix.
void check_transitions(const std::map<std::pair<int, int>, int>& counts, const std::vector<int>& visits,
                       const Eigen::MatrixXd& p) {
  int checked = 0;
  for (int i = 0; i < p.rows(); ++i) {
    if (visits[i] < 200) continue;
    for (int j = 0; j < p.cols(); ++j) {
      const auto it = counts.find({i, j});
      const double seen = it == counts.end() ? 0.0 : it->second;
      const double expect = visits[i] * p(i, j);
      if (p(i, j) < 1e-12) {
        CHECK(seen == 0.0);
        continue;
      }
      if (expect < 5.0) continue;
      const double z = (seen - expect) / std::sqrt(expect * (1.0 - p(i, j)));
      CHECK(std::abs(z) < 5.0);
      ++checked;
    }
  }
  CHECK(checked > 10);
}

}  // namespace

TEST_CASE("chain config validation") {
  ChainConfig c = small_canonical(0.0);
  CHECK_NOTHROW(c.validate());
  c.beta = -1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = small_canonical(0.0);
  c.initial = CpsConfig{{1, 0, 1}};
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = small_canonical(0.0);
  c.initial = CpsConfig{{3, 0, 1, 0}};
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = small_canonical(0.0);
  c.n = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("default initial configurations") {
  ModelSpec m;
  m.L = 6;
  m.n_max = 6;
  CHECK(default_initial(m, Ensemble::canonical, 6) == CpsConfig{{1, 1, 1, 1, 1, 1}});
  CHECK(default_initial(m, Ensemble::canonical, 8) == CpsConfig{{2, 2, 1, 1, 1, 1}});
  CHECK(default_initial(m, Ensemble::grand_canonical, 0) == CpsConfig{{0, 0, 0, 0}});
  CHECK_THROWS_AS(default_initial(m, Ensemble::canonical, 100), DomainError);
}

TEST_CASE("hybrid state purifies the edge sites") {
  for (int d : {2, 3}) {
    ModelSpec m;
    m.L = 4;
    m.n_max = d - 1;
    m.hardcore = d == 2;
    const CpsConfig inner{{1, 0}};
    const MatrixProductState psi = hybrid_reset_and_build(inner, m);
    CHECK(psi.length() == 6);
    CHECK_NOTHROW(psi.check_invariants());
    CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(psi.global_charge() == 1);
    const Eigen::VectorXcd v = testing::mps_to_vector(psi);
    Eigen::VectorXcd ref = Eigen::VectorXcd::Zero(v.size());
    for (int n = 0; n < d; ++n)
      for (int k = 0; k < d; ++k)
        ref(testing::config_index({d - 1 - n, n, 1, 0, k, d - 1 - k}, d)) = 1.0 / d;
    CHECK((v - ref).norm() < 1e-14);
  }
}

TEST_CASE("canonical steps keep the particle number and alternate the basis") {
  const ChainContext ctx(small_canonical(1.0));
  Rng rng(3);
  ChainState st{ctx.config().initial, false};
  for (long step = 0; step < 12; ++step) {
    const StepOutcome o = metts_step_canonical(st, step, ctx, rng);
    CHECK(o.next.config.total() == 2);
    CHECK(o.record.parity == (step % 2 == 0 ? Parity::even : Parity::odd));
    CHECK(o.next.rotated == (step % 2 == 1));
    CHECK(o.record.n_total == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(o.record.n_total_sq == doctest::Approx(4.0).epsilon(1e-10));
    st = o.next;
  }
  CHECK_THROWS_AS(metts_step_grand(st, 0, ctx, rng), DomainError);
}

TEST_CASE("grand-canonical steps change the inner particle number by at most two") {
  ChainConfig c;
  c.model.L = 6;
  c.model.hardcore = true;
  c.model.mu = -0.5;
  c.beta = 2.0;
  c.dtau = 0.05;
  c.tau = 1.0;
  c.n = 2;
  c.ensemble = Ensemble::grand_canonical;
  c.initial = CpsConfig{{0, 0, 0, 0}};
  const ChainContext ctx(c);
  Rng rng(5);
  ChainState st{c.initial, false};
  for (long step = 0; step < 60; ++step) {
    const StepOutcome o = metts_step_grand(st, step, ctx, rng);
    CHECK(std::abs(o.next.config.total() - st.config.total()) <= 2);
    CHECK(o.record.n_total >= 0.0);
    CHECK(o.record.n_total_sq >= o.record.n_total * o.record.n_total - 1e-10);
    st = o.next;
  }
}

TEST_CASE("equal seeds give equal chains") {
  ChainConfig c = small_canonical(1.0);
  c.n_samples = 20;
  c.burn_in = 2;
  c.seed = 11;
  std::vector<SampleRecord> a, b;
  run_chain(c, [&](const SampleRecord& r) { a.push_back(r); });
  run_chain(c, [&](const SampleRecord& r) { b.push_back(r); });
  REQUIRE(a.size() == 22);
  for (std::size_t k = 0; k < a.size(); ++k) {
    SampleRecord x = a[k], y = b[k];
    x.wall_seconds = y.wall_seconds = 0.0;
    CHECK(x == y);
  }
}

TEST_CASE("empirical transitions follow the exact transition matrix") {
  for (double tau : {0.0, 1.0}) {
    const ChainConfig c = small_canonical(tau);
    const ChainContext ctx(c);
    const FockBasis basis = enumerate_basis(4, 2, 2);
    const Eigen::MatrixXd p = transition_matrix(c.model, basis, c.beta, tau, 2, c.model.u_prime).p;
    Rng rng(77);
    ChainState st{c.initial, false};
    std::map<std::pair<int, int>, int> counts;
    std::vector<int> visits(basis.size(), 0);
    int from = -1;
    const long steps = tau == 0.0 ? 12000 : 24000;
    for (long step = 0; step < steps; ++step) {
      // Pairs of unrotated configurations: every step without gates, every
      // second step with them.
      const bool start = tau == 0.0 || step % 2 == 1;
      const int i = basis.find(st.config.occupations);
      if (start) from = i;
      const StepOutcome o = metts_step_canonical(st, step, ctx, rng);
      st = o.next;
      if (!st.rotated && from >= 0 && (tau == 0.0 || step % 2 == 0)) {
        ++counts[{from, basis.find(st.config.occupations)}];
        ++visits[from];
        from = -1;
      }
    }
    check_transitions(counts, visits, p);
  }
}

TEST_CASE("small grand-canonical chain reproduces free-fermion values") {
  ChainConfig c;
  c.model.L = 4;
  c.model.hardcore = true;
  c.model.mu = -0.5;
  c.beta = 2.0;
  c.dtau = 0.025;
  c.tau = 1.0;
  c.n = 2;
  c.ensemble = Ensemble::grand_canonical;
  c.n_samples = 4000;
  c.burn_in = 10;
  c.seed = 2;
  c.trunc = {1 << 20, 1e-12};
  c.initial = CpsConfig{{0, 0}};
  std::vector<double> n, n2;
  run_chain(c, [&](const SampleRecord& r) {
    if (r.step < c.burn_in) return;
    n.push_back(r.n_total);
    n2.push_back(r.n_total_sq);
  });
  const GrandCanonicalValues exact = grand_canonical({4, 1.0, 2.0, -0.5});
  const RCurve rc = r_curve(n);
  double mean = 0.0;
  for (double x : n) mean += x;
  mean /= n.size();
  CHECK(std::abs(mean - exact.n_mean) < 4.0 * rc.saturated().sigma_b + 0.01);
  const JackknifeResult k = jackknife_kappa(n, n2, 2.0, rc.saturated().block_size);
  CHECK(std::abs(k.mean - exact.kappa) < 4.0 * k.sigma + 0.02);
}

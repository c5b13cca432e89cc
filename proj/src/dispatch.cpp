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

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include "metts/config.hpp"
#include "metts/edref.hpp"
#include "metts/errors.hpp"
#include "metts/oracle.hpp"
#include "metts/sampler.hpp"
#include "metts/stats.hpp"

namespace metts {

using nlohmann::json;

namespace {

// Artifact destination: output.path, or the console when it is empty.
class Artifact {
 public:
  Artifact(const std::string& path, std::ostream& console) : out_(&console) {
    if (path.empty()) return;
    file_.open(path, std::ios::out | std::ios::trunc);
    if (!file_) throw IoError("cannot open output file '" + path + "'");
    out_ = &file_;
  }
  std::ostream& stream() { return *out_; }
  void check(const std::string& what) const {
    if (!*out_) throw IoError("failed writing " + what);
  }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

void csv_header(std::ostream& out, const json& meta) { out << "# metadata " << meta.dump() << '\n'; }

void run_ed_thermal(const RunConfig& c, std::ostream& console) {
  const FockBasis basis = enumerate_basis(c.model.L, c.n_particles, c.model.local_dim() - 1);
  const Eigen::MatrixXd H = dense_hamiltonian(c.model, basis);
  ModelSpec no_mu = c.model;
  no_mu.mu = 0.0;
  const Eigen::MatrixXd O = c.energy_includes_mu ? H : dense_hamiltonian(no_mu, basis);
  const double e = thermal_expectation(H, O, c.beta);
  console << std::setprecision(10) << "<H>/J = " << e << " (basis size " << basis.size() << ")\n";
  Artifact art(c.output_path, console);
  json doc = {{"metadata", metadata(c)}, {"result", {{"energy", e}, {"basis_size", basis.size()}}}};
  art.stream() << doc.dump() << '\n';
  art.check("ed-thermal result");
}

void run_slme_sweep(const RunConfig& c, std::ostream& console) {
  const FockBasis basis = enumerate_basis(c.model.L, c.n_particles, c.model.local_dim() - 1);
  std::vector<SweepPoint> points;
  std::optional<SlmeResult> at_zero;
  for (const UPrime& up : c.sweep_u_prime)
    for (int n : c.sweep_n)
      for (double tau : c.sweep_tau) {
        const double u = up.resolve(c.model.U);
        SlmeResult r;
        if (tau == 0.0 && at_zero) {
          r = *at_zero;
        } else {
          r = slme(transition_matrix(c.model, basis, c.beta, tau, n, u));
          if (tau == 0.0) at_zero = r;
        }
        points.push_back({tau, n, u, r});
      }
  Artifact art(c.output_path, console);
  csv_header(art.stream(), metadata(c));
  write_sweep_csv(art.stream(), points);
  art.check("slme sweep");
}

void run_oracle(const RunConfig& c, std::ostream& console) {
  FreeFermionSpec spec{c.model.L, c.model.J, c.beta, c.model.mu};
  const GrandCanonicalValues v = grand_canonical(spec);
  console << std::setprecision(10) << "kappa*J = " << v.kappa << ", <N> = " << v.n_mean
          << ", nu = " << v.n_mean / spec.L << ", <H>/J = " << v.energy << '\n';
  Artifact art(c.output_path, console);
  csv_header(art.stream(), metadata(c));
  write_mu_sweep_csv(art.stream(), spec, c.sweep_mu);
  art.check("oracle sweep");
}

void run_metts(const RunConfig& c, std::ostream& console) {
  const ChainConfig cc = c.chain_config();
  Artifact art(c.output_path, console);
  art.stream() << json{{"metadata", metadata(c)}}.dump() << '\n';
  art.check("sample header");
  SampleWriter writer(art.stream());
  const bool timing = c.timing == "wall";
  run_chain(cc, [&](const SampleRecord& r) {
    if (timing) return writer.write(r);
    SampleRecord copy = r;
    copy.wall_seconds = 0.0;
    writer.write(copy);
  });
}

void run_stats(const RunConfig& c, std::ostream& console) {
  std::ifstream in(c.stats_input);
  if (!in) throw IoError("cannot open sample file '" + c.stats_input + "'");
  const SampleFile file = read_samples(in);
  if (!file.metadata.is_object() || !file.metadata.contains("config"))
    throw IoError("sample file '" + c.stats_input + "' has no metadata header");
  const RunConfig source = parse_config(file.metadata.at("config"));
  const long burn = c.stats_burn_in.value_or(source.burn_in);

  std::vector<double> e, n, n2;
  double wall = 0.0;
  for (const auto& r : file.records) {
    if (r.step < burn) continue;
    e.push_back(r.energy);
    n.push_back(r.n_total);
    n2.push_back(r.n_total_sq);
    wall += r.wall_seconds;
  }
  if (e.size() < 16) throw DomainError("stats: fewer than 16 samples after burn-in");
  const double t_samp = wall / e.size();

  auto row = [&](const std::string& name, const std::vector<double>& x) {
    const RCurve rc = r_curve(x);
    const BlockingResult& sat = rc.saturated();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= x.size();
    return std::pair{SummaryRow{name, mean, sat.sigma_b, rc.saturated_R, t_samp, rc.saturated_R * t_samp,
                                !rc.lower_bound},
                     sat.block_size};
  };
  std::vector<SummaryRow> rows;
  rows.push_back(row("energy", e).first);
  const auto [n_row, n_block] = row("n_total", n);
  rows.push_back(n_row);
  if (source.mode == Mode::metts_grand) {
    const JackknifeResult k = jackknife_kappa(n, n2, source.beta, n_block);
    rows.push_back({"kappa", k.mean, k.sigma, n_row.R, t_samp, n_row.t_unc, n_row.r_converged});
  }

  json meta = metadata(c);
  meta["input_metadata"] = file.metadata;
  meta["burn_in"] = burn;
  Artifact art(c.output_path, console);
  csv_header(art.stream(), meta);
  write_summary_csv(art.stream(), rows);
  art.check("stats summary");
}

}  // namespace

void run(const RunConfig& config, std::ostream& console) {
  switch (config.mode) {
    case Mode::ed_thermal: return run_ed_thermal(config, console);
    case Mode::slme_sweep: return run_slme_sweep(config, console);
    case Mode::metts_canonical:
    case Mode::metts_grand: return run_metts(config, console);
    case Mode::oracle_ff: return run_oracle(config, console);
    case Mode::stats: return run_stats(config, console);
  }
}

int dispatch(const RunConfig& config, std::ostream& console, std::ostream& diagnostics) {
  try {
    run(config, console);
    return 0;
  } catch (const ConfigError& e) {
    diagnostics << "config error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    diagnostics << "invalid parameters: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    diagnostics << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    diagnostics << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const StructuralError& e) {
    diagnostics << "internal consistency error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace metts

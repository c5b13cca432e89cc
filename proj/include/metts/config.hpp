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

#ifndef METTS_CONFIG_HPP
#define METTS_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "metts/model.hpp"
#include "metts/sampler.hpp"
#include "metts/symtensor.hpp"

namespace metts {

inline constexpr const char* kVersion = "0.1.0";

enum class Mode { ed_thermal, slme_sweep, metts_canonical, metts_grand, oracle_ff, stats };

std::string to_string(Mode m);

/// On-site coupling of the rotation gates: a number or "U".
struct UPrime {
  bool follows_U = true;
  double value = 0.0;

  double resolve(double U) const { return follows_U ? U : value; }
  nlohmann::json to_json() const;
};

struct RunConfig {
  Mode mode = Mode::ed_thermal;
  ModelSpec model;
  /// Canonical particle number; defaults to L.
  int n_particles = 0;

  double beta = 1.0;
  double dtau = 0.0625;
  std::string schedule = "second_order";

  double tau = 0.0;
  int n = 1;
  UPrime u_prime;

  long n_samples = 1024;
  long burn_in = 32;
  std::uint64_t seed = 0;
  std::optional<std::vector<int>> initial;

  TruncationSpec trunc{4096, 1e-10};

  std::string output_path;  // empty: standard output
  std::string format;       // jsonl, csv or json depending on the mode
  std::string timing = "off";
  bool energy_includes_mu = false;

  std::vector<double> sweep_tau;
  std::vector<int> sweep_n;
  std::vector<UPrime> sweep_u_prime;
  std::vector<double> sweep_mu;

  std::string stats_input;
  std::optional<long> stats_burn_in;

  /// Fully explicit form; parsing it gives back the same config.
  nlohmann::json normalized() const;
  ChainConfig chain_config() const;
};

/// Strict parse: unknown keys and invalid values raise ConfigError naming
/// the dotted key path.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& j);
inline RunConfig parse_config(const char* text) { return parse_config(std::string(text)); }

/// Header object written at the top of every artifact.
nlohmann::json metadata(const RunConfig& config);

/// One JSON object per record in SampleRecord field order.
std::string sample_line(const SampleRecord& r);
SampleRecord parse_sample_line(const std::string& line);

/// Streams records, flushing each line. Throws IoError carrying the number
/// of records written before the failure.
class SampleWriter {
 public:
  explicit SampleWriter(std::ostream& out) : out_(out) {}
  void write(const SampleRecord& r);
  std::size_t count() const { return count_; }

 private:
  std::ostream& out_;
  std::size_t count_ = 0;
};

std::size_t write_samples(std::ostream& out, const std::vector<SampleRecord>& records);

struct SampleFile {
  nlohmann::json metadata;
  std::vector<SampleRecord> records;
};

SampleFile read_samples(std::istream& in);

/// Runs the mode; errors propagate as exceptions.
void run(const RunConfig& config, std::ostream& console);

/// run() with errors mapped to exit codes: 1 config, 2 numerical, 3 I/O.
int dispatch(const RunConfig& config, std::ostream& console, std::ostream& diagnostics);

}  // namespace metts

#endif  // METTS_CONFIG_HPP

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

#ifndef METTS_STATS_HPP
#define METTS_STATS_HPP

#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace metts {

/// C(t) = 1/(M-t) sum_i x_i x_{i+t} - mean^2.
double autocorrelation(std::span<const double> x, int t);

/// Standard error sqrt(1/K * 1/K sum (v - mean)^2) of K values.
double standard_error(std::span<const double> v);

struct BlockingResult {
  int block_size = 1;
  double sigma = 0.0;    // from the bare samples
  double sigma_b = 0.0;  // from the block means
  double R = 1.0;        // sigma_b^2 / sigma^2
};

/// Blocking analysis with the trailing partial block dropped. Needs at least
/// eight blocks. A constant series gives R = 1.
BlockingResult blocking(std::span<const double> x, int block_size);

/// Powers of two up to M/8.
std::vector<int> default_block_sizes(std::size_t M);

/// Rule used to call R saturated.
inline constexpr const char* kPlateauRule =
    "first power-of-two block size whose R changed by less than 10% relative to half that size";

struct RCurve {
  std::vector<BlockingResult> points;
  /// R at the plateau, or the largest R seen when there is none.
  double saturated_R = 1.0;
  int saturation_index = -1;
  /// No plateau found: saturated_R is only a lower bound.
  bool lower_bound = false;

  const BlockingResult& saturated() const;
};

/// R for ascending block sizes; empty `block_sizes` selects the defaults.
RCurve r_curve(std::span<const double> x, std::vector<int> block_sizes = {});

struct JackknifeResult {
  double mean = 0.0;
  double sigma = 0.0;
};

/// Delete-one-block jackknife of estimator(block-averaged means of each
/// series). The mean is bias corrected. The error uses the same 1/K
/// normalization as `standard_error`, so a linear estimator reproduces the
/// blocked error sigma_b.
JackknifeResult jackknife(const std::vector<std::span<const double>>& series, int block_size,
                          const std::function<double(std::span<const double>)>& estimator);

/// kappa = beta (<N^2> - <N>^2) from per-sample <N> and <N^2>.
JackknifeResult jackknife_kappa(std::span<const double> n, std::span<const double> n_sq, double beta,
                                int block_size);

struct ExponentialFit {
  double tau_exp = 0.0;
  int lags_used = 0;
};

/// Diagnostic fit of C(t)/C(0) ~ exp(-t/tau_exp) over lags where it exceeds
/// 5%, up to max_lag.
ExponentialFit fit_autocorrelation_time(std::span<const double> x, int max_lag);

struct SummaryRow {
  std::string estimator;
  double mean = 0.0;
  double sigma = 0.0;
  double R = 1.0;
  double t_samp = 0.0;
  double t_unc = 0.0;
  bool r_converged = true;
};

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace metts

#endif  // METTS_STATS_HPP

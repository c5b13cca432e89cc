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

#include "metts/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

#include "metts/errors.hpp"

namespace metts {

namespace {

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

std::vector<double> block_means(std::span<const double> x, int block_size) {
  const std::size_t K = x.size() / block_size;
  std::vector<double> means(K);
  for (std::size_t k = 0; k < K; ++k) means[k] = mean_of(x.subspan(k * block_size, block_size));
  return means;
}

}  // namespace

double autocorrelation(std::span<const double> x, int t) {
  const auto M = static_cast<int>(x.size());
  if (t < 0 || t >= M) throw DomainError("autocorrelation: lag must lie in [0, M)");
  const double m = mean_of(x);
  double s = 0.0;
  for (int i = 0; i + t < M; ++i) s += x[i] * x[i + t];
  return s / (M - t) - m * m;
}

double standard_error(std::span<const double> v) {
  if (v.size() < 2) throw DomainError("standard_error: need at least two values");
  const double m = mean_of(v);
  double s = 0.0;
  for (double a : v) s += (a - m) * (a - m);
  return std::sqrt(s / v.size()) / std::sqrt(static_cast<double>(v.size()));
}

BlockingResult blocking(std::span<const double> x, int block_size) {
  if (block_size < 1) throw DomainError("blocking: block size must be positive");
  const std::size_t K = x.size() / block_size;
  if (K < 8) throw DomainError("blocking: fewer than eight blocks");
  const auto kept = x.first(K * block_size);
  const std::vector<double> means = block_means(kept, block_size);
  BlockingResult r{block_size, standard_error(kept), standard_error(means), 1.0};
  if (r.sigma > 0.0) r.R = (r.sigma_b * r.sigma_b) / (r.sigma * r.sigma);
  if (block_size == 1) r.R = 1.0;
  return r;
}

std::vector<int> default_block_sizes(std::size_t M) {
  std::vector<int> sizes;
  for (std::size_t b = 1; b <= M / 8; b *= 2) sizes.push_back(static_cast<int>(b));
  return sizes;
}

const BlockingResult& RCurve::saturated() const {
  if (points.empty()) throw DomainError("RCurve: empty curve");
  if (saturation_index >= 0) return points[saturation_index];
  return *std::max_element(points.begin(), points.end(),
                           [](const auto& a, const auto& b) { return a.R < b.R; });
}

RCurve r_curve(std::span<const double> x, std::vector<int> block_sizes) {
  if (block_sizes.empty()) block_sizes = default_block_sizes(x.size());
  if (block_sizes.empty()) throw DomainError("r_curve: series too short for blocking");
  if (!std::is_sorted(block_sizes.begin(), block_sizes.end()))
    throw DomainError("r_curve: block sizes must be ascending");
  RCurve c;
  for (int b : block_sizes) c.points.push_back(blocking(x, b));
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const auto& prev = c.points[i - 1];
    const auto& cur = c.points[i];
    if (cur.block_size != 2 * prev.block_size) continue;
    if (std::abs(cur.R - prev.R) < 0.1 * prev.R) {
      c.saturation_index = static_cast<int>(i);
      break;
    }
  }
  c.lower_bound = c.saturation_index < 0;
  c.saturated_R = c.saturated().R;
  return c;
}

JackknifeResult jackknife(const std::vector<std::span<const double>>& series, int block_size,
                          const std::function<double(std::span<const double>)>& estimator) {
  if (series.empty()) throw DomainError("jackknife: no series");
  if (block_size < 1) throw DomainError("jackknife: block size must be positive");
  const std::size_t M = series.front().size();
  for (const auto& s : series)
    if (s.size() != M) throw DomainError("jackknife: series lengths differ");
  const std::size_t K = M / block_size;
  if (K < 8) throw DomainError("jackknife: fewer than eight blocks");

  const std::size_t S = series.size();
  std::vector<std::vector<double>> blocks(S);
  std::vector<double> full(S);
  for (std::size_t s = 0; s < S; ++s) {
    blocks[s] = block_means(series[s].first(K * block_size), block_size);
    full[s] = mean_of(blocks[s]);
  }
  const double theta = estimator(full);
  std::vector<double> loo(K);
  std::vector<double> args(S);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t s = 0; s < S; ++s) args[s] = (K * full[s] - blocks[s][k]) / (K - 1.0);
    loo[k] = estimator(args);
  }
  const double loo_mean = mean_of(loo);
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  const double Kd = static_cast<double>(K);
  // (K-1)^2/K^2 * sum: equals the 1/K^2 block-mean error for a linear estimator.
  return {Kd * theta - (Kd - 1.0) * loo_mean, (Kd - 1.0) / Kd * std::sqrt(ss)};
}

JackknifeResult jackknife_kappa(std::span<const double> n, std::span<const double> n_sq, double beta,
                                int block_size) {
  return jackknife({n, n_sq}, block_size,
                   [beta](std::span<const double> m) { return beta * (m[1] - m[0] * m[0]); });
}

ExponentialFit fit_autocorrelation_time(std::span<const double> x, int max_lag) {
  const double c0 = autocorrelation(x, 0);
  ExponentialFit fit;
  if (c0 <= 0.0) return fit;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int count = 0;
  for (int t = 0; t <= max_lag && t < static_cast<int>(x.size()); ++t) {
    const double r = autocorrelation(x, t) / c0;
    if (r < 0.05) break;
    const double y = std::log(r);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  fit.lags_used = count;
  if (count < 2) return fit;
  const double slope = (count * sty - st * sy) / (count * stt - st * st);
  if (slope < 0.0) fit.tau_exp = -1.0 / slope;
  return fit;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "estimator,mean,sigma,R,t_samp,t_unc,r_converged\n" << std::setprecision(17);
  for (const auto& r : rows)
    out << r.estimator << ',' << r.mean << ',' << r.sigma << ',' << r.R << ',' << r.t_samp << ',' << r.t_unc << ','
        << (r.r_converged ? "true" : "false") << '\n';
}

}  // namespace metts

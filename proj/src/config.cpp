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

#include "metts/config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "metts/errors.hpp"
#include "metts/oracle.hpp"
#include "metts/stats.hpp"

namespace metts {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string to_string(Mode m) {
  switch (m) {
    case Mode::ed_thermal: return "ed-thermal";
    case Mode::slme_sweep: return "slme-sweep";
    case Mode::metts_canonical: return "metts-canonical";
    case Mode::metts_grand: return "metts-grand";
    case Mode::oracle_ff: return "oracle-ff";
    case Mode::stats: return "stats";
  }
  return "?";
}

json UPrime::to_json() const { return follows_U ? json("U") : json(value); }

namespace {

// Reads one config section and remembers which keys were consumed.
class Section {
 public:
  Section(const json& parent, const std::string& key, const std::string& prefix)
      : path_(prefix.empty() ? key : prefix + "." + key) {
    if (!parent.contains(key)) return;
    node_ = &parent.at(key);
    if (!node_->is_object()) throw ConfigError(path_, "must be an object");
  }

  bool has(const std::string& key) const { return node_ && node_->contains(key); }
  std::string path(const std::string& key) const { return path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    return has(key) ? &node_->at(key) : nullptr;
  }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(path(key), "must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
    return x;
  }

  long long integer(const std::string& key, long long fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(path(key), "must be an integer");
    return v->get<long long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(path(key), "must be true or false");
    return v->get<bool>();
  }

  std::string choice(const std::string& key, const std::string& fallback, const std::set<std::string>& allowed) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(path(key), "must be a string");
    const auto s = v->get<std::string>();
    if (!allowed.empty() && !allowed.contains(s)) throw ConfigError(path(key), "unsupported value '" + s + "'");
    return s;
  }

  UPrime u_prime(const json& v, const std::string& where) const {
    if (v.is_string() && v.get<std::string>() == "U") return {true, 0.0};
    if (v.is_number() && std::isfinite(v.get<double>())) return {false, v.get<double>()};
    throw ConfigError(where, "must be a number or \"U\"");
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [k, _] : node_->items())
      if (!seen_.contains(k)) throw ConfigError(path(k), "unknown key");
  }

 private:
  std::string path_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

template <class T>
std::vector<T> number_list(const json* v, const std::string& where) {
  if (!v->is_array() || v->empty()) throw ConfigError(where, "must be a non-empty array");
  std::vector<T> out;
  for (const auto& e : *v) {
    if constexpr (std::is_integral_v<T>) {
      if (!e.is_number_integer()) throw ConfigError(where, "entries must be integers");
    } else {
      if (!e.is_number() || !std::isfinite(e.get<double>())) throw ConfigError(where, "entries must be finite numbers");
    }
    out.push_back(e.get<T>());
  }
  return out;
}

Mode parse_mode(const json& root) {
  if (!root.contains("mode")) throw ConfigError("mode", "missing");
  const json& m = root.at("mode");
  if (!m.is_string()) throw ConfigError("mode", "must be a string");
  const auto s = m.get<std::string>();
  for (Mode mode : {Mode::ed_thermal, Mode::slme_sweep, Mode::metts_canonical, Mode::metts_grand, Mode::oracle_ff,
                    Mode::stats})
    if (to_string(mode) == s) return mode;
  throw ConfigError("mode", "unsupported value '" + s + "'");
}

std::string default_format(Mode m) {
  switch (m) {
    case Mode::metts_canonical:
    case Mode::metts_grand: return "jsonl";
    case Mode::ed_thermal: return "json";
    default: return "csv";
  }
}

std::vector<double> default_tau_grid() {
  std::vector<double> t{0.0};
  for (int k = 1; k <= 20; ++k) t.push_back(0.2 * k);
  return t;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(document)", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig parse_config(const json& root) {
  if (!root.is_object()) throw ConfigError("(document)", "top level must be an object");
  static const std::set<std::string> sections{"mode",     "model",  "thermal", "gates", "sampling",
                                              "truncation", "output", "sweep",   "stats"};
  for (const auto& [k, _] : root.items())
    if (!sections.contains(k)) throw ConfigError(k, "unknown key");

  RunConfig c;
  c.mode = parse_mode(root);
  const bool needs_model = c.mode != Mode::stats;
  const bool canonical = c.mode == Mode::ed_thermal || c.mode == Mode::slme_sweep || c.mode == Mode::metts_canonical;

  Section model(root, "model", "");
  if (needs_model && !model.has("L")) throw ConfigError("model.L", "missing");
  c.model.L = static_cast<int>(model.integer("L", 2));
  c.model.J = model.number("J", 1.0);
  c.model.U = model.number("U", 0.0);
  c.model.mu = model.number("mu", 0.0);
  c.model.hardcore = model.boolean("hardcore", c.mode == Mode::metts_grand || c.mode == Mode::oracle_ff);
  c.model.n_max = static_cast<int>(model.integer("n_max", 1));
  c.n_particles = static_cast<int>(model.integer("n_particles", c.model.L));
  model.finish();
  if (c.mode == Mode::oracle_ff) {
    if (c.model.L < 1) throw ConfigError("model.L", "must be positive");
  } else if (c.model.L < 2 || c.model.L % 2 != 0) {
    throw ConfigError("model.L", "must be an even integer >= 2");
  }
  if (c.model.n_max < 1) throw ConfigError("model.n_max", "must be at least 1");
  if (c.model.hardcore && c.model.n_max != 1) throw ConfigError("model.n_max", "must be 1 for hardcore bosons");
  if (canonical && (c.n_particles < 0 || c.n_particles > c.model.L * (c.model.local_dim() - 1)))
    throw ConfigError("model.n_particles", "does not fit on the chain");

  Section thermal(root, "thermal", "");
  if (needs_model && !thermal.has("beta")) throw ConfigError("thermal.beta", "missing");
  c.beta = thermal.number("beta", 1.0);
  c.dtau = thermal.number("dtau", c.model.hardcore ? 0.025 : 0.0625);
  c.schedule = thermal.choice("schedule", "second_order", {"second_order", "forest_ruth"});
  thermal.finish();
  if (c.mode == Mode::oracle_ff ? !(c.beta > 0.0) : !(c.beta >= 0.0))
    throw ConfigError("thermal.beta", c.mode == Mode::oracle_ff ? "must be positive" : "must be non-negative");
  if (!(c.dtau > 0.0)) throw ConfigError("thermal.dtau", "must be positive");
  if (c.mode == Mode::metts_canonical || c.mode == Mode::metts_grand) {
    const double steps = 0.5 * c.beta / c.dtau;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
      throw ConfigError("thermal.dtau", "must divide beta/2");
  }

  Section gates(root, "gates", "");
  c.tau = gates.number("tau", 0.0);
  c.n = static_cast<int>(gates.integer("n", 1));
  if (const json* v = gates.get("u_prime")) c.u_prime = gates.u_prime(*v, gates.path("u_prime"));
  gates.finish();
  if (!(c.tau >= 0.0)) throw ConfigError("gates.tau", "must be non-negative");
  if (c.n < 1) throw ConfigError("gates.n", "must be at least 1");
  c.model.u_prime = c.u_prime.resolve(c.model.U);

  Section sampling(root, "sampling", "");
  c.n_samples = static_cast<long>(sampling.integer("n_samples", 1024));
  c.burn_in = static_cast<long>(sampling.integer("burn_in", 32));
  const long long seed = sampling.integer("seed", 0);
  if (seed < 0) throw ConfigError("sampling.seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  if (const json* v = sampling.get("initial")) c.initial = number_list<int>(v, sampling.path("initial"));
  sampling.finish();
  if (c.n_samples < 1) throw ConfigError("sampling.n_samples", "must be positive");
  if (c.burn_in < 0) throw ConfigError("sampling.burn_in", "must be non-negative");

  Section trunc(root, "truncation", "");
  const long long max_bond = trunc.integer("max_bond", 4096);
  c.trunc.cutoff = trunc.number("cutoff", 1e-10);
  trunc.finish();
  if (max_bond < 1 || max_bond > (1 << 24)) throw ConfigError("truncation.max_bond", "must lie in [1, 2^24]");
  c.trunc.max_bond = static_cast<int>(max_bond);
  if (!(c.trunc.cutoff >= 0.0 && c.trunc.cutoff < 1.0)) throw ConfigError("truncation.cutoff", "must lie in [0, 1)");

  Section output(root, "output", "");
  const json* path = output.get("path");
  if (path) {
    if (!path->is_string()) throw ConfigError("output.path", "must be a string");
    c.output_path = path->get<std::string>();
  }
  c.format = output.choice("format", default_format(c.mode), {});
  if (c.format != default_format(c.mode))
    throw ConfigError("output.format", "mode " + to_string(c.mode) + " writes " + default_format(c.mode));
  c.timing = output.choice("timing", "off", {"off", "wall"});
  c.energy_includes_mu = output.boolean("energy_includes_mu", false);
  output.finish();

  Section sweep(root, "sweep", "");
  const json* st = sweep.get("tau");
  c.sweep_tau = st ? number_list<double>(st, sweep.path("tau")) : default_tau_grid();
  const json* sn = sweep.get("n");
  c.sweep_n = sn ? number_list<int>(sn, sweep.path("n")) : std::vector<int>{c.n};
  if (const json* su = sweep.get("u_prime")) {
    if (!su->is_array() || su->empty()) throw ConfigError(sweep.path("u_prime"), "must be a non-empty array");
    for (const auto& e : *su) c.sweep_u_prime.push_back(sweep.u_prime(e, sweep.path("u_prime")));
  } else {
    c.sweep_u_prime = {c.u_prime};
  }
  const json* sm = sweep.get("mu");
  c.sweep_mu = sm ? number_list<double>(sm, sweep.path("mu"))
                  : c.mode == Mode::oracle_ff ? default_mu_grid() : std::vector<double>{};
  sweep.finish();
  for (double t : c.sweep_tau)
    if (t < 0.0) throw ConfigError("sweep.tau", "entries must be non-negative");
  for (int k : c.sweep_n)
    if (k < 1) throw ConfigError("sweep.n", "entries must be at least 1");

  Section stats(root, "stats", "");
  if (c.mode == Mode::stats && !stats.has("input")) throw ConfigError("stats.input", "missing");
  if (const json* in = stats.get("input")) {
    if (!in->is_string()) throw ConfigError("stats.input", "must be a string");
    c.stats_input = in->get<std::string>();
  }
  if (stats.has("burn_in")) {
    const long long b = stats.integer("burn_in", 0);
    if (b < 0) throw ConfigError("stats.burn_in", "must be non-negative");
    c.stats_burn_in = static_cast<long>(b);
  }
  stats.finish();

  if (c.initial) {
    const int expected = c.mode == Mode::metts_grand ? c.model.L - 2 : c.model.L;
    if (static_cast<int>(c.initial->size()) != expected)
      throw ConfigError("sampling.initial", "must list " + std::to_string(expected) + " occupations");
    int total = 0;
    for (int occ : *c.initial) {
      if (occ < 0 || occ >= c.model.local_dim()) throw ConfigError("sampling.initial", "occupation out of range");
      total += occ;
    }
    if (c.mode == Mode::metts_canonical && total != c.n_particles)
      throw ConfigError("sampling.initial", "must hold model.n_particles particles");
  }
  return c;
}

json RunConfig::normalized() const {
  ojson j;
  j["mode"] = to_string(mode);
  j["model"] = {{"L", model.L},           {"J", model.J},
                {"U", model.U},           {"mu", model.mu},
                {"n_max", model.n_max},   {"hardcore", model.hardcore},
                {"n_particles", n_particles}};
  j["thermal"] = {{"beta", beta}, {"dtau", dtau}, {"schedule", schedule}};
  j["gates"] = {{"tau", tau}, {"n", n}, {"u_prime", u_prime.to_json()}};
  ojson sampling = {{"n_samples", n_samples}, {"burn_in", burn_in}, {"seed", seed}};
  if (initial) sampling["initial"] = *initial;
  j["sampling"] = sampling;
  j["truncation"] = {{"max_bond", trunc.max_bond}, {"cutoff", trunc.cutoff}};
  j["output"] = {{"path", output_path},
                 {"format", format},
                 {"timing", timing},
                 {"energy_includes_mu", energy_includes_mu}};
  ojson up = ojson::array();
  for (const auto& u : sweep_u_prime) up.push_back(u.follows_U ? ojson("U") : ojson(u.value));
  j["sweep"] = {{"tau", sweep_tau}, {"n", sweep_n}, {"u_prime", up}};
  if (!sweep_mu.empty()) j["sweep"]["mu"] = sweep_mu;
  if (mode == Mode::stats) {
    j["stats"] = {{"input", stats_input}};
    if (stats_burn_in) j["stats"]["burn_in"] = *stats_burn_in;
  }
  return json::parse(j.dump());
}

ChainConfig RunConfig::chain_config() const {
  ChainConfig cc;
  cc.model = model;
  cc.beta = beta;
  cc.dtau = dtau;
  cc.schedule = schedule == "forest_ruth" ? SweepSchedule::forest_ruth() : SweepSchedule::second_order();
  cc.tau = tau;
  cc.n = n;
  cc.ensemble = mode == Mode::metts_grand ? Ensemble::grand_canonical : Ensemble::canonical;
  cc.n_samples = n_samples;
  cc.burn_in = burn_in;
  cc.seed = seed;
  cc.trunc = trunc;
  cc.energy_includes_mu = energy_includes_mu;
  cc.initial = initial ? CpsConfig{*initial} : default_initial(model, cc.ensemble, n_particles);
  return cc;
}

json metadata(const RunConfig& config) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return {{"config", config.normalized()},
          {"version", kVersion},
          {"seed", config.seed},
          {"rng", "mt19937_64, uniform = (draw >> 11) * 2^-53"},
          {"burn_in", config.burn_in},
          {"energy_includes_mu", config.energy_includes_mu},
          {"plateau_rule", kPlateauRule},
          {"timestamp", ts.str()}};
}

std::string sample_line(const SampleRecord& r) {
  ojson j;
  j["step"] = r.step;
  j["parity"] = to_string(r.parity);
  j["energy"] = r.energy;
  j["n_total"] = r.n_total;
  j["n_total_sq"] = r.n_total_sq;
  j["max_bond"] = r.max_bond;
  j["discarded"] = r.discarded;
  j["wall_seconds"] = r.wall_seconds;
  return j.dump();
}

SampleRecord parse_sample_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    SampleRecord r;
    r.step = j.at("step").get<long>();
    const auto parity = j.at("parity").get<std::string>();
    if (parity != "even" && parity != "odd") throw IoError("sample line: bad parity '" + parity + "'");
    r.parity = parity == "even" ? Parity::even : Parity::odd;
    r.energy = j.at("energy").get<double>();
    r.n_total = j.at("n_total").get<double>();
    r.n_total_sq = j.at("n_total_sq").get<double>();
    r.max_bond = j.at("max_bond").get<int>();
    r.discarded = j.at("discarded").get<double>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("sample line: ") + e.what());
  }
}

void SampleWriter::write(const SampleRecord& r) {
  out_ << sample_line(r) << '\n';
  out_.flush();
  if (!out_) throw IoError("failed writing sample " + std::to_string(r.step), count_);
  ++count_;
}

std::size_t write_samples(std::ostream& out, const std::vector<SampleRecord>& records) {
  SampleWriter w(out);
  for (const auto& r : records) w.write(r);
  return w.count();
}

SampleFile read_samples(std::istream& in) {
  SampleFile f;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      json head;
      try {
        head = json::parse(line);
      } catch (const json::exception& e) {
        throw IoError(std::string("sample file header: ") + e.what());
      }
      if (head.is_object() && head.contains("metadata")) {
        f.metadata = head.at("metadata");
        continue;
      }
    }
    f.records.push_back(parse_sample_line(line));
  }
  return f;
}

}  // namespace metts

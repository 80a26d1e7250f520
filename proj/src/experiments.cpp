#include "cogmc/experiments.hpp"

#include "cogmc/detection.hpp"
#include "cogmc/hitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cogmc {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// JSON reading

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError("schema", path + ": expected an object");
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  require_object(j, path);
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError("unknown_key", path + "/" + item.key() + ": unknown key");
  }
}

double number_at(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError("missing_key", path + "/" + key + ": required field missing");
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError("schema", path + "/" + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& j, const std::string& path, const char* key, double fallback) {
  return j.contains(key) ? number_at(j, path, key) : fallback;
}

long integer_at(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError("missing_key", path + "/" + key + ": required field missing");
  const json& v = j.at(key);
  if (!v.is_number_integer() && !(v.is_number() && std::floor(v.get<double>()) == v.get<double>()))
    throw ConfigError("schema", path + "/" + key + ": expected an integer");
  return v.is_number_integer() ? v.get<long>() : static_cast<long>(v.get<double>());
}

long integer_or(const json& j, const std::string& path, const char* key, long fallback) {
  return j.contains(key) ? integer_at(j, path, key) : fallback;
}

Vec3 vec_at(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError("missing_key", path + "/" + key + ": required field missing");
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 3)
    throw ConfigError("schema", path + "/" + key + ": expected an array of 3 numbers");
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    if (!v[k].is_number()) throw ConfigError("schema", path + "/" + key + ": expected numbers");
    out(k) = v[k].get<double>();
  }
  return out;
}

Range range_from(const json& j, const std::string& path) {
  check_keys(j, path, {"from", "to", "steps"});
  Range r;
  r.from = number_at(j, path, "from");
  r.to = number_at(j, path, "to");
  r.steps = static_cast<int>(integer_at(j, path, "steps"));
  return r;
}

ordered_json range_to_json(const Range& r) {
  return ordered_json{{"from", r.from}, {"to", r.to}, {"steps", r.steps}};
}

ordered_json vec_to_json(const Vec3& v) { return ordered_json::array({v(0), v(1), v(2)}); }

// Line and column of a byte offset, 1-based.
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// ---------------------------------------------------------------------------
// Experiment helpers

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

constexpr std::array<std::string_view, 6> kSweepVariables{"uM", "r_SP", "eta", "t", "mu", "Tb"};

// Copy of cfg with a config-level sweep variable set. `eta` and `t` are read
// by the recipes directly.
ExperimentConfig with_value(ExperimentConfig cfg, const std::string& var, double v) {
  if (var == "uM") {
    cfg.control.uM = v;
  } else if (var == "r_SP") {
    cfg.topology.x_S = place_secondary_tx(cfg.topology.x_S, cfg.topology.y_P, v);
  } else if (var == "Tb") {
    cfg.medium.Tb = v;
  } else if (var == "mu") {
    cfg.medium.mu = v;
  }
  return cfg;
}

std::vector<double> mu_curves(const ExperimentConfig& cfg) {
  if (cfg.params.mu_values.empty()) return {cfg.medium.mu};
  return cfg.params.mu_values;
}

struct LinkState {
  SlotSchedule schedule;
  ObservationModel model_P;
  ObservationModel model_S;
  ThresholdChoice eta_P;
  ThresholdChoice eta_S;
};

// Observation models and thresholds of both receivers at slot l.
LinkState evaluate_links(const ExperimentConfig& cfg, bool controlled) {
  const int l = cfg.params.slot;
  const ChannelTaps pp = channel_taps(cfg.topology, Link::Primary, Link::Primary, cfg.medium, l);
  const ChannelTaps sp = channel_taps(cfg.topology, Link::Secondary, Link::Primary, cfg.medium, l);
  const ChannelTaps ss =
      channel_taps(cfg.topology, Link::Secondary, Link::Secondary, cfg.medium, l);
  const ChannelTaps ps = channel_taps(cfg.topology, Link::Primary, Link::Secondary, cfg.medium, l);
  LinkState s;
  s.schedule = controlled ? transmit_budget(sp, cfg.traffic, cfg.control, l)
                          : uncontrolled_schedule(cfg.control, l);
  s.model_P = build_observation_model(Link::Primary, s.schedule, pp, sp, cfg.traffic, l);
  s.model_S = build_observation_model(Link::Secondary, s.schedule, ss, ps, cfg.traffic, l);
  s.eta_P = suboptimal_threshold(s.model_P);
  s.eta_S = suboptimal_threshold(s.model_S);
  return s;
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed, const std::string& recipe) {
  if (!seed)
    throw ConfigError("missing_seed", "recipe " + recipe + " is stochastic and needs --seed");
  return *seed;
}

SimConfig sim_or_throw(const ExperimentConfig& cfg) {
  if (!cfg.sim) throw ConfigError("missing_key", "/sim: required by recipe " + cfg.recipe);
  return *cfg.sim;
}

std::size_t bin_at(const SimResult& r, double t) {
  for (std::size_t b = 0; b < r.bin_end.size(); ++b)
    if (std::abs(r.bin_end[b] - t) <= 1e-9 * std::max(1.0, t)) return b;
  throw ConfigError("sweep", "sweep time " + std::to_string(t) +
                                 " is not a bin edge of the simulation grid");
}

using Runner = std::function<CsvTable(const ExperimentConfig&, const std::optional<std::uint64_t>&,
                                      ordered_json&)>;

CsvTable run_budget(const ExperimentConfig& cfg, const std::optional<std::uint64_t>&,
                    ordered_json& diag) {
  const std::string& var = cfg.sweep.variable;
  CsvTable t;
  t.header = {"l", var, "u_S", "expected_cci"};
  diag["schedules"] = ordered_json::array();
  for (double v : cfg.sweep.range.values()) {
    const ExperimentConfig c = with_value(cfg, var, v);
    c.check();
    const int horizon = c.params.horizon;
    const ChannelTaps sp = channel_taps(c.topology, Link::Secondary, Link::Primary, c.medium, horizon);
    const SlotSchedule s = transmit_budget(sp, c.traffic, c.control, horizon);
    for (int l = 1; l <= horizon; ++l)
      t.rows.push_back({static_cast<double>(l), v, static_cast<double>(s.secondary(l)),
                        expected_cci(s, sp, c.traffic, l)});
    const ScheduleDiagnostics d = diagnose_schedule(s);
    const double p_inf =
        p_two_far_deg_inf(derive_geometry(c.topology, Link::Secondary, Link::Primary), c.medium.D,
                          c.medium.mu);
    diag["schedules"].push_back(ordered_json{{var, v},
                                             {"settled", d.settled},
                                             {"settle_slot", d.settle_slot},
                                             {"plateau", d.plateau},
                                             {"oscillating", d.oscillating},
                                             {"steady_state_bound",
                                              steady_state_bound(p_inf, c.traffic, c.control)}});
  }
  return t;
}

CsvTable run_hitting_curves(const ExperimentConfig& cfg, const std::optional<std::uint64_t>& seed,
                            ordered_json& diag) {
  const std::uint64_t master = require_seed(seed, cfg.recipe);
  const SimConfig base = sim_or_throw(cfg);
  const Link tx = Link::Primary;
  const TwoFarGeometry gP = derive_geometry(cfg.topology, tx, Link::Primary);
  const TwoFarGeometry gS = derive_geometry(cfg.topology, tx, Link::Secondary);
  CsvTable t;
  t.header = {"t", "mu", "p_analytical_P", "p_analytical_S", "p_mc_P", "p_mc_S", "ci_P", "ci_S"};
  const std::vector<double> mus = mu_curves(cfg);
  for (std::size_t k = 0; k < mus.size(); ++k) {
    MediumParams medium = cfg.medium;
    medium.mu = mus[k];
    SimConfig sc = base;
    sc.seed = derived_seed(master, k);
    const SimResult r = simulate_two_far(cfg.topology, tx, Link::Primary, medium, sc);
    diag["runs"].push_back(ordered_json{{"mu", mus[k]},
                                        {"seed", sc.seed},
                                        {"degraded", r.degraded},
                                        {"alive", r.alive}});
    for (double time : cfg.sweep.range.values()) {
      const std::size_t b = bin_at(r, time);
      t.rows.push_back({time, mus[k], p_two_far_deg(time, gP, medium.D, medium.mu).value,
                        p_two_far_deg(time, gS, medium.D, medium.mu).value, r.cdf_target(b),
                        r.cdf_other(b), r.ci_target(b), r.ci_other(b)});
    }
  }
  return t;
}

CsvTable run_error_map(const ExperimentConfig& cfg, const std::optional<std::uint64_t>& seed,
                       ordered_json& diag) {
  const std::uint64_t master = require_seed(seed, cfg.recipe);
  const SimConfig base = sim_or_throw(cfg);
  if (!cfg.params.grid_x || !cfg.params.grid_y || !cfg.params.grid_z)
    throw ConfigError("missing_key", "/params/grid_x|grid_y|grid_z: required by recipe " + cfg.recipe);
  CsvTable t;
  t.header = {"t", "x", "y", "z", "separation", "p_analytical", "p_mc", "abs_error", "sigma"};
  diag["skipped"] = ordered_json::array();
  std::uint64_t stream = 0;
  for (double time : cfg.sweep.range.values()) {
    for (double x : cfg.params.grid_x->values()) {
      for (double y : cfg.params.grid_y->values()) {
        for (double z : cfg.params.grid_z->values()) {
          Topology topo = cfg.topology;
          topo.y_S = Vec3(x, y, z);
          ++stream;
          try {
            check_topology(topo);
          } catch (const std::invalid_argument& e) {
            diag["skipped"].push_back(ordered_json{{"x", x}, {"y", y}, {"z", z}, {"reason", e.what()}});
            continue;
          }
          const TwoFarGeometry g = derive_geometry(topo, Link::Primary, Link::Primary);
          const double analytical = p_two_far_deg(time, g, cfg.medium.D, cfg.medium.mu).value;
          SimConfig sc = base;
          sc.t_max = time;
          sc.n_time_bins = 1;
          sc.seed = derived_seed(master, stream);
          const SimResult r = simulate_two_far(topo, Link::Primary, Link::Primary, cfg.medium, sc);
          const double mc = r.cdf_target(0);
          t.rows.push_back({time, x, y, z, (topo.y_P - topo.y_S).norm(), analytical, mc,
                            std::abs(mc - analytical), r.sigma_target(0)});
        }
      }
    }
  }
  return t;
}

CsvTable run_expected_cci(const ExperimentConfig& cfg, const std::optional<std::uint64_t>&,
                          ordered_json&) {
  const std::string& var = cfg.sweep.variable;
  const int l = cfg.params.slot;
  CsvTable t;
  t.header = {var, "mu", "cci_controlled", "cci_uncontrolled", "u_S", "uM"};
  for (double mu : mu_curves(cfg)) {
    for (double v : cfg.sweep.range.values()) {
      ExperimentConfig c = with_value(cfg, var, v);
      c.medium.mu = mu;
      c.check();
      const ChannelTaps sp = channel_taps(c.topology, Link::Secondary, Link::Primary, c.medium, l);
      const SlotSchedule ctrl = transmit_budget(sp, c.traffic, c.control, l);
      const SlotSchedule free = uncontrolled_schedule(c.control, l);
      t.rows.push_back({v, mu, expected_cci(ctrl, sp, c.traffic, l),
                        expected_cci(free, sp, c.traffic, l), static_cast<double>(ctrl.secondary(l)),
                        c.control.uM});
    }
  }
  return t;
}

CsvTable run_threshold_sweep(const ExperimentConfig& cfg, const std::optional<std::uint64_t>&,
                             ordered_json& diag) {
  cfg.check();
  const LinkState s = evaluate_links(cfg, true);
  const int l = cfg.params.slot;
  CsvTable t;
  t.header = {"eta", "pe_P", "pe_S", "eta_P", "eta_S", "u_S"};
  for (double eta : cfg.sweep.range.values()) {
    t.rows.push_back({eta, ber_convolution_oracle(s.model_P, eta).pe,
                      ber_convolution_oracle(s.model_S, eta).pe, s.eta_P.eta, s.eta_S.eta,
                      static_cast<double>(s.schedule.secondary(l))});
  }
  const GridOptimum best_P = optimal_integer_threshold(s.model_P);
  const GridOptimum best_S = optimal_integer_threshold(s.model_S);
  diag["grid_optimum"] = ordered_json{{"eta_P", best_P.eta}, {"pe_P", best_P.ber.pe},
                                      {"eta_S", best_S.eta}, {"pe_S", best_S.ber.pe}};
  diag["suboptimal"] = ordered_json{
      {"eta_P", s.eta_P.eta}, {"pe_P", ber_convolution_oracle(s.model_P, s.eta_P.eta).pe},
      {"eta_S", s.eta_S.eta}, {"pe_S", ber_convolution_oracle(s.model_S, s.eta_S.eta).pe}};
  return t;
}

CsvTable run_fixed_vs_adaptive(const ExperimentConfig& cfg, const std::optional<std::uint64_t>&,
                               ordered_json&) {
  if (!cfg.params.eta_fixed)
    throw ConfigError("missing_key", "/params/eta_fixed: required by recipe " + cfg.recipe);
  const double fixed = *cfg.params.eta_fixed;
  const std::string& var = cfg.sweep.variable;
  CsvTable t;
  t.header = {var, "pe_P", "pe_S", "pe_P_fixed", "pe_S_fixed", "eta_P", "eta_S", "u_S"};
  for (double v : cfg.sweep.range.values()) {
    const ExperimentConfig c = with_value(cfg, var, v);
    c.check();
    const LinkState s = evaluate_links(c, true);
    t.rows.push_back({v, ber_convolution_oracle(s.model_P, s.eta_P.eta).pe,
                      ber_convolution_oracle(s.model_S, s.eta_S.eta).pe,
                      ber_convolution_oracle(s.model_P, fixed).pe,
                      ber_convolution_oracle(s.model_S, fixed).pe, s.eta_P.eta, s.eta_S.eta,
                      static_cast<double>(s.schedule.secondary(c.params.slot))});
  }
  return t;
}

CsvTable run_control_benefit(const ExperimentConfig& cfg, const std::optional<std::uint64_t>&,
                             ordered_json&) {
  const std::string& var = cfg.sweep.variable;
  CsvTable t;
  t.header = {var,          "pe_P_controlled", "pe_S_controlled", "pe_P_uncontrolled",
              "pe_S_uncontrolled", "eta_P_controlled", "eta_S_controlled",
              "eta_P_uncontrolled", "eta_S_uncontrolled", "u_S"};
  for (double v : cfg.sweep.range.values()) {
    const ExperimentConfig c = with_value(cfg, var, v);
    c.check();
    const LinkState on = evaluate_links(c, true);
    const LinkState off = evaluate_links(c, false);
    t.rows.push_back({v, ber_convolution_oracle(on.model_P, on.eta_P.eta).pe,
                      ber_convolution_oracle(on.model_S, on.eta_S.eta).pe,
                      ber_convolution_oracle(off.model_P, off.eta_P.eta).pe,
                      ber_convolution_oracle(off.model_S, off.eta_S.eta).pe, on.eta_P.eta,
                      on.eta_S.eta, off.eta_P.eta, off.eta_S.eta,
                      static_cast<double>(on.schedule.secondary(c.params.slot))});
  }
  return t;
}

CsvTable run_degradation_sweep(const ExperimentConfig& cfg, const std::optional<std::uint64_t>&,
                               ordered_json&) {
  const std::string& var = cfg.sweep.variable;
  CsvTable t;
  t.header = {var, "mu", "pe_P", "pe_S", "eta_P", "eta_S", "u_S"};
  for (double mu : mu_curves(cfg)) {
    for (double v : cfg.sweep.range.values()) {
      ExperimentConfig c = with_value(cfg, var, v);
      c.medium.mu = mu;
      c.check();
      const LinkState s = evaluate_links(c, true);
      t.rows.push_back({v, mu, ber_convolution_oracle(s.model_P, s.eta_P.eta).pe,
                        ber_convolution_oracle(s.model_S, s.eta_S.eta).pe, s.eta_P.eta,
                        s.eta_S.eta, static_cast<double>(s.schedule.secondary(c.params.slot))});
    }
  }
  return t;
}

const std::map<std::string, Runner, std::less<>>& runners() {
  static const std::map<std::string, Runner, std::less<>> table{
      {"fig2a", run_budget},           {"fig2b", run_budget},
      {"fig2c", run_budget},           {"fig3", run_hitting_curves},
      {"fig4", run_error_map},         {"fig5", run_expected_cci},
      {"fig6", run_threshold_sweep},   {"fig7", run_fixed_vs_adaptive},
      {"fig8", run_control_benefit},   {"fig9", run_degradation_sweep},
  };
  return table;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> Range::values() const {
  if (steps <= 1) return {from};
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i) {
    v[i] = from + (to - from) * i / (steps - 1);
    // 0.7999999999999999 -> 0.8 so sweep columns read cleanly
    if (std::abs(v[i]) < 1e3) v[i] = std::nearbyint(v[i] * 1e12) / 1e12;
  }
  v.back() = to;
  return v;
}

void ExperimentConfig::check() const {
  if (schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "/schema_version: unsupported version " +
                                            std::to_string(schema_version));
  if (std::find(kSweepVariables.begin(), kSweepVariables.end(), sweep.variable) ==
      kSweepVariables.end())
    throw ConfigError("schema", "/sweep/variable: '" + sweep.variable +
                                    "' is not one of uM, r_SP, eta, t, mu, Tb");
  const Range& r = sweep.range;
  if (!std::isfinite(r.from) || !std::isfinite(r.to) || r.steps < 1 || r.from > r.to)
    throw ConfigError("schema", "/sweep/range: need finite from <= to and steps >= 1");
  if (params.slot < 1 || params.horizon < 1)
    throw ConfigError("schema", "/params: slot and horizon must be >= 1");
  try {
    medium.check();
    traffic.check();
    control.check();
    if (sim) sim->check();
    check_topology(topology);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid_config", e.what());
  }
}

ordered_json to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["schema_version"] = cfg.schema_version;
  j["recipe"] = cfg.recipe;
  j["medium"] = {{"D", cfg.medium.D}, {"mu", cfg.medium.mu}, {"Tb", cfg.medium.Tb}};
  j["topology"] = {{"x_P", vec_to_json(cfg.topology.x_P)}, {"x_S", vec_to_json(cfg.topology.x_S)},
                   {"y_P", vec_to_json(cfg.topology.y_P)}, {"y_S", vec_to_json(cfg.topology.y_S)},
                   {"a_P", cfg.topology.a_P},              {"a_S", cfg.topology.a_S}};
  j["traffic"] = {{"q1P", cfg.traffic.q1P}, {"q1S", cfg.traffic.q1S}};
  j["control"] = {{"N", cfg.control.N}, {"uL", cfg.control.uL}, {"uM", cfg.control.uM}};
  if (cfg.sim) {
    j["sim"] = {{"dt", cfg.sim->dt},
                {"n_particles", cfg.sim->n_particles},
                {"t_max", cfg.sim->t_max},
                {"n_time_bins", cfg.sim->n_time_bins},
                {"batch_size", cfg.sim->batch_size},
                {"coarse_stepping", cfg.sim->coarse_stepping}};
  }
  j["sweep"] = {{"variable", cfg.sweep.variable}, {"range", range_to_json(cfg.sweep.range)}};
  ordered_json p;
  p["slot"] = cfg.params.slot;
  p["horizon"] = cfg.params.horizon;
  p["mu_values"] = cfg.params.mu_values;
  if (cfg.params.eta_fixed) p["eta_fixed"] = *cfg.params.eta_fixed;
  if (cfg.params.grid_x) p["grid_x"] = range_to_json(*cfg.params.grid_x);
  if (cfg.params.grid_y) p["grid_y"] = range_to_json(*cfg.params.grid_y);
  if (cfg.params.grid_z) p["grid_z"] = range_to_json(*cfg.params.grid_z);
  j["params"] = p;
  j["output"] = cfg.output;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "", {"schema_version", "recipe", "medium", "topology", "traffic", "control", "sim",
                     "sweep", "params", "output"});
  ExperimentConfig cfg;
  cfg.schema_version = static_cast<int>(integer_at(j, "", "schema_version"));
  if (cfg.schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "/schema_version: unsupported version " +
                                            std::to_string(cfg.schema_version));
  if (j.contains("recipe")) {
    if (!j["recipe"].is_string()) throw ConfigError("schema", "/recipe: expected a string");
    cfg.recipe = j["recipe"].get<std::string>();
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("schema", "/output: expected a string");
    cfg.output = j["output"].get<std::string>();
  }

  if (!j.contains("medium")) throw ConfigError("missing_key", "/medium: required field missing");
  const json& m = j["medium"];
  check_keys(m, "/medium", {"D", "mu", "Tb"});
  cfg.medium.D = number_at(m, "/medium", "D");
  cfg.medium.mu = number_or(m, "/medium", "mu", 0.0);
  cfg.medium.Tb = number_at(m, "/medium", "Tb");

  if (!j.contains("topology")) throw ConfigError("missing_key", "/topology: required field missing");
  const json& t = j["topology"];
  check_keys(t, "/topology", {"x_P", "x_S", "y_P", "y_S", "a_P", "a_S"});
  cfg.topology.x_P = vec_at(t, "/topology", "x_P");
  cfg.topology.x_S = vec_at(t, "/topology", "x_S");
  cfg.topology.y_P = vec_at(t, "/topology", "y_P");
  cfg.topology.y_S = vec_at(t, "/topology", "y_S");
  cfg.topology.a_P = number_at(t, "/topology", "a_P");
  cfg.topology.a_S = number_at(t, "/topology", "a_S");

  if (j.contains("traffic")) {
    const json& q = j["traffic"];
    check_keys(q, "/traffic", {"q1P", "q1S"});
    cfg.traffic.q1P = number_or(q, "/traffic", "q1P", cfg.traffic.q1P);
    cfg.traffic.q1S = number_or(q, "/traffic", "q1S", cfg.traffic.q1S);
  }
  if (j.contains("control")) {
    const json& c = j["control"];
    check_keys(c, "/control", {"N", "uL", "uM"});
    cfg.control.N = integer_or(c, "/control", "N", cfg.control.N);
    cfg.control.uL = integer_or(c, "/control", "uL", cfg.control.uL);
    cfg.control.uM = number_or(c, "/control", "uM", cfg.control.uM);
  }
  if (j.contains("sim")) {
    const json& s = j["sim"];
    check_keys(s, "/sim", {"dt", "n_particles", "t_max", "n_time_bins", "batch_size",
                           "coarse_stepping"});
    SimConfig sc;
    sc.dt = number_or(s, "/sim", "dt", sc.dt);
    const long n = integer_or(s, "/sim", "n_particles", static_cast<long>(sc.n_particles));
    if (n < 1) throw ConfigError("schema", "/sim/n_particles: must be >= 1");
    sc.n_particles = static_cast<std::uint64_t>(n);
    sc.t_max = number_or(s, "/sim", "t_max", sc.t_max);
    sc.n_time_bins = static_cast<int>(integer_or(s, "/sim", "n_time_bins", sc.n_time_bins));
    const long bs = integer_or(s, "/sim", "batch_size", static_cast<long>(sc.batch_size));
    if (bs < 1) throw ConfigError("schema", "/sim/batch_size: must be >= 1");
    sc.batch_size = static_cast<std::uint64_t>(bs);
    if (s.contains("coarse_stepping")) {
      if (!s["coarse_stepping"].is_boolean())
        throw ConfigError("schema", "/sim/coarse_stepping: expected a boolean");
      sc.coarse_stepping = s["coarse_stepping"].get<bool>();
    }
    cfg.sim = sc;
  }

  if (!j.contains("sweep")) throw ConfigError("missing_key", "/sweep: required field missing");
  const json& sw = j["sweep"];
  check_keys(sw, "/sweep", {"variable", "range"});
  if (!sw.contains("variable") || !sw["variable"].is_string())
    throw ConfigError("missing_key", "/sweep/variable: required string");
  cfg.sweep.variable = sw["variable"].get<std::string>();
  if (!sw.contains("range")) throw ConfigError("missing_key", "/sweep/range: required field missing");
  cfg.sweep.range = range_from(sw["range"], "/sweep/range");

  if (j.contains("params")) {
    const json& p = j["params"];
    check_keys(p, "/params", {"slot", "horizon", "mu_values", "eta_fixed", "grid_x", "grid_y",
                              "grid_z"});
    cfg.params.slot = static_cast<int>(integer_or(p, "/params", "slot", cfg.params.slot));
    cfg.params.horizon = static_cast<int>(integer_or(p, "/params", "horizon", cfg.params.horizon));
    if (p.contains("mu_values")) {
      if (!p["mu_values"].is_array()) throw ConfigError("schema", "/params/mu_values: expected array");
      for (const auto& v : p["mu_values"]) {
        if (!v.is_number()) throw ConfigError("schema", "/params/mu_values: expected numbers");
        cfg.params.mu_values.push_back(v.get<double>());
      }
    }
    if (p.contains("eta_fixed")) cfg.params.eta_fixed = number_at(p, "/params", "eta_fixed");
    if (p.contains("grid_x")) cfg.params.grid_x = range_from(p["grid_x"], "/params/grid_x");
    if (p.contains("grid_y")) cfg.params.grid_y = range_from(p["grid_y"], "/params/grid_y");
    if (p.contains("grid_z")) cfg.params.grid_z = range_from(p["grid_z"], "/params/grid_z");
  }
  cfg.check();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("io", path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    throw ConfigError("parse", path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                   ": " + msg);
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(e.code(), path + ": " + e.what());
  }
}

std::string CsvTable::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed) {
  cfg.check();
  const auto& table = runners();
  const auto it = table.find(cfg.recipe);
  if (it == table.end()) throw ConfigError("unknown_recipe", "/recipe: unknown recipe '" + cfg.recipe + "'");
  ordered_json diag = ordered_json::object();
  ExperimentOutput out;
  out.table = it->second(cfg, seed, diag);
  // Sweep column first; stable so secondary ordering is kept.
  const auto& header = out.table.header;
  const auto col = std::find(header.begin(), header.end(), cfg.sweep.variable);
  if (col != header.end()) {
    const auto k = static_cast<std::size_t>(col - header.begin());
    std::stable_sort(out.table.rows.begin(), out.table.rows.end(),
                     [k](const auto& a, const auto& b) { return a[k] < b[k]; });
  }
  const ValidityReport rep = validate_topology(cfg.topology);
  out.sidecar["library"] = "cogmc";
  out.sidecar["version"] = kVersion;
  out.sidecar["recipe"] = cfg.recipe;
  out.sidecar["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  out.sidecar["columns"] = out.table.header;
  out.sidecar["rows"] = out.table.rows.size();
  out.sidecar["warnings"] = rep.messages;
  out.sidecar["diagnostics"] = diag;
  out.sidecar["config"] = to_json(cfg);
  return out;
}

void write_outputs(const ExperimentOutput& out, const std::string& prefix) {
  {
    std::ofstream csv(prefix + ".csv", std::ios::binary);
    if (!csv) throw ConfigError("io", prefix + ".csv: cannot write");
    csv << out.table.to_csv();
  }
  std::ofstream side(prefix + ".json", std::ios::binary);
  if (!side) throw ConfigError("io", prefix + ".json: cannot write");
  side << out.sidecar.dump(2) << '\n';
}

ConfigValidation validate_config(const std::string& path) {
  ConfigValidation v;
  v.config = load_config(path);
  v.report = validate_topology(v.config.topology);
  return v;
}

Vec3 place_secondary_tx(const Vec3& start, const Vec3& y_P, double r_SP) {
  const double dy = y_P(1) - start(1);
  const double dz = y_P(2) - start(2);
  const double off_axis2 = dy * dy + dz * dz;
  if (!(r_SP * r_SP >= off_axis2) || !std::isfinite(r_SP))
    throw ConfigError("sweep", "r_SP = " + std::to_string(r_SP) +
                                   " is unreachable by moving TX_S along the x axis");
  const double along = std::sqrt(r_SP * r_SP - off_axis2);
  const double dx = y_P(0) - start(0);
  const double shift = start(0) <= y_P(0) ? dx - along : dx + along;
  return start + Vec3(shift, 0.0, 0.0);
}

}  // namespace cogmc

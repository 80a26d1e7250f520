#include "cogmc/experiments.hpp"

#include <algorithm>

namespace cogmc {

namespace {

ExperimentConfig base(const char* recipe) {
  ExperimentConfig c;
  c.recipe = recipe;
  c.medium.D = 100.0;
  c.medium.mu = 0.0;
  c.medium.Tb = 1.0;
  c.traffic = {0.5, 0.5};
  c.control = {300, 300, 5.0};
  c.output = std::string("out/") + recipe;
  return c;
}

// Two links in the z = 0 plane, secondary transmitter sliding along +x
// from [0, 10, 0] toward the primary receiver.
Topology sliding_topology(double a_P, double a_S, double x_S) {
  Topology t;
  t.x_P = Vec3(30, -10, 0);
  t.x_S = Vec3(x_S, 10, 0);
  t.y_P = Vec3(30, 10, 0);
  t.y_S = Vec3(10, 10, 20);
  t.a_P = a_P;
  t.a_S = a_S;
  return t;
}

ExperimentConfig budget(const char* recipe, double Tb, const char* var, Range range,
                        int horizon) {
  ExperimentConfig c = base(recipe);
  c.medium.Tb = Tb;
  c.topology = sliding_topology(5, 5, 15);  // r_SP = 15
  c.sweep = {var, range};
  c.params.horizon = horizon;
  return c;
}

ExperimentConfig hitting_curves() {
  ExperimentConfig c = base("fig3");
  c.topology.x_P = Vec3(0, 0, 0);
  c.topology.x_S = Vec3(0, 40, 0);
  c.topology.y_P = Vec3(-30, -20, 0);
  c.topology.y_S = Vec3(25, 10, 0);
  c.topology.a_P = 3;
  c.topology.a_S = 5;
  SimConfig s;
  s.dt = 1e-4;
  s.n_particles = 100000;
  s.t_max = 2.0;
  s.n_time_bins = 20;
  c.sim = s;
  c.sweep = {"t", {0.1, 2.0, 20}};
  c.params.mu_values = {0.0, 0.3, 1.0};
  return c;
}

ExperimentConfig error_map() {
  ExperimentConfig c = base("fig4");
  c.topology.x_P = Vec3(0, 0, 0);
  c.topology.x_S = Vec3(0, -60, 0);
  c.topology.y_P = Vec3(20, 0, 0);
  c.topology.y_S = Vec3(20, 20, 0);
  c.topology.a_P = 5;
  c.topology.a_S = 4;
  SimConfig s;
  s.dt = 1e-4;
  s.n_particles = 20000;
  s.t_max = 1.0;
  s.n_time_bins = 1;
  c.sim = s;
  c.sweep = {"t", {1.0, 1.0, 1}};
  c.params.grid_x = Range{0, 40, 5};
  c.params.grid_y = Range{-20, 20, 5};
  c.params.grid_z = Range{0, 10, 2};
  return c;
}

ExperimentConfig expected_cci_curves() {
  ExperimentConfig c = base("fig5");
  c.topology.x_P = Vec3(55, 0, 0);
  c.topology.x_S = Vec3(0, 0, 0);
  c.topology.y_P = Vec3(30, 0, 0);
  c.topology.y_S = Vec3(30, 50, 0);
  c.topology.a_P = 5;
  c.topology.a_S = 5;
  c.control = {1000, 1000, 25.0};
  c.sweep = {"r_SP", {8, 30, 12}};
  c.params.slot = 3;
  c.params.mu_values = {0.0, 0.5, 1.0};
  return c;
}

ExperimentConfig threshold_sweep() {
  ExperimentConfig c = base("fig6");
  c.medium.Tb = 2.0;
  c.medium.mu = 0.5;
  c.topology = sliding_topology(3, 5, 10);
  c.sweep = {"eta", {1, 50, 50}};
  c.params.slot = 3;
  return c;
}

ExperimentConfig detection_vs_distance(const char* recipe) {
  ExperimentConfig c = base(recipe);
  c.medium.Tb = 5.0;
  c.topology = sliding_topology(5, 5, 0);
  c.sweep = {"r_SP", {8, 30, 12}};
  c.params.slot = 3;
  return c;
}

std::vector<Recipe> build_catalog() {
  std::vector<Recipe> r;
  r.push_back({"fig2a", "secondary budget u_S[l] versus slot for several uM (r_SP = 15, Tb = 1)",
               false, budget("fig2a", 1.0, "uM", {5, 20, 4}, 20)});
  r.push_back({"fig2b", "secondary budget u_S[l] versus slot and r_SP (Tb = 1)", false,
               budget("fig2b", 1.0, "r_SP", {10, 30, 5}, 20)});
  r.push_back({"fig2c", "secondary budget u_S[l] versus slot and r_SP with short slots (Tb = 0.4)",
               false, budget("fig2c", 0.4, "r_SP", {10, 30, 5}, 30)});
  r.push_back({"fig3", "hitting probability of both receivers versus time, closed form and particles",
               true, hitting_curves()});
  r.push_back({"fig4", "absolute error of the two-receiver approximation over positions of the other receiver",
               true, error_map()});
  r.push_back({"fig5", "expected cross-link absorptions at FAR_P versus r_SP, controlled and uncontrolled",
               false, expected_cci_curves()});
  r.push_back({"fig6", "bit error probability of both links versus detection threshold", false,
               threshold_sweep()});
  ExperimentConfig fixed = detection_vs_distance("fig7");
  fixed.params.eta_fixed = 10.0;
  r.push_back({"fig7", "bit error probability versus r_SP, sub-optimal and fixed threshold", false,
               fixed});
  r.push_back({"fig8", "bit error probability versus r_SP, controlled and uncontrolled secondary",
               false, detection_vs_distance("fig8")});
  ExperimentConfig deg = detection_vs_distance("fig9");
  deg.params.mu_values = {0.0, 0.5};
  r.push_back({"fig9", "bit error probability versus r_SP for two degradation rates", false, deg});
  return r;
}

}  // namespace

const std::vector<Recipe>& list_recipes() {
  static const std::vector<Recipe> catalog = build_catalog();
  return catalog;
}

const Recipe& find_recipe(std::string_view name) {
  const auto& all = list_recipes();
  const auto it = std::find_if(all.begin(), all.end(), [&](const Recipe& r) { return r.name == name; });
  if (it == all.end()) throw ConfigError("unknown_recipe", "unknown recipe '" + std::string(name) + "'");
  return *it;
}

}  // namespace cogmc

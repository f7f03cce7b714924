#include "surfcell/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace surfcell {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const json& require_field(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw std::invalid_argument(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

json to_json(const PotentialSpec& spec) {
  return json{{"kind", "prototype_p"}, {"a", spec.a}, {"p", spec.p}, {"d", spec.d},
              {"N", spec.N}};
}

PotentialSpec potential_from_json(const json& j) {
  const std::string kind = require_field(j, "kind", "potential").get<std::string>();
  if (kind != "prototype_p")
    throw std::invalid_argument("potential: unknown kind '" + kind + "'");
  PotentialSpec spec;
  spec.a = require_field(j, "a", "potential").get<std::vector<double>>();
  spec.p = require_field(j, "p", "potential").get<double>();
  spec.d = require_field(j, "d", "potential").get<int>();
  spec.N = require_field(j, "N", "potential").get<int>();
  spec.validate();
  return spec;
}

json to_json(const EnergyBreakdown& b) {
  return json{{"potential", b.potential},
              {"second_gradient", b.second_gradient},
              {"surfactant", b.surfactant},
              {"total", b.total},
              {"epsilon", b.eps}};
}

json to_json(const Grid& g) {
  return json{{"N", g.N}, {"d", g.d}, {"n_prime", g.n_prime}, {"n_last", g.n_last},
              {"band", g.band}};
}

Grid grid_from_json(const json& j) {
  Grid g;
  g.N = j.value("N", 2);
  g.d = j.value("d", 1);
  g.n_prime = require_field(j, "n_prime", "grid").get<int>();
  g.n_last = require_field(j, "n_last", "grid").get<int>();
  g.band = j.value("band", 2);
  return g;
}

json to_json(const PhiPoint& p) {
  return json{{"gamma", p.gamma},       {"phi", p.phi},
              {"lambda", p.lambda},     {"L", p.scale_l},
              {"iterations", p.iterations}, {"grad_norm", p.grad_norm},
              {"converged", p.converged}};
}

json to_json(const PhiCurve& c) {
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back(to_json(p));
  return json{{"points", pts},
              {"resolution_schedule", c.resolution_schedule},
              {"dimension", c.dimension},
              {"seed", c.seed}};
}

PhiCurve phi_curve_from_json(const json& j) {
  PhiCurve c;
  for (const auto& jp : require_field(j, "points", "phi_curve")) {
    PhiPoint p;
    p.gamma = require_field(jp, "gamma", "phi_curve point").get<double>();
    p.phi = require_field(jp, "phi", "phi_curve point").get<double>();
    p.lambda = jp.value("lambda", 0.0);
    p.scale_l = jp.value("L", 0.0);
    p.iterations = jp.value("iterations", 0);
    p.grad_norm = jp.value("grad_norm", 0.0);
    p.converged = jp.value("converged", true);
    c.points.push_back(p);
  }
  if (j.contains("resolution_schedule"))
    c.resolution_schedule = j["resolution_schedule"].get<std::vector<int>>();
  c.dimension = j.value("dimension", 1);
  c.seed = j.value("seed", std::uint64_t{0});
  c.validate();
  return c;
}

json to_json(const Laminate& lam) {
  return json{{"gamma0", lam.gamma0}, {"a", lam.a}, {"heights", lam.heights}};
}

Laminate laminate_from_json(const json& j) {
  Laminate lam;
  lam.a = require_field(j, "a", "laminate").get<std::vector<double>>();
  lam.gamma0 = j.value("gamma0", std::vector<double>(lam.a.size(), 0.0));
  lam.heights = require_field(j, "heights", "laminate").get<std::vector<double>>();
  lam.validate();
  return lam;
}

json to_json(const SurfactantMeasure& mu) {
  json patches = json::array();
  for (const auto& p : mu.patches)
    patches.push_back(json{{"interface", p.interface_index},
                           {"lo", p.lo},
                           {"hi", p.hi},
                           {"density", p.density}});
  json atoms = json::array();
  for (const auto& a : mu.atoms)
    atoms.push_back(json{{"x_prime", a.x_prime}, {"x_last", a.x_last}, {"mass", a.mass}});
  return json{{"patches", patches}, {"atoms", atoms}, {"atom_clearance", mu.atom_clearance}};
}

SurfactantMeasure measure_from_json(const json& j) {
  SurfactantMeasure mu;
  if (j.contains("patches"))
    for (const auto& jp : j["patches"]) {
      SurfactantPatch p;
      p.interface_index = jp.value("interface", 0);
      p.lo = require_field(jp, "lo", "patch").get<double>();
      p.hi = require_field(jp, "hi", "patch").get<double>();
      p.density = require_field(jp, "density", "patch").get<double>();
      mu.patches.push_back(p);
    }
  if (j.contains("atoms"))
    for (const auto& ja : j["atoms"]) {
      SurfactantAtom a;
      a.x_prime = ja.value("x_prime", 0.0);
      a.x_last = require_field(ja, "x_last", "atom").get<double>();
      a.mass = require_field(ja, "mass", "atom").get<double>();
      mu.atoms.push_back(a);
    }
  mu.atom_clearance = j.value("atom_clearance", 0.05);
  return mu;
}

json to_json(const CellSolution& sol) {
  return json{{"value", sol.value},
              {"lambda", sol.lambda},
              {"L", sol.scale_l},
              {"gamma", sol.gamma},
              {"constraint_mass", sol.constraint_mass},
              {"breakdown", to_json(sol.breakdown)},
              {"sweeps", sol.sweeps},
              {"u_iterations", sol.u_iterations},
              {"final_grad_norm", sol.final_grad_norm},
              {"converged", sol.converged},
              {"bracket_hit", sol.bracket_hit},
              {"grid", to_json(sol.profile.grid)}};
}

json to_json(const LimsupReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back(json{{"eps", r.eps},
                        {"energy", r.energy},
                        {"target", r.target},
                        {"ratio", r.ratio},
                        {"mass", r.mass},
                        {"mass_target", r.mass_target},
                        {"mass_err", r.mass_err},
                        {"glue_share", r.glue_share},
                        {"pre_asymptotic", r.pre_asymptotic}});
  return json{{"rows", rows},
              {"target", rep.target},
              {"final_ratio", rep.final_ratio},
              {"ratios_nonincreasing", rep.ratios_nonincreasing},
              {"mass_slope", rep.mass_slope}};
}

json to_json(const LiminfReport& rep) {
  return json{{"trials", rep.trials},
              {"violations", rep.violations},
              {"tolerance", rep.tolerance},
              {"baseline", rep.baseline},
              {"min_energy", rep.min_energy},
              {"target", rep.target},
              {"energies", rep.energies}};
}

json to_json(const AssumptionReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back(
        json{{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"note", c.note}});
  return json{{"seed", rep.seed},
              {"samples", rep.samples},
              {"c1", rep.c1},
              {"c2", rep.c2},
              {"all_pass", rep.all_pass()},
              {"checks", checks}};
}

std::string phi_curve_csv(const PhiCurve& c) {
  std::ostringstream out;
  out << "gamma,phi,lambda,L,iterations,grad_norm\n";
  for (const auto& p : c.points)
    out << format_double(p.gamma) << ',' << format_double(p.phi) << ','
        << format_double(p.lambda) << ',' << format_double(p.scale_l) << ',' << p.iterations
        << ',' << format_double(p.grad_norm) << '\n';
  return out.str();
}

std::string limsup_csv(const LimsupReport& rep) {
  std::ostringstream out;
  out << "epsilon,energy,target,ratio,mass,mass_target,mass_err,glue_share,pre_asymptotic\n";
  for (const auto& r : rep.rows)
    out << format_double(r.eps) << ',' << format_double(r.energy) << ','
        << format_double(r.target) << ',' << format_double(r.ratio) << ','
        << format_double(r.mass) << ',' << format_double(r.mass_target) << ','
        << format_double(r.mass_err) << ',' << format_double(r.glue_share) << ','
        << (r.pre_asymptotic ? 1 : 0) << '\n';
  return out.str();
}

std::string liminf_csv(const LiminfReport& rep) {
  std::ostringstream out;
  out << "trial,energy\n";
  for (std::size_t i = 0; i < rep.energies.size(); ++i)
    out << i << ',' << format_double(rep.energies[i]) << '\n';
  return out.str();
}

namespace {

std::string grid_csv_impl(const Grid& g, const std::vector<double>& values, int comps) {
  std::ostringstream out;
  if (g.N == 2)
    out << "x1,x2";
  else
    out << "x1";
  for (int c = 0; c < comps; ++c) out << ",v" << c;
  out << '\n';
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      if (g.N == 2) out << format_double(g.x_prime(j)) << ',';
      out << format_double(g.x_last(i));
      for (int c = 0; c < comps; ++c)
        out << ',' << format_double(values[g.node_index(i, j) * comps + c]);
      out << '\n';
    }
  return out.str();
}

}  // namespace

std::string field_csv(const GridField& f) {
  return grid_csv_impl(f.grid, f.values, f.grid.d);
}

std::string density_csv(const DensityField& f) { return grid_csv_impl(f.grid, f.values, 1); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace surfcell

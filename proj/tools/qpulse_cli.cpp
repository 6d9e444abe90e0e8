#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpulse/optimizer.hpp"
#include "qpulse/sequences.hpp"

using namespace qp;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitNoConvergence = 3;

struct GridSpec {
  double lo = 0, hi = 0;
  int steps = 0;
};

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  char c1, c2;
  std::istringstream in(s);
  if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.steps) || c1 != ':' || c2 != ':' ||
      g.steps < 1 || g.hi < g.lo)
    throw CLI::ValidationError("--grid", "expected lo:hi:steps with hi >= lo");
  return g;
}

std::vector<double> linspace(const GridSpec& g) {
  std::vector<double> out;
  for (int i = 0; i < g.steps; i++)
    out.push_back(g.steps == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.steps - 1));
  return out;
}

std::vector<double> geomspace(const GridSpec& g) {
  if (g.lo <= 0) throw CLI::ValidationError("--grid", "log grid needs lo > 0");
  std::vector<double> out;
  for (int i = 0; i < g.steps; i++)
    out.push_back(g.steps == 1 ? g.lo
                               : g.lo * std::pow(g.hi / g.lo, double(i) / (g.steps - 1)));
  return out;
}

// --shape accepts a library label or a JSON file path
PulseShape resolve_shape(const std::string& arg) {
  if (shape_library().count(arg)) return builtin_shape(arg);
  return load_shape(arg);
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------- shape-params

int run_shape_params(const std::string& shape_arg, double hard_deg, double gauss_w,
                     double gauss_deg, const std::string& out_path) {
  ShapeParams p;
  AmplitudeSensitivity sens;
  std::string label;
  if (hard_deg > 0) {
    HardPulse h{hard_deg * M_PI / 180, 1.0};
    p = shape_params(h);
    sens = sensitivity(h);
    label = "hard(" + fmt(hard_deg) + ")";
  } else if (gauss_w > 0) {
    GaussianShape g{gauss_deg * M_PI / 180, 1.0, gauss_w};
    p = shape_params(g);
    sens = sensitivity(g);
    label = "G" + fmt(gauss_w) + "(" + fmt(gauss_deg) + ")";
  } else {
    PulseShape s = resolve_shape(shape_arg);
    p = shape_params(s);
    sens = sensitivity(s);
    label = s.label.empty() ? shape_arg : s.label;
  }
  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  os << "# shape=" << label << "\n";
  os << "upsilon   " << fmt(p.upsilon) << "\n";
  os << "alpha     " << fmt(p.alpha) << "\n";
  os << "zeta      " << fmt(p.zeta) << "\n";
  os << "zeta_C    " << fmt(p.zetaC) << "\n";
  os << "zeta_S    " << fmt(p.zetaS) << "\n";
  os << "dupsilon  " << fmt(sens.dupsilon) << "\n";
  os << "dalpha    " << fmt(sens.dalpha) << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- order-table

int run_order_table(const std::string& seq_name, const std::string& shape_arg,
                    const std::string& model_arg, int n, uint64_t seed, int kmax,
                    int steps, const std::string& out_path) {
  SequenceProgram prog = builtin_sequence(seq_name);
  PulseShape shape = resolve_shape(shape_arg);
  std::vector<ChainModel> models;
  if (model_arg == "all") {
    models = {ChainModel::Ising, ChainModel::IsingDz, ChainModel::XXZ,
              ChainModel::XXZDz, ChainModel::XXZVecD};
  } else {
    models = {chain_model_from_string(model_arg)};
  }

  json j;
  j["seq"] = seq_name;
  j["shape"] = shape.label;
  j["n"] = n;
  j["seed"] = seed;
  j["kmax"] = kmax;
  j["steps_per_slot"] = steps;
  j["tolerance"] = 1e-7;
  j["cells"] = json::array();

  std::printf("# seq=%s shape=%s n=%d seed=%llu kmax=%d steps=%d\n", seq_name.c_str(),
              shape.label.c_str(), n, (unsigned long long)seed, kmax, steps);
  std::printf("%-10s %6s %10s %12s\n", "model", "order", "saturated", "next_norm");
  for (ChainModel m : models) {
    ChainSpec chain = sample_random(m, n, seed);
    OrderTableCell cell = decoupling_order_cell(prog, shape, chain, kmax, steps);
    std::printf("%-10s %6d %10s %12.3e\n", to_string(m).c_str(), cell.order,
                cell.saturated ? "yes" : "no", cell.first_norm);
    j["cells"].push_back({{"model", to_string(m)},
                          {"order", cell.order},
                          {"saturated", cell.saturated},
                          {"next_norm", cell.first_norm}});
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << j.dump(2) << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------------------ scan

int run_scan(const std::string& kind, const std::string& composite_name,
             const std::string& shape_arg, const std::string& seq_name,
             const std::string& model_arg, int n, uint64_t seed, double t_fixed,
             double coupling_scale, const GridSpec& grid, const GridSpec& grid2,
             int steps, int jobs, const std::string& out_path) {
  ScanResult r;
  std::vector<std::pair<std::string, std::string>> meta = {
      {"kind", kind},         {"steps_per_slot", fmt(steps)},
      {"seed", fmt(double(seed))}, {"jobs", fmt(jobs)},
  };
  if (kind == "amp_freq") {
    CompositeSpec spec = builtin_composite(composite_name);
    std::map<std::string, PulseShape> shapes;
    for (const auto& e : spec.pulses)
      if (!e.shape_label.empty()) shapes[e.shape_label] = resolve_shape(e.shape_label);
    r = scan_amplitude_frequency(spec, shapes, linspace(grid), linspace(grid2), steps,
                                 jobs);
    meta.push_back({"composite", composite_name});
    meta.push_back({"f_grid", fmt(grid.lo) + ":" + fmt(grid.hi) + ":" + fmt(grid.steps)});
    meta.push_back(
        {"dtau_grid", fmt(grid2.lo) + ":" + fmt(grid2.hi) + ":" + fmt(grid2.steps)});
  } else if (kind == "tau") {
    SequenceProgram prog = builtin_sequence(seq_name);
    PulseShape shape = resolve_shape(shape_arg);
    ChainSpec chain = sample_random(chain_model_from_string(model_arg), n, seed);
    mat h = coupling_scale * build_hamiltonian(chain);
    r = scan_tau(prog, shape, h, n, t_fixed, geomspace(grid), steps);
    meta.insert(meta.end(), {{"seq", seq_name},
                             {"shape", shape.label},
                             {"model", model_arg},
                             {"n", fmt(n)},
                             {"t_fixed", fmt(t_fixed)},
                             {"coupling_scale", fmt(coupling_scale)},
                             {"tau_grid", fmt(grid.lo) + ":" + fmt(grid.hi) + ":" +
                                              fmt(grid.steps)}});
  } else if (kind == "chain_length") {
    SequenceProgram prog = builtin_sequence(seq_name);
    PulseShape shape = resolve_shape(shape_arg);
    std::vector<int> ns;
    for (int i = 0; i < grid.steps; i++) ns.push_back(int(std::lround(grid.lo)) + i);
    r = scan_chain_length(prog, shape, chain_model_from_string(model_arg), ns, t_fixed,
                          seed, coupling_scale, steps);
    meta.insert(meta.end(), {{"seq", seq_name},
                             {"shape", shape.label},
                             {"model", model_arg},
                             {"t_fixed", fmt(t_fixed)},
                             {"coupling_scale", fmt(coupling_scale)},
                             {"n_lo", fmt(grid.lo)},
                             {"n_count", fmt(grid.steps)}});
  } else {
    throw CLI::ValidationError("--kind", "expected amp_freq, tau or chain_length");
  }
  r.meta = std::move(meta);
  std::ofstream file;
  write_csv(r, open_out(file, out_path));
  return kExitOk;
}

// ------------------------------------------------------------------ synthesize

int run_synthesize(double angle_deg, int order, int constraint_order, int harmonics,
                   bool protect, double epsilon, uint64_t seed, long budget, int steps,
                   const std::string& out_path) {
  OptimizationProblem prob;
  prob.phi0 = angle_deg * M_PI / 180;
  prob.K = order;
  prob.L = constraint_order;
  prob.M = harmonics > 0 ? harmonics : constraint_order + order + 2;
  prob.protect_dupsilon = protect;
  prob.epsilon = epsilon;
  prob.seed = seed;
  prob.budget = budget;
  prob.steps = steps;

  SynthesisResult res = synthesize(prob);
  std::printf("# angle=%g order=%d L=%d M=%d protect=%d epsilon=%g seed=%llu budget=%ld steps=%d\n",
              angle_deg, prob.K, prob.L, prob.M, int(protect), prob.epsilon,
              (unsigned long long)seed, budget, steps);
  std::printf("converged   %s\n", res.report.converged ? "yes" : "no");
  std::printf("evaluations %ld\n", res.report.evaluations);
  std::printf("residual    %.3e\n", res.report.first_term);
  for (size_t m = 0; m < res.shape.coeffs.size(); m++)
    std::printf("A%zu  %+.10f\n", m + 1, res.shape.coeffs[m]);
  if (!out_path.empty()) {
    res.shape.label = "synth(" + fmt(angle_deg) + ")";
    save_shape(res.shape, out_path);
  }
  return res.report.converged ? kExitOk : kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shaped-pulse and decoupling-sequence toolkit"};
  app.require_subcommand(1);

  std::string shape_arg = "S1(180)", seq_name = "seq8", model_arg = "all";
  std::string composite_name = "scrofulous", out_path, kind = "amp_freq";
  std::string grid_arg = "-0.2:0.2:101", grid2_arg = "-0.5:0.5:101";
  double hard_deg = 0, gauss_w = 0, gauss_deg = 180;
  int n = 4, kmax = 4, steps = 2048, jobs = 1;
  uint64_t seed = 1;
  double t_fixed = 128, coupling_scale = 1.0;

  auto* sp = app.add_subcommand("shape-params", "pulse-shape parameter report");
  sp->add_option("--shape", shape_arg, "library label or JSON file");
  sp->add_option("--hard", hard_deg, "hard pulse with this angle in degrees");
  sp->add_option("--gaussian", gauss_w, "Gaussian width fraction");
  sp->add_option("--angle", gauss_deg, "Gaussian rotation angle in degrees");
  sp->add_option("--out", out_path, "output path (default stdout)");

  auto* ot = app.add_subcommand("order-table", "decoupling-order certification");
  ot->add_option("--seq", seq_name, "seq4, seq8, seq16 or seq32");
  ot->add_option("--shape", shape_arg, "library label or JSON file");
  ot->add_option("--model", model_arg, "chain model, or 'all'");
  ot->add_option("--n", n, "chain length")->check(CLI::Range(2, 7));
  ot->add_option("--seed", seed, "coupling seed");
  ot->add_option("--kmax", kmax, "highest order probed")->check(CLI::Range(1, 8));
  ot->add_option("--steps", steps, "integrator steps per slot");
  ot->add_option("--out", out_path, "JSON output path");

  auto* sc = app.add_subcommand("scan", "infidelity scans to CSV");
  sc->add_option("--kind", kind, "amp_freq, tau or chain_length");
  sc->add_option("--composite", composite_name, "composite pulse name");
  sc->add_option("--shape", shape_arg, "library label or JSON file");
  sc->add_option("--seq", seq_name, "decoupling sequence");
  sc->add_option("--model", model_arg, "chain model");
  sc->add_option("--n", n, "chain length");
  sc->add_option("--seed", seed, "coupling seed");
  sc->add_option("--t-fixed", t_fixed, "total time in pulse widths");
  sc->add_option("--coupling-scale", coupling_scale, "overall H_S scale");
  sc->add_option("--grid", grid_arg, "x grid as lo:hi:steps");
  sc->add_option("--grid2", grid2_arg, "y grid as lo:hi:steps (amp_freq)");
  sc->add_option("--steps", steps, "integrator steps per slot");
  sc->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 64));
  sc->add_option("--out", out_path, "CSV output path (default stdout)");

  double angle_deg = 180, epsilon = 1e-4;
  int order = 1, constraint_order = 1, harmonics = 0;
  long budget = 1000000;
  int opt_steps = 1024;
  bool protect = false;
  auto* sy = app.add_subcommand("synthesize", "search for self-refocusing shapes");
  sy->add_option("--angle", angle_deg, "rotation angle in degrees");
  sy->add_option("--order", order, "target refocusing order")->check(CLI::Range(1, 2));
  sy->add_option("--constraint-order", constraint_order, "endpoint smoothness L")
      ->check(CLI::Range(0, 3));
  sy->add_option("--harmonics", harmonics, "number of Fourier coefficients");
  sy->add_flag("--protect-upsilon", protect, "also zero d upsilon/df");
  sy->add_option("--epsilon", epsilon, "high-harmonic penalty weight");
  sy->add_option("--seed", seed, "annealing seed");
  sy->add_option("--budget", budget, "objective evaluation budget");
  sy->add_option("--opt-steps", opt_steps, "integrator steps per evaluation");
  sy->add_option("--out", out_path, "shape JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sp->parsed())
      return run_shape_params(shape_arg, hard_deg, gauss_w, gauss_deg, out_path);
    if (ot->parsed())
      return run_order_table(seq_name, shape_arg, model_arg, n, seed, kmax, steps,
                             out_path);
    if (sc->parsed())
      return run_scan(kind, composite_name, shape_arg, seq_name, model_arg, n, seed,
                      t_fixed, coupling_scale, parse_grid(grid_arg),
                      parse_grid(grid2_arg), steps, jobs, out_path);
    return run_synthesize(angle_deg, order, constraint_order, harmonics, protect,
                          epsilon, seed, budget, opt_steps, out_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

// refrontier: command-line front end for the refrontier library.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "refrontier/io.hpp"
#include "refrontier/refrontier.hpp"

namespace {

using namespace refrontier;
using json = nlohmann::json;

constexpr int exit_input = 2;
constexpr int exit_numeric = 3;
constexpr int exit_precondition = 4;

struct Args {
  std::string model;
  std::string cost = "uniform";
  std::size_t grid = 101;
  std::uint64_t seed = 0;
  std::optional<std::size_t> threads;
  double support_eps = 0.0;
  std::string out;
  std::string manifest;
  std::string kind = "both";
  std::optional<double> eta_const;
  std::string strategy;
  double gamma = 1.0;
  double t_end = 200.0;
  double dt = 0.01;
  std::optional<double> i0;
  bool verdict = false;
};

std::size_t thread_count(const Args& a) {
  if (a.threads) return *a.threads;
  if (const char* env = std::getenv("RE_FRONTIER_THREADS")) {
    try {
      return static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception&) {
      throw InputError("RE_FRONTIER_THREADS must be a nonnegative integer");
    }
  }
  return 1;
}

CostModel load_cost_arg(const std::string& arg, const Population& pop) {
  if (arg == "uniform") return CostModel::uniform(pop);
  if (arg.rfind("affine:", 0) == 0) return io::load_cost(arg.substr(7), pop);
  throw InputError("--cost must be 'uniform' or 'affine:PATH'");
}

Strategy load_eta(const Args& a, std::size_t n, bool required) {
  if (a.eta_const && !a.strategy.empty()) throw InputError("give either --strategy or --eta-const, not both");
  if (a.eta_const) return Strategy::constant(n, *a.eta_const);
  if (!a.strategy.empty()) return io::load_strategy(a.strategy, n);
  if (required) throw InputError("a strategy is required (--strategy PATH or --eta-const VALUE)");
  return Strategy::ones(n);
}

void emit(const Args& a, const std::string& text) {
  if (a.out.empty()) {
    std::cout << text << std::flush;
  } else {
    io::write_atomic(a.out, text);
  }
}

SolverOptions solver_options(const Args& a) {
  SolverOptions o;
  o.seed = a.seed;
  o.threads = thread_count(a);
  o.support_eps = a.support_eps;
  return o;
}

int cmd_re(const Args& a) {
  const Kernel ker = io::load_model(a.model);
  const Strategy eta = load_eta(a, ker.size(), true);
  emit(a, io::format_double(effective_r(ker, eta)) + "\n");
  return 0;
}

json jump_list(const Frontier& f) {
  json j = json::array();
  for (std::size_t k : f.jumps) {
    const FrontierPoint& p = f.points[k];
    const FrontierPoint& q = f.points[k + 1];
    j.push_back({{"kind", f.kind == FrontierKind::pareto ? "pareto" : "anti"},
                 {"cost_from", p.cost},
                 {"cost_to", q.cost},
                 {"loss_from", p.loss},
                 {"loss_to", q.loss}});
  }
  return j;
}

int cmd_frontier(const Args& a) {
  const std::string model_text = io::read_file(a.model);
  const Kernel ker = io::parse_model(io::parse_json(model_text, a.model));
  const CostModel cm = load_cost_arg(a.cost, ker.population());
  if (a.kind != "pareto" && a.kind != "anti" && a.kind != "both") throw InputError("--kind must be pareto, anti or both");
  if (a.grid < 1) throw InputError("--grid must be positive");
  const SolverOptions opts = solver_options(a);
  const double r0 = basic_r(ker);
  const std::vector<double> grid = default_grid(r0, a.grid);

  std::string csv = io::frontier_csv_header(ker.size());
  json manifest = {{"command", "frontier"},
                   {"input_digest", io::digest(model_text)},
                   {"cost", a.cost},
                   {"kind", a.kind},
                   {"seed", a.seed},
                   {"grid", a.grid},
                   {"r0", r0},
                   {"multistarts", opts.multistarts},
                   {"tolerances",
                    {{"eigenvalue_rel", opts.spectral.rel_tol},
                     {"eigenvector", opts.spectral.vector_tol},
                     {"support_eps", opts.support_eps}}}};
  json jumps = json::array();
  if (a.kind != "anti") {
    const Frontier f = pareto_frontier(ker, cm, grid, opts);
    csv += io::frontier_csv_rows(f);
    manifest["c_star"] = f.c_star;
    manifest["c_star_exact"] = f.c_star_exact;
    manifest["c_star_bound"] = f.c_star_bound;
    for (auto& j : jump_list(f)) jumps.push_back(j);
  }
  if (a.kind != "pareto") {
    const Frontier f = anti_pareto_frontier(ker, cm, grid, opts);
    csv += io::frontier_csv_rows(f);
    manifest["c_star_upper"] = f.c_star_upper;
    for (auto& j : jump_list(f)) jumps.push_back(j);
  }
  manifest["jumps"] = jumps;
  emit(a, csv);
  std::string mpath = a.manifest;
  if (mpath.empty() && !a.out.empty()) mpath = a.out + ".manifest.json";
  if (!mpath.empty()) io::write_atomic(mpath, manifest.dump(2) + "\n");
  return 0;
}

int cmd_decompose(const Args& a) {
  const Kernel ker = io::load_model(a.model);
  const AtomDecomposition dec = decompose(ker, a.support_eps);
  json atoms = json::array();
  for (const IndexSet& s : dec.atoms) atoms.push_back(io::index_list(s));
  const json j = {{"classification", std::string(to_string(dec.classification))},
                  {"atoms", atoms},
                  {"radii", dec.radii},
                  {"remainder", io::index_list(dec.remainder)}};
  emit(a, j.dump() + "\n");
  return 0;
}

int cmd_independent(const Args& a) {
  const Kernel ker = io::load_model(a.model);
  const CostModel cm = load_cost_arg(a.cost, ker.population());
  const IndependentSetResult r = max_weight_independent_set(ker, cm, a.support_eps);
  const json j = {{"independent_set", io::index_list(r.set)}, {"c_star", r.c_star}};
  emit(a, j.dump() + "\n");
  return 0;
}

int cmd_cordon(const Args& a) {
  const Kernel ker = io::load_model(a.model);
  const CostModel cm = load_cost_arg(a.cost, ker.population());
  const Strategy eta = load_eta(a, ker.size(), true);
  const CordonReport rep = cordon_report(ker, cm, eta, a.support_eps);
  json comps = json::array();
  for (const IndexSet& s : rep.components) comps.push_back(io::index_list(s));
  json j = {{"disconnecting", rep.disconnecting},
            {"components", comps},
            {"loss", effective_r(ker, eta)},
            {"cost", cm.evaluate(eta)},
            {"improvement", nullptr}};
  if (rep.improvement) {
    j["improvement"] = io::strategy_json(*rep.improvement);
    j["improved_loss"] = effective_r(ker, *rep.improvement);
    j["improved_cost"] = cm.evaluate(*rep.improvement);
  }
  emit(a, j.dump() + "\n");
  return 0;
}

int cmd_simulate(const Args& a) {
  const Kernel ker = io::load_model(a.model);
  const std::size_t n = ker.size();
  const Strategy eta = load_eta(a, n, false);
  if (!(a.gamma > 0.0)) throw InputError("--gamma must be positive");
  const Vector gamma(n, a.gamma);
  Matrix beta(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) beta(i, j) = ker(i, j) * gamma[j];
  Vector i0(n);
  for (std::size_t i = 0; i < n; ++i) i0[i] = (a.i0 ? *a.i0 : 0.01) * eta[i];

  if (a.verdict) {
    const ThresholdResult r = threshold_check(beta, gamma, ker.mu(), eta, a.t_end, a.dt, i0);
    const json j = {{"verdict", std::string(to_string(r.verdict))},
                    {"r_e", r.r_e},
                    {"terminal_max", r.terminal_max},
                    {"terminal_mass", r.terminal_mass},
                    {"drift", r.drift},
                    {"clamp_count", r.clamp_count}};
    emit(a, j.dump() + "\n");
    return 0;
  }
  SisOptions o;
  o.t_end = a.t_end;
  o.dt = a.dt;
  const SisTrajectory traj = simulate_sis(beta, gamma, ker.mu(), eta, i0, o);
  std::string csv = "t";
  for (std::size_t i = 0; i < n; ++i) csv += ",I_" + std::to_string(i);
  csv += "\n";
  for (const SisState& s : traj.states) {
    csv += io::format_double(s.t);
    for (double v : s.infected) csv += "," + io::format_double(v);
    csv += "\n";
  }
  emit(a, csv);
  if (traj.clamp_count > 0) std::cerr << "warning: " << traj.clamp_count << " clamping events, consider a smaller --dt\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective reproduction numbers, vaccination frontiers and related diagnostics"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", a.model, "model JSON file")->required();
    sub->add_option("--support-eps", a.support_eps, "treat k mu entries <= eps as zero");
    sub->add_option("--out", a.out, "output file (default stdout)");
  };
  auto strategy = [&](CLI::App* sub) {
    sub->add_option("--strategy", a.strategy, "strategy JSON file {\"eta\": [...]}");
    sub->add_option("--eta-const", a.eta_const, "constant strategy eta = VALUE")->check(CLI::Range(0.0, 1.0));
  };

  CLI::App* re = app.add_subcommand("re", "print the effective reproduction number");
  common(re);
  strategy(re);

  CLI::App* fr = app.add_subcommand("frontier", "Pareto / anti-Pareto frontiers as CSV");
  common(fr);
  fr->add_option("--cost", a.cost, "uniform | affine:PATH");
  fr->add_option("--kind", a.kind, "pareto | anti | both");
  fr->add_option("--grid", a.grid, "number of loss levels");
  fr->add_option("--seed", a.seed, "solver seed");
  fr->add_option("--threads", a.threads, "worker threads (env RE_FRONTIER_THREADS)");
  fr->add_option("--manifest", a.manifest, "run manifest path (default OUT.manifest.json)");

  CLI::App* de = app.add_subcommand("decompose", "atomic decomposition report");
  common(de);

  CLI::App* in = app.add_subcommand("independent", "maximum-weight independent set and c_star");
  common(in);
  in->add_option("--cost", a.cost, "uniform | affine:PATH");

  CLI::App* co = app.add_subcommand("cordon", "cordon sanitaire diagnostics");
  common(co);
  strategy(co);
  co->add_option("--cost", a.cost, "uniform | affine:PATH");

  CLI::App* si = app.add_subcommand("simulate", "SIS trajectory with transmission k * gamma");
  common(si);
  strategy(si);
  si->add_option("--gamma", a.gamma, "recovery rate");
  si->add_option("--t-end", a.t_end, "horizon");
  si->add_option("--dt", a.dt, "RK4 step");
  si->add_option("--i0", a.i0, "initial infected fraction of eta");
  si->add_flag("--verdict", a.verdict, "print the threshold verdict JSON instead of the trajectory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_input;
  }

  try {
    if (re->parsed()) return cmd_re(a);
    if (fr->parsed()) return cmd_frontier(a);
    if (de->parsed()) return cmd_decompose(a);
    if (in->parsed()) return cmd_independent(a);
    if (co->parsed()) return cmd_cordon(a);
    if (si->parsed()) return cmd_simulate(a);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::input: return exit_input;
      case ErrorKind::numeric: return exit_numeric;
      case ErrorKind::precondition: return exit_precondition;
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

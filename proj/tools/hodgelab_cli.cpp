// Command-line driver: parse a config, build the grid complex, run the
// requested pipeline, write a JSON report (plus a CSV for experiment
// commands).  Exit codes: 0 pass, 2 experiment fail (report still
// written), 1 structural error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "hodgelab/divcurl.hpp"
#include "hodgelab/dual_norm.hpp"
#include "hodgelab/helmholtz.hpp"
#include "hodgelab/io.hpp"
#include "hodgelab/solve.hpp"

using json = nlohmann::ordered_json;
using namespace hodgelab;

namespace {

json num_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

Backend parse_backend(const std::string& s) {
  if (s == "dense") return Backend::Dense;
  if (s == "iterative") return Backend::Iterative;
  if (s.empty() || s == "auto") return Backend::Auto;
  throw StructuralError("backend must be 'dense', 'iterative' or 'auto'");
}

std::string backend_name(Backend b) {
  return b == Backend::Dense ? "dense" : b == Backend::Iterative ? "iterative" : "auto";
}

const ComplexOperator& pick_operator(const GridComplex& gc, const std::string& name) {
  if (name == "grad") return gc.grad;
  if (name == "curl") return gc.curl;
  if (name == "div") return gc.div;
  throw StructuralError("operator must be 'grad', 'curl' or 'div', got '" + name + "'");
}

Vec random_unit(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v / v.norm();
}

json convergence_json(const ConvergenceReport& rep) {
  json j;
  j["indices"] = rep.indices;
  j["inner_products"] = rep.inner_products;
  j["replay_products"] = rep.replay_products;
  j["limit_inner_product"] = rep.limit_inner_product;
  j["final_gap"] = rep.final_gap;
  j["replay_gap"] = rep.replay_gap;
  j["decay_order"] = num_or_string(rep.decay_order);
  j["max_weak_gap_e"] = rep.max_weak_gap_e;
  j["max_weak_gap_h"] = rep.max_weak_gap_h;
  j["tol"] = rep.tol;
  j["hypothesis_violation"] = rep.hypothesis_violation;
  j["pass"] = rep.pass;
  j["flags"] = rep.flags;
  return j;
}

void write_convergence_csv(const std::string& path, const ConvergenceReport& rep,
                           const FieldSequence& e, const FieldSequence& h) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write '" + path + "'");
  out.precision(17);
  out << "n,inner_product,max_weak_gap_E,max_weak_gap_H,deriv_norm_E,deriv_norm_H\n";
  for (size_t j = 0; j < rep.indices.size(); ++j) {
    const Index col = static_cast<Index>(j);
    const double ge =
        (rep.weak_pairings_e.col(col) - rep.weak_limit_pairings_e).cwiseAbs().maxCoeff();
    const double gh =
        (rep.weak_pairings_h.col(col) - rep.weak_limit_pairings_h).cwiseAbs().maxCoeff();
    out << rep.indices[j] << ',' << rep.inner_products[j] << ',' << ge << ',' << gh << ','
        << e.derivative_norms[j] << ',' << h.derivative_norms[j] << '\n';
  }
}

struct Run {
  Config cfg;
  GridSpec spec;
  MaterialField mat;
  std::string out_dir;
  unsigned seed = 0;
  Backend backend = Backend::Auto;
  json report;

  void finish(const std::string& command, bool pass) {
    report["command"] = command;
    report["config_hash"] = cfg.hash();
    report["seed"] = seed;
    report["backend"] = backend_name(backend);
    report["pass"] = pass;
  }

  void write(const std::string& name = "report.json") const {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(std::filesystem::path(out_dir) / name);
    out << report.dump(2) << '\n';
  }
};

int cmd_spectral(Run& r) {
  GridComplex gc = build_derham(r.spec, r.mat);
  const ComplexOperator& op = pick_operator(gc, r.cfg.get_string("operator", "grad"));
  SpectralReport sr = spectral_report(op, r.backend, r.seed);
  r.report["operator"] = r.cfg.get_string("operator", "grad");
  r.report["rank"] = sr.rank;
  r.report["kernel_dim"] = sr.kernel_dim;
  r.report["poincare_constant"] =
      sr.poincare_constant.unbounded ? json("unbounded") : json(sr.poincare_constant.value);
  r.report["sigma_max"] = sr.singular_values.empty() ? 0.0 : sr.singular_values.front();
  // The dense backend resolves singular values to machine precision; the
  // iterative backend certifies each Poincare constant to 1e-7 relative.
  const double duality_tol = r.backend == Backend::Dense ? 1e-8 : 1e-6;
  r.report["tolerances"] = {{"rank_tol", op.rank_tol()}, {"duality_rel_gap", duality_tol}};
  bool pass = true;
  if (sr.rank > 0) {
    PoincareDuality dual = poincare_duality_check(op, r.backend, r.seed);
    r.report["c_a"] = dual.c_a;
    r.report["c_astar"] = dual.c_astar;
    r.report["duality_rel_gap"] = dual.rel_gap;
    pass = dual.rel_gap <= duality_tol;
  }
  r.finish("spectral", pass);
  r.write();
  return pass ? 0 : 2;
}

int cmd_cohomology(Run& r) {
  GridComplex gc = build_derham(r.spec, r.mat);
  Mat basis = harmonic_basis(gc.grad, gc.curl, r.backend, r.seed);
  const Index rn = cohomology_dim_rank_nullity(gc.grad, gc.curl, r.backend);
  r.report["dim_N01"] = basis.cols();
  r.report["rank_nullity_dim"] = rn;
  const bool pass = basis.cols() == rn;
  r.finish("cohomology", pass);
  r.write();
  return pass ? 0 : 2;
}

int cmd_decompose(Run& r) {
  GridComplex gc = build_derham(r.spec, r.mat);
  Vec x;
  if (r.cfg.has("input.vector")) {
    x = read_vector_market(r.cfg.raw("input.vector"));
    if (x.size() != gc.h1->dim())
      throw StructuralError("input vector length does not match the H1 dof count");
  } else {
    std::mt19937_64 rng(r.seed);
    x = random_unit(gc.h1->dim(), rng);
  }
  HelmholtzParts parts = helmholtz3(x, gc.grad, gc.curl, r.backend);
  const double nx = gc.h1->norm(x);
  const double scale = std::max(1e-300, nx);
  const double o01 = std::abs(gc.h1->inner(parts.range_prev, parts.harmonic));
  const double o02 = std::abs(gc.h1->inner(parts.range_prev, parts.range_next_adjoint));
  const double o12 = std::abs(gc.h1->inner(parts.harmonic, parts.range_next_adjoint));
  const double ortho = std::max({o01, o02, o12}) / (scale * scale);
  r.report["norm_input"] = nx;
  r.report["norm_range_prev"] = gc.h1->norm(parts.range_prev);
  r.report["norm_harmonic"] = gc.h1->norm(parts.harmonic);
  r.report["norm_range_next_adjoint"] = gc.h1->norm(parts.range_next_adjoint);
  r.report["recomposition_residual"] = parts.residual / scale;
  r.report["orthogonality_residual"] = ortho;
  r.report["tolerances"] = {{"orthogonality", 1e-10}, {"recomposition", 1e-10}};
  const bool pass = parts.residual / scale <= 1e-10 && ortho <= 1e-10;
  r.finish("decompose", pass);
  r.write();
  return pass ? 0 : 2;
}

int cmd_divcurl(Run& r) {
  GridComplex gc = build_derham(r.spec, r.mat);
  const std::string kind = r.cfg.get_string("experiment.kind", "oscillatory");
  std::vector<long> n_list = r.cfg.get_longs("n_list");
  if (n_list.empty()) n_list = {1, 2, 4, 8, 16};
  const double tol = r.cfg.get_double("tol", 1e-3);
  const int order = static_cast<int>(r.cfg.get_long("dict.order", 1));
  TestDictionary dict = make_test_dictionary(gc, order);

  SequencePair pair;
  if (kind == "oscillatory" || kind == "local")
    pair = gen_oscillatory_pair(gc, n_list);
  else if (kind == "negative-control")
    pair = gen_negative_control(gc, n_list);
  else
    throw StructuralError("experiment.kind must be oscillatory, negative-control or local");

  ConvergenceReport rep;
  if (kind == "local") {
    ScalarField phi = parse_expression(r.cfg.get_string(
        "cutoff.expr", "sin(pi*x1)^2 * sin(pi*x2)^2 * sin(pi*x3)^2"));
    rep = local_divcurl_experiment(gc, pair.e, pair.h, phi, dict, tol, r.backend);
  } else {
    rep = divcurl_experiment(pair.e, pair.h, dict, tol, gc.grad, gc.curl, r.backend);
  }

  r.report["experiment"] = kind;
  r.report["dictionary_size"] = dict.entries.size();
  r.report["convergence"] = convergence_json(rep);
  r.finish("divcurl", rep.pass);
  r.write();
  write_convergence_csv((std::filesystem::path(r.out_dir) / "report.csv").string(), rep,
                        pair.e, pair.h);
  return rep.pass ? 0 : 2;
}

int cmd_homogenize(Run& r) {
  HomogenizationProblem problem;
  problem.spec = r.spec;
  problem.pattern.a = r.cfg.get_double("theta.a", 1.0);
  problem.pattern.b = r.cfg.get_double("theta.b", 1.0);
  problem.pattern.axis = static_cast<int>(r.cfg.get_long("theta.axis", 0));
  problem.source = parse_expression(r.cfg.get_string("source.expr", "1"));
  std::vector<long> n_list = r.cfg.get_longs("n_list");
  if (n_list.empty()) n_list = {1, 2, 4, 8, 16};
  const double tol = r.cfg.get_double("tol", 1e-3);
  const int order = static_cast<int>(r.cfg.get_long("dict.order", 3));

  GridComplex gc = build_derham(problem.spec);
  TestDictionary dict = make_test_dictionary(gc, order);
  HomogenizationReport rep = homogenize_layered(problem, n_list, dict, tol, r.backend);

  r.report["theta"] = {{"a", problem.pattern.a},
                       {"b", problem.pattern.b},
                       {"axis", problem.pattern.axis}};
  r.report["effective_coefficient"] = rep.effective_coefficient;
  r.report["identity_residuals"] = rep.identity_residuals;
  r.report["convergence"] = convergence_json(rep.convergence);
  r.report["tolerances"] = {{"identity", 1e-12}, {"tol", tol}};
  r.finish("homogenize", rep.pass);
  r.write();
  return rep.pass ? 0 : 2;
}

int cmd_dualnorm(Run& r) {
  GridComplex gc = build_derham(r.spec, r.mat);
  const std::string op_name = r.cfg.get_string("operator", "grad");
  DualNormProblem problem(pick_operator(gc, op_name));
  const ComplexOperator& op = problem.op();
  std::mt19937_64 rng(r.seed);

  double worst_gap = 0.0;
  const int trials = static_cast<int>(r.cfg.get_long("trials", 100));
  for (int t = 0; t < trials; ++t) {
    ReducedDualNorm id = reduced_dual_norm_identity(problem, random_unit(op.domain()->dim(), rng));
    worst_gap = std::max(worst_gap, id.rel_gap);
  }

  // N(Atilde) = N(A): the dual norm vanishes on kernel directions
  double worst_kernel = 0.0;
  for (int t = 0; t < 10; ++t) {
    Vec x = random_unit(op.domain()->dim(), rng);
    LeastSquaresResult ls = least_squares(op, op.apply(x));
    Vec kx = x - ls.x;
    const double nk = op.domain()->norm(kx);
    if (nk > 1e-8) worst_kernel = std::max(worst_kernel, problem.dual_norm(kx) / nk);
  }

  ReducedExtensionCondition cond = reduced_extension_condition(problem);
  r.report["operator"] = op_name;
  r.report["identity_rel_gap_max"] = worst_gap;
  r.report["kernel_dual_norm_max"] = worst_kernel;
  r.report["cond_extension"] = num_or_string(cond.cond_extension);
  r.report["sigma_ratio"] = num_or_string(cond.sigma_ratio);
  r.report["tolerances"] = {{"identity_rel_gap", 1e-8}, {"kernel_dual_norm", 1e-8}};
  const bool pass = worst_gap <= 1e-8 && worst_kernel <= 1e-8;
  r.finish("dualnorm", pass);
  r.write();
  return pass ? 0 : 2;
}

int run(const std::string& config_path, const std::string& out_dir, long seed_flag,
        const std::string& backend_flag) {
  if (const char* threads = std::getenv("HODGELAB_THREADS"))
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));

  Run r;
  r.cfg = Config::from_file(config_path);
  r.out_dir = out_dir.empty() ? r.cfg.get_string("out", ".") : out_dir;
  r.seed = static_cast<unsigned>(seed_flag >= 0 ? seed_flag : r.cfg.get_long("seed", 0));
  r.backend = parse_backend(backend_flag.empty() ? r.cfg.get_string("backend", "auto")
                                                 : backend_flag);
  r.spec = r.cfg.grid_spec();
  r.mat = r.cfg.material();

  const std::string command = r.cfg.get_string("command", "");
  if (command == "spectral") return cmd_spectral(r);
  if (command == "cohomology") return cmd_cohomology(r);
  if (command == "decompose") return cmd_decompose(r);
  if (command == "divcurl") return cmd_divcurl(r);
  if (command == "homogenize") return cmd_homogenize(r);
  if (command == "dualnorm") return cmd_dualnorm(r);
  throw StructuralError(
      "command must be one of spectral, cohomology, decompose, divcurl, homogenize, "
      "dualnorm; got '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete Hilbert-complex toolkit"};
  std::string config_path, out_dir, backend;
  long seed = -1;
  app.add_option("--config", config_path, "config file (key = value grammar)")->required();
  app.add_option("--out", out_dir, "output directory (default from config, else '.')");
  app.add_option("--seed", seed, "random seed (overrides config)");
  app.add_option("--backend", backend, "dense | iterative | auto (overrides config)");
  CLI11_PARSE(app, argc, argv);

  try {
    return run(config_path, out_dir, seed, backend);
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

// Command-line front end: reproducible estimation, simulation, ROC and LDA
// experiments with seeded configs and machine-readable outputs. Progress goes
// to stderr; results go to files or stdout.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dpprec/experiments.hpp"

namespace {

using dpprec::json;

dpprec::DataMatrix load_data(const std::string& path, bool header,
                             bool normalize) {
  dpprec::DataMatrix x{dpprec::read_csv_matrix(path, header), false};
  if (normalize) {
    x = dpprec::normalize_max_l2(x);
  }
  return x;
}

json config_echo(const std::vector<std::string>& argv_tail) {
  json j;
  j["version"] = dpprec::library_version();
  j["argv"] = argv_tail;
  return j;
}

int cmd_estimate(const std::string& method, const std::string& input,
                 bool header, bool normalize, std::optional<double> lambda,
                 const std::vector<double>& cv_grid, double epsilon,
                 double delta, double rho, bool penalize_diagonal,
                 std::uint64_t seed, const std::string& output,
                 std::string meta_path,
                 const std::vector<std::string>& argv_tail) {
  const bool is_private = method == "ridge-dp" || method == "glasso-dp";
  const bool is_ridge = method == "ridge" || method == "ridge-dp";
  dpprec::DataMatrix x = load_data(input, header, normalize);
  const dpprec::SymmetricMatrix s = dpprec::sample_covariance(x);

  dpprec::AdmmConfig admm;
  admm.rho = rho;
  admm.penalize_diagonal = penalize_diagonal;

  double chosen_lambda;
  if (lambda) {
    chosen_lambda = *lambda;
  } else {
    std::vector<double> grid = cv_grid;
    if (grid.empty()) {
      grid = is_ridge ? dpprec::default_ridge_grid(s)
                      : dpprec::default_glasso_grid(s);
    }
    chosen_lambda =
        dpprec::cross_validate(x,
                               is_ridge ? dpprec::EstimatorKind::ridge
                                        : dpprec::EstimatorKind::glasso,
                               grid, admm, 5, dpprec::derive_seed(seed, 0xcf))
            .best_lambda;
    std::cerr << "cv selected lambda = " << chosen_lambda << "\n";
  }

  dpprec::PrecisionEstimate est{dpprec::SymmetricMatrix::identity(1)};
  if (is_private) {
    const dpprec::PrivacyBudget budget{epsilon, delta};
    est = is_ridge
              ? dpprec::dp_rp(x, budget, dpprec::RidgeConfig{chosen_lambda}, seed)
              : [&] {
                  dpprec::AdmmConfig cfg = admm;
                  cfg.lambda = chosen_lambda;
                  return dpprec::dp_agl(x, budget, cfg, seed);
                }();
  } else {
    est = is_ridge ? dpprec::ridge_precision(s, dpprec::RidgeConfig{chosen_lambda})
                   : [&] {
                       dpprec::AdmmConfig cfg = admm;
                       cfg.lambda = chosen_lambda;
                       return dpprec::solve_glasso(s, cfg);
                     }();
  }

  dpprec::write_csv_matrix(output, est.matrix.mat());
  json meta;
  meta["config"] = config_echo(argv_tail);
  meta["method"] = method;
  meta["lambda"] = chosen_lambda;
  meta["private"] = est.is_private;
  if (est.is_private) {
    meta["epsilon"] = epsilon;
    meta["delta"] = delta;
    meta["seed"] = seed;
  }
  if (est.iterations) {
    meta["iterations"] = *est.iterations;
    meta["primal_residual"] = est.primal_residual;
    meta["dual_residual"] = est.dual_residual;
  }
  if (meta_path.empty()) {
    meta_path = output + ".meta.json";
  }
  dpprec::write_json(meta_path, meta);
  return 0;
}

std::vector<int> extract_labels(Eigen::MatrixXd& obs_rows) {
  std::vector<int> labels;
  labels.reserve(obs_rows.rows());
  for (Eigen::Index i = 0; i < obs_rows.rows(); ++i) {
    labels.push_back(obs_rows(i, obs_rows.cols() - 1) > 0 ? 1 : -1);
  }
  obs_rows.conservativeResize(obs_rows.rows(), obs_rows.cols() - 1);
  return labels;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private precision-matrix estimation"};
  app.require_subcommand(1);
  std::vector<std::string> argv_tail(argv + 1, argv + argc);

  // shared option storage
  std::string method = "ridge", input, labels_path, truth_path, output,
              svg_path, meta_path, csv_path;
  bool header = false, normalize = false, penalize_diagonal = true,
       nonprivate = false;
  std::optional<double> lambda;
  std::vector<double> cv_grid, epsilons;
  double epsilon = 1.0, delta = 0.001, rho = 100.0, zero_tol = 0.0;
  int model = 2, p = 100, replicates = 50, threads = 1, grid_points = 0;
  std::vector<long> ns;
  long n = 400;
  std::uint64_t seed = 0;

  CLI::App* est = app.add_subcommand("estimate", "Estimate a precision matrix from a data CSV");
  est->add_option("--method", method, "ridge | ridge-dp | glasso | glasso-dp")
      ->check(CLI::IsMember({"ridge", "ridge-dp", "glasso", "glasso-dp"}))
      ->required();
  est->add_option("--input", input, "data CSV, rows = variables, columns = observations")->required();
  est->add_flag("--header", header, "input CSV has a header row");
  est->add_flag("--normalize", normalize, "scale data to unit max column l2 norm");
  est->add_option("--lambda", lambda, "tuning parameter (default: five-fold CV)");
  est->add_option("--cv-grid", cv_grid, "explicit CV grid of lambda values");
  est->add_option("--epsilon", epsilon, "privacy parameter for -dp methods");
  est->add_option("--delta", delta, "privacy parameter for -dp methods");
  est->add_option("--rho", rho, "ADMM penalty coefficient");
  est->add_flag("--penalize-diagonal,!--no-penalize-diagonal", penalize_diagonal,
                "include the diagonal in the l1 penalty");
  est->add_option("--seed", seed, "noise seed for -dp methods");
  est->add_option("--output", output, "estimate CSV path")->required();
  est->add_option("--meta", meta_path, "metadata JSON path (default <output>.meta.json)");

  CLI::App* models_cmd = app.add_subcommand("models", "Dump a synthetic model's true precision/covariance");
  models_cmd->add_option("--model", model, "model number 1-4")->required()->check(CLI::Range(1, 4));
  models_cmd->add_option("--p", p, "dimension")->required();
  models_cmd->add_option("--seed", seed, "generator seed (models 1 and 4)");
  models_cmd->add_option("--output", output, "precision CSV path")->required();
  std::string sigma_path;
  models_cmd->add_option("--sigma-output", sigma_path, "covariance CSV path");

  CLI::App* sim = app.add_subcommand("simulate", "Replicated private-vs-nonprivate loss tables");
  sim->add_option("--method", method, "ridge | glasso")
      ->check(CLI::IsMember({"ridge", "glasso"}))
      ->required();
  sim->add_option("--model", model, "model number 1-4")->required()->check(CLI::Range(1, 4));
  sim->add_option("--p", p, "dimension");
  sim->add_option("--n", ns, "sample sizes (repeatable)")->required();
  sim->add_option("--epsilon", epsilons, "privacy parameters (repeatable)")->required();
  std::optional<double> delta_opt;
  sim->add_option("--delta", delta_opt, "privacy delta (default 1/n)");
  sim->add_option("--lambda", lambda, "fixed lambda (default: five-fold CV per replicate)");
  sim->add_option("--rho", rho, "ADMM penalty coefficient");
  sim->add_flag("--penalize-diagonal,!--no-penalize-diagonal", penalize_diagonal,
                "include the diagonal in the l1 penalty");
  sim->add_option("--replicates", replicates, "number of replicates");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--threads", threads, "replicate-level parallelism");
  sim->add_option("--output", output, "report JSON path")->required();
  sim->add_option("--csv", csv_path, "optional mean(se) table CSV path");

  CLI::App* roc = app.add_subcommand("roc", "Support-recovery ROC curves for the l1 path");
  roc->add_option("--model", model, "model number 1-4")->check(CLI::Range(1, 4));
  roc->add_option("--p", p, "dimension");
  roc->add_option("--n", n, "sample size");
  roc->add_option("--input", input, "data CSV instead of a synthetic model");
  roc->add_flag("--header", header, "input CSV has a header row");
  roc->add_option("--truth", truth_path, "true adjacency CSV (required with --input)");
  roc->add_option("--epsilon", epsilons, "privacy parameters (repeatable)");
  roc->add_flag("--nonprivate", nonprivate, "include the non-private sweep");
  roc->add_option("--delta", delta, "privacy delta");
  roc->add_option("--grid-points", grid_points, "lambda grid size (default 40)");
  roc->add_option("--rho", rho, "ADMM penalty coefficient");
  roc->add_option("--zero-tol", zero_tol, "support zero tolerance");
  roc->add_option("--replicates", replicates, "noise replicates per epsilon");
  roc->add_option("--seed", seed, "master seed");
  roc->add_option("--output", output, "report JSON path")->required();
  roc->add_option("--svg", svg_path, "ROC plot SVG path");

  CLI::App* lda = app.add_subcommand("lda", "Plug-in LDA misclassification under privacy");
  lda->add_option("--input", input, "labeled CSV, rows = observations, last column = label")->required();
  lda->add_flag("--header", header, "input CSV has a header row");
  lda->add_option("--labels", labels_path, "separate label CSV (one +1/-1 per row)");
  lda->add_option("--epsilon", epsilons, "privacy parameters (repeatable)");
  lda->add_flag("--nonprivate", nonprivate, "include the non-private arm");
  lda->add_option("--delta", delta, "privacy delta");
  lda->add_option("--replicates", replicates, "number of random splits");
  lda->add_option("--seed", seed, "master seed");
  lda->add_option("--threads", threads, "split-level parallelism");
  lda->add_option("--output", output, "report JSON path")->required();
  lda->add_option("--svg", svg_path, "error-vs-epsilon plot SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) {
      return cmd_estimate(method, input, header, normalize, lambda, cv_grid,
                          epsilon, delta, rho, penalize_diagonal, seed, output,
                          meta_path, argv_tail);
    }

    if (models_cmd->parsed()) {
      const dpprec::SyntheticModel m = dpprec::gen_model(model, p, seed);
      dpprec::write_csv_matrix(output, m.theta_star.mat());
      if (!sigma_path.empty()) {
        dpprec::write_csv_matrix(sigma_path, m.sigma_star.mat());
      }
      return 0;
    }

    if (sim->parsed()) {
      dpprec::SimulateConfig cfg;
      cfg.model = model;
      cfg.p = p;
      cfg.ns = ns;
      cfg.epsilons = epsilons;
      cfg.delta = delta_opt;
      cfg.method = method == "ridge" ? dpprec::EstimatorKind::ridge
                                     : dpprec::EstimatorKind::glasso;
      cfg.lambda_override = lambda;
      cfg.rho = rho;
      cfg.penalize_diagonal = penalize_diagonal;
      cfg.replicates = replicates;
      cfg.seed = seed;
      cfg.threads = threads;
      json report = dpprec::run_simulate(
          cfg, [](const std::string& msg) { std::cerr << msg << "\n"; });
      report["config"] = config_echo(argv_tail);
      dpprec::write_json(output, report);
      if (!csv_path.empty()) {
        std::ofstream tab(csv_path);
        tab << "n,epsilon,l1_mean,l1_se,frob_mean,frob_se,spectral_mean,spectral_se\n";
        for (const auto& cell : report["cells"]) {
          for (const auto& r : cell["results"]) {
            tab << cell["n"] << "," << r["epsilon"] << ","
                << r["l1"]["mean"] << "," << r["l1"]["std_error"] << ","
                << r["frobenius"]["mean"] << "," << r["frobenius"]["std_error"]
                << "," << r["spectral"]["mean"] << ","
                << r["spectral"]["std_error"] << "\n";
          }
        }
      }
      return 0;
    }

    if (roc->parsed()) {
      if (epsilons.empty() && !nonprivate) {
        std::cerr << "error: need --epsilon and/or --nonprivate\n";
        return 1;
      }
      json report;
      std::vector<dpprec::NamedRoc> curves;
      if (input.empty()) {
        dpprec::RocExperimentConfig cfg;
        cfg.model = model;
        cfg.p = p;
        cfg.n = n;
        cfg.epsilons = epsilons;
        cfg.include_nonprivate = nonprivate;
        cfg.delta = delta;
        if (grid_points > 0) cfg.grid_points = grid_points;
        cfg.rho = rho;
        cfg.replicates = replicates;
        cfg.seed = seed;
        curves = dpprec::run_roc_curves(cfg);
        report = dpprec::run_roc(cfg);
      } else {
        if (truth_path.empty()) {
          std::cerr << "error: --truth is required with --input\n";
          return 1;
        }
        const dpprec::DataMatrix x = dpprec::normalize_max_l2(
            load_data(input, header, false));
        const dpprec::SymmetricMatrix s = dpprec::sample_covariance(x);
        const dpprec::SupportSet truth = dpprec::support_of(
            dpprec::SymmetricMatrix::from_nearly_symmetric(
                dpprec::read_csv_matrix(truth_path)),
            0.0);
        dpprec::RocOptions opt;
        opt.lambda_grid =
            dpprec::default_glasso_grid(s, grid_points > 0 ? grid_points : 40);
        opt.admm.rho = rho;
        opt.zero_tol = zero_tol;
        if (nonprivate) {
          opt.replicates = 1;
          curves.push_back({"nonprivate", dpprec::roc_sweep(s, x.n(), truth, opt)});
        }
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
          dpprec::RocOptions popt = opt;
          popt.budget = dpprec::PrivacyBudget{epsilons[e], delta};
          popt.replicates = replicates;
          popt.master_seed = dpprec::derive_seed(seed, 0xabc0 + e);
          curves.push_back({"epsilon=" + std::to_string(epsilons[e]),
                            dpprec::roc_sweep(s, x.n(), truth, popt)});
        }
        json jcurves = json::array();
        for (const dpprec::NamedRoc& c : curves) {
          json j = dpprec::to_json(c.curve);
          j["label"] = c.label;
          jcurves.push_back(j);
        }
        report["input"] = input;
        report["delta"] = delta;
        report["replicates"] = replicates;
        report["seed"] = seed;
        report["curves"] = jcurves;
      }
      report["config"] = config_echo(argv_tail);
      dpprec::write_json(output, report);
      if (!svg_path.empty()) {
        std::vector<dpprec::PlotSeries> series;
        for (const dpprec::NamedRoc& c : curves) {
          dpprec::PlotSeries ps;
          ps.label = c.label;
          for (const dpprec::RocPoint& pt : c.curve.points) {
            ps.x.push_back(pt.fpr);
            ps.y.push_back(pt.tpr);
          }
          series.push_back(std::move(ps));
        }
        dpprec::write_svg_plot(svg_path, "ROC", "FPR", "TPR", series);
      }
      return 0;
    }

    if (lda->parsed()) {
      Eigen::MatrixXd obs_rows = dpprec::read_csv_matrix(input, header);
      std::vector<int> labels;
      if (labels_path.empty()) {
        labels = extract_labels(obs_rows);
      } else {
        const Eigen::MatrixXd lm = dpprec::read_csv_matrix(labels_path);
        for (Eigen::Index i = 0; i < lm.rows(); ++i) {
          labels.push_back(lm(i, 0) > 0 ? 1 : -1);
        }
      }
      const Eigen::MatrixXd features = obs_rows.transpose();  // d x n
      if (static_cast<long>(labels.size()) != features.cols()) {
        throw dpprec::LengthMismatchError("label count does not match data");
      }
      dpprec::LdaExperimentConfig cfg;
      cfg.epsilons = epsilons;
      cfg.include_nonprivate = nonprivate || epsilons.empty();
      cfg.delta = delta;
      cfg.replicates = replicates;
      cfg.seed = seed;
      cfg.threads = threads;
      json report = dpprec::run_lda(features, labels, cfg);
      report["config"] = config_echo(argv_tail);
      dpprec::write_json(output, report);
      if (!svg_path.empty()) {
        dpprec::PlotSeries ps;
        ps.label = "misclassification";
        for (const auto& arm : report["arms"]) {
          if (arm.contains("epsilon")) {
            ps.x.push_back(arm["epsilon"].get<double>());
            ps.y.push_back(arm["error"]["mean"].get<double>());
          }
        }
        dpprec::write_svg_plot(svg_path, "LDA misclassification", "epsilon",
                               "test error", {ps});
      }
      return 0;
    }
  } catch (const dpprec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 1;
}

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sobocert/acceptance.hpp"
#include "sobocert/analysis.hpp"
#include "sobocert/covering.hpp"
#include "sobocert/discrete.hpp"
#include "sobocert/graph.hpp"
#include "sobocert/manifolds.hpp"
#include "sobocert/patching.hpp"
#include "sobocert/space.hpp"

namespace {

using nlohmann::ordered_json;
using namespace sobocert;

double parse_order(const std::string& text) {
  if (text == "inf" || text == "infinity") return kOrderInf;
  return std::stod(text);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << content;
  if (content.empty() || content.back() != '\n') out << "\n";
}

/// Empirical rho from the space itself: rho(r) = r^n / V(r) with V the
/// mu-volume of the ball of radius r.
std::vector<double> empirical_rho(const FiniteMetricMeasureSpace& space,
                                  int n) {
  const std::size_t count = space.point_count();
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return space.radial(static_cast<PointId>(a)) <
           space.radial(static_cast<PointId>(b));
  });
  std::vector<double> rho(count, 0.0);
  double volume = 0.0;
  for (std::size_t idx : order) {
    volume += space.mu_weight(static_cast<PointId>(idx));
    const double r = space.radial(static_cast<PointId>(idx));
    if (r > 0.0) rho[idx] = std::pow(r, n) / volume;
  }
  // Base point takes the innermost positive value.
  double first_positive = 0.0;
  for (std::size_t idx : order) {
    if (rho[idx] > 0.0) {
      first_positive = rho[idx];
      break;
    }
  }
  for (auto& value : rho) {
    if (value == 0.0) value = first_positive;
  }
  return rho;
}

WeightPair weights_by_name(const std::string& name,
                           const FiniteMetricMeasureSpace& space, int n,
                           double beta, double p) {
  if (name == "unit") {
    return {unit_lambda_builder(), unit_mu_builder()};
  }
  if (name == "murho") {
    WeightSpec spec;
    spec.n = n;
    spec.beta = beta;
    return mu_rho_weights(empirical_rho(space, n), spec);
  }
  if (name == "hardy") {
    return hardy_weights(p);
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown weight family " + name);
}

struct CommonOptions {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& common, std::string& config) {
  cmd->add_option("--config", config, "JSON config file with defaults");
  cmd->add_option("--out", common.out_dir, "output directory");
  cmd->add_option("--seed", common.seed, "random seed recorded in reports");
  cmd->add_option("--threads", common.threads, "worker cap for multistart");
}

std::string out_path(const CommonOptions& common, const std::string& name) {
  std::filesystem::create_directories(common.out_dir);
  return (std::filesystem::path(common.out_dir) / name).string();
}

void require_input(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::ConfigInvalid, "input file not found: " + path);
  }
}

int run_graph(const std::string& input, const std::string& kind,
              const std::string& k_text, double p,
              const CommonOptions& common) {
  require_input(input);
  WeightedGraph graph = read_graph_file(input);
  ordered_json report;
  report["input"] = input;
  report["seed"] = common.seed;
  report["vertices"] = graph.vertex_count();
  report["edges"] = graph.edge_count();
  const DegreeComparability dc = degree_and_comparability(graph);
  report["maxDegree"] = dc.max_degree;
  report["comparability"] = dc.comparability;
  report["provenance"]["degree"] = "exhaustive";
  if (!kind.empty()) {
    const double k = parse_order(k_text);
    DiscreteConstantReport constant;
    if (kind == "isoperimetric") {
      constant = isoperimetric_constant(graph, k, common.seed);
    } else if (kind == "dirichlet") {
      constant = best_sobolev_constant(graph, p, k, SobolevKind::Dirichlet,
                                       common.seed, common.threads);
    } else if (kind == "neumann") {
      constant = best_sobolev_constant(graph, p, k, SobolevKind::Neumann,
                                       common.seed, common.threads);
    } else {
      throw Error(ErrorCode::ConfigInvalid, "unknown kind " + kind);
    }
    report["constant"] = ordered_json::parse(constant.to_json_string());
  }
  write_text_file(out_path(common, "graph_report.json"), report.dump(2));
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_cover(const std::string& input, double kappa,
              const CommonOptions& common) {
  require_input(input);
  FiniteMetricMeasureSpace space = read_space_file(input);
  GoodCovering covering = build_annuli_covering(space, kappa);
  CoveringValidation validation = validate_covering(space, covering);
  ordered_json covering_json = ordered_json::parse(covering.to_json_string());
  covering_json["seed"] = common.seed;
  write_text_file(out_path(common, "covering.json"), covering_json.dump(2));
  ordered_json validation_json =
      ordered_json::parse(validation.to_json_string());
  validation_json["seed"] = common.seed;
  write_text_file(out_path(common, "validation.json"),
                  validation_json.dump(2));
  std::cout << "pieces " << covering.pieces.size() << ", q1 " << covering.q1
            << ", q2 " << covering.q2 << ", violations "
            << validation.violations.size() << "\n";
  return validation.ok() ? 0 : 1;
}

int run_patch(const std::string& input, double kappa, double p,
              const std::string& k_text, const std::string& weights, int n,
              double beta, const CommonOptions& common) {
  require_input(input);
  FiniteMetricMeasureSpace space = read_space_file(input);
  WeightPair pair = weights_by_name(weights, space, n, beta, p);
  CertifyOptions options;
  options.kappa = kappa;
  options.p = p;
  options.k = parse_order(k_text);
  options.seed = common.seed;
  options.threads = common.threads;
  options.weight_tag = weights;
  options.kind = weights == "hardy" ? CertificateKind::Hardy
                                    : CertificateKind::SobolevDirichlet;
  InequalityCertificate cert =
      certify_global(space, pair.lambda, pair.mu, options);
  ordered_json cert_json = ordered_json::parse(cert.to_json_string());
  cert_json["seed"] = common.seed;
  write_text_file(out_path(common, "certificate.json"), cert_json.dump(2));
  std::cout << cert_json.dump(2) << "\n";
  return 0;
}

int run_manifold(const std::string& kind, int n, double gamma, double slope,
                 double nu, double r_max, double window_lo, double window_hi,
                 const CommonOptions& common) {
  RadialProfile profile;
  if (kind == "schwarzschild") {
    profile = schwarzschild_solve(n, gamma, r_max);
  } else if (kind == "euclidean") {
    profile = make_euclidean_profile(n, r_max);
  } else if (kind == "cone") {
    profile = make_cone_profile(n, slope, r_max);
  } else if (kind == "powerlaw") {
    profile = make_powerlaw_profile(n, nu, r_max);
  } else {
    throw Error(ErrorCode::ConfigInvalid, "unknown profile kind " + kind);
  }
  std::ofstream csv(out_path(common, "profile.csv"));
  export_profile_csv(csv, profile);

  ordered_json fits;
  fits["kind"] = kind;
  fits["n"] = n;
  fits["seed"] = common.seed;
  fits["firstIntegralResidual"] = profile.max_first_integral_residual();
  fits["provenance"]["firstIntegralResidual"] = "quadrature";
  RhoResult rho = rho_function(profile);
  fits["rhoMonotone"] = rho.monotone;
  fits["rhoWorstDrop"] = rho.worst_drop;
  const double lo = window_lo > 0 ? window_lo : profile.grid.back() / 100.0;
  const double hi = window_hi > 0 ? window_hi : profile.grid.back();
  GrowthFit growth = inverse_doubling_fit(volume_function(profile), lo, hi);
  fits["growth"]["nu"] = growth.nu;
  fits["growth"]["cO"] = growth.c_o;
  fits["growth"]["aO"] = growth.a_o;
  fits["growth"]["bO"] = growth.b_o;
  fits["growth"]["residual"] = growth.residual;
  fits["provenance"]["growth"] = "quadrature";
  if (kind != "powerlaw") {
    CurvatureField curvature = curvature_field(profile);
    bool positive = true;
    for (std::size_t i = 0; i < curvature.riemann_norm.value.size(); ++i) {
      if (curvature.riemann_norm.r[i] >= lo &&
          curvature.riemann_norm.r[i] <= hi &&
          !(curvature.riemann_norm.value[i] > 0.0)) {
        positive = false;
      }
    }
    if (positive) {
      DecayFit decay = decay_fit(curvature.riemann_norm, lo, hi);
      fits["decay"]["exponent"] = decay.exponent;
      fits["decay"]["residual"] = decay.residual;
      fits["provenance"]["decay"] = "quadrature";
    }
    double ricci = 0.0;
    for (double value : curvature.ricci_residual.value) {
      ricci = std::max(ricci, value);
    }
    fits["ricciResidual"] = ricci;
  }
  write_text_file(out_path(common, "fits.json"), fits.dump(2));
  std::cout << fits.dump(2) << "\n";
  return 0;
}

int run_analyze(const std::string& input, const std::string& estimator,
                double p, int n, double beta, const CommonOptions& common) {
  require_input(input);
  FiniteMetricMeasureSpace space = read_space_file(input);
  WitnessReport report;
  ordered_json spec_json;
  if (estimator == "sobolev") {
    WeightSpec spec;
    spec.n = n;
    spec.beta = beta;
    WeightPair pair = mu_rho_weights(empirical_rho(space, n), spec);
    std::vector<double> lambda(space.point_count()), mu(space.point_count());
    for (std::size_t x = 0; x < space.point_count(); ++x) {
      lambda[x] = pair.lambda(space, static_cast<PointId>(x));
      mu[x] = pair.mu(space, static_cast<PointId>(x));
    }
    report = estimate_sobolev_witness(space, lambda, mu, n, common.seed,
                                      common.threads);
    spec_json["estimator"] = "sobolev";
    spec_json["n"] = n;
    spec_json["beta"] = beta;
  } else if (estimator == "hardy") {
    report = estimate_hardy_witness(space, p, common.seed, common.threads);
    spec_json["estimator"] = "hardy";
    spec_json["p"] = p;
  } else {
    throw Error(ErrorCode::ConfigInvalid, "unknown estimator " + estimator);
  }
  const std::string witness_file = out_path(common, "witness.csv");
  std::ofstream csv(witness_file);
  write_witness_csv(csv, report.witness);
  ordered_json j = ordered_json::parse(report.to_json_string("witness.csv"));
  j["spec"] = spec_json;
  j["input"] = input;
  write_text_file(out_path(common, "analysis.json"), j.dump(2));
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted Sobolev/Hardy constants: discrete inequalities, "
               "good coverings, certified patching, and radial models"};
  app.require_subcommand(1);

  // A JSON config may predefine any flag; explicit flags win.
  std::string config_path;
  auto config_defaults = [&](const std::string& command) {
    ordered_json empty;
    if (config_path.empty()) return empty;
    std::ifstream in(config_path);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open " + config_path);
    ordered_json parsed = ordered_json::parse(in, nullptr, false);
    if (parsed.is_discarded()) {
      throw Error(ErrorCode::ConfigInvalid, "malformed JSON in " + config_path);
    }
    if (parsed.contains("command") &&
        parsed["command"].get<std::string>() != command) {
      throw Error(ErrorCode::ConfigInvalid,
                  "config command does not match subcommand");
    }
    return parsed;
  };

  CommonOptions g_common, c_common, p_common, m_common, a_common, v_common;

  auto* graph_cmd = app.add_subcommand("graph", "graph constants from a file");
  std::string g_input, g_kind, g_k = "inf";
  double g_p = 2.0;
  graph_cmd->add_option("--input", g_input, "edge-list graph file")->required();
  graph_cmd->add_option("--kind", g_kind,
                        "isoperimetric | dirichlet | neumann");
  graph_cmd->add_option("--k", g_k, "order (number or inf)");
  graph_cmd->add_option("--p", g_p, "exponent p");
  add_common(graph_cmd, g_common, config_path);

  auto* cover_cmd = app.add_subcommand("cover", "build and validate covering");
  std::string c_input;
  double c_kappa = 2.0;
  cover_cmd->add_option("--input", c_input, "point-cloud space file")
      ->required();
  cover_cmd->add_option("--kappa", c_kappa, "annulus ratio > 1");
  add_common(cover_cmd, c_common, config_path);

  auto* patch_cmd = app.add_subcommand("patch", "certify a global constant");
  std::string p_input, p_k = "inf", p_weights = "unit";
  double p_kappa = 2.0, p_p = 2.0, p_beta = 0.0;
  int p_n = 3;
  patch_cmd->add_option("--input", p_input, "point-cloud space file")
      ->required();
  patch_cmd->add_option("--kappa", p_kappa, "annulus ratio > 1");
  patch_cmd->add_option("--p", p_p, "exponent p");
  patch_cmd->add_option("--k", p_k, "order (number or inf)");
  patch_cmd->add_option("--weights", p_weights, "unit | murho | hardy");
  patch_cmd->add_option("--n", p_n, "dimension for murho weights");
  patch_cmd->add_option("--beta", p_beta, "beta for murho weights");
  add_common(patch_cmd, p_common, config_path);

  auto* manifold_cmd = app.add_subcommand("manifold", "radial model geometry");
  std::string m_kind = "schwarzschild";
  int m_n = 4;
  double m_gamma = 1.0, m_slope = 1.0, m_nu = 3.0, m_rmax = 1.0e4;
  std::string m_window;
  manifold_cmd->add_option("--kind", m_kind,
                           "euclidean | cone | powerlaw | schwarzschild");
  manifold_cmd->add_option("--n", m_n, "dimension");
  manifold_cmd->add_option("--gamma-core", m_gamma, "core radius");
  manifold_cmd->add_option("--slope", m_slope, "cone slope");
  manifold_cmd->add_option("--nu", m_nu, "synthetic growth exponent");
  manifold_cmd->add_option("--rmax", m_rmax, "outer grid radius");
  manifold_cmd->add_option("--window", m_window, "fit window as lo,hi");
  add_common(manifold_cmd, m_common, config_path);

  auto* analyze_cmd = app.add_subcommand("analyze", "witness lower bounds");
  std::string a_input, a_estimator = "hardy";
  double a_p = 1.0, a_beta = 0.0;
  int a_n = 3;
  analyze_cmd->add_option("--input", a_input, "point-cloud space file")
      ->required();
  analyze_cmd->add_option("--estimator", a_estimator, "sobolev | hardy");
  analyze_cmd->add_option("--p", a_p, "Hardy exponent");
  analyze_cmd->add_option("--n", a_n, "dimension for the Sobolev weight");
  analyze_cmd->add_option("--beta", a_beta, "beta for the Sobolev weight");
  add_common(analyze_cmd, a_common, config_path);

  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
  add_common(verify_cmd, v_common, config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    // Apply config defaults where flags were not given.
    if (!config_path.empty()) {
      const std::string command = app.get_subcommands().front()->get_name();
      ordered_json cfg = config_defaults(command);
      auto maybe = [&](const char* key, auto& target) {
        auto* sub = app.get_subcommands().front();
        const std::string flag = std::string("--") + key;
        if (cfg.contains(key) && sub->count(flag) == 0 &&
            sub->get_option_no_throw(flag) != nullptr) {
          cfg.at(key).get_to(target);
        }
      };
      if (command == "graph") {
        maybe("input", g_input);
        maybe("kind", g_kind);
        maybe("k", g_k);
        maybe("p", g_p);
        maybe("out", g_common.out_dir);
        maybe("seed", g_common.seed);
      } else if (command == "cover") {
        maybe("input", c_input);
        maybe("kappa", c_kappa);
        maybe("out", c_common.out_dir);
        maybe("seed", c_common.seed);
      } else if (command == "patch") {
        maybe("input", p_input);
        maybe("kappa", p_kappa);
        maybe("p", p_p);
        maybe("k", p_k);
        maybe("weights", p_weights);
        maybe("n", p_n);
        maybe("beta", p_beta);
        maybe("out", p_common.out_dir);
        maybe("seed", p_common.seed);
      } else if (command == "manifold") {
        maybe("kind", m_kind);
        maybe("n", m_n);
        maybe("gamma-core", m_gamma);
        maybe("slope", m_slope);
        maybe("nu", m_nu);
        maybe("rmax", m_rmax);
        maybe("window", m_window);
        maybe("out", m_common.out_dir);
        maybe("seed", m_common.seed);
      } else if (command == "analyze") {
        maybe("input", a_input);
        maybe("estimator", a_estimator);
        maybe("p", a_p);
        maybe("n", a_n);
        maybe("beta", a_beta);
        maybe("out", a_common.out_dir);
        maybe("seed", a_common.seed);
      }
    }

    if (graph_cmd->parsed()) {
      return run_graph(g_input, g_kind, g_k, g_p, g_common);
    }
    if (cover_cmd->parsed()) {
      return run_cover(c_input, c_kappa, c_common);
    }
    if (patch_cmd->parsed()) {
      return run_patch(p_input, p_kappa, p_p, p_k, p_weights, p_n, p_beta,
                       p_common);
    }
    if (manifold_cmd->parsed()) {
      double window_lo = 0.0, window_hi = 0.0;
      if (!m_window.empty()) {
        const auto comma = m_window.find(',');
        if (comma == std::string::npos) {
          throw Error(ErrorCode::ConfigInvalid, "--window expects lo,hi");
        }
        window_lo = std::stod(m_window.substr(0, comma));
        window_hi = std::stod(m_window.substr(comma + 1));
      }
      return run_manifold(m_kind, m_n, m_gamma, m_slope, m_nu, m_rmax,
                          window_lo, window_hi, m_common);
    }
    if (analyze_cmd->parsed()) {
      return run_analyze(a_input, a_estimator, a_p, a_n, a_beta, a_common);
    }
    if (verify_cmd->parsed()) {
      auto results = run_acceptance(std::cout, v_common.threads);
      return all_passed(results) ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigInvalid ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

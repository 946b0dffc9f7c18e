// Command-line harness: bound reports for a matrix, Monte Carlo verification
// of the bounds and the four comparison tables.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fperturb/dense.hpp"
#include "fperturb/documents.hpp"
#include "fperturb/errors.hpp"
#include "fperturb/experiments.hpp"
#include "fperturb/lu_bounds.hpp"
#include "fperturb/matgen.hpp"
#include "fperturb/qr_bounds.hpp"
#include "fperturb/report.hpp"
#include "fperturb/tables.hpp"

namespace {

using namespace fperturb;

enum ExitCode { kOk = 0, kConfig = 1, kParse = 2, kFactorization = 3, kInapplicable = 4 };

// Invalid option values detected after CLI11 parsing.
struct ConfigError : Error {
  using Error::Error;
};

struct Options {
  std::string matrix_file;
  std::string kahan;   // "N,THETA"
  std::string graded;  // "N,D1,D2"
  std::optional<double> delta;
  std::optional<double> delta1;
  std::optional<double> epsilon;
  std::string c_matrix = "random";
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string output = "csv";
  std::string out;
  std::string experiment;
  std::string magnitude = "uniform";
  std::size_t delta_halving = 0;
  std::size_t seed_sweep = 1;
  int table = 0;
  bool require_applicable = false;
  bool deterministic = false;
};

std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& flag) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(flag + ": invalid number '" + item + "'");
    }
    pos = comma + 1;
  }
  if (values.size() != expected)
    throw ConfigError(flag + " expects " + std::to_string(expected) + " comma separated values");
  return values;
}

std::size_t parse_order(double v, const std::string& flag) {
  if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
    throw ConfigError(flag + ": n must be a positive integer");
  return static_cast<std::size_t>(v);
}

Matrix load_matrix(const Options& o, nlohmann::ordered_json& config) {
  const int sources = !o.matrix_file.empty() + !o.kahan.empty() + !o.graded.empty();
  if (sources != 1) throw ConfigError("give exactly one of --matrix, --kahan, --graded");
  if (!o.matrix_file.empty()) {
    config["matrix"] = o.matrix_file;
    return read_matrix_file(o.matrix_file);
  }
  try {
    if (!o.kahan.empty()) {
      const auto v = parse_list(o.kahan, 2, "--kahan");
      config["matrix"] = "kahan(" + o.kahan + ")";
      return kahan(parse_order(v[0], "--kahan"), v[1]);
    }
    const auto v = parse_list(o.graded, 3, "--graded");
    config["matrix"] = "graded(" + o.graded + ")";
    return graded_random(parse_order(v[0], "--graded"), v[1], v[2], o.seed);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    // Generator preconditions are configuration errors, not factorization failures.
    throw ConfigError(e.what());
  }
}

double require_size(const std::optional<double>& v, const std::string& flag) {
  if (!v) throw ConfigError(flag + " is required");
  if (!(*v >= 0.0) || !std::isfinite(*v)) throw ConfigError(flag + " must be finite and >= 0");
  return *v;
}

Matrix load_c(const Options& o, std::size_t m, nlohmann::ordered_json& config) {
  config["c_matrix"] = o.c_matrix;
  if (o.c_matrix == "random") return random_c_matrix(m, c_matrix_seed(o.seed));
  Matrix c = read_matrix_file(o.c_matrix);
  if (c.rows() != m || c.cols() != m) throw ConfigError("--c-matrix must be " + std::to_string(m) + " x " +
                                                        std::to_string(m));
  for (double v : c.data())
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("--c-matrix entries must lie in [0, 1]");
  return c;
}

void emit(const Document& doc, const Options& o) {
  const auto format = parse_output_format(o.output);
  if (!format) throw ConfigError("--output must be csv, markdown or json");
  const std::string text = render(doc, *format);
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + o.out + "'");
  file << text;
}

void check_format(const Options& o) {
  if (!parse_output_format(o.output)) throw ConfigError("--output must be csv, markdown or json");
}

int finish(Document doc, nlohmann::ordered_json config, const Options& o, bool applicable) {
  for (auto& [k, v] : doc.config.items()) config[k] = v;
  doc.config = std::move(config);
  emit(doc, o);
  if (o.require_applicable && !applicable) {
    std::cerr << "error: the bound's applicability condition does not hold\n";
    return kInapplicable;
  }
  return kOk;
}

nlohmann::ordered_json base_config(const std::string& command, const Options& o) {
  nlohmann::ordered_json config;
  config["command"] = command;
  config["seed"] = o.seed;
  return config;
}

int run_lu_normwise(const Options& o) {
  check_format(o);
  auto config = base_config("lu-normwise", o);
  const Matrix a = load_matrix(o, config);
  const double delta = require_size(o.delta, "--delta");
  const LuNormwiseReport r = lu_normwise_bounds(lu_factor(a), delta);
  return finish(lu_normwise_document(r), std::move(config), o, r.applicable);
}

int run_lu_componentwise(const Options& o) {
  check_format(o);
  auto config = base_config("lu-componentwise", o);
  const Matrix a = load_matrix(o, config);
  const double eps = o.epsilon ? require_size(o.epsilon, "--epsilon") : gaussian_elimination_epsilon(a.rows());
  const LuComponentwiseAnalysis an(lu_factor(a));
  const LuComponentwiseReport r = an.evaluate(eps);
  return finish(lu_componentwise_document(r), std::move(config), o, r.applicable);
}

int run_qr_normwise(const Options& o) {
  check_format(o);
  auto config = base_config("qr-normwise", o);
  const Matrix a = load_matrix(o, config);
  const double delta = require_size(o.delta, "--delta");
  const double delta1 = o.delta1 ? require_size(o.delta1, "--delta1") : delta;
  if (delta1 > delta) throw ConfigError("--delta1 cannot exceed --delta");
  const QrNormwiseReport r = qr_normwise_bounds(qr_factor(a), delta1, delta);
  return finish(qr_normwise_document(r), std::move(config), o, r.applicable);
}

int run_qr_componentwise(const Options& o) {
  check_format(o);
  auto config = base_config("qr-componentwise", o);
  const Matrix a = load_matrix(o, config);
  const double eps = require_size(o.epsilon, "--epsilon");
  const Matrix c = load_c(o, a.rows(), config);
  const QrFactors f = qr_factor(a);
  const QrComponentwiseReport r = QrComponentwiseAnalysis(f, c).evaluate(eps);
  return finish(qr_componentwise_document(r), std::move(config), o, r.applicable);
}

int run_verify(const Options& o) {
  check_format(o);
  const auto experiment = parse_experiment(o.experiment);
  if (!experiment) throw ConfigError("unknown --experiment '" + o.experiment + "'");
  if (o.trials == 0) throw ConfigError("--trials must be at least 1");
  MagnitudeMode magnitude = MagnitudeMode::Uniform;
  if (o.magnitude == "extreme") magnitude = MagnitudeMode::Extreme;
  else if (o.magnitude != "uniform") throw ConfigError("--magnitude must be uniform or extreme");

  auto config = base_config("verify", o);
  const Matrix a = load_matrix(o, config);
  PerturbationSpec spec;
  spec.seed = o.seed;
  switch (*experiment) {
    case Experiment::LuNormwise:
    case Experiment::QrNormwise:
      spec.model = Normwise{require_size(o.delta, "--delta")};
      break;
    case Experiment::LuComponentwise:
      spec.model = ComponentwiseLU{o.epsilon ? require_size(o.epsilon, "--epsilon")
                                             : gaussian_elimination_epsilon(a.rows())};
      break;
    case Experiment::QrComponentwise:
      spec.model = ComponentwiseQR{require_size(o.epsilon, "--epsilon"), load_c(o, a.rows(), config)};
      break;
  }
  config["magnitude"] = o.magnitude;
  config["delta_halving"] = o.delta_halving;

  const VerificationReport v = verify_bounds(a, *experiment, spec, o.trials, {0, magnitude});
  std::vector<FirstOrderTrend> trends;
  if (o.delta_halving > 0) trends = first_order_trends(a, *experiment, spec, o.delta_halving + 1);
  for (const SkippedTrial& s : v.skipped) std::cerr << "skipped trial " << s.trial << ": " << s.reason << '\n';
  return finish(verification_document(v, trends, o.deterministic), std::move(config), o, v.applicable);
}

int run_table_command(const Options& o) {
  check_format(o);
  if (o.seed_sweep == 0) throw ConfigError("--seed-sweep must be at least 1");
  TableOptions t;
  t.seed = o.seed;
  t.seed_sweep = o.seed_sweep;
  t.deterministic = o.deterministic;
  Document doc = run_table(o.table, t);
  emit(doc, o);
  return kOk;
}

void add_matrix_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--matrix", o.matrix_file, "CSV matrix file, one row per line");
  cmd->add_option("--kahan", o.kahan, "Kahan matrix N,THETA");
  cmd->add_option("--graded", o.graded, "D1 B D2 with standard normal B: N,D1,D2");
}

void add_common_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--output", o.output, "csv, markdown or json")->capture_default_str();
  cmd->add_option("--out", o.out, "Write to this file instead of stdout");
  cmd->add_flag("--deterministic", o.deterministic, "Report zero for all timings");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbation bounds for LU and QR factorizations"};
  app.require_subcommand(1);
  Options o;

  auto* lu_nw = app.add_subcommand("lu-normwise", "Normwise LU bounds");
  auto* lu_cw = app.add_subcommand("lu-componentwise", "Componentwise LU bounds");
  auto* qr_nw = app.add_subcommand("qr-normwise", "Normwise QR bounds");
  auto* qr_cw = app.add_subcommand("qr-componentwise", "Componentwise QR bounds");
  auto* verify = app.add_subcommand("verify", "Monte Carlo verification of the bounds");
  auto* table = app.add_subcommand("table", "Comparison table 1, 2, 3 or 4");

  for (auto* cmd : {lu_nw, lu_cw, qr_nw, qr_cw, verify}) {
    add_matrix_options(cmd, o);
    add_common_options(cmd, o);
    cmd->add_flag("--require-applicable", o.require_applicable, "Exit with status 4 if the bound does not apply");
  }
  for (auto* cmd : {lu_nw, qr_nw, verify}) cmd->add_option("--delta", o.delta, "||dA||_F");
  qr_nw->add_option("--delta1", o.delta1, "||Q^T dA||_F (defaults to --delta)");
  for (auto* cmd : {lu_cw, qr_cw, verify}) cmd->add_option("--epsilon", o.epsilon, "Componentwise size");
  for (auto* cmd : {qr_cw, verify})
    cmd->add_option("--c-matrix", o.c_matrix, "CSV file with entries in [0, 1], or 'random'")->capture_default_str();

  verify->add_option("--experiment", o.experiment, "lu-normwise, lu-componentwise, qr-normwise or qr-componentwise")
      ->required();
  verify->add_option("--trials", o.trials, "Number of trials")->capture_default_str();
  verify->add_option("--magnitude", o.magnitude, "uniform or extreme entry magnitudes")->capture_default_str();
  verify->add_option("--delta-halving", o.delta_halving, "Also report first-order ratios for K halvings");

  add_common_options(table, o);
  table->add_option("number", o.table, "Table number")->required()->check(CLI::Range(1, 4));
  table->add_option("--seed-sweep", o.seed_sweep, "Median over this many consecutive seeds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*lu_nw) return run_lu_normwise(o);
    if (*lu_cw) return run_lu_componentwise(o);
    if (*qr_nw) return run_qr_normwise(o);
    if (*qr_cw) return run_qr_componentwise(o);
    if (*verify) return run_verify(o);
    return run_table_command(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const SingularLeadingMinor& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFactorization;
  } catch (const RankDeficient& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFactorization;
  } catch (const SingularDiagonal& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFactorization;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
}

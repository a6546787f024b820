#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "fisherlab/errors.hpp"
#include "fisherlab/interferometer.hpp"
#include "fisherlab/montecarlo.hpp"
#include "fisherlab/slit.hpp"
#include "fisherlab/stats.hpp"

#ifndef FISHERLAB_VERSION
#define FISHERLAB_VERSION "0.0.0"
#endif

namespace fisherlab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kTool = "fisherlab";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool json = false;
  double hbar = 1.0;
};

/// Everything needed to write the run manifest. Parameters hold the fully
/// resolved option values, so replaying them needs no defaults.
struct RunRecord {
  std::string subcommand;
  json parameters = json::object();
  std::vector<std::string> flags;  // boolean options that were set
  std::vector<std::string> outputs;
};

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const Globals& g, RunRecord& run, const std::string& name,
                const std::string& body) {
  const fs::path path = fs::path(g.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << body;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
  run.outputs.push_back(name);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Canonical argument list for the run, without --out or --json.
std::vector<std::string> canonical_argv(const Globals& g, const RunRecord& run) {
  std::vector<std::string> argv{"--seed", std::to_string(g.seed), "--hbar",
                                format_double(g.hbar), run.subcommand};
  for (const auto& [key, value] : run.parameters.items()) {
    argv.push_back("--" + key);
    if (value.is_string()) {
      argv.push_back(value.get<std::string>());
    } else if (value.is_number_float()) {
      argv.push_back(format_double(value.get<double>()));
    } else {
      argv.push_back(value.dump());
    }
  }
  for (const auto& f : run.flags) argv.push_back("--" + f);
  return argv;
}

void write_manifest(const Globals& g, RunRecord& run) {
  json flags = json::object();
  for (const auto& f : run.flags) flags[f] = true;
  json manifest = {
      {"schema", "fisherlab.run_manifest.v1"},
      {"tool", kTool},
      {"version", FISHERLAB_VERSION},
      {"subcommand", run.subcommand},
      {"parameters", run.parameters},
      {"flags", flags},
      {"seed", g.seed},
      {"hbar", g.hbar},
      {"outputs", run.outputs},
      {"argv", canonical_argv(g, run)},
  };
  write_file(g, run, "manifest.json", dump(manifest));
}

void emit_summary(const Globals& g, std::ostream& out, const json& summary) {
  if (g.json) {
    out << dump(summary);
    return;
  }
  for (const auto& [key, value] : summary.items()) {
    if (key == "schema") continue;
    out << std::left << std::setw(24) << key << ' '
        << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
}

// ---- slit -----------------------------------------------------------------

struct SlitArgs {
  double width = 1.0;
  double wavelength = 1.0;
  double distance = 1.0;
  double kx = 0.0;
  double half_width = slit::FarFieldOptions{}.half_width;
  std::size_t points = slit::FarFieldOptions{}.points;
};

void add_slit_options(CLI::App* sub, SlitArgs& a) {
  sub->add_option("--width", a.width, "slit width a")->capture_default_str();
  sub->add_option("--wavelength", a.wavelength, "de Broglie wavelength")->capture_default_str();
  sub->add_option("--distance", a.distance, "slit-to-screen distance d")->capture_default_str();
  sub->add_option("--kx", a.kx, "incident transverse wavenumber")->capture_default_str();
  sub->add_option("--half-width", a.half_width, "far-field grid half-width in mu")
      ->capture_default_str();
  sub->add_option("--points", a.points, "far-field grid points")->capture_default_str();
}

void record_slit(const SlitArgs& a, RunRecord& run) {
  run.parameters["width"] = a.width;
  run.parameters["wavelength"] = a.wavelength;
  run.parameters["distance"] = a.distance;
  run.parameters["kx"] = a.kx;
  run.parameters["half-width"] = a.half_width;
  run.parameters["points"] = a.points;
}

slit::SlitGeometry slit_geometry(const SlitArgs& a, double hbar) {
  slit::SlitGeometry geo;
  geo.width = a.width;
  geo.wavelength = a.wavelength;
  geo.screen_distance = a.distance;
  geo.k_x = a.kx;
  geo.hbar = hbar;
  geo.validate();
  return geo;
}

slit::FarFieldOptions slit_options(const SlitArgs& a) {
  slit::FarFieldOptions opt;
  opt.half_width = a.half_width;
  opt.points = a.points;
  return opt;
}

void cmd_slit(const Globals& g, const SlitArgs& a, RunRecord& run, std::ostream& out) {
  const slit::SlitGeometry geo = slit_geometry(a, g.hbar);
  const slit::FarFieldOptions opt = slit_options(a);
  const slit::UncertaintyChain chain = slit::uncertainty_chain(geo, opt);

  const numeric::UniformGrid grid = numeric::UniformGrid::symmetric(opt.half_width, opt.points);
  std::string csv = "mu,p\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv += format_double(grid[i]) + "," +
           format_double(slit::farfield_density(grid[i], geo.shift())) + "\n";
  }
  write_file(g, run, "slit_density.csv", csv);

  // Width of the slit times the distance to the first diffraction minimum.
  const double naive = std::numbers::pi * geo.hbar;
  const json summary = {
      {"schema", "fisherlab.slit_summary.v1"},
      {"fisher", chain.fisher},
      {"position_variance", chain.position_variance},
      {"fisher_momentum_bound", chain.momentum_variance_bound},
      {"heisenberg_bound", chain.heisenberg_bound},
      {"product", chain.product},
      {"naive_width_product", {{"value", naive}, {"label", "heuristic"}}},
      {"hbar", geo.hbar},
      {"nu", geo.shift()},
  };
  write_file(g, run, "slit_summary.json", dump(summary));
  emit_summary(g, out, summary);
}

// ---- mz -------------------------------------------------------------------

struct MzArgs {
  unsigned n1 = 0;
  unsigned n2 = 0;
  double phi = 0.0;
  std::size_t size_cap = mz::kDefaultSizeCap;
};

void cmd_mz(const Globals& g, const MzArgs& a, RunRecord& run, std::ostream& out) {
  if (a.n1 + a.n2 < 1) throw std::invalid_argument("mz: need n1 + n2 >= 1");
  const mz::FockInput input{a.n1, a.n2};
  const mz::OutcomeDistribution dist = mz::outcome_distribution(input, a.phi, a.size_cap);

  std::string csv = "k,p\n";
  for (std::size_t i = 0; i < dist.p.size(); ++i) {
    const auto k = mz::HalfInteger::from_twice(dist.j.twice() - 2 * static_cast<int>(i));
    csv += format_double(k.value()) + "," + format_double(dist.p[i]) + "\n";
  }
  write_file(g, run, "mz_distribution.csv", csv);

  const mz::PhaseFisher pf = mz::fisher_phase_at_zero(input);
  const mz::Moments mo = mz::moments(input, a.phi);
  const std::optional<double> lin = mz::linearized_phase_error(input, a.phi);
  const json summary = {
      {"schema", "fisherlab.mz_summary.v1"},
      {"j", dist.j.value()},
      {"m", dist.m.value()},
      {"phi", a.phi},
      {"F0", pf.closed_form},
      {"delta_phi_linearized", lin ? json(*lin) : json("undefined")},
      {"crb_phase", 1.0 / pf.closed_form},
      {"mean_J3", mo.mean_j3},
      {"var_J3", mo.variance()},
  };
  write_file(g, run, "mz_summary.json", dump(summary));
  emit_summary(g, out, summary);
}

// ---- montecarlo -----------------------------------------------------------

struct McArgs {
  std::string model = "bernoulli";
  double theta = 0.5;
  std::uint64_t n = 1000;
  std::uint64_t trials = 2000;
  std::string estimator = "mle";
  unsigned threads = 0;
  unsigned n1 = 10;
  unsigned n2 = 0;
  SlitArgs slit;
};

std::shared_ptr<const stats::ParametricModel> make_model(const Globals& g, const McArgs& a) {
  if (a.model == "bernoulli") {
    return std::make_shared<const stats::ParametricModel>(stats::bernoulli_model());
  }
  if (a.model == "slit") {
    return std::make_shared<const stats::ParametricModel>(
        slit::farfield_model(slit_geometry(a.slit, g.hbar), slit_options(a.slit)));
  }
  if (a.model == "mz") {
    if (a.n1 + a.n2 < 1) throw std::invalid_argument("montecarlo: need n1 + n2 >= 1");
    return std::make_shared<const stats::ParametricModel>(mz::mz_model({a.n1, a.n2}));
  }
  throw std::invalid_argument("montecarlo: unknown model '" + a.model + "'");
}

void record_mc(const McArgs& a, RunRecord& run) {
  run.parameters["model"] = a.model;
  run.parameters["theta"] = a.theta;
  run.parameters["n"] = a.n;
  run.parameters["trials"] = a.trials;
  run.parameters["estimator"] = a.estimator;
  if (a.model == "mz") {
    run.parameters["n1"] = a.n1;
    run.parameters["n2"] = a.n2;
  }
  if (a.model == "slit") record_slit(a.slit, run);
}

void cmd_montecarlo(const Globals& g, const McArgs& a, RunRecord& run, std::ostream& out) {
  mc::TrialConfig config;
  config.model_name = a.model;
  config.model = make_model(g, a);
  config.theta_true = a.theta;
  config.n_particles = a.n;
  config.n_trials = a.trials;
  config.seed = g.seed;
  config.estimator = a.estimator == "bayes" ? mc::Estimator::BayesMean : mc::Estimator::MLE;
  config.threads = a.threads;
  if (!config.model->theta_domain().contains(a.theta)) {
    throw std::invalid_argument("montecarlo: theta outside the model domain");
  }

  mc::TrialReport report;
  bool failed = false;
  try {
    report = mc::run_trials(config);
  } catch (const mc::TrialFailureRate& e) {
    report = e.report();
    failed = true;
  }
  json body = report.to_json();
  write_file(g, run, "trial_report.json", dump(body));
  if (failed) throw mc::TrialFailureRate(report);
  if (g.json) {
    out << dump(body);
  } else {
    emit_summary(g, out, body);
  }
}

// ---- accumulate -----------------------------------------------------------

struct AccArgs {
  unsigned j = 50;
  unsigned repeats = 4;
  double phi_true = 0.0;
  double window = mz::Posterior::kDefaultHalfWindow;
  std::size_t points = mz::Posterior::kDefaultPoints;
  bool postselect_zero = false;
};

void cmd_accumulate(const Globals& g, const AccArgs& a, RunRecord& run, std::ostream& out) {
  mc::AccumulationConfig config;
  config.j = mz::HalfInteger::from_twice(2 * static_cast<int>(a.j));
  config.n_repeats = a.repeats;
  config.phi_true = a.phi_true;
  config.half_window = a.window;
  config.points = a.points;
  config.postselect_zero = a.postselect_zero;

  mc::Rng rng = mc::Rng::substream(g.seed, 0);
  const int digits = std::max<int>(3, static_cast<int>(std::to_string(a.repeats).size()));
  unsigned shot = 0;
  auto write_posterior = [&](const mz::Posterior& post) {
    std::string csv = "phi,density\n";
    const auto& grid = post.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv += format_double(grid[i]) + "," + format_double(post.density()[i]) + "\n";
    }
    std::ostringstream name;
    name << "posterior_" << std::setw(digits) << std::setfill('0') << shot++ << ".csv";
    write_file(g, run, name.str(), csv);
  };
  const mc::AccumulationResult result = mc::run_accumulation(config, rng, write_posterior);

  const double n = static_cast<double>(a.repeats);
  const double jj = static_cast<double>(a.j) * static_cast<double>(a.j);
  json outcomes = json::array();
  for (const auto& k : result.outcomes) outcomes.push_back(k.value());
  const json summary = {
      {"schema", "fisherlab.accumulate_summary.v1"},
      {"j", a.j},
      {"repeats", a.repeats},
      {"phi_true", a.phi_true},
      {"window", a.window},
      {"postselect_zero", a.postselect_zero},
      {"variance", result.variance},
      {"prediction_1_over_njj", finite_or_null(1.0 / (n * jj))},
      {"prediction_quant_res",
       a.repeats ? json(mz::resource_scaling(config.j, a.repeats)) : json(nullptr)},
      {"outcomes", outcomes},
  };
  write_file(g, run, "accumulate_summary.json", dump(summary));
  emit_summary(g, out, summary);
}

// ---- replay ---------------------------------------------------------------

std::vector<std::string> replay_args(const std::string& manifest_path, const Globals& g,
                                     bool out_given) {
  std::ifstream f(manifest_path);
  if (!f) throw IoError("cannot read manifest " + manifest_path);
  json manifest;
  try {
    manifest = json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!manifest.contains("argv") || !manifest["argv"].is_array()) {
    throw std::invalid_argument("manifest has no argv array");
  }
  std::vector<std::string> args;
  if (out_given) args.insert(args.end(), {"--out", g.out_dir});
  if (g.json) args.push_back("--json");
  for (const auto& a : manifest["argv"]) args.push_back(a.get<std::string>());
  return args;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fisher-information uncertainty and interferometric phase estimation", kTool};
  app.set_version_flag("--version", FISHERLAB_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  CLI::Option* out_opt =
      app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_flag("--json", g.json, "print the summary as JSON");
  app.add_option("--hbar", g.hbar, "reduced Planck constant")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  SlitArgs slit_args;
  CLI::App* slit_cmd = app.add_subcommand("slit", "single-slit far field and uncertainty chain");
  add_slit_options(slit_cmd, slit_args);

  MzArgs mz_args;
  CLI::App* mz_cmd = app.add_subcommand("mz", "Mach-Zehnder outcome statistics");
  mz_cmd->add_option("--n1", mz_args.n1, "particles in input port 1")->required();
  mz_cmd->add_option("--n2", mz_args.n2, "particles in input port 2")->required();
  mz_cmd->add_option("--phi", mz_args.phi, "phase shift")->capture_default_str();
  mz_cmd->add_option("--size-cap", mz_args.size_cap, "largest allowed 2j+1")
      ->capture_default_str();

  McArgs mc_args;
  CLI::App* mc_cmd = app.add_subcommand("montecarlo", "repeated-experiment efficiency run");
  mc_cmd->add_option("--model", mc_args.model, "model to sample")
      ->capture_default_str()
      ->check(CLI::IsMember({"bernoulli", "slit", "mz"}));
  mc_cmd->add_option("--theta", mc_args.theta, "true parameter")->capture_default_str();
  mc_cmd->add_option("--n", mc_args.n, "particles per trial")
      ->capture_default_str()
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
  mc_cmd->add_option("--trials", mc_args.trials, "number of trials")
      ->capture_default_str()
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
  mc_cmd->add_option("--estimator", mc_args.estimator, "mle or bayes")
      ->capture_default_str()
      ->check(CLI::IsMember({"mle", "bayes"}));
  mc_cmd->add_option("--threads", mc_args.threads, "worker threads, 0 = all cores")
      ->capture_default_str();
  mc_cmd->add_option("--n1", mc_args.n1, "mz: particles in port 1")->capture_default_str();
  mc_cmd->add_option("--n2", mc_args.n2, "mz: particles in port 2")->capture_default_str();
  add_slit_options(mc_cmd, mc_args.slit);

  AccArgs acc_args;
  CLI::App* acc_cmd = app.add_subcommand("accumulate", "posterior accumulation over shots");
  acc_cmd->add_option("--j", acc_args.j, "integer j; input n1 = n2 = j")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  acc_cmd->add_option("--repeats", acc_args.repeats, "number of shots")->capture_default_str();
  acc_cmd->add_option("--phi-true", acc_args.phi_true, "true phase")->capture_default_str();
  acc_cmd->add_option("--window", acc_args.window, "posterior half-window W")
      ->capture_default_str();
  acc_cmd->add_option("--points", acc_args.points, "posterior grid points")
      ->capture_default_str();
  acc_cmd->add_flag("--postselect-zero", acc_args.postselect_zero,
                    "condition on the all-zero outcome record");

  std::string manifest_path;
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-run the command in a manifest");
  replay_cmd->add_option("manifest", manifest_path, "manifest.json")->required();

  std::vector<const char*> argv{kTool};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  if (replay_cmd->parsed()) {
    return run(replay_args(manifest_path, g, out_opt->count() > 0), out, err);
  }

  std::error_code ec;
  fs::create_directories(g.out_dir, ec);
  if (ec) throw IoError("cannot create " + g.out_dir + ": " + ec.message());

  RunRecord record;
  if (slit_cmd->parsed()) {
    record.subcommand = "slit";
    record_slit(slit_args, record);
    cmd_slit(g, slit_args, record, out);
  } else if (mz_cmd->parsed()) {
    record.subcommand = "mz";
    record.parameters = {{"n1", mz_args.n1}, {"n2", mz_args.n2}, {"phi", mz_args.phi},
                         {"size-cap", mz_args.size_cap}};
    cmd_mz(g, mz_args, record, out);
  } else if (mc_cmd->parsed()) {
    record.subcommand = "montecarlo";
    record_mc(mc_args, record);
    // Thread count does not affect results, so it stays out of the manifest.
    try {
      cmd_montecarlo(g, mc_args, record, out);
    } catch (const mc::TrialFailureRate&) {
      write_manifest(g, record);
      throw;
    }
  } else {
    record.subcommand = "accumulate";
    record.parameters = {{"j", acc_args.j},
                         {"repeats", acc_args.repeats},
                         {"phi-true", acc_args.phi_true},
                         {"window", acc_args.window},
                         {"points", acc_args.points}};
    if (acc_args.postselect_zero) record.flags.push_back("postselect-zero");
    cmd_accumulate(g, acc_args, record, out);
  }
  write_manifest(g, record);
  return kExitOk;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ZeroPosterior& e) {
    err << "error: " << e.what() << '\n';
    return kExitZeroPosterior;
  } catch (const mc::TrialFailureRate& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailureRate;
  } catch (const SizeLimit& e) {
    err << "error: " << e.what() << '\n';
    return kExitSizeLimit;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace fisherlab::cli

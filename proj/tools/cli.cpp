#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qst/analysis.hpp"
#include "qst/ed_oracle.hpp"
#include "qst/error.hpp"
#include "qst/fidelity.hpp"
#include "qst/format.hpp"
#include "qst/spectral.hpp"

namespace qst::cli {

namespace {

using nlohmann::ordered_json;

constexpr long long kMaxRows = 10'000'000;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string protocol = "weak-block-2q";
  int n = 0;
  double xi = 0.001;
  double threshold = kDefaultThreshold;
  double t_min = 0.0;
  double t_max = 0.0;
  double dt = 0.05;
  double window = 0.0;
  int qubits = 0;
  std::vector<int> senders;
  std::vector<int> receivers;
  std::vector<int> n_list;
  std::vector<double> xi_list;
  std::string output = "-";
  int jobs = 1;

  std::string report;
  std::string input;
  std::string axis = "xi";
  std::string model = "power";
  int verify_n_min = 4;
  int verify_n_max = 10;
  int verify_samples = 20;
  double verify_t_window = 500.0;
  unsigned verify_seed = 20240601u;
  double verify_tolerance = 1e-8;
};

ProtocolKind protocol_kind(const Options& o) {
  const auto kind = parse_protocol(o.protocol);
  if (!kind) throw UsageError("unknown protocol '" + o.protocol + "'");
  return *kind;
}

int require_n(const Options& o, const CLI::App& app) {
  if (app.get_option("--n")->count() == 0 && o.n == 0) throw UsageError("--n is required");
  return o.n;
}

ChainSpec chain_from(const Options& o, const CLI::App& app) {
  return build_chain({protocol_kind(o), o.xi, require_n(o, app)});
}

TransferSetup setup_from(const Options& o, const ChainSpec& chain) {
  const int n = chain.n_sites();
  if (!o.senders.empty() || !o.receivers.empty()) {
    TransferSetup setup{o.senders, o.receivers};
    setup.validate(n);
    return setup;
  }
  const int qubits = o.qubits > 0 ? o.qubits : protocol_qubits(protocol_kind(o));
  return TransferSetup::default_for(qubits, n);
}

// Writes to the named file, or to `fallback` for "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

int cmd_spectrum(const Options& o, const CLI::App& app, std::ostream& out, std::ostream& err) {
  const ChainSpec chain = chain_from(o, app);
  const int n = chain.n_sites();
  const SpectralDecomposition d = diagonalize(chain);
  std::vector<int> block{1, n};
  if (protocol_qubits(protocol_kind(o)) == 2) block = {1, 2, n - 1, n};

  {
    Sink sink(o.output, out);
    *sink << "k,eigenvalue,weight_site1,weight_siteN,weight_block\n";
    const int first[] = {1};
    const int last[] = {n};
    for (int k = 0; k < n; ++k) {
      *sink << k << ',' << format_number(d.eigenvalue(k)) << ','
            << format_number(localization_weight(d, first, k)) << ','
            << format_number(localization_weight(d, last, k)) << ','
            << format_number(localization_weight(d, block, k)) << '\n';
    }
  }

  const SpectralClass c = classify_spectrum(d, n);
  ordered_json j;
  j["protocol"] = o.protocol;
  j["n_sites"] = n;
  j["xi"] = round_to_output(o.xi);
  j["parity"] = c.parity == Parity::Even ? "even" : "odd";
  j["residue_mod6"] = c.residue_mod6;
  j["has_zero_mode"] = c.has_zero_mode;
  j["edge_multiplicity"] = c.edge_multiplicity();
  j["degenerate_sets"] = ordered_json::array();
  for (const auto& s : c.degenerate_sets) {
    j["degenerate_sets"].push_back({{"energy", round_to_output(s.energy)}, {"multiplicity", s.multiplicity}});
  }
  j["label"] = c.label();
  const double gap = predicted_rabi_gap(d, setup_from(o, chain));
  j["rabi_gap"] = std::isfinite(gap) ? ordered_json(round_to_output(gap)) : ordered_json(nullptr);

  if (o.report.empty()) {
    err << j.dump() << '\n';
  } else {
    Sink sink(o.report, err);
    *sink << j.dump() << '\n';
  }
  return kExitOk;
}

int cmd_evolve(const Options& o, const CLI::App& app, std::ostream& out) {
  const ChainSpec chain = chain_from(o, app);
  const TransferSetup setup = setup_from(o, chain);
  const SpectralDecomposition d = diagonalize(chain);

  double t_min = o.t_min, t_max = o.t_max;
  if (o.window > 0.0) {
    const double gap = predicted_rabi_gap(d, setup);
    if (!(gap > 0.0)) throw UsageError("--window needs a protocol with a predicted transfer time");
    const double centre = std::numbers::pi / gap;
    t_min = std::max(0.0, centre - o.window / 2.0);
    t_max = centre + o.window / 2.0;
  }
  if (!(o.dt > 0.0)) throw UsageError("--dt must be positive");
  if (t_max < t_min) t_max = t_min;
  const double span = (t_max - t_min) / o.dt;
  if (span + 1.0 > double(kMaxRows)) throw UsageError("time grid exceeds " + std::to_string(kMaxRows) + " rows");
  const long long steps = static_cast<long long>(std::floor(span + 1e-9));
  std::vector<double> times(steps + 1);
  for (long long i = 0; i <= steps; ++i) times[i] = t_min + static_cast<double>(i) * o.dt;

  const FidelityTrace trace = fidelity_trace(d, setup, times, o.jobs);
  Sink sink(o.output, out);
  write_trace_csv(*sink, trace);
  return kExitOk;
}

SweepRequest sweep_request(const Options& o) {
  return {protocol_kind(o), o.n_list, o.xi_list, o.threshold, o.t_max, o.jobs};
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto points = sweep(sweep_request(o));
  Sink sink(o.output, out);
  write_sweep_csv(*sink, points);
  int failures = 0;
  for (const auto& p : points) {
    if (!p.error.empty()) {
      err << "N=" << p.n_sites << " xi=" << format_number(p.xi) << ": " << p.error << '\n';
      ++failures;
    }
  }
  return failures == 0 ? kExitOk : kExitNumerical;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream s(line);
  std::string cell;
  while (std::getline(s, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::vector<SweepPoint> read_sweep_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 9 || line.rfind("protocol,N,xi", 0) != 0) {
    throw UsageError("'" + path + "' is not a sweep CSV");
  }
  std::vector<SweepPoint> points;
  for (int row = 2; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    try {
      if (c.size() != 9) throw std::invalid_argument("column count");
      const auto kind = parse_protocol(c[0]);
      if (!kind) throw std::invalid_argument("protocol");
      SweepPoint p{*kind, std::stoi(c[1]), std::stod(c[2]), {}, {}};
      p.result.threshold = std::stod(c[3]);
      p.result.reached = c[8] == "true";
      if (p.result.reached) {
        p.result.tau = std::stod(c[4]);
        p.result.fbar_at_tau = std::stod(c[5]);
      }
      points.push_back(p);
    } catch (const std::exception&) {
      throw UsageError("malformed sweep CSV row " + std::to_string(row));
    }
  }
  return points;
}

int cmd_fit(const Options& o, std::ostream& out) {
  SweepAxis axis;
  if (o.axis == "xi") {
    axis = SweepAxis::Xi;
  } else if (o.axis == "n") {
    axis = SweepAxis::N;
  } else {
    throw UsageError("--axis must be 'xi' or 'n'");
  }
  FitModel model;
  if (o.model == "power") {
    model = FitModel::PowerLaw;
  } else if (o.model == "exp") {
    model = FitModel::Exponential;
  } else {
    throw UsageError("--model must be 'power' or 'exp'");
  }
  const auto points = o.input.empty() ? sweep(sweep_request(o)) : read_sweep_csv(o.input);
  if (points.empty()) throw Error(ErrorCode::DegenerateSamples, "no sweep points to fit");
  const ScalingFit fit = fit_sweep(points, axis, model);
  Sink sink(o.output, out);
  *sink << fit_json(fit) << '\n';
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  ed::EquivalenceOptions opts{o.verify_n_min, o.verify_n_max, o.verify_samples, o.verify_t_window,
                              o.verify_seed};
  const ed::EquivalenceReport r = ed::run_equivalence(opts);
  const double worst = std::max({r.max_dev_single, r.max_dev_pair, r.max_dev_fidelity, r.max_norm_error});
  const bool pass = worst <= o.verify_tolerance;
  ordered_json j;
  j["cases"] = r.cases;
  j["max_dev_single"] = round_to_output(r.max_dev_single);
  j["max_dev_pair"] = round_to_output(r.max_dev_pair);
  j["max_dev_fidelity"] = round_to_output(r.max_dev_fidelity);
  j["max_norm_error"] = round_to_output(r.max_norm_error);
  j["max_deviation"] = round_to_output(worst);
  j["tolerance"] = o.verify_tolerance;
  j["pass"] = pass;
  Sink sink(o.output, out);
  *sink << j.dump() << '\n';
  if (!pass) err << "oracle deviation " << format_number(worst) << " exceeds tolerance\n";
  return pass ? kExitOk : kExitNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{
      "Quantum state transfer through XX spin chains.\n"
      "All energies and times are in units of the bulk coupling J = 1 (hbar = 1).",
      "qst"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file ('#' comments); command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--protocol", o.protocol,
                 "uniform | weak-edge-1q | barrier-edge-1q | barrier-nn-1q | weak-block-2q | barrier-block-2q")
      ->capture_default_str();
  app.add_option("--n", o.n, "chain length N (required by spectrum and evolve)");
  app.add_option("--xi", o.xi, "perturbation: J0 for weak protocols, barrier field otherwise")
      ->capture_default_str();
  app.add_option("--threshold", o.threshold, "transfer fidelity threshold")->capture_default_str();
  app.add_option("--t-min", o.t_min, "first time of the evolve grid")->capture_default_str();
  app.add_option("--t-max", o.t_max,
                 "evolve: last grid time (0 gives a single row); sweep/fit: search window, 0 = automatic")
      ->capture_default_str();
  app.add_option("--dt", o.dt, "evolve grid step")->capture_default_str();
  app.add_option("--window", o.window, "evolve: grid of this width centred on pi/dw (overrides --t-min/--t-max)");
  app.add_option("--qubits", o.qubits, "1 or 2; default follows the protocol");
  app.add_option("--senders", o.senders, "explicit sender sites, e.g. 1,2")->delimiter(',');
  app.add_option("--receivers", o.receivers, "explicit receiver sites, e.g. 11,12")->delimiter(',');
  app.add_option("--n-list", o.n_list, "sweep chain lengths, comma separated")->delimiter(',');
  app.add_option("--xi-list", o.xi_list, "sweep perturbations, comma separated")->delimiter(',');
  app.add_option("-o,--output", o.output, "output file, '-' for stdout")->capture_default_str();
  app.add_option("--jobs", o.jobs, "worker threads; output does not depend on it")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, localization weights and spectral class");
  spectrum->add_option("--report", o.report, "write the class JSON here instead of stderr");
  auto* evolve = app.add_subcommand("evolve", "average fidelity trace on a time grid");
  auto* sweep_cmd = app.add_subcommand("sweep", "transfer times over an N x xi grid");
  auto* fit = app.add_subcommand("fit", "power-law or exponential fit of transfer times");
  fit->add_option("--input", o.input, "sweep CSV to fit; otherwise the sweep is run first");
  fit->add_option("--axis", o.axis, "xi | n")->capture_default_str();
  fit->add_option("--model", o.model, "power | exp")->capture_default_str();
  auto* verify = app.add_subcommand("verify", "compare the fast path with exact diagonalisation");
  verify->add_option("--n-min", o.verify_n_min)->capture_default_str();
  verify->add_option("--n-max", o.verify_n_max)->capture_default_str();
  verify->add_option("--samples", o.verify_samples, "random times per chain")->capture_default_str();
  verify->add_option("--time-window", o.verify_t_window, "times drawn from [0, this]")->capture_default_str();
  verify->add_option("--seed", o.verify_seed)->capture_default_str();
  verify->add_option("--tolerance", o.verify_tolerance)->capture_default_str();
  for (auto* sub : {spectrum, evolve, sweep_cmd, fit, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*spectrum) return cmd_spectrum(o, app, out, err);
    if (*evolve) return cmd_evolve(o, app, out);
    if (*sweep_cmd) return cmd_sweep(o, out, err);
    if (*fit) return cmd_fit(o, out);
    if (*verify) return cmd_verify(o, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_numerical() ? kExitNumerical : kExitUsage;
  }
  return kExitUsage;
}

}  // namespace qst::cli

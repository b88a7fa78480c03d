#include "radiographer/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "radiographer/config.hpp"
#include "radiographer/errors.hpp"
#include "radiographer/evaluation.hpp"
#include "radiographer/locator.hpp"
#include "radiographer/numfmt.hpp"
#include "radiographer/pipeline.hpp"
#include "radiographer/simulator.hpp"

namespace radiographer {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;
  std::optional<int> zone_order;
  std::optional<double> cell_size;
  std::optional<std::string> stream_density;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Run configuration file")->required();
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--tau", f.tau, "Device-free activation threshold (fraction)");
  cmd->add_option("--zone-order", f.zone_order, "Fresnel zone order for device-based detection");
  cmd->add_option("--cell-size", f.cell_size, "Grid cell size in meters");
  cmd->add_option("--stream-density", f.stream_density, "full or half");
  cmd->add_option("--out", f.out, "Output directory");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig c = load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.tau) c.detector.tau = *f.tau;
  if (f.zone_order) c.detector.zone_order = *f.zone_order;
  if (f.cell_size) c.cell_size = *f.cell_size;
  if (f.stream_density) c.density = parse_stream_density(*f.stream_density);
  if (f.out) c.out = *f.out;
  c.propagation.seed = c.seed;
  c.suite.seed = c.seed;
  validate(c);
  return c;
}

Topology topology_of(const RunConfig& c) {
  if (c.topology.empty()) throw InputError("configuration does not name a topology file");
  return load_topology(c.topology);
}

std::ofstream create(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

void prepare_out(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw InputError("cannot create output directory '" + c.out.string() + "': " + ec.message());
}

struct Dataset {
  Topology topology;
  std::vector<EpochWindows> epochs;
  std::vector<EpochLabel> labels;
};

Dataset load_dataset(const RunConfig& c) {
  Dataset d{topology_of(c), {}, {}};
  const fs::path dir = c.dataset_dir();
  const auto samples = load_rss_samples(dir / "rss.csv", d.topology);
  const auto fixes = load_fixes(dir / "fixes.csv", d.topology);
  d.labels = load_manifest(dir / "manifest.csv");
  d.epochs = windowize(d.topology, samples, fixes, c.epoch_len);
  return d;
}

std::uint64_t test_seed(const RunConfig& c) { return c.seed ^ 0x7e57'5e7dULL; }

void write_report(std::ostream& out, const RunConfig& c, const BuildReport& r) {
  write_config(out, c);
  out << "epochs = " << r.epochs << '\n';
  out << "stored = " << r.stored << '\n';
  out << "discarded_guest = " << r.discarded_guest << '\n';
  out << "skipped_no_fixes = " << r.skipped_no_fixes << '\n';
  out << "skipped_silence = " << r.skipped_silence << '\n';
}

std::string metric(const std::optional<double>& v) { return v ? format_number(*v) : "undefined"; }

int cmd_simulate(const CommonFlags& flags, std::ostream& out) {
  const RunConfig c = resolve(flags);
  const Topology topology = topology_of(c);
  const auto scenarios = standard_suite(topology, c.suite, c.simulation());
  const auto data = simulate_suite(topology, scenarios, c.propagation, c.simulation());
  const auto tests = simulate_test_points(topology, c.propagation, c.simulation(), c.test_points, c.test_duration, test_seed(c));

  prepare_out(c);
  {
    auto f = create(c.out / "topology.topo");
    write_topology(f, topology);
  }
  {
    auto f = create(c.out / "rss.csv");
    write_rss_samples(f, data.samples);
  }
  {
    auto f = create(c.out / "fixes.csv");
    write_fixes(f, data.fixes);
  }
  {
    auto f = create(c.out / "manifest.csv");
    write_manifest(f, data.labels);
  }
  {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < topology.link_count(); ++i) names.push_back(topology.link_name(i));
    std::vector<TestVector> vectors;
    for (const auto& t : tests) vectors.push_back({t.epoch, t.rss});
    auto f = create(c.out / "test_vectors.csv");
    write_test_vectors(f, names, vectors);
    auto g = create(c.out / "test_truth.csv");
    write_test_truth(g, tests);
  }

  const auto counts = count_scenarios(scenarios);
  std::ostringstream summary;
  summary << "one_host = " << counts.one_host << '\n'
          << "same_zone = " << counts.same_zone << '\n'
          << "different_zones = " << counts.different_zones << '\n'
          << "different_rooms = " << counts.different_rooms << '\n'
          << "silence = " << counts.silence << '\n'
          << "epochs = " << data.labels.size() << '\n'
          << "samples = " << data.samples.size() << '\n'
          << "fixes = " << data.fixes.size() << '\n'
          << "test_points = " << tests.size() << '\n';
  auto report = create(c.out / "simulate_report.txt");
  write_config(report, c);
  report << summary.str();
  out << summary.str();
  return kExitOk;
}

int cmd_build(const CommonFlags& flags, std::ostream& out) {
  const RunConfig c = resolve(flags);
  const Dataset d = load_dataset(c);
  const auto built = build_fingerprint(d.topology, d.epochs, silence_epochs(d.labels), c.pipeline());

  prepare_out(c);
  save_fingerprint(c.out / "fingerprint.txt", built.fingerprint);
  auto report = create(c.out / "build_report.txt");
  write_report(report, c, built.report);
  out << "records = " << built.fingerprint.records().size() << '\n';
  out << "stored = " << built.report.stored << '\n';
  out << "discarded_guest = " << built.report.discarded_guest << '\n';
  out << "skipped_no_fixes = " << built.report.skipped_no_fixes << '\n';
  out << "skipped_silence = " << built.report.skipped_silence << '\n';
  return kExitOk;
}

int cmd_localize(const CommonFlags& flags, const std::string& fingerprint_path, const std::string& vectors_path,
                 std::ostream& out) {
  const RunConfig c = resolve(flags);
  const fs::path fp_path = fingerprint_path.empty() ? c.out / "fingerprint.txt" : fs::path(fingerprint_path);
  const fs::path tv_path = vectors_path.empty() ? c.dataset_dir() / "test_vectors.csv" : fs::path(vectors_path);
  const Fingerprint fp = load_fingerprint(fp_path);
  const auto vectors = load_test_vectors(tv_path, fp.links());
  if (fp.empty()) throw PipelineError("fingerprint '" + fp_path.string() + "' has no records");

  std::ostringstream table;
  table << "epoch,cell_col,cell_row,x,y,distance\n";
  for (const auto& t : vectors) {
    const auto e = localize(fp, t);
    table << t.epoch << ',' << e.cell.col << ',' << e.cell.row << ',' << format_number(e.center.x) << ','
          << format_number(e.center.y) << ',' << format_number(e.distance) << '\n';
  }
  prepare_out(c);
  auto f = create(c.out / "estimates.csv");
  f << table.str();
  out << table.str();
  return kExitOk;
}

int cmd_evaluate(const CommonFlags& flags, std::ostream& out) {
  const RunConfig c = resolve(flags);
  const Dataset d = load_dataset(c);
  const auto built = build_fingerprint(d.topology, d.epochs, silence_epochs(d.labels), c.pipeline());
  const auto pr = precision_recall(built.decisions, index_labels(d.labels));

  std::ostringstream summary;
  summary << "stored_correct = " << pr.counts.stored_correct << '\n'
          << "stored_wrong = " << pr.counts.stored_wrong << '\n'
          << "discarded_correct = " << pr.counts.discarded_correct << '\n'
          << "discarded_wrong = " << pr.counts.discarded_wrong << '\n'
          << "precision = " << metric(pr.precision) << '\n'
          << "recall = " << metric(pr.recall) << '\n';

  prepare_out(c);
  const fs::path tv_path = c.dataset_dir() / "test_vectors.csv";
  const fs::path truth_path = c.dataset_dir() / "test_truth.csv";
  if (fs::exists(tv_path) && fs::exists(truth_path)) {
    const auto vectors = load_test_vectors(tv_path, built.fingerprint.links());
    std::ifstream truth_in(truth_path);
    const auto truth = read_test_truth(truth_in, truth_path.string());
    std::vector<LabeledTestVector> tests;
    for (const auto& v : vectors) {
      const auto it = truth.find(v.epoch);
      if (it == truth.end()) throw InputError("test vector epoch " + std::to_string(v.epoch) + " has no ground truth");
      tests.push_back({v, it->second});
    }
    if (!tests.empty() && !built.fingerprint.empty()) {
      const auto links = select_links(d.topology, c.density);
      const auto manual = build_manual_fingerprint(d.topology, links, built.fingerprint.grid(), c.propagation, c.detector);
      const auto cmp = compare_fingerprints(built.fingerprint, manual, tests);
      summary << "crowdsourced_median_m = " << format_number(cmp.crowdsourced_median) << '\n'
              << "manual_median_m = " << format_number(cmp.manual_median) << '\n'
              << "median_gap_m = " << format_number(cmp.median_gap) << '\n';
      auto a = create(c.out / "cdf_crowdsourced.csv");
      write_cdf_csv(a, cdf(cmp.crowdsourced_errors));
      auto b = create(c.out / "cdf_manual.csv");
      write_cdf_csv(b, cdf(cmp.manual_errors));
    }
  }

  auto report = create(c.out / "evaluation.txt");
  write_report(report, c, built.report);
  report << summary.str();
  out << summary.str();
  return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::string& param, const std::vector<std::string>& values, std::ostream& out) {
  const RunConfig c = resolve(flags);
  SweepSpec spec;
  spec.parameter = parse_sweep_parameter(param);
  spec.fixed = c.pipeline();
  if (values.empty()) {
    spec.values = default_sweep_values(spec.parameter);
  } else {
    for (const auto& v : values) {
      if (v == "full" || v == "half") spec.values.push_back(density_fraction(parse_stream_density(v)));
      else {
        try {
          spec.values.push_back(parse_number(v));
        } catch (const std::invalid_argument& e) {
          throw InputError(std::string("--values: ") + e.what());
        }
      }
    }
  }
  validate(spec);
  const Dataset d = load_dataset(c);
  const auto result = run_sweep(spec, d.topology, d.epochs, d.labels);

  prepare_out(c);
  const std::string stem = "sweep_" + to_string(spec.parameter);
  std::ostringstream table, verdict;
  write_sweep_csv(table, result);
  write_sweep_verdict(verdict, result);
  auto f = create(c.out / (stem + ".csv"));
  f << table.str();
  auto g = create(c.out / (stem + "_verdict.txt"));
  g << verdict.str();
  out << table.str() << verdict.str();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crowdsourced device-free fingerprint construction and evaluation", "radiographer"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string fingerprint_path, vectors_path, sweep_param;
  std::vector<std::string> sweep_values;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset and manifest");
  auto* build = app.add_subcommand("build-fingerprint", "Construct the fingerprint from a dataset");
  auto* loc = app.add_subcommand("localize", "Estimate locations for test vectors");
  auto* evaluate = app.add_subcommand("evaluate", "Precision/recall and localization error CDFs");
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep with trend verdicts");
  for (auto* cmd : {simulate, build, loc, evaluate, sweep}) add_common(cmd, flags);
  loc->add_option("--fingerprint", fingerprint_path, "Fingerprint file (default <out>/fingerprint.txt)");
  loc->add_option("--vectors", vectors_path, "Test-vector CSV (default <dataset>/test_vectors.csv)");
  sweep->add_option("--param", sweep_param, "tau, zone_order or stream_density")->required();
  sweep->add_option("--values", sweep_values, "Values to sweep (comma separated)")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    const int code = app.exit(e, out, msg);
    err << msg.str();
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(flags, out);
    if (build->parsed()) return cmd_build(flags, out);
    if (loc->parsed()) return cmd_localize(flags, fingerprint_path, vectors_path, out);
    if (evaluate->parsed()) return cmd_evaluate(flags, out);
    if (sweep->parsed()) return cmd_sweep(flags, sweep_param, sweep_values, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const PipelineError& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipeline;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
  return kExitInput;
}

}  // namespace radiographer

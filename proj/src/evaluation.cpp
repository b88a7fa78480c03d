#include "radiographer/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <ostream>

#include "radiographer/errors.hpp"
#include "radiographer/numfmt.hpp"

namespace radiographer {

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::string metric_text(const std::optional<double>& v) { return v ? format_number(*v) : "undefined"; }

}  // namespace

PrecisionRecall precision_recall(std::span<const EpochDecision> decisions, const std::map<std::int64_t, EpochLabel>& labels) {
  PrecisionRecall r;
  for (const auto& d : decisions) {
    const bool stored = d.outcome == EpochOutcome::stored;
    if (!stored && d.outcome != EpochOutcome::discarded_guest) continue;
    const auto it = labels.find(d.epoch);
    if (it == labels.end()) throw PipelineError("epoch " + std::to_string(d.epoch) + " has no label");
    const bool expected = it->second.expected_stored;
    if (stored) (expected ? r.counts.stored_correct : r.counts.stored_wrong) += 1;
    else (expected ? r.counts.discarded_wrong : r.counts.discarded_correct) += 1;
  }
  const auto stored = r.counts.stored_correct + r.counts.stored_wrong;
  const auto expected = r.counts.stored_correct + r.counts.discarded_wrong;
  if (stored > 0) r.precision = static_cast<double>(r.counts.stored_correct) / static_cast<double>(stored);
  if (expected > 0) r.recall = static_cast<double>(r.counts.stored_correct) / static_cast<double>(expected);
  return r;
}

std::map<std::int64_t, EpochLabel> index_labels(std::span<const EpochLabel> labels) {
  std::map<std::int64_t, EpochLabel> out;
  for (const auto& l : labels) {
    if (!out.emplace(l.epoch, l).second) throw InputError("manifest lists epoch " + std::to_string(l.epoch) + " twice");
  }
  return out;
}

std::set<std::int64_t> silence_epochs(std::span<const EpochLabel> labels) {
  std::set<std::int64_t> out;
  for (const auto& l : labels)
    if (l.silence) out.insert(l.epoch);
  return out;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::string to_string(Trend trend) {
  switch (trend) {
    case Trend::increasing: return "increasing";
    case Trend::decreasing: return "decreasing";
    case Trend::flat: return "flat";
    case Trend::insufficient_points: return "insufficient points";
  }
  return "unknown";
}

Trend trend_of(std::span<const double> values, std::span<const std::optional<double>> metric) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < values.size() && i < metric.size(); ++i) {
    if (!metric[i]) continue;
    x.push_back(values[i]);
    y.push_back(*metric[i]);
  }
  if (x.size() < 2) return Trend::insufficient_points;
  const auto rho = spearman(x, y);
  if (!rho || *rho == 0.0) return Trend::flat;
  return *rho > 0.0 ? Trend::increasing : Trend::decreasing;
}

SweepParameter parse_sweep_parameter(const std::string& text) {
  if (text == "tau") return SweepParameter::tau;
  if (text == "zone_order" || text == "zone-order") return SweepParameter::zone_order;
  if (text == "stream_density" || text == "stream-density") return SweepParameter::stream_density;
  throw InputError("unknown sweep parameter '" + text + "' (tau, zone_order, stream_density)");
}

std::string to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::tau: return "tau";
    case SweepParameter::zone_order: return "zone_order";
    case SweepParameter::stream_density: return "stream_density";
  }
  return "unknown";
}

std::vector<double> default_sweep_values(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::tau: {
      std::vector<double> v;
      for (int i = 0; i <= 10; ++i) v.push_back(i / 40.0);
      return v;
    }
    case SweepParameter::zone_order: return {1, 2, 3, 4, 5, 6, 7, 8, 9};
    case SweepParameter::stream_density: return {0.5, 1.0};
  }
  return {};
}

void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw InputError("sweep needs at least one value");
  for (double v : spec.values) {
    switch (spec.parameter) {
      case SweepParameter::tau:
        if (!(v >= 0.0 && v <= 0.25)) throw InputError("tau sweep value " + format_number(v) + " outside [0, 0.25]");
        break;
      case SweepParameter::zone_order:
        if (!(v >= 1.0 && v <= 9.0 && v == std::floor(v)))
          throw InputError("zone_order sweep value " + format_number(v) + " is not an integer in [1, 9]");
        break;
      case SweepParameter::stream_density:
        density_from_fraction(v);
        break;
    }
  }
}

SweepResult run_sweep(const SweepSpec& spec, const Topology& topology, std::span<const EpochWindows> epochs,
                      std::span<const EpochLabel> labels) {
  validate(spec);
  const auto indexed = index_labels(labels);
  const auto silent = silence_epochs(labels);

  auto run_one = [&](double value) {
    PipelineOptions options = spec.fixed;
    switch (spec.parameter) {
      case SweepParameter::tau: options.detector.tau = value; break;
      case SweepParameter::zone_order: options.detector.zone_order = static_cast<int>(value); break;
      case SweepParameter::stream_density: options.density = density_from_fraction(value); break;
    }
    try {
      const auto built = build_fingerprint(topology, epochs, silent, options);
      return precision_recall(built.decisions, indexed);
    } catch (const std::exception& e) {
      throw PipelineError("sweep " + to_string(spec.parameter) + "=" + format_number(value) + " failed: " + e.what());
    }
  };

  std::vector<std::future<PrecisionRecall>> pending;
  for (double v : spec.values) pending.push_back(std::async(std::launch::async, run_one, v));

  SweepResult result{spec.parameter, {}, Trend::insufficient_points, Trend::insufficient_points, {}, {}};
  for (std::size_t i = 0; i < pending.size(); ++i) result.rows.push_back({spec.values[i], pending[i].get()});

  std::vector<std::optional<double>> precision, recall;
  for (const auto& row : result.rows) {
    precision.push_back(row.metrics.precision);
    recall.push_back(row.metrics.recall);
  }
  result.precision_trend = trend_of(spec.values, precision);
  result.recall_trend = trend_of(spec.values, recall);

  auto rho = [&](const std::vector<std::optional<double>>& metric) -> std::optional<double> {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < metric.size(); ++i)
      if (metric[i]) x.push_back(spec.values[i]), y.push_back(*metric[i]);
    return spearman(x, y);
  };
  result.precision_rho = rho(precision);
  result.recall_rho = rho(recall);
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "value,precision,recall\n";
  for (const auto& row : result.rows)
    out << format_number(row.value) << ',' << metric_text(row.metrics.precision) << ',' << metric_text(row.metrics.recall) << '\n';
}

void write_sweep_verdict(std::ostream& out, const SweepResult& result) {
  out << "parameter " << to_string(result.parameter) << '\n';
  out << "precision " << to_string(result.precision_trend) << " spearman " << metric_text(result.precision_rho) << '\n';
  out << "recall " << to_string(result.recall_trend) << " spearman " << metric_text(result.recall_rho) << '\n';
}

Fingerprint build_manual_fingerprint(const Topology& topology, std::span<const std::size_t> links, const Grid& grid,
                                     const PropagationParams& prop, const DetectorParams& params) {
  std::vector<std::string> names;
  for (auto link : links) names.push_back(topology.link_name(link));
  Fingerprint fp(grid, names, params);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const CellIndex cell = grid.cell_at(i);
    const Point2D person = grid.center(cell);
    if (!topology.in_bounds(person)) continue;
    EpochVector v;
    for (auto link : links) v.emplace_back(expected_rss(topology, link, std::span(&person, 1), prop));
    fp.fold(cell, v);
  }
  return fp;
}

double median(std::vector<double> values) {
  if (values.empty()) throw PipelineError("median of an empty set");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

FingerprintComparison compare_fingerprints(const Fingerprint& crowdsourced, const Fingerprint& manual,
                                           std::span<const LabeledTestVector> tests) {
  if (!(crowdsourced.grid() == manual.grid())) throw PipelineError("fingerprints use different grids");
  if (crowdsourced.links() != manual.links()) throw PipelineError("fingerprints use different link orderings");
  if (tests.empty()) throw PipelineError("no test vectors to compare on");

  FingerprintComparison c;
  for (const auto& t : tests) {
    c.crowdsourced_errors.push_back(localization_error(localize(crowdsourced, t.vector), t.truth));
    c.manual_errors.push_back(localization_error(localize(manual, t.vector), t.truth));
  }
  std::sort(c.crowdsourced_errors.begin(), c.crowdsourced_errors.end());
  std::sort(c.manual_errors.begin(), c.manual_errors.end());
  c.crowdsourced_median = median(c.crowdsourced_errors);
  c.manual_median = median(c.manual_errors);
  c.median_gap = c.crowdsourced_median - c.manual_median;
  return c;
}

std::vector<std::pair<double, double>> cdf(std::vector<double> errors) {
  std::sort(errors.begin(), errors.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) out.emplace_back(errors[i], static_cast<double>(i + 1) / n);
  return out;
}

void write_cdf_csv(std::ostream& out, std::span<const std::pair<double, double>> table) {
  out << "error_m,cdf\n";
  for (const auto& [e, p] : table) out << format_number(e) << ',' << format_number(p) << '\n';
}

}  // namespace radiographer

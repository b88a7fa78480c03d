#include "radiographer/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "radiographer/errors.hpp"
#include "radiographer/numfmt.hpp"
#include "text.hpp"

namespace radiographer {

namespace {

std::vector<double> parse_list(std::string_view v) {
  std::vector<double> out;
  for (auto item : text::split_csv(v))
    if (!item.empty()) out.push_back(parse_number(item));
  return out;
}

int parse_int(std::string_view v) { return static_cast<int>(parse_integer(v)); }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir, const std::string& source) {
  RunConfig c;
  auto path = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_absolute() ? p : base_dir / p;
  };

  const std::map<std::string, std::function<void(std::string_view)>, std::less<>> setters{
      {"topology", [&](auto v) { c.topology = path(v); }},
      {"dataset", [&](auto v) { c.dataset = path(v); }},
      {"out", [&](auto v) { c.out = path(v); }},
      {"tau", [&](auto v) { c.detector.tau = parse_number(v); }},
      {"zone_order", [&](auto v) { c.detector.zone_order = parse_int(v); }},
      {"cell_size", [&](auto v) { c.cell_size = parse_number(v); }},
      {"epoch_len", [&](auto v) { c.epoch_len = parse_number(v); }},
      {"stream_density", [&](auto v) { c.density = parse_stream_density(std::string(v)); }},
      {"seed", [&](auto v) { c.seed = static_cast<std::uint64_t>(parse_integer(v)); }},
      {"rate", [&](auto v) { c.rate = parse_number(v); }},
      {"tx_power_dbm", [&](auto v) { c.propagation.tx_power_dbm = parse_number(v); }},
      {"ref_loss_db", [&](auto v) { c.propagation.ref_loss_db = parse_number(v); }},
      {"path_loss_exponent", [&](auto v) { c.propagation.path_loss_exponent = parse_number(v); }},
      {"noise_sigma", [&](auto v) { c.propagation.noise_sigma = parse_number(v); }},
      {"zone_attenuation", [&](auto v) { c.propagation.zone_attenuation = parse_list(v); }},
      {"suite_one_host", [&](auto v) { c.suite.one_host = parse_int(v); }},
      {"suite_same_zone", [&](auto v) { c.suite.same_zone = parse_int(v); }},
      {"suite_different_zones", [&](auto v) { c.suite.different_zones = parse_int(v); }},
      {"suite_different_rooms", [&](auto v) { c.suite.different_rooms = parse_int(v); }},
      {"suite_silence", [&](auto v) { c.suite.silence = parse_int(v); }},
      {"scenario_duration", [&](auto v) { c.suite.scenario_duration = parse_number(v); }},
      {"silence_duration", [&](auto v) { c.suite.silence_duration = parse_number(v); }},
      {"min_separation", [&](auto v) { c.suite.min_separation = parse_number(v); }},
      {"test_points", [&](auto v) { c.test_points = parse_int(v); }},
      {"test_duration", [&](auto v) { c.test_duration = parse_number(v); }},
  };

  std::string line;
  std::size_t line_no = 0;
  while (text::next_content_line(in, line, line_no)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const auto key = text::trim(std::string_view(line).substr(0, eq));
    const auto value = text::trim(std::string_view(line).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError(source, line_no, "unknown key '" + std::string(key) + "'");
    try {
      it->second(value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, line_no, std::string(key) + ": " + e.what());
    } catch (const InputError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  auto c = parse_config(in, path.parent_path(), path.string());
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  validate(c.detector);
  validate(c.propagation);
  if (!(c.cell_size > 0.0)) throw InputError("cell_size must be positive");
  if (!(c.epoch_len > 0.0)) throw InputError("epoch_len must be positive");
  if (!(c.rate > 0.0)) throw InputError("rate must be positive");
  if (c.test_points < 0) throw InputError("test_points must be >= 0");
  if (!(c.test_duration > 0.0)) throw InputError("test_duration must be positive");
  if (!(c.suite.scenario_duration > 0.0) || !(c.suite.silence_duration > 0.0)) throw InputError("scenario durations must be positive");
  if (c.suite.one_host < 0 || c.suite.same_zone < 0 || c.suite.different_zones < 0 || c.suite.different_rooms < 0 ||
      c.suite.silence < 0)
    throw InputError("suite scenario counts must be >= 0");
}

void write_config(std::ostream& out, const RunConfig& c) {
  out << "seed = " << c.seed << '\n';
  out << "tau = " << format_number(c.detector.tau) << '\n';
  out << "zone_order = " << c.detector.zone_order << '\n';
  out << "cell_size = " << format_number(c.cell_size) << '\n';
  out << "epoch_len = " << format_number(c.epoch_len) << '\n';
  out << "stream_density = " << to_string(c.density) << '\n';
  out << "rate = " << format_number(c.rate) << '\n';
  out << "tx_power_dbm = " << format_number(c.propagation.tx_power_dbm) << '\n';
  out << "ref_loss_db = " << format_number(c.propagation.ref_loss_db) << '\n';
  out << "path_loss_exponent = " << format_number(c.propagation.path_loss_exponent) << '\n';
  out << "noise_sigma = " << format_number(c.propagation.noise_sigma) << '\n';
  out << "zone_attenuation = " << join(c.propagation.zone_attenuation) << '\n';
  out << "suite_one_host = " << c.suite.one_host << '\n';
  out << "suite_same_zone = " << c.suite.same_zone << '\n';
  out << "suite_different_zones = " << c.suite.different_zones << '\n';
  out << "suite_different_rooms = " << c.suite.different_rooms << '\n';
  out << "suite_silence = " << c.suite.silence << '\n';
  out << "scenario_duration = " << format_number(c.suite.scenario_duration) << '\n';
  out << "silence_duration = " << format_number(c.suite.silence_duration) << '\n';
  out << "min_separation = " << format_number(c.suite.min_separation) << '\n';
  out << "test_points = " << c.test_points << '\n';
  out << "test_duration = " << format_number(c.test_duration) << '\n';
}

}  // namespace radiographer

// Command-line front end: Lyapunov exponent tables, density-of-states
// histograms, coupling-region reports, and the verification battery.
// Exit codes: 0 success, 1 computational or check failure, 2 usage/config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "harper/cocycle.hpp"
#include "harper/common.hpp"
#include "harper/errors.hpp"
#include "harper/green.hpp"
#include "harper/model.hpp"
#include "harper/spectrum.hpp"
#include "harper/verify.hpp"

namespace {

using json = nlohmann::ordered_json;
using harper::Complex;
using harper::Coupling;
using harper::HarperModel;
using harper::Index;
using harper::Real;

std::string format_real(Real value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char ch : field) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += '"';
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (const char ch : text) {
    if (ch == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  parts.push_back(current);
  return parts;
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

Real parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  const Real value = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw std::invalid_argument("expected a number for " + what + ", got '" + text + "'");
  }
  return value;
}

Index parse_index(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long long value = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw std::invalid_argument("expected an integer for " + what + ", got '" + text + "'");
  }
  return static_cast<Index>(value);
}

// "golden" resolves to (sqrt(5)-1)/2 at full precision; any decimal in (0,1)
// is accepted verbatim.
Real parse_alpha(const std::string& text) {
  if (trim(text) == "golden") return harper::golden_mean();
  return parse_real(text, "alpha");
}

// Writes `text` to the path, or to stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
  if (!out.flush()) throw std::runtime_error("failed writing output file '" + path + "'");
}

// ---------------------------------------------------------------------------
// le: energy / exponent / stderr table

struct EnergySpec {
  enum class Kind { spectrum, grid, list } kind = Kind::spectrum;
  Index count = 0;
  Real lo = 0.0;
  Real hi = 0.0;
  std::vector<Real> values;
};

// Forms: spectrum:K | grid:LO:HI:K | list:E1,E2,...
EnergySpec parse_energy_spec(const std::string& text) {
  const auto parts = split(text, ':');
  EnergySpec spec;
  if (parts.size() == 2 && parts[0] == "spectrum") {
    spec.kind = EnergySpec::Kind::spectrum;
    spec.count = parse_index(parts[1], "energy count");
    if (spec.count < 1) throw std::invalid_argument("energy count must be positive");
    return spec;
  }
  if (parts.size() == 4 && parts[0] == "grid") {
    spec.kind = EnergySpec::Kind::grid;
    spec.lo = parse_real(parts[1], "grid lower edge");
    spec.hi = parse_real(parts[2], "grid upper edge");
    spec.count = parse_index(parts[3], "grid size");
    if (spec.count < 1) throw std::invalid_argument("grid size must be positive");
    if (!(spec.hi >= spec.lo)) throw std::invalid_argument("grid needs hi >= lo");
    return spec;
  }
  if (parts.size() == 2 && parts[0] == "list") {
    spec.kind = EnergySpec::Kind::list;
    for (const auto& item : split(parts[1], ',')) {
      spec.values.push_back(parse_real(item, "energy list entry"));
    }
    spec.count = static_cast<Index>(spec.values.size());
    return spec;
  }
  throw std::invalid_argument("bad --energies '" + text +
                              "' (expected spectrum:K, grid:LO:HI:K, or list:E1,E2,...)");
}

struct LeOptions {
  Real l1 = 0.0, l2 = 0.0, l3 = 0.0;
  std::string alpha_text;
  Real theta = harper::kDefaultTheta;
  Index steps = 100000;
  std::string energies;
  Index truncation = 500;
  Index phases = 20;
  std::string output;
  std::string format = "csv";
};

int cmd_le(const LeOptions& opt) {
  const Coupling coupling(opt.l1, opt.l2, opt.l3);
  const Real alpha = parse_alpha(opt.alpha_text);
  const HarperModel model(coupling, alpha, opt.theta);
  const EnergySpec spec = parse_energy_spec(opt.energies);

  std::vector<Real> energies;
  switch (spec.kind) {
    case EnergySpec::Kind::spectrum: {
      const auto samples =
          harper::spectrum_samples(coupling, alpha, opt.truncation, opt.phases, spec.count);
      energies.assign(samples.begin(), samples.end());
      break;
    }
    case EnergySpec::Kind::grid:
      for (Index i = 0; i < spec.count; ++i) {
        energies.push_back(spec.count == 1
                               ? spec.lo
                               : spec.lo + (spec.hi - spec.lo) * static_cast<Real>(i) /
                                     static_cast<Real>(spec.count - 1));
      }
      break;
    case EnergySpec::Kind::list:
      energies = spec.values;
      break;
  }

  std::vector<Complex> zs(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) zs[i] = Complex(energies[i], 0.0);
  const auto points = harper::lyapunov_curve(model, zs, opt.steps);
  for (const auto& point : points) {
    if (!point.result) {
      std::cerr << "error: exponent at energy " << format_real(point.z.real())
                << " failed: " << point.error << "\n";
      return 1;
    }
  }

  std::string text;
  if (opt.format == "csv") {
    text = "energy,le,stderr\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      text += format_real(energies[i]) + "," + format_real(points[i].result->le_estimate) + "," +
              format_real(points[i].result->stderr_estimate) + "\n";
    }
  } else {
    json config = {{"command", "le"},
                   {"lambda1", coupling.lambda1},
                   {"lambda2", coupling.lambda2},
                   {"lambda3", coupling.lambda3},
                   {"alpha", alpha},
                   {"theta", opt.theta},
                   {"steps", opt.steps},
                   {"energies", opt.energies},
                   {"truncation", opt.truncation},
                   {"phases", opt.phases}};
    json results = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
      results.push_back({{"energy", energies[i]},
                         {"le", points[i].result->le_estimate},
                         {"stderr", points[i].result->stderr_estimate}});
    }
    text = json{{"config", config}, {"results", results}}.dump(2) + "\n";
  }
  emit(opt.output, text);
  return 0;
}

// ---------------------------------------------------------------------------
// dos: histogram of the pooled truncation eigenvalues

struct DosOptions {
  Real l1 = 0.0, l2 = 0.0, l3 = 0.0;
  std::string alpha_text;
  Index truncation = 500;
  Index phases = 20;
  Index bins = 256;
  std::string output;
  std::string raw_output;
  std::string format = "csv";
};

int cmd_dos(const DosOptions& opt) {
  const Coupling coupling(opt.l1, opt.l2, opt.l3);
  const Real alpha = parse_alpha(opt.alpha_text);
  const auto dos = harper::dos_estimate(coupling, alpha, opt.truncation, opt.phases, opt.bins);

  const json config = {{"command", "dos"},
                       {"lambda1", coupling.lambda1},
                       {"lambda2", coupling.lambda2},
                       {"lambda3", coupling.lambda3},
                       {"alpha", alpha},
                       {"truncation", opt.truncation},
                       {"phases", opt.phases},
                       {"bins", opt.bins}};

  std::string text;
  if (opt.format == "csv") {
    text = "bin_left,bin_right,mass\n";
    for (Index i = 0; i < dos.masses.size(); ++i) {
      text += format_real(dos.bin_edges[i]) + "," + format_real(dos.bin_edges[i + 1]) + "," +
              format_real(dos.masses[i]) + "\n";
    }
  } else {
    json results = json::array();
    for (Index i = 0; i < dos.masses.size(); ++i) {
      results.push_back({{"bin_left", dos.bin_edges[i]},
                         {"bin_right", dos.bin_edges[i + 1]},
                         {"mass", dos.masses[i]}});
    }
    text = json{{"config", config}, {"results", results}}.dump(2) + "\n";
  }
  emit(opt.output, text);

  if (!opt.raw_output.empty()) {
    std::string raw;
    if (opt.format == "csv") {
      raw = "eigenvalue\n";
      for (Index i = 0; i < dos.eigenvalues.size(); ++i) {
        raw += format_real(dos.eigenvalues[i]) + "\n";
      }
    } else {
      json results = json::array();
      for (Index i = 0; i < dos.eigenvalues.size(); ++i) {
        results.push_back({{"eigenvalue", dos.eigenvalues[i]}});
      }
      raw = json{{"config", config}, {"results", results}}.dump(2) + "\n";
    }
    emit(opt.raw_output, raw);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// regions: coupling classification, dual image, closed-form exponent

struct RegionsOptions {
  std::optional<Real> l1, l2, l3;
  std::string grid;  // CROSS_LO:CROSS_HI:NC:L2_LO:L2_HI:NL, l1 = l3 = cross/2
  std::string output;
  std::string format = "csv";
};

struct RegionRow {
  Coupling coupling;
  harper::Region region;
  Coupling dual;
  Real log_hopping_mean = 0.0;
  std::optional<Real> closed_le;
};

RegionRow region_row(const Coupling& coupling) {
  RegionRow row{coupling, harper::classify_region(coupling), harper::sigma_dual(coupling),
                harper::jensen_log_integral_closed(coupling), std::nullopt};
  if (row.region.tag != harper::RegionTag::III) row.closed_le = harper::closed_form_le(coupling);
  return row;
}

int cmd_regions(const RegionsOptions& opt) {
  std::vector<RegionRow> rows;
  const bool single = opt.grid.empty();
  if (single) {
    if (!opt.l1 || !opt.l2 || !opt.l3) {
      throw std::invalid_argument("regions needs --l1/--l2/--l3 or --grid");
    }
    rows.push_back(region_row(Coupling(*opt.l1, *opt.l2, *opt.l3)));
  } else {
    const auto parts = split(opt.grid, ':');
    if (parts.size() != 6) {
      throw std::invalid_argument("bad --grid (expected CROSS_LO:CROSS_HI:NC:L2_LO:L2_HI:NL)");
    }
    const Real cross_lo = parse_real(parts[0], "cross lower edge");
    const Real cross_hi = parse_real(parts[1], "cross upper edge");
    const Index nc = parse_index(parts[2], "cross grid size");
    const Real l2_lo = parse_real(parts[3], "lambda2 lower edge");
    const Real l2_hi = parse_real(parts[4], "lambda2 upper edge");
    const Index nl = parse_index(parts[5], "lambda2 grid size");
    if (nc < 1 || nl < 1) throw std::invalid_argument("grid sizes must be positive");
    if (cross_lo < 0.0 || l2_lo <= 0.0) {
      throw std::invalid_argument("grid needs cross >= 0 and lambda2 > 0");
    }
    for (Index i = 0; i < nc; ++i) {
      const Real cross = nc == 1 ? cross_lo
                                 : cross_lo + (cross_hi - cross_lo) * static_cast<Real>(i) /
                                       static_cast<Real>(nc - 1);
      for (Index j = 0; j < nl; ++j) {
        const Real l2 = nl == 1 ? l2_lo
                                : l2_lo + (l2_hi - l2_lo) * static_cast<Real>(j) /
                                      static_cast<Real>(nl - 1);
        rows.push_back(region_row(Coupling(cross / 2, l2, cross / 2)));
      }
    }
  }

  // One human-readable line for a single coupling on the terminal; tables otherwise.
  if (single && opt.output.empty() && opt.format == "csv") {
    const RegionRow& row = rows.front();
    std::string line = std::string("region ") + harper::to_string(row.region.tag);
    if (row.region.on_boundary) line += " (boundary)";
    line += ", dual=(" + format_real(row.dual.lambda1) + ", " + format_real(row.dual.lambda2) +
            ", " + format_real(row.dual.lambda3) + ")";
    line += ", log-hopping mean=" + format_real(row.log_hopping_mean);
    if (row.closed_le) line += ", LE=" + format_real(*row.closed_le);
    else line += ", LE: no closed form (self-dual region)";
    std::cout << line << "\n";
    return 0;
  }

  std::string text;
  if (opt.format == "csv") {
    text =
        "lambda1,lambda2,lambda3,region,on_boundary,dual_lambda1,dual_lambda2,dual_lambda3,"
        "log_hopping_mean,closed_form_le\n";
    for (const auto& row : rows) {
      text += format_real(row.coupling.lambda1) + "," + format_real(row.coupling.lambda2) + "," +
              format_real(row.coupling.lambda3) + "," + harper::to_string(row.region.tag) + "," +
              (row.region.on_boundary ? "true" : "false") + "," + format_real(row.dual.lambda1) +
              "," + format_real(row.dual.lambda2) + "," + format_real(row.dual.lambda3) + "," +
              format_real(row.log_hopping_mean) + "," +
              (row.closed_le ? format_real(*row.closed_le) : "") + "\n";
    }
  } else {
    json results = json::array();
    for (const auto& row : rows) {
      json entry = {{"lambda1", row.coupling.lambda1},
                    {"lambda2", row.coupling.lambda2},
                    {"lambda3", row.coupling.lambda3},
                    {"region", harper::to_string(row.region.tag)},
                    {"on_boundary", row.region.on_boundary},
                    {"dual_lambda1", row.dual.lambda1},
                    {"dual_lambda2", row.dual.lambda2},
                    {"dual_lambda3", row.dual.lambda3},
                    {"log_hopping_mean", row.log_hopping_mean}};
      if (row.closed_le) entry["closed_form_le"] = *row.closed_le;
      else entry["closed_form_le"] = nullptr;
      results.push_back(entry);
    }
    json config = {{"command", "regions"}};
    if (!opt.grid.empty()) config["grid"] = opt.grid;
    text = json{{"config", config}, {"results", results}}.dump(2) + "\n";
  }
  emit(opt.output, text);
  return 0;
}

// ---------------------------------------------------------------------------
// verify: the check battery

struct VerifyOptions {
  std::string config_path;
  std::string output;
  std::string format;
};

// Flat key = value lines, one per line, '#' comments. Unknown keys are
// rejected by name so typos fail loudly.
void load_config_file(const std::string& path, harper::VerificationConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::string offending;
  const auto flag = [&offending](const std::string& key) {
    if (!offending.empty()) offending += ", ";
    offending += key;
  };
  Real l1 = config.coupling.lambda1;
  Real l2 = config.coupling.lambda2;
  Real l3 = config.coupling.lambda3;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      flag("line " + std::to_string(lineno));
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    try {
      if (key == "lambda1") l1 = parse_real(value, key);
      else if (key == "lambda2") l2 = parse_real(value, key);
      else if (key == "lambda3") l3 = parse_real(value, key);
      else if (key == "alpha") config.alpha = parse_alpha(value);
      else if (key == "theta") config.theta = parse_real(value, key);
      else if (key == "truncation") config.truncation = parse_index(value, key);
      else if (key == "phases") config.phases = parse_index(value, key);
      else if (key == "steps") config.steps = parse_index(value, key);
      else if (key == "depth") config.depth = parse_index(value, key);
      else if (key == "energy_count") config.energy_count = parse_index(value, key);
      else if (key == "output_path") config.output_path = value;
      else if (key == "format") config.format = value;
      else if (key == "battery") {
        config.battery.clear();
        for (const auto& name : split(value, ',')) {
          const std::string trimmed = trim(name);
          if (!trimmed.empty()) config.battery.push_back(trimmed);
        }
      } else if (key.rfind("tolerance.", 0) == 0) {
        config.tolerances[key.substr(10)] = parse_real(value, key);
      } else {
        flag(key);
      }
    } catch (const std::invalid_argument&) {
      flag(key);
    }
  }
  try {
    config.coupling = Coupling(l1, l2, l3);
  } catch (const std::invalid_argument&) {
    flag("lambda1/lambda2/lambda3");
  }
  if (!offending.empty()) {
    throw std::invalid_argument("bad config keys in '" + path + "': " + offending);
  }
}

std::string join_reals(const std::vector<Real>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ";";
    out += format_real(values[i]);
  }
  return out;
}

// runtime_seconds is deliberately left out of the files (identical configs
// must produce byte-identical outputs); it is shown on the terminal instead.
std::string verify_report_text(const harper::VerificationConfig& config,
                               const std::vector<harper::CheckReport>& reports) {
  if (config.format == "csv") {
    std::string text = "name,passed,max_abs_residual,tolerance,seed,measured,expected,note\n";
    for (const auto& report : reports) {
      text += csv_escape(report.name) + "," + (report.passed ? "true" : "false") + "," +
              format_real(report.max_abs_residual) + "," + format_real(report.tolerance) + "," +
              std::to_string(report.seed) + "," + csv_escape(join_reals(report.measured)) + "," +
              csv_escape(join_reals(report.expected)) + "," + csv_escape(report.note) + "\n";
    }
    return text;
  }
  json config_json = {{"lambda1", config.coupling.lambda1},
                      {"lambda2", config.coupling.lambda2},
                      {"lambda3", config.coupling.lambda3},
                      {"alpha", config.alpha},
                      {"theta", config.theta},
                      {"truncation", config.truncation},
                      {"phases", config.phases},
                      {"steps", config.steps},
                      {"depth", config.depth},
                      {"energy_count", config.energy_count},
                      {"battery", config.battery},
                      {"format", config.format},
                      {"output_path", config.output_path}};
  json tolerances = json::object();
  for (const auto& [name, tolerance] : config.tolerances) tolerances[name] = tolerance;
  config_json["tolerances"] = tolerances;
  json results = json::array();
  for (const auto& report : reports) {
    json inputs = json::object();
    for (const auto& [key, value] : report.inputs) inputs[key] = value;
    results.push_back({{"name", report.name},
                       {"passed", report.passed},
                       {"max_abs_residual", report.max_abs_residual},
                       {"tolerance", report.tolerance},
                       {"seed", report.seed},
                       {"inputs", inputs},
                       {"measured", report.measured},
                       {"expected", report.expected},
                       {"note", report.note}});
  }
  return json{{"config", config_json}, {"results", results}}.dump(2) + "\n";
}

int cmd_verify(const VerifyOptions& opt) {
  harper::VerificationConfig config;
  if (!opt.config_path.empty()) load_config_file(opt.config_path, config);
  if (!opt.output.empty()) config.output_path = opt.output;
  if (!opt.format.empty()) config.format = opt.format;
  harper::validate_config(config);  // invalid_argument -> exit 2

  const auto reports = harper::full_report(config);
  bool all_passed = true;
  Real total_runtime = 0.0;
  for (const auto& report : reports) {
    all_passed = all_passed && report.passed;
    total_runtime += report.runtime_seconds;
    std::printf("[%s] %-20s residual %.3e  tolerance %.3e  %.2fs\n",
                report.passed ? "PASS" : "FAIL", report.name.c_str(), report.max_abs_residual,
                report.tolerance, report.runtime_seconds);
    if (!report.passed && !report.note.empty()) {
      std::printf("       %s\n", report.note.c_str());
    }
  }
  std::printf("%zu checks, %s, %.2fs total\n", reports.size(),
              all_passed ? "all passed" : "FAILURES", total_runtime);

  if (!config.output_path.empty()) {
    emit(config.output_path, verify_report_text(config, reports));
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extended Harper model: Lyapunov exponents, density of states, duality checks"};
  app.require_subcommand(1);

  LeOptions le;
  auto* le_cmd = app.add_subcommand("le", "Lyapunov exponent table over sampled energies");
  le_cmd->add_option("--l1", le.l1, "coupling lambda1 (>= 0)")->required();
  le_cmd->add_option("--l2", le.l2, "coupling lambda2 (>= 0)")->required();
  le_cmd->add_option("--l3", le.l3, "coupling lambda3 (>= 0)")->required();
  le_cmd->add_option("--alpha", le.alpha_text, "frequency in (0,1), or 'golden'")->required();
  le_cmd->add_option("--theta", le.theta, "phase in [0,1)");
  le_cmd->add_option("--steps", le.steps, "cocycle steps per energy")
      ->check(CLI::PositiveNumber);
  le_cmd->add_option("--energies", le.energies, "spectrum:K | grid:LO:HI:K | list:E1,E2,...")
      ->required();
  le_cmd->add_option("--truncation", le.truncation, "sites per truncation for spectrum sampling")
      ->check(CLI::PositiveNumber);
  le_cmd->add_option("--phases", le.phases, "phase grid for spectrum sampling")
      ->check(CLI::PositiveNumber);
  le_cmd->add_option("--output", le.output, "output file (default: stdout)");
  le_cmd->add_option("--format", le.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  DosOptions dos;
  auto* dos_cmd = app.add_subcommand("dos", "density-of-states histogram");
  dos_cmd->add_option("--l1", dos.l1, "coupling lambda1 (>= 0)")->required();
  dos_cmd->add_option("--l2", dos.l2, "coupling lambda2 (>= 0)")->required();
  dos_cmd->add_option("--l3", dos.l3, "coupling lambda3 (>= 0)")->required();
  dos_cmd->add_option("--alpha", dos.alpha_text, "frequency in (0,1), or 'golden'")->required();
  dos_cmd->add_option("--truncation", dos.truncation, "sites per truncated operator")
      ->check(CLI::PositiveNumber);
  dos_cmd->add_option("--phases", dos.phases, "number of phase draws")
      ->check(CLI::PositiveNumber);
  dos_cmd->add_option("--bins", dos.bins, "histogram bin count")->check(CLI::PositiveNumber);
  dos_cmd->add_option("--output", dos.output, "output file (default: stdout)");
  dos_cmd->add_option("--raw-output", dos.raw_output, "also write the raw eigenvalue pool here");
  dos_cmd->add_option("--format", dos.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  RegionsOptions regions;
  auto* regions_cmd =
      app.add_subcommand("regions", "coupling region, dual image, closed-form exponent");
  double r1 = 0, r2 = 0, r3 = 0;
  auto* r1_opt = regions_cmd->add_option("--l1", r1, "coupling lambda1 (>= 0)");
  auto* r2_opt = regions_cmd->add_option("--l2", r2, "coupling lambda2 (>= 0)");
  auto* r3_opt = regions_cmd->add_option("--l3", r3, "coupling lambda3 (>= 0)");
  regions_cmd->add_option("--grid", regions.grid,
                          "CROSS_LO:CROSS_HI:NC:L2_LO:L2_HI:NL grid over (l1+l3, l2), l1=l3");
  regions_cmd->add_option("--output", regions.output, "output file (default: stdout)");
  regions_cmd->add_option("--format", regions.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "run the verification battery");
  verify_cmd->add_option("--config", verify.config_path, "flat key = value config file");
  verify_cmd->add_option("--output", verify.output, "report file (overrides output_path)");
  verify_cmd->add_option("--format", verify.format, "csv or json (overrides config)")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return 2;
  }

  try {
    if (le_cmd->parsed()) return cmd_le(le);
    if (dos_cmd->parsed()) return cmd_dos(dos);
    if (regions_cmd->parsed()) {
      if (r1_opt->count() > 0) regions.l1 = r1;
      if (r2_opt->count() > 0) regions.l2 = r2;
      if (r3_opt->count() > 0) regions.l3 = r3;
      return cmd_regions(regions);
    }
    if (verify_cmd->parsed()) return cmd_verify(verify);
  } catch (const std::invalid_argument& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 2;
}

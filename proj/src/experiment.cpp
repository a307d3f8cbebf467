#include "noma/experiment.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "noma/errors.hpp"

namespace noma {

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  throw ConfigError("line " + std::to_string(line_of(node)) + ": " + what, line_of(node));
}

void expect_keys(const YAML::Node& map, const std::set<std::string>& allowed, const char* where) {
  if (!map.IsMap()) fail(map, std::string(where) + " must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& node, const char* field) {
  if (!node.IsScalar()) fail(node, std::string(field) + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "invalid value '" + node.Scalar() + "' for " + field);
  }
}

double number(const YAML::Node& node, const char* field) {
  const double v = scalar<double>(node, field);
  if (!std::isfinite(v)) fail(node, std::string(field) + " must be finite");
  return v;
}

std::vector<double> numbers(const YAML::Node& node, const char* field) {
  if (!node.IsSequence()) fail(node, std::string(field) + " must be a list");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(number(v, field));
  return out;
}

template <class E, class Parse>
E enum_field(const YAML::Node& node, const char* field, Parse parse) {
  const auto text = scalar<std::string>(node, field);
  const auto v = parse(text);
  if (!v) fail(node, "unknown " + std::string(field) + " '" + text + "'");
  return *v;
}

SymbolId parse_symbol(const YAML::Node& node) {
  const auto text = scalar<std::string>(node, "symbol");
  unsigned idx = 0;
  if (text.size() < 2 || text[0] != 'x' ||
      std::from_chars(text.data() + 1, text.data() + text.size(), idx).ec != std::errc{} ||
      idx == 0) {
    fail(node, "symbols are written x1, x2, ...; got '" + text + "'");
  }
  return SymbolId{idx - 1};
}

std::vector<DecodingOrder> parse_plans(const YAML::Node& node) {
  if (!node.IsSequence()) fail(node, "decoding_plans must be a list of symbol lists");
  std::vector<DecodingOrder> plans;
  for (const auto& phase : node) {
    if (!phase.IsSequence()) fail(phase, "each decoding plan must be a list of symbols");
    DecodingOrder order;
    for (const auto& s : phase) order.symbols.push_back(parse_symbol(s));
    plans.push_back(std::move(order));
  }
  return plans;
}

std::vector<double> parse_snr_node(const YAML::Node& node) {
  if (node.IsSequence()) return numbers(node, "snr_db");
  if (node.IsMap()) {
    expect_keys(node, {"start", "stop", "step"}, "snr_db");
    if (!node["start"] || !node["stop"] || !node["step"]) {
      fail(node, "snr_db range needs start, stop and step");
    }
    const double start = number(node["start"], "start");
    const double stop = number(node["stop"], "stop");
    const double step = number(node["step"], "step");
    if (!(step > 0.0)) fail(node["step"], "step must be positive");
    std::vector<double> out;
    for (long i = 0;; ++i) {
      const double v = start + step * static_cast<double>(i);
      if (v > stop + 1e-9 * step) break;
      out.push_back(v);
    }
    return out;
  }
  if (node.IsScalar()) return {number(node, "snr_db")};
  fail(node, "snr_db must be a list or a {start, stop, step} range");
}

SettingConfig parse_setting(const YAML::Node& node, std::size_t index) {
  expect_keys(node, {"label", "links"}, "setting");
  SettingConfig s;
  s.line = line_of(node);
  s.label = node["label"] ? scalar<std::string>(node["label"], "label") : std::to_string(index + 1);
  const auto links = node["links"];
  if (!links || !links.IsMap()) fail(node, "setting needs a links mapping of link id to variance");
  for (const auto& kv : links) {
    s.links.push_back({kv.first.as<std::string>(), number(kv.second, "variance")});
  }
  return s;
}

SchemeConfig parse_scheme(const YAML::Node& node) {
  expect_keys(node,
              {"label", "strategy", "protocol", "baseline", "coefficients", "decoding_plans", "trim"},
              "scheme");
  SchemeConfig s;
  s.line = line_of(node);
  if (node["baseline"]) {
    s.baseline = enum_field<Baseline>(node["baseline"], "baseline", parse_baseline);
    if (s.baseline != Baseline::none) s.strategy = Strategy::oma_baseline;
  }
  if (node["strategy"]) s.strategy = enum_field<Strategy>(node["strategy"], "strategy", parse_strategy);
  if (node["protocol"]) s.protocol = enum_field<Protocol>(node["protocol"], "protocol", parse_protocol);
  if (node["coefficients"]) s.coefficients = numbers(node["coefficients"], "coefficients");
  if (node["decoding_plans"]) s.decoding_plans = parse_plans(node["decoding_plans"]);
  if (node["trim"]) s.trim = scalar<bool>(node["trim"], "trim");
  s.label = node["label"] ? scalar<std::string>(node["label"], "label")
                          : std::string(to_string(s.strategy));
  return s;
}

ExperimentConfig parse_root(const YAML::Node& root) {
  expect_keys(root,
              {"name", "scenario", "settings", "schemes", "snr_db", "trials", "seed",
               "outage_targets", "optimizer", "statistical", "threads", "output"},
              "experiment");
  ExperimentConfig c;
  if (root["name"]) c.name = scalar<std::string>(root["name"], "name");

  const auto sc = root["scenario"];
  if (!sc) fail(root, "missing 'scenario' section");
  expect_keys(sc, {"kind", "protocol", "pairing", "power_model", "noise_power", "decoding_plans"},
              "scenario");
  if (!sc["kind"]) fail(sc, "scenario needs a kind");
  c.kind = enum_field<ScenarioKind>(sc["kind"], "kind", parse_kind);
  if (sc["protocol"]) c.protocol = enum_field<Protocol>(sc["protocol"], "protocol", parse_protocol);
  if (sc["pairing"]) c.pairing = enum_field<Pairing>(sc["pairing"], "pairing", parse_pairing);
  if (sc["power_model"]) {
    c.power_model = enum_field<PhasePowerModel>(sc["power_model"], "power_model", parse_power_model);
  }
  if (sc["noise_power"]) c.noise_power = number(sc["noise_power"], "noise_power");
  if (sc["decoding_plans"]) c.decoding_plans = parse_plans(sc["decoding_plans"]);

  const auto settings = root["settings"];
  if (!settings || !settings.IsSequence()) fail(root, "missing 'settings' list");
  for (std::size_t i = 0; i < settings.size(); ++i) c.settings.push_back(parse_setting(settings[i], i));

  const auto schemes = root["schemes"];
  if (!schemes || !schemes.IsSequence()) fail(root, "missing 'schemes' list");
  for (const auto& s : schemes) c.schemes.push_back(parse_scheme(s));

  if (root["snr_db"]) c.snr_db = parse_snr_node(root["snr_db"]);
  if (root["trials"]) {
    const auto t = scalar<long long>(root["trials"], "trials");
    if (t < 1) fail(root["trials"], "trials must be at least 1");
    c.trials = static_cast<std::size_t>(t);
  }
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["outage_targets"]) c.outage_targets = numbers(root["outage_targets"], "outage_targets");
  if (const auto o = root["optimizer"]) {
    expect_keys(o, {"grid_resolution", "refinement_rounds", "min_rate_floor", "enforce_ordering"},
                "optimizer");
    if (o["grid_resolution"]) c.optimizer.grid_resolution = scalar<int>(o["grid_resolution"], "grid_resolution");
    if (o["refinement_rounds"]) {
      c.optimizer.refinement_rounds = scalar<int>(o["refinement_rounds"], "refinement_rounds");
    }
    if (o["min_rate_floor"]) c.optimizer.min_rate_floor = number(o["min_rate_floor"], "min_rate_floor");
    if (o["enforce_ordering"]) {
      c.optimizer.enforce_ordering = scalar<bool>(o["enforce_ordering"], "enforce_ordering");
    }
  }
  if (const auto s = root["statistical"]) {
    expect_keys(s, {"samples", "seed", "min_mean_rate"}, "statistical");
    if (s["samples"]) {
      const auto n = scalar<long long>(s["samples"], "samples");
      if (n < 1) fail(s["samples"], "samples must be at least 1");
      c.statistical_samples = static_cast<std::size_t>(n);
    }
    if (s["seed"]) c.statistical_seed = scalar<std::uint64_t>(s["seed"], "seed");
    if (s["min_mean_rate"]) c.statistical_min_mean_rate = number(s["min_mean_rate"], "min_mean_rate");
  }
  if (root["threads"]) c.threads = scalar<unsigned>(root["threads"], "threads");
  if (root["output"]) c.output = scalar<std::string>(root["output"], "output");
  return c;
}

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + '"';
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_shortest(v[i]);
  return out + "]";
}

std::string plans(const std::vector<DecodingOrder>& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += i ? ", [" : "[";
    for (std::size_t j = 0; j < p[i].symbols.size(); ++j) {
      out += (j ? ", " : "") + p[i].symbols[j].name();
    }
    out += "]";
  }
  return out + "]";
}

void fail_at(int line, const std::string& what) {
  throw ConfigError(line ? "line " + std::to_string(line) + ": " + what : what, line);
}

}  // namespace

ExperimentConfig parse_experiment(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg, e.mark.line + 1);
  }
  if (!root || root.IsNull()) throw ConfigError("empty configuration");
  return parse_root(root);
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  std::stringstream text;
  text << in.rdbuf();
  return parse_experiment(text.str());
}

std::string dump_experiment(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "name: " << quoted(c.name) << "\n";
  o << "scenario:\n";
  o << "  kind: " << to_string(c.kind) << "\n";
  o << "  protocol: " << to_string(c.protocol) << "\n";
  o << "  pairing: " << to_string(c.pairing) << "\n";
  o << "  power_model: " << to_string(c.power_model) << "\n";
  o << "  noise_power: " << format_shortest(c.noise_power) << "\n";
  if (!c.decoding_plans.empty()) o << "  decoding_plans: " << plans(c.decoding_plans) << "\n";
  o << "settings:\n";
  for (const auto& s : c.settings) {
    o << "  - label: " << quoted(s.label) << "\n    links: {";
    for (std::size_t i = 0; i < s.links.size(); ++i) {
      o << (i ? ", " : "") << s.links[i].link_id << ": " << format_shortest(s.links[i].variance);
    }
    o << "}\n";
  }
  o << "schemes:\n";
  for (const auto& s : c.schemes) {
    o << "  - label: " << quoted(s.label) << "\n";
    o << "    strategy: " << to_string(s.strategy) << "\n";
    if (s.protocol) o << "    protocol: " << to_string(*s.protocol) << "\n";
    if (s.baseline != Baseline::none) o << "    baseline: " << to_string(s.baseline) << "\n";
    if (!s.coefficients.empty()) o << "    coefficients: " << list(s.coefficients) << "\n";
    if (!s.decoding_plans.empty()) o << "    decoding_plans: " << plans(s.decoding_plans) << "\n";
    if (s.trim) o << "    trim: " << (*s.trim ? "true" : "false") << "\n";
  }
  o << "snr_db: " << list(c.snr_db) << "\n";
  o << "trials: " << c.trials << "\n";
  o << "seed: " << c.seed << "\n";
  o << "outage_targets: " << list(c.outage_targets) << "\n";
  o << "optimizer:\n";
  o << "  grid_resolution: " << c.optimizer.grid_resolution << "\n";
  o << "  refinement_rounds: " << c.optimizer.refinement_rounds << "\n";
  o << "  min_rate_floor: " << format_shortest(c.optimizer.min_rate_floor) << "\n";
  o << "  enforce_ordering: " << (c.optimizer.enforce_ordering ? "true" : "false") << "\n";
  o << "statistical:\n";
  o << "  samples: " << c.statistical_samples << "\n";
  if (c.statistical_seed) o << "  seed: " << *c.statistical_seed << "\n";
  o << "  min_mean_rate: " << format_shortest(c.statistical_min_mean_rate) << "\n";
  o << "threads: " << c.threads << "\n";
  o << "output: " << quoted(c.output) << "\n";
  return o.str();
}

std::vector<double> parse_snr_list(std::string_view text) {
  auto num = [&](std::string_view t) {
    while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
    while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
      throw ConfigError("invalid snr value '" + std::string(t) + "'");
    }
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    for (;;) {
      const auto next = text.find(':', pos);
      parts.push_back(text.substr(pos, next - pos));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    if (parts.size() != 3) throw ConfigError("snr range is start:stop:step");
    const double start = num(parts[0]), stop = num(parts[1]), step = num(parts[2]);
    if (!(step > 0.0)) throw ConfigError("snr step must be positive");
    for (long i = 0;; ++i) {
      const double v = start + step * static_cast<double>(i);
      if (v > stop + 1e-9 * step) break;
      out.push_back(v);
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find(',', pos);
    const auto item = text.substr(pos, next == std::string_view::npos ? text.npos : next - pos);
    if (item.find_first_not_of(' ') != std::string_view::npos) out.push_back(num(item));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

ScenarioSpec scheme_spec(const ExperimentConfig& c, const SettingConfig& setting,
                         const SchemeConfig& scheme) {
  ScenarioSpec spec;
  spec.kind = c.kind;
  spec.protocol = scheme.protocol.value_or(c.protocol);
  spec.baseline = scheme.baseline;
  spec.links = setting.links;
  spec.noise_power = c.noise_power;
  spec.decoding_plans = scheme.decoding_plans.empty() ? c.decoding_plans : scheme.decoding_plans;
  spec.pairing = c.pairing;
  spec.power_model = c.power_model;
  return spec;
}

std::vector<SweepEntry> sweep_entries(const ExperimentConfig& c, const SettingConfig& setting) {
  std::vector<SweepEntry> entries;
  for (const auto& scheme : c.schemes) {
    TrialPlan plan;
    plan.spec = scheme_spec(c, setting, scheme);
    plan.strategy = scheme.strategy;
    plan.trials = c.trials;
    plan.master_seed = c.seed;
    plan.outage_targets = c.outage_targets;
    if (!scheme.coefficients.empty()) plan.coefficients = scheme.coefficients;
    plan.optimizer = c.optimizer;
    plan.statistical.sample_count = c.statistical_samples;
    plan.statistical.seed =
        c.statistical_seed.value_or(splitmix64(c.seed ^ 0x9e3779b97f4a7c15ULL));
    plan.statistical.min_mean_rate = c.statistical_min_mean_rate;
    plan.trim = scheme.trim;
    plan.threads = c.threads;
    entries.push_back({scheme.label, std::move(plan)});
  }
  return entries;
}

void check_experiment(const ExperimentConfig& c) {
  if (c.settings.empty()) throw ConfigError("no settings");
  if (c.schemes.empty()) throw ConfigError("nothing to compare");
  if (c.snr_db.empty()) throw ConfigError("empty snr grid");
  if (!(c.noise_power > 0.0)) throw ConfigError("noise_power must be positive");
  if (c.optimizer.grid_resolution < 2) throw ConfigError("grid_resolution must be at least 2");
  if (c.optimizer.refinement_rounds < 0) throw ConfigError("refinement_rounds must be nonnegative");
  if (c.optimizer.min_rate_floor < 0.0) throw ConfigError("min_rate_floor must be nonnegative");
  if (c.statistical_min_mean_rate < 0.0) throw ConfigError("min_mean_rate must be nonnegative");
  if (c.outage_targets.size() != 2) throw ConfigError("outage_targets needs one value per symbol");
  for (double t : c.outage_targets) {
    if (t < 0.0) throw ConfigError("outage targets must be nonnegative");
  }
  std::set<std::string> labels;
  for (const auto& scheme : c.schemes) {
    if (!labels.insert(scheme.label).second) {
      fail_at(scheme.line, "duplicate scheme label '" + scheme.label + "'");
    }
    if (scheme.strategy == Strategy::oma_baseline && scheme.baseline == Baseline::none) {
      fail_at(scheme.line, "scheme '" + scheme.label + "' needs a baseline");
    }
    if (scheme.strategy != Strategy::oma_baseline && scheme.baseline != Baseline::none) {
      fail_at(scheme.line, "scheme '" + scheme.label + "' sets a baseline on a NOMA strategy");
    }
  }
  for (const auto& setting : c.settings) {
    for (const auto& scheme : c.schemes) {
      const auto spec = scheme_spec(c, setting, scheme);
      const auto report = validate(spec);
      if (!report.structurally_ok()) {
        std::string msg = "setting '" + setting.label + "', scheme '" + scheme.label + "':";
        for (const auto& i : report.structural()) msg += " [" + i.rule + "] " + i.detail + ";";
        fail_at(scheme.line ? scheme.line : setting.line, msg);
      }
      if (scheme.strategy == Strategy::fixed) {
        const auto sc = Scenario::create(spec);
        try {
          const std::vector<double> coeffs =
              scheme.coefficients.empty() ? std::vector<double>{0.8, 0.2} : scheme.coefficients;
          fixed(sc, uniform_coefficients(sc, coeffs));
        } catch (const std::exception& e) {
          fail_at(scheme.line, "scheme '" + scheme.label + "': " + e.what());
        }
      }
    }
  }
}

std::string format_shortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_fixed(double value, int decimals) {
  char buf[512];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  std::string out(buf, ptr);
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

std::string format_2sig(double value) {
  if (value == 0.0 || !std::isfinite(value)) return format_shortest(value);
  const double mag = std::floor(std::log10(std::fabs(value)));
  const double scale = std::pow(10.0, 1.0 - mag);
  return format_shortest(std::round(value * scale) / scale);
}

}  // namespace noma

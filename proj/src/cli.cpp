#include "noma/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "noma/errors.hpp"

namespace noma {

namespace {

constexpr const char* kCsvHeader =
    "scheme,setting,snr_db,sum_rate,sum_rate_ci,outage_sys,outage_s1,outage_s2,energy_eff,"
    "ee_ratio,npu,trials";

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string metric(double v) { return format_fixed(v, 10); }

std::string issue_line(const ValidationIssue& issue) {
  const char* kind =
      issue.severity == ValidationIssue::Severity::structural ? "error" : "advisory";
  return std::string(kind) + ": " + issue.rule + ": " + issue.detail;
}

}  // namespace

void apply_overrides(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.trials) config.trials = *o.trials;
  if (o.snr_db) config.snr_db = *o.snr_db;
  if (o.output) config.output = *o.output;
  if (o.threads) config.threads = *o.threads;
}

std::string sweep_csv(const ExperimentConfig& config, std::ostream* summary) {
  check_experiment(config);
  std::vector<std::vector<SweepCurve>> per_setting;
  for (const auto& setting : config.settings) {
    const auto entries = sweep_entries(config, setting);
    per_setting.push_back(sweep(entries, config.snr_db));
  }

  std::ostringstream csv;
  csv << kCsvHeader << '\n';
  for (std::size_t k = 0; k < config.schemes.size(); ++k) {
    for (std::size_t s = 0; s < config.settings.size(); ++s) {
      const auto& curve = per_setting[s][k];
      for (const auto& point : curve.points) {
        const auto& m = point.summary;
        csv << csv_field(curve.label) << ',' << csv_field(config.settings[s].label) << ','
            << format_shortest(point.snr_db) << ',' << metric(m.ergodic_sum_rate) << ','
            << metric(m.sum_rate_ci) << ',' << metric(m.system_outage) << ','
            << metric(m.outage_per_symbol[0]) << ',' << metric(m.outage_per_symbol[1]) << ','
            << metric(m.energy_efficiency) << ',' << metric(m.ee_ratio_vs_fdma) << ','
            << metric(m.normalized_power_utilization) << ',' << m.trials_used << '\n';
        if (summary) {
          *summary << curve.label << " | setting " << config.settings[s].label << " | "
                   << format_shortest(point.snr_db) << " dB: sum rate "
                   << format_fixed(m.ergodic_sum_rate, 4) << " +/- "
                   << format_fixed(m.sum_rate_ci, 4) << ", outage "
                   << format_fixed(m.system_outage, 4) << ", npu "
                   << format_fixed(m.normalized_power_utilization, 4);
          if (m.infeasible_trials) *summary << ", infeasible " << m.infeasible_trials;
          *summary << '\n';
        }
      }
    }
  }
  return csv.str();
}

std::string resolve_output_path(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.is_absolute()) return path;
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) return (fs::path(dir) / p).string();
  return path;
}

int cmd_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  std::string csv;
  try {
    csv = sweep_csv(config, &out);
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConstraintViolation& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  }
  namespace fs = std::filesystem;
  const fs::path path = resolve_output_path(config.output);
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << csv) || !file.flush()) {
    err << "cannot write " << path.string() << '\n';
    return kExitIo;
  }
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

int cmd_asymmetry(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  if (config.settings.empty()) {
    err << "invalid config: no settings\n";
    return kExitConfig;
  }
  for (const auto& setting : config.settings) {
    const auto spec = scheme_spec(config, setting, SchemeConfig{});
    const auto report = validate(spec);
    if (!report.structurally_ok()) {
      err << "invalid config: setting '" << setting.label << "':";
      for (const auto& i : report.structural()) err << " [" << i.rule << "] " << i.detail << ';';
      err << '\n';
      return kExitConfig;
    }
    const auto a = asymmetry(Scenario::create(spec));
    out << "setting " << setting.label << ": A^u = " << format_2sig(a.uplink)
        << ", A^d = " << format_2sig(a.downlink) << ", A^r = " << format_2sig(a.relay);
    if (a.relay > 3.0) out << " (NOMA-favorable)";
    out << '\n';
    if (a.maxmin_relay) {
      out << "  max-min relay: R" << *a.maxmin_relay << ", last-decoded path: R"
          << *a.last_decoded_path << '\n';
      if (*a.maxmin_relay != *a.last_decoded_path) {
        out << "  warning: max-min relay R" << *a.maxmin_relay
            << " differs from the last-decoded path; OMA may match or beat NOMA\n";
      }
    }
  }
  return kExitOk;
}

int cmd_validate(const ExperimentConfig& config, std::ostream& out, std::ostream& /*err*/) {
  bool structural = false, advisory = false;
  for (const auto& setting : config.settings) {
    for (const auto& scheme : config.schemes) {
      const auto report = validate(scheme_spec(config, setting, scheme));
      for (const auto& issue : report.issues) {
        out << "setting " << setting.label << ", scheme " << scheme.label << ": "
            << issue_line(issue) << '\n';
        (issue.severity == ValidationIssue::Severity::structural ? structural : advisory) = true;
      }
    }
  }
  if (!structural) {
    try {
      check_experiment(config);
    } catch (const std::exception& e) {
      out << "error: " << e.what() << '\n';
      structural = true;
    }
  }
  if (structural) return kExitConfig;
  if (advisory) return kExitAdvisory;
  out << "ok\n";
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"NOMA cooperative relay simulator"};
  app.require_subcommand(1);

  std::string config_path, preset;
  Overrides o;
  std::optional<std::string> snr_text;
  bool dump = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment YAML file");
    sub->add_option("--preset", preset, "built-in figure preset");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--trials", o.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
    sub->add_option("--snr", snr_text, "SNR grid: a,b,c or start:stop:step (dB)");
    sub->add_option("--out", o.output, "CSV output path");
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    sub->add_flag("--dump-config", dump, "print the resolved config and exit");
  };
  auto* sweep_cmd = app.add_subcommand("sweep", "run an SNR sweep and write CSV");
  auto* asym_cmd = app.add_subcommand("asymmetry", "report degrees of asymmetry");
  auto* valid_cmd = app.add_subcommand("validate", "check decoding and labelling rules");
  for (auto* sub : {sweep_cmd, asym_cmd, valid_cmd}) add_common(sub);
  app.add_subcommand("presets", "list built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  if (app.got_subcommand("presets")) {
    for (const auto& name : preset_names()) out << name << '\n';
    return kExitOk;
  }

  ExperimentConfig config;
  try {
    if (!preset.empty() && !config_path.empty()) {
      err << "give either a config file or --preset, not both\n";
      return kExitConfig;
    }
    if (!preset.empty()) {
      const auto text = preset_text(preset);
      if (!text) {
        err << "unknown preset '" << preset << "'\n";
        return kExitConfig;
      }
      config = parse_experiment(*text);
    } else if (!config_path.empty()) {
      config = load_experiment(config_path);
    } else {
      err << "a config file or --preset is required\n";
      return kExitConfig;
    }
    if (snr_text) o.snr_db = parse_snr_list(*snr_text);
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  apply_overrides(config, o);

  if (dump) {
    out << dump_experiment(config);
    return kExitOk;
  }
  if (app.got_subcommand(sweep_cmd)) return cmd_sweep(config, out, err);
  if (app.got_subcommand(asym_cmd)) return cmd_asymmetry(config, out, err);
  return cmd_validate(config, out, err);
}

}  // namespace noma

// Command-line front end for the crawl library. Scenario execution, parameter
// sweeps and channel extraction all go through the C API in crawl.h.
//
// Exit codes: 0 = completed, 1 = bad input (usage/config/io), 2 = the run
// stopped on a halt event.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crawl.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitHalted = 2;

struct ConfigDeleter {
  void operator()(crawl_config* c) const { crawl_config_free(c); }
};
struct LogDeleter {
  void operator()(crawl_log* l) const { crawl_log_free(l); }
};
struct StringDeleter {
  void operator()(char* s) const { crawl_string_free(s); }
};
using ConfigPtr = std::unique_ptr<crawl_config, ConfigDeleter>;
using LogPtr = std::unique_ptr<crawl_log, LogDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

struct Failure {
  int exit_code;
  std::string message;
};

void report(const Failure& f) { std::cerr << "error: " << f.message << "\n"; }

ConfigPtr load_config_or_fail(const std::string& path,
                              const std::vector<std::string>& overrides,
                              Failure* failure) {
  char err[512] = {};
  crawl_config* raw = nullptr;
  if (crawl_config_load(path.c_str(), &raw, err, sizeof err) != CRAWL_OK) {
    *failure = {kExitBadInput, err};
    return nullptr;
  }
  ConfigPtr cfg(raw);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      *failure = {kExitBadInput, "override must be section.key=value: " + kv};
      return nullptr;
    }
    if (crawl_config_set(cfg.get(), kv.substr(0, eq).c_str(),
                         kv.substr(eq + 1).c_str(), err, sizeof err) !=
        CRAWL_OK) {
      *failure = {kExitBadInput, err};
      return nullptr;
    }
  }
  return cfg;
}

bool write_file(const std::filesystem::path& path, const char* text,
                Failure* failure) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    *failure = {kExitBadInput, "cannot write " + path.string()};
    return false;
  }
  return true;
}

/// Runs one configured scenario and writes log.csv + summary.json to out_dir
/// (skipped when empty). Returns false with *failure set on error.
bool run_to_dir(const crawl_config* cfg, const std::string& out_dir,
                crawl_run_stats* stats, std::string* summary_text,
                Failure* failure) {
  char err[512] = {};
  crawl_log* raw_log = nullptr;
  if (crawl_run(cfg, &raw_log, err, sizeof err) != CRAWL_OK) {
    *failure = {kExitBadInput, err};
    return false;
  }
  LogPtr log(raw_log);

  char* json = nullptr;
  if (crawl_log_summary_json(log.get(), &json, err, sizeof err) != CRAWL_OK) {
    *failure = {kExitBadInput, err};
    return false;
  }
  StringPtr json_owner(json);
  *summary_text = json;
  crawl_log_stats(log.get(), stats);

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
      *failure = {kExitBadInput, "cannot create " + out_dir};
      return false;
    }
    char* csv = nullptr;
    if (crawl_log_csv(log.get(), &csv, err, sizeof err) != CRAWL_OK) {
      *failure = {kExitBadInput, err};
      return false;
    }
    StringPtr csv_owner(csv);
    const std::filesystem::path dir(out_dir);
    if (!write_file(dir / "log.csv", csv, failure)) return false;
    if (!write_file(dir / "summary.json", json, failure)) return false;
  }
  return true;
}

int cmd_run(const std::string& scenario, const std::string& out_dir,
            long long seed, bool seed_set,
            const std::vector<std::string>& overrides, bool quiet) {
  Failure failure{};
  std::vector<std::string> sets = overrides;
  if (seed_set) sets.push_back("sim.seed=" + std::to_string(seed));
  ConfigPtr cfg = load_config_or_fail(scenario, sets, &failure);
  if (!cfg) {
    report(failure);
    return failure.exit_code;
  }

  crawl_run_stats stats{};
  std::string summary;
  if (!run_to_dir(cfg.get(), out_dir, &stats, &summary, &failure)) {
    report(failure);
    return failure.exit_code;
  }
  if (!quiet) std::cout << summary;
  if (stats.halted != 0) {
    std::cerr << "run halted: " << stats.halt_reason << "\n";
    return kExitHalted;
  }
  return kExitOk;
}

/// Expands "a:step:b" (inclusive), "v1,v2,..." or a single literal into the
/// value strings handed to crawl_config_set.
bool expand_range(const std::string& range, std::vector<std::string>* values,
                  Failure* failure) {
  const auto colons = std::count(range.begin(), range.end(), ':');
  if (colons == 2) {
    double a = 0, step = 0, b = 0;
    if (std::sscanf(range.c_str(), "%lf:%lf:%lf", &a, &step, &b) != 3 ||
        step <= 0 || b < a) {
      *failure = {kExitBadInput, "bad range (want lo:step:hi): " + range};
      return false;
    }
    for (int i = 0;; ++i) {
      const double v = a + i * step;
      if (v > b + 1e-9) break;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.10g", v);
      values->push_back(buf);
    }
    return true;
  }
  std::stringstream ss(range);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values->push_back(item);
  }
  if (values->empty()) {
    *failure = {kExitBadInput, "empty range: " + range};
    return false;
  }
  return true;
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == '/' || c == '\\' || c == ':' || c == ' ') c = '_';
  }
  return out;
}

int cmd_sweep(const std::string& scenario, const std::string& param,
              const std::string& out_dir,
              const std::vector<std::string>& overrides) {
  Failure failure{};
  const auto eq = param.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == param.size()) {
    report({kExitBadInput, "expected --param section.key=range, got " + param});
    return kExitBadInput;
  }
  const std::string key = param.substr(0, eq);
  std::vector<std::string> values;
  if (!expand_range(param.substr(eq + 1), &values, &failure)) {
    report(failure);
    return failure.exit_code;
  }

  std::printf("# sweep %s over %zu values\n", key.c_str(), values.size());
  std::printf("%-16s %8s %12s %12s %11s %11s %s\n", key.c_str(), "ticks",
              "distance_xy", "min_margin", "violations", "touchdowns",
              "status");
  bool any_halted = false;
  for (const std::string& value : values) {
    std::vector<std::string> sets = overrides;
    sets.push_back(key + "=" + value);
    ConfigPtr cfg = load_config_or_fail(scenario, sets, &failure);
    if (!cfg) {
      report(failure);
      return failure.exit_code;
    }
    std::string run_dir;
    if (!out_dir.empty()) {
      run_dir = (std::filesystem::path(out_dir) /
                 (sanitize(key) + "=" + sanitize(value)))
                    .string();
    }
    crawl_run_stats stats{};
    std::string summary;
    if (!run_to_dir(cfg.get(), run_dir, &stats, &summary, &failure)) {
      report(failure);
      return failure.exit_code;
    }
    const std::string status =
        stats.halted != 0 ? std::string("halted: ") + stats.halt_reason
                          : "completed";
    std::printf("%-16s %8llu %12.4f %12.4f %11llu %11llu %s\n", value.c_str(),
                static_cast<unsigned long long>(stats.ticks),
                stats.distance_xy, stats.min_margin,
                static_cast<unsigned long long>(stats.margin_violations),
                static_cast<unsigned long long>(stats.touchdowns),
                status.c_str());
    any_halted = any_halted || stats.halted != 0;
  }
  return any_halted ? kExitHalted : kExitOk;
}

int cmd_plot(const std::string& log_path, const std::string& channel_list,
             const std::string& out_path) {
  std::ifstream in(log_path, std::ios::binary);
  if (!in) {
    report({kExitBadInput, "cannot open: " + log_path});
    return kExitBadInput;
  }
  std::ostringstream text;
  text << in.rdbuf();
  const std::string csv = text.str();

  std::vector<std::string> names;
  std::stringstream ss(channel_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) names.push_back(item);
  }
  std::vector<const char*> channels;
  channels.reserve(names.size());
  for (const std::string& n : names) channels.push_back(n.c_str());

  char err[2048] = {};
  char* table = nullptr;
  if (crawl_plot_channels(csv.c_str(), channels.data(), channels.size(),
                          &table, err, sizeof err) != CRAWL_OK) {
    report({kExitBadInput, err});
    return kExitBadInput;
  }
  StringPtr owner(table);
  if (out_path.empty()) {
    std::cout << table;
    return kExitOk;
  }
  Failure failure{};
  if (!write_file(out_path, table, &failure)) {
    report(failure);
    return failure.exit_code;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "crawl-cli: heuristic rough-terrain crawl planner and simulator"};
  app.require_subcommand(1);
  app.footer("exit codes: 0 completed, 1 bad input, 2 run halted");

  std::string scenario, out_dir, param, log_path, channel_list, out_path;
  long long seed = 0;
  std::vector<std::string> overrides;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "simulate one scenario");
  run->add_option("--scenario", scenario, "scenario config file")
      ->required();
  run->add_option("--out", out_dir, "output directory for log.csv + summary.json");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override sim.seed");
  run->add_option("--set", overrides,
                  "extra overrides, section.key=value (repeatable)");
  run->add_flag("--quiet", quiet, "suppress the summary on stdout");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("--scenario", scenario, "scenario config file")
      ->required();
  sweep->add_option("--param", param,
                    "section.key=lo:step:hi or comma-separated values")
      ->required();
  sweep->add_option("--out", out_dir, "directory for per-run artifacts");
  sweep->add_option("--set", overrides,
                    "extra overrides applied to every run (repeatable)");

  CLI::App* plot = app.add_subcommand("plot", "extract channels from a log");
  plot->add_option("--log", log_path, "log.csv produced by run")->required();
  plot->add_option("--channels", channel_list, "comma-separated channel names")
      ->required();
  plot->add_option("--out", out_path, "write columns here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  if (run->parsed())
    return cmd_run(scenario, out_dir, seed, seed_opt->count() > 0, overrides,
                   quiet);
  if (sweep->parsed()) return cmd_sweep(scenario, param, out_dir, overrides);
  return cmd_plot(log_path, channel_list, out_path);
}

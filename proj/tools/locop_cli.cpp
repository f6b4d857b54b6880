#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "locop/acceptance.hpp"
#include "locop/config.hpp"
#include "locop/error.hpp"
#include "locop/parallel.hpp"
#include "locop/report.hpp"
#include "locop/runner.hpp"

namespace {

int exit_code(locop::ErrorKind kind) {
  switch (kind) {
    case locop::ErrorKind::config:
    case locop::ErrorKind::invalid_argument:
      return 2;
    case locop::ErrorKind::numeric_guard:
    case locop::ErrorKind::convergence:
      return 3;
    case locop::ErrorKind::io:
      return 4;
  }
  return 1;
}

struct Options {
  std::string config;
  std::string out = ".";
  std::string format;
  unsigned threads = 0;
  bool gnuplot = false;
};

locop::ExperimentConfig load(const Options& o) {
  locop::ExperimentConfig cfg =
      o.config.empty() ? locop::parse_config("{}") : locop::load_config(o.config);
  cfg.output.dir = o.out;
  if (!o.format.empty()) cfg.output.format = o.format;
  if (cfg.output.format != "csv" && cfg.output.format != "json")
    throw locop::Error(locop::ErrorKind::config, "output.format", "format must be csv or json", "--format");
  cfg.output.gnuplot = cfg.output.gnuplot || o.gnuplot;
  return cfg;
}

std::string report_path(const locop::ExperimentConfig& cfg, const std::string& tag) {
  return (std::filesystem::path(cfg.output.dir) / (cfg.id + "_" + tag + "." + cfg.output.format)).string();
}

void finish(const locop::ExperimentConfig& cfg, const std::string& tag, const std::vector<locop::ReportRow>& rows) {
  std::filesystem::create_directories(cfg.output.dir);
  const std::string path = report_path(cfg, tag);
  locop::emit_report(rows, cfg.output.format, path);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.verdict == "fail";
  std::cout << path << ": " << rows.size() << " rows, " << failed << " failing verdicts\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-frequency diagnostics for localization operators"};
  app.require_subcommand(1);
  Options opt;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Experiment configuration (JSON)");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--format", opt.format, "Report format: csv or json");
    sub->add_option("--threads", opt.threads, "Worker threads (speed only)");
    sub->add_flag("--emit-gnuplot", opt.gnuplot, "Write a gnuplot script next to the CSV profiles");
  };

  // Subcommands that run a fixed list of diagnostics.
  const std::vector<std::pair<std::string, std::vector<std::string>>> diagnostic_commands = {
      {"envelope", {"envelope"}},     {"weakcpt", {"weakcpt"}},       {"svd", {"svd"}},
      {"atoms", {"atoms", "translation"}}, {"intertwine", {"intertwine"}}, {"canonical", {"tameness", "canonical"}},
  };
  std::vector<std::pair<CLI::App*, std::vector<std::string>>> diag_subs;
  for (const auto& [name, list] : diagnostic_commands) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " diagnostic");
    common(sub);
    diag_subs.emplace_back(sub, list);
  }
  auto* stft = app.add_subcommand("stft", "Dump the STFT of the operator applied to the window");
  auto* quantize = app.add_subcommand("quantize", "Dump the operator kernel");
  auto* gabor = app.add_subcommand("gabor", "Dump the Gabor matrix");
  auto* run = app.add_subcommand("run", "Run the configured pipeline and diagnostics");
  auto* self = app.add_subcommand("selftest", "Run the acceptance suite");
  for (auto* sub : {stft, quantize, gabor, run, self}) common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (opt.threads > 0) locop::set_thread_count(opt.threads);
    if (self->parsed()) {
      const std::string format = opt.format.empty() ? "csv" : opt.format;
      std::filesystem::create_directories(opt.out);
      const std::string path = (std::filesystem::path(opt.out) / ("selftest." + format)).string();
      const auto rows = locop::selftest(locop::thread_count(), format, path, [](int id, double seconds) {
        std::fprintf(stderr, "criterion %d: %.1f s\n", id, seconds);
      });
      bool ok = true;
      for (const auto& c : locop::summarize_acceptance(rows)) {
        std::cout << "criterion " << c.id << " " << c.name << ": " << (c.pass ? "PASS" : "FAIL") << " (" << c.detail
                  << ")\n";
        ok = ok && c.pass;
      }
      std::cout << path << "\n";
      return ok ? 0 : 1;
    }
    const locop::ExperimentConfig cfg = load(opt);
    for (const auto& [sub, list] : diag_subs)
      if (sub->parsed()) {
        finish(cfg, sub->get_name(), locop::run_diagnostics(cfg, list));
        return 0;
      }
    if (stft->parsed()) finish(cfg, "stft", locop::dump_stft(cfg, cfg.output.dir));
    if (quantize->parsed()) finish(cfg, "quantize", locop::dump_kernel(cfg, cfg.output.dir));
    if (gabor->parsed()) finish(cfg, "gabor", locop::dump_gabor(cfg, cfg.output.dir));
    if (run->parsed()) finish(cfg, "report", locop::run_experiment(cfg));
    return 0;
  } catch (const locop::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

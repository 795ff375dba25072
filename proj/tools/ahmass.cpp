#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ahmass/ahmass.hpp"

namespace {

int threads_from_env() {
  const char* env = std::getenv("AHMASS_THREADS");
  if (!env || !*env) return 0;
  try {
    return std::stoi(env);
  } catch (const std::exception&) {
    throw ahmass::Error(ahmass::ErrorCode::ConfigError, "AHMASS_THREADS is not an integer");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotically hyperbolic graph mass toolkit"};
  app.require_subcommand(1, 1);
  std::string config_path, out_path, format;
  long long seed = -1;
  int threads = 0;
  for (const char* name : {"inspect", "verify", "mass", "penrose", "decay", "map"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML run configuration")->required();
    sub->add_option("--out", out_path, "output file (stdout when absent)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", seed, "overrides the config seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", threads, "worker threads (AHMASS_THREADS as fallback)")->check(CLI::Range(1, 256));
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    ahmass::RunConfig cfg = ahmass::load_config_file(config_path);
    if (ahmass::to_string(cfg.command) != command)
      throw ahmass::Error(ahmass::ErrorCode::ConfigError,
                          "config command '" + ahmass::to_string(cfg.command) + "' differs from '" + command + "'");
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (threads == 0) threads = threads_from_env();
    if (threads > 0) cfg.threads = threads;
    if (cfg.threads < 1 || cfg.threads > 256)
      throw ahmass::Error(ahmass::ErrorCode::ConfigError, "threads must be in 1..256");
    if (!format.empty()) cfg.format = ahmass::parse_format(format);
    if (!out_path.empty()) cfg.out_path = out_path;

    const ahmass::RunOutcome outcome = ahmass::run(cfg);
    const std::string text = cfg.format == ahmass::OutputFormat::Csv && outcome.table
                                 ? outcome.table->text()
                                 : ahmass::to_json_text(outcome.document);
    if (cfg.out_path)
      ahmass::write_text_file(*cfg.out_path, text);
    else
      std::cout << text;
    if (outcome.exit_code == ahmass::kExitHypotheses)
      std::cerr << "ahmass: computation completed, hypotheses unmet (see hypothesis_flags)\n";
    return outcome.exit_code;
  } catch (const ahmass::Error& e) {
    std::cerr << ahmass::to_json_text(ahmass::error_document(e));
    return ahmass::kExitError;
  } catch (const std::exception& e) {
    std::cerr << ahmass::to_json_text(ahmass::error_document(ahmass::Error(ahmass::ErrorCode::IoError, e.what())));
    return ahmass::kExitError;
  }
}

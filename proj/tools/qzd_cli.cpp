#include <CLI11.hpp>

#include <iostream>

#include "qzd/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quantum Zeno dynamics: spectra, dark states, protocols and sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> flags;

  const std::vector<std::pair<std::string, std::string>> verbs{
      {"spectrum", "Strong-coupling spectrum of a branch versus the closed form"},
      {"darkstates", "Dark-state residuals and printed bright-state check"},
      {"protocol", "Run one protocol and report fidelity / negativity"},
      {"sweep", "Grid sweep over one or two parameters (CSV or JSON)"},
      {"compare", "Full versus effective evolution fidelity over time"}};

  for (const auto& [name, help] : verbs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Config file (key = value, optional [protocol] sections)");
    for (const auto& key : qzd::cli::config_keys()) sub->add_option("--" + key, flags[name + "/" + key]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  auto* sub = app.get_subcommands().front();
  qzd::cli::KeyValues overrides;
  for (const auto& key : qzd::cli::config_keys())
    if (sub->get_option("--" + key)->count() > 0) overrides[key] = flags[command + "/" + key];

  try {
    const auto sections = config_path.empty() ? qzd::cli::ConfigSections{} : qzd::cli::read_config_file(config_path);
    const auto cfg = qzd::cli::resolve_config(command, sections, overrides);
    qzd::cli::dispatch(cfg, std::cout);
  } catch (const qzd::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qzd::InvalidSpec& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const qzd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

// Command line front end: one subcommand per experiment, every config key
// available as a --flag, plus --config FILE and --dry-run.

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "gkdv/error.hpp"
#include "gkdv/io.hpp"
#include "gkdv/run.hpp"

namespace {

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_file;
  bool dry_run = false;
  std::map<std::string, std::optional<std::string>> values;
  std::map<std::string, bool> flags;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace gkdv;
  CLI::App app{"gkdv: pseudospectral laboratory for supercritical generalized KdV"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cli::kVersion));

  std::vector<Subcommand> subs(cli::experiments().size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    auto& s = subs[i];
    s.app = app.add_subcommand(cli::experiments()[i]);
    s.app->add_option("--config", s.config_file, "key=value config file");
    s.app->add_flag("--dry-run", s.dry_run, "print the resolved plan without computing");
    for (const auto& k : cli::schema()) {
      if (k.type == cli::KeyType::boolean) {
        s.app->add_flag("--" + dashed(k.key), s.flags[k.key], k.help);
      } else {
        s.app->add_option("--" + dashed(k.key), s.values[k.key], k.help);
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kInvalid;
  }

  for (auto& s : subs) {
    if (!s.app->parsed()) continue;
    try {
      cli::KeyValues file_values;
      if (!s.config_file.empty()) file_values = cli::parse_config_text(io::read_file(s.config_file));
      cli::KeyValues overrides;
      for (const auto& [k, v] : s.values)
        if (v) overrides[k] = *v;
      for (const auto& [k, on] : s.flags)
        if (on) overrides[k] = "true";
      cli::RunConfig cfg = cli::resolve(s.app->get_name(), file_values, overrides);
      cfg.dry_run = s.dry_run;
      return cli::run(cfg, std::cout, std::cerr);
    } catch (const ValidationError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return cli::kInvalid;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return cli::kInvalid;
    }
  }
  return cli::kInvalid;
}

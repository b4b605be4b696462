#include "sftlab/app.hpp"

#include <new>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sft/error.hpp"
#include "sft/parallel.hpp"
#include "sftlab/commands.hpp"
#include "sftlab/config.hpp"
#include "sftlab/manifest.hpp"

namespace sftlab {

using nlohmann::json;

int exit_code(const std::exception& e) {
  if (const auto* s = dynamic_cast<const sft::Error*>(&e)) {
    switch (s->kind()) {
      case sft::ErrorKind::numeric:
        return 3;
      case sft::ErrorKind::capacity:
        return 4;
      default:
        return 2;
    }
  }
  if (dynamic_cast<const std::bad_alloc*>(&e)) return 4;
  if (dynamic_cast<const json::exception*>(&e)) return 2;
  return 1;
}

namespace {

json error_json(const std::exception& e) {
  json j{{"status", "error"}, {"message", e.what()}, {"exit_code", exit_code(e)}};
  if (const auto* s = dynamic_cast<const sft::Error*>(&e)) j["error"] = sft::to_string(s->kind());
  else if (dynamic_cast<const std::bad_alloc*>(&e)) j["error"] = "capacity";
  else if (dynamic_cast<const json::exception*>(&e)) j["error"] = "config";
  else j["error"] = "internal";
  if (const auto* c = dynamic_cast<const sft::ConfigError*>(&e)) j["violations"] = c->violations();
  return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cut-off string field theory lab"};
  app.name("sftlab");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::string out_dir;
  app.add_option("--config", config_path, "YAML experiment config");
  app.add_option("--set", sets, "Override, key=value with a dotted key")->take_all();
  app.add_option("--seed", seed, "Master seed (global.seed)");
  app.add_option("--workers", workers, "Worker threads, 0 for all cores");
  app.add_option("--out", out_dir, "Output directory (output.dir)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Report every violated invariant without running");
  validate->add_option("path", validate_path, "Config file (defaults to --config)");

  std::optional<int> graphs_n;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, cmd] : command_table()) {
    (void)cmd;
    subs[name] = app.add_subcommand(name);
  }
  subs.at("graphs")->add_option("--n", graphs_n, "Number of split vertices (graphs.n)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << json{{"status", "error"}, {"error", "usage"}, {"message", e.what()}, {"exit_code", 2}}.dump() << "\n";
    return 2;
  }

  try {
    if (seed) sets.push_back("global.seed=" + std::to_string(*seed));
    if (!out_dir.empty()) sets.push_back("output.dir=\"" + out_dir + "\"");
    if (graphs_n) sets.push_back("graphs.n=" + std::to_string(*graphs_n));

    if (validate->parsed()) {
      const auto c = load_config(validate_path.empty() ? config_path : validate_path, sets);
      const auto v = violations(c);
      out << json{{"valid", v.empty()}, {"violations", v}, {"config_hash", config_hash(c)}}.dump(2) << "\n";
      return v.empty() ? 0 : 2;
    }

    const auto c = load_config(config_path, sets);
    if (auto v = violations(c); !v.empty()) throw sft::ConfigError(std::move(v));
    sft::set_worker_count(workers);

    for (const auto& [name, cmd] : command_table()) {
      if (!subs.at(name)->parsed()) continue;
      RunRecorder rec(c.at("output").at("dir").get<std::string>(), name, c);
      const json summary = cmd(c, rec);
      const auto manifest = rec.finish(summary);
      out << json{{"status", "ok"}, {"subcommand", name}, {"manifest", manifest.string()}, {"summary", summary}}.dump(2)
          << "\n";
      return 0;
    }
    throw sft::UsageError("no subcommand given");
  } catch (const std::exception& e) {
    err << error_json(e).dump() << "\n";
    return exit_code(e);
  }
}

}  // namespace sftlab

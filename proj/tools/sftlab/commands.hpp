#pragma once
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "sftlab/manifest.hpp"

namespace sftlab {

/// Runs one subcommand on a validated config, writing artifacts through rec.
/// Returns the summary stored in the manifest and printed on stdout.
using Command = nlohmann::json (*)(const nlohmann::json& config, RunRecorder& rec);

nlohmann::json cmd_fock_dump(const nlohmann::json& c, RunRecorder& rec);
nlohmann::json cmd_twopoint(const nlohmann::json& c, RunRecorder& rec);
nlohmann::json cmd_fk_check(const nlohmann::json& c, RunRecorder& rec);
nlohmann::json cmd_vertex(const nlohmann::json& c, RunRecorder& rec);
nlohmann::json cmd_partition(const nlohmann::json& c, RunRecorder& rec);
nlohmann::json cmd_cauchy(const nlohmann::json& c, RunRecorder& rec);

nlohmann::json cmd_graphs(const nlohmann::json& c, RunRecorder& rec);
nlohmann::json cmd_moment(const nlohmann::json& c, RunRecorder& rec);
nlohmann::json cmd_activity(const nlohmann::json& c, RunRecorder& rec);

nlohmann::json cmd_surface(const nlohmann::json& c, RunRecorder& rec);
nlohmann::json cmd_spectrum(const nlohmann::json& c, RunRecorder& rec);
nlohmann::json cmd_detlap(const nlohmann::json& c, RunRecorder& rec);
nlohmann::json cmd_conjecture(const nlohmann::json& c, RunRecorder& rec);

const std::map<std::string, Command>& command_table();

}  // namespace sftlab

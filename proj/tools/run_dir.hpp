#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "longwrite/profile_config.hpp"

namespace longwrite::cli {

// One output directory per invocation, never reused. The stamp records
// everything needed to rerun the command: version, semantic parameters,
// resolved profile, and SHA-256 digests of every input file. Deliberately no
// timestamps or raw argv inside, so identical runs stamp identically.
struct RunContext {
  std::filesystem::path dir;
  nlohmann::ordered_json stamp;

  void add_param(const std::string& key, nlohmann::ordered_json value);
  void add_input(const std::string& role, const std::filesystem::path& path);
  void add_profile(const ProfileConfig& config, const std::string& key = "profile");

  // Writes run_config.json; call once parameters and inputs are complete,
  // before any backend traffic, so even interrupted runs carry provenance.
  void write_stamp() const;

  void write_text(const std::string& name, std::string_view content) const;
};

// Creates <out>/<run_id>, or <out>/run-<UTC time> when run_id is empty.
// Refuses to touch an existing directory.
RunContext open_run_dir(const std::filesystem::path& out, const std::string& run_id,
                        const std::string& command);

}  // namespace longwrite::cli

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "longwrite/backend.hpp"

namespace longwrite {

enum class BackendKind { http, scripted };

// A named entry from a profiles file. Scripted profiles point at JSONL reply
// scripts or substring-rule files (paths are resolved against the config
// file's directory), http profiles at a chat-completion endpoint.
struct ProfileConfig {
  BackendKind kind = BackendKind::http;
  BackendProfile profile;
  std::filesystem::path script_file;
  std::filesystem::path rules_file;
};

// Parses the key-value profile format:
//
//   [profile <name>]
//   key = value
//
// '#' starts a comment; blank lines separate nothing in particular.
// Unknown keys are an error so typos fail loudly. See the README for the
// full key list.
std::map<std::string, ProfileConfig> load_profiles(const std::filesystem::path& path);

ProfileConfig get_profile(const std::map<std::string, ProfileConfig>& profiles,
                          const std::string& name);

// Instantiates the backend a profile describes; http profiles resolve their
// credential from the environment here.
std::unique_ptr<Backend> make_backend(const ProfileConfig& config);

}  // namespace longwrite

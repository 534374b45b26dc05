#include "longwrite/profile_config.hpp"

#include <fstream>
#include <stdexcept>

#include "longwrite/http_backend.hpp"
#include "longwrite/jsonl.hpp"
#include "longwrite/scripted_backend.hpp"

namespace longwrite {

namespace {
std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void bad_line(const std::filesystem::path& path, size_t line,
                           const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

void apply_key(ProfileConfig& cfg, const std::string& key, const std::string& value,
               const std::filesystem::path& path, size_t line) {
  auto as_int = [&]() -> int64_t {
    try {
      return std::stoll(value);
    } catch (const std::exception&) {
      bad_line(path, line, "expected integer for " + key + ", got \"" + value + "\"");
    }
  };
  auto as_double = [&]() -> double {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      bad_line(path, line, "expected number for " + key + ", got \"" + value + "\"");
    }
  };

  if (key == "type") {
    if (value == "http") {
      cfg.kind = BackendKind::http;
    } else if (value == "scripted") {
      cfg.kind = BackendKind::scripted;
    } else {
      bad_line(path, line, "unknown backend type \"" + value + "\"");
    }
  } else if (key == "endpoint_url") {
    cfg.profile.endpoint_url = value;
  } else if (key == "api_key_env") {
    cfg.profile.api_key_env = value;
  } else if (key == "model_id") {
    cfg.profile.model_id = value;
  } else if (key == "temperature") {
    cfg.profile.temperature = as_double();
  } else if (key == "max_output_tokens") {
    cfg.profile.max_output_tokens = as_int();
  } else if (key == "request_timeout_s") {
    cfg.profile.request_timeout_s = static_cast<int>(as_int());
  } else if (key == "max_retries") {
    cfg.profile.max_retries = static_cast<int>(as_int());
  } else if (key == "max_concurrency") {
    cfg.profile.max_concurrency = static_cast<int>(as_int());
  } else if (key == "retry_base_ms") {
    cfg.profile.retry_base_ms = as_int();
  } else if (key == "script") {
    cfg.script_file = path.parent_path() / value;
  } else if (key == "rules") {
    cfg.rules_file = path.parent_path() / value;
  } else {
    bad_line(path, line, "unknown key \"" + key + "\"");
  }
}
}  // namespace

std::map<std::string, ProfileConfig> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open profiles file " + path.string());
  }

  std::map<std::string, ProfileConfig> profiles;
  ProfileConfig* current = nullptr;
  std::string raw;
  size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad_line(path, number, "unterminated section header");
      std::string header = trim(line.substr(1, line.size() - 2));
      constexpr std::string_view kPrefix = "profile ";
      if (header.rfind(kPrefix, 0) != 0) {
        bad_line(path, number, "expected [profile <name>]");
      }
      std::string name = trim(header.substr(kPrefix.size()));
      if (name.empty()) bad_line(path, number, "empty profile name");
      if (profiles.count(name)) bad_line(path, number, "duplicate profile " + name);
      ProfileConfig cfg;
      cfg.profile.name = name;
      current = &profiles.emplace(name, std::move(cfg)).first->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad_line(path, number, "expected key = value");
    if (current == nullptr) bad_line(path, number, "key outside of a [profile] section");
    apply_key(*current, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), path,
              number);
  }

  for (const auto& [name, cfg] : profiles) {
    if (cfg.kind == BackendKind::http && cfg.profile.endpoint_url.empty()) {
      throw std::runtime_error("profile " + name + ": http profiles need endpoint_url");
    }
    if (cfg.kind == BackendKind::scripted && cfg.script_file.empty() &&
        cfg.rules_file.empty()) {
      throw std::runtime_error("profile " + name +
                               ": scripted profiles need script or rules");
    }
  }
  return profiles;
}

ProfileConfig get_profile(const std::map<std::string, ProfileConfig>& profiles,
                          const std::string& name) {
  auto it = profiles.find(name);
  if (it == profiles.end()) {
    std::string known;
    for (const auto& [n, _] : profiles) {
      if (!known.empty()) known += ", ";
      known += n;
    }
    throw std::runtime_error("no profile named \"" + name + "\" (have: " + known + ")");
  }
  return it->second;
}

std::unique_ptr<Backend> make_backend(const ProfileConfig& config) {
  if (config.kind == BackendKind::scripted) {
    auto backend = std::make_unique<ScriptedBackend>(config.profile);
    if (!config.script_file.empty()) load_script_file(*backend, config.script_file);
    if (!config.rules_file.empty()) load_rules_file(*backend, config.rules_file);
    return backend;
  }
  return std::make_unique<HttpBackend>(config.profile);
}

}  // namespace longwrite

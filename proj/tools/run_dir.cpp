#include "run_dir.hpp"

#include <chrono>
#include <ctime>
#include <stdexcept>

#include "longwrite/digest.hpp"
#include "longwrite/jsonl.hpp"
#include "longwrite/types.hpp"

namespace longwrite::cli {
namespace {

std::string utc_run_id() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "run-%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

}  // namespace

void RunContext::add_param(const std::string& key, nlohmann::ordered_json value) {
  stamp["parameters"][key] = std::move(value);
}

void RunContext::add_input(const std::string& role, const std::filesystem::path& path) {
  nlohmann::ordered_json entry;
  entry["path"] = path.string();
  entry["sha256"] = sha256_file_hex(path);
  stamp["inputs"][role] = std::move(entry);
}

void RunContext::add_profile(const ProfileConfig& config, const std::string& key) {
  nlohmann::ordered_json entry;
  entry["name"] = config.profile.name;
  entry["type"] = config.kind == BackendKind::scripted ? "scripted" : "http";
  if (config.kind == BackendKind::http) {
    entry["endpoint_url"] = config.profile.endpoint_url;
    entry["api_key_env"] = config.profile.api_key_env;  // the name, never the value
  } else {
    if (!config.script_file.empty()) entry["script"] = config.script_file.string();
    if (!config.rules_file.empty()) entry["rules"] = config.rules_file.string();
  }
  entry["model_id"] = config.profile.model_id;
  entry["temperature"] = config.profile.temperature;
  entry["max_output_tokens"] = config.profile.max_output_tokens;
  entry["request_timeout_s"] = config.profile.request_timeout_s;
  entry["max_retries"] = config.profile.max_retries;
  entry["max_concurrency"] = config.profile.max_concurrency;
  entry["retry_base_ms"] = config.profile.retry_base_ms;
  stamp[key] = std::move(entry);
}

void RunContext::write_stamp() const {
  write_file(dir / "run_config.json", stamp.dump(2) + "\n");
}

void RunContext::write_text(const std::string& name, std::string_view content) const {
  write_file(dir / name, content);
}

RunContext open_run_dir(const std::filesystem::path& out, const std::string& run_id,
                        const std::string& command) {
  std::filesystem::path dir = out / (run_id.empty() ? utc_run_id() : run_id);
  if (std::filesystem::exists(dir)) {
    throw std::runtime_error("run directory already exists: " + dir.string() +
                             " (runs are never overwritten; pick another --run-id)");
  }
  std::filesystem::create_directories(dir);

  RunContext ctx;
  ctx.dir = dir;
  ctx.stamp["version"] = std::string(kVersion);
  ctx.stamp["command"] = command;
  ctx.stamp["parameters"] = nlohmann::ordered_json::object();
  ctx.stamp["inputs"] = nlohmann::ordered_json::object();
  return ctx;
}

}  // namespace longwrite::cli

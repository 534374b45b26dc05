#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>

#include "longwrite/backend.hpp"
#include "longwrite/scripted_backend.hpp"

namespace testsupport {

// Unique directory under the build tree's temp area, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<uint64_t> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("longwrite-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline longwrite::BackendProfile mock_profile(int max_concurrency = 4,
                                              int max_retries = 3) {
  longwrite::BackendProfile p;
  p.name = "test";
  p.model_id = "scripted-test";
  p.max_concurrency = max_concurrency;
  p.max_retries = max_retries;
  p.retry_base_ms = 0;  // retries must not slow the suite down
  return p;
}

}  // namespace testsupport

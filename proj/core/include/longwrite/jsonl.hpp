#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace longwrite {

// Raised by loaders on malformed input; line is 1-based, 0 when not line
// addressable (whole-file problems).
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& message, size_t line = 0)
      : std::runtime_error(line ? message + " (line " + std::to_string(line) + ")"
                                : message),
        line_(line) {}

  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Calls fn(line, line_number) for every line of a JSONL file. Blank lines are
// skipped but still advance the line counter. Throws SchemaError when the
// file cannot be opened.
void for_each_jsonl_line(
    const std::filesystem::path& path,
    const std::function<void(std::string_view, size_t)>& fn);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace longwrite

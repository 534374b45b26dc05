#include "longwrite/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace longwrite {

void for_each_jsonl_line(
    const std::filesystem::path& path,
    const std::function<void(std::string_view, size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SchemaError("cannot open " + path.string());
  }
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line, number);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

}  // namespace longwrite

#include "longwrite/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <stdexcept>

namespace longwrite {

namespace {
std::string to_hex(const unsigned char* data, size_t len) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (size_t i = 0; i < len; ++i) {
    out.push_back(kHex[data[i] >> 4]);
    out.push_back(kHex[data[i] & 0x0F]);
  }
  return out;
}

struct MdCtx {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  ~MdCtx() { EVP_MD_CTX_free(ctx); }
};
}  // namespace

std::string sha256_hex(std::string_view bytes) {
  MdCtx md;
  unsigned char hash[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!md.ctx || EVP_DigestInit_ex(md.ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(md.ctx, bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(md.ctx, hash, &len) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  return to_hex(hash, len);
}

std::string sha256_file_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  MdCtx md;
  if (!md.ctx || EVP_DigestInit_ex(md.ctx, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  std::array<char, 65536> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    const std::streamsize n = in.gcount();
    if (n > 0 && EVP_DigestUpdate(md.ctx, buf.data(), static_cast<size_t>(n)) != 1) {
      throw std::runtime_error("sha256 digest failed");
    }
  }
  unsigned char hash[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(md.ctx, hash, &len) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  return to_hex(hash, len);
}

}  // namespace longwrite

#include "sonni/digest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "sonni/util.hpp"

namespace sonni {

Digest32 sha256(const uint8_t* data, size_t n) {
  Digest32 out{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("EVP_MD_CTX_new failed");
  bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
            EVP_DigestUpdate(ctx, data, n) == 1 &&
            EVP_DigestFinal_ex(ctx, out.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok || len != out.size()) throw std::runtime_error("sha256 failed");
  return out;
}

Digest32 sha256(const std::vector<uint8_t>& bytes) {
  return sha256(bytes.data(), bytes.size());
}

std::string digest_hex(const Digest32& d) { return to_hex(d.data(), d.size()); }

std::string to_hex(const uint8_t* data, size_t n) {
  static const char* k = "0123456789abcdef";
  std::string s;
  s.reserve(2 * n);
  for (size_t i = 0; i < n; ++i) {
    s.push_back(k[data[i] >> 4]);
    s.push_back(k[data[i] & 0xf]);
  }
  return s;
}

std::string to_hex(const std::vector<uint8_t>& bytes) {
  return to_hex(bytes.data(), bytes.size());
}

}  // namespace sonni

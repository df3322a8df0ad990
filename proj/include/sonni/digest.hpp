#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sonni {

using Digest32 = std::array<uint8_t, 32>;

// SHA-256 of a byte buffer (OpenSSL libcrypto under the hood).
Digest32 sha256(const uint8_t* data, size_t n);
Digest32 sha256(const std::vector<uint8_t>& bytes);

std::string digest_hex(const Digest32& d);

}  // namespace sonni

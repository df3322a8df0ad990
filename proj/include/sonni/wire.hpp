#pragma once

#include <cstdint>
#include <vector>

#include "sonni/messages.hpp"

namespace sonni {

// Canonical message body: one tag byte, then the little-endian payload
// encoding. Digest and transcript lines are computed over these bytes.
std::vector<uint8_t> encode_message(const ProtocolMessage& msg);

// Inverse of encode_message. Rejects unknown tags, malformed payloads, and
// trailing bytes.
ProtocolMessage decode_message(const uint8_t* data, size_t n);
ProtocolMessage decode_message(const std::vector<uint8_t>& body);

// Full frame: 4-byte big-endian length of the body, then the body.
std::vector<uint8_t> encode_frame(const ProtocolMessage& msg);

// Reads one big-endian u32 length from the head of a buffer.
uint32_t frame_length(const uint8_t header[4]);

// Individual field codecs, shared with tests.
void encode_ciphertext(std::vector<uint8_t>& out, const MockCiphertext& ct);
MockCiphertext decode_ciphertext(ByteReader& r);
void encode_permutation(std::vector<uint8_t>& out, const Permutation& p);
Permutation decode_permutation(ByteReader& r);

}  // namespace sonni

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sonni/digest.hpp"
#include "sonni/engine.hpp"
#include "sonni/shuffle.hpp"

namespace sonni {

// Wire tags, one per message type.
enum class MsgTag : uint8_t {
  SubmitInput = 0x01,
  EvalRequest = 0x02,
  EvalResult = 0x03,
  CheckRequest = 0x04,
  CheckResponse = 0x05,
  Unmask = 0x06,
  Abort = 0x07,
};

std::string tag_name(MsgTag tag);

struct SubmitInput {
  MockCiphertext ct;
};

struct EvalRequest {
  MockCiphertext input_ct;
  std::vector<MockCiphertext> param_cts;
  uint32_t degree = 0;
};

struct EvalResult {
  MockCiphertext result_ct;
};

// In sonni mode masked_ct is the rand-masked result and canary_positions
// names the slots the client must hash. In legacy mode masked_ct is the
// bare result, canary_positions is empty, and the share lets the client
// decrypt immediately.
struct CheckRequest {
  MockCiphertext masked_ct;
  PartialShare provider_share;
  std::vector<uint32_t> canary_positions;
};

struct CheckResponse {
  Digest32 hash{};
};

struct Unmask {
  SlotVector rand;
  Permutation perm;
};

struct Abort {
  std::string reason;
};

using ProtocolMessage = std::variant<SubmitInput, EvalRequest, EvalResult,
                                     CheckRequest, CheckResponse, Unmask, Abort>;

MsgTag message_tag(const ProtocolMessage& msg);

// One routed message. seq numbers are fixed by the protocol flow (0
// SubmitInput through 6 Unmask/Abort) so transcripts from different
// transports line up. Parties are 'C', 'P', 'S'.
struct Envelope {
  uint32_t seq = 0;
  char sender = 0;
  char receiver = 0;
  ProtocolMessage msg;
};

}  // namespace sonni

#include "sonni/wire.hpp"

#include <stdexcept>

namespace sonni {

std::string tag_name(MsgTag tag) {
  switch (tag) {
    case MsgTag::SubmitInput: return "SubmitInput";
    case MsgTag::EvalRequest: return "EvalRequest";
    case MsgTag::EvalResult: return "EvalResult";
    case MsgTag::CheckRequest: return "CheckRequest";
    case MsgTag::CheckResponse: return "CheckResponse";
    case MsgTag::Unmask: return "Unmask";
    case MsgTag::Abort: return "Abort";
  }
  throw std::logic_error("unknown message tag");
}

MsgTag message_tag(const ProtocolMessage& msg) {
  return static_cast<MsgTag>(msg.index() + 1);
}

void encode_ciphertext(std::vector<uint8_t>& out, const MockCiphertext& ct) {
  encode_slots(out, ct.payload);
  ct.keyset.encode(out);
  put_f64le(out, ct.noise_bound);
  put_u32le(out, ct.op_counts.adds);
  put_u32le(out, ct.op_counts.mults);
  put_u32le(out, ct.op_counts.rotations);
  put_u64le(out, ct.tag);
}

MockCiphertext decode_ciphertext(ByteReader& r) {
  MockCiphertext ct;
  ct.payload = decode_slots(r);
  ct.keyset = KeySet::decode(r);
  ct.noise_bound = r.f64le();
  ct.op_counts.adds = r.u32le();
  ct.op_counts.mults = r.u32le();
  ct.op_counts.rotations = r.u32le();
  ct.tag = r.u64le();
  if (ct.keyset.empty()) throw std::runtime_error("ciphertext with empty keyset");
  return ct;
}

void encode_permutation(std::vector<uint8_t>& out, const Permutation& p) {
  put_u32le(out, static_cast<uint32_t>(p.forward.size()));
  for (uint32_t v : p.forward) put_u32le(out, v);
}

Permutation decode_permutation(ByteReader& r) {
  uint32_t n = r.u32le();
  std::vector<uint32_t> fwd(n);
  for (uint32_t i = 0; i < n; ++i) fwd[i] = r.u32le();
  return Permutation::from_forward(std::move(fwd));
}

namespace {

void put_digest(std::vector<uint8_t>& out, const Digest32& d) {
  out.insert(out.end(), d.begin(), d.end());
}

Digest32 take_digest(ByteReader& r) {
  Digest32 d{};
  r.need(d.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = r.u8();
  return d;
}

void put_positions(std::vector<uint8_t>& out, const std::vector<uint32_t>& v) {
  put_u32le(out, static_cast<uint32_t>(v.size()));
  for (uint32_t p : v) put_u32le(out, p);
}

std::vector<uint32_t> take_positions(ByteReader& r) {
  uint32_t n = r.u32le();
  std::vector<uint32_t> v(n);
  for (uint32_t i = 0; i < n; ++i) v[i] = r.u32le();
  return v;
}

struct BodyEncoder {
  std::vector<uint8_t>& out;

  void operator()(const SubmitInput& m) { encode_ciphertext(out, m.ct); }
  void operator()(const EvalRequest& m) {
    encode_ciphertext(out, m.input_ct);
    put_u32le(out, m.degree);
    put_u32le(out, static_cast<uint32_t>(m.param_cts.size()));
    for (const MockCiphertext& ct : m.param_cts) encode_ciphertext(out, ct);
  }
  void operator()(const EvalResult& m) { encode_ciphertext(out, m.result_ct); }
  void operator()(const CheckRequest& m) {
    encode_ciphertext(out, m.masked_ct);
    put_digest(out, m.provider_share.ciphertext_digest);
    out.push_back(m.provider_share.removed_key);
    out.insert(out.end(), m.provider_share.payload.begin(),
               m.provider_share.payload.end());
    put_positions(out, m.canary_positions);
  }
  void operator()(const CheckResponse& m) { put_digest(out, m.hash); }
  void operator()(const Unmask& m) {
    encode_slots(out, m.rand);
    encode_permutation(out, m.perm);
  }
  void operator()(const Abort& m) {
    put_u32le(out, static_cast<uint32_t>(m.reason.size()));
    out.insert(out.end(), m.reason.begin(), m.reason.end());
  }
};

}  // namespace

std::vector<uint8_t> encode_message(const ProtocolMessage& msg) {
  std::vector<uint8_t> out;
  out.push_back(static_cast<uint8_t>(message_tag(msg)));
  std::visit(BodyEncoder{out}, msg);
  return out;
}

ProtocolMessage decode_message(const uint8_t* data, size_t n) {
  ByteReader r{data, n};
  uint8_t tag = r.u8();
  ProtocolMessage msg;
  switch (static_cast<MsgTag>(tag)) {
    case MsgTag::SubmitInput:
      msg = SubmitInput{decode_ciphertext(r)};
      break;
    case MsgTag::EvalRequest: {
      EvalRequest m;
      m.input_ct = decode_ciphertext(r);
      m.degree = r.u32le();
      uint32_t cnt = r.u32le();
      m.param_cts.reserve(cnt);
      for (uint32_t i = 0; i < cnt; ++i) m.param_cts.push_back(decode_ciphertext(r));
      msg = std::move(m);
      break;
    }
    case MsgTag::EvalResult:
      msg = EvalResult{decode_ciphertext(r)};
      break;
    case MsgTag::CheckRequest: {
      CheckRequest m;
      m.masked_ct = decode_ciphertext(r);
      m.provider_share.ciphertext_digest = take_digest(r);
      m.provider_share.removed_key = r.u8();
      m.provider_share.payload = take_digest(r);
      m.canary_positions = take_positions(r);
      msg = std::move(m);
      break;
    }
    case MsgTag::CheckResponse:
      msg = CheckResponse{take_digest(r)};
      break;
    case MsgTag::Unmask: {
      Unmask m;
      m.rand = decode_slots(r);
      m.perm = decode_permutation(r);
      msg = std::move(m);
      break;
    }
    case MsgTag::Abort: {
      uint32_t len = r.u32le();
      std::vector<uint8_t> bytes = r.bytes(len);
      msg = Abort{std::string(bytes.begin(), bytes.end())};
      break;
    }
    default:
      throw std::runtime_error("unknown message tag");
  }
  if (!r.done()) throw std::runtime_error("trailing bytes after message");
  return msg;
}

ProtocolMessage decode_message(const std::vector<uint8_t>& body) {
  return decode_message(body.data(), body.size());
}

std::vector<uint8_t> encode_frame(const ProtocolMessage& msg) {
  std::vector<uint8_t> body = encode_message(msg);
  std::vector<uint8_t> out;
  out.reserve(4 + body.size());
  uint32_t n = static_cast<uint32_t>(body.size());
  out.push_back(static_cast<uint8_t>(n >> 24));
  out.push_back(static_cast<uint8_t>(n >> 16));
  out.push_back(static_cast<uint8_t>(n >> 8));
  out.push_back(static_cast<uint8_t>(n));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

uint32_t frame_length(const uint8_t header[4]) {
  return static_cast<uint32_t>(header[0]) << 24 |
         static_cast<uint32_t>(header[1]) << 16 |
         static_cast<uint32_t>(header[2]) << 8 | static_cast<uint32_t>(header[3]);
}

}  // namespace sonni

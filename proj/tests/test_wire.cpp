#include <doctest.h>

#include <cstdio>
#include <stdexcept>
#include <string>

#include "sonni/transcript.hpp"
#include "sonni/wire.hpp"
#include "test_support.hpp"

using namespace sonni;
using test::rand_ct;
using test::rand_digest;
using test::rand_msg;

TEST_SUITE("wire") {

TEST_CASE("ten thousand random messages survive the codec bit for bit") {
  Rng rng(2026);
  for (int i = 0; i < 10000; ++i) {
    ProtocolMessage msg = rand_msg(rng, i);
    std::vector<uint8_t> body = encode_message(msg);
    ProtocolMessage back = decode_message(body);
    CHECK(message_tag(back) == message_tag(msg));
    REQUIRE(encode_message(back) == body);

    std::vector<uint8_t> trailing = body;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_message(trailing), std::runtime_error);
    CHECK_THROWS_AS(decode_message(body.data(), body.size() - 1),
                    std::runtime_error);

    std::vector<uint8_t> frame = encode_frame(msg);
    REQUIRE(frame.size() == body.size() + 4);
    CHECK(frame_length(frame.data()) == body.size());
    CHECK(std::equal(body.begin(), body.end(), frame.begin() + 4));
  }
}

TEST_CASE("frame header is big endian") {
  const uint8_t header[4] = {0x01, 0x02, 0x03, 0x04};
  CHECK(frame_length(header) == 0x01020304u);
  std::vector<uint8_t> frame = encode_frame(Abort{"ok"});
  // body: tag byte + u32 length + 2 chars = 7
  CHECK(frame[0] == 0);
  CHECK(frame[1] == 0);
  CHECK(frame[2] == 0);
  CHECK(frame[3] == 7);
}

TEST_CASE("decoder rejects unknown tags and garbage") {
  CHECK_THROWS_AS(decode_message(std::vector<uint8_t>{0x00}),
                  std::runtime_error);
  CHECK_THROWS_AS(decode_message(std::vector<uint8_t>{0x7f, 1, 2, 3}),
                  std::runtime_error);
  CHECK_THROWS_AS(decode_message(std::vector<uint8_t>{}), std::exception);
}

TEST_CASE("ciphertext codec covers every field and rejects empty keysets") {
  Rng rng(7);
  MockCiphertext ct = rand_ct(rng);
  std::vector<uint8_t> buf;
  encode_ciphertext(buf, ct);
  ByteReader r{buf.data(), buf.size()};
  MockCiphertext back = decode_ciphertext(r);
  CHECK(r.done());
  CHECK(back.payload == ct.payload);
  CHECK(back.keyset == ct.keyset);
  CHECK(back.noise_bound == ct.noise_bound);
  CHECK(back.op_counts == ct.op_counts);
  CHECK(back.tag == ct.tag);
  CHECK(back.digest() == ct.digest());

  MockCiphertext keyless;
  keyless.payload = {1.0};
  CHECK_THROWS_AS(decode_message(encode_message(SubmitInput{keyless})),
                  std::runtime_error);

  // Keyset ids must arrive strictly increasing.
  std::vector<uint8_t> bad;
  bad.push_back(uint8_t(MsgTag::SubmitInput));
  put_u32le(bad, 0);  // zero slots
  bad.push_back(2);
  bad.push_back(kProviderKey);
  bad.push_back(kClientKey);
  CHECK_THROWS_AS(decode_message(bad), std::runtime_error);
}

TEST_CASE("message tags map one to one onto names") {
  CHECK(message_tag(ProtocolMessage{SubmitInput{}}) == MsgTag::SubmitInput);
  CHECK(message_tag(ProtocolMessage{EvalRequest{}}) == MsgTag::EvalRequest);
  CHECK(message_tag(ProtocolMessage{EvalResult{}}) == MsgTag::EvalResult);
  CHECK(message_tag(ProtocolMessage{CheckRequest{}}) == MsgTag::CheckRequest);
  CHECK(message_tag(ProtocolMessage{CheckResponse{}}) == MsgTag::CheckResponse);
  CHECK(message_tag(ProtocolMessage{Unmask{}}) == MsgTag::Unmask);
  CHECK(message_tag(ProtocolMessage{Abort{}}) == MsgTag::Abort);
  CHECK(tag_name(MsgTag::SubmitInput) == "SubmitInput");
  CHECK(tag_name(MsgTag::EvalRequest) == "EvalRequest");
  CHECK(tag_name(MsgTag::EvalResult) == "EvalResult");
  CHECK(tag_name(MsgTag::CheckRequest) == "CheckRequest");
  CHECK(tag_name(MsgTag::CheckResponse) == "CheckResponse");
  CHECK(tag_name(MsgTag::Unmask) == "Unmask");
  CHECK(tag_name(MsgTag::Abort) == "Abort");
}

TEST_CASE("transcript entries record the framed bytes") {
  Envelope env{3, 'S', 'C', EvalResult{MockCiphertext{
                                {1.0, 2.0}, KeySet{kClientKey}, 1e-9,
                                OpCounts{}, 42}}};
  std::vector<uint8_t> body = encode_message(env.msg);
  TranscriptEntry e = make_entry(env);
  CHECK(e.seq == 3);
  CHECK(e.sender == 'S');
  CHECK(e.receiver == 'C');
  CHECK(e.tag == MsgTag::EvalResult);
  CHECK(e.frame_len == body.size() + 4);
  CHECK(e.payload_digest == sha256(body));
  CHECK(e.body.empty());
  CHECK(make_entry(env, true).body == body);

  std::string line = transcript_line(e, false);
  std::string want = "seq=3 from=S to=C tag=EvalResult len=" +
                     std::to_string(body.size() + 4) +
                     " payload=" + digest_hex(e.payload_digest);
  CHECK(line == want);
  std::string timed = transcript_line(e, true);
  CHECK(strip_time(timed) == want);
  CHECK(strip_time(want) == want);
}

TEST_CASE("transcript merge orders by seq and strips times stably") {
  std::string a_path = "wire_merge_a.txt";
  std::string b_path = "wire_merge_b.txt";
  std::string out_path = "wire_merge_out.txt";
  write_text_file(a_path, "seq=4 from=P to=C tag=CheckRequest len=1 payload=aa time=5\n"
                          "seq=0 from=C to=P tag=SubmitInput len=1 payload=bb time=1\n");
  write_text_file(b_path, "seq=2 from=S to=P tag=EvalResult len=1 payload=cc\n");
  merge_transcript_files({a_path, b_path}, out_path);
  std::string merged = read_text_file(out_path);
  CHECK(merged ==
        "seq=0 from=C to=P tag=SubmitInput len=1 payload=bb time=1\n"
        "seq=2 from=S to=P tag=EvalResult len=1 payload=cc\n"
        "seq=4 from=P to=C tag=CheckRequest len=1 payload=aa time=5\n");
  CHECK(strip_time_text(merged) ==
        "seq=0 from=C to=P tag=SubmitInput len=1 payload=bb\n"
        "seq=2 from=S to=P tag=EvalResult len=1 payload=cc\n"
        "seq=4 from=P to=C tag=CheckRequest len=1 payload=aa\n");
  std::remove(a_path.c_str());
  std::remove(b_path.c_str());
  std::remove(out_path.c_str());
}

}  // TEST_SUITE

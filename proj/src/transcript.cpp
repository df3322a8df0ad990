#include "sonni/transcript.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sonni/wire.hpp"

namespace sonni {

TranscriptEntry make_entry(const Envelope& env, bool keep_body) {
  std::vector<uint8_t> body = encode_message(env.msg);
  TranscriptEntry e;
  e.seq = env.seq;
  e.sender = env.sender;
  e.receiver = env.receiver;
  e.tag = message_tag(env.msg);
  e.frame_len = static_cast<uint32_t>(4 + body.size());
  e.payload_digest = sha256(body);
  e.time_ns = static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  if (keep_body) e.body = std::move(body);
  return e;
}

std::string transcript_line(const TranscriptEntry& e, bool with_time) {
  std::ostringstream os;
  os << "seq=" << e.seq << " from=" << e.sender << " to=" << e.receiver
     << " tag=" << tag_name(e.tag) << " len=" << e.frame_len
     << " payload=" << digest_hex(e.payload_digest);
  if (!e.body.empty()) os << " body=" << to_hex(e.body);
  if (with_time) os << " time=" << e.time_ns;
  return os.str();
}

void write_transcript(const Transcript& t, const std::string& path,
                      bool with_time, bool debug_payloads) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open transcript file: " + path);
  for (const TranscriptEntry& e : t.entries) {
    if (!debug_payloads && !e.body.empty()) {
      TranscriptEntry copy = e;
      copy.body.clear();
      out << transcript_line(copy, with_time) << "\n";
    } else {
      out << transcript_line(e, with_time) << "\n";
    }
  }
}

namespace {

uint32_t line_seq(const std::string& line) {
  if (line.rfind("seq=", 0) != 0)
    throw std::runtime_error("transcript line without seq: " + line);
  return static_cast<uint32_t>(std::stoul(line.substr(4)));
}

}  // namespace

void merge_transcript_files(const std::vector<std::string>& inputs,
                            const std::string& output) {
  std::vector<std::string> lines;
  for (const std::string& path : inputs) {
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) lines.push_back(line);
  }
  std::stable_sort(lines.begin(), lines.end(),
                   [](const std::string& a, const std::string& b) {
                     return line_seq(a) < line_seq(b);
                   });
  std::string out;
  for (const std::string& line : lines) {
    out += line;
    out += "\n";
  }
  write_text_file(output, out);
}

std::string strip_time(const std::string& line) {
  size_t pos = line.rfind(" time=");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string strip_time_text(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    out += strip_time(line);
    out += "\n";
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << text;
}

}  // namespace sonni

#pragma once

#include <string>
#include <vector>

#include "sonni/protocol.hpp"

namespace sonni {

// Builds a log entry from a routed message: wire length, body digest,
// capture timestamp, and (in debug mode) the full body bytes.
TranscriptEntry make_entry(const Envelope& env, bool keep_body = false);

// One line per entry: "seq=0 from=C to=P tag=SubmitInput len=... payload=..."
// with an optional trailing " time=<ns>" token.
std::string transcript_line(const TranscriptEntry& e, bool with_time);

void write_transcript(const Transcript& t, const std::string& path,
                      bool with_time = true, bool debug_payloads = false);

// Merges per-party transcript files into one canonical file ordered by seq.
void merge_transcript_files(const std::vector<std::string>& inputs,
                            const std::string& output);

// Strips the volatile " time=..." token so transcripts from different runs
// and transports can be compared byte for byte.
std::string strip_time(const std::string& line);
std::string strip_time_text(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sonni

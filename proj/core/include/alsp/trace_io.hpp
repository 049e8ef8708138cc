#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "alsp/sequence.hpp"

namespace alsp {

// On-disk layout, all integers little-endian:
//
//   offset 0   8 bytes  magic "ALSPTRC1"
//   offset 8   u32      format version (kTraceVersion)
//   offset 12  u64      header length H in bytes
//   offset 20  H bytes  UTF-8 JSON header
//   offset 20+H         payload: per-layer row-major float32 matrices at the
//                       byte offsets declared in the header, relative to the
//                       payload start
//
// Header keys: model, dim, frame_rate, text_len, layers[{index, rows, offset}],
// words[[label, start_s, end_s]], transcript, attributes{string: string}.

inline constexpr std::string_view kTraceMagic = "ALSPTRC1";
inline constexpr std::uint32_t kTraceVersion = 1;

struct WordTimestamp {
  std::string label;
  double start_s = 0.0;
  double end_s = 0.0;
  friend bool operator==(const WordTimestamp&, const WordTimestamp&) = default;
};

struct TraceLayer {
  int index = 0;
  HiddenSequence states;
  friend bool operator==(const TraceLayer&, const TraceLayer&) = default;
};

struct TraceFile {
  std::string model;
  std::size_t dim = 1;
  double frame_rate = 25.0;
  std::size_t text_len = 0;
  std::vector<TraceLayer> layers;
  std::vector<WordTimestamp> words;
  std::string transcript;
  std::map<std::string, std::string> attributes;

  const HiddenSequence* find_layer(int index) const noexcept;
  /// Throws MissingLayer.
  const HiddenSequence& layer(int index) const;
  std::vector<int> layer_indices() const;
  /// Audio token count of the first layer; 0 for a trace without layers.
  std::size_t audio_len() const noexcept;

  /// Throws MalformedHeader naming the first violated invariant.
  void validate() const;

  friend bool operator==(const TraceFile&, const TraceFile&) = default;
};

std::string encode_trace(const TraceFile& trace);
TraceFile decode_trace(std::string_view bytes);

void write_trace(const std::filesystem::path& path, const TraceFile& trace);
TraceFile read_trace(const std::filesystem::path& path);

/// Maps word timestamps onto tokens by the midpoint rule: token i covers
/// [i/fr, (i+1)/fr) and belongs to the word containing (i + 0.5)/fr.
/// Words that contain no token midpoint are dropped.
Alignment timestamps_to_alignment(const std::vector<WordTimestamp>& words, double frame_rate,
                                  std::size_t audio_len);

/// Alignment of the trace's words over its audio tokens.
Alignment trace_alignment(const TraceFile& trace);

}  // namespace alsp

#include "alsp/trace_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "alsp/error.hpp"

namespace alsp {
namespace {

using json = nlohmann::json;

constexpr std::size_t kPreambleSize = 8 + 4 + 8;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::string_view bytes, std::size_t pos) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  return value;
}

void put_floats(std::string& out, std::span<const float> values) {
  for (float f : values) put_le(out, std::bit_cast<std::uint32_t>(f));
}

[[noreturn]] void malformed(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::MalformedHeader, fmt::format("field '{}': {}", field, what));
}

template <typename T>
T field(const json& header, const char* key) {
  if (!header.contains(key)) malformed(key, "missing");
  try {
    return header.at(key).get<T>();
  } catch (const json::exception& e) {
    malformed(key, e.what());
  }
}

}  // namespace

const HiddenSequence* TraceFile::find_layer(int index) const noexcept {
  for (const auto& l : layers) {
    if (l.index == index) return &l.states;
  }
  return nullptr;
}

const HiddenSequence& TraceFile::layer(int index) const {
  if (const auto* s = find_layer(index)) return *s;
  throw Error(ErrorCode::MissingLayer, fmt::format("trace has no layer {}", index));
}

std::vector<int> TraceFile::layer_indices() const {
  std::vector<int> out;
  out.reserve(layers.size());
  for (const auto& l : layers) out.push_back(l.index);
  return out;
}

std::size_t TraceFile::audio_len() const noexcept {
  return layers.empty() ? 0 : layers.front().states.rows();
}

void TraceFile::validate() const {
  if (dim == 0) malformed("dim", "must be >= 1");
  if (!std::isfinite(frame_rate) || frame_rate <= 0.0) malformed("frame_rate", "must be positive");
  std::set<int> seen;
  for (const auto& l : layers) {
    if (l.index < 0) malformed("layers", fmt::format("negative layer index {}", l.index));
    if (!seen.insert(l.index).second) {
      malformed("layers", fmt::format("duplicate layer index {}", l.index));
    }
    if (l.states.dim() != dim) {
      malformed("layers", fmt::format("layer {} has dim {}, header dim {}", l.index,
                                      l.states.dim(), dim));
    }
  }
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto& word = words[w];
    if (!(std::isfinite(word.start_s) && std::isfinite(word.end_s)) ||
        !(word.start_s < word.end_s)) {
      malformed("words", fmt::format("word {} ('{}') needs start < end", w, word.label));
    }
    if (w > 0 && !(words[w - 1].start_s < word.start_s)) {
      malformed("words", fmt::format("word {} ('{}') is not ordered by start", w, word.label));
    }
  }
}

std::string encode_trace(const TraceFile& trace) {
  trace.validate();

  json header;
  header["model"] = trace.model;
  header["dim"] = trace.dim;
  header["frame_rate"] = trace.frame_rate;
  header["text_len"] = trace.text_len;
  json layers = json::array();
  std::uint64_t offset = 0;
  for (const auto& l : trace.layers) {
    layers.push_back({{"index", l.index}, {"rows", l.states.rows()}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(l.states.rows()) * trace.dim * sizeof(float);
  }
  header["layers"] = std::move(layers);
  json words = json::array();
  for (const auto& w : trace.words) words.push_back(json::array({w.label, w.start_s, w.end_s}));
  header["words"] = std::move(words);
  header["transcript"] = trace.transcript;
  header["attributes"] = trace.attributes;

  const std::string text = header.dump();
  std::string out;
  out.reserve(kPreambleSize + text.size() + offset);
  out.append(kTraceMagic);
  put_le<std::uint32_t>(out, kTraceVersion);
  put_le<std::uint64_t>(out, text.size());
  out.append(text);
  for (const auto& l : trace.layers) put_floats(out, l.states.data());
  return out;
}

TraceFile decode_trace(std::string_view bytes) {
  if (bytes.size() < kTraceMagic.size() || bytes.substr(0, kTraceMagic.size()) != kTraceMagic) {
    throw Error(ErrorCode::BadMagic, "file does not start with ALSPTRC1");
  }
  if (bytes.size() < kPreambleSize) {
    throw Error(ErrorCode::TruncatedPayload, "preamble shorter than 20 bytes");
  }
  const auto version = get_le<std::uint32_t>(bytes, 8);
  if (version != kTraceVersion) {
    throw Error(ErrorCode::VersionMismatch,
                fmt::format("field 'version': {} (supported: {})", version, kTraceVersion));
  }
  const auto header_len = get_le<std::uint64_t>(bytes, 12);
  if (header_len > bytes.size() - kPreambleSize) {
    throw Error(ErrorCode::TruncatedPayload,
                fmt::format("field 'header_length': {} bytes declared, {} available", header_len,
                            bytes.size() - kPreambleSize));
  }
  const std::string_view header_text = bytes.substr(kPreambleSize, header_len);
  const std::string_view payload = bytes.substr(kPreambleSize + header_len);

  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::parse_error& e) {
    malformed("header", e.what());
  }
  if (!header.is_object()) malformed("header", "not an object");

  TraceFile trace;
  trace.model = field<std::string>(header, "model");
  trace.dim = field<std::size_t>(header, "dim");
  trace.frame_rate = field<double>(header, "frame_rate");
  trace.text_len = field<std::size_t>(header, "text_len");
  trace.transcript = field<std::string>(header, "transcript");
  if (header.contains("attributes")) {
    trace.attributes = field<std::map<std::string, std::string>>(header, "attributes");
  }
  if (trace.dim == 0) malformed("dim", "must be >= 1");
  if (!std::isfinite(trace.frame_rate) || trace.frame_rate <= 0.0) {
    malformed("frame_rate", "must be positive");
  }

  const auto words = field<json>(header, "words");
  if (!words.is_array()) malformed("words", "not an array");
  for (const auto& w : words) {
    if (!w.is_array() || w.size() != 3 || !w[0].is_string() || !w[1].is_number() ||
        !w[2].is_number()) {
      malformed("words", "entries must be [label, start_s, end_s]");
    }
    trace.words.push_back({w[0].get<std::string>(), w[1].get<double>(), w[2].get<double>()});
  }

  const auto layers = field<json>(header, "layers");
  if (!layers.is_array()) malformed("layers", "not an array");
  for (const auto& l : layers) {
    int index = 0;
    std::uint64_t rows = 0;
    std::uint64_t offset = 0;
    try {
      index = l.at("index").get<int>();
      rows = l.at("rows").get<std::uint64_t>();
      offset = l.at("offset").get<std::uint64_t>();
    } catch (const json::exception& e) {
      malformed("layers", e.what());
    }
    const std::uint64_t count = rows * trace.dim;
    const std::uint64_t nbytes = count * sizeof(float);
    if (offset > payload.size() || nbytes > payload.size() - offset) {
      throw Error(ErrorCode::TruncatedPayload,
                  fmt::format("field 'layers[{}]': needs {} bytes at offset {}, payload has {}",
                              index, nbytes, offset, payload.size()));
    }
    std::vector<float> data(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      data[i] = std::bit_cast<float>(get_le<std::uint32_t>(payload, offset + 4 * i));
    }
    trace.layers.push_back(
        {index, HiddenSequence(rows, trace.dim, std::move(data), trace.frame_rate)});
  }
  trace.validate();
  return trace;
}

void write_trace(const std::filesystem::path& path, const TraceFile& trace) {
  const std::string bytes = encode_trace(trace);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot open {} for writing", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, fmt::format("short write to {}", path.string()));
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_trace(bytes);
}

Alignment timestamps_to_alignment(const std::vector<WordTimestamp>& words, double frame_rate,
                                  std::size_t audio_len) {
  if (!(frame_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "frame_rate must be positive");
  const double duration = static_cast<double>(audio_len) / frame_rate;
  constexpr double kSlack = 1e-9;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto& word = words[w];
    if (!(word.start_s < word.end_s) || (w > 0 && word.start_s < words[w - 1].end_s)) {
      throw Error(ErrorCode::UnorderedTimestamps,
                  fmt::format("word {} ('{}') [{}, {})", w, word.label, word.start_s, word.end_s));
    }
    if (word.start_s < -kSlack || word.end_s > duration + kSlack) {
      throw Error(ErrorCode::OutOfRange,
                  fmt::format("word {} ('{}') [{}, {}) outside [0, {}]", w, word.label,
                              word.start_s, word.end_s, duration));
    }
  }

  std::vector<AlignedUnit> units;
  std::size_t w = 0;
  std::size_t token = 0;
  while (w < words.size() && token < audio_len) {
    const double mid = (static_cast<double>(token) + 0.5) / frame_rate;
    if (mid >= words[w].end_s) {
      ++w;
      continue;
    }
    if (mid < words[w].start_s) {
      ++token;
      continue;
    }
    const std::size_t begin = token;
    while (token < audio_len &&
           (static_cast<double>(token) + 0.5) / frame_rate < words[w].end_s) {
      ++token;
    }
    units.push_back({words[w].label, begin, token});
    ++w;
  }
  return Alignment(std::move(units), audio_len);
}

Alignment trace_alignment(const TraceFile& trace) {
  return timestamps_to_alignment(trace.words, trace.frame_rate, trace.audio_len());
}

}  // namespace alsp

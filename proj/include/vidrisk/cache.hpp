#pragma once

// Embedding cache files (.vemb).
//
// Layout, little-endian:
//   "VEMB" | u16 version=1 | u8 kind | u32 dim | u32 count
//   | count*dim float32 row-major | u32 CRC32 of the float payload
//
// kind 0 is a FRAME stack (count = number of frames); kinds 1..3 hold a
// single vector (count = 1).

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vidrisk/binary_io.hpp"
#include "vidrisk/embedding.hpp"
#include "vidrisk/error.hpp"

namespace vidrisk {

inline constexpr char kCacheMagic[4] = {'V', 'E', 'M', 'B'};
inline constexpr std::uint16_t kCacheVersion = 1;
inline constexpr std::size_t kCacheHeaderSize = 4 + 2 + 1 + 4 + 4;

using CachedEmbedding = std::variant<EmbeddingStack, EmbeddingVector>;

namespace detail {

inline std::vector<std::uint8_t> encode_cache(EmbeddingKind kind, std::size_t dim,
                                              std::span<const EmbeddingVector> rows) {
  ByteWriter header;
  header.raw(std::string_view(kCacheMagic, 4));
  header.u16(kCacheVersion);
  header.u8(static_cast<std::uint8_t>(kind));
  header.u32(static_cast<std::uint32_t>(dim));
  header.u32(static_cast<std::uint32_t>(rows.size()));
  ByteWriter payload;
  for (const auto& row : rows) {
    for (float v : row.values()) payload.f32(v);
  }
  auto out = header.take();
  const auto& body = payload.bytes();
  out.insert(out.end(), body.begin(), body.end());
  ByteWriter crc;
  crc.u32(crc32(body));
  out.insert(out.end(), crc.bytes().begin(), crc.bytes().end());
  return out;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_cache(const EmbeddingStack& stack) {
  return detail::encode_cache(EmbeddingKind::kFrame, stack.dim(), stack.vectors());
}

inline std::vector<std::uint8_t> encode_cache(const EmbeddingVector& vector) {
  if (vector.kind() == EmbeddingKind::kFrame) {
    fail(ErrorCode::kKindMismatch, "single FRAME vectors are cached as a stack of one");
  }
  return detail::encode_cache(vector.kind(), vector.dim(), std::span(&vector, 1));
}

/// Decodes a cache image. Each format failure has its own error code:
/// kBadMagic, kUnsupportedVersion, kTruncated, kChecksumMismatch, and
/// kCorruptFile for structurally invalid headers or trailing bytes.
inline CachedEmbedding decode_cache(std::span<const std::uint8_t> bytes) {
  ByteReader reader(bytes, ErrorCode::kTruncated);
  if (bytes.size() >= 4 && !std::equal(kCacheMagic, kCacheMagic + 4, bytes.begin())) {
    fail(ErrorCode::kBadMagic, "not an embedding cache (bad magic)");
  }
  reader.raw(4);
  const auto version = reader.u16();
  if (version != kCacheVersion) {
    fail(ErrorCode::kUnsupportedVersion,
         "unsupported embedding cache version " + std::to_string(version));
  }
  const auto kind_byte = reader.u8();
  if (kind_byte > static_cast<std::uint8_t>(EmbeddingKind::kFused)) {
    fail(ErrorCode::kCorruptFile, "invalid embedding kind byte " + std::to_string(kind_byte));
  }
  const auto kind = static_cast<EmbeddingKind>(kind_byte);
  const std::uint32_t dim = reader.u32();
  const std::uint32_t count = reader.u32();
  if (dim == 0 || count == 0) fail(ErrorCode::kCorruptFile, "cache declares zero dim or count");
  if (kind != EmbeddingKind::kFrame && count != 1) {
    fail(ErrorCode::kCorruptFile, "single-vector cache declares count " + std::to_string(count));
  }
  const std::uint64_t payload_size = static_cast<std::uint64_t>(dim) * count * 4;
  if (reader.remaining() < payload_size + 4) {
    fail(ErrorCode::kTruncated, "cache declares " + std::to_string(count) + "x" +
                                    std::to_string(dim) + " values but holds only " +
                                    std::to_string(reader.remaining()) + " payload bytes");
  }
  if (reader.remaining() > payload_size + 4) {
    fail(ErrorCode::kCorruptFile, "trailing bytes after cache payload");
  }
  const auto payload = reader.raw(static_cast<std::size_t>(payload_size));
  const auto stored_crc = reader.u32();
  if (crc32(payload) != stored_crc) fail(ErrorCode::kChecksumMismatch, "cache payload CRC mismatch");

  ByteReader values(payload);
  std::vector<EmbeddingVector> rows;
  rows.reserve(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    std::vector<float> row(dim);
    for (auto& v : row) v = values.f32();
    try {
      rows.emplace_back(kind, std::move(row));
    } catch (const Error& e) {
      fail(ErrorCode::kCorruptFile, std::string("cache row invalid: ") + e.what());
    }
  }
  if (kind == EmbeddingKind::kFrame) return EmbeddingStack({}, std::move(rows));
  return std::move(rows.front());
}

inline void cache_write(const std::filesystem::path& path, const EmbeddingStack& stack) {
  write_file_bytes(path, encode_cache(stack));
}

inline void cache_write(const std::filesystem::path& path, const EmbeddingVector& vector) {
  write_file_bytes(path, encode_cache(vector));
}

inline CachedEmbedding cache_read(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_cache(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

inline EmbeddingStack cache_read_stack(const std::filesystem::path& path) {
  auto cached = cache_read(path);
  if (auto* stack = std::get_if<EmbeddingStack>(&cached)) return std::move(*stack);
  fail(ErrorCode::kKindMismatch, path.string() + ": expected a FRAME stack");
}

inline EmbeddingVector cache_read_vector(const std::filesystem::path& path, EmbeddingKind expected) {
  auto cached = cache_read(path);
  auto* vector = std::get_if<EmbeddingVector>(&cached);
  if (!vector || vector->kind() != expected) {
    fail(ErrorCode::kKindMismatch,
         path.string() + ": expected a " + std::string(to_string(expected)) + " vector");
  }
  return std::move(*vector);
}

/// One line of a cache sidecar: which backend produced a cache file and the
/// hash of the inputs it was computed from.
struct CacheSidecarRecord {
  std::string video_id;
  std::string file;
  EmbeddingKind kind = EmbeddingKind::kFrame;
  std::string backend_id;
  std::string version;
  std::string input_hash;

  friend bool operator==(const CacheSidecarRecord&, const CacheSidecarRecord&) = default;
};

inline nlohmann::json to_json(const CacheSidecarRecord& r) {
  return {{"video_id", r.video_id},     {"file", r.file},       {"kind", to_string(r.kind)},
          {"backend_id", r.backend_id}, {"version", r.version}, {"input_hash", r.input_hash}};
}

inline void write_sidecar(const std::filesystem::path& path,
                          std::span<const CacheSidecarRecord> records) {
  std::string text;
  for (const auto& r : records) text += to_json(r).dump() + "\n";
  write_file_text(path, text);
}

inline std::vector<CacheSidecarRecord> read_sidecar(const std::filesystem::path& path) {
  std::vector<CacheSidecarRecord> records;
  std::istringstream in(read_file_text(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      records.push_back({j.at("video_id").get<std::string>(), j.at("file").get<std::string>(),
                         embedding_kind_from_string(j.at("kind").get<std::string>()),
                         j.at("backend_id").get<std::string>(), j.at("version").get<std::string>(),
                         j.at("input_hash").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, path.string() + ": malformed sidecar record: " + e.what());
    }
  }
  return records;
}

}  // namespace vidrisk

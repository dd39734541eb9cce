#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "vidrisk/binary_io.hpp"
#include "vidrisk/error.hpp"

namespace vidrisk {

namespace detail {

inline std::string to_hex(std::span<const unsigned char> digest) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (unsigned char c : digest) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xf]);
  }
  return out;
}

inline std::string evp_digest(const EVP_MD* md, std::span<const std::string_view> parts) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1) {
    fail(ErrorCode::kIo, "digest initialization failed");
  }
  for (auto part : parts) EVP_DigestUpdate(ctx.get(), part.data(), part.size());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  return to_hex({digest, len});
}

}  // namespace detail

inline std::string sha256_hex(std::string_view data) {
  std::string_view parts[] = {data};
  return detail::evp_digest(EVP_sha256(), parts);
}

inline std::string sha256_hex(std::span<const std::uint8_t> data) {
  return sha256_hex(
      std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

/// Content hash in git's blob form: sha1("blob <size>\0" + content).
inline std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::string_view parts[] = {header, content};
  return detail::evp_digest(EVP_sha1(), parts);
}

inline std::string git_blob_hash_file(const std::filesystem::path& path) {
  return git_blob_hash(read_file_text(path));
}

}  // namespace vidrisk

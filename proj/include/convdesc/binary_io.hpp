#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace convdesc {

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Lowercase hex SHA-256.
std::string sha256Hex(std::span<const std::uint8_t> bytes);
std::string sha256Hex(std::string_view text);

std::vector<std::uint8_t> readFileBytes(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over the target.
void writeFileAtomic(const std::filesystem::path& path,
                     std::span<const std::uint8_t> bytes);

/// Little-endian record builder. finishWithCrc() appends the CRC32 of
/// everything written so far.
class ByteWriter {
 public:
  void magic(std::string_view fourcc);
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void f32(float v);
  void f32s(std::span<const float> values);
  void string(std::string_view s);  // u32 length prefix + UTF-8 bytes

  std::vector<std::uint8_t> finishWithCrc();
  const std::vector<std::uint8_t>& bytes() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

/// Reader over a CRC-trailed record. The constructor verifies the trailing
/// CRC32 and throws IntegrityError on mismatch; truncation is a FormatError.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string context);

  void expectMagic(std::string_view fourcc);
  std::uint8_t u8();
  std::uint32_t u32();
  float f32();
  std::vector<float> f32s(std::size_t count);
  std::string string();

  /// Throws FormatError unless the payload was consumed exactly.
  void expectEnd() const;
  const std::string& context() const { return context_; }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> payload_;
  std::size_t pos_ = 0;
  std::string context_;
};

}  // namespace convdesc

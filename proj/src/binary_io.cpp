#include "convdesc/binary_io.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <memory>

#include "convdesc/errors.hpp"

namespace convdesc {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swaps");

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const auto chunk = static_cast<uInt>(
        std::min<std::size_t>(bytes.size() - offset, 1u << 30));
    crc = ::crc32(crc, bytes.data() + offset, chunk);
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string sha256Hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256Hex(std::string_view text) {
  return sha256Hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

std::vector<std::uint8_t> readFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return bytes;
}

void writeFileAtomic(const std::filesystem::path& path,
                     std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename into " + path.string() + ": " + ec.message());
}

void ByteWriter::magic(std::string_view fourcc) {
  buf_.insert(buf_.end(), fourcc.begin(), fourcc.end());
}

void ByteWriter::u8(std::uint8_t v) { buf_.push_back(v); }

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::f32s(std::span<const float> values) {
  const std::size_t start = buf_.size();
  buf_.resize(start + values.size() * 4);
  if (!values.empty()) std::memcpy(buf_.data() + start, values.data(), values.size() * 4);
}

void ByteWriter::string(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
}

std::vector<std::uint8_t> ByteWriter::finishWithCrc() {
  const std::uint32_t crc = crc32(buf_);
  u32(crc);
  return std::move(buf_);
}

ByteReader::ByteReader(std::span<const std::uint8_t> bytes, std::string context)
    : context_(std::move(context)) {
  if (bytes.size() < 8) throw FormatError(context_ + ": file too short");
  payload_ = bytes.first(bytes.size() - 4);
  const auto* tail = bytes.data() + payload_.size();
  const std::uint32_t stored = static_cast<std::uint32_t>(tail[0]) |
                               (static_cast<std::uint32_t>(tail[1]) << 8) |
                               (static_cast<std::uint32_t>(tail[2]) << 16) |
                               (static_cast<std::uint32_t>(tail[3]) << 24);
  if (stored != crc32(payload_)) {
    throw IntegrityError(context_ + ": CRC32 mismatch");
  }
}

void ByteReader::need(std::size_t n) const {
  if (payload_.size() - pos_ < n) throw FormatError(context_ + ": truncated record");
}

void ByteReader::expectMagic(std::string_view fourcc) {
  need(fourcc.size());
  if (std::memcmp(payload_.data() + pos_, fourcc.data(), fourcc.size()) != 0) {
    throw FormatError(context_ + ": bad magic, expected " + std::string(fourcc));
  }
  pos_ += fourcc.size();
}

std::uint8_t ByteReader::u8() {
  need(1);
  return payload_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(payload_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

std::vector<float> ByteReader::f32s(std::size_t count) {
  if (count > (payload_.size() - pos_) / 4) throw FormatError(context_ + ": truncated float array");
  std::vector<float> out(count);
  if (count) std::memcpy(out.data(), payload_.data() + pos_, count * 4);
  pos_ += count * 4;
  return out;
}

std::string ByteReader::string() {
  const std::uint32_t len = u32();
  need(len);
  std::string s(reinterpret_cast<const char*>(payload_.data() + pos_), len);
  pos_ += len;
  return s;
}

void ByteReader::expectEnd() const {
  if (pos_ != payload_.size()) throw FormatError(context_ + ": trailing bytes after record");
}

}  // namespace convdesc

#include "nids/io/binary.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "nids/common/error.hpp"

namespace nids::io {

namespace {

template <typename T>
void put_le(std::string& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

// Guards against absurd length prefixes in corrupt files before allocating.
constexpr std::uint64_t kMaxLength = std::uint64_t{1} << 40;

}  // namespace

void Writer::u32(std::uint32_t v) { put_le(buf_, v); }
void Writer::u64(std::uint64_t v) { put_le(buf_, v); }
void Writer::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }

void Writer::str(std::string_view s) {
  u64(s.size());
  buf_.append(s);
}

void Writer::f64s(std::span<const double> v) {
  u64(v.size());
  for (double x : v) f64(x);
}

void Writer::u64s(std::span<const std::size_t> v) {
  u64(v.size());
  for (auto x : v) u64(x);
}

void Writer::strs(const std::vector<std::string>& v) {
  u64(v.size());
  for (const auto& s : v) str(s);
}

void Reader::need(std::size_t n) const {
  if (buf_.size() - pos_ < n) throw DataError("model file truncated");
}

std::uint8_t Reader::u8() {
  need(1);
  return static_cast<std::uint8_t>(buf_[pos_++]);
}

std::uint32_t Reader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<std::uint8_t>(buf_[pos_ + i])} << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t Reader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<std::uint8_t>(buf_[pos_ + i])} << (8 * i);
  pos_ += 8;
  return v;
}

double Reader::f64() { return std::bit_cast<double>(u64()); }

std::uint64_t Reader::length() {
  const auto n = u64();
  if (n > kMaxLength) throw DataError("model file corrupt: implausible length");
  return n;
}

std::string Reader::str() {
  const auto n = length();
  need(n);
  std::string s = buf_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::vector<double> Reader::f64s() {
  const auto n = length();
  need(n * 8);
  std::vector<double> v(n);
  for (auto& x : v) x = f64();
  return v;
}

std::vector<std::size_t> Reader::u64s() {
  const auto n = length();
  need(n * 8);
  std::vector<std::size_t> v(n);
  for (auto& x : v) x = u64();
  return v;
}

std::vector<std::string> Reader::strs() {
  const auto n = length();
  std::vector<std::string> v;
  for (std::uint64_t i = 0; i < n; ++i) v.push_back(str());
  return v;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError("cannot move " + tmp.string() + " into place");
  }
}

void save_container(const std::filesystem::path& path, std::string_view kind, const Writer& payload) {
  Writer header;
  header.u32(kFormatVersion);
  header.str(kind);
  std::string out(kMagic);
  out += header.bytes();
  out += payload.bytes();
  write_file_atomic(path, out);
}

Reader open_container(const std::filesystem::path& path, std::string& kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.compare(0, kMagic.size(), kMagic) != 0) {
    throw DataError(path.string() + " is not a model file (bad magic)");
  }
  Reader r(bytes.substr(kMagic.size()));
  const auto version = r.u32();
  if (version != kFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  kind = r.str();
  return r;
}

}  // namespace nids::io

#pragma once

// Little-endian binary container shared by every model kind. Layout:
//   "NIDSMODL"  8 bytes magic
//   u32         format version
//   string      model kind tag ("dense", "cnn", "wisard", ...)
//   ...         kind-specific payload written through Writer
// Strings and vectors carry a u64 length prefix. See docs/FORMATS.md.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nids::io {

inline constexpr std::string_view kMagic = "NIDSMODL";
inline constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);
  void f64s(std::span<const double> v);
  void u64s(std::span<const std::size_t> v);
  void strs(const std::vector<std::string>& v);

  const std::string& bytes() const noexcept { return buf_; }

 private:
  std::string buf_;
};

/// Bounds-checked reader; every accessor throws DataError on truncated input.
class Reader {
 public:
  explicit Reader(std::string bytes) : buf_(std::move(bytes)) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  std::vector<double> f64s();
  std::vector<std::size_t> u64s();
  std::vector<std::string> strs();

  bool at_end() const noexcept { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const;
  std::uint64_t length();

  std::string buf_;
  std::size_t pos_ = 0;
};

/// Writes header + payload atomically (temporary file, then rename).
void save_container(const std::filesystem::path& path, std::string_view kind, const Writer& payload);

/// Opens a container, checks magic and version, and leaves the reader at the
/// start of the payload. `kind` receives the tag.
Reader open_container(const std::filesystem::path& path, std::string& kind);

/// Writes `content` to `path` through a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace nids::io

// Copyright 2026 The qsgen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QSGEN_IO_UTIL_HPP_
#define QSGEN_IO_UTIL_HPP_

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsgen {

// Little-endian binary file primitives.  Byte order is assembled by hand so
// files are identical across platforms, and every read checks for
// truncation -- a short file is always a loud error, never garbage data.

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void bytes(const std::string& s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }

  void magic(const char (&m)[5]) { out_.write(m, 4); }

  // Flushes and verifies the stream; call before relying on the file.
  void close() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + path_);
    out_.close();
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open for reading: " + path);
  }

  std::uint8_t u8() {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof())
      throw std::runtime_error("truncated file: " + path_);
    return static_cast<std::uint8_t>(c);
  }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string bytes(std::size_t count) {
    std::string s(count, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in_.gcount()) != count)
      throw std::runtime_error("truncated file: " + path_);
    return s;
  }

  void expect_magic(const char (&m)[5]) {
    const std::string got = bytes(4);
    if (got != std::string(m, 4))
      throw std::runtime_error("bad magic in " + path_ + ": expected " +
                               std::string(m, 4) + ", found '" + got + "'");
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace qsgen

#endif  // QSGEN_IO_UTIL_HPP_

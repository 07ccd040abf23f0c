/*
 * Copyright 2026 The mprobe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include "npy.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "fileio.hpp"

static_assert(std::endian::native == std::endian::little, "npy I/O assumes a little-endian host");

namespace mprobe {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

[[noreturn]] void corrupt(const fs::path& path, const std::string& why) {
  throw Error(ErrorKind::CorruptTensorFile, path.string() + ": " + why);
}

// Returns the text following `'key':` up to (not including) the next
// top-level comma or closing brace.
std::string dict_value(const std::string& dict, const std::string& key, const fs::path& path) {
  const std::string needle = "'" + key + "'";
  auto pos = dict.find(needle);
  if (pos == std::string::npos) corrupt(path, "header lacks " + needle);
  pos = dict.find(':', pos + needle.size());
  if (pos == std::string::npos) corrupt(path, "malformed header near " + needle);
  ++pos;
  int depth = 0;
  std::size_t end = pos;
  for (; end < dict.size(); ++end) {
    const char c = dict[end];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && (c == ',' || c == '}')) break;
  }
  std::string v = dict.substr(pos, end - pos);
  const auto first = v.find_first_not_of(" \t");
  const auto last = v.find_last_not_of(" \t");
  return first == std::string::npos ? std::string() : v.substr(first, last - first + 1);
}

NpyHeader parse_header(std::istream& in, std::uint64_t file_size, const fs::path& path) {
  char magic[kMagicLen];
  if (!in.read(magic, kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0) {
    corrupt(path, "bad magic string");
  }
  unsigned char version[2];
  if (!in.read(reinterpret_cast<char*>(version), 2)) corrupt(path, "truncated preamble");
  std::size_t header_len = 0;
  std::size_t preamble = 0;
  if (version[0] == 1) {
    unsigned char b[2];
    if (!in.read(reinterpret_cast<char*>(b), 2)) corrupt(path, "truncated preamble");
    header_len = b[0] | (std::size_t{b[1]} << 8);
    preamble = 10;
  } else if (version[0] == 2 || version[0] == 3) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) corrupt(path, "truncated preamble");
    header_len = b[0] | (std::size_t{b[1]} << 8) | (std::size_t{b[2]} << 16) | (std::size_t{b[3]} << 24);
    preamble = 12;
  } else {
    corrupt(path, "unsupported format version " + std::to_string(version[0]));
  }
  if (preamble + header_len > file_size) corrupt(path, "truncated header");
  std::string dict(header_len, '\0');
  if (!in.read(dict.data(), static_cast<std::streamsize>(header_len))) corrupt(path, "truncated header");

  NpyHeader h;
  const std::string descr = dict_value(dict, "descr", path);
  if (descr == "'<f8'") {
    h.dtype = DType::Float64;
  } else if (descr == "'<f4'") {
    h.dtype = DType::Float32;
  } else {
    corrupt(path, "unsupported dtype " + descr);
  }
  if (dict_value(dict, "fortran_order", path) != "False") corrupt(path, "fortran_order arrays are not supported");

  std::string shape = dict_value(dict, "shape", path);
  if (shape.size() < 2 || shape.front() != '(' || shape.back() != ')') corrupt(path, "malformed shape " + shape);
  std::stringstream ss(shape.substr(1, shape.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item.substr(first), &used);
      if (v < 0) corrupt(path, "negative extent in shape");
      h.shape.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      corrupt(path, "malformed shape " + shape);
    }
  }
  h.data_offset = preamble + header_len;
  const std::uint64_t expected = h.data_offset + h.count() * item_size(h.dtype);
  if (file_size != expected) {
    corrupt(path, "payload is " + std::to_string(file_size - h.data_offset) + " bytes, header implies " +
                      std::to_string(expected - h.data_offset));
  }
  return h;
}

std::uint64_t size_of(const fs::path& path) {
  std::error_code ec;
  const auto sz = fs::file_size(path, ec);
  if (ec) throw Error(ErrorKind::MissingFile, path.string());
  return sz;
}

}  // namespace

std::string to_string(DType d) { return d == DType::Float32 ? "float32" : "float64"; }

DType parse_dtype(const std::string& s) {
  if (s == "float32") return DType::Float32;
  if (s == "float64") return DType::Float64;
  throw Error(ErrorKind::SchemaViolation, "dtype must be float32 or float64, got '" + s + "'");
}

std::size_t item_size(DType d) noexcept { return d == DType::Float32 ? 4 : 8; }

std::size_t NpyHeader::count() const noexcept {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

NpyHeader read_npy_header(const fs::path& path) {
  const auto sz = size_of(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  return parse_header(in, sz, path);
}

NpyArray read_npy(const fs::path& path) {
  const auto sz = size_of(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  const NpyHeader h = parse_header(in, sz, path);
  NpyArray a;
  a.dtype = h.dtype;
  a.shape = h.shape;
  const std::size_t n = h.count();
  a.values.resize(n);
  if (h.dtype == DType::Float64) {
    if (!in.read(reinterpret_cast<char*>(a.values.data()), static_cast<std::streamsize>(n * 8))) {
      corrupt(path, "truncated payload");
    }
  } else {
    std::vector<float> tmp(n);
    if (!in.read(reinterpret_cast<char*>(tmp.data()), static_cast<std::streamsize>(n * 4))) {
      corrupt(path, "truncated payload");
    }
    for (std::size_t i = 0; i < n; ++i) a.values[i] = tmp[i];
  }
  return a;
}

std::string encode_npy(std::span<const double> values, std::span<const std::size_t> shape, DType dtype) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  if (n != values.size()) {
    throw Error(ErrorKind::ShapeMismatch, "npy payload has " + std::to_string(values.size()) +
                                              " values, shape implies " + std::to_string(n));
  }
  std::string dict = "{'descr': '";
  dict += dtype == DType::Float32 ? "<f4" : "<f8";
  dict += "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dict += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) dict += ",";
    if (i + 1 < shape.size()) dict += " ";
  }
  dict += "), }";
  // Pad so that the payload starts on a 64-byte boundary.
  const std::size_t unpadded = 10 + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict += '\n';
  if (dict.size() > 0xffff) throw Error(ErrorKind::InvalidArgument, "npy header too long for v1.0");

  std::string out(kMagic, kMagicLen);
  out += static_cast<char>(1);
  out += static_cast<char>(0);
  out += static_cast<char>(dict.size() & 0xff);
  out += static_cast<char>((dict.size() >> 8) & 0xff);
  out += dict;
  if (dtype == DType::Float64) {
    out.append(reinterpret_cast<const char*>(values.data()), n * 8);
  } else {
    std::vector<float> tmp(values.begin(), values.end());
    out.append(reinterpret_cast<const char*>(tmp.data()), n * 4);
  }
  return out;
}

void write_npy(const fs::path& path, std::span<const double> values, std::span<const std::size_t> shape,
               DType dtype) {
  write_file_atomic(path, encode_npy(values, shape, dtype));
}

}  // namespace mprobe

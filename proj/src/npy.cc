// Copyright 2026 The compsyn Authors.
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

#include "compsyn/npy.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

#include "compsyn/errors.h"

namespace compsyn {

static_assert(std::endian::native == std::endian::little,
              "NPY codec assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr size_t kMagicLen = 6;

[[noreturn]] void Malformed(const std::string& why) {
  throw DataError("malformed NPY header: " + why);
}

std::string FindValue(const std::string& header, const std::string& key) {
  const std::string quoted = "'" + key + "'";
  const size_t at = header.find(quoted);
  if (at == std::string::npos) Malformed("missing key " + quoted);
  size_t colon = header.find(':', at + quoted.size());
  if (colon == std::string::npos) Malformed("no value for " + quoted);
  return header.substr(colon + 1);
}

std::vector<size_t> ParseShape(const std::string& rest) {
  const size_t open = rest.find('(');
  const size_t close = rest.find(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    Malformed("shape is not a tuple");
  }
  std::vector<size_t> shape;
  std::stringstream items(rest.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(items, item, ',')) {
    const size_t first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const size_t last = item.find_last_not_of(" \t");
    const std::string digits = item.substr(first, last - first + 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      Malformed("bad shape entry '" + digits + "'");
    }
    shape.push_back(std::stoull(digits));
  }
  return shape;
}

}  // namespace

NpyHeader ParseNpyHeader(const std::string& bytes) {
  if (bytes.size() < kMagicLen + 4 || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    Malformed("bad magic");
  }
  const auto major = static_cast<uint8_t>(bytes[6]);
  size_t header_len = 0;
  size_t prefix = 0;
  if (major == 1) {
    header_len = static_cast<uint8_t>(bytes[8]) |
                 (static_cast<size_t>(static_cast<uint8_t>(bytes[9])) << 8);
    prefix = 10;
  } else if (major == 2) {
    if (bytes.size() < 12) Malformed("truncated v2 preamble");
    for (int i = 0; i < 4; ++i)
      header_len |= static_cast<size_t>(static_cast<uint8_t>(bytes[8 + i])) << (8 * i);
    prefix = 12;
  } else {
    Malformed("unsupported format version " + std::to_string(major));
  }
  if (bytes.size() < prefix + header_len) Malformed("truncated header");
  const std::string header = bytes.substr(prefix, header_len);

  NpyHeader out;
  out.data_offset = prefix + header_len;

  const std::string descr_rest = FindValue(header, "descr");
  static const std::regex kDescr(R"(^\s*'([^']*)')");
  std::smatch m;
  if (!std::regex_search(descr_rest, m, kDescr)) Malformed("descr is not a string");
  const std::string descr = m[1];
  if (descr == "<f8") {
    out.dtype = DType::kF64;
  } else if (descr == "<f4") {
    out.dtype = DType::kF32;
  } else {
    throw DataError("unsupported NPY dtype '" + descr +
                    "' (expected little-endian <f4 or <f8)");
  }

  const std::string order = FindValue(header, "fortran_order");
  const size_t word = order.find_first_not_of(" \t");
  if (word == std::string::npos) Malformed("fortran_order has no value");
  if (order.compare(word, 4, "True") == 0) {
    throw DataError("unsupported NPY layout: fortran_order=True");
  }
  if (order.compare(word, 5, "False") != 0) Malformed("fortran_order is not a bool");

  out.shape = ParseShape(FindValue(header, "shape"));
  if (out.shape.empty() || out.shape.size() > 2) {
    throw DataError("unsupported NPY rank " + std::to_string(out.shape.size()) +
                    " (expected 1 or 2)");
  }
  return out;
}

Tensor DecodeNpy(const std::string& bytes) {
  const NpyHeader header = ParseNpyHeader(bytes);
  size_t count = 1;
  for (size_t d : header.shape) count *= d;
  const size_t item = header.dtype == DType::kF64 ? 8 : 4;
  const size_t payload = bytes.size() - header.data_offset;
  if (payload != count * item) {
    throw ShapeError("NPY payload holds " + std::to_string(payload) +
                     " bytes but shape " + ShapeString(header.shape) +
                     " needs " + std::to_string(count * item));
  }
  std::vector<double> data(count);
  const char* src = bytes.data() + header.data_offset;
  if (header.dtype == DType::kF64) {
    std::memcpy(data.data(), src, count * 8);
  } else {
    for (size_t i = 0; i < count; ++i) {
      float f;
      std::memcpy(&f, src + 4 * i, 4);
      data[i] = static_cast<double>(f);
    }
  }
  return Tensor(header.shape, std::move(data));
}

std::string EncodeNpy(const Tensor& tensor, DType dtype) {
  std::string shape = "(";
  for (size_t i = 0; i < tensor.shape().size(); ++i) {
    shape += std::to_string(tensor.shape()[i]);
    shape += (tensor.shape().size() == 1 || i + 1 < tensor.shape().size()) ? "," : "";
    if (i + 1 < tensor.shape().size()) shape += " ";
  }
  shape += ")";
  std::string header = std::string("{'descr': '") +
                       (dtype == DType::kF64 ? "<f8" : "<f4") +
                       "', 'fortran_order': False, 'shape': " + shape + ", }";
  // Pad so that the payload starts on a 64-byte boundary.
  const size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::string out(kMagic, kMagicLen);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(header.size() & 0xff));
  out.push_back(static_cast<char>((header.size() >> 8) & 0xff));
  out += header;
  if (dtype == DType::kF64) {
    out.append(reinterpret_cast<const char*>(tensor.data().data()), tensor.size() * 8);
  } else {
    for (double x : tensor.data()) {
      const float f = static_cast<float>(x);
      out.append(reinterpret_cast<const char*>(&f), 4);
    }
  }
  return out;
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFileBytes(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Tensor load_tensor(const std::filesystem::path& path) {
  try {
    return DecodeNpy(ReadFileBytes(path));
  } catch (const ShapeError& e) {
    throw ShapeError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_tensor(const std::filesystem::path& path, const Tensor& tensor, DType dtype) {
  WriteFileBytes(path, EncodeNpy(tensor, dtype));
}

}  // namespace compsyn

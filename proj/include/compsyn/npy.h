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

#ifndef COMPSYN_NPY_H_
#define COMPSYN_NPY_H_

#include <filesystem>
#include <string>
#include <vector>

#include "compsyn/tensor.h"

namespace compsyn {

enum class DType { kF32, kF64 };

// Decoded NPY header.
struct NpyHeader {
  DType dtype = DType::kF64;
  std::vector<size_t> shape;
  size_t data_offset = 0;
};

// Parses the header of an in-memory NPY file. Accepts format versions 1.0
// and 2.0, little-endian '<f4' / '<f8', C order, rank 1 or 2.
NpyHeader ParseNpyHeader(const std::string& bytes);

Tensor DecodeNpy(const std::string& bytes);
std::string EncodeNpy(const Tensor& tensor, DType dtype = DType::kF64);

// f32 payloads are widened to f64 exactly.
Tensor load_tensor(const std::filesystem::path& path);
void save_tensor(const std::filesystem::path& path, const Tensor& tensor,
                 DType dtype = DType::kF64);

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace compsyn

#endif  // COMPSYN_NPY_H_

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

#ifndef COMPSYN_MANIFEST_H_
#define COMPSYN_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "compsyn/tensor.h"

namespace compsyn {

enum class ManifestKind { kEmbeddingSet, kAttentionBundle, kCaptionPairSet };

std::string ToString(ManifestKind kind);

// A parsed manifest.json. Either a single record carrying its fields at top
// level, or a container {"kind", "id", "entries": [...]}; both normalize to
// a list of entries. Relative tensor paths resolve against `base_dir`.
struct Manifest {
  ManifestKind kind = ManifestKind::kEmbeddingSet;
  std::string id;
  std::filesystem::path base_dir;
  std::vector<nlohmann::json> entries;

  std::vector<std::string> EntryIds() const;
  const nlohmann::json& Entry(const std::string& entry_id) const;
  std::filesystem::path Resolve(const std::string& relative) const;
};

Manifest LoadManifest(const std::filesystem::path& path);
Manifest ParseManifest(const nlohmann::json& doc, std::filesystem::path base_dir);

struct EmbeddingSet {
  std::string id;
  std::vector<std::string> tokens;
  Tensor token_embeddings;                   // T x D
  std::optional<Tensor> sentence_embedding;  // 1 x D

  size_t dim() const { return token_embeddings.cols(); }
  // Row t as a 1 x D tensor.
  Tensor Token(size_t t) const;
};

// One head-averaged attention layer split into intra- and cross-modal
// blocks, language indices first.
struct AttentionLayer {
  Tensor ll;  // N_L x N_L
  Tensor lv;  // N_L x N_V
  Tensor vl;  // N_V x N_L
  Tensor vv;  // N_V x N_V
  size_t index = 0;

  size_t n_language() const { return ll.rows(); }
  size_t n_vision() const { return vv.rows(); }

  // Throws ShapeError unless the four blocks agree on N_L and N_V.
  void Validate() const;
  // Reassembles the (N_L+N_V)^2 matrix.
  Tensor Full() const;
  static AttentionLayer Split(const Tensor& full, size_t n_language,
                              size_t n_vision, size_t index = 0);
};

struct AttentionBundle {
  std::string id;
  size_t n_language = 0;
  size_t n_vision = 0;
  // Rows were already softmax-normalized by the exporter.
  bool normalized = false;
  std::vector<std::string> tokens;
  std::vector<AttentionLayer> layers;
};

struct CaptionPair {
  std::string caption0_id;
  std::string caption1_id;
  std::string image0_id;
  std::string image1_id;
  // s(C_i, I_j) when supplied.
  std::optional<Tensor> scores;
};

EmbeddingSet load_embedding_set(const Manifest& manifest, const std::string& id);
std::vector<EmbeddingSet> load_embedding_sets(const Manifest& manifest);
AttentionBundle load_attention_bundle(const Manifest& manifest, const std::string& id);
std::vector<CaptionPair> load_caption_pairs(const Manifest& manifest);

// Writers used by gen-fixtures and the tests. Tensors are written as
// <dir>/<id>.tokens.npy etc.; returned records use paths relative to dir.
nlohmann::json WriteEmbeddingEntry(const std::filesystem::path& dir,
                                   const EmbeddingSet& set);
nlohmann::json WriteAttentionEntry(const std::filesystem::path& dir,
                                   const AttentionBundle& bundle, bool split_blocks);
void WriteManifest(const std::filesystem::path& path, ManifestKind kind,
                   const std::string& id, const std::vector<nlohmann::json>& entries);

}  // namespace compsyn

#endif  // COMPSYN_MANIFEST_H_

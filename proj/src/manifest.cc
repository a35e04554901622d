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

#include "compsyn/manifest.h"

#include <fstream>

#include "compsyn/errors.h"
#include "compsyn/npy.h"

namespace compsyn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ManifestKind ParseKind(const std::string& kind) {
  if (kind == "embedding_set") return ManifestKind::kEmbeddingSet;
  if (kind == "attention_bundle") return ManifestKind::kAttentionBundle;
  if (kind == "caption_pair_set") return ManifestKind::kCaptionPairSet;
  throw DataError("unknown manifest kind '" + kind + "'");
}

void RequireKind(const Manifest& m, ManifestKind kind) {
  if (m.kind != kind) {
    throw DataError("manifest '" + m.id + "' has kind " + ToString(m.kind) +
                    ", expected " + ToString(kind));
  }
}

template <typename T>
T Field(const json& record, const char* key, const std::string& where) {
  if (!record.contains(key)) {
    throw DataError(where + ": missing field '" + key + "'");
  }
  try {
    return record.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(where + ": field '" + key + "' has the wrong type");
  }
}

Tensor LoadRelative(const Manifest& m, const json& record, const char* key,
                    const std::string& where) {
  const fs::path path = m.Resolve(Field<std::string>(record, key, where));
  if (!fs::exists(path)) {
    throw DataError(where + ": referenced file " + path.string() + " does not exist");
  }
  return load_tensor(path);
}

Tensor AsRowVector(Tensor t, const std::string& where) {
  if (t.rank() == 1) return Tensor({1, t.cols()}, t.storage());
  if (t.rows() != 1) {
    throw ShapeError(where + ": sentence embedding must be 1 x D, got " + t.ShapeString());
  }
  return t;
}

Tensor AsMatrix(Tensor t, size_t rows, size_t cols, const std::string& what) {
  if (t.rank() == 1 && rows == 1) t = Tensor({1, t.cols()}, t.storage());
  if (t.rows() != rows || t.cols() != cols || t.rank() != 2) {
    throw ShapeError(what + ": expected " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + t.ShapeString());
  }
  return t;
}

Tensor Block(const Tensor& full, size_t r0, size_t c0, size_t rows, size_t cols) {
  Tensor out(rows, cols);
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) out(r, c) = full(r0 + r, c0 + c);
  return out;
}

}  // namespace

std::string ToString(ManifestKind kind) {
  switch (kind) {
    case ManifestKind::kEmbeddingSet: return "embedding_set";
    case ManifestKind::kAttentionBundle: return "attention_bundle";
    case ManifestKind::kCaptionPairSet: return "caption_pair_set";
  }
  return "?";
}

std::vector<std::string> Manifest::EntryIds() const {
  std::vector<std::string> ids;
  for (const json& e : entries) ids.push_back(e.value("id", std::string()));
  return ids;
}

const json& Manifest::Entry(const std::string& entry_id) const {
  for (const json& e : entries)
    if (e.value("id", std::string()) == entry_id) return e;
  throw DataError("manifest '" + id + "' has no entry '" + entry_id + "'");
}

fs::path Manifest::Resolve(const std::string& relative) const {
  const fs::path p(relative);
  return p.is_absolute() ? p : base_dir / p;
}

Manifest ParseManifest(const json& doc, fs::path base_dir) {
  if (!doc.is_object()) throw DataError("manifest root must be a JSON object");
  Manifest m;
  m.kind = ParseKind(Field<std::string>(doc, "kind", "manifest"));
  m.id = doc.value("id", std::string());
  m.base_dir = std::move(base_dir);
  if (doc.contains("entries")) {
    if (!doc["entries"].is_array()) throw DataError("manifest 'entries' must be an array");
    for (const json& e : doc["entries"]) m.entries.push_back(e);
  } else {
    m.entries.push_back(doc);
  }
  return m;
}

Manifest LoadManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  return ParseManifest(doc, path.parent_path());
}

Tensor EmbeddingSet::Token(size_t t) const {
  const auto row = token_embeddings.row(t);
  return Tensor::Row(std::vector<double>(row.begin(), row.end()));
}

EmbeddingSet load_embedding_set(const Manifest& manifest, const std::string& id) {
  RequireKind(manifest, ManifestKind::kEmbeddingSet);
  const json& record = manifest.Entry(id);
  const std::string where = "embedding_set '" + id + "'";
  EmbeddingSet set;
  set.id = id;
  set.tokens = Field<std::vector<std::string>>(record, "tokens", where);
  if (set.tokens.empty()) throw DataError(where + ": token list is empty");
  set.token_embeddings = LoadRelative(manifest, record, "token_embeddings", where);
  if (set.token_embeddings.rank() == 1) {
    set.token_embeddings = Tensor({1, set.token_embeddings.cols()},
                                  set.token_embeddings.storage());
  }
  if (set.token_embeddings.rows() != set.tokens.size()) {
    throw ShapeError(where + ": token-count mismatch, manifest lists " +
                     std::to_string(set.tokens.size()) + " tokens but tensor has " +
                     std::to_string(set.token_embeddings.rows()) + " rows");
  }
  if (set.token_embeddings.cols() == 0) throw ShapeError(where + ": zero-width embeddings");
  if (record.contains("sentence_embedding") && !record["sentence_embedding"].is_null()) {
    Tensor s = AsRowVector(LoadRelative(manifest, record, "sentence_embedding", where), where);
    if (s.cols() != set.dim()) {
      throw ShapeError(where + ": sentence embedding has D=" + std::to_string(s.cols()) +
                       " but token embeddings have D=" + std::to_string(set.dim()));
    }
    set.sentence_embedding = std::move(s);
  }
  return set;
}

std::vector<EmbeddingSet> load_embedding_sets(const Manifest& manifest) {
  std::vector<EmbeddingSet> sets;
  for (const std::string& id : manifest.EntryIds()) {
    sets.push_back(load_embedding_set(manifest, id));
    if (sets.back().dim() != sets.front().dim()) {
      throw ShapeError("embedding_set '" + id + "' has D=" +
                       std::to_string(sets.back().dim()) + ", expected " +
                       std::to_string(sets.front().dim()));
    }
  }
  return sets;
}

void AttentionLayer::Validate() const {
  const size_t nl = ll.rows(), nv = vv.rows();
  const auto check = [&](const Tensor& t, size_t r, size_t c, const char* name) {
    if (t.rows() != r || t.cols() != c) {
      throw ShapeError(std::string("attention layer ") + std::to_string(index) +
                       ": block " + name + " is " + t.ShapeString() + ", expected [" +
                       std::to_string(r) + "," + std::to_string(c) + "]");
    }
  };
  check(ll, nl, nl, "LL");
  check(lv, nl, nv, "LV");
  check(vl, nv, nl, "VL");
  check(vv, nv, nv, "VV");
}

Tensor AttentionLayer::Full() const {
  const size_t nl = n_language(), nv = n_vision(), n = nl + nv;
  Tensor full(n, n);
  for (size_t r = 0; r < n; ++r) {
    for (size_t c = 0; c < n; ++c) {
      if (r < nl) {
        full(r, c) = c < nl ? ll(r, c) : lv(r, c - nl);
      } else {
        full(r, c) = c < nl ? vl(r - nl, c) : vv(r - nl, c - nl);
      }
    }
  }
  return full;
}

AttentionLayer AttentionLayer::Split(const Tensor& full, size_t n_language,
                                     size_t n_vision, size_t index) {
  const size_t n = n_language + n_vision;
  if (full.rows() != n || full.cols() != n) {
    throw ShapeError("attention layer " + std::to_string(index) + ": full matrix is " +
                     full.ShapeString() + " but N_L+N_V=" + std::to_string(n));
  }
  AttentionLayer layer;
  layer.index = index;
  layer.ll = Block(full, 0, 0, n_language, n_language);
  layer.lv = Block(full, 0, n_language, n_language, n_vision);
  layer.vl = Block(full, n_language, 0, n_vision, n_language);
  layer.vv = Block(full, n_language, n_language, n_vision, n_vision);
  return layer;
}

AttentionBundle load_attention_bundle(const Manifest& manifest, const std::string& id) {
  RequireKind(manifest, ManifestKind::kAttentionBundle);
  const json& record = manifest.Entry(id);
  const std::string where = "attention_bundle '" + id + "'";
  AttentionBundle bundle;
  bundle.id = id;
  bundle.n_language = Field<size_t>(record, "n_language", where);
  bundle.n_vision = Field<size_t>(record, "n_vision", where);
  bundle.normalized = record.value("normalized", false);
  if (bundle.n_language < 1) throw DataError(where + ": n_language must be >= 1");
  if (record.contains("tokens")) {
    bundle.tokens = Field<std::vector<std::string>>(record, "tokens", where);
    if (bundle.tokens.size() != bundle.n_language + bundle.n_vision &&
        bundle.tokens.size() != bundle.n_language) {
      throw ShapeError(where + ": " + std::to_string(bundle.tokens.size()) +
                       " token labels for N_L=" + std::to_string(bundle.n_language) +
                       ", N_V=" + std::to_string(bundle.n_vision));
    }
  }
  const auto layers = Field<std::vector<json>>(record, "layers", where);
  if (layers.empty()) throw DataError(where + ": no layers");
  const size_t nl = bundle.n_language, nv = bundle.n_vision;
  for (size_t i = 0; i < layers.size(); ++i) {
    const json& stored = layers[i];
    const std::string lw = where + " layer " + std::to_string(i);
    AttentionLayer layer;
    if (stored.contains("full")) {
      const Tensor full = LoadRelative(manifest, stored, "full", lw);
      layer = AttentionLayer::Split(AsMatrix(full, nl + nv, nl + nv, lw), nl, nv, i);
    } else {
      layer.index = i;
      layer.ll = AsMatrix(LoadRelative(manifest, stored, "ll", lw), nl, nl, lw + " LL");
      if (nv == 0) {
        layer.lv = Tensor(nl, 0);
        layer.vl = Tensor(0, nl);
        layer.vv = Tensor(0, 0);
      } else {
        layer.lv = AsMatrix(LoadRelative(manifest, stored, "lv", lw), nl, nv, lw + " LV");
        layer.vl = AsMatrix(LoadRelative(manifest, stored, "vl", lw), nv, nl, lw + " VL");
        layer.vv = AsMatrix(LoadRelative(manifest, stored, "vv", lw), nv, nv, lw + " VV");
      }
    }
    layer.Validate();
    bundle.layers.push_back(std::move(layer));
  }
  return bundle;
}

std::vector<CaptionPair> load_caption_pairs(const Manifest& manifest) {
  RequireKind(manifest, ManifestKind::kCaptionPairSet);
  std::vector<CaptionPair> out;
  for (const json& record : manifest.entries) {
    const auto pairs = Field<std::vector<json>>(record, "pairs", "caption_pair_set");
    for (size_t i = 0; i < pairs.size(); ++i) {
      const json& p = pairs[i];
      const std::string where = "caption pair " + std::to_string(i);
      CaptionPair pair;
      pair.caption0_id = Field<std::string>(p, "caption0_id", where);
      pair.caption1_id = Field<std::string>(p, "caption1_id", where);
      pair.image0_id = Field<std::string>(p, "image0_id", where);
      pair.image1_id = Field<std::string>(p, "image1_id", where);
      if (p.contains("scores") && !p["scores"].is_null()) {
        pair.scores = AsMatrix(LoadRelative(manifest, p, "scores", where), 2, 2, where);
        if (!pair.scores->AllFinite()) throw DataError(where + ": non-finite scores");
      }
      out.push_back(std::move(pair));
    }
  }
  return out;
}

json WriteEmbeddingEntry(const fs::path& dir, const EmbeddingSet& set) {
  json entry;
  entry["id"] = set.id;
  entry["tokens"] = set.tokens;
  const std::string tokens_file = set.id + ".tokens.npy";
  save_tensor(dir / tokens_file, set.token_embeddings);
  entry["token_embeddings"] = tokens_file;
  if (set.sentence_embedding) {
    const std::string sentence_file = set.id + ".sentence.npy";
    save_tensor(dir / sentence_file, *set.sentence_embedding);
    entry["sentence_embedding"] = sentence_file;
  }
  return entry;
}

json WriteAttentionEntry(const fs::path& dir, const AttentionBundle& bundle,
                         bool split_blocks) {
  json entry;
  entry["id"] = bundle.id;
  entry["n_language"] = bundle.n_language;
  entry["n_vision"] = bundle.n_vision;
  if (bundle.normalized) entry["normalized"] = true;
  if (!bundle.tokens.empty()) entry["tokens"] = bundle.tokens;
  json layers = json::array();
  for (const AttentionLayer& layer : bundle.layers) {
    const std::string stem = bundle.id + ".layer" + std::to_string(layer.index);
    json stored;
    if (split_blocks) {
      const std::pair<const char*, const Tensor*> blocks[] = {
          {"ll", &layer.ll}, {"lv", &layer.lv}, {"vl", &layer.vl}, {"vv", &layer.vv}};
      for (const auto& [name, block] : blocks) {
        const std::string file = stem + "." + name + ".npy";
        save_tensor(dir / file, *block);
        stored[name] = file;
      }
    } else {
      const std::string file = stem + ".npy";
      save_tensor(dir / file, layer.Full());
      stored["full"] = file;
    }
    layers.push_back(stored);
  }
  entry["layers"] = layers;
  return entry;
}

void WriteManifest(const fs::path& path, ManifestKind kind, const std::string& id,
                   const std::vector<json>& entries) {
  json doc;
  doc["kind"] = ToString(kind);
  doc["id"] = id;
  doc["entries"] = entries;
  WriteFileBytes(path, doc.dump(2) + "\n");
}

}  // namespace compsyn

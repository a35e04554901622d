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


// Files under data/exporter_sample were written by make_exporter_sample.py
// with numpy, the same way the Python exporter writes them.

#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "compsyn/manifest.h"
#include "compsyn/npy.h"
#include "compsyn/ptb.h"

using namespace compsyn;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSample = fs::path(COMPSYN_TEST_DATA_DIR) / "data" / "exporter_sample";

json Expected() { return json::parse(ReadFileBytes(kSample / "expected.json")); }

void CheckEqual(const Tensor& t, const json& rows) {
  REQUIRE(t.rows() == rows.size());
  for (size_t r = 0; r < t.rows(); ++r) {
    REQUIRE(t.cols() == rows[r].size());
    for (size_t c = 0; c < t.cols(); ++c) CHECK(t(r, c) == rows[r][c].get<double>());
  }
}

}  // namespace

TEST_CASE("embedding sets load from numpy float32 files") {
  const Manifest manifest = LoadManifest(kSample / "embeddings" / "manifest.json");
  const auto sets = load_embedding_sets(manifest);
  const json expected = Expected();
  REQUIRE(sets.size() == 2);
  CHECK(sets[0].id == "sent0");
  CHECK(sets[0].tokens == std::vector<std::string>{"the", "mug", "sits"});
  CHECK(sets[1].tokens == std::vector<std::string>{"it", "sleeps"});
  for (const auto& set : sets) {
    CHECK(set.dim() == 4);
    CheckEqual(set.token_embeddings, expected[set.id]["tokens"]);
    REQUIRE(set.sentence_embedding.has_value());
    CheckEqual(*set.sentence_embedding, expected[set.id]["sentence"]);
  }
}

TEST_CASE("trees line up with embedding rows") {
  const auto trees = ptb::read_tree_file((kSample / "trees.ptb").string());
  const auto sets = load_embedding_sets(LoadManifest(kSample / "embeddings" / "manifest.json"));
  REQUIRE(trees.size() == sets.size());
  for (size_t i = 0; i < trees.size(); ++i) {
    CHECK(ptb::leaves(trees[i]) == sets[i].tokens);
  }
}

TEST_CASE("split float32 attention blocks keep the normalized flag") {
  const Manifest manifest = LoadManifest(kSample / "attention" / "manifest.json");
  const AttentionBundle bundle = load_attention_bundle(manifest, "cross");
  CHECK(bundle.n_language == 3);
  CHECK(bundle.n_vision == 2);
  CHECK(bundle.normalized);
  CHECK(bundle.tokens.size() == 5);
  REQUIRE(bundle.layers.size() == 1);
  CHECK(bundle.layers[0].lv.rows() == 3);
  CHECK(bundle.layers[0].lv.cols() == 2);
  CheckEqual(bundle.layers[0].Full(), Expected()["cross_full"]);
}

TEST_CASE("language-only float64 bundle loads full matrices") {
  const Manifest manifest = LoadManifest(kSample / "attention" / "manifest.json");
  const AttentionBundle bundle = load_attention_bundle(manifest, "lang");
  CHECK(bundle.n_vision == 0);
  CHECK_FALSE(bundle.normalized);
  REQUIRE(bundle.layers.size() == 2);
  const json expected = Expected()["lang_full"];
  for (size_t l = 0; l < 2; ++l) {
    CHECK(bundle.layers[l].index == l);
    CheckEqual(bundle.layers[l].ll, expected[l]);
    CHECK(bundle.layers[l].vv.size() == 0);
  }
}

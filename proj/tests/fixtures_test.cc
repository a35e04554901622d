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


#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "compsyn/errors.h"
#include "compsyn/fixtures.h"
#include "compsyn/manifest.h"
#include "compsyn/pooling.h"
#include "compsyn/ptb.h"
#include "compsyn/synnamon.h"
#include "temp_dir.h"

using namespace compsyn;
using compsyn::testing::TempDir;

namespace {

std::vector<double> Values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST_CASE("generated trees are deterministic and closed over the grammar") {
  const auto a = fixtures::generate_trees(50, 7);
  const auto b = fixtures::generate_trees(50, 7);
  const auto c = fixtures::generate_trees(50, 8);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& tree : a) {
    CHECK(tree.label == "S");
    CHECK(ptb::leaves(tree).size() >= 2);
    for (const auto& rule : ptb::productions(tree)) CHECK(rule.arity() >= 1);
  }
}

TEST_CASE("max_depth bounds tree height") {
  for (size_t depth : {0u, 1u, 2u}) {
    int tallest = 0;
    for (const auto& tree : fixtures::generate_trees(300, 3, depth)) {
      tallest = std::max(tallest, ptb::height(tree));
    }
    // S NP DT/PRP token is 3 edges; each level of PP nesting adds 3 edges.
    CHECK(tallest <= 4 + 3 * static_cast<int>(depth));
  }
}

TEST_CASE("lexicon embeddings depend on the word only") {
  const Tensor a = fixtures::lexicon_embedding("mug", 8, 1);
  CHECK(a.rows() == 1);
  CHECK(a.cols() == 8);
  CHECK(Values(a) == Values(fixtures::lexicon_embedding("mug", 8, 1)));
  CHECK(Values(a) != Values(fixtures::lexicon_embedding("cup", 8, 1)));
  CHECK(Values(a) != Values(fixtures::lexicon_embedding("mug", 8, 2)));
}

TEST_CASE("net teacher produces compose() sentence embeddings") {
  fixtures::CorpusOptions options;
  options.sentences = 30;
  options.dim = 6;
  options.seed = 4;
  const auto corpus = fixtures::make_corpus(options);
  REQUIRE(corpus.teacher.has_value());
  REQUIRE(corpus.sets.size() == 30);
  for (size_t i = 0; i < corpus.trees.size(); ++i) {
    const auto& set = corpus.sets[i];
    CHECK(set.tokens == ptb::leaves(corpus.trees[i]));
    REQUIRE(set.sentence_embedding.has_value());
    const Tensor expected = synnamon::compose(*corpus.teacher, corpus.trees[i], set.token_embeddings);
    CHECK(Values(*set.sentence_embedding) == Values(expected));
  }
}

TEST_CASE("constant and gaussian teachers") {
  fixtures::CorpusOptions options;
  options.sentences = 20;
  options.dim = 5;
  options.teacher = fixtures::TeacherKind::kConstant;
  const auto constant = fixtures::make_corpus(options);
  CHECK_FALSE(constant.teacher.has_value());
  for (const auto& set : constant.sets) {
    CHECK(Values(*set.sentence_embedding) == Values(*constant.sets[0].sentence_embedding));
  }
  options.teacher = fixtures::TeacherKind::kGaussian;
  const auto gaussian = fixtures::make_corpus(options);
  std::set<std::vector<double>> distinct;
  for (const auto& set : gaussian.sets) distinct.insert(Values(*set.sentence_embedding));
  CHECK(distinct.size() == gaussian.sets.size());
  CHECK(fixtures::ParseTeacherKind("gaussian") == fixtures::TeacherKind::kGaussian);
  CHECK_THROWS_AS(fixtures::ParseTeacherKind("oracle"), ConfigError);
}

TEST_CASE("written fixture directory loads back") {
  TempDir dir;
  fixtures::CorpusOptions options;
  options.sentences = 12;
  options.dim = 4;
  fixtures::write_fixtures(dir.path(), options);

  const auto trees = ptb::read_tree_file((dir / "trees.ptb").string());
  const auto sets = load_embedding_sets(LoadManifest(dir / "embeddings" / "manifest.json"));
  REQUIRE(trees.size() == 12);
  REQUIRE(sets.size() == 12);
  const auto teacher = synnamon::load_net(dir / "teacher");
  for (size_t i = 0; i < trees.size(); ++i) {
    CHECK(ptb::leaves(trees[i]) == sets[i].tokens);
    const Tensor expected = synnamon::compose(teacher, trees[i], sets[i].token_embeddings);
    CHECK(Values(*sets[i].sentence_embedding) == Values(expected));
  }

  const Manifest attention = LoadManifest(dir / "attention" / "manifest.json");
  for (const auto& entry : attention.entries) {
    const auto bundle = load_attention_bundle(attention, entry.value("id", ""));
    CHECK(bundle.n_vision == 3);
    CHECK(bundle.layers.size() == 4);
  }
  const auto pairs = load_caption_pairs(LoadManifest(dir / "pairs" / "manifest.json"));
  CHECK_FALSE(pairs.empty());
  for (const auto& pair : pairs) {
    REQUIRE(pair.scores.has_value());
    CHECK(pair.scores->rows() == 2);
  }

  const auto pool_trees = ptb::read_tree_file((dir / "pool3" / "trees.ptb").string());
  const auto pool_sets = load_embedding_sets(LoadManifest(dir / "pool3" / "manifest.json"));
  REQUIRE(pool_trees.size() == 1);
  const Tensor pooled = pooling::syn_meanpool(pool_trees[0], pool_sets[0].token_embeddings);
  CHECK(Values(pooled) == std::vector<double>{0.75, 0.75});
}

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

#include "compsyn/fixtures.h"

#include <set>

#include <fmt/format.h>

#include "compsyn/errors.h"
#include "compsyn/npy.h"
#include "compsyn/random.h"

namespace compsyn::fixtures {

using ptb::SyntaxTree;

namespace {

struct Lexicon {
  std::vector<std::string> det = {"the", "a", "every", "some"};
  std::vector<std::string> noun = {"dog", "cat", "mug", "table", "river", "village"};
  std::vector<std::string> adj = {"red", "small", "old"};
  std::vector<std::string> verb = {"sees", "holds", "likes", "finds"};
  std::vector<std::string> iverb = {"sleeps", "sits"};
  std::vector<std::string> prep = {"on", "near", "under"};
  std::vector<std::string> pron = {"she", "it"};
};

class Generator {
 public:
  Generator(uint64_t seed, size_t max_depth) : rng_(KeyedStream(seed, "grammar")), max_(max_depth) {}

  SyntaxTree Sentence() { return SyntaxTree::Node("S", {NounPhrase(0), VerbPhrase(0)}); }

 private:
  SyntaxTree Word(const std::string& pos, const std::vector<std::string>& words) {
    return SyntaxTree::Node(pos, {SyntaxTree::Leaf(words[rng_.Below(words.size())])});
  }

  SyntaxTree NounPhrase(size_t depth) {
    const double u = rng_.Uniform();
    if (depth < max_ && u < 0.2) {
      return SyntaxTree::Node("NP", {NounPhrase(depth + 1), PrepPhrase(depth + 1)});
    }
    if (u < 0.35) return SyntaxTree::Node("NP", {Word("PRP", lex_.pron)});
    if (u < 0.6) {
      return SyntaxTree::Node("NP", {Word("DT", lex_.det), Word("JJ", lex_.adj), Word("NN", lex_.noun)});
    }
    return SyntaxTree::Node("NP", {Word("DT", lex_.det), Word("NN", lex_.noun)});
  }

  SyntaxTree VerbPhrase(size_t depth) {
    const double u = rng_.Uniform();
    if (depth < max_ && u < 0.25) {
      return SyntaxTree::Node("VP", {VerbPhrase(depth + 1), PrepPhrase(depth + 1)});
    }
    if (u < 0.45) return SyntaxTree::Node("VP", {Word("VBZ", lex_.iverb)});
    return SyntaxTree::Node("VP", {Word("VBZ", lex_.verb), NounPhrase(depth + 1)});
  }

  SyntaxTree PrepPhrase(size_t depth) {
    return SyntaxTree::Node("PP", {Word("IN", lex_.prep), NounPhrase(depth)});
  }

  Lexicon lex_;
  SplitMix64 rng_;
  size_t max_;
};

Tensor GaussianRow(SplitMix64& rng, size_t dim) {
  Tensor t(1, dim);
  for (size_t k = 0; k < dim; ++k) t[k] = rng.Gaussian();
  return t;
}

}  // namespace

std::vector<SyntaxTree> generate_trees(size_t count, uint64_t seed, size_t max_depth) {
  Generator gen(seed, max_depth);
  std::vector<SyntaxTree> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back(gen.Sentence());
  return out;
}

Tensor lexicon_embedding(const std::string& word, size_t dim, uint64_t seed) {
  SplitMix64 rng = KeyedStream(seed, "lexicon:" + word);
  return GaussianRow(rng, dim);
}

EmbeddingSet embed_tokens(const std::string& id, const SyntaxTree& tree, size_t dim,
                          uint64_t seed) {
  EmbeddingSet set;
  set.id = id;
  set.tokens = ptb::leaves(tree);
  set.token_embeddings = Tensor(set.tokens.size(), dim);
  for (size_t t = 0; t < set.tokens.size(); ++t) {
    const Tensor row = lexicon_embedding(set.tokens[t], dim, seed);
    for (size_t k = 0; k < dim; ++k) set.token_embeddings(t, k) = row[k];
  }
  return set;
}

TeacherKind ParseTeacherKind(std::string_view name) {
  if (name == "net") return TeacherKind::kNet;
  if (name == "constant") return TeacherKind::kConstant;
  if (name == "gaussian") return TeacherKind::kGaussian;
  throw ConfigError("unknown teacher '" + std::string(name) +
                    "' (expected net, constant or gaussian)");
}

std::vector<ptb::ProductionRule> SyntheticCorpus::Vocabulary() const {
  std::set<ptb::ProductionRule> rules;
  for (const auto& tree : trees) {
    for (auto& r : ptb::productions(tree)) rules.insert(std::move(r));
  }
  return {rules.begin(), rules.end()};
}

SyntheticCorpus make_corpus(const CorpusOptions& options) {
  if (options.dim == 0) throw ConfigError("embedding dimension must be at least 1");
  SyntheticCorpus corpus;
  corpus.trees = generate_trees(options.sentences, options.seed, options.max_depth);
  for (size_t i = 0; i < corpus.trees.size(); ++i) {
    corpus.sets.push_back(
        embed_tokens(fmt::format("s{:05d}", i), corpus.trees[i], options.dim, options.seed));
  }
  SplitMix64 target_rng = KeyedStream(options.seed, "targets");
  switch (options.teacher) {
    case TeacherKind::kNet: {
      synnamon::NetOptions net_options;
      net_options.arch = options.teacher_arch;
      net_options.dim = options.dim;
      net_options.hidden = options.teacher_hidden;
      net_options.seed = KeyedStream(options.seed, "teacher").Next();
      const auto vocab = corpus.Vocabulary();
      corpus.teacher = synnamon::build_net(vocab, net_options);
      for (size_t i = 0; i < corpus.trees.size(); ++i) {
        corpus.sets[i].sentence_embedding =
            synnamon::compose(*corpus.teacher, corpus.trees[i], corpus.sets[i].token_embeddings);
      }
      break;
    }
    case TeacherKind::kConstant: {
      const Tensor constant = GaussianRow(target_rng, options.dim);
      for (auto& set : corpus.sets) set.sentence_embedding = constant;
      break;
    }
    case TeacherKind::kGaussian:
      for (auto& set : corpus.sets) set.sentence_embedding = GaussianRow(target_rng, options.dim);
      break;
  }
  return corpus;
}

AttentionBundle make_attention_bundle(const std::string& id, size_t n_language, size_t n_vision,
                                      size_t layers, uint64_t seed) {
  SplitMix64 rng = KeyedStream(seed, "attention:" + id);
  AttentionBundle bundle;
  bundle.id = id;
  bundle.n_language = n_language;
  bundle.n_vision = n_vision;
  const size_t n = n_language + n_vision;
  for (size_t l = 0; l < layers; ++l) {
    Tensor full(n, n);
    for (size_t k = 0; k < full.size(); ++k) full[k] = 2.0 * rng.Gaussian();
    bundle.layers.push_back(AttentionLayer::Split(full, n_language, n_vision, l));
  }
  return bundle;
}

void write_fixtures(const std::filesystem::path& dir, const CorpusOptions& options) {
  namespace fs = std::filesystem;
  using nlohmann::json;
  const SyntheticCorpus corpus = make_corpus(options);

  std::string trees_text;
  for (const auto& tree : corpus.trees) trees_text += ptb::serialize(tree) + "\n";
  WriteFileBytes(dir / "trees.ptb", trees_text);

  const fs::path embeddings = dir / "embeddings";
  std::vector<json> entries;
  for (const auto& set : corpus.sets) entries.push_back(WriteEmbeddingEntry(embeddings, set));
  WriteManifest(embeddings / "manifest.json", ManifestKind::kEmbeddingSet, "synthetic", entries);

  if (corpus.teacher) synnamon::save_net(dir / "teacher", *corpus.teacher);

  const fs::path attention = dir / "attention";
  entries.clear();
  const size_t n_bundles = std::min<size_t>(4, corpus.sets.size());
  for (size_t i = 0; i < n_bundles; ++i) {
    const auto& set = corpus.sets[i];
    AttentionBundle bundle =
        make_attention_bundle(set.id, set.tokens.size(), 3, 4, options.seed);
    bundle.tokens = set.tokens;
    for (size_t v = 0; v < 3; ++v) bundle.tokens.push_back(fmt::format("<img{}>", v));
    entries.push_back(WriteAttentionEntry(attention, bundle, i % 2 == 0));
  }
  WriteManifest(attention / "manifest.json", ManifestKind::kAttentionBundle, "synthetic", entries);

  const fs::path pairs_dir = dir / "pairs";
  SplitMix64 rng = KeyedStream(options.seed, "pairs");
  json pairs = json::array();
  for (size_t i = 0; i + 1 < corpus.sets.size() && i < 40; i += 2) {
    Tensor scores(2, 2);
    for (size_t k = 0; k < 4; ++k) scores[k] = rng.Uniform();
    const std::string file = fmt::format("pair{:03d}.scores.npy", i / 2);
    save_tensor(pairs_dir / file, scores);
    pairs.push_back({{"caption0_id", corpus.sets[i].id},
                     {"caption1_id", corpus.sets[i + 1].id},
                     {"image0_id", fmt::format("img{:05d}", i)},
                     {"image1_id", fmt::format("img{:05d}", i + 1)},
                     {"scores", file}});
  }
  WriteManifest(pairs_dir / "manifest.json", ManifestKind::kCaptionPairSet, "synthetic",
                {json{{"id", "synthetic"}, {"pairs", pairs}}});

  const fs::path pool3 = dir / "pool3";
  WriteFileBytes(pool3 / "trees.ptb", "(S (NP (X a) (X b)) (X c))\n");
  EmbeddingSet set;
  set.id = "abc";
  set.tokens = {"a", "b", "c"};
  set.token_embeddings = Tensor::FromRows({{1, 0}, {0, 1}, {1, 1}});
  WriteManifest(pool3 / "manifest.json", ManifestKind::kEmbeddingSet, "pool3",
                {WriteEmbeddingEntry(pool3, set)});
}

}  // namespace compsyn::fixtures

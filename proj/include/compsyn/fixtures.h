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

#ifndef COMPSYN_FIXTURES_H_
#define COMPSYN_FIXTURES_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "compsyn/manifest.h"
#include "compsyn/ptb.h"
#include "compsyn/synnamon.h"

namespace compsyn::fixtures {

// Random sentences from a small English-like grammar. `max_depth` bounds
// phrase nesting (NP -> NP PP, VP -> VP PP).
std::vector<ptb::SyntaxTree> generate_trees(size_t count, uint64_t seed, size_t max_depth = 1);

// Fixed Gaussian vector per word, independent of the sentence it occurs in.
Tensor lexicon_embedding(const std::string& word, size_t dim, uint64_t seed);

// Token rows for the tree's leaves; no sentence embedding.
EmbeddingSet embed_tokens(const std::string& id, const ptb::SyntaxTree& tree, size_t dim,
                          uint64_t seed);

enum class TeacherKind {
  kNet,       // a randomly initialized module net
  kConstant,  // the same vector for every sentence
  kGaussian,  // independent noise per sentence
};

TeacherKind ParseTeacherKind(std::string_view name);

struct CorpusOptions {
  size_t sentences = 200;
  size_t dim = 16;
  size_t max_depth = 1;
  uint64_t seed = 0;
  TeacherKind teacher = TeacherKind::kNet;
  synnamon::Architecture teacher_arch = synnamon::Architecture::kLinear;
  size_t teacher_hidden = 0;
};

struct SyntheticCorpus {
  std::vector<ptb::SyntaxTree> trees;
  std::vector<EmbeddingSet> sets;  // one per tree, with sentence embeddings
  std::optional<synnamon::ModuleNet> teacher;

  std::vector<ptb::ProductionRule> Vocabulary() const;
};

SyntheticCorpus make_corpus(const CorpusOptions& options);

// Gaussian pre-softmax scores for every block.
AttentionBundle make_attention_bundle(const std::string& id, size_t n_language, size_t n_vision,
                                      size_t layers, uint64_t seed);

// Writes a complete fixture directory:
//   trees.ptb, embeddings/manifest.json, teacher/ (checkpoint when the
//   teacher is a net), attention/manifest.json, pairs/manifest.json,
//   pool3/ (the ((a b) c) pooling fixture).
void write_fixtures(const std::filesystem::path& dir, const CorpusOptions& options);

}  // namespace compsyn::fixtures

#endif  // COMPSYN_FIXTURES_H_

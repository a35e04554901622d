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

#ifndef COMPSYN_SYNNAMON_H_
#define COMPSYN_SYNNAMON_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compsyn/autodiff.h"
#include "compsyn/manifest.h"
#include "compsyn/ptb.h"
#include "compsyn/tensor.h"
#include "json.hpp"

namespace compsyn::synnamon {

enum class Architecture { kLinear, kNonlin, kDouble };

Architecture ParseArchitecture(std::string_view name);
std::string ToString(Architecture arch);

// Parameters for one production rule. Linear and Nonlin hold {W, b};
// Double holds {W1, b1, W2, b2}.
struct Module {
  ptb::ProductionRule rule;
  std::vector<Tensor> params;
};

struct NetOptions {
  Architecture arch = Architecture::kLinear;
  size_t dim = 768;
  size_t hidden = 0;  // Double only; 0 means dim
  // When false, part-of-speech nodes pass their token embedding through and
  // lexical rules get no module.
  bool pos_modules = true;
  uint64_t seed = 0;
};

class ModuleNet {
 public:
  ModuleNet() = default;
  ModuleNet(Architecture arch, size_t dim, size_t hidden, bool pos_modules,
            std::vector<Module> modules);

  Architecture arch() const { return arch_; }
  size_t dim() const { return dim_; }
  size_t hidden() const { return hidden_; }
  bool pos_modules() const { return pos_modules_; }
  size_t size() const { return modules_.size(); }

  const std::vector<Module>& modules() const { return modules_; }
  Module& module(size_t i) { return modules_[i]; }
  const Module& module(size_t i) const { return modules_[i]; }

  std::optional<size_t> Find(const ptb::ProductionRule& rule) const;
  // Throws DataError naming the rule when it has no module.
  size_t IndexOf(const ptb::ProductionRule& rule) const;
  const Module& At(const ptb::ProductionRule& rule) const;

  std::vector<ptb::ProductionRule> Vocabulary() const;

  // All parameter tensors, module by module in rule order.
  std::vector<Tensor*> Parameters();
  std::vector<const Tensor*> Parameters() const;
  // Index of a module's first tensor within Parameters().
  size_t ParameterOffset(size_t module) const { return offsets_[module]; }
  size_t ParameterCount() const;

  // Whether `node` is evaluated by a module (token leaves never are; POS
  // nodes only with pos_modules).
  bool HasModule(const ptb::SyntaxTree& node) const;

 private:
  Architecture arch_ = Architecture::kLinear;
  size_t dim_ = 0;
  size_t hidden_ = 0;
  bool pos_modules_ = true;
  std::vector<Module> modules_;
  std::map<ptb::ProductionRule, size_t> index_;
  std::vector<size_t> offsets_;
};

std::vector<std::string> ParameterNames(Architecture arch);

// Glorot-uniform weights from KeyedStream(seed, rule string); zero biases.
ModuleNet build_net(std::span<const ptb::ProductionRule> vocab, const NetOptions& options);

// Module forward pass on a 1 x (N*D) input.
Tensor apply_module(const ModuleNet& net, const Module& module, const Tensor& input);

// Bottom-up evaluation. `tokens` holds one row per leaf, left to right.
Tensor compose(const ModuleNet& net, const ptb::SyntaxTree& tree, const Tensor& tokens);

// Outputs of every node, indexed in pre-order (token leaves included). An
// entry in `overrides` replaces that node's output before its parent reads it.
std::vector<Tensor> compose_nodes(const ModuleNet& net, const ptb::SyntaxTree& tree,
                                  const Tensor& tokens,
                                  const std::map<size_t, Tensor>& overrides = {});

// Lazily places module parameters on a tape so gradients can be gathered.
class TapeParameters {
 public:
  TapeParameters(ad::Tape& tape, const ModuleNet& net);

  std::span<const ad::Var> Get(size_t module);
  // Adds the tape adjoints of every placed parameter into `grads`, which is
  // laid out like ModuleNet::Parameters().
  void Accumulate(std::vector<Tensor>& grads) const;

 private:
  ad::Tape& tape_;
  const ModuleNet& net_;
  std::vector<std::vector<ad::Var>> vars_;
};

ad::Var apply_module(ad::Tape& tape, const ModuleNet& net, size_t module, TapeParameters& params,
                     ad::Var input);
ad::Var compose(ad::Tape& tape, const ModuleNet& net, TapeParameters& params,
                const ptb::SyntaxTree& tree, const Tensor& tokens);

// One training example: a parse, its token rows and the teacher's sentence
// embedding.
struct Example {
  std::string id;
  ptb::SyntaxTree tree;
  Tensor tokens;
  Tensor target;
};

// Pairs trees with embedding sets by position; each set needs a sentence
// embedding and one token row per leaf.
std::vector<Example> MakeExamples(const std::vector<ptb::SyntaxTree>& trees,
                                  const std::vector<EmbeddingSet>& sets);

struct Split {
  std::vector<size_t> train;
  std::vector<size_t> val;
};

// Shuffled split. Validation trees with a production absent from the
// training side are moved to training until the split is closed.
Split split_corpus(const std::vector<ptb::SyntaxTree>& trees, double val_fraction, uint64_t seed);
// Throws DataError on an empty side, an out-of-range index or a validation
// production unseen in training.
void CheckSplit(const std::vector<ptb::SyntaxTree>& trees, const Split& split);

// Mean over unordered pairs i < j of ||e_i - e_j||^2 / D.
double chance_mse(std::span<const Tensor> embeddings);

struct DistillOptions {
  double learning_rate = 5e-5;
  size_t epochs = 10;
  size_t batch_size = 16;
  uint64_t seed = 0;
  size_t threads = 1;
};

struct EpochStats {
  size_t epoch = 0;
  double train_mse = 0;
  double val_mse = 0;
};

struct DistillationReport {
  std::vector<EpochStats> epochs;
  double chance_mse = 0;
  size_t best_epoch = 0;
  double best_val_mse = 0;
  // Empty when chance MSE is zero.
  std::optional<double> normalized;
  size_t n_train = 0;
  size_t n_val = 0;

  std::optional<double> Normalized(double mse) const;
  nlohmann::json ToJson() const;
  // epoch,train_mse,val_mse,normalized
  std::string CurveCsv() const;
};

double mean_mse(const ModuleNet& net, std::span<const Example> examples,
                std::span<const size_t> indices, size_t threads = 1);

// Adam on mean per-example MSE. Chance MSE is taken over every example's
// target. Train and validation MSE are measured after each epoch.
DistillationReport distill(ModuleNet& net, std::span<const Example> examples, const Split& split,
                           const DistillOptions& options);

// Child outputs, already concatenated to 1 x (N*D), and the desired output.
struct ModulePair {
  Tensor input;
  Tensor target;
};

// Trains only the module for `rule` on `pairs`; returns the final mean MSE.
double fit_module(ModuleNet& net, const ptb::ProductionRule& rule,
                  std::span<const ModulePair> pairs, const DistillOptions& options);

// Mean MSE per non-empty group. Throws ShapeError on arity mismatch.
std::map<std::string, double> eval_module_generalization(
    const ModuleNet& net, const ptb::ProductionRule& rule,
    const std::map<std::string, std::vector<ModulePair>>& groups);

// Checkpoint directory: index.json plus one NPY file per tensor.
void save_net(const std::filesystem::path& dir, const ModuleNet& net);
ModuleNet load_net(const std::filesystem::path& dir);

}  // namespace compsyn::synnamon

#endif  // COMPSYN_SYNNAMON_H_

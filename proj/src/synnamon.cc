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

#include "compsyn/synnamon.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "compsyn/adam.h"
#include "compsyn/errors.h"
#include "compsyn/npy.h"
#include "compsyn/parallel.h"
#include "compsyn/random.h"

namespace compsyn::synnamon {

using ptb::ProductionRule;
using ptb::SyntaxTree;

Architecture ParseArchitecture(std::string_view name) {
  if (name == "linear") return Architecture::kLinear;
  if (name == "nonlin") return Architecture::kNonlin;
  if (name == "double") return Architecture::kDouble;
  throw ConfigError("unknown architecture '" + std::string(name) +
                    "' (expected linear, nonlin or double)");
}

std::string ToString(Architecture arch) {
  switch (arch) {
    case Architecture::kLinear: return "linear";
    case Architecture::kNonlin: return "nonlin";
    case Architecture::kDouble: return "double";
  }
  return "?";
}

std::vector<std::string> ParameterNames(Architecture arch) {
  if (arch == Architecture::kDouble) return {"W1", "b1", "W2", "b2"};
  return {"W", "b"};
}

namespace {

std::vector<std::pair<size_t, size_t>> ParameterShapes(Architecture arch, size_t arity,
                                                        size_t dim, size_t hidden) {
  if (arch == Architecture::kDouble) {
    return {{arity * dim, hidden}, {1, hidden}, {hidden, dim}, {1, dim}};
  }
  return {{arity * dim, dim}, {1, dim}};
}

Tensor RowOf(const Tensor& tokens, size_t r) {
  const auto row = tokens.row(r);
  return Tensor({1, row.size()}, std::vector<double>(row.begin(), row.end()));
}

size_t CountLeaves(const SyntaxTree& node) {
  if (node.is_leaf()) return 1;
  size_t n = 0;
  for (const auto& child : node.children) n += CountLeaves(child);
  return n;
}

void CheckTokens(const ModuleNet& net, const SyntaxTree& tree, const Tensor& tokens) {
  for (const ProductionRule& rule : ptb::productions(tree)) {
    if (rule.is_lexical() && !net.pos_modules()) continue;
    net.IndexOf(rule);
  }
  const size_t leaves = CountLeaves(tree);
  if (tokens.rows() < leaves) {
    throw DataError(fmt::format("missing leaf embedding: tree has {} leaves but only {} token rows",
                                leaves, tokens.rows()));
  }
  if (tokens.rows() != leaves) {
    throw ShapeError(fmt::format("tree has {} leaves but {} token rows", leaves, tokens.rows()));
  }
  if (tokens.cols() != net.dim()) {
    throw ShapeError(fmt::format("token embeddings have width {} but the net expects D={}",
                                 tokens.cols(), net.dim()));
  }
}

}  // namespace

ModuleNet::ModuleNet(Architecture arch, size_t dim, size_t hidden, bool pos_modules,
                     std::vector<Module> modules)
    : arch_(arch), dim_(dim), hidden_(hidden == 0 ? dim : hidden), pos_modules_(pos_modules) {
  std::sort(modules.begin(), modules.end(),
            [](const Module& a, const Module& b) { return a.rule < b.rule; });
  size_t offset = 0;
  for (size_t i = 0; i < modules.size(); ++i) {
    const Module& m = modules[i];
    if (!index_.emplace(m.rule, i).second) {
      throw DataError("duplicate rule in vocabulary: " + m.rule.ToString());
    }
    const auto shapes = ParameterShapes(arch_, m.rule.arity(), dim_, hidden_);
    if (m.params.size() != shapes.size()) {
      throw ShapeError(fmt::format("module {} has {} tensors, expected {}", m.rule.ToString(),
                                   m.params.size(), shapes.size()));
    }
    for (size_t p = 0; p < shapes.size(); ++p) {
      if (m.params[p].rows() != shapes[p].first || m.params[p].cols() != shapes[p].second) {
        throw ShapeError(fmt::format("module {} tensor {} has shape {}, expected [{},{}]",
                                     m.rule.ToString(), ParameterNames(arch_)[p],
                                     m.params[p].ShapeString(), shapes[p].first,
                                     shapes[p].second));
      }
    }
    offsets_.push_back(offset);
    offset += m.params.size();
  }
  modules_ = std::move(modules);
}

std::optional<size_t> ModuleNet::Find(const ProductionRule& rule) const {
  const auto it = index_.find(rule);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

size_t ModuleNet::IndexOf(const ProductionRule& rule) const {
  const auto found = Find(rule);
  if (!found) throw DataError("unseen production: " + rule.ToString());
  return *found;
}

const Module& ModuleNet::At(const ProductionRule& rule) const { return modules_[IndexOf(rule)]; }

std::vector<ProductionRule> ModuleNet::Vocabulary() const {
  std::vector<ProductionRule> out;
  for (const auto& m : modules_) out.push_back(m.rule);
  return out;
}

std::vector<Tensor*> ModuleNet::Parameters() {
  std::vector<Tensor*> out;
  for (auto& m : modules_) {
    for (auto& p : m.params) out.push_back(&p);
  }
  return out;
}

std::vector<const Tensor*> ModuleNet::Parameters() const {
  std::vector<const Tensor*> out;
  for (const auto& m : modules_) {
    for (const auto& p : m.params) out.push_back(&p);
  }
  return out;
}

size_t ModuleNet::ParameterCount() const {
  size_t n = 0;
  for (const auto& m : modules_) {
    for (const auto& p : m.params) n += p.size();
  }
  return n;
}

bool ModuleNet::HasModule(const SyntaxTree& node) const {
  if (node.is_leaf()) return false;
  return pos_modules_ || !node.is_preterminal();
}

ModuleNet build_net(std::span<const ProductionRule> vocab, const NetOptions& options) {
  if (options.dim == 0) throw ConfigError("embedding dimension must be at least 1");
  const size_t hidden = options.hidden == 0 ? options.dim : options.hidden;
  std::set<ProductionRule> seen;
  std::vector<Module> modules;
  for (const ProductionRule& rule : vocab) {
    if (!seen.insert(rule).second) {
      throw DataError("duplicate rule in vocabulary: " + rule.ToString());
    }
    if (rule.arity() == 0) throw DataError("rule has no right-hand side: " + rule.lhs);
    if (rule.is_lexical() && !options.pos_modules) continue;
    SplitMix64 rng = KeyedStream(options.seed, rule.ToString());
    Module m{rule, {}};
    for (const auto& [rows, cols] :
         ParameterShapes(options.arch, rule.arity(), options.dim, hidden)) {
      Tensor t(rows, cols);
      if (rows > 1) {
        const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (size_t k = 0; k < t.size(); ++k) t[k] = rng.Uniform(-limit, limit);
      }
      m.params.push_back(std::move(t));
    }
    modules.push_back(std::move(m));
  }
  if (modules.empty()) throw DataError("vocabulary yields no modules");
  return ModuleNet(options.arch, options.dim, hidden, options.pos_modules, std::move(modules));
}

Tensor apply_module(const ModuleNet& net, const Module& module, const Tensor& input) {
  if (input.rows() != 1 || input.cols() != module.rule.arity() * net.dim()) {
    throw ShapeError(fmt::format("module {} expects input [1,{}], got {}", module.rule.ToString(),
                                 module.rule.arity() * net.dim(), input.ShapeString()));
  }
  const auto& p = module.params;
  switch (net.arch()) {
    case Architecture::kLinear:
      return add(matmul(input, p[0]), p[1]);
    case Architecture::kNonlin:
      return relu(add(matmul(input, p[0]), p[1]));
    case Architecture::kDouble:
      return add(matmul(relu(add(matmul(input, p[0]), p[1])), p[2]), p[3]);
  }
  return {};
}

namespace {

size_t EvalNode(const ModuleNet& net, const SyntaxTree& node, const Tensor& tokens,
                const std::map<size_t, Tensor>& overrides, size_t& next_leaf,
                std::vector<Tensor>& out) {
  const size_t id = out.size();
  out.emplace_back();
  Tensor value;
  if (node.is_leaf()) {
    value = RowOf(tokens, next_leaf++);
  } else {
    std::vector<size_t> child_ids;
    for (const auto& child : node.children) {
      child_ids.push_back(EvalNode(net, child, tokens, overrides, next_leaf, out));
    }
    if (!net.HasModule(node)) {
      value = out[child_ids.front()];
    } else {
      const Module& module = net.At(ptb::rule_of(node));
      std::vector<double> input;
      input.reserve(child_ids.size() * net.dim());
      for (size_t c : child_ids) {
        const auto d = out[c].data();
        input.insert(input.end(), d.begin(), d.end());
      }
      const size_t width = input.size();
      value = apply_module(net, module, Tensor({1, width}, std::move(input)));
    }
  }
  const auto it = overrides.find(id);
  out[id] = it == overrides.end() ? std::move(value) : it->second;
  return id;
}

}  // namespace

std::vector<Tensor> compose_nodes(const ModuleNet& net, const SyntaxTree& tree,
                                  const Tensor& tokens, const std::map<size_t, Tensor>& overrides) {
  CheckTokens(net, tree, tokens);
  std::vector<Tensor> out;
  size_t next_leaf = 0;
  EvalNode(net, tree, tokens, overrides, next_leaf, out);
  return out;
}

Tensor compose(const ModuleNet& net, const SyntaxTree& tree, const Tensor& tokens) {
  return compose_nodes(net, tree, tokens).front();
}

TapeParameters::TapeParameters(ad::Tape& tape, const ModuleNet& net)
    : tape_(tape), net_(net), vars_(net.size()) {}

std::span<const ad::Var> TapeParameters::Get(size_t module) {
  auto& vars = vars_[module];
  if (vars.empty()) {
    for (const Tensor& p : net_.module(module).params) vars.push_back(tape_.Leaf(p));
  }
  return vars;
}

void TapeParameters::Accumulate(std::vector<Tensor>& grads) const {
  for (size_t m = 0; m < vars_.size(); ++m) {
    for (size_t p = 0; p < vars_[m].size(); ++p) {
      Tensor& g = grads[net_.ParameterOffset(m) + p];
      const Tensor& adj = vars_[m][p].grad();
      for (size_t k = 0; k < g.size(); ++k) g[k] += adj[k];
    }
  }
}

ad::Var apply_module(ad::Tape& tape, const ModuleNet& net, size_t module, TapeParameters& params,
                     ad::Var input) {
  (void)tape;
  const auto p = params.Get(module);
  switch (net.arch()) {
    case Architecture::kLinear:
      return ad::add(ad::matmul(input, p[0]), p[1]);
    case Architecture::kNonlin:
      return ad::relu(ad::add(ad::matmul(input, p[0]), p[1]));
    case Architecture::kDouble:
      return ad::add(ad::matmul(ad::relu(ad::add(ad::matmul(input, p[0]), p[1])), p[2]), p[3]);
  }
  return {};
}

namespace {

ad::Var ComposeVar(ad::Tape& tape, const ModuleNet& net, TapeParameters& params,
                   const SyntaxTree& node, const Tensor& tokens, size_t& next_leaf) {
  if (node.is_leaf()) return tape.Leaf(RowOf(tokens, next_leaf++));
  std::vector<ad::Var> children;
  for (const auto& child : node.children) {
    children.push_back(ComposeVar(tape, net, params, child, tokens, next_leaf));
  }
  if (!net.HasModule(node)) return children.front();
  const size_t module = net.IndexOf(ptb::rule_of(node));
  const ad::Var input = children.size() == 1 ? children.front() : ad::concat_rows(children);
  return apply_module(tape, net, module, params, input);
}

}  // namespace

ad::Var compose(ad::Tape& tape, const ModuleNet& net, TapeParameters& params,
                const SyntaxTree& tree, const Tensor& tokens) {
  CheckTokens(net, tree, tokens);
  size_t next_leaf = 0;
  return ComposeVar(tape, net, params, tree, tokens, next_leaf);
}

std::vector<Example> MakeExamples(const std::vector<SyntaxTree>& trees,
                                  const std::vector<EmbeddingSet>& sets) {
  if (trees.size() != sets.size()) {
    throw DataError(fmt::format("{} trees but {} embedding sets", trees.size(), sets.size()));
  }
  std::vector<Example> out;
  for (size_t i = 0; i < trees.size(); ++i) {
    const EmbeddingSet& set = sets[i];
    if (!set.sentence_embedding) {
      throw DataError("embedding set '" + set.id + "' has no sentence embedding");
    }
    const size_t leaves = CountLeaves(trees[i]);
    if (leaves != set.token_embeddings.rows()) {
      throw ShapeError(fmt::format("embedding set '{}' has {} token rows but tree {} has {} leaves",
                                   set.id, set.token_embeddings.rows(), i, leaves));
    }
    out.push_back({set.id, trees[i], set.token_embeddings, *set.sentence_embedding});
  }
  return out;
}

Split split_corpus(const std::vector<SyntaxTree>& trees, double val_fraction, uint64_t seed) {
  if (trees.size() < 2) throw DataError("need at least 2 trees to split");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("validation fraction must be in (0, 1)");
  }
  std::vector<size_t> order(trees.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng = KeyedStream(seed, "split");
  Shuffle(order, rng);
  const size_t n_val = std::clamp<size_t>(
      static_cast<size_t>(std::llround(val_fraction * static_cast<double>(trees.size()))), 1,
      trees.size() - 1);

  Split split;
  std::set<ProductionRule> train_rules;
  for (size_t i = n_val; i < order.size(); ++i) {
    split.train.push_back(order[i]);
    for (auto& r : ptb::productions(trees[order[i]])) train_rules.insert(std::move(r));
  }
  for (size_t i = 0; i < n_val; ++i) {
    const auto rules = ptb::productions(trees[order[i]]);
    const bool closed = std::all_of(rules.begin(), rules.end(),
                                    [&](const ProductionRule& r) { return train_rules.count(r); });
    if (closed) {
      split.val.push_back(order[i]);
    } else {
      split.train.push_back(order[i]);
      train_rules.insert(rules.begin(), rules.end());
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  return split;
}

void CheckSplit(const std::vector<SyntaxTree>& trees, const Split& split) {
  if (split.train.empty()) throw DataError("training split is empty");
  if (split.val.empty()) throw DataError("validation split is empty");
  std::set<ProductionRule> train_rules;
  for (size_t i : split.train) {
    if (i >= trees.size()) throw DataError(fmt::format("split index {} out of range", i));
    for (auto& r : ptb::productions(trees[i])) train_rules.insert(std::move(r));
  }
  for (size_t i : split.val) {
    if (i >= trees.size()) throw DataError(fmt::format("split index {} out of range", i));
    for (const auto& r : ptb::productions(trees[i])) {
      if (!train_rules.count(r)) {
        throw DataError(fmt::format("validation tree {} uses production '{}' absent from training",
                                    i, r.ToString()));
      }
    }
  }
}

double chance_mse(std::span<const Tensor> embeddings) {
  if (embeddings.size() < 2) throw DataError("chance MSE needs at least 2 embeddings");
  const size_t d = embeddings.front().size();
  for (const Tensor& e : embeddings) {
    if (e.size() != d) throw ShapeError("chance MSE: embeddings differ in width");
  }
  double total = 0.0;
  for (size_t i = 0; i < embeddings.size(); ++i) {
    for (size_t j = i + 1; j < embeddings.size(); ++j) {
      double pair = 0.0;
      for (size_t k = 0; k < d; ++k) {
        const double diff = embeddings[i][k] - embeddings[j][k];
        pair += diff * diff;
      }
      total += pair / static_cast<double>(d);
    }
  }
  const double pairs = 0.5 * static_cast<double>(embeddings.size()) *
                       static_cast<double>(embeddings.size() - 1);
  return total / pairs;
}

std::optional<double> DistillationReport::Normalized(double mse) const {
  if (chance_mse <= 0.0) return std::nullopt;
  return mse / chance_mse;
}

nlohmann::json DistillationReport::ToJson() const {
  nlohmann::json doc;
  doc["chance_mse"] = chance_mse;
  doc["best_epoch"] = best_epoch;
  doc["best_val_mse"] = best_val_mse;
  doc["normalized"] = normalized ? nlohmann::json(*normalized) : nlohmann::json(nullptr);
  doc["n_train"] = n_train;
  doc["n_val"] = n_val;
  auto& curve = doc["epochs"] = nlohmann::json::array();
  for (const auto& e : epochs) {
    curve.push_back({{"epoch", e.epoch}, {"train_mse", e.train_mse}, {"val_mse", e.val_mse}});
  }
  return doc;
}

std::string DistillationReport::CurveCsv() const {
  std::string out = "epoch,train_mse,val_mse,normalized\n";
  for (const auto& e : epochs) {
    const auto n = Normalized(e.val_mse);
    out += fmt::format("{},{:.17g},{:.17g},{}\n", e.epoch, e.train_mse, e.val_mse,
                       n ? fmt::format("{:.17g}", *n) : "");
  }
  return out;
}

double mean_mse(const ModuleNet& net, std::span<const Example> examples,
                std::span<const size_t> indices, size_t threads) {
  if (indices.empty()) throw DataError("mean MSE over an empty set");
  std::vector<double> losses(indices.size());
  ParallelFor(indices.size(), threads, [&](size_t i) {
    const Example& ex = examples[indices[i]];
    losses[i] = mse(compose(net, ex.tree, ex.tokens), ex.target);
  });
  double total = 0.0;
  for (double l : losses) total += l;
  return total / static_cast<double>(losses.size());
}

namespace {

std::vector<Tensor> ZeroGrads(const ModuleNet& net) {
  std::vector<Tensor> grads;
  for (const Tensor* p : net.Parameters()) grads.emplace_back(p->rows(), p->cols());
  return grads;
}

void CheckFinite(double value, const char* what, size_t epoch) {
  if (!std::isfinite(value)) {
    throw NumericalError(fmt::format("non-finite {} at epoch {}", what, epoch));
  }
}

}  // namespace

DistillationReport distill(ModuleNet& net, std::span<const Example> examples, const Split& split,
                           const DistillOptions& options) {
  if (options.batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (!(options.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  std::vector<SyntaxTree> trees;
  for (const auto& ex : examples) trees.push_back(ex.tree);
  CheckSplit(trees, split);

  DistillationReport report;
  std::vector<Tensor> targets;
  for (const auto& ex : examples) targets.push_back(ex.target);
  report.chance_mse = chance_mse(targets);
  report.n_train = split.train.size();
  report.n_val = split.val.size();

  AdamState adam(AdamOptions{.learning_rate = options.learning_rate});
  SplitMix64 rng = KeyedStream(options.seed, "distill");
  std::vector<size_t> order = split.train;
  const auto params = net.Parameters();
  for (size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    Shuffle(order, rng);
    for (size_t start = 0; start < order.size(); start += options.batch_size) {
      const size_t end = std::min(order.size(), start + options.batch_size);
      std::vector<Tensor> grads = ZeroGrads(net);
      for (size_t b = start; b < end; ++b) {
        const Example& ex = examples[order[b]];
        ad::Tape tape;
        TapeParameters tp(tape, net);
        const ad::Var out = compose(tape, net, tp, ex.tree, ex.tokens);
        tape.Backward(ad::mse(out, tape.Leaf(ex.target)));
        tp.Accumulate(grads);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (Tensor& g : grads) g = scale(g, inv);
      adam.Step(params, grads);
    }
    EpochStats stats{epoch, mean_mse(net, examples, split.train, options.threads),
                     mean_mse(net, examples, split.val, options.threads)};
    CheckFinite(stats.train_mse, "training MSE", epoch);
    CheckFinite(stats.val_mse, "validation MSE", epoch);
    if (report.epochs.empty() || stats.val_mse < report.best_val_mse) {
      report.best_val_mse = stats.val_mse;
      report.best_epoch = epoch;
    }
    report.epochs.push_back(stats);
  }
  if (!report.epochs.empty()) report.normalized = report.Normalized(report.best_val_mse);
  return report;
}

namespace {

void CheckPair(const ModuleNet& net, const Module& module, const ModulePair& pair) {
  const size_t width = module.rule.arity() * net.dim();
  if (pair.input.rows() != 1 || pair.input.cols() != width) {
    throw ShapeError(fmt::format("module {} has arity {} and expects input [1,{}], got {}",
                                 module.rule.ToString(), module.rule.arity(), width,
                                 pair.input.ShapeString()));
  }
  if (pair.target.rows() != 1 || pair.target.cols() != net.dim()) {
    throw ShapeError(fmt::format("target shape {} does not match D={}", pair.target.ShapeString(),
                                 net.dim()));
  }
}

double PairsMse(const ModuleNet& net, const Module& module, std::span<const ModulePair> pairs) {
  double total = 0.0;
  for (const auto& pair : pairs) total += mse(apply_module(net, module, pair.input), pair.target);
  return total / static_cast<double>(pairs.size());
}

}  // namespace

double fit_module(ModuleNet& net, const ProductionRule& rule, std::span<const ModulePair> pairs,
                  const DistillOptions& options) {
  if (pairs.empty()) throw DataError("no training pairs for module " + rule.ToString());
  if (options.batch_size == 0) throw ConfigError("batch size must be at least 1");
  const size_t index = net.IndexOf(rule);
  Module& module = net.module(index);
  for (const auto& pair : pairs) CheckPair(net, module, pair);

  std::vector<Tensor*> params;
  for (Tensor& p : module.params) params.push_back(&p);
  AdamState adam(AdamOptions{.learning_rate = options.learning_rate});
  SplitMix64 rng = KeyedStream(options.seed, "fit:" + rule.ToString());
  std::vector<size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    Shuffle(order, rng);
    for (size_t start = 0; start < order.size(); start += options.batch_size) {
      const size_t end = std::min(order.size(), start + options.batch_size);
      std::vector<Tensor> grads;
      for (const Tensor* p : params) grads.emplace_back(p->rows(), p->cols());
      for (size_t b = start; b < end; ++b) {
        ad::Tape tape;
        TapeParameters tp(tape, net);
        const ad::Var out = apply_module(tape, net, index, tp, tape.Leaf(pairs[order[b]].input));
        tape.Backward(ad::mse(out, tape.Leaf(pairs[order[b]].target)));
        const auto vars = tp.Get(index);
        for (size_t p = 0; p < grads.size(); ++p) grads[p] = add(grads[p], vars[p].grad());
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (Tensor& g : grads) g = scale(g, inv);
      adam.Step(params, grads);
    }
  }
  const double final_mse = PairsMse(net, module, pairs);
  CheckFinite(final_mse, "module MSE", options.epochs);
  return final_mse;
}

std::map<std::string, double> eval_module_generalization(
    const ModuleNet& net, const ProductionRule& rule,
    const std::map<std::string, std::vector<ModulePair>>& groups) {
  const Module& module = net.At(rule);
  std::map<std::string, double> out;
  for (const auto& [name, pairs] : groups) {
    if (pairs.empty()) continue;
    for (const auto& pair : pairs) CheckPair(net, module, pair);
    out[name] = PairsMse(net, module, pairs);
  }
  return out;
}

void save_net(const std::filesystem::path& dir, const ModuleNet& net) {
  std::filesystem::create_directories(dir);
  nlohmann::json index;
  index["format"] = "synnamon-checkpoint";
  index["version"] = 1;
  index["arch"] = ToString(net.arch());
  index["dim"] = net.dim();
  index["hidden"] = net.hidden();
  index["pos_modules"] = net.pos_modules();
  auto& modules = index["modules"] = nlohmann::json::array();
  const auto names = ParameterNames(net.arch());
  for (size_t m = 0; m < net.size(); ++m) {
    const Module& module = net.module(m);
    nlohmann::json files;
    for (size_t p = 0; p < module.params.size(); ++p) {
      const std::string file = fmt::format("m{:04d}.{}.npy", m, names[p]);
      save_tensor(dir / file, module.params[p]);
      files[names[p]] = file;
    }
    modules.push_back({{"rule", module.rule.ToString()}, {"tensors", files}});
  }
  WriteFileBytes(dir / "index.json", index.dump(2) + "\n");
}

ModuleNet load_net(const std::filesystem::path& dir) {
  const auto path = dir / "index.json";
  if (!std::filesystem::exists(path)) {
    throw DataError("checkpoint index " + path.string() + " does not exist");
  }
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(ReadFileBytes(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  try {
    const Architecture arch = ParseArchitecture(index.at("arch").get<std::string>());
    const auto names = ParameterNames(arch);
    std::vector<Module> modules;
    for (const auto& entry : index.at("modules")) {
      Module m{ProductionRule::FromString(entry.at("rule").get<std::string>()), {}};
      for (const auto& name : names) {
        m.params.push_back(load_tensor(dir / entry.at("tensors").at(name).get<std::string>()));
      }
      modules.push_back(std::move(m));
    }
    return ModuleNet(arch, index.at("dim").get<size_t>(), index.at("hidden").get<size_t>(),
                     index.value("pos_modules", true), std::move(modules));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace compsyn::synnamon

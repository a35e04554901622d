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

#include "commands.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "compsyn/attnflow.h"
#include "compsyn/cacr.h"
#include "compsyn/errors.h"
#include "compsyn/fixtures.h"
#include "compsyn/manifest.h"
#include "compsyn/npy.h"
#include "compsyn/pooling.h"
#include "compsyn/ptb.h"
#include "compsyn/random.h"
#include "compsyn/synnamon.h"
#include "compsyn/tracing.h"

namespace compsyn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void WriteText(const fs::path& path, const std::string& text) {
  WriteFileBytes(path, text);
  spdlog::info("wrote {}", path.string());
}

void WriteJson(const fs::path& path, const json& doc) { WriteText(path, doc.dump(2) + "\n"); }

std::vector<ptb::SyntaxTree> LoadTrees(const std::string& path, bool keep_tags = false,
                                       bool keep_empty = false) {
  ptb::ParseOptions options;
  options.strip_function_tags = !keep_tags;
  options.drop_empty_elements = !keep_empty;
  auto trees = ptb::read_tree_file(path, options);
  spdlog::info("read {} trees from {}", trees.size(), path);
  return trees;
}

std::vector<EmbeddingSet> LoadSets(const std::string& path) {
  auto sets = load_embedding_sets(LoadManifest(path));
  spdlog::info("read {} embedding sets from {}", sets.size(), path);
  return sets;
}

std::set<int> ParseIntSet(const std::string& text) {
  std::set<int> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("invalid integer list '" + text + "'");
    }
    out.insert(std::stoi(item));
    start = comma + 1;
  }
  return out;
}

std::string Preview(const Tensor& t) {
  if (t.size() > 8) return fmt::format("[{} values, L2 norm {:.6g}]", t.size(), std::sqrt(squared_norm(t.data())));
  std::string out = "[";
  for (size_t k = 0; k < t.size(); ++k) out += fmt::format("{}{:.6g}", k ? ", " : "", t[k]);
  return out + "]";
}

synnamon::NetOptions NetOptionsFrom(const std::string& arch, size_t dim, size_t hidden,
                                    bool no_pos, uint64_t seed) {
  synnamon::NetOptions options;
  options.arch = synnamon::ParseArchitecture(arch);
  options.dim = dim;
  options.hidden = hidden;
  options.pos_modules = !no_pos;
  options.seed = seed;
  return options;
}

std::vector<ptb::ProductionRule> VocabularyOf(const std::vector<ptb::SyntaxTree>& trees) {
  std::set<ptb::ProductionRule> rules;
  for (const auto& tree : trees)
    for (auto& r : ptb::productions(tree)) rules.insert(std::move(r));
  return {rules.begin(), rules.end()};
}

// ---- parse-trees ----------------------------------------------------------

struct ParseTreesArgs {
  std::string trees;
  std::string out;
  std::string kept_out;
  std::string heights = "4,5";
  size_t max_rules = 300;
  std::string height_mode = "edges-with-pos";
  bool keep_function_tags = false;
  bool keep_empty_elements = false;
};

void RunParseTrees(const ParseTreesArgs& a) {
  const auto trees = LoadTrees(a.trees, a.keep_function_tags, a.keep_empty_elements);
  const ptb::HeightMode mode = ptb::ParseHeightMode(a.height_mode);
  std::map<int, size_t> histogram;
  std::set<int> all_heights;
  for (const auto& tree : trees) {
    const int h = ptb::height(tree, mode);
    ++histogram[h];
    all_heights.insert(h);
  }
  const std::set<int> heights = a.heights == "all" ? all_heights : ParseIntSet(a.heights);
  const auto result = ptb::filter_corpus(trees, heights, a.max_rules, mode);

  json doc;
  doc["n_trees"] = trees.size();
  doc["height_mode"] = a.height_mode;
  doc["heights"] = std::vector<int>(heights.begin(), heights.end());
  doc["max_rules"] = a.max_rules;
  json hist = json::object();
  for (const auto& [h, n] : histogram) hist[std::to_string(h)] = n;
  doc["height_histogram"] = hist;
  doc["height_filtered"] = result.height_filtered;
  doc["kept"] = result.kept;
  auto& vocab = doc["vocabulary"] = json::array();
  for (const auto& rc : result.vocabulary) {
    vocab.push_back({{"rule", rc.rule.ToString()}, {"count", rc.count}});
  }
  WriteJson(a.out, doc);
  if (!a.kept_out.empty()) {
    std::string text;
    for (size_t i : result.kept) text += ptb::serialize(trees[i]) + "\n";
    WriteText(a.kept_out, text);
  }
  fmt::print("trees: {}\nheight-filtered: {}\nkept: {}\nrules: {}\n", trees.size(),
             result.height_filtered, result.kept.size(), result.vocabulary.size());
}

// ---- build-net ------------------------------------------------------------

struct NetArgs {
  std::string arch = "linear";
  size_t dim = 768;
  size_t hidden = 0;
  bool no_pos_modules = false;
};

void AddNetOptions(CLI::App* cmd, NetArgs& a) {
  cmd->add_option("--arch", a.arch, "Module architecture: linear, nonlin or double")
      ->check(CLI::IsMember({"linear", "nonlin", "double"}));
  cmd->add_option("--d", a.dim, "Embedding dimension D");
  cmd->add_option("--hidden", a.hidden, "Hidden width H for double modules (0 means D)");
  cmd->add_flag("--no-pos-modules", a.no_pos_modules,
                "Feed token embeddings directly to phrase modules");
}

struct BuildNetArgs {
  std::string trees;
  std::string vocab;
  std::string out;
  NetArgs net;
};

void RunBuildNet(const BuildNetArgs& a, const Globals& g) {
  if (a.trees.empty() == a.vocab.empty()) throw ConfigError("give exactly one of --trees or --vocab");
  std::vector<ptb::ProductionRule> vocab;
  if (!a.trees.empty()) {
    vocab = VocabularyOf(LoadTrees(a.trees));
  } else {
    std::istringstream in(ReadFileBytes(a.vocab));
    for (std::string line; std::getline(in, line);) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      vocab.push_back(ptb::ProductionRule::FromString(line));
    }
  }
  const auto net = synnamon::build_net(
      vocab, NetOptionsFrom(a.net.arch, a.net.dim, a.net.hidden, a.net.no_pos_modules, g.seed));
  synnamon::save_net(a.out, net);
  fmt::print("modules: {}\nparameters: {}\narch: {}\nD: {}\n", net.size(), net.ParameterCount(),
             synnamon::ToString(net.arch()), net.dim());
}

// ---- distill --------------------------------------------------------------

struct DistillArgs {
  std::string trees;
  std::string manifest;
  std::string fixtures;
  size_t fixture_sentences = 200;
  uint64_t fixture_seed = 0;
  std::string fixture_teacher = "net";
  std::string fixture_teacher_arch = "linear";
  std::string net_dir;
  NetArgs net;
  double lr = 5e-5;
  size_t epochs = 10;
  size_t batch = 16;
  double val_fraction = 0.2;
  std::string out;
  CLI::App* cmd = nullptr;
};

void RunDistill(DistillArgs a, const Globals& g) {
  std::vector<ptb::SyntaxTree> trees;
  std::vector<EmbeddingSet> sets;
  if (!a.fixtures.empty()) {
    if (a.fixtures != "synthetic") throw ConfigError("unknown fixture set '" + a.fixtures + "'");
    if (!a.trees.empty() || !a.manifest.empty()) {
      throw ConfigError("--fixtures cannot be combined with --trees/--manifest");
    }
    // Self-distillation preset, applied only where the user gave no value.
    if (a.cmd->count("--lr") == 0) a.lr = 1e-3;
    if (a.cmd->count("--epochs") == 0) a.epochs = 500;
    if (a.cmd->count("--d") == 0) a.net.dim = 16;
    spdlog::info("synthetic preset: lr={} epochs={} d={}", a.lr, a.epochs, a.net.dim);
    fixtures::CorpusOptions co;
    co.sentences = a.fixture_sentences;
    co.dim = a.net.dim;
    co.seed = a.fixture_seed;
    co.teacher = fixtures::ParseTeacherKind(a.fixture_teacher);
    co.teacher_arch = synnamon::ParseArchitecture(a.fixture_teacher_arch);
    auto corpus = fixtures::make_corpus(co);
    trees = std::move(corpus.trees);
    sets = std::move(corpus.sets);
  } else {
    if (a.trees.empty() || a.manifest.empty()) {
      throw ConfigError("distill needs --trees and --manifest, or --fixtures synthetic");
    }
    trees = LoadTrees(a.trees);
    sets = LoadSets(a.manifest);
  }
  const auto examples = synnamon::MakeExamples(trees, sets);
  const auto split = synnamon::split_corpus(trees, a.val_fraction, g.seed);
  spdlog::info("split: {} train, {} validation", split.train.size(), split.val.size());

  synnamon::ModuleNet net;
  if (!a.net_dir.empty()) {
    net = synnamon::load_net(a.net_dir);
  } else {
    const auto vocab = VocabularyOf(trees);
    net = synnamon::build_net(
        vocab, NetOptionsFrom(a.net.arch, a.net.dim, a.net.hidden, a.net.no_pos_modules, g.seed));
  }
  spdlog::info("net: {} modules, {} parameters", net.size(), net.ParameterCount());

  synnamon::DistillOptions options;
  options.learning_rate = a.lr;
  options.epochs = a.epochs;
  options.batch_size = a.batch;
  options.seed = g.seed;
  options.threads = g.threads;
  const auto report = synnamon::distill(net, examples, split, options);

  const fs::path out(a.out);
  json doc = report.ToJson();
  doc["split"] = {{"train", split.train}, {"val", split.val}};
  WriteJson(out / "report.json", doc);
  WriteText(out / "curve.csv", report.CurveCsv());
  synnamon::save_net(out / "net", net);
  fmt::print("chance_mse: {:.6g}\nbest_epoch: {}\nbest_val_mse: {:.6g}\nnormalized: {}\n",
             report.chance_mse, report.best_epoch, report.best_val_mse,
             report.normalized ? fmt::format("{:.6g}", *report.normalized) : "undefined");
}

// ---- eval-net -------------------------------------------------------------

struct EvalNetArgs {
  std::string net;
  std::string trees;
  std::string manifest;
  std::string out;
  std::string per_example;
};

void RunEvalNet(const EvalNetArgs& a, const Globals& g) {
  const auto net = synnamon::load_net(a.net);
  const auto examples = synnamon::MakeExamples(LoadTrees(a.trees), LoadSets(a.manifest));
  std::vector<size_t> all(examples.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<Tensor> targets;
  std::string csv = "id,mse\n";
  for (const auto& ex : examples) {
    targets.push_back(ex.target);
    csv += fmt::format("{},{:.17g}\n", ex.id, mse(synnamon::compose(net, ex.tree, ex.tokens), ex.target));
  }
  const double mean = synnamon::mean_mse(net, examples, all, g.threads);
  const double chance = examples.size() >= 2 ? synnamon::chance_mse(targets) : 0.0;
  json doc;
  doc["n"] = examples.size();
  doc["mean_mse"] = mean;
  doc["chance_mse"] = chance;
  doc["normalized"] = chance > 0 ? json(mean / chance) : json(nullptr);
  WriteJson(a.out, doc);
  if (!a.per_example.empty()) WriteText(a.per_example, csv);
  fmt::print("examples: {}\nmean_mse: {:.6g}\nchance_mse: {:.6g}\nnormalized: {}\n",
             examples.size(), mean, chance,
             chance > 0 ? fmt::format("{:.6g}", mean / chance) : "undefined");
}

// ---- cacr -----------------------------------------------------------------

struct CacrArgs {
  std::string manifest;
  std::string layers = "last";
  std::string out;
};

void RunCacr(const CacrArgs& a) {
  const Manifest manifest = LoadManifest(a.manifest);
  const auto selector = cacr::LayerSelector::Parse(a.layers);
  std::string csv = "id,layer,loss_L,loss_V,total,hard_L,hard_V,entropy_LV,entropy_VL\n";
  double sum = 0;
  size_t rows = 0;
  for (const std::string& id : manifest.EntryIds()) {
    const AttentionBundle bundle = load_attention_bundle(manifest, id);
    if (bundle.layers.empty()) throw DataError("bundle '" + id + "' has no layers");
    std::vector<size_t> chosen;
    switch (selector.mode) {
      case cacr::LayerSelector::Mode::kLast: chosen = {bundle.layers.size() - 1}; break;
      case cacr::LayerSelector::Mode::kIndex:
        if (selector.index >= bundle.layers.size()) {
          throw DataError(fmt::format("bundle '{}' has {} layers; layer {} requested", id,
                                      bundle.layers.size(), selector.index));
        }
        chosen = {selector.index};
        break;
      case cacr::LayerSelector::Mode::kAll:
        for (size_t l = 0; l < bundle.layers.size(); ++l) chosen.push_back(l);
        break;
    }
    const auto normalizer =
        bundle.normalized ? cacr::Normalizer::kRenormalize : cacr::Normalizer::kSoftmax;
    for (size_t l : chosen) {
      const AttentionLayer& layer = bundle.layers[l];
      const auto r = cacr::cacr_layer(layer, normalizer);
      if (!std::isfinite(r.total)) throw NumericalError("non-finite CACR loss for " + id);
      csv += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", id,
                         layer.index, r.loss_l, r.loss_v, r.total,
                         cacr::hard_equivalence_loss(layer, cacr::Side::kLanguage, normalizer),
                         cacr::hard_equivalence_loss(layer, cacr::Side::kVision, normalizer),
                         cacr::argmax_entropy(layer.lv), cacr::argmax_entropy(layer.vl));
      sum += r.total;
      ++rows;
    }
  }
  WriteText(a.out, csv);
  fmt::print("rows: {}\nmean_total: {:.6g}\n", rows, rows ? sum / rows : 0.0);
}

// ---- cacr-verify ----------------------------------------------------------

struct CacrVerifyArgs {
  size_t trials = 100;
  size_t max_n = 8;
  std::string out;
};

constexpr double kVerifyTolerance = 1e-9;

void RunCacrVerify(const CacrVerifyArgs& a, const Globals& g) {
  if (a.trials == 0 || a.max_n == 0) throw ConfigError("--trials and --max-n must be positive");
  SplitMix64 rng = KeyedStream(g.seed, "cacr-verify");
  double worst = 0;
  for (size_t t = 0; t < a.trials; ++t) {
    const size_t nl = 1 + rng.Below(a.max_n), nv = 1 + rng.Below(a.max_n);
    Tensor full(nl + nv, nl + nv);
    for (size_t k = 0; k < full.size(); ++k) full[k] = rng.Uniform(-1.0, 1.0);
    const AttentionLayer layer = AttentionLayer::Split(full, nl, nv);
    for (auto side : {cacr::Side::kLanguage, cacr::Side::kVision}) {
      worst = std::max(worst, max_abs_diff(cacr::Projected(layer, side),
                                           cacr::soft_equivalence_oracle(layer, side)));
    }
  }
  const bool pass = worst < kVerifyTolerance;
  if (!a.out.empty()) {
    WriteJson(a.out, {{"trials", a.trials}, {"max_n", a.max_n}, {"seed", g.seed},
                      {"max_abs_diff", worst}, {"tolerance", kVerifyTolerance}, {"pass", pass}});
  }
  fmt::print("max |closed - oracle| = {:.3e}\n{}\n", worst, pass ? "PASS" : "FAIL");
  if (!pass) throw NumericalError(fmt::format("closed form and oracle differ by {:.3e}", worst));
}

// ---- pool -----------------------------------------------------------------

struct PoolArgs {
  std::string strategy = "syn";
  std::string trees;
  std::string manifest;
  std::string out;
  std::string pairs;
  std::string distances_out;
};

void RunPool(const PoolArgs& a) {
  const auto strategy = pooling::ParseStrategy(a.strategy);
  const auto sets = LoadSets(a.manifest);
  std::vector<ptb::SyntaxTree> trees;
  if (!a.trees.empty()) trees = LoadTrees(a.trees);
  if (strategy == pooling::Strategy::kSyntactic && trees.empty()) {
    throw ConfigError("--strategy syn needs --trees");
  }
  if (!trees.empty() && trees.size() != sets.size()) {
    throw DataError(fmt::format("{} trees but {} embedding sets", trees.size(), sets.size()));
  }
  const fs::path out(a.out);
  const fs::path vectors = out.parent_path() / "vectors";
  std::map<std::string, Tensor> pooled;
  std::string csv = "id,strategy,D,vector_file\n";
  for (size_t i = 0; i < sets.size(); ++i) {
    const Tensor v = pooling::pool(strategy, trees.empty() ? nullptr : &trees[i], sets[i]);
    if (!v.AllFinite()) throw NumericalError("non-finite pooled vector for " + sets[i].id);
    const std::string file = fmt::format("{}.{}.npy", sets[i].id, a.strategy);
    save_tensor(vectors / file, v);
    csv += fmt::format("{},{},{},vectors/{}\n", sets[i].id, a.strategy, v.size(), file);
    fmt::print("{}: {}\n", sets[i].id, Preview(v));
    pooled[sets[i].id] = v;
  }
  WriteText(out, csv);

  if (a.pairs.empty()) return;
  const auto pairs = load_caption_pairs(LoadManifest(a.pairs));
  std::string dist = "caption0_id,caption1_id,image0_id,image1_id,distance\n";
  std::vector<Tensor> scores;
  for (const auto& p : pairs) {
    const auto c0 = pooled.find(p.caption0_id), c1 = pooled.find(p.caption1_id);
    if (c0 == pooled.end() || c1 == pooled.end()) {
      throw DataError("caption pair references unknown id " +
                      (c0 == pooled.end() ? p.caption0_id : p.caption1_id));
    }
    dist += fmt::format("{},{},{},{},{:.17g}\n", p.caption0_id, p.caption1_id, p.image0_id,
                        p.image1_id, pooling::euclidean(c0->second, c1->second));
    if (p.scores) scores.push_back(*p.scores);
  }
  fs::path dist_path = a.distances_out;
  if (dist_path.empty()) dist_path = out.parent_path() / (out.stem().string() + ".distances.csv");
  WriteText(dist_path, dist);
  if (!scores.empty()) {
    const auto w = pooling::winoground_scores(scores);
    fmt::print("winoground text: {:.2f}\nwinoground image: {:.2f}\nwinoground group: {:.2f}\n",
               w.text, w.image, w.group);
  }
}

// ---- attnflow -------------------------------------------------------------

struct AttnflowArgs {
  std::string manifest;
  std::string id;
  double k = 2.0;
  std::string out;
  std::string edges_out;
};

void RunAttnflow(const AttnflowArgs& a) {
  const Manifest manifest = LoadManifest(a.manifest);
  const auto ids = manifest.EntryIds();
  if (ids.empty()) throw DataError("manifest has no entries");
  const std::string id = a.id.empty() ? ids.front() : a.id;
  const AttentionBundle bundle = load_attention_bundle(manifest, id);
  const auto edges = attnflow::extract_flow(bundle, a.k);
  std::vector<std::string> tokens = bundle.tokens;
  for (size_t v = tokens.size(); v < bundle.n_language + bundle.n_vision; ++v) {
    tokens.push_back(v < bundle.n_language ? fmt::format("t{}", v)
                                           : fmt::format("<v{}>", v - bundle.n_language));
  }
  WriteText(a.out, attnflow::render_svg(edges, tokens, bundle.layers.size()));
  if (!a.edges_out.empty()) WriteText(a.edges_out, attnflow::EdgesCsv(edges));
  fmt::print("id: {}\nlayers: {}\nedges: {}\n", id, bundle.layers.size(), edges.size());
}

// ---- trace ----------------------------------------------------------------

struct TraceArgs {
  std::string net;
  std::string trees;
  std::string manifest;
  std::string id;
  std::string corrupt_leaves = "0,1";
  double sigma_scale = 1.0;
  size_t samples = 1;
  std::string out;
};

void RunTrace(const TraceArgs& a, const Globals& g) {
  const auto net = synnamon::load_net(a.net);
  const auto trees = LoadTrees(a.trees);
  const auto sets = LoadSets(a.manifest);
  if (trees.size() != sets.size()) {
    throw DataError(fmt::format("{} trees but {} embedding sets", trees.size(), sets.size()));
  }
  size_t index = 0;
  if (!a.id.empty()) {
    const auto it = std::find_if(sets.begin(), sets.end(),
                                 [&](const EmbeddingSet& s) { return s.id == a.id; });
    if (it == sets.end()) throw DataError("no embedding set with id '" + a.id + "'");
    index = static_cast<size_t>(it - sets.begin());
  }
  tracing::TraceOptions options;
  options.corrupt = tracing::ParseLeafList(a.corrupt_leaves);
  options.sigma_scale = a.sigma_scale;
  options.samples = a.samples;
  options.seed = g.seed;
  options.threads = g.threads;
  const auto report = tracing::trace(net, trees[index], sets[index].token_embeddings, options);
  json doc = report.ToJson();
  doc["id"] = sets[index].id;
  WriteJson(a.out, doc);
  fmt::print("id: {}\nd_corrupt: {:.6g}\n", sets[index].id, report.d_corrupt);
  if (report.degenerate) {
    fmt::print("degenerate: corrupted output equals clean output; restorations omitted\n");
    return;
  }
  for (const auto& n : report.nodes) {
    fmt::print("{:>4} {:<8} leaves {}-{} restoration {:.6f}\n", n.node, n.label, n.first_leaf,
               n.last_leaf, *n.restoration);
  }
}

// ---- gen-fixtures ---------------------------------------------------------

struct GenFixturesArgs {
  std::string out;
  size_t sentences = 200;
  size_t dim = 16;
  size_t max_depth = 1;
  std::string teacher = "net";
  std::string teacher_arch = "linear";
  size_t teacher_hidden = 0;
};

void RunGenFixtures(const GenFixturesArgs& a, const Globals& g) {
  fixtures::CorpusOptions options;
  options.sentences = a.sentences;
  options.dim = a.dim;
  options.max_depth = a.max_depth;
  options.seed = g.seed;
  options.teacher = fixtures::ParseTeacherKind(a.teacher);
  options.teacher_arch = synnamon::ParseArchitecture(a.teacher_arch);
  options.teacher_hidden = a.teacher_hidden;
  fixtures::write_fixtures(a.out, options);
  fmt::print("fixtures: {}\nsentences: {}\nD: {}\n", a.out, a.sentences, a.dim);
}

// ---- manual ---------------------------------------------------------------

struct ManualArgs {
  std::string out;
};

template <typename Args>
std::shared_ptr<Args> Keep(Args args = {}) {
  return std::make_shared<Args>(std::move(args));
}

}  // namespace

void AddCommands(CLI::App& app, const Globals& g, std::function<void()>& action) {
  {
    auto a = Keep<ParseTreesArgs>();
    auto* cmd = app.add_subcommand("parse-trees", "Parse a treebank file, count productions and filter the corpus");
    cmd->add_option("--trees", a->trees, "Bracketed trees, one per line")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", a->out, "Summary JSON")->required();
    cmd->add_option("--kept-out", a->kept_out, "Write the kept trees in canonical form");
    cmd->add_option("--heights", a->heights, "Allowed tree heights, comma separated, or 'all'");
    cmd->add_option("--max-rules", a->max_rules, "Keep only trees built from the N most frequent rules");
    cmd->add_option("--height-mode", a->height_mode, "edges-with-pos or edges-without-pos")
        ->check(CLI::IsMember({"edges-with-pos", "edges-without-pos"}));
    cmd->add_flag("--keep-function-tags", a->keep_function_tags, "Keep NP-SBJ style suffixes");
    cmd->add_flag("--keep-empty-elements", a->keep_empty_elements, "Keep -NONE- subtrees");
    cmd->callback([a, &action] { action = [a] { RunParseTrees(*a); }; });
  }
  {
    auto a = Keep<BuildNetArgs>();
    auto* cmd = app.add_subcommand("build-net", "Initialize a module net from a rule vocabulary");
    cmd->add_option("--trees", a->trees, "Take the vocabulary from these trees")->check(CLI::ExistingFile);
    cmd->add_option("--vocab", a->vocab, "Rule per line, e.g. 'S -> NP VP'")->check(CLI::ExistingFile);
    AddNetOptions(cmd, a->net);
    cmd->add_option("--out", a->out, "Checkpoint directory")->required();
    cmd->callback([a, &g, &action] { action = [a, &g] { RunBuildNet(*a, g); }; });
  }
  {
    auto a = Keep<DistillArgs>();
    auto* cmd = app.add_subcommand("distill", "Distill teacher sentence embeddings into a module net");
    a->cmd = cmd;
    cmd->add_option("--trees", a->trees, "Bracketed trees aligned with the manifest entries")->check(CLI::ExistingFile);
    cmd->add_option("--manifest", a->manifest, "embedding_set manifest with sentence embeddings")->check(CLI::ExistingFile);
    cmd->add_option("--fixtures", a->fixtures, "Use a built-in corpus instead of files: synthetic");
    cmd->add_option("--fixture-sentences", a->fixture_sentences, "Synthetic corpus size");
    cmd->add_option("--fixture-seed", a->fixture_seed, "Synthetic corpus seed");
    cmd->add_option("--fixture-teacher", a->fixture_teacher, "Synthetic targets: net, constant or gaussian");
    cmd->add_option("--fixture-teacher-arch", a->fixture_teacher_arch, "Architecture of the synthetic teacher net");
    cmd->add_option("--net", a->net_dir, "Start from this checkpoint instead of a fresh net")->check(CLI::ExistingDirectory);
    AddNetOptions(cmd, a->net);
    cmd->add_option("--lr", a->lr, "Adam learning rate (synthetic preset: 1e-3)");
    cmd->add_option("--epochs", a->epochs, "Training epochs (synthetic preset: 500)");
    cmd->add_option("--batch", a->batch, "Examples per Adam step");
    cmd->add_option("--val-fraction", a->val_fraction, "Share of trees held out for validation");
    cmd->add_option("--out", a->out, "Output directory: report.json, curve.csv, net/")->required();
    cmd->callback([a, &g, &action] { action = [a, &g] { RunDistill(*a, g); }; });
  }
  {
    auto a = Keep<EvalNetArgs>();
    auto* cmd = app.add_subcommand("eval-net", "Score a module net against teacher sentence embeddings");
    cmd->add_option("--net", a->net, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--trees", a->trees, "Bracketed trees")->required()->check(CLI::ExistingFile);
    cmd->add_option("--manifest", a->manifest, "embedding_set manifest")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", a->out, "Summary JSON")->required();
    cmd->add_option("--per-example", a->per_example, "Per-sentence MSE CSV");
    cmd->callback([a, &g, &action] { action = [a, &g] { RunEvalNet(*a, g); }; });
  }
  {
    auto a = Keep<CacrArgs>();
    auto* cmd = app.add_subcommand("cacr", "Cross-modal attention congruence losses per bundle");
    cmd->add_option("--manifest", a->manifest, "attention_bundle manifest")->required()->check(CLI::ExistingFile);
    cmd->add_option("--layers", a->layers, "last, all or a zero-based layer index");
    cmd->add_option("--out", a->out, "Per-layer CSV")->required();
    cmd->callback([a, &action] { action = [a] { RunCacr(*a); }; });
  }
  {
    auto a = Keep<CacrVerifyArgs>();
    auto* cmd = app.add_subcommand("cacr-verify", "Compare closed-form projections with the element-wise oracle");
    cmd->add_option("--trials", a->trials, "Random layers to check");
    cmd->add_option("--max-n", a->max_n, "Largest N_L and N_V");
    cmd->add_option("--out", a->out, "Optional JSON summary");
    cmd->callback([a, &g, &action] { action = [a, &g] { RunCacrVerify(*a, g); }; });
  }
  {
    auto a = Keep<PoolArgs>();
    auto* cmd = app.add_subcommand("pool", "Pool token embeddings into sentence vectors");
    cmd->add_option("--strategy", a->strategy, "syn, mean or first")->check(CLI::IsMember({"syn", "mean", "first"}));
    cmd->add_option("--trees", a->trees, "Bracketed trees aligned with the manifest (needed for syn)")->check(CLI::ExistingFile);
    cmd->add_option("--manifest", a->manifest, "embedding_set manifest")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", a->out, "Index CSV; vectors go to vectors/ beside it")->required();
    cmd->add_option("--pairs", a->pairs, "caption_pair_set manifest for pairwise distances")->check(CLI::ExistingFile);
    cmd->add_option("--distances-out", a->distances_out, "Distance CSV (default: <out>.distances.csv)");
    cmd->callback([a, &action] { action = [a] { RunPool(*a); }; });
  }
  {
    auto a = Keep<AttnflowArgs>();
    auto* cmd = app.add_subcommand("attnflow", "Draw significant attention edges across layers as SVG");
    cmd->add_option("--manifest", a->manifest, "attention_bundle manifest")->required()->check(CLI::ExistingFile);
    cmd->add_option("--id", a->id, "Bundle id (default: first entry)");
    cmd->add_option("--k", a->k, "Keep entries above mean + k standard deviations");
    cmd->add_option("--out", a->out, "SVG file")->required();
    cmd->add_option("--edges-out", a->edges_out, "Edge CSV");
    cmd->callback([a, &action] { action = [a] { RunAttnflow(*a); }; });
  }
  {
    auto a = Keep<TraceArgs>();
    auto* cmd = app.add_subcommand("trace", "Causal tracing over a module net composition");
    cmd->add_option("--net", a->net, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--trees", a->trees, "Bracketed trees")->required()->check(CLI::ExistingFile);
    cmd->add_option("--manifest", a->manifest, "embedding_set manifest")->required()->check(CLI::ExistingFile);
    cmd->add_option("--id", a->id, "Sentence id (default: first entry)");
    cmd->add_option("--corrupt-leaves", a->corrupt_leaves, "Leaf positions to corrupt, comma separated");
    cmd->add_option("--sigma-scale", a->sigma_scale, "Noise scale relative to each leaf's embedding std");
    cmd->add_option("--samples", a->samples, "Noise draws averaged per distance");
    cmd->add_option("--out", a->out, "Report JSON")->required();
    cmd->callback([a, &g, &action] { action = [a, &g] { RunTrace(*a, g); }; });
  }
  {
    auto a = Keep<GenFixturesArgs>();
    auto* cmd = app.add_subcommand("gen-fixtures", "Write a synthetic corpus, embeddings, attention and pairs");
    cmd->add_option("--out", a->out, "Output directory")->required();
    cmd->add_option("--sentences", a->sentences, "Number of sentences");
    cmd->add_option("--d", a->dim, "Embedding dimension");
    cmd->add_option("--max-depth", a->max_depth, "Phrase recursion depth");
    cmd->add_option("--teacher", a->teacher, "net, constant or gaussian")->check(CLI::IsMember({"net", "constant", "gaussian"}));
    cmd->add_option("--teacher-arch", a->teacher_arch, "linear, nonlin or double")->check(CLI::IsMember({"linear", "nonlin", "double"}));
    cmd->add_option("--teacher-hidden", a->teacher_hidden, "Hidden width for a double teacher (0 means D)");
    cmd->callback([a, &g, &action] { action = [a, &g] { RunGenFixtures(*a, g); }; });
  }
  {
    auto a = Keep<ManualArgs>();
    auto* cmd = app.add_subcommand("manual", "Write the Markdown command reference");
    cmd->add_option("--out", a->out, "Markdown file (default: standard output)");
    cmd->callback([a, &app, &action] {
      action = [a, &app] {
        const std::string text = RenderManual(app);
        if (a->out.empty()) {
          fmt::print("{}", text);
        } else {
          WriteText(a->out, text);
        }
      };
    });
  }
  for (auto* sub : app.get_subcommands({})) {
    sub->footer("Global options (--seed, --threads, --log-level, --config) are accepted here too.");
  }
}

}  // namespace compsyn::cli

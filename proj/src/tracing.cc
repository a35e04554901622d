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

#include "compsyn/tracing.h"

#include <cmath>

#include <fmt/format.h>

#include "compsyn/errors.h"
#include "compsyn/parallel.h"
#include "compsyn/random.h"

namespace compsyn::tracing {

using ptb::SyntaxTree;

namespace {

double SquaredDistance(const Tensor& a, const Tensor& b) {
  double total = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    total += d * d;
  }
  return total;
}

double PopulationStd(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

void Describe(const SyntaxTree& node, size_t depth, size_t& next_id, size_t& next_leaf,
              const std::set<size_t>& corrupt, std::vector<NodeTrace>& out) {
  const size_t id = next_id++;
  if (node.is_leaf()) {
    ++next_leaf;
    return;
  }
  const size_t slot = out.size();
  out.push_back({id, node.label, depth, next_leaf, 0, true, std::nullopt});
  for (const auto& child : node.children) {
    Describe(child, depth + 1, next_id, next_leaf, corrupt, out);
  }
  NodeTrace& entry = out[slot];
  entry.last_leaf = next_leaf - 1;
  const auto hit = corrupt.lower_bound(entry.first_leaf);
  entry.clean_subtree = hit == corrupt.end() || *hit > entry.last_leaf;
}

}  // namespace

const NodeTrace& TraceReport::Node(size_t id) const {
  for (const auto& n : nodes) {
    if (n.node == id) return n;
  }
  throw DataError(fmt::format("trace has no internal node {}", id));
}

nlohmann::json TraceReport::ToJson() const {
  nlohmann::json doc;
  doc["corrupt_leaves"] = std::vector<size_t>(corrupt.begin(), corrupt.end());
  doc["sigma_scale"] = sigma_scale;
  doc["sigma"] = sigma;
  doc["seed"] = seed;
  doc["samples"] = samples;
  doc["d_clean"] = d_clean;
  doc["d_corrupt"] = d_corrupt;
  doc["degenerate"] = degenerate;
  auto& list = doc["nodes"] = nlohmann::json::array();
  for (const auto& n : nodes) {
    list.push_back({{"node", n.node},
                    {"label", n.label},
                    {"depth", n.depth},
                    {"leaves", {n.first_leaf, n.last_leaf}},
                    {"clean_subtree", n.clean_subtree},
                    {"restoration", n.restoration ? nlohmann::json(*n.restoration)
                                                  : nlohmann::json(nullptr)}});
  }
  return doc;
}

TraceReport trace(const synnamon::ModuleNet& net, const SyntaxTree& tree, const Tensor& tokens,
                  const TraceOptions& options) {
  if (options.corrupt.empty()) throw ConfigError("corruption set is empty");
  if (!(options.sigma_scale >= 0.0) || !std::isfinite(options.sigma_scale)) {
    throw ConfigError("sigma scale must be a finite non-negative number");
  }
  const auto clean = synnamon::compose_nodes(net, tree, tokens);
  const size_t n_leaves = tokens.rows();
  if (*options.corrupt.rbegin() >= n_leaves) {
    throw DataError(fmt::format("corrupted leaf {} out of range; sentence has {} leaves",
                                *options.corrupt.rbegin(), n_leaves));
  }

  TraceReport report;
  report.corrupt = options.corrupt;
  report.sigma_scale = options.sigma_scale;
  report.seed = options.seed;

  if (options.samples == 0) throw ConfigError("trace needs at least one noise sample");
  report.samples = options.samples;
  for (size_t leaf : options.corrupt) {
    report.sigma.push_back(options.sigma_scale * PopulationStd(tokens.row(leaf)));
  }
  SplitMix64 rng(options.seed);
  std::vector<Tensor> noisy(options.samples, tokens);
  for (Tensor& sample : noisy) {
    size_t s = 0;
    for (size_t leaf : options.corrupt) {
      const double sigma = report.sigma[s++];
      for (size_t k = 0; k < tokens.cols(); ++k) sample(leaf, k) += sigma * rng.Gaussian();
    }
    report.d_corrupt += SquaredDistance(synnamon::compose(net, tree, sample), clean.front());
  }
  report.d_corrupt /= static_cast<double>(options.samples);
  if (!std::isfinite(report.d_corrupt)) throw NumericalError("corrupted run is not finite");
  report.degenerate = report.d_corrupt == 0.0;

  size_t next_id = 0, next_leaf = 0;
  Describe(tree, 0, next_id, next_leaf, options.corrupt, report.nodes);
  if (report.degenerate) return report;

  ParallelFor(report.nodes.size(), options.threads, [&](size_t i) {
    NodeTrace& node = report.nodes[i];
    double distance = 0.0;
    for (const Tensor& sample : noisy) {
      const auto patched =
          synnamon::compose_nodes(net, tree, sample, {{node.node, clean[node.node]}});
      distance += SquaredDistance(patched.front(), clean.front());
    }
    distance /= static_cast<double>(options.samples);
    node.restoration = 1.0 - distance / report.d_corrupt;
  });
  return report;
}

size_t lowest_covering_node(const TraceReport& report) {
  if (report.corrupt.empty() || report.nodes.empty()) throw DataError("empty trace");
  const size_t lo = *report.corrupt.begin(), hi = *report.corrupt.rbegin();
  const NodeTrace* best = nullptr;
  for (const auto& n : report.nodes) {
    if (n.first_leaf <= lo && hi <= n.last_leaf && (!best || n.depth > best->depth)) best = &n;
  }
  return best->node;
}

std::set<size_t> ParseLeafList(const std::string& text) {
  std::set<size_t> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("invalid leaf list '" + text + "' (expected e.g. 0,1)");
    }
    out.insert(std::stoul(item));
    start = comma + 1;
  }
  return out;
}

}  // namespace compsyn::tracing

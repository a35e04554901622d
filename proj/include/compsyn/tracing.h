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

#ifndef COMPSYN_TRACING_H_
#define COMPSYN_TRACING_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "compsyn/ptb.h"
#include "compsyn/synnamon.h"
#include "compsyn/tensor.h"
#include "json.hpp"

namespace compsyn::tracing {

struct TraceOptions {
  std::set<size_t> corrupt;  // leaf positions
  // Noise sigma for a leaf is sigma_scale times the standard deviation of
  // that leaf's embedding entries.
  double sigma_scale = 1.0;
  uint64_t seed = 0;
  // Independent noise draws. Distances are averaged over draws before the
  // restoration ratio is taken.
  size_t samples = 1;
  size_t threads = 1;
};

struct NodeTrace {
  size_t node = 0;  // pre-order index, token leaves included
  std::string label;
  size_t depth = 0;
  size_t first_leaf = 0;
  size_t last_leaf = 0;
  bool clean_subtree = false;  // no corrupted leaf below this node
  std::optional<double> restoration;
};

struct TraceReport {
  std::set<size_t> corrupt;
  double sigma_scale = 1.0;
  std::vector<double> sigma;  // per corrupted leaf, ascending leaf order
  uint64_t seed = 0;
  size_t samples = 1;
  double d_clean = 0.0;
  double d_corrupt = 0.0;
  bool degenerate = false;  // d_corrupt == 0; restorations omitted
  std::vector<NodeTrace> nodes;  // internal nodes, pre-order

  const NodeTrace& Node(size_t id) const;
  nlohmann::json ToJson() const;
};

// Clean run, corrupted run (Gaussian noise on the chosen leaves), then one
// patched run per internal node with that node's clean output restored.
// restoration = 1 - |patched - clean|^2 / |corrupt - clean|^2 at the root,
// each distance averaged over the noise draws.
TraceReport trace(const synnamon::ModuleNet& net, const ptb::SyntaxTree& tree,
                  const Tensor& tokens, const TraceOptions& options);

// Smallest internal node whose span contains every corrupted leaf.
size_t lowest_covering_node(const TraceReport& report);

std::set<size_t> ParseLeafList(const std::string& text);

}  // namespace compsyn::tracing

#endif  // COMPSYN_TRACING_H_

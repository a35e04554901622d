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

#ifndef COMPSYN_ATTNFLOW_H_
#define COMPSYN_ATTNFLOW_H_

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "compsyn/manifest.h"
#include "compsyn/tensor.h"

namespace compsyn::attnflow {

// Significant attention from `source` into `target` at `layer`, i.e. entry
// S_layer[target, source].
struct FlowEdge {
  size_t layer = 0;
  size_t target = 0;
  size_t source = 0;
  double weight = 0.0;
  double z = 0.0;  // (weight - mean) / stddev of the layer

  friend bool operator==(const FlowEdge&, const FlowEdge&) = default;
};

struct LayerStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

LayerStats ComputeStats(const Tensor& layer);

// Every entry strictly above mean + k * stddev of its layer, ordered by
// (layer, target, source). Layers must be square and equally sized.
std::vector<FlowEdge> extract_flow(std::span<const Tensor> layers, double k = 2.0);
std::vector<FlowEdge> extract_flow(const AttentionBundle& bundle, double k = 2.0);

// Fixed layout constants, in SVG user units.
struct SvgStyle {
  double column_spacing = 120.0;  // between neighbouring tokens
  double row_spacing = 40.0;      // between successive layers
  double margin = 40.0;
  double font_size = 11.0;
  double min_stroke = 0.5;
  double max_stroke = 4.0;
};

// Palette indexed by target token index mod 16.
std::span<const char* const> Palette();

// Token rows for levels 0..num_layers stacked bottom to top; an edge of
// layer l runs from its source token on level l to its target on level l+1.
// Stroke width is affine in weight over each layer's significant range.
std::string render_svg(std::span<const FlowEdge> edges, std::span<const std::string> tokens,
                       size_t num_layers, const SvgStyle& style = {});

std::string EdgesCsv(std::span<const FlowEdge> edges);

}  // namespace compsyn::attnflow

#endif  // COMPSYN_ATTNFLOW_H_

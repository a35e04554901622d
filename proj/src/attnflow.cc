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

#include "compsyn/attnflow.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "compsyn/errors.h"

namespace compsyn::attnflow {

namespace {

constexpr const char* kPalette[16] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173", "#3182bd",
};

std::string EscapeXml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

LayerStats ComputeStats(const Tensor& layer) {
  const double n = static_cast<double>(layer.size());
  double sum = 0.0;
  for (double x : layer.data()) sum += x;
  const double mean = sum / n;
  double sq = 0.0;
  for (double x : layer.data()) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / n)};
}

std::vector<FlowEdge> extract_flow(std::span<const Tensor> layers, double k) {
  std::vector<FlowEdge> edges;
  if (layers.empty()) return edges;
  const size_t n = layers.front().rows();
  for (size_t l = 0; l < layers.size(); ++l) {
    const Tensor& s = layers[l];
    if (s.rows() != s.cols()) {
      throw ShapeError("attnflow: layer " + std::to_string(l) + " is not square: " + s.ShapeString());
    }
    if (s.rows() != n) {
      throw ShapeError("attnflow: layer " + std::to_string(l) + " is " + s.ShapeString() +
                       ", expected " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (s.empty()) continue;
    const LayerStats stats = ComputeStats(s);
    const double threshold = stats.mean + k * stats.stddev;
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        const double w = s(i, j);
        if (!(w > threshold)) continue;
        const double z = stats.stddev > 0.0 ? (w - stats.mean) / stats.stddev : 0.0;
        edges.push_back({l, i, j, w, z});
      }
    }
  }
  return edges;
}

std::vector<FlowEdge> extract_flow(const AttentionBundle& bundle, double k) {
  std::vector<Tensor> full;
  for (const AttentionLayer& layer : bundle.layers) full.push_back(layer.Full());
  return extract_flow(full, k);
}

std::span<const char* const> Palette() { return kPalette; }

std::string render_svg(std::span<const FlowEdge> edges, std::span<const std::string> tokens,
                       size_t num_layers, const SvgStyle& style) {
  const size_t n = tokens.size();
  for (const FlowEdge& e : edges) {
    if (e.target >= n || e.source >= n || e.layer >= num_layers) {
      throw ShapeError("attnflow: edge (" + std::to_string(e.layer) + "," + std::to_string(e.target) + "," +
                       std::to_string(e.source) + ") outside " + std::to_string(n) + " tokens x " +
                       std::to_string(num_layers) + " layers");
    }
  }
  const double width = 2.0 * style.margin + static_cast<double>(n ? n - 1 : 0) * style.column_spacing;
  const double height = 2.0 * style.margin + static_cast<double>(num_layers) * style.row_spacing;
  const auto x_of = [&](size_t token) { return style.margin + static_cast<double>(token) * style.column_spacing; };
  const auto y_of = [&](size_t level) {
    return style.margin + static_cast<double>(num_layers - level) * style.row_spacing;
  };

  std::map<size_t, std::pair<double, double>> range;  // layer -> (min, max) weight
  for (const FlowEdge& e : edges) {
    auto [it, inserted] = range.try_emplace(e.layer, e.weight, e.weight);
    if (!inserted) {
      it->second.first = std::min(it->second.first, e.weight);
      it->second.second = std::max(it->second.second, e.weight);
    }
  }

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.2f}\" height=\"{:.2f}\" viewBox=\"0 0 {:.2f} {:.2f}\">\n",
      width, height, width, height);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out += "<g stroke-linecap=\"round\" stroke-opacity=\"0.8\">\n";
  for (const FlowEdge& e : edges) {
    const auto [lo, hi] = range.at(e.layer);
    const double t = hi > lo ? (e.weight - lo) / (hi - lo) : 1.0;
    const double stroke = style.min_stroke + t * (style.max_stroke - style.min_stroke);
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"{:.3f}\"/>\n",
        x_of(e.source), y_of(e.layer), x_of(e.target), y_of(e.layer + 1), kPalette[e.target % 16], stroke);
  }
  out += "</g>\n";
  out += fmt::format("<g font-family=\"monospace\" font-size=\"{:.1f}\" text-anchor=\"middle\">\n", style.font_size);
  for (size_t level = 0; level <= num_layers; ++level) {
    for (size_t t = 0; t < n; ++t) {
      out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" dominant-baseline=\"middle\">{}</text>\n", x_of(t),
                         y_of(level), EscapeXml(tokens[t]));
    }
  }
  out += "</g>\n</svg>\n";
  return out;
}

std::string EdgesCsv(std::span<const FlowEdge> edges) {
  std::string out = "layer,target,source,weight,z\n";
  for (const FlowEdge& e : edges) {
    out += fmt::format("{},{},{},{:.17g},{:.17g}\n", e.layer, e.target, e.source, e.weight, e.z);
  }
  return out;
}

}  // namespace compsyn::attnflow

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tgat/dsp/recording.hpp"

namespace tgat::graph {

struct Edge {
  std::size_t src = 0;  // j
  std::size_t dst = 0;  // i (the node that aggregates)

  bool operator==(const Edge&) const = default;
};

/// One node per channel, fully connected in both directions plus self-loops.
struct EEGGraph {
  dsp::Channels node_features;  // [C][L]
  std::vector<Edge> edges;
  int label = 0;
  std::string trial_id;
  std::string subject_id;
  std::size_t segment_index = 0;

  std::size_t nodes() const noexcept { return node_features.size(); }
};

EEGGraph build_graph(const dsp::Segment& s);

/// Block-diagonal stack of graphs that share node count and feature length.
struct GraphBatch {
  std::size_t num_graphs = 0;
  std::size_t nodes_per_graph = 0;
  std::size_t feature_length = 0;
  std::vector<double> node_features;  // [num_nodes x feature_length], row-major
  std::vector<Edge> edges;            // global node ids
  std::vector<std::size_t> offsets;   // first node of each graph
  std::vector<std::size_t> membership;
  std::vector<int> labels;
  std::vector<std::string> trial_ids;
  std::vector<std::string> subject_ids;
  std::vector<std::size_t> segment_indices;

  std::size_t num_nodes() const noexcept { return num_graphs * nodes_per_graph; }
  std::vector<std::size_t> edge_sources() const;
  std::vector<std::size_t> edge_targets() const;
};

/// Throws ShapeError for an empty list or mismatched node count / length.
GraphBatch batch_graphs(std::span<const EEGGraph* const> graphs);
GraphBatch batch_graphs(std::span<const EEGGraph> graphs);

std::vector<EEGGraph> unbatch(const GraphBatch& b);

}  // namespace tgat::graph

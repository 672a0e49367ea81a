#include "tgat/graph/graph.hpp"

#include "tgat/error.hpp"

namespace tgat::graph {

EEGGraph build_graph(const dsp::Segment& s) {
  EEGGraph g;
  g.node_features = s.samples;
  g.label = s.label;
  g.trial_id = s.trial_id;
  g.subject_id = s.subject_id;
  g.segment_index = s.segment_index;
  const std::size_t c = s.samples.size();
  g.edges.reserve(c * c);
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t i = 0; i < c; ++i) g.edges.push_back({j, i});
  return g;
}

std::vector<std::size_t> GraphBatch::edge_sources() const {
  std::vector<std::size_t> v(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) v[e] = edges[e].src;
  return v;
}

std::vector<std::size_t> GraphBatch::edge_targets() const {
  std::vector<std::size_t> v(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) v[e] = edges[e].dst;
  return v;
}

GraphBatch batch_graphs(std::span<const EEGGraph* const> graphs) {
  if (graphs.empty()) throw ShapeError("batch_graphs: empty batch");
  GraphBatch b;
  b.num_graphs = graphs.size();
  b.nodes_per_graph = graphs.front()->nodes();
  b.feature_length = b.nodes_per_graph ? graphs.front()->node_features.front().size() : 0;
  if (b.nodes_per_graph == 0) throw ShapeError("batch_graphs: graph without nodes");
  b.node_features.reserve(b.num_nodes() * b.feature_length);

  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const EEGGraph& g = *graphs[gi];
    if (g.nodes() != b.nodes_per_graph)
      throw ShapeError("batch_graphs: graph " + std::to_string(gi) + " has " + std::to_string(g.nodes()) +
                       " nodes, expected " + std::to_string(b.nodes_per_graph));
    const std::size_t off = gi * b.nodes_per_graph;
    b.offsets.push_back(off);
    for (const auto& row : g.node_features) {
      if (row.size() != b.feature_length)
        throw ShapeError("batch_graphs: graph " + std::to_string(gi) + " has feature length " +
                         std::to_string(row.size()) + ", expected " + std::to_string(b.feature_length));
      b.node_features.insert(b.node_features.end(), row.begin(), row.end());
      b.membership.push_back(gi);
    }
    for (const Edge& e : g.edges) {
      if (e.src >= g.nodes() || e.dst >= g.nodes())
        throw IndexError("batch_graphs: edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                         ") outside graph of " + std::to_string(g.nodes()) + " nodes");
      b.edges.push_back({e.src + off, e.dst + off});
    }
    b.labels.push_back(g.label);
    b.trial_ids.push_back(g.trial_id);
    b.subject_ids.push_back(g.subject_id);
    b.segment_indices.push_back(g.segment_index);
  }
  return b;
}

GraphBatch batch_graphs(std::span<const EEGGraph> graphs) {
  std::vector<const EEGGraph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const auto& g : graphs) ptrs.push_back(&g);
  return batch_graphs(ptrs);
}

std::vector<EEGGraph> unbatch(const GraphBatch& b) {
  std::vector<EEGGraph> out(b.num_graphs);
  const std::size_t c = b.nodes_per_graph, len = b.feature_length;
  for (std::size_t gi = 0; gi < b.num_graphs; ++gi) {
    EEGGraph& g = out[gi];
    g.label = b.labels[gi];
    g.trial_id = b.trial_ids[gi];
    g.subject_id = b.subject_ids[gi];
    g.segment_index = b.segment_indices[gi];
    for (std::size_t n = 0; n < c; ++n) {
      const auto row = b.node_features.begin() + static_cast<std::ptrdiff_t>((b.offsets[gi] + n) * len);
      g.node_features.emplace_back(row, row + static_cast<std::ptrdiff_t>(len));
    }
  }
  for (const Edge& e : b.edges) {
    const std::size_t gi = b.membership.at(e.src);
    out[gi].edges.push_back({e.src - b.offsets[gi], e.dst - b.offsets[gi]});
  }
  return out;
}

}  // namespace tgat::graph

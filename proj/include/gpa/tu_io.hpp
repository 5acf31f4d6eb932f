#pragma once

#include <filesystem>
#include <string>

#include "gpa/graph.hpp"

namespace gpa {

// TUDataset plain-text directory layout:
//   {name}_A.txt              edge list, 1-indexed global node ids, both directions
//   {name}_graph_indicator.txt  graph id (1-indexed) per node
//   {name}_graph_labels.txt   class label per graph
//   {name}_node_labels.txt    optional integer label per node
//   {name}_node_attributes.txt optional comma-separated reals per node
// Graph labels are remapped to 0..num_classes-1 by sorted original value.
// Duplicate edge lines are deduplicated; self-loops are dropped (counted in
// ParseReport). Node attributes, if present, land in Graph::features.
struct ParseReport {
  long self_loops_dropped = 0;
  long duplicate_edges_dropped = 0;
};

GraphDataset parse_tudataset(const std::filesystem::path& directory, const std::string& name,
                             ParseReport* report = nullptr);

// Inverse of parse_tudataset (same conventions); used by the round-trip tests
// and for emitting synthetic fixtures.
void write_tudataset(const GraphDataset& ds, const std::filesystem::path& directory,
                     const std::string& name);

enum class FeaturePolicy { OneHotLabels, OneHotDegree };

// OneHotLabels: one-hot over the distinct node labels, concatenated with raw
// attributes when both exist. OneHotDegree: degree_cap+1 buckets, degrees >=
// cap share the last slot.
GraphDataset build_features(const GraphDataset& raw, FeaturePolicy policy, int degree_cap = 10);

}  // namespace gpa

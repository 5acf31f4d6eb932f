#include "gpa/tu_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gpa/errors.hpp"

namespace gpa {
namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

long parse_int(const std::string& tok, const std::string& file, long line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(file, line, "expected integer, got '" + tok + "'");
  return value;
}

double parse_real(const std::string& tok, const std::string& file, long line) {
  try {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, line, "expected real, got '" + tok + "'");
  }
}

std::ifstream open_required(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw FormatMissing("missing required file: " + p.string());
  return in;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace

GraphDataset parse_tudataset(const std::filesystem::path& directory, const std::string& name,
                             ParseReport* report) {
  const auto file = [&](const std::string& suffix) { return directory / (name + suffix); };

  // graph_indicator: graph id per node, defines node -> graph and node counts.
  std::vector<int> node_graph;  // 0-based graph index per global node (0-based)
  {
    const auto path = file("_graph_indicator.txt");
    auto in = open_required(path);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (blank(line)) continue;
      auto toks = split_tokens(line);
      if (toks.size() != 1) throw ParseError(path.string(), lineno, "expected one graph id");
      long gid = parse_int(toks[0], path.string(), lineno);
      if (gid < 1) throw ParseError(path.string(), lineno, "graph ids are 1-indexed");
      node_graph.push_back(static_cast<int>(gid - 1));
    }
  }
  const int total_nodes = static_cast<int>(node_graph.size());
  const int num_graphs = total_nodes ? *std::max_element(node_graph.begin(), node_graph.end()) + 1 : 0;

  // Local (per-graph) node ids in original relative order.
  std::vector<int> local_id(total_nodes);
  std::vector<int> graph_size(num_graphs, 0);
  for (int v = 0; v < total_nodes; ++v) local_id[v] = graph_size[node_graph[v]]++;

  // Graph labels, remapped to 0..C-1 by sorted original value.
  std::vector<int> graph_labels;
  {
    const auto path = file("_graph_labels.txt");
    auto in = open_required(path);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (blank(line)) continue;
      auto toks = split_tokens(line);
      if (toks.size() != 1) throw ParseError(path.string(), lineno, "expected one label");
      graph_labels.push_back(static_cast<int>(parse_int(toks[0], path.string(), lineno)));
    }
    if (static_cast<int>(graph_labels.size()) != num_graphs)
      throw ParseError(path.string(), lineno, "graph label count != number of graphs");
  }
  std::map<int, int> label_map;
  for (int raw : graph_labels) label_map.emplace(raw, 0);
  {
    int next = 0;
    for (auto& [raw, dense] : label_map) dense = next++;
  }

  // Edges.
  std::vector<std::set<std::pair<int, int>>> edge_sets(num_graphs);
  ParseReport rep;
  {
    const auto path = file("_A.txt");
    auto in = open_required(path);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (blank(line)) continue;
      auto toks = split_tokens(line);
      if (toks.size() != 2) throw ParseError(path.string(), lineno, "expected two node ids");
      long a = parse_int(toks[0], path.string(), lineno);
      long b = parse_int(toks[1], path.string(), lineno);
      if (a < 1 || a > total_nodes || b < 1 || b > total_nodes)
        throw ParseError(path.string(), lineno, "node id out of range");
      int u = static_cast<int>(a - 1), v = static_cast<int>(b - 1);
      if (node_graph[u] != node_graph[v])
        throw CrossGraphEdge(path.string() + ":" + std::to_string(lineno) +
                             ": edge endpoints belong to different graphs");
      if (u == v) {
        ++rep.self_loops_dropped;
        continue;
      }
      int g = node_graph[u];
      int lu = local_id[u], lv = local_id[v];
      auto key = std::minmax(lu, lv);
      if (!edge_sets[g].emplace(key.first, key.second).second) ++rep.duplicate_edges_dropped;
    }
    // Every undirected edge appears twice in _A.txt, so the second direction
    // always lands in the duplicate counter; report only true extras.
    rep.duplicate_edges_dropped = std::max(0L, rep.duplicate_edges_dropped -
                                                   [&] {
                                                     long m = 0;
                                                     for (auto& s : edge_sets) m += s.size();
                                                     return m;
                                                   }());
  }

  // Optional node labels.
  std::vector<int> node_labels;
  bool have_node_labels = false;
  {
    const auto path = file("_node_labels.txt");
    std::ifstream in(path);
    if (in) {
      have_node_labels = true;
      std::string line;
      long lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        auto toks = split_tokens(line);
        if (toks.empty()) continue;
        node_labels.push_back(static_cast<int>(parse_int(toks[0], path.string(), lineno)));
      }
      if (static_cast<int>(node_labels.size()) != total_nodes)
        throw ParseError(path.string(), 0, "node label count != number of nodes");
    }
  }

  // Optional node attributes.
  std::vector<std::vector<double>> node_attrs;
  int attr_dim = 0;
  {
    const auto path = file("_node_attributes.txt");
    std::ifstream in(path);
    if (in) {
      std::string line;
      long lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        auto toks = split_tokens(line);
        std::vector<double> row;
        row.reserve(toks.size());
        for (const auto& t : toks) row.push_back(parse_real(t, path.string(), lineno));
        if (attr_dim == 0)
          attr_dim = static_cast<int>(row.size());
        else if (static_cast<int>(row.size()) != attr_dim)
          throw ParseError(path.string(), lineno, "inconsistent attribute width");
        node_attrs.push_back(std::move(row));
      }
      if (static_cast<int>(node_attrs.size()) != total_nodes)
        throw ParseError(path.string(), 0, "attribute row count != number of nodes");
    }
  }

  GraphDataset ds;
  ds.name = name;
  ds.num_classes = static_cast<int>(label_map.size());
  ds.feature_dim = attr_dim;
  ds.graphs.resize(num_graphs);
  // Global node order within a graph is its local order.
  std::vector<std::vector<int>> members(num_graphs);
  for (int v = 0; v < total_nodes; ++v) members[node_graph[v]].push_back(v);
  for (int g = 0; g < num_graphs; ++g) {
    const int n = graph_size[g];
    Tensor feats;
    if (attr_dim > 0) {
      feats = Tensor(n, attr_dim);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < attr_dim; ++j) feats.at(i, j) = node_attrs[members[g][i]][j];
    }
    std::vector<int> labels;
    if (have_node_labels) {
      labels.resize(n);
      for (int i = 0; i < n; ++i) labels[i] = node_labels[members[g][i]];
    }
    std::vector<std::pair<int, int>> edges(edge_sets[g].begin(), edge_sets[g].end());
    ds.graphs[g] = make_graph(n, edges, std::move(feats), label_map.at(graph_labels[g]),
                              std::move(labels));
  }
  if (report) *report = rep;
  return ds;
}

void write_tudataset(const GraphDataset& ds, const std::filesystem::path& directory,
                     const std::string& name) {
  std::filesystem::create_directories(directory);
  const auto file = [&](const std::string& suffix) { return directory / (name + suffix); };

  std::ofstream a(file("_A.txt"));
  std::ofstream ind(file("_graph_indicator.txt"));
  std::ofstream gl(file("_graph_labels.txt"));
  bool any_node_labels = false, any_attrs = false;
  for (const Graph& g : ds.graphs) {
    if (!g.node_labels.empty()) any_node_labels = true;
    if (g.features.numel() > 0) any_attrs = true;
  }
  std::ofstream nl, na;
  if (any_node_labels) nl.open(file("_node_labels.txt"));
  if (any_attrs) na.open(file("_node_attributes.txt"));

  int base = 1;  // 1-indexed global node ids
  int gid = 1;
  for (const Graph& g : ds.graphs) {
    for (int u = 0; u < g.num_nodes; ++u) {
      ind << gid << "\n";
      for (int k = g.csr_offsets[u]; k < g.csr_offsets[u + 1]; ++k)
        a << (base + u) << ", " << (base + g.csr_neighbors[k]) << "\n";
      if (any_node_labels) nl << (g.node_labels.empty() ? 0 : g.node_labels[u]) << "\n";
      if (any_attrs) {
        std::ostringstream row;
        row.precision(17);
        for (int j = 0; j < g.features.ncols; ++j) {
          if (j) row << ", ";
          row << g.features.at(u, j);
        }
        na << row.str() << "\n";
      }
    }
    gl << (g.label ? *g.label : 0) << "\n";
    base += g.num_nodes;
    ++gid;
  }
}

GraphDataset build_features(const GraphDataset& raw, FeaturePolicy policy, int degree_cap) {
  GraphDataset out = raw;
  if (policy == FeaturePolicy::OneHotLabels) {
    std::set<int> distinct;
    for (const Graph& g : raw.graphs) {
      if (g.node_labels.empty() && g.num_nodes > 0)
        throw MissingNodeLabels("one_hot_labels policy requires node labels");
      distinct.insert(g.node_labels.begin(), g.node_labels.end());
    }
    std::map<int, int> index;
    int next = 0;
    for (int v : distinct) index[v] = next++;
    const int onehot_dim = static_cast<int>(distinct.size());
    const int attr_dim = raw.feature_dim;
    for (size_t gi = 0; gi < out.graphs.size(); ++gi) {
      Graph& g = out.graphs[gi];
      const Graph& src = raw.graphs[gi];
      Tensor f(g.num_nodes, onehot_dim + attr_dim);
      for (int v = 0; v < g.num_nodes; ++v) {
        f.at(v, index.at(src.node_labels[v])) = 1.0;
        for (int j = 0; j < attr_dim; ++j) f.at(v, onehot_dim + j) = src.features.at(v, j);
      }
      g.features = std::move(f);
    }
    out.feature_dim = onehot_dim + attr_dim;
  } else {
    if (degree_cap < 0) throw std::invalid_argument("degree_cap must be >= 0");
    const int dim = degree_cap + 1;
    for (Graph& g : out.graphs) {
      Tensor f(g.num_nodes, dim);
      for (int v = 0; v < g.num_nodes; ++v) f.at(v, std::min(g.degree(v), degree_cap)) = 1.0;
      g.features = std::move(f);
    }
    out.feature_dim = dim;
  }
  return out;
}

}  // namespace gpa

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "gpa/errors.hpp"
#include "gpa/graph.hpp"
#include "gpa/tu_io.hpp"
#include "support.hpp"

using namespace gpa;
using namespace gpa::testing;

namespace {

void write_fixture(const std::filesystem::path& dir) {
  // Graph 1: triangle (nodes 1..3), graph 2: 2-node path (nodes 4..5).
  write_file(dir / "fix_A.txt",
             "1, 2\n2, 1\n1, 3\n3, 1\n2, 3\n3, 2\n4, 5\n5, 4\n");
  write_file(dir / "fix_graph_indicator.txt", "1\n1\n1\n2\n2\n");
  write_file(dir / "fix_graph_labels.txt", "1\n-1\n");
}

}  // namespace

TEST_CASE("parse fixture: triangle plus path") {
  TempDir tmp("parse_fixture");
  write_fixture(tmp.path());
  auto ds = parse_tudataset(tmp.path(), "fix");
  REQUIRE(ds.size() == 2);
  CHECK(ds.num_classes == 2);
  auto st = stats(ds);
  CHECK(st.num_graphs == 2);
  CHECK(st.avg_nodes == doctest::Approx(2.5));
  CHECK(st.avg_edges == doctest::Approx(2.0));
  // labels remapped by sorted original value: -1 -> 0, 1 -> 1
  CHECK(*ds.graphs[0].label == 1);
  CHECK(*ds.graphs[1].label == 0);
  for (const Graph& g : ds.graphs) g.check_valid();
  CHECK(ds.graphs[0].undirected_edge_count() == 3);
  CHECK(ds.graphs[1].undirected_edge_count() == 1);
}

TEST_CASE("parse degenerate single-node dataset with empty edge file") {
  TempDir tmp("parse_degenerate");
  write_file(tmp.path() / "one_A.txt", "");
  write_file(tmp.path() / "one_graph_indicator.txt", "1\n");
  write_file(tmp.path() / "one_graph_labels.txt", "0\n");
  auto ds = parse_tudataset(tmp.path(), "one");
  REQUIRE(ds.size() == 1);
  CHECK(ds.graphs[0].num_nodes == 1);
  CHECK(ds.graphs[0].undirected_edge_count() == 0);
  auto st = stats(ds);
  CHECK(st.avg_nodes == doctest::Approx(1.0));
  CHECK(st.avg_edges == doctest::Approx(0.0));
}

TEST_CASE("parse errors") {
  TempDir tmp("parse_errors");
  SUBCASE("missing mandatory file") {
    write_file(tmp.path() / "x_A.txt", "");
    CHECK_THROWS_AS(parse_tudataset(tmp.path(), "x"), FormatMissing);
  }
  SUBCASE("cross-graph edge") {
    write_file(tmp.path() / "x_A.txt", "1, 3\n3, 1\n");
    write_file(tmp.path() / "x_graph_indicator.txt", "1\n1\n2\n");
    write_file(tmp.path() / "x_graph_labels.txt", "0\n0\n");
    CHECK_THROWS_AS(parse_tudataset(tmp.path(), "x"), CrossGraphEdge);
  }
  SUBCASE("non-integer token reports line number") {
    write_file(tmp.path() / "x_A.txt", "1, 2\nbogus, 1\n");
    write_file(tmp.path() / "x_graph_indicator.txt", "1\n1\n");
    write_file(tmp.path() / "x_graph_labels.txt", "0\n");
    try {
      parse_tudataset(tmp.path(), "x");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line_number == 2);
    }
  }
}

TEST_CASE("self-loops dropped and duplicates deduplicated") {
  TempDir tmp("parse_loops");
  write_file(tmp.path() / "x_A.txt", "1, 1\n1, 2\n2, 1\n1, 2\n");
  write_file(tmp.path() / "x_graph_indicator.txt", "1\n1\n");
  write_file(tmp.path() / "x_graph_labels.txt", "0\n");
  ParseReport rep;
  auto ds = parse_tudataset(tmp.path(), "x", &rep);
  CHECK(ds.graphs[0].undirected_edge_count() == 1);
  CHECK(rep.self_loops_dropped == 1);
  CHECK(rep.duplicate_edges_dropped == 1);
  ds.graphs[0].check_valid();
}

TEST_CASE("build_features one_hot_labels") {
  GraphDataset raw;
  raw.num_classes = 1;
  Graph g = triangle();
  g.node_labels = {0, 1, 2};
  g.label = 0;
  raw.graphs.push_back(g);
  auto ds = build_features(raw, FeaturePolicy::OneHotLabels);
  CHECK(ds.feature_dim == 3);
  for (int v = 0; v < 3; ++v) {
    double sum = 0;
    for (int j = 0; j < 3; ++j) sum += ds.graphs[0].features.at(v, j);
    CHECK(sum == doctest::Approx(1.0));
    CHECK(ds.graphs[0].features.at(v, v) == doctest::Approx(1.0));
  }
  SUBCASE("missing node labels throws") {
    GraphDataset bare;
    bare.graphs.push_back(triangle());
    CHECK_THROWS_AS(build_features(bare, FeaturePolicy::OneHotLabels), MissingNodeLabels);
  }
  SUBCASE("labels and attributes concatenate") {
    raw.graphs[0].features = ones_features(3, 2);
    raw.feature_dim = 2;
    auto both = build_features(raw, FeaturePolicy::OneHotLabels);
    CHECK(both.feature_dim == 5);
    CHECK(both.graphs[0].features.at(1, 1) == doctest::Approx(1.0));  // one-hot part
    CHECK(both.graphs[0].features.at(1, 3) == doctest::Approx(1.0));  // attribute part
  }
}

TEST_CASE("build_features one_hot_degree") {
  GraphDataset raw;
  raw.graphs.push_back(clique(8));  // degree 7 everywhere
  raw.graphs.push_back(triangle()); // degree 2 everywhere
  auto ds = build_features(raw, FeaturePolicy::OneHotDegree, 4);
  CHECK(ds.feature_dim == 5);
  CHECK(ds.graphs[0].features.at(0, 4) == doctest::Approx(1.0));  // 7 buckets into cap
  for (int v = 0; v < 3; ++v) CHECK(ds.graphs[1].features.at(v, 2) == doctest::Approx(1.0));
}

TEST_CASE("split sizes, determinism, partition") {
  GraphDataset ds;
  ds.graphs.resize(188);
  for (auto& g : ds.graphs) g = triangle();
  auto s = split(ds, 0.1, 42);
  CHECK(s.valid_indices.size() == 19);  // round(18.8)
  CHECK(s.train_indices.size() == 169);
  auto s2 = split(ds, 0.1, 42);
  CHECK(s.train_indices == s2.train_indices);
  CHECK(s.valid_indices == s2.valid_indices);
  auto s3 = split(ds, 0.1, 43);
  CHECK(s.valid_indices != s3.valid_indices);
  std::set<int> all(s.train_indices.begin(), s.train_indices.end());
  all.insert(s.valid_indices.begin(), s.valid_indices.end());
  CHECK(all.size() == 188);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 187);

  GraphDataset ten;
  ten.graphs.resize(10, triangle());
  auto half = split(ten, 0.5, 1);
  CHECK(half.valid_indices.size() == 5);
  CHECK(half.train_indices.size() == 5);

  GraphDataset tiny;
  tiny.graphs.resize(3, triangle());
  CHECK_THROWS_AS(split(tiny, 0.01, 1), DegenerateSplit);
}

TEST_CASE("stats of single 1-node graph") {
  GraphDataset ds;
  ds.graphs.push_back(make_graph(1, {}));
  ds.num_classes = 1;
  auto st = stats(ds);
  CHECK(st.num_graphs == 1);
  CHECK(st.avg_nodes == doctest::Approx(1.0));
  CHECK(st.avg_edges == doctest::Approx(0.0));
}

TEST_CASE("kfold partition and sizes") {
  std::vector<int> idx;
  for (int i = 0; i < 100; ++i) idx.push_back(i);
  auto folds = kfold(idx, 10, 5);
  REQUIRE(folds.size() == 10);
  std::set<int> seen;
  for (auto& [train, test] : folds) {
    CHECK(test.size() == 10);
    CHECK(train.size() == 90);
    seen.insert(test.begin(), test.end());
  }
  CHECK(seen.size() == 100);

  std::vector<int> idx103;
  for (int i = 0; i < 103; ++i) idx103.push_back(i);
  auto folds103 = kfold(idx103, 10, 5);
  int elevens = 0, tens = 0;
  for (auto& [train, test] : folds103) {
    if (test.size() == 11) ++elevens;
    if (test.size() == 10) ++tens;
  }
  CHECK(elevens == 3);
  CHECK(tens == 7);

  auto again = kfold(idx, 10, 5);
  CHECK(again[0].second == folds[0].second);
  CHECK_THROWS_AS(kfold(std::vector<int>{1, 2}, 3, 0), TooManyFolds);
}

TEST_CASE("TU round-trip preserves the dataset") {
  RngStream rng(123, 0, 0, 0);
  GraphDataset ds;
  ds.name = "rt";
  ds.num_classes = 2;
  ds.feature_dim = 3;
  for (int i = 0; i < 12; ++i) {
    Graph g = random_graph(rng, 12, 3);
    g.label = static_cast<int>(rng.next_index(2));
    g.node_labels.resize(g.num_nodes);
    for (auto& l : g.node_labels) l = static_cast<int>(rng.next_index(4));
    ds.graphs.push_back(std::move(g));
  }
  TempDir tmp("roundtrip");
  write_tudataset(ds, tmp.path(), "rt");
  auto back = parse_tudataset(tmp.path(), "rt");
  REQUIRE(back.size() == ds.size());
  CHECK(back.num_classes == ds.num_classes);
  CHECK(back.feature_dim == ds.feature_dim);
  for (int i = 0; i < ds.size(); ++i) {
    const Graph &a = ds.graphs[i], &b = back.graphs[i];
    b.check_valid();
    CHECK(a.num_nodes == b.num_nodes);
    CHECK(a.csr_offsets == b.csr_offsets);
    CHECK(a.csr_neighbors == b.csr_neighbors);
    CHECK(a.node_labels == b.node_labels);
    CHECK(*a.label == *b.label);
    REQUIRE(a.features.numel() == b.features.numel());
    for (size_t j = 0; j < a.features.values.size(); ++j)
      CHECK(a.features.values[j] == doctest::Approx(b.features.values[j]).epsilon(1e-15));
  }
}

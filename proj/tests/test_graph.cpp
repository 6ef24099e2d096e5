#include <doctest.h>

#include <cstdio>
#include <set>

#include "authprof/errors.hpp"
#include "authprof/graph.hpp"
#include "authprof/rng.hpp"

using namespace authprof;

namespace {

// Deterministic graph at the published scale: 1,836 nodes, 7,561 edges.
CommunityGraph paper_scale_graph() {
  CommunityGraph g;
  char buf[16];
  for (int i = 0; i < 1836; ++i) {
    std::snprintf(buf, sizeof(buf), "u%04d", i);
    g.add_author(buf);
  }
  Rng rng(20180101);
  while (g.edge_count() < 7561) {
    const int a = rng.below_int(1836);
    const int b = rng.below_int(1836);
    if (a == b) continue;
    char ba[16], bb[16];
    std::snprintf(ba, sizeof(ba), "u%04d", a);
    std::snprintf(bb, sizeof(bb), "u%04d", b);
    g.add_edge(ba, bb);
  }
  return g;
}

}  // namespace

TEST_CASE("add_author is idempotent and starts from the empty graph") {
  CommunityGraph g;
  g.add_author("u1");
  CHECK(g.node_count() == 1);
  CHECK(g.edge_count() == 0);
  g.add_author("u1");
  CHECK(g.node_count() == 1);
  CHECK_THROWS_AS(g.add_author(""), FormatError);
}

TEST_CASE("add_edge creates endpoints, ignores duplicates and orientation") {
  CommunityGraph g;
  g.add_edge("u1", "u2");
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
  g.add_edge("u2", "u1");
  CHECK(g.edge_count() == 1);
  CHECK(g.has_edge("u1", "u2"));
  CHECK(g.has_edge("u2", "u1"));
  CHECK_THROWS_AS(g.add_edge("u1", "u1"), SelfLoopError);
}

TEST_CASE("degree counts incident edges") {
  CommunityGraph g;
  g.add_author("lonely");
  g.add_edge("hub", "a");
  g.add_edge("hub", "b");
  g.add_edge("hub", "c");
  CHECK(g.degree("lonely") == 0);
  CHECK(g.degree("hub") == 3);
  CHECK(g.degree("a") == 1);
  CHECK_THROWS_AS(g.degree("nobody"), UnknownAuthorError);
}

TEST_CASE("density over simple graphs") {
  CommunityGraph k4;
  const char* ids[] = {"a", "b", "c", "d"};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) k4.add_edge(ids[i], ids[j]);
  }
  CHECK(k4.density() == doctest::Approx(1.0));

  CommunityGraph path3;
  path3.add_edge("a", "b");
  path3.add_edge("b", "c");
  CHECK(path3.density() == doctest::Approx(2.0 / 3.0));

  CommunityGraph tiny;
  tiny.add_author("a");
  CHECK_THROWS_AS(tiny.density(), DegenerateGraphError);
}

TEST_CASE("neighbors are sorted, symmetric, and empty for solitary nodes") {
  CommunityGraph g;
  g.add_author("solo");
  g.add_edge("u", "c");
  g.add_edge("u", "a");
  g.add_edge("u", "b");
  CHECK(g.neighbors("solo").empty());
  CHECK(g.neighbors("u") == std::vector<AuthorId>{"a", "b", "c"});
  CHECK_THROWS_AS(g.neighbors("ghost"), UnknownAuthorError);

  Rng rng(7);
  CommunityGraph random;
  for (int e = 0; e < 60; ++e) {
    const auto a = "n" + std::to_string(rng.below(20));
    const auto b = "n" + std::to_string(rng.below(20));
    if (a != b) random.add_edge(a, b);
  }
  std::size_t degree_sum = 0;
  for (const auto& u : random.authors()) {
    degree_sum += random.degree(u);
    for (const auto& v : random.neighbors(u)) {
      const auto back = random.neighbors(v);
      CHECK(std::find(back.begin(), back.end(), u) != back.end());
    }
  }
  CHECK(degree_sum == 2 * random.edge_count());
}

TEST_CASE("paper-scale counts, mean degree, and both density readings") {
  const CommunityGraph g = paper_scale_graph();
  CHECK(g.node_count() == 1836);
  CHECK(g.edge_count() == 7561);

  double degree_sum = 0;
  for (const auto& a : g.authors()) degree_sum += static_cast<double>(g.degree(a));
  CHECK(degree_sum / 1836.0 == doctest::Approx(8.236).epsilon(1e-3));

  // |E| / C(|V|, 2) = 7561 / 1684530
  CHECK(g.density() == doctest::Approx(0.0044885).epsilon(1e-4));
  CHECK(g.density_non_solitary() >= g.density());
}

TEST_CASE("density restricted to non-solitary nodes") {
  CommunityGraph g;
  g.add_edge("a", "b");
  for (int i = 0; i < 8; ++i) g.add_author("solo" + std::to_string(i));
  CHECK(g.density() == doctest::Approx(1.0 / 45.0));
  CHECK(g.density_non_solitary() == doctest::Approx(1.0));
}

TEST_CASE("edge-list files round-trip and report malformed lines") {
  CommunityGraph g;
  g.add_edge("alice", "bob");
  g.add_edge("bob", "carol");
  g.add_author("dave");

  const std::string edges = "/tmp/authprof_test_edges.tsv";
  const std::string solo = "/tmp/authprof_test_solo.txt";
  save_edge_list(g, edges);
  save_solitary_list(g, solo);
  const CommunityGraph back = load_edge_list(edges, solo);
  CHECK(back.authors() == g.authors());
  CHECK(back.edge_count() == g.edge_count());
  for (const auto& a : g.authors()) CHECK(back.neighbors(a) == g.neighbors(a));

  {
    std::ofstream out("/tmp/authprof_test_bad.tsv");
    out << "# comment\n";
    out << "a\tb\n";
    out << "b\ta\n";      // swapped duplicate collapses
    out << "just_one\n";  // malformed
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(load_edge_list("/tmp/authprof_test_bad.tsv")),
                       doctest::Contains("authprof_test_bad.tsv:4"), FormatError);
  {
    std::ofstream out("/tmp/authprof_test_bad.tsv");
    out << "a\tb\nb\ta\n";
  }
  CHECK(load_edge_list("/tmp/authprof_test_bad.tsv").edge_count() == 1);
  CHECK_THROWS_AS(static_cast<void>(load_edge_list("/tmp/no_such_file.tsv")), IoError);
}

TEST_CASE("indexed view mirrors the graph and answers adjacency") {
  CommunityGraph g;
  g.add_edge("b", "a");
  g.add_edge("b", "c");
  g.add_author("zz");
  const IndexedGraph ix(g);
  CHECK(ix.node_count() == 4);
  CHECK(ix.index_of("a") == 0);
  CHECK(ix.id_of(1) == "b");
  CHECK(ix.index_of("missing") == -1);
  CHECK(ix.degree(ix.index_of("zz")) == 0);
  CHECK(ix.adjacent(ix.index_of("a"), ix.index_of("b")));
  CHECK_FALSE(ix.adjacent(ix.index_of("a"), ix.index_of("c")));
  const auto nbrs = ix.neighbors(ix.index_of("b"));
  CHECK(std::vector<int>(nbrs.begin(), nbrs.end()) ==
        std::vector<int>{ix.index_of("a"), ix.index_of("c")});
}

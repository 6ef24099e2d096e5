#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace authprof {

/// Stable external identifier of an author. Non-empty, unique within a graph.
using AuthorId = std::string;

/// Undirected, unlabeled author graph: nodes are authors, an edge means the
/// two authors follow each other in at least one direction. No self-loops,
/// no duplicate edges. Construction is single-threaded; once built, the
/// graph is read-only and safe to share across walk workers.
class CommunityGraph {
 public:
  /// Idempotent. Empty ids are rejected.
  void add_author(const AuthorId& a);

  /// Adds both endpoints if missing; idempotent and orientation-free.
  /// Throws SelfLoopError if u == v.
  void add_edge(const AuthorId& u, const AuthorId& v);

  bool has_author(const AuthorId& a) const { return adjacency_.count(a) != 0; }
  bool has_edge(const AuthorId& u, const AuthorId& v) const;

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::size_t solitary_count() const;

  /// Number of incident edges. Throws UnknownAuthorError.
  std::size_t degree(const AuthorId& a) const;

  /// Adjacent authors sorted by id (stable across runs). Throws UnknownAuthorError.
  std::vector<AuthorId> neighbors(const AuthorId& a) const;

  /// |E| / C(|V|, 2). Throws DegenerateGraphError for graphs with < 2 nodes.
  double density() const;

  /// Same ratio restricted to nodes of degree >= 1. The paper-style variant;
  /// throws DegenerateGraphError when fewer than two such nodes exist.
  double density_non_solitary() const;

  /// All authors sorted by id.
  std::vector<AuthorId> authors() const;

  const std::map<AuthorId, std::set<AuthorId>>& adjacency() const { return adjacency_; }

 private:
  std::map<AuthorId, std::set<AuthorId>> adjacency_;
  std::size_t edge_count_ = 0;
};

/// Edge-list file: one `<author_id>\t<author_id>` per line, '#' comments.
/// Duplicate lines and swapped orientations collapse to one edge. Solitary
/// authors may be declared in a companion file, one id per line.
CommunityGraph load_edge_list(const std::string& edges_path,
                              const std::optional<std::string>& solitary_path = std::nullopt);

void save_edge_list(const CommunityGraph& g, const std::string& edges_path);
void save_solitary_list(const CommunityGraph& g, const std::string& path);

/// Immutable index-based view for samplers. Indices are assigned in sorted-id
/// order, so neighbor lists sorted by index are also sorted by id.
class IndexedGraph {
 public:
  explicit IndexedGraph(const CommunityGraph& g);

  int node_count() const { return static_cast<int>(ids_.size()); }
  const AuthorId& id_of(int idx) const { return ids_[static_cast<std::size_t>(idx)]; }
  /// -1 when the author is not in the graph.
  int index_of(const AuthorId& a) const;

  std::span<const int> neighbors(int idx) const;
  std::size_t degree(int idx) const { return neighbors(idx).size(); }
  bool adjacent(int u, int v) const;

 private:
  std::vector<AuthorId> ids_;
  std::unordered_map<AuthorId, int> index_;
  std::vector<std::size_t> offsets_;
  std::vector<int> targets_;
};

}  // namespace authprof

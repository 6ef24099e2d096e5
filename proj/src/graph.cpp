#include "authprof/graph.hpp"

#include <algorithm>

#include "authprof/errors.hpp"
#include "authprof/util.hpp"

namespace authprof {

void CommunityGraph::add_author(const AuthorId& a) {
  if (a.empty()) throw FormatError("author id must be non-empty");
  adjacency_.try_emplace(a);
}

void CommunityGraph::add_edge(const AuthorId& u, const AuthorId& v) {
  if (u == v) throw SelfLoopError("self-loop rejected for author '" + u + "'");
  add_author(u);
  add_author(v);
  const bool inserted = adjacency_[u].insert(v).second;
  adjacency_[v].insert(u);
  if (inserted) ++edge_count_;
}

bool CommunityGraph::has_edge(const AuthorId& u, const AuthorId& v) const {
  auto it = adjacency_.find(u);
  return it != adjacency_.end() && it->second.count(v) != 0;
}

std::size_t CommunityGraph::solitary_count() const {
  std::size_t n = 0;
  for (const auto& [id, nbrs] : adjacency_) {
    if (nbrs.empty()) ++n;
  }
  return n;
}

std::size_t CommunityGraph::degree(const AuthorId& a) const {
  auto it = adjacency_.find(a);
  if (it == adjacency_.end()) throw UnknownAuthorError("unknown author '" + a + "'");
  return it->second.size();
}

std::vector<AuthorId> CommunityGraph::neighbors(const AuthorId& a) const {
  auto it = adjacency_.find(a);
  if (it == adjacency_.end()) throw UnknownAuthorError("unknown author '" + a + "'");
  return {it->second.begin(), it->second.end()};
}

double CommunityGraph::density() const {
  const std::size_t n = node_count();
  if (n < 2) throw DegenerateGraphError("density undefined for graphs with fewer than 2 nodes");
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(edge_count_) / pairs;
}

double CommunityGraph::density_non_solitary() const {
  const std::size_t n = node_count() - solitary_count();
  if (n < 2) throw DegenerateGraphError("fewer than 2 non-solitary nodes");
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(edge_count_) / pairs;
}

std::vector<AuthorId> CommunityGraph::authors() const {
  std::vector<AuthorId> out;
  out.reserve(adjacency_.size());
  for (const auto& [id, nbrs] : adjacency_) out.push_back(id);
  return out;
}

CommunityGraph load_edge_list(const std::string& edges_path,
                              const std::optional<std::string>& solitary_path) {
  CommunityGraph g;
  const auto lines = read_lines(edges_path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = strip(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_whitespace(line);
    if (fields.size() != 2) {
      throw FormatError(edges_path + ":" + std::to_string(i + 1) +
                        ": expected two author ids, got " + std::to_string(fields.size()));
    }
    if (fields[0] == fields[1]) {
      throw SelfLoopError(edges_path + ":" + std::to_string(i + 1) + ": self-loop on '" +
                          fields[0] + "'");
    }
    g.add_edge(fields[0], fields[1]);
  }
  if (solitary_path) {
    const auto solo = read_lines(*solitary_path);
    for (std::size_t i = 0; i < solo.size(); ++i) {
      const std::string id = strip(solo[i]);
      if (id.empty() || id[0] == '#') continue;
      g.add_author(id);
    }
  }
  return g;
}

void save_edge_list(const CommunityGraph& g, const std::string& edges_path) {
  auto out = open_output(edges_path);
  for (const auto& [u, nbrs] : g.adjacency()) {
    for (const auto& v : nbrs) {
      if (u < v) out << u << '\t' << v << '\n';
    }
  }
}

void save_solitary_list(const CommunityGraph& g, const std::string& path) {
  auto out = open_output(path);
  for (const auto& [u, nbrs] : g.adjacency()) {
    if (nbrs.empty()) out << u << '\n';
  }
}

IndexedGraph::IndexedGraph(const CommunityGraph& g) {
  ids_ = g.authors();  // sorted
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) index_[ids_[i]] = static_cast<int>(i);
  offsets_.reserve(ids_.size() + 1);
  offsets_.push_back(0);
  targets_.reserve(2 * g.edge_count());
  for (const auto& id : ids_) {
    const auto& nbrs = g.adjacency().at(id);
    for (const auto& v : nbrs) targets_.push_back(index_.at(v));
    // set iteration is ordered by id, which matches index order
    offsets_.push_back(targets_.size());
  }
}

int IndexedGraph::index_of(const AuthorId& a) const {
  auto it = index_.find(a);
  return it == index_.end() ? -1 : it->second;
}

std::span<const int> IndexedGraph::neighbors(int idx) const {
  const auto b = offsets_[static_cast<std::size_t>(idx)];
  const auto e = offsets_[static_cast<std::size_t>(idx) + 1];
  return {targets_.data() + b, e - b};
}

bool IndexedGraph::adjacent(int u, int v) const {
  const auto ns = neighbors(u);
  return std::binary_search(ns.begin(), ns.end(), v);
}

}  // namespace authprof

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace islanding {

// Disjoint cover of the vertex set by nonempty islands. Canonical form:
// every island sorted ascending, islands ordered by smallest member.
struct Partition {
  std::vector<std::vector<int>> islands;
  std::string origin; // tag of the producing strategy, for reports

  int island_count() const { return static_cast<int>(islands.size()); }

  // Sorts members and islands into canonical form and validates pairwise
  // disjointness / non-emptiness. Throws std::invalid_argument on overlap.
  void canonicalize();

  // vertex -> island index lookup over `universe_size` vertices; vertices
  // not covered map to -1.
  std::vector<int> labels(int universe_size) const;

  bool covers(int universe_size) const;

  bool operator==(const Partition& other) const {
    return islands == other.islands;
  }
  // Lexicographic order on the canonical island lists (deterministic
  // tie-breaking between equal-cost schemes).
  bool operator<(const Partition& other) const {
    return islands < other.islands;
  }

  static Partition of(std::vector<std::vector<int>> sets,
                      std::string origin = "");
  static Partition single(int universe_size, std::string origin = "");
  static Partition singletons(int universe_size, std::string origin = "");
};

// Coarsest common refinement: all nonempty pairwise island intersections.
Partition meet(const Partition& a, const Partition& b);

// Splits every island into the connected components it induces in the
// adjacency graph (entries > 0 are edges).
Partition connected_components_refine(const Partition& p,
                                      const Eigen::MatrixXd& adjacency);

// Maps an island's vertex list to the connected components it induces.
std::vector<std::vector<int>> induced_components(
    const std::vector<int>& island, const Eigen::MatrixXd& adjacency);

} // namespace islanding

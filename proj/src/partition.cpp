#include "islanding/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace islanding {

void Partition::canonicalize() {
  for (auto& island : islands) {
    if (island.empty())
      throw std::invalid_argument("partition contains an empty island");
    std::sort(island.begin(), island.end());
  }
  std::sort(islands.begin(), islands.end());
  std::set<int> seen;
  for (const auto& island : islands)
    for (int v : island)
      if (!seen.insert(v).second)
        throw std::invalid_argument("partition islands overlap at vertex " +
                                    std::to_string(v));
}

std::vector<int> Partition::labels(int universe_size) const {
  std::vector<int> lab(universe_size, -1);
  for (int k = 0; k < island_count(); ++k)
    for (int v : islands[k]) {
      if (v < 0 || v >= universe_size)
        throw std::out_of_range("partition vertex " + std::to_string(v) +
                                " outside universe");
      lab[v] = k;
    }
  return lab;
}

bool Partition::covers(int universe_size) const {
  auto lab = labels(universe_size);
  return std::all_of(lab.begin(), lab.end(), [](int k) { return k >= 0; });
}

Partition Partition::of(std::vector<std::vector<int>> sets,
                        std::string origin) {
  Partition p;
  p.islands = std::move(sets);
  p.origin = std::move(origin);
  p.canonicalize();
  return p;
}

Partition Partition::single(int universe_size, std::string origin) {
  std::vector<int> all(universe_size);
  std::iota(all.begin(), all.end(), 0);
  return of({all}, std::move(origin));
}

Partition Partition::singletons(int universe_size, std::string origin) {
  std::vector<std::vector<int>> sets;
  sets.reserve(universe_size);
  for (int v = 0; v < universe_size; ++v) sets.push_back({v});
  return of(std::move(sets), std::move(origin));
}

Partition meet(const Partition& a, const Partition& b) {
  std::map<std::pair<int, int>, std::vector<int>> cells;
  int universe = 0;
  for (const auto& island : a.islands)
    for (int v : island) universe = std::max(universe, v + 1);
  for (const auto& island : b.islands)
    for (int v : island) universe = std::max(universe, v + 1);
  auto la = a.labels(universe);
  auto lb = b.labels(universe);
  for (int v = 0; v < universe; ++v) {
    if ((la[v] < 0) != (lb[v] < 0))
      throw std::invalid_argument("meet arguments cover different vertex sets");
    if (la[v] < 0) continue;
    cells[{la[v], lb[v]}].push_back(v);
  }
  std::vector<std::vector<int>> sets;
  sets.reserve(cells.size());
  for (auto& [key, cell] : cells) sets.push_back(std::move(cell));
  return Partition::of(std::move(sets),
                       a.origin.empty() ? b.origin : a.origin);
}

std::vector<std::vector<int>> induced_components(
    const std::vector<int>& island, const Eigen::MatrixXd& adjacency) {
  const int k = static_cast<int>(island.size());
  std::vector<int> comp(k, -1);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < k; ++start) {
    if (comp[start] >= 0) continue;
    int id = static_cast<int>(out.size());
    std::vector<int> stack{start};
    comp[start] = id;
    std::vector<int> verts;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      verts.push_back(island[a]);
      for (int b = 0; b < k; ++b)
        if (comp[b] < 0 && adjacency(island[a], island[b]) > 0) {
          comp[b] = id;
          stack.push_back(b);
        }
    }
    std::sort(verts.begin(), verts.end());
    out.push_back(std::move(verts));
  }
  return out;
}

Partition connected_components_refine(const Partition& p,
                                      const Eigen::MatrixXd& adjacency) {
  std::vector<std::vector<int>> sets;
  for (const auto& island : p.islands)
    for (auto& comp : induced_components(island, adjacency))
      sets.push_back(std::move(comp));
  return Partition::of(std::move(sets), p.origin);
}

} // namespace islanding

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "refpat/pattern.hpp"

namespace refpat {

/// Deduplicated store of initialized refinement patterns, indexed by id,
/// name and father element type. Inserting a pattern also registers its
/// induced side patterns and its distinct permuted variants. Built-in
/// uniform patterns for every refinable type are generated at construction.
///
/// Reads are lock-free; inserts require exclusive access (single writer).
class PatternDatabase {
public:
  using Ref = std::shared_ptr<const RefinementPattern>;

  PatternDatabase() { load_builtin_uniform_patterns(); }

  int size() const { return static_cast<int>(by_id_.size()); }

  Ref lookup(int id) const {
    const auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : Ref(it->second);
  }

  Ref lookup(const std::string& name) const {
    const auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : Ref(it->second);
  }

  const std::vector<Ref>& patterns_for_type(ElementType t) const {
    static const std::vector<Ref> empty;
    const auto it = by_type_.find(t);
    return it == by_type_.end() ? empty : it->second;
  }

  Ref uniform_pattern(ElementType t) const { return uniform_[static_cast<std::size_t>(t)]; }

  Ref find_equal(const RefinementPattern& p) const {
    for (const auto& candidate : patterns_for_type(p.father_type()))
      if (pattern_equality(p, *candidate)) return candidate;
    return nullptr;
  }

  /// Full registration: initialize, deduplicate, store, then register side
  /// patterns and permuted variants recursively. Returns the stored
  /// (possibly pre-existing) reference.
  Ref insert(RefinementPattern raw) { return insert_impl(std::move(raw), false); }

private:
  Ref insert_impl(RefinementPattern raw, bool generated) {
    auto p = std::make_shared<RefinementPattern>(std::move(raw));
    if (!p->initialized) {
      p->normalize_to_master();
      p->mesh.build_connectivity();
      p->compute_subside_transforms();
      p->compute_side_partitions();
      p->validate();
      p->initialized = true;
    }
    if (auto existing = find_equal(*p)) return existing;

    if (p->name.empty())
      p->name = std::string("pattern-") + type_name(p->father_type());
    if (by_name_.count(p->name)) {
      if (!generated)
        throw std::runtime_error("pattern name '" + p->name +
                                 "' already used by a different pattern");
      std::string base = p->name;
      int k = 2;
      while (by_name_.count(base + "#" + std::to_string(k))) ++k;
      p->name = base + "#" + std::to_string(k);
    }
    if (p->id == 0 || by_id_.count(p->id)) {
      if (p->id != 0)
        warnings.push_back("pattern '" + p->name + "': id " + std::to_string(p->id) +
                           " already taken, remapped");
      while (by_id_.count(next_id_)) ++next_id_;
      p->id = next_id_++;
    }
    by_id_[p->id] = p;
    by_name_[p->name] = p;
    by_type_[p->father_type()].push_back(p);

    register_side_patterns(*p);
    register_permutations(p);
    return p;
  }

public:
  Ref load_text(const std::string& text) { return insert(parse_pattern(text)); }

  struct LoadResult {
    int inserted = 0;
    std::vector<std::string> errors;
  };

  /// Loads every regular file in the directory (sorted by name for
  /// determinism). Per-file failures are reported, not fatal.
  LoadResult load_directory(const std::string& path) {
    namespace fs = std::filesystem;
    LoadResult result;
    const int before = size();
    if (!fs::is_directory(path))
      throw std::runtime_error("pattern directory '" + path + "' is not readable");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      try {
        load_text(text);
      } catch (const std::exception& e) {
        result.errors.push_back(file.filename().string() + ": " + e.what());
      }
    }
    result.inserted = size() - before;
    return result;
  }

  std::vector<std::string> warnings;

private:
  void register_side_patterns(RefinementPattern& p) {
    const auto& topo = p.father_topology();
    for (int s = topo.node_count(); s < topo.side_count() - 1; ++s) {
      if (!p.side_refined(s)) continue;
      auto ref = insert_impl(induced_side_pattern(p, s), true);
      p.partitions[static_cast<std::size_t>(s)].side_pattern = ref;
    }
  }

  void register_permutations(const std::shared_ptr<RefinementPattern>& p) {
    const auto& perms = p->father_topology().permutations();
    for (std::size_t k = 1; k < perms.size(); ++k) {
      auto ref = insert_impl(permuted_pattern(*p, perms[k], static_cast<int>(k)), true);
      if (ref.get() == p.get()) continue;
      auto& list = p->permutations;
      if (std::find(list.begin(), list.end(), ref) == list.end()) list.push_back(ref);
    }
  }

  void load_builtin_uniform_patterns();

  std::map<int, std::shared_ptr<RefinementPattern>> by_id_;
  std::map<std::string, std::shared_ptr<RefinementPattern>> by_name_;
  std::map<ElementType, std::vector<Ref>> by_type_;
  std::array<Ref, 8> uniform_{};
  int next_id_ = 1;
};

// ---------------------------------------------------------------------------
// built-in uniform patterns

namespace detail {

inline Vec3 midpoint(const Vec3& a, const Vec3& b) {
  return Vec3{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

inline RefinementPattern uniform_pattern_skeleton(ElementType t, const std::string& name) {
  RefinementPattern p;
  p.name = name;
  const auto& topo = Topology::of(t);
  for (int i = 0; i < topo.node_count(); ++i) {
    Vec3 x{};
    for (int k = 0; k < topo.dimension(); ++k)
      x[static_cast<std::size_t>(k)] = topo.corner(i)[static_cast<std::size_t>(k)];
    p.mesh.add_node(x);
  }
  std::vector<int> all;
  for (int i = 0; i < topo.node_count(); ++i) all.push_back(i);
  p.mesh.add_element(t, 1, all);
  return p;
}

/// Adds the midpoint of every edge of the father; returns the node id per
/// edge side index.
inline std::map<int, int> add_edge_midpoints(RefinementPattern& p) {
  const auto& topo = p.father_topology();
  std::map<int, int> mid;
  for (int e : topo.sides_of_dimension(1)) {
    const auto& nodes = topo.side(e).nodes;
    mid[e] = p.mesh.add_node(midpoint(p.mesh.nodes[static_cast<std::size_t>(nodes[0])].x,
                                      p.mesh.nodes[static_cast<std::size_t>(nodes[1])].x));
  }
  return mid;
}

inline RefinementPattern make_uniform_line() {
  auto p = uniform_pattern_skeleton(ElementType::Line, "UnifLine");
  const int m = p.mesh.add_node({0, 0, 0});
  p.mesh.add_element(ElementType::Line, 1, {0, m});
  p.mesh.add_element(ElementType::Line, 1, {m, 1});
  return p;
}

inline RefinementPattern make_uniform_triangle() {
  auto p = uniform_pattern_skeleton(ElementType::Triangle, "UnifTriangle");
  auto mid = add_edge_midpoints(p);  // sides 3:(0,1) 4:(1,2) 5:(2,0)
  const int m01 = mid[3], m12 = mid[4], m20 = mid[5];
  p.mesh.add_element(ElementType::Triangle, 1, {0, m01, m20});
  p.mesh.add_element(ElementType::Triangle, 1, {m01, 1, m12});
  p.mesh.add_element(ElementType::Triangle, 1, {m20, m12, 2});
  p.mesh.add_element(ElementType::Triangle, 1, {m01, m12, m20});
  return p;
}

inline RefinementPattern make_uniform_quadrilateral() {
  auto p = uniform_pattern_skeleton(ElementType::Quadrilateral, "UnifQuadrilateral");
  auto mid = add_edge_midpoints(p);  // 4:(0,1) 5:(1,2) 6:(2,3) 7:(3,0)
  const int c = p.mesh.add_node({0, 0, 0});
  p.mesh.add_element(ElementType::Quadrilateral, 1, {0, mid[4], c, mid[7]});
  p.mesh.add_element(ElementType::Quadrilateral, 1, {mid[4], 1, mid[5], c});
  p.mesh.add_element(ElementType::Quadrilateral, 1, {c, mid[5], 2, mid[6]});
  p.mesh.add_element(ElementType::Quadrilateral, 1, {mid[7], c, mid[6], 3});
  return p;
}

inline RefinementPattern make_uniform_tetrahedron() {
  auto p = uniform_pattern_skeleton(ElementType::Tetrahedron, "UnifTetrahedron");
  auto mid = add_edge_midpoints(p);  // 4:(0,1) 5:(1,2) 6:(2,0) 7:(0,3) 8:(1,3) 9:(2,3)
  const int m01 = mid[4], m12 = mid[5], m02 = mid[6];
  const int m03 = mid[7], m13 = mid[8], m23 = mid[9];
  p.mesh.add_element(ElementType::Tetrahedron, 1, {0, m01, m02, m03});
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m01, 1, m12, m13});
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m02, m12, 2, m23});
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m03, m13, m23, 3});
  // central octahedron, split around the m02-m13 diagonal
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m02, m13, m01, m12});
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m02, m13, m12, m23});
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m02, m13, m23, m03});
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m02, m13, m03, m01});
  return p;
}

inline RefinementPattern make_uniform_pyramid() {
  auto p = uniform_pattern_skeleton(ElementType::Pyramid, "UnifPyramid");
  auto mid = add_edge_midpoints(p);  // base 5:(0,1) 6:(1,2) 7:(2,3) 8:(3,0); up 9..12:(i,4)
  const int c = p.mesh.add_node({0, 0, 0});
  const int m01 = mid[5], m12 = mid[6], m23 = mid[7], m30 = mid[8];
  const int m04 = mid[9], m14 = mid[10], m24 = mid[11], m34 = mid[12];
  p.mesh.add_element(ElementType::Pyramid, 1, {0, m01, c, m30, m04});
  p.mesh.add_element(ElementType::Pyramid, 1, {m01, 1, m12, c, m14});
  p.mesh.add_element(ElementType::Pyramid, 1, {c, m12, 2, m23, m24});
  p.mesh.add_element(ElementType::Pyramid, 1, {m30, c, m23, 3, m34});
  p.mesh.add_element(ElementType::Pyramid, 1, {m04, m14, m24, m34, 4});
  p.mesh.add_element(ElementType::Pyramid, 1, {m14, m04, m34, m24, c});
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m01, m14, m04, c});
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m12, m24, m14, c});
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m23, m34, m24, c});
  p.mesh.add_element(ElementType::Tetrahedron, 1, {m30, m04, m34, c});
  return p;
}

inline RefinementPattern make_uniform_prism() {
  auto p = uniform_pattern_skeleton(ElementType::Prism, "UnifPrism");
  // three triangle layers: bottom (z=-1), middle (z=0), top (z=+1)
  const auto tri_nodes = [&](double z) {
    const std::array<Vec3, 6> layer{Vec3{0, 0, z},   Vec3{1, 0, z},   Vec3{0, 1, z},
                                    Vec3{0.5, 0, z}, Vec3{0.5, 0.5, z}, Vec3{0, 0.5, z}};
    return layer;
  };
  // bottom corners are father nodes 0,1,2; top corners are 3,4,5
  std::array<std::array<int, 6>, 3> layer{};
  for (int l = 0; l < 3; ++l) {
    const double z = -1.0 + l;
    const auto coords = tri_nodes(z);
    for (int i = 0; i < 6; ++i) {
      if (l == 0 && i < 3)
        layer[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] = i;
      else if (l == 2 && i < 3)
        layer[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] = 3 + i;
      else
        layer[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] =
            p.mesh.add_node(coords[static_cast<std::size_t>(i)]);
    }
  }
  // four sub-triangles of the master triangle, stacked twice in z
  const std::array<std::array<int, 3>, 4> tris{
      std::array<int, 3>{0, 3, 5}, {3, 1, 4}, {5, 4, 2}, {3, 4, 5}};
  for (int l = 0; l < 2; ++l)
    for (const auto& tri : tris) {
      std::vector<int> ids;
      for (int i : tri) ids.push_back(layer[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)]);
      for (int i : tri) ids.push_back(layer[static_cast<std::size_t>(l + 1)][static_cast<std::size_t>(i)]);
      p.mesh.add_element(ElementType::Prism, 1, ids);
    }
  return p;
}

inline RefinementPattern make_uniform_hexahedron() {
  auto p = uniform_pattern_skeleton(ElementType::Hexahedron, "UnifHexahedron");
  // full 3x3x3 lattice; reuse the 8 father corners
  std::map<std::array<int, 3>, int> grid;
  const auto key = [](const Vec3& x) {
    return std::array<int, 3>{static_cast<int>(std::lround(x[0])),
                              static_cast<int>(std::lround(x[1])),
                              static_cast<int>(std::lround(x[2]))};
  };
  for (int i = 0; i < 8; ++i) grid[key(p.mesh.nodes[static_cast<std::size_t>(i)].x)] = i;
  for (int k = -1; k <= 1; ++k)
    for (int j = -1; j <= 1; ++j)
      for (int i = -1; i <= 1; ++i) {
        const std::array<int, 3> g{i, j, k};
        if (!grid.count(g))
          grid[g] = p.mesh.add_node({static_cast<double>(i), static_cast<double>(j),
                                     static_cast<double>(k)});
      }
  for (int k = -1; k <= 0; ++k)
    for (int j = -1; j <= 0; ++j)
      for (int i = -1; i <= 0; ++i) {
        p.mesh.add_element(ElementType::Hexahedron, 1,
                           {grid[{i, j, k}], grid[{i + 1, j, k}], grid[{i + 1, j + 1, k}],
                            grid[{i, j + 1, k}], grid[{i, j, k + 1}], grid[{i + 1, j, k + 1}],
                            grid[{i + 1, j + 1, k + 1}], grid[{i, j + 1, k + 1}]});
      }
  return p;
}

}  // namespace detail

inline void PatternDatabase::load_builtin_uniform_patterns() {
  uniform_[static_cast<std::size_t>(ElementType::Line)] = insert(detail::make_uniform_line());
  uniform_[static_cast<std::size_t>(ElementType::Triangle)] =
      insert(detail::make_uniform_triangle());
  uniform_[static_cast<std::size_t>(ElementType::Quadrilateral)] =
      insert(detail::make_uniform_quadrilateral());
  uniform_[static_cast<std::size_t>(ElementType::Tetrahedron)] =
      insert(detail::make_uniform_tetrahedron());
  uniform_[static_cast<std::size_t>(ElementType::Pyramid)] =
      insert(detail::make_uniform_pyramid());
  uniform_[static_cast<std::size_t>(ElementType::Prism)] = insert(detail::make_uniform_prism());
  uniform_[static_cast<std::size_t>(ElementType::Hexahedron)] =
      insert(detail::make_uniform_hexahedron());
}

}  // namespace refpat

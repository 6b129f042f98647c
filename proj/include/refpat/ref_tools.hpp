#pragma once

#include <optional>
#include <set>

#include "refpat/pattern_db.hpp"

namespace refpat {

using PatternRef = PatternDatabase::Ref;

/// Thrown by divide when the requested pattern disagrees with a refined
/// neighbor's side pattern. Carries the compatible alternatives when a
/// database was available.
class IncompatiblePattern : public std::runtime_error {
public:
  IncompatiblePattern(int element, int side, std::vector<PatternRef> compatible)
      : std::runtime_error("pattern is incompatible with the refined neighbor at element " +
                           std::to_string(element) + " side " + std::to_string(side)),
        element(element),
        side(side),
        compatible(std::move(compatible)) {}

  int element;
  int side;
  std::vector<PatternRef> compatible;
};

/// Marked entities of one element, stored as side indices.
struct MarkSet {
  std::set<int> vertices;
  std::set<int> edges;
};

namespace detail {

struct ImposedSidePattern {
  std::shared_ptr<const RefinementPattern> pattern;  // in the neighbor side's space
  AffineTransform to_neighbor;                       // our side space -> neighbor side space
  ElemSide source;
};

/// Scans the neighbor cycle of `es` for a refined neighbor whose matching
/// side is subdivided. With `check_conflicts`, all such neighbors must
/// impose the same refinement, otherwise the mesh is already non-conforming.
inline std::optional<ImposedSidePattern> imposed_side_pattern(const GeoMesh& mesh, ElemSide es,
                                                              bool check_conflicts) {
  std::optional<ImposedSidePattern> found;
  const int dim = Topology::of(mesh.element(es.element).type).side(es.side).dimension;
  for (const auto& n : mesh.neighbor_cycle(es)) {
    if (n.element == es.element) continue;
    const auto& ne = mesh.element(n.element);
    if (!ne.has_sons() || !ne.pattern) continue;
    if (Topology::of(ne.type).side(n.side).dimension != dim) continue;
    auto sp = ne.pattern->side_pattern_ref(n.side);
    if (!sp) continue;
    auto t = mesh.neighbor_transform(es, n);
    if (!found) {
      found = ImposedSidePattern{sp, t, n};
      if (!check_conflicts) return found;
      continue;
    }
    // both neighbors must refine the shared side identically
    const auto first_to_this = compose(t, least_squares_inverse(found->to_neighbor));
    if (!pattern_equality_mapped(*found->pattern, *sp, &first_to_this))
      throw std::runtime_error("conflicting side refinements at element " +
                               std::to_string(es.element) + " side " +
                               std::to_string(es.side) + ": mesh is non-conforming");
  }
  return found;
}

inline bool matches_imposed(const RefinementPattern& candidate, int side,
                            const ImposedSidePattern& imposed) {
  // on the element side the imposed refinement must equal the pattern itself
  const auto* own = side == Topology::of(candidate.father_type()).side_count() - 1
                        ? &candidate
                        : candidate.side_pattern(side);
  if (!own) return false;
  return pattern_equality_mapped(*own, *imposed.pattern, &imposed.to_neighbor);
}

}  // namespace detail

/// All database patterns of the element's type whose side patterns agree
/// with every refinement already imposed by refined neighbors. With no
/// refined neighbors this is the whole per-type list.
inline std::vector<PatternRef> get_compatible_ref_patterns(const GeoMesh& mesh, int el,
                                                           const PatternDatabase& db) {
  const auto& e = mesh.element(el);
  const auto& topo = Topology::of(e.type);
  std::vector<std::pair<int, detail::ImposedSidePattern>> imposed;
  for (int s = topo.node_count(); s < topo.side_count(); ++s)
    if (auto imp = detail::imposed_side_pattern(mesh, ElemSide{el, s}, true))
      imposed.emplace_back(s, *imp);
  std::vector<PatternRef> out;
  for (const auto& candidate : db.patterns_for_type(e.type)) {
    bool ok = true;
    for (const auto& [s, imp] : imposed)
      if (!detail::matches_imposed(*candidate, s, imp)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(candidate);
  }
  return out;
}

/// Divides an element by an initialized pattern. New nodes on shared sides
/// are recovered from already-refined neighbors through the side
/// partitions; the mesh stays untouched when the pattern is incompatible.
inline std::vector<int> divide(GeoMesh& mesh, int el, const PatternRef& pattern,
                               const PatternDatabase* db = nullptr) {
  if (!pattern || !pattern->initialized)
    throw std::invalid_argument("divide: pattern is not initialized");
  if (mesh.element(el).has_sons())
    throw std::invalid_argument("divide: element " + std::to_string(el) + " already divided");
  if (pattern->father_type() != mesh.element(el).type)
    throw std::invalid_argument("divide: pattern father type does not match the element");

  const auto& topo = Topology::of(mesh.element(el).type);

  // compatibility against refined neighbors, before any mutation
  for (int s = topo.node_count(); s < topo.side_count(); ++s) {
    const auto imp = detail::imposed_side_pattern(mesh, ElemSide{el, s}, true);
    if (!imp) continue;
    const bool ok = detail::matches_imposed(*pattern, s, *imp);
    if (!ok)
      throw IncompatiblePattern(el, s,
                                db ? get_compatible_ref_patterns(mesh, el, *db)
                                   : std::vector<PatternRef>{});
  }

  // pattern node -> global node
  std::vector<int> global(static_cast<std::size_t>(pattern->node_count()), -1);
  const auto& pat_father = pattern->mesh.elements.front();
  for (int j = 0; j < topo.node_count(); ++j)
    global[static_cast<std::size_t>(pat_father.nodes[static_cast<std::size_t>(j)])] =
        mesh.element(el).nodes[static_cast<std::size_t>(j)];

  for (int s = topo.node_count(); s < topo.side_count(); ++s) {
    const auto& part = pattern->partitions[static_cast<std::size_t>(s)];
    for (int pn : part.internal_nodes) {
      int found = -1;
      {
        const auto u = topo.element_to_side(s).apply(pattern->node_param(pn));
        for (const auto& n : mesh.neighbor_cycle(ElemSide{el, s})) {
          if (n.element == el) continue;
          const auto& ne = mesh.element(n.element);
          if (!ne.has_sons() || !ne.pattern) continue;
          if (Topology::of(ne.type).side(n.side).dimension !=
              topo.side(s).dimension)
            continue;
          const auto& npart = ne.pattern->partitions[static_cast<std::size_t>(n.side)];
          if (npart.internal_nodes.empty()) continue;
          const auto v = mesh.neighbor_transform(ElemSide{el, s}, n).apply(u);
          const auto& ntopo = Topology::of(ne.type);
          for (int qn : npart.internal_nodes) {
            const auto w = ntopo.element_to_side(n.side).apply(ne.pattern->node_param(qn));
            double d = 0;
            for (std::size_t k = 0; k < w.size(); ++k) d = std::max(d, std::abs(v[k] - w[k]));
            if (d <= 1e-8) {
              found = ne.pattern_nodes[static_cast<std::size_t>(qn)];
              break;
            }
          }
          if (found >= 0) break;
        }
      }
      if (found < 0)
        found = mesh.add_node(mesh.element_map(el, pattern->node_param(pn)));
      global[static_cast<std::size_t>(pn)] = found;
    }
  }

  std::vector<int> sons;
  for (int i = 1; i <= pattern->son_count(); ++i) {
    const auto& son = pattern->mesh.elements[static_cast<std::size_t>(i)];
    std::vector<int> ids;
    for (int n : son.nodes) ids.push_back(global[static_cast<std::size_t>(n)]);
    const int idx = mesh.add_element(son.type, mesh.element(el).material, std::move(ids));
    mesh.element(idx).father = el;
    mesh.element(idx).child_ordinal = i - 1;
    sons.push_back(idx);
  }
  mesh.element(el).sons = sons;
  mesh.element(el).pattern = pattern;
  mesh.element(el).pattern_nodes = std::move(global);
  mesh.link_elements(sons);
  return sons;
}

/// Among the compatible patterns, those splitting exactly the marked edges;
/// of these the one with the fewest sub-elements, ties broken by the
/// smallest database id. Absence is a normal outcome.
inline PatternRef perfect_match_ref_pattern(const GeoMesh& mesh, int el,
                                            const MarkSet& marks, const PatternDatabase& db) {
  PatternRef best;
  for (const auto& candidate : get_compatible_ref_patterns(mesh, el, db)) {
    const auto split = candidate->refined_edges();
    if (std::set<int>(split.begin(), split.end()) != marks.edges) continue;
    if (!best || candidate->son_count() < best->son_count() ||
        (candidate->son_count() == best->son_count() && candidate->id < best->id))
      best = candidate;
  }
  return best;
}

/// Marks of one element relative to a target entity material: vertices
/// touching the entity; edges touching it at exactly one vertex while not
/// lying in it.
inline MarkSet directional_marks(const GeoMesh& mesh, int el, int target_material) {
  MarkSet marks;
  const auto& topo = Topology::of(mesh.element(el).type);
  const auto touches_target = [&](int side) {
    for (const auto& n : mesh.neighbor_cycle(ElemSide{el, side}))
      if (mesh.element(n.element).material == target_material) return true;
    return false;
  };
  for (int v = 0; v < topo.node_count(); ++v)
    if (touches_target(v)) marks.vertices.insert(v);
  if (marks.vertices.empty()) return marks;
  for (int e : topo.sides_of_dimension(1)) {
    if (touches_target(e)) continue;  // the entity itself is never divided
    const auto& en = topo.side(e).nodes;
    const int marked = static_cast<int>(marks.vertices.count(en[0])) +
                       static_cast<int>(marks.vertices.count(en[1]));
    if (marked == 1) marks.edges.insert(e);
  }
  return marks;
}

struct DirectionalResult {
  int refined = 0;
  std::vector<int> skipped;  // elements with marks but no matching pattern
};

/// Directional refinement toward the elements carrying `target_material`.
/// Candidates are processed in ascending index against the partially
/// refined mesh; entity elements are never divided.
inline DirectionalResult refine_directional(GeoMesh& mesh, std::vector<int> candidates,
                                            int target_material, const PatternDatabase& db) {
  DirectionalResult result;
  std::sort(candidates.begin(), candidates.end());
  for (int el : candidates) {
    if (!mesh.is_leaf(el)) continue;
    if (mesh.element(el).material == target_material) continue;
    if (mesh.element_dimension(el) < 1) continue;
    const auto marks = directional_marks(mesh, el, target_material);
    if (marks.vertices.empty()) continue;
    const auto pattern = perfect_match_ref_pattern(mesh, el, marks, db);
    if (!pattern) {
      if (!marks.edges.empty()) result.skipped.push_back(el);
      continue;
    }
    divide(mesh, el, pattern, &db);
    ++result.refined;
  }
  return result;
}

/// Divides every listed leaf element with its type's uniform pattern.
inline int refine_uniform(GeoMesh& mesh, const std::vector<int>& els, const PatternDatabase& db) {
  int count = 0;
  for (int el : els) {
    if (!mesh.is_leaf(el)) continue;
    const auto up = db.uniform_pattern(mesh.element(el).type);
    if (!up) continue;  // points are not refinable
    divide(mesh, el, up, &db);
    ++count;
  }
  return count;
}

/// Leaf elements of at least the given dimension, ascending.
inline std::vector<int> leaf_elements(const GeoMesh& mesh, int min_dimension = 1) {
  std::vector<int> out;
  for (int el = 0; el < static_cast<int>(mesh.elements.size()); ++el)
    if (mesh.is_leaf(el) && mesh.element_dimension(el) >= min_dimension) out.push_back(el);
  return out;
}

/// True when no leaf element faces a neighbor whose matching side is
/// refined more finely, i.e. the leaf mesh has no hanging nodes.
inline bool is_conforming(const GeoMesh& mesh) {
  for (int el = 0; el < static_cast<int>(mesh.elements.size()); ++el) {
    if (!mesh.is_leaf(el)) continue;
    const auto& topo = Topology::of(mesh.element(el).type);
    for (int s = topo.node_count(); s < topo.side_count(); ++s)
      if (detail::imposed_side_pattern(mesh, ElemSide{el, s}, false)) return false;
  }
  return true;
}

/// Conforming closure: repeatedly gives every hanging leaf the perfect
/// match for the edge splits its neighbors impose. Returns the number of
/// elements divided; stops when no further progress is possible.
inline int close_hanging_sides(GeoMesh& mesh, const PatternDatabase& db,
                               std::vector<int>* unresolved = nullptr) {
  int total = 0;
  for (bool progress = true; progress;) {
    progress = false;
    const int count = static_cast<int>(mesh.elements.size());
    for (int el = 0; el < count; ++el) {
      if (!mesh.is_leaf(el) || mesh.element_dimension(el) < 1) continue;
      const auto& topo = Topology::of(mesh.element(el).type);
      MarkSet marks;
      bool any = false;
      for (int s = topo.node_count(); s < topo.side_count(); ++s) {
        const auto imp = detail::imposed_side_pattern(mesh, ElemSide{el, s}, true);
        if (!imp) continue;
        any = true;
        if (topo.side(s).dimension == 1) {
          marks.edges.insert(s);
          continue;
        }
        // split edges of an imposed face pattern map back to our edges
        const auto& ne = mesh.element(imp->source.element);
        const auto nglobals = mesh.side_nodes(imp->source);
        const auto& nstopo = Topology::of(Topology::of(ne.type).side(imp->source.side).type);
        for (int k : nstopo.sides_of_dimension(1)) {
          if (!imp->pattern->side_refined(k)) continue;
          std::vector<int> edge_globals;
          for (int local : nstopo.side(k).nodes)
            edge_globals.push_back(nglobals[static_cast<std::size_t>(local)]);
          std::sort(edge_globals.begin(), edge_globals.end());
          for (int e : topo.sides_of_dimension(1)) {
            auto own = mesh.side_nodes(ElemSide{el, e});
            std::sort(own.begin(), own.end());
            if (own == edge_globals) {
              marks.edges.insert(e);
              break;
            }
          }
        }
      }
      if (!any || marks.edges.empty()) continue;
      const auto pattern = perfect_match_ref_pattern(mesh, el, marks, db);
      if (!pattern) {
        if (unresolved) unresolved->push_back(el);
        continue;
      }
      divide(mesh, el, pattern, &db);
      ++total;
      progress = true;
    }
  }
  return total;
}

}  // namespace refpat

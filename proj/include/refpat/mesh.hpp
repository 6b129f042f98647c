#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "refpat/topology.hpp"

namespace refpat {

class RefinementPattern;

using Vec3 = std::array<double, 3>;

struct GeoNode {
  Vec3 x{};
};

/// Reference to one side of one element; the unit the circular neighbor
/// structure links together.
struct ElemSide {
  int element = -1;
  int side = -1;
  bool operator==(const ElemSide&) const = default;
  bool operator<(const ElemSide& o) const {
    return element != o.element ? element < o.element : side < o.side;
  }
};

struct GeoElement {
  ElementType type = ElementType::Point;
  int material = 1;
  std::vector<int> nodes;          // global node indices, one per corner
  std::vector<ElemSide> neighbors; // next cycle entry per side; self when alone
  int father = -1;
  int child_ordinal = -1;
  std::vector<int> sons;
  std::shared_ptr<const RefinementPattern> pattern;  // pattern this element was divided by
  std::vector<int> pattern_nodes;  // pattern node index -> global node index

  bool has_sons() const { return !sons.empty(); }
};

/// Geometric mesh: nodes, elements, circular neighbor links and
/// father/son refinement links. Also serves as the internal mesh of a
/// refinement pattern.
class GeoMesh {
public:
  std::vector<GeoNode> nodes;
  std::vector<GeoElement> elements;

  int add_node(const Vec3& x) {
    nodes.push_back(GeoNode{x});
    return static_cast<int>(nodes.size()) - 1;
  }

  int add_element(ElementType type, int material, std::vector<int> node_ids) {
    if (static_cast<int>(node_ids.size()) != node_count_of(type))
      throw std::invalid_argument("add_element: wrong node count for " +
                                  std::string(type_name(type)));
    for (int n : node_ids)
      if (n < 0 || n >= static_cast<int>(nodes.size()))
        throw std::out_of_range("add_element: node index out of range");
    if (std::set<int>(node_ids.begin(), node_ids.end()).size() != node_ids.size())
      throw std::invalid_argument("add_element: repeated node index (collapsed element)");
    GeoElement e;
    e.type = type;
    e.material = material;
    e.nodes = std::move(node_ids);
    const int index = static_cast<int>(elements.size());
    e.neighbors.assign(static_cast<std::size_t>(side_count(type)), ElemSide{});
    for (int s = 0; s < side_count(type); ++s)
      e.neighbors[static_cast<std::size_t>(s)] = ElemSide{index, s};
    elements.push_back(std::move(e));
    return index;
  }

  int element_dimension(int el) const { return dimension_of(element(el).type); }

  bool is_leaf(int el) const { return !element(el).has_sons(); }

  int refinement_level(int el) const {
    int level = 0;
    for (int f = element(el).father; f >= 0; f = element(f).father) ++level;
    return level;
  }

  int max_element_dimension() const {
    int d = 0;
    for (const auto& e : elements) d = std::max(d, dimension_of(e.type));
    return d;
  }

  const GeoElement& element(int el) const {
    if (el < 0 || el >= static_cast<int>(elements.size()))
      throw std::out_of_range("element index out of range");
    return elements[static_cast<std::size_t>(el)];
  }
  GeoElement& element(int el) {
    if (el < 0 || el >= static_cast<int>(elements.size()))
      throw std::out_of_range("element index out of range");
    return elements[static_cast<std::size_t>(el)];
  }

  ElemSide next_neighbor(ElemSide es) const {
    return element(es.element).neighbors[static_cast<std::size_t>(es.side)];
  }

  /// The full cycle through es, starting at es itself.
  std::vector<ElemSide> neighbor_cycle(ElemSide es) const {
    std::vector<ElemSide> cycle{es};
    const std::size_t bound = 8 * elements.size() + 8;
    for (ElemSide cur = next_neighbor(es); !(cur == es); cur = next_neighbor(cur)) {
      cycle.push_back(cur);
      if (cycle.size() > bound)
        throw std::runtime_error("neighbor cycle does not close");
    }
    return cycle;
  }

  bool same_cycle(ElemSide a, ElemSide b) const {
    const std::size_t bound = 8 * elements.size() + 8;
    std::size_t steps = 0;
    for (ElemSide cur = a;; cur = next_neighbor(cur)) {
      if (cur == b) return true;
      if (++steps > bound) throw std::runtime_error("neighbor cycle does not close");
      if (next_neighbor(cur) == a) return false;
    }
  }

  /// Global node indices of a side's corners, in the side's canonical order.
  std::vector<int> side_nodes(ElemSide es) const {
    const auto& e = element(es.element);
    const auto& sd = Topology::of(e.type).side(es.side);
    std::vector<int> out;
    out.reserve(sd.nodes.size());
    for (int local : sd.nodes) out.push_back(e.nodes[static_cast<std::size_t>(local)]);
    return out;
  }

  /// Parametric transform from side a's space to side b's space such that
  /// both parametrizations agree in cartesian coordinates.
  AffineTransform neighbor_transform(ElemSide a, ElemSide b) const {
    const auto& sa = Topology::of(element(a.element).type).side(a.side);
    const auto& sb = Topology::of(element(b.element).type).side(b.side);
    if (sa.dimension != sb.dimension || sa.dimension < 1)
      throw std::invalid_argument("neighbor_transform: sides must have equal dimension >= 1");
    if (!same_cycle(a, b))
      throw std::invalid_argument("neighbor_transform: sides are not neighbors");
    const auto ga = side_nodes(a);
    const auto gb = side_nodes(b);
    const auto& topo_a = Topology::of(sa.type);
    const auto& topo_b = Topology::of(sb.type);
    std::vector<AffineSample> samples;
    for (std::size_t j = 0; j < ga.size(); ++j) {
      const auto it = std::find(gb.begin(), gb.end(), ga[j]);
      if (it == gb.end())
        throw std::invalid_argument("neighbor_transform: side node sets differ");
      const int p = static_cast<int>(it - gb.begin());
      samples.emplace_back(topo_a.corner(static_cast<int>(j)), topo_b.corner(p));
    }
    return fit_l2(samples);
  }

  /// Cartesian coordinates of master point xi via the corner-interpolating map.
  Vec3 element_map(int el, const std::vector<double>& xi) const {
    const auto& e = element(el);
    if (!Topology::of(e.type).is_in_master(xi, 1e-8))
      throw std::invalid_argument("element_map: point outside the master domain");
    const auto n = shape_values(e.type, xi);
    Vec3 out{};
    for (std::size_t i = 0; i < n.size(); ++i)
      for (int k = 0; k < 3; ++k)
        out[static_cast<std::size_t>(k)] += n[i] * nodes[static_cast<std::size_t>(e.nodes[i])].x[static_cast<std::size_t>(k)];
    return out;
  }

  /// Cartesian measure via decomposition into simplices. Exact for straight
  /// simplicial shapes and parallelepipeds, the cases the tests rely on.
  double element_measure(int el) const {
    const auto& e = element(el);
    auto p = [&](int i) { return nodes[static_cast<std::size_t>(e.nodes[static_cast<std::size_t>(i)])].x; };
    switch (e.type) {
      case ElementType::Point:
        return 0.0;
      case ElementType::Line: {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += (p(1)[static_cast<std::size_t>(k)] - p(0)[static_cast<std::size_t>(k)]) * (p(1)[static_cast<std::size_t>(k)] - p(0)[static_cast<std::size_t>(k)]);
        return std::sqrt(s);
      }
      case ElementType::Triangle:
        return tri_area(p(0), p(1), p(2));
      case ElementType::Quadrilateral:
        return tri_area(p(0), p(1), p(2)) + tri_area(p(0), p(2), p(3));
      case ElementType::Tetrahedron:
        return tet_volume(p(0), p(1), p(2), p(3));
      case ElementType::Pyramid:
        return tet_volume(p(0), p(1), p(2), p(4)) + tet_volume(p(0), p(2), p(3), p(4));
      case ElementType::Prism:
        return tet_volume(p(0), p(1), p(2), p(3)) + tet_volume(p(1), p(2), p(3), p(4)) +
               tet_volume(p(2), p(3), p(4), p(5));
      case ElementType::Hexahedron:
        return tet_volume(p(0), p(1), p(2), p(6)) + tet_volume(p(0), p(2), p(3), p(6)) +
               tet_volume(p(0), p(1), p(5), p(6)) + tet_volume(p(0), p(3), p(7), p(6)) +
               tet_volume(p(0), p(4), p(5), p(6)) + tet_volume(p(0), p(4), p(7), p(6));
    }
    return 0.0;
  }

  void build_node_neighbors() {
    node_anchor_.assign(nodes.size(), ElemSide{});
    for (int el = 0; el < static_cast<int>(elements.size()); ++el) {
      auto& e = elements[static_cast<std::size_t>(el)];
      for (int s = 0; s < static_cast<int>(e.neighbors.size()); ++s)
        e.neighbors[static_cast<std::size_t>(s)] = ElemSide{el, s};
    }
    for (int el = 0; el < static_cast<int>(elements.size()); ++el)
      for (int j = 0; j < node_count_of(elements[static_cast<std::size_t>(el)].type); ++j)
        insert_corner(el, j);
  }

  void build_side_neighbors() {
    for (int el = 0; el < static_cast<int>(elements.size()); ++el) {
      const auto& topo = Topology::of(elements[static_cast<std::size_t>(el)].type);
      for (int s = topo.node_count(); s < topo.side_count(); ++s)
        link_side(ElemSide{el, s});
    }
  }

  void build_connectivity() {
    build_node_neighbors();
    build_side_neighbors();
  }

  /// Wires freshly added elements (and their possibly fresh nodes) into the
  /// existing neighbor cycles without touching unrelated links.
  void link_elements(const std::vector<int>& new_elements) {
    node_anchor_.resize(nodes.size(), ElemSide{});
    for (int el : new_elements)
      for (int j = 0; j < node_count_of(element(el).type); ++j) insert_corner(el, j);
    for (int el : new_elements) {
      const auto& topo = Topology::of(element(el).type);
      for (int s = topo.node_count(); s < topo.side_count(); ++s)
        link_side(ElemSide{el, s});
    }
  }

  /// Diagnostic: every cycle closes and contains its starting side once.
  void check_cycles() const {
    for (int el = 0; el < static_cast<int>(elements.size()); ++el) {
      const auto& e = elements[static_cast<std::size_t>(el)];
      for (int s = 0; s < static_cast<int>(e.neighbors.size()); ++s) {
        auto cycle = neighbor_cycle(ElemSide{el, s});
        std::set<ElemSide> seen(cycle.begin(), cycle.end());
        if (seen.size() != cycle.size())
          throw std::runtime_error("neighbor cycle revisits a side");
      }
    }
  }

private:
  static Vec3 diff(const Vec3& a, const Vec3& b) {
    return Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
  }

  static double tri_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 u = diff(b, a), v = diff(c, a);
    const double cx = u[1] * v[2] - u[2] * v[1];
    const double cy = u[2] * v[0] - u[0] * v[2];
    const double cz = u[0] * v[1] - u[1] * v[0];
    return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
  }

  static double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const Vec3 u = diff(b, a), v = diff(c, a), w = diff(d, a);
    const double det = u[0] * (v[1] * w[2] - v[2] * w[1]) -
                       u[1] * (v[0] * w[2] - v[2] * w[0]) +
                       u[2] * (v[0] * w[1] - v[1] * w[0]);
    return std::abs(det) / 6.0;
  }

  void insert_corner(int el, int corner) {
    const int g = element(el).nodes[static_cast<std::size_t>(corner)];
    if (g < 0 || g >= static_cast<int>(nodes.size()))
      throw std::runtime_error("connectivity: node index out of range");
    auto& anchor = node_anchor_[static_cast<std::size_t>(g)];
    if (anchor.element < 0) {
      anchor = ElemSide{el, corner};
      return;
    }
    auto& a = element(anchor.element).neighbors[static_cast<std::size_t>(anchor.side)];
    element(el).neighbors[static_cast<std::size_t>(corner)] = a;
    a = ElemSide{el, corner};
  }

  /// Links es with every element/side sharing its full node set (Algorithm 2:
  /// intersect per-node incidence gathered from the corner cycles).
  void link_side(ElemSide es) {
    const auto& e = element(es.element);
    const auto& sd = Topology::of(e.type).side(es.side);
    std::set<int> candidates;
    for (std::size_t k = 0; k < sd.nodes.size(); ++k) {
      std::set<int> incident;
      for (const auto& c : neighbor_cycle(ElemSide{es.element, sd.nodes[k]}))
        if (c.element != es.element) incident.insert(c.element);
      if (k == 0) {
        candidates = std::move(incident);
      } else {
        std::set<int> kept;
        for (int c : candidates)
          if (incident.count(c)) kept.insert(c);
        candidates = std::move(kept);
      }
      if (candidates.empty()) return;
    }
    const auto globals = side_nodes(es);
    for (int c : candidates) {
      const auto& ce = element(c);
      std::vector<int> locals;
      locals.reserve(globals.size());
      for (int g : globals) {
        const auto it = std::find(ce.nodes.begin(), ce.nodes.end(), g);
        if (it == ce.nodes.end())
          throw std::runtime_error("connectivity: incidence intersection is inconsistent");
        locals.push_back(static_cast<int>(it - ce.nodes.begin()));
      }
      const int sc = Topology::of(ce.type).side_with_nodes(locals);
      if (sc < 0 || Topology::of(ce.type).side(sc).dimension != sd.dimension)
        throw std::runtime_error(
            "connectivity: element " + std::to_string(c) +
            " shares the node set of a side but has no matching side");
      const ElemSide other{c, sc};
      if (same_cycle(es, other)) continue;
      auto& na = element(es.element).neighbors[static_cast<std::size_t>(es.side)];
      auto& nb = element(other.element).neighbors[static_cast<std::size_t>(other.side)];
      std::swap(na, nb);
    }
  }

  std::vector<ElemSide> node_anchor_;
};

}  // namespace refpat

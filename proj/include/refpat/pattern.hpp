#pragma once

#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "refpat/mesh.hpp"

namespace refpat {

class ParseError : public std::runtime_error {
public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// Which father side contains a sub-element side, and the affine map
/// between their parametric spaces.
struct SubSideTransform {
  int father_side = -1;
  AffineTransform to_father;
};

/// Partition data of one father side: the internal nodes it owns and the
/// sub-element sides tiling it. Used as the fast compatibility pre-filter.
struct SidePartition {
  std::vector<int> internal_nodes;  // pattern node ids interior to this side
  std::vector<ElemSide> son_sides;  // contained (son element, side) pairs, dim >= 1
  int same_dim_pieces = 0;          // contained pieces of the side's own dimension
  std::shared_ptr<const class RefinementPattern> side_pattern;  // null when unrefined
};

/// A refinement pattern: a secondary mesh partitioning a master element.
/// Element 0 of the internal mesh is the father, elements 1..N the sons;
/// node coordinates live in the father's master space, padded to 3.
class RefinementPattern {
public:
  int id = 0;
  std::string name;
  GeoMesh mesh;

  std::vector<std::vector<SubSideTransform>> subsides;  // [son-1][son side]
  std::vector<SidePartition> partitions;                // [father side]
  std::vector<std::shared_ptr<const RefinementPattern>> permutations;  // distinct variants
  bool initialized = false;

  ElementType father_type() const { return mesh.elements.front().type; }
  int father_dimension() const { return dimension_of(father_type()); }
  const Topology& father_topology() const { return Topology::of(father_type()); }
  int son_count() const { return static_cast<int>(mesh.elements.size()) - 1; }
  int node_count() const { return static_cast<int>(mesh.nodes.size()); }

  /// Master coordinates of a pattern node, sliced to the father dimension.
  std::vector<double> node_param(int node) const {
    const auto& x = mesh.nodes[static_cast<std::size_t>(node)].x;
    return std::vector<double>(x.begin(), x.begin() + father_dimension());
  }

  const SubSideTransform& subside(int son, int side) const {
    return subsides[static_cast<std::size_t>(son - 1)][static_cast<std::size_t>(side)];
  }

  const RefinementPattern* side_pattern(int father_side) const {
    return partitions[static_cast<std::size_t>(father_side)].side_pattern.get();
  }

  std::shared_ptr<const RefinementPattern> side_pattern_ref(int father_side) const {
    return partitions[static_cast<std::size_t>(father_side)].side_pattern;
  }

  /// A proper side is refined when more than one same-dimension piece tiles
  /// it; the element side counts as refined whenever there are sons.
  bool side_refined(int father_side) const {
    const auto& topo = father_topology();
    if (father_side == topo.side_count() - 1) return son_count() > 1;
    return partitions[static_cast<std::size_t>(father_side)].same_dim_pieces >= 2;
  }

  std::vector<int> refined_edges() const {
    std::vector<int> out;
    for (int e : father_topology().sides_of_dimension(1))
      if (side_refined(e)) out.push_back(e);
    return out;
  }

  /// Smallest-dimension father side whose closure contains xi (father
  /// master coordinates). Sides enumerate by increasing dimension, so the
  /// first geometric hit is the wanted one.
  int containing_father_side(const std::vector<double>& xi, double tol = 1e-8) const {
    const auto& topo = father_topology();
    for (const auto& sd : topo.sides()) {
      if (sd.dimension == topo.dimension()) return sd.index;  // element side always matches
      auto p = topo.projection_to_side(sd.index).apply(xi);
      double d = 0;
      for (std::size_t k = 0; k < p.size(); ++k) d = std::max(d, std::abs(p[k] - xi[k]));
      if (d > tol) continue;
      auto local = topo.element_to_side(sd.index).apply(xi);
      if (Topology::of(sd.type).is_in_master(local, tol)) return sd.index;
    }
    throw std::runtime_error("point is outside the father master element");
  }

  /// Interpolates a point given in son-local master coordinates into the
  /// father's master space.
  std::vector<double> map_to_father(int element, const std::vector<double>& xi) const {
    const auto& e = mesh.elements[static_cast<std::size_t>(element)];
    const auto n = shape_values(e.type, xi);
    std::vector<double> out(static_cast<std::size_t>(father_dimension()), 0.0);
    for (std::size_t i = 0; i < n.size(); ++i) {
      const auto xn = node_param(e.nodes[i]);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += n[i] * xn[k];
    }
    return out;
  }

  /// Re-expresses all nodes so the father occupies its master element.
  /// Affine placements (the invariance the format relies on) normalize
  /// exactly; anything else is rejected. Idempotent. Also flips son node
  /// orderings whose jacobian came out negative.
  void normalize_to_master() {
    const auto& father = mesh.elements.front();
    const auto& topo = father_topology();
    std::vector<AffineSample> samples;
    for (int j = 0; j < topo.node_count(); ++j) {
      const auto& x = mesh.nodes[static_cast<std::size_t>(father.nodes[static_cast<std::size_t>(j)])].x;
      samples.emplace_back(std::vector<double>(x.begin(), x.end()), topo.corner(j));
    }
    const auto to_master = fit_l2(samples);
    for (auto& node : mesh.nodes) {
      const auto mapped = to_master.apply({node.x[0], node.x[1], node.x[2]});
      node.x = Vec3{};
      for (std::size_t k = 0; k < mapped.size(); ++k) node.x[k] = mapped[k];
    }
    for (int j = 0; j < topo.node_count(); ++j) {
      const auto got = node_param(father.nodes[static_cast<std::size_t>(j)]);
      const auto& want = topo.corner(j);
      for (std::size_t k = 0; k < got.size(); ++k)
        if (std::abs(got[k] - want[k]) > 1e-8)
          throw std::runtime_error("pattern '" + name +
                                   "': father element is degenerate or not affinely placed");
    }
    fix_son_orientations();
  }

  void compute_subside_transforms() {
    subsides.assign(static_cast<std::size_t>(son_count()), {});
    const auto& ftopo = father_topology();
    for (int son = 1; son <= son_count(); ++son) {
      const auto& stopo = Topology::of(mesh.elements[static_cast<std::size_t>(son)].type);
      auto& per_side = subsides[static_cast<std::size_t>(son - 1)];
      per_side.resize(static_cast<std::size_t>(stopo.side_count()));
      for (int s = 0; s < stopo.side_count(); ++s) {
        const auto& side_topo = Topology::of(stopo.side(s).type);
        const auto center = map_to_father(
            son, stopo.side_to_element(s).apply(side_topo.center()));
        const int father_side = containing_father_side(center);
        std::vector<AffineSample> samples;
        for (int j = 0; j < side_topo.node_count(); ++j) {
          const auto xf = map_to_father(son, stopo.side_to_element(s).apply(side_topo.corner(j)));
          samples.emplace_back(side_topo.corner(j),
                               ftopo.element_to_side(father_side).apply(xf));
        }
        per_side[static_cast<std::size_t>(s)] = {father_side, fit_l2(samples)};
      }
    }
  }

  void compute_side_partitions() {
    const auto& ftopo = father_topology();
    partitions.assign(static_cast<std::size_t>(ftopo.side_count()), {});
    std::set<int> father_corners(mesh.elements.front().nodes.begin(),
                                 mesh.elements.front().nodes.end());
    for (int n = 0; n < node_count(); ++n) {
      if (father_corners.count(n)) continue;
      const int s = containing_father_side(node_param(n));
      partitions[static_cast<std::size_t>(s)].internal_nodes.push_back(n);
    }
    for (int son = 1; son <= son_count(); ++son) {
      const auto& stopo = Topology::of(mesh.elements[static_cast<std::size_t>(son)].type);
      for (int s = 0; s < stopo.side_count(); ++s) {
        if (stopo.side(s).dimension < 1) continue;
        const auto& sub = subside(son, s);
        auto& part = partitions[static_cast<std::size_t>(sub.father_side)];
        part.son_sides.push_back(ElemSide{son, s});
        if (stopo.side(s).dimension == ftopo.side(sub.father_side).dimension)
          ++part.same_dim_pieces;
      }
    }
  }

  /// Structural checks on an initialized pattern.
  void validate() const {
    if (son_count() < 2)
      throw std::runtime_error("pattern '" + name + "': needs at least two sons");
    const auto& ftopo = father_topology();
    for (int son = 1; son <= son_count(); ++son)
      if (dimension_of(mesh.elements[static_cast<std::size_t>(son)].type) != ftopo.dimension())
        throw std::runtime_error("pattern '" + name +
                                 "': sons must have the father's dimension");
    for (int n = 0; n < node_count(); ++n)
      if (!ftopo.is_in_master(node_param(n), 1e-8))
        throw std::runtime_error("pattern '" + name +
                                 "': node lies outside the father master element");
    double sons_measure = 0.0;
    for (int son = 1; son <= son_count(); ++son)
      sons_measure += mesh.element_measure(son);
    const double father_measure = mesh.element_measure(0);
    if (std::abs(sons_measure - father_measure) > 1e-10 * father_measure)
      throw std::runtime_error("pattern '" + name +
                               "': sons do not partition the father (measure mismatch)");
    for (int s : ftopo.sides_of_dimension(1))
      if (partitions[static_cast<std::size_t>(s)].same_dim_pieces < 1)
        throw std::runtime_error("pattern '" + name + "': father edge not covered");
    for (int s : ftopo.sides_of_dimension(2))
      if (ftopo.dimension() == 3 && partitions[static_cast<std::size_t>(s)].same_dim_pieces < 1)
        throw std::runtime_error("pattern '" + name + "': father face not covered");
    // every son side must stay inside its assigned father side
    for (int son = 1; son <= son_count(); ++son) {
      const auto& stopo = Topology::of(mesh.elements[static_cast<std::size_t>(son)].type);
      for (int s = 0; s < stopo.side_count(); ++s) {
        const auto& sub = subside(son, s);
        const auto proj = ftopo.projection_to_side(sub.father_side);
        const auto& side_topo = Topology::of(stopo.side(s).type);
        std::vector<std::vector<double>> probes{side_topo.center()};
        for (int j = 0; j < side_topo.node_count(); ++j) probes.push_back(side_topo.corner(j));
        for (const auto& probe : probes) {
          const auto xf = map_to_father(son, stopo.side_to_element(s).apply(probe));
          const auto pf = proj.apply(xf);
          for (std::size_t k = 0; k < xf.size(); ++k)
            if (std::abs(pf[k] - xf[k]) > 1e-7)
              throw std::runtime_error("pattern '" + name +
                                       "': a son side leaves its father side");
        }
      }
    }
  }

private:
  /// Sign of the interpolation jacobian at the element center, computed by
  /// central differences in the father-dimension slice.
  double signed_jacobian(int element) const {
    const int d = father_dimension();
    const auto& e = mesh.elements[static_cast<std::size_t>(element)];
    const auto center = Topology::of(e.type).center();
    const double h = 1e-5;
    std::array<std::array<double, 3>, 3> j{};
    for (int c = 0; c < d; ++c) {
      auto hi = center, lo = center;
      hi[static_cast<std::size_t>(c)] += h;
      lo[static_cast<std::size_t>(c)] -= h;
      const auto fhi = map_to_father(element, hi);
      const auto flo = map_to_father(element, lo);
      for (int r = 0; r < d; ++r)
        j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            (fhi[static_cast<std::size_t>(r)] - flo[static_cast<std::size_t>(r)]) / (2 * h);
    }
    if (d == 1) return j[0][0];
    if (d == 2) return j[0][0] * j[1][1] - j[0][1] * j[1][0];
    return j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
           j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
           j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
  }

  void fix_son_orientations() {
    for (int son = 1; son <= son_count(); ++son) {
      if (signed_jacobian(son) >= 0) continue;
      auto& e = mesh.elements[static_cast<std::size_t>(son)];
      const auto flip = [&]() -> std::vector<int> {
        switch (e.type) {
          case ElementType::Line: return {1, 0};
          case ElementType::Triangle: return {0, 2, 1};
          case ElementType::Quadrilateral: return {0, 3, 2, 1};
          case ElementType::Tetrahedron: return {0, 1, 3, 2};
          case ElementType::Pyramid: return {0, 3, 2, 1, 4};
          case ElementType::Prism: return {3, 4, 5, 0, 1, 2};
          case ElementType::Hexahedron: return {0, 3, 2, 1, 4, 7, 6, 5};
          default: return {};
        }
      }();
      if (flip.empty())
        throw std::runtime_error("pattern '" + name + "': degenerate son element");
      std::vector<int> reordered(e.nodes.size());
      for (std::size_t i = 0; i < flip.size(); ++i)
        reordered[i] = e.nodes[static_cast<std::size_t>(flip[i])];
      e.nodes = std::move(reordered);
      if (signed_jacobian(son) < 0)
        throw std::runtime_error("pattern '" + name + "': degenerate son element");
    }
  }
};

// ---------------------------------------------------------------------------
// text format (Fig. 4 grammar)

namespace detail {

struct PatternLine {
  int number = 0;
  std::vector<std::string> tokens;
};

inline std::vector<PatternLine> tokenize_pattern_text(const std::string& text) {
  std::vector<PatternLine> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos || raw[first] == '%') continue;
    PatternLine line;
    line.number = number;
    std::istringstream ls(raw);
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    lines.push_back(std::move(line));
  }
  return lines;
}

inline int parse_int(const std::string& tok, int line) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, "expected integer, got '" + tok + "'");
  }
  if (pos != tok.size()) throw ParseError(line, "expected integer, got '" + tok + "'");
  return v;
}

inline double parse_real(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, "expected real number, got '" + tok + "'");
  }
  if (pos != tok.size()) throw ParseError(line, "expected real number, got '" + tok + "'");
  return v;
}

}  // namespace detail

/// Parses the pattern text format. Returns an uninitialized pattern; no
/// derived data is computed and coordinates are as written.
inline RefinementPattern parse_pattern(const std::string& text) {
  const auto lines = detail::tokenize_pattern_text(text);
  std::size_t cursor = 0;
  const auto need = [&](const char* what) -> const detail::PatternLine& {
    if (cursor >= lines.size())
      throw ParseError(lines.empty() ? 1 : lines.back().number,
                       std::string("unexpected end of file, expected ") + what);
    return lines[cursor++];
  };

  const auto& header = need("'#nodes #elements'");
  if (header.tokens.size() != 2)
    throw ParseError(header.number, "expected '#nodes #elements'");
  const int n_nodes = detail::parse_int(header.tokens[0], header.number);
  const int n_elements = detail::parse_int(header.tokens[1], header.number);
  if (n_nodes < 1 || n_elements < 1)
    throw ParseError(header.number, "node and element counts must be positive");

  const auto& ident = need("'id name'");
  if (ident.tokens.size() != 2) throw ParseError(ident.number, "expected 'id name'");

  RefinementPattern p;
  p.id = detail::parse_int(ident.tokens[0], ident.number);
  p.name = ident.tokens[1];

  for (int i = 0; i < n_nodes; ++i) {
    const auto& line = need("node coordinates");
    if (line.tokens.size() != 3)
      throw ParseError(line.number, "expected 3 node coordinates");
    Vec3 x{};
    for (int k = 0; k < 3; ++k)
      x[static_cast<std::size_t>(k)] = detail::parse_real(line.tokens[static_cast<std::size_t>(k)], line.number);
    p.mesh.add_node(x);
  }

  for (int i = 0; i < n_elements; ++i) {
    const auto& line = need("element description");
    if (line.tokens.size() < 2)
      throw ParseError(line.number, "expected 'type mat-id node-ids...'");
    const int code = detail::parse_int(line.tokens[0], line.number);
    ElementType type = ElementType::Point;
    try {
      type = type_from_code(code);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line.number, e.what());
    }
    const int material = detail::parse_int(line.tokens[1], line.number);
    const int expected = node_count_of(type);
    if (static_cast<int>(line.tokens.size()) != 2 + expected)
      throw ParseError(line.number, std::string("expected ") + std::to_string(expected) +
                                        " node ids for " + type_name(type));
    std::vector<int> ids;
    for (int k = 0; k < expected; ++k) {
      const int id = detail::parse_int(line.tokens[static_cast<std::size_t>(2 + k)], line.number);
      if (id < 0 || id >= n_nodes)
        throw ParseError(line.number, "node id " + std::to_string(id) + " out of range");
      ids.push_back(id);
    }
    std::set<int> unique(ids.begin(), ids.end());
    if (static_cast<int>(unique.size()) != expected)
      throw ParseError(line.number, "repeated node id in element");
    if (i == 0 && dimension_of(type) == 0)
      throw ParseError(line.number, "father element cannot be a point");
    if (i > 0 && dimension_of(type) > p.father_dimension())
      throw ParseError(line.number, "first element is not the maximal-dimension father");
    p.mesh.add_element(type, material, std::move(ids));
  }

  if (cursor != lines.size())
    throw ParseError(lines[cursor].number, "unexpected extra content");
  return p;
}

/// Deterministic writer for the same grammar; reals carry 17 significant
/// digits so 64-bit values round-trip.
inline std::string write_pattern(const RefinementPattern& p) {
  std::ostringstream os;
  os << p.node_count() << ' ' << p.mesh.elements.size() << '\n';
  os << p.id << ' ' << p.name << '\n';
  char buf[64];
  for (const auto& node : p.mesh.nodes) {
    for (int k = 0; k < 3; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", node.x[static_cast<std::size_t>(k)]);
      os << (k ? " " : "") << buf;
    }
    os << '\n';
  }
  for (const auto& e : p.mesh.elements) {
    os << type_code(e.type) << ' ' << e.material;
    for (int n : e.nodes) os << ' ' << n;
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// equality

/// The four-part equality test: per-type element counts, node count, a node
/// bijection (coordinate matching at 1e-8 in master space) and identical
/// mapped node sets per element. `a_to_b`, when given, maps a's master
/// coordinates into b's before matching; used to compare side patterns
/// across neighbor orientations.
inline bool pattern_equality_mapped(const RefinementPattern& a, const RefinementPattern& b,
                                    const AffineTransform* a_to_b) {
  if (a.father_type() != b.father_type()) return false;
  if (a.node_count() != b.node_count()) return false;
  if (a.mesh.elements.size() != b.mesh.elements.size()) return false;
  std::map<ElementType, int> counts;
  for (const auto& e : a.mesh.elements) ++counts[e.type];
  for (const auto& e : b.mesh.elements) --counts[e.type];
  for (const auto& [type, balance] : counts)
    if (balance != 0) return false;

  const double tol = 1e-8;
  std::vector<int> a_to_b_node(static_cast<std::size_t>(a.node_count()), -1);
  std::vector<bool> used(static_cast<std::size_t>(b.node_count()), false);
  for (int i = 0; i < a.node_count(); ++i) {
    auto xa = a.node_param(i);
    if (a_to_b) xa = a_to_b->apply(xa);
    int match = -1;
    for (int j = 0; j < b.node_count(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const auto xb = b.node_param(j);
      double d = 0;
      for (std::size_t k = 0; k < xb.size(); ++k) d = std::max(d, std::abs(xa[k] - xb[k]));
      if (d <= tol) {
        match = j;
        break;
      }
    }
    if (match < 0) return false;
    a_to_b_node[static_cast<std::size_t>(i)] = match;
    used[static_cast<std::size_t>(match)] = true;
  }

  std::multiset<std::pair<ElementType, std::vector<int>>> b_elements;
  for (const auto& e : b.mesh.elements) {
    std::vector<int> nodes = e.nodes;
    std::sort(nodes.begin(), nodes.end());
    b_elements.emplace(e.type, std::move(nodes));
  }
  for (const auto& e : a.mesh.elements) {
    std::vector<int> mapped;
    for (int n : e.nodes) mapped.push_back(a_to_b_node[static_cast<std::size_t>(n)]);
    std::sort(mapped.begin(), mapped.end());
    const auto it = b_elements.find({e.type, mapped});
    if (it == b_elements.end()) return false;
    b_elements.erase(it);
  }
  return b_elements.empty();
}

inline bool pattern_equality(const RefinementPattern& a, const RefinementPattern& b) {
  return pattern_equality_mapped(a, b, nullptr);
}

// ---------------------------------------------------------------------------
// derived pattern builders (registration in the database drives these)

/// The pattern a refined element imposes on one of its proper sides,
/// expressed in that side's parametric space. Requires an initialized
/// source pattern; the result is uninitialized.
inline RefinementPattern induced_side_pattern(const RefinementPattern& p, int father_side) {
  const auto& ftopo = p.father_topology();
  const auto& sd = ftopo.side(father_side);
  const auto& part = p.partitions[static_cast<std::size_t>(father_side)];

  std::vector<int> pattern_nodes;  // ids in p's mesh, side corners first
  for (int local : sd.nodes)
    pattern_nodes.push_back(p.mesh.elements.front().nodes[static_cast<std::size_t>(local)]);
  std::set<int> extra;
  for (const auto& ss : part.son_sides) {
    const auto& stopo = Topology::of(p.mesh.elements[static_cast<std::size_t>(ss.element)].type);
    if (stopo.side(ss.side).dimension != sd.dimension) continue;
    for (int local : stopo.side(ss.side).nodes)
      extra.insert(p.mesh.elements[static_cast<std::size_t>(ss.element)].nodes[static_cast<std::size_t>(local)]);
  }
  for (int n : pattern_nodes) extra.erase(n);
  for (int n : extra) pattern_nodes.push_back(n);

  std::map<int, int> to_local;
  RefinementPattern side;
  side.name = p.name + ":s" + std::to_string(father_side);
  for (std::size_t i = 0; i < pattern_nodes.size(); ++i) {
    to_local[pattern_nodes[i]] = static_cast<int>(i);
    const auto coords = ftopo.element_to_side(father_side).apply(p.node_param(pattern_nodes[i]));
    Vec3 x{};
    for (std::size_t k = 0; k < coords.size(); ++k) x[k] = coords[k];
    side.mesh.add_node(x);
  }
  std::vector<int> father_ids;
  for (std::size_t j = 0; j < sd.nodes.size(); ++j) father_ids.push_back(static_cast<int>(j));
  side.mesh.add_element(sd.type, 1, father_ids);
  for (const auto& ss : part.son_sides) {
    const auto& sub = p.mesh.elements[static_cast<std::size_t>(ss.element)];
    const auto& stopo = Topology::of(sub.type);
    if (stopo.side(ss.side).dimension != sd.dimension) continue;
    std::vector<int> ids;
    for (int local : stopo.side(ss.side).nodes)
      ids.push_back(to_local.at(sub.nodes[static_cast<std::size_t>(local)]));
    side.mesh.add_element(stopo.side(ss.side).type, 1, ids);
  }
  return side;
}

/// The pattern re-expressed for an element whose node ordering differs by
/// `perm` (a node ordering from the father topology's symmetry group).
/// The result is uninitialized.
inline RefinementPattern permuted_pattern(const RefinementPattern& p, const std::vector<int>& perm,
                                          int variant_index) {
  const auto& ftopo = p.father_topology();
  // affine symmetry moving corner perm[j] onto corner j
  std::vector<AffineSample> samples;
  for (int j = 0; j < ftopo.node_count(); ++j)
    samples.emplace_back(ftopo.corner(perm[static_cast<std::size_t>(j)]), ftopo.corner(j));
  const auto rot = fit_l2(samples);

  RefinementPattern out;
  out.name = p.name + ":p" + std::to_string(variant_index);
  for (int n = 0; n < p.node_count(); ++n) {
    const auto mapped = rot.apply(p.node_param(n));
    Vec3 x{};
    for (std::size_t k = 0; k < mapped.size(); ++k) x[k] = mapped[k];
    out.mesh.add_node(x);
  }
  const auto& father = p.mesh.elements.front();
  std::vector<int> father_ids;
  for (int j = 0; j < ftopo.node_count(); ++j)
    father_ids.push_back(father.nodes[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])]);
  out.mesh.add_element(father.type, father.material, father_ids);
  for (int son = 1; son <= p.son_count(); ++son) {
    const auto& e = p.mesh.elements[static_cast<std::size_t>(son)];
    out.mesh.add_element(e.type, e.material, e.nodes);
  }
  return out;
}

}  // namespace refpat

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "refpat/affine.hpp"

namespace refpat {

/// The eight master-element topologies. The numeric codes double as the
/// element-type codes of the pattern/mesh text formats.
enum class ElementType : int {
  Point = 0,
  Line = 1,
  Triangle = 2,
  Quadrilateral = 3,
  Tetrahedron = 4,
  Pyramid = 5,
  Prism = 6,
  Hexahedron = 7,
};

inline int type_code(ElementType t) { return static_cast<int>(t); }

inline ElementType type_from_code(int code) {
  if (code < 0 || code > 7)
    throw std::invalid_argument("unknown element-type code " + std::to_string(code));
  return static_cast<ElementType>(code);
}

inline int dimension_of(ElementType t) {
  constexpr std::array<int, 8> d{0, 1, 2, 2, 3, 3, 3, 3};
  return d[static_cast<std::size_t>(t)];
}

inline int node_count_of(ElementType t) {
  constexpr std::array<int, 8> n{1, 2, 3, 4, 4, 5, 6, 8};
  return n[static_cast<std::size_t>(t)];
}

inline const char* type_name(ElementType t) {
  constexpr std::array<const char*, 8> names{
      "Point", "Line", "Triangle", "Quadrilateral",
      "Tetrahedron", "Pyramid", "Prism", "Hexahedron"};
  return names[static_cast<std::size_t>(t)];
}

/// One side of a master element: a node, edge, face, or the element itself.
struct SideDescriptor {
  int index = 0;
  int dimension = 0;
  ElementType type = ElementType::Point;
  std::vector<int> nodes;  // element-local corner indices spanning the closure
};

/// Values of the corner (vertex-interpolating) shape functions at xi.
/// Multilinear for all types except the pyramid, whose standard corner
/// functions are rational; they are still linear on every face.
inline std::vector<double> shape_values(ElementType t, const std::vector<double>& xi) {
  if (static_cast<int>(xi.size()) != dimension_of(t))
    throw std::invalid_argument("shape_values: coordinate length != element dimension");
  switch (t) {
    case ElementType::Point:
      return {1.0};
    case ElementType::Line: {
      const double x = xi[0];
      return {0.5 * (1.0 - x), 0.5 * (1.0 + x)};
    }
    case ElementType::Triangle: {
      const double x = xi[0], y = xi[1];
      return {1.0 - x - y, x, y};
    }
    case ElementType::Quadrilateral: {
      const double x = xi[0], y = xi[1];
      return {0.25 * (1 - x) * (1 - y), 0.25 * (1 + x) * (1 - y),
              0.25 * (1 + x) * (1 + y), 0.25 * (1 - x) * (1 + y)};
    }
    case ElementType::Tetrahedron: {
      const double x = xi[0], y = xi[1], z = xi[2];
      return {1.0 - x - y - z, x, y, z};
    }
    case ElementType::Pyramid: {
      const double x = xi[0], y = xi[1], z = xi[2];
      if (z > 1.0 - 1e-12) return {0.0, 0.0, 0.0, 0.0, 1.0};
      const double w = 1.0 - z;
      return {0.25 * (w - x) * (w - y) / w, 0.25 * (w + x) * (w - y) / w,
              0.25 * (w + x) * (w + y) / w, 0.25 * (w - x) * (w + y) / w, z};
    }
    case ElementType::Prism: {
      const double x = xi[0], y = xi[1], z = xi[2];
      const double lo = 0.5 * (1.0 - z), hi = 0.5 * (1.0 + z);
      return {(1 - x - y) * lo, x * lo, y * lo, (1 - x - y) * hi, x * hi, y * hi};
    }
    case ElementType::Hexahedron: {
      const double x = xi[0], y = xi[1], z = xi[2];
      std::vector<double> n(8);
      for (int i = 0; i < 8; ++i) {
        const double sx = (i == 1 || i == 2 || i == 5 || i == 6) ? 1.0 : -1.0;
        const double sy = (i == 2 || i == 3 || i == 6 || i == 7) ? 1.0 : -1.0;
        const double sz = (i >= 4) ? 1.0 : -1.0;
        n[static_cast<std::size_t>(i)] =
            0.125 * (1 + sx * x) * (1 + sy * y) * (1 + sz * z);
      }
      return n;
    }
  }
  throw std::logic_error("shape_values: unreachable");
}

/// Static per-type tables: master corners, side enumeration, side<->element
/// transforms, symmetry permutations. Sides enumerate corners first (in node
/// order), then edges, then faces, then the element itself.
class Topology {
public:
  static const Topology& of(ElementType t);

  ElementType type() const { return type_; }
  int dimension() const { return dim_; }
  int node_count() const { return static_cast<int>(corners_.size()); }
  int side_count() const { return static_cast<int>(sides_.size()); }

  const SideDescriptor& side(int s) const {
    if (s < 0 || s >= side_count())
      throw std::invalid_argument("side index out of range for " + std::string(type_name(type_)));
    return sides_[static_cast<std::size_t>(s)];
  }

  const std::vector<SideDescriptor>& sides() const { return sides_; }

  const std::vector<int>& sides_of_dimension(int d) const {
    static const std::vector<int> empty;
    if (d < 0 || d > 3) return empty;
    return sides_by_dim_[static_cast<std::size_t>(d)];
  }

  /// Master coordinates of corner i (length == dimension()).
  const std::vector<double>& corner(int i) const { return corners_[static_cast<std::size_t>(i)]; }

  /// T_se: side parametric space -> element parametric space.
  const AffineTransform& side_to_element(int s) const {
    side(s);
    return t_se_[static_cast<std::size_t>(s)];
  }

  /// T_es: orthogonal affine projection element space -> side space.
  const AffineTransform& element_to_side(int s) const {
    side(s);
    return t_es_[static_cast<std::size_t>(s)];
  }

  /// P_s = T_se o T_es, the idempotent projection onto the side.
  AffineTransform projection_to_side(int s) const {
    return compose(side_to_element(s), element_to_side(s));
  }

  /// All node orderings mapping the topology onto itself (identity first).
  const std::vector<std::vector<int>>& permutations() const { return permutations_; }

  bool is_in_master(const std::vector<double>& x, double tol = 1e-10) const {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("is_in_master: coordinate length != element dimension");
    switch (type_) {
      case ElementType::Point:
        return true;
      case ElementType::Line:
        return std::abs(x[0]) <= 1 + tol;
      case ElementType::Triangle:
        return x[0] >= -tol && x[1] >= -tol && x[0] + x[1] <= 1 + tol;
      case ElementType::Quadrilateral:
        return std::abs(x[0]) <= 1 + tol && std::abs(x[1]) <= 1 + tol;
      case ElementType::Tetrahedron:
        return x[0] >= -tol && x[1] >= -tol && x[2] >= -tol &&
               x[0] + x[1] + x[2] <= 1 + tol;
      case ElementType::Pyramid:
        return x[2] >= -tol && x[2] <= 1 + tol &&
               std::abs(x[0]) <= 1 - x[2] + tol && std::abs(x[1]) <= 1 - x[2] + tol;
      case ElementType::Prism:
        return x[0] >= -tol && x[1] >= -tol && x[0] + x[1] <= 1 + tol &&
               std::abs(x[2]) <= 1 + tol;
      case ElementType::Hexahedron:
        return std::abs(x[0]) <= 1 + tol && std::abs(x[1]) <= 1 + tol &&
               std::abs(x[2]) <= 1 + tol;
    }
    return false;
  }

  /// Corner centroid; an interior point for every supported type.
  std::vector<double> center() const {
    std::vector<double> c(static_cast<std::size_t>(dim_), 0.0);
    for (const auto& corner : corners_)
      for (int k = 0; k < dim_; ++k) c[static_cast<std::size_t>(k)] += corner[static_cast<std::size_t>(k)];
    for (auto& v : c) v /= static_cast<double>(corners_.size());
    return c;
  }

  /// Side whose corner set equals the given element-local node set, or -1.
  int side_with_nodes(std::vector<int> nodes) const {
    std::sort(nodes.begin(), nodes.end());
    auto it = side_by_nodeset_.find(nodes);
    return it == side_by_nodeset_.end() ? -1 : it->second;
  }

  /// One side per line: `side_index dimension type node_list`.
  std::string describe() const {
    std::ostringstream os;
    for (const auto& s : sides_) {
      os << s.index << ' ' << s.dimension << ' ' << type_name(s.type);
      for (int n : s.nodes) os << ' ' << n;
      os << '\n';
    }
    return os.str();
  }

private:
  explicit Topology(ElementType t);

  void add_side(ElementType side_type, std::vector<int> nodes);
  void build_transforms();
  void build_permutations();

  ElementType type_;
  int dim_;
  std::vector<std::vector<double>> corners_;
  std::vector<SideDescriptor> sides_;
  std::vector<AffineTransform> t_se_;
  std::vector<AffineTransform> t_es_;
  std::array<std::vector<int>, 4> sides_by_dim_;
  std::vector<std::vector<int>> permutations_;
  std::map<std::vector<int>, int> side_by_nodeset_;
};

inline void Topology::add_side(ElementType side_type, std::vector<int> nodes) {
  SideDescriptor s;
  s.index = static_cast<int>(sides_.size());
  s.dimension = dimension_of(side_type);
  s.type = side_type;
  s.nodes = std::move(nodes);
  std::vector<int> key = s.nodes;
  std::sort(key.begin(), key.end());
  side_by_nodeset_[key] = s.index;
  sides_by_dim_[static_cast<std::size_t>(s.dimension)].push_back(s.index);
  sides_.push_back(std::move(s));
}

inline Topology::Topology(ElementType t) : type_(t), dim_(dimension_of(t)) {
  using ET = ElementType;
  switch (t) {
    case ET::Point:
      corners_ = {{}};
      break;
    case ET::Line:
      corners_ = {{-1.0}, {1.0}};
      break;
    case ET::Triangle:
      corners_ = {{0, 0}, {1, 0}, {0, 1}};
      break;
    case ET::Quadrilateral:
      corners_ = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
      break;
    case ET::Tetrahedron:
      corners_ = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
      break;
    case ET::Pyramid:
      corners_ = {{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}, {0, 0, 1}};
      break;
    case ET::Prism:
      corners_ = {{0, 0, -1}, {1, 0, -1}, {0, 1, -1}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
      break;
    case ET::Hexahedron:
      corners_ = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                  {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
      break;
  }

  for (int i = 0; i < static_cast<int>(corners_.size()); ++i)
    add_side(ET::Point, {i});

  const auto edges = [&]() -> std::vector<std::vector<int>> {
    switch (t) {
      case ET::Point:
      case ET::Line:
        return {};
      case ET::Triangle:
        return {{0, 1}, {1, 2}, {2, 0}};
      case ET::Quadrilateral:
        return {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
      case ET::Tetrahedron:
        return {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}};
      case ET::Pyramid:
        return {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 4}, {1, 4}, {2, 4}, {3, 4}};
      case ET::Prism:
        return {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 4}, {2, 5}, {3, 4}, {4, 5}, {5, 3}};
      case ET::Hexahedron:
        return {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 4}, {1, 5},
                {2, 6}, {3, 7}, {4, 5}, {5, 6}, {6, 7}, {7, 4}};
    }
    return {};
  }();
  for (auto& e : edges) add_side(ET::Line, e);

  const auto faces = [&]() -> std::vector<std::vector<int>> {
    switch (t) {
      case ET::Tetrahedron:
        return {{0, 1, 2}, {0, 1, 3}, {1, 2, 3}, {0, 2, 3}};
      case ET::Pyramid:
        return {{0, 1, 2, 3}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
      case ET::Prism:
        return {{0, 1, 2}, {0, 1, 4, 3}, {1, 2, 5, 4}, {2, 0, 3, 5}, {3, 4, 5}};
      case ET::Hexahedron:
        return {{0, 1, 2, 3}, {0, 1, 5, 4}, {1, 2, 6, 5},
                {2, 3, 7, 6}, {3, 0, 4, 7}, {4, 5, 6, 7}};
      default:
        return {};
    }
  }();
  for (auto& f : faces)
    add_side(f.size() == 3 ? ET::Triangle : ET::Quadrilateral, f);

  // the element itself is always the last side
  if (t != ET::Point) {
    std::vector<int> all(corners_.size());
    std::iota(all.begin(), all.end(), 0);
    add_side(t, std::move(all));
  }

  build_transforms();
  build_permutations();
}

inline void Topology::build_transforms() {
  t_se_.reserve(sides_.size());
  for (const auto& s : sides_) {
    AffineTransform t(dim_, s.dimension);
    const auto& a = corners_[static_cast<std::size_t>(s.nodes[0])];
    if (s.dimension == dim_) {
      t = AffineTransform::identity(dim_);
    } else if (s.dimension == 0) {
      for (int k = 0; k < dim_; ++k) t.shift(k) = a[static_cast<std::size_t>(k)];
    } else if (s.type == ElementType::Line) {
      const auto& b = corners_[static_cast<std::size_t>(s.nodes[1])];
      for (int k = 0; k < dim_; ++k) {
        t.coef(k, 0) = 0.5 * (b[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k)]);
        t.shift(k) = 0.5 * (b[static_cast<std::size_t>(k)] + a[static_cast<std::size_t>(k)]);
      }
    } else if (s.type == ElementType::Triangle) {
      const auto& b = corners_[static_cast<std::size_t>(s.nodes[1])];
      const auto& c = corners_[static_cast<std::size_t>(s.nodes[2])];
      for (int k = 0; k < dim_; ++k) {
        t.coef(k, 0) = b[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k)];
        t.coef(k, 1) = c[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k)];
        t.shift(k) = a[static_cast<std::size_t>(k)];
      }
    } else {
      // quadrilateral face; the four master corners form a parallelogram,
      // so the bilinear map degenerates to an affine one
      const auto& b = corners_[static_cast<std::size_t>(s.nodes[1])];
      const auto& c = corners_[static_cast<std::size_t>(s.nodes[2])];
      const auto& d = corners_[static_cast<std::size_t>(s.nodes[3])];
      for (int k = 0; k < dim_; ++k) {
        t.coef(k, 0) = 0.5 * (b[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k)]);
        t.coef(k, 1) = 0.5 * (d[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k)]);
        t.shift(k) = 0.25 * (a[static_cast<std::size_t>(k)] + b[static_cast<std::size_t>(k)] +
                             c[static_cast<std::size_t>(k)] + d[static_cast<std::size_t>(k)]);
      }
    }
    t_se_.push_back(t);
  }
  t_es_.reserve(sides_.size());
  for (const auto& t : t_se_) t_es_.push_back(least_squares_inverse(t));
}

inline void Topology::build_permutations() {
  const int n = node_count();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    std::vector<int> mapped;
    for (const auto& s : sides_) {
      mapped.clear();
      for (int i : s.nodes) mapped.push_back(perm[static_cast<std::size_t>(i)]);
      std::sort(mapped.begin(), mapped.end());
      auto it = side_by_nodeset_.find(mapped);
      if (it == side_by_nodeset_.end() ||
          sides_[static_cast<std::size_t>(it->second)].dimension != s.dimension ||
          sides_[static_cast<std::size_t>(it->second)].type != s.type) {
        ok = false;
        break;
      }
    }
    if (ok) permutations_.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  // next_permutation enumerates in lexicographic order, so the identity
  // ordering is always first
}

inline const Topology& Topology::of(ElementType t) {
  static const std::array<Topology, 8> tables{
      Topology(ElementType::Point),       Topology(ElementType::Line),
      Topology(ElementType::Triangle),    Topology(ElementType::Quadrilateral),
      Topology(ElementType::Tetrahedron), Topology(ElementType::Pyramid),
      Topology(ElementType::Prism),       Topology(ElementType::Hexahedron)};
  return tables[static_cast<std::size_t>(t)];
}

inline int side_count(ElementType t) { return Topology::of(t).side_count(); }

}  // namespace refpat

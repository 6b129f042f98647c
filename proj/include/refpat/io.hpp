#pragma once

#include <sstream>
#include <string>

#include "refpat/pattern.hpp"

namespace refpat {

/// Reads a mesh in the element grammar of the pattern format, minus the
/// id/name header: `#nodes #elements`, node coordinate lines, element lines
/// `type mat-id node-ids...`. `%` comment lines are allowed. Connectivity
/// is built before returning.
inline GeoMesh read_mesh(const std::string& text) {
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

  GeoMesh mesh;
  for (int i = 0; i < n_nodes; ++i) {
    const auto& line = need("node coordinates");
    if (line.tokens.size() != 3)
      throw ParseError(line.number, "expected 3 node coordinates");
    Vec3 x{};
    for (int k = 0; k < 3; ++k)
      x[static_cast<std::size_t>(k)] = detail::parse_real(line.tokens[static_cast<std::size_t>(k)], line.number);
    mesh.add_node(x);
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
    mesh.add_element(type, material, std::move(ids));
  }
  if (cursor != lines.size())
    throw ParseError(lines[cursor].number, "unexpected extra content");
  mesh.build_connectivity();
  return mesh;
}

/// Writes all elements in the mesh grammar; reals carry 17 significant
/// digits so coordinates round-trip bit-faithfully.
inline std::string write_mesh(const GeoMesh& mesh) {
  std::ostringstream os;
  os << mesh.nodes.size() << ' ' << mesh.elements.size() << '\n';
  char buf[64];
  for (const auto& node : mesh.nodes) {
    for (int k = 0; k < 3; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", node.x[static_cast<std::size_t>(k)]);
      os << (k ? " " : "") << buf;
    }
    os << '\n';
  }
  for (const auto& e : mesh.elements) {
    os << type_code(e.type) << ' ' << e.material;
    for (int n : e.nodes) os << ' ' << n;
    os << '\n';
  }
  return os.str();
}

/// Legacy ASCII unstructured-grid export with material id and refinement
/// level as cell data.
inline std::string export_vtk(const GeoMesh& mesh, bool leaf_only = true) {
  constexpr std::array<int, 8> vtk_type{1, 3, 5, 9, 10, 14, 13, 12};
  std::vector<int> cells;
  for (int el = 0; el < static_cast<int>(mesh.elements.size()); ++el)
    if (!leaf_only || mesh.is_leaf(el)) cells.push_back(el);

  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n";
  os << "refpat mesh\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.nodes.size() << " double\n";
  char buf[64];
  for (const auto& node : mesh.nodes) {
    for (int k = 0; k < 3; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", node.x[static_cast<std::size_t>(k)]);
      os << (k ? " " : "") << buf;
    }
    os << '\n';
  }
  std::size_t list_size = 0;
  for (int el : cells) list_size += 1 + mesh.element(el).nodes.size();
  os << "CELLS " << cells.size() << ' ' << list_size << '\n';
  for (int el : cells) {
    const auto& e = mesh.element(el);
    os << e.nodes.size();
    for (int n : e.nodes) os << ' ' << n;
    os << '\n';
  }
  os << "CELL_TYPES " << cells.size() << '\n';
  for (int el : cells)
    os << vtk_type[static_cast<std::size_t>(mesh.element(el).type)] << '\n';
  os << "CELL_DATA " << cells.size() << '\n';
  os << "SCALARS material int 1\nLOOKUP_TABLE default\n";
  for (int el : cells) os << mesh.element(el).material << '\n';
  os << "SCALARS level int 1\nLOOKUP_TABLE default\n";
  for (int el : cells) os << mesh.refinement_level(el) << '\n';
  return os.str();
}

}  // namespace refpat

#include "catch_amalgamated.hpp"

#include "refpat/io.hpp"
#include "refpat/ref_tools.hpp"

using namespace refpat;

namespace {

const char* kMasterTetraText =
    "4 1\n"
    "0 0 0\n"
    "1 0 0\n"
    "0 1 0\n"
    "0 0 1\n"
    "4 1 0 1 2 3\n";

const char* kSixTetCubeText =
    "% unit cube as six path tetrahedra\n"
    "8 6\n"
    "0 0 0\n1 0 0\n1 1 0\n0 1 0\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n"
    "4 1 0 1 2 6\n4 1 0 2 3 6\n4 1 0 1 5 6\n4 1 0 3 7 6\n4 1 0 4 5 6\n4 1 0 4 7 6\n";

}  // namespace

TEST_CASE("read a single master tetra") {
  auto m = read_mesh(kMasterTetraText);
  CHECK(m.nodes.size() == 4);
  CHECK(m.elements.size() == 1);
  CHECK(m.element(0).type == ElementType::Tetrahedron);
}

TEST_CASE("read the six-tet cube and find two-cycles on interior faces") {
  auto m = read_mesh(kSixTetCubeText);
  CHECK(m.nodes.size() == 8);
  CHECK(m.elements.size() == 6);
  int interior = 0, boundary = 0;
  for (int el = 0; el < 6; ++el)
    for (int f : Topology::of(ElementType::Tetrahedron).sides_of_dimension(2)) {
      const auto n = m.neighbor_cycle(ElemSide{el, f}).size();
      if (n == 2)
        ++interior;
      else if (n == 1)
        ++boundary;
    }
  CHECK(interior == 12);  // 6 interior faces seen from both sides
  CHECK(boundary == 12);  // 2 boundary faces per cube facet
}

TEST_CASE("read_mesh rejects malformed input") {
  CHECK_THROWS_AS(read_mesh("2 1\n0 0 0\n1 0 0\n1 1 0 5\n"), ParseError);  // dangling node
  CHECK_THROWS_AS(read_mesh(""), ParseError);
  CHECK_THROWS_AS(read_mesh("1 1\n0 0 0\n"), ParseError);
  CHECK_THROWS_AS(read_mesh("1 1\n0 0 0\n4 1 0 0 0 0\n"), std::exception);
}

TEST_CASE("write/read round trip is element-wise identical") {
  auto m = read_mesh(kSixTetCubeText);
  // divide something so the written mesh is not the input text
  PatternDatabase db;
  refine_uniform(m, {0}, db);
  auto r = read_mesh(write_mesh(m));
  REQUIRE(r.nodes.size() == m.nodes.size());
  REQUIRE(r.elements.size() == m.elements.size());
  for (std::size_t n = 0; n < m.nodes.size(); ++n)
    for (int k = 0; k < 3; ++k)
      CHECK(r.nodes[n].x[static_cast<std::size_t>(k)] == m.nodes[n].x[static_cast<std::size_t>(k)]);
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    CHECK(r.elements[e].type == m.elements[e].type);
    CHECK(r.elements[e].material == m.elements[e].material);
    CHECK(r.elements[e].nodes == m.elements[e].nodes);
  }
  // a second write is byte-identical
  CHECK(write_mesh(read_mesh(write_mesh(m))) == write_mesh(m));
}

TEST_CASE("vtk export of the divided tetra") {
  auto m = read_mesh(kMasterTetraText);
  PatternDatabase db;
  db.load_directory(REFPAT_PATTERNS_DIR);
  divide(m, 0, db.lookup("TetraDir1Side"), &db);

  auto leaf = export_vtk(m, true);
  CHECK(leaf.find("# vtk DataFile Version 3.0") == 0);
  CHECK(leaf.find("CELLS 2 ") != std::string::npos);
  // one tetra (10) and one wedge (13)
  const auto types_pos = leaf.find("CELL_TYPES 2\n");
  REQUIRE(types_pos != std::string::npos);
  std::istringstream types(leaf.substr(types_pos + 13));
  int a = 0, b = 0;
  types >> a >> b;
  CHECK(std::min(a, b) == 10);
  CHECK(std::max(a, b) == 13);

  // ancestors reappear with level data when leaf_only is off
  auto all = export_vtk(m, false);
  CHECK(all.find("CELLS 3 ") != std::string::npos);
  const auto level_pos = all.find("SCALARS level int 1\nLOOKUP_TABLE default\n");
  REQUIRE(level_pos != std::string::npos);
  std::istringstream levels(all.substr(all.find('\n', all.find("LOOKUP_TABLE default", level_pos)) + 1));
  int l0 = -1, l1 = -1, l2 = -1;
  levels >> l0 >> l1 >> l2;
  CHECK(l0 == 0);
  CHECK(l1 == 1);
  CHECK(l2 == 1);
}

#include "catch_amalgamated.hpp"

#include <filesystem>
#include <fstream>

#include "refpat/pattern_db.hpp"

using namespace refpat;
namespace fs = std::filesystem;

namespace {

std::string patterns_dir() { return REFPAT_PATTERNS_DIR; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

fs::path make_temp_dir(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("refpat-test-" + tag + "-" +
                                          std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// A line pattern split at an arbitrary interior position.
std::string line_pattern_text(int id, const std::string& name, double at) {
  std::ostringstream os;
  os << "3 3\n" << id << ' ' << name << "\n-1 0 0\n1 0 0\n" << at << " 0 0\n"
     << "1 1 0 1\n1 1 0 2\n1 1 2 1\n";
  return os.str();
}

}  // namespace

TEST_CASE("built-in uniform patterns cover every refinable type") {
  PatternDatabase db;
  CHECK(db.uniform_pattern(ElementType::Point) == nullptr);
  const std::map<ElementType, int> sons{
      {ElementType::Line, 2},     {ElementType::Triangle, 4},
      {ElementType::Quadrilateral, 4}, {ElementType::Tetrahedron, 8},
      {ElementType::Pyramid, 10}, {ElementType::Prism, 8},
      {ElementType::Hexahedron, 8}};
  for (const auto& [type, expect] : sons) {
    auto p = db.uniform_pattern(type);
    REQUIRE(p != nullptr);
    CHECK(p->father_type() == type);
    CHECK(p->son_count() == expect);
    CHECK(p->initialized);
    CHECK_FALSE(db.patterns_for_type(type).empty());
  }
  CHECK(db.patterns_for_type(ElementType::Point).empty());
  // name lookups work for the generated patterns
  CHECK(db.lookup("UnifLine") == db.uniform_pattern(ElementType::Line));
  CHECK(db.lookup("UnifHexahedron") == db.uniform_pattern(ElementType::Hexahedron));
}

TEST_CASE("uniform patterns induce uniform side patterns") {
  PatternDatabase db;
  auto quad = db.uniform_pattern(ElementType::Quadrilateral);
  for (int e : Topology::of(ElementType::Quadrilateral).sides_of_dimension(1)) {
    REQUIRE(quad->side_pattern(e) != nullptr);
    CHECK(pattern_equality(*quad->side_pattern(e), *db.uniform_pattern(ElementType::Line)));
  }
  auto tet = db.uniform_pattern(ElementType::Tetrahedron);
  for (int f : Topology::of(ElementType::Tetrahedron).sides_of_dimension(2)) {
    REQUIRE(tet->side_pattern(f) != nullptr);
    CHECK(pattern_equality(*tet->side_pattern(f), *db.uniform_pattern(ElementType::Triangle)));
  }
}

TEST_CASE("double insert leaves the database unchanged") {
  PatternDatabase db;
  auto first = db.load_text(read_file(patterns_dir() + "/tetra_dir_1side.rpt"));
  const int size_after_first = db.size();
  auto second = db.load_text(read_file(patterns_dir() + "/tetra_dir_1side.rpt"));
  CHECK(second == first);
  CHECK(db.size() == size_after_first);
}

TEST_CASE("inserting the tetra pattern registers side patterns and variants") {
  PatternDatabase db;
  const int before = db.size();
  auto p = db.load_text(read_file(patterns_dir() + "/tetra_dir_1side.rpt"));
  CHECK(db.size() > before);
  CHECK(db.lookup(-50) == p);
  CHECK(db.lookup("TetraDir1Side") == p);
  CHECK(db.lookup("missing") == nullptr);

  // split vertical edges induce the uniform line split
  REQUIRE(p->side_pattern(7) != nullptr);
  CHECK(p->side_pattern_ref(7) == db.uniform_pattern(ElementType::Line));
  CHECK(p->side_pattern(10) == nullptr);  // untouched base face

  // orbit under the 24 tetra orderings has one pattern per chosen vertex
  CHECK(p->permutations.size() == 3);

  // referential completeness: side patterns and variants are stored
  for (const auto& type :
       {ElementType::Line, ElementType::Triangle, ElementType::Tetrahedron})
    for (const auto& stored : db.patterns_for_type(type)) {
      for (int s = 0; s < Topology::of(stored->father_type()).side_count(); ++s) {
        auto sp = stored->side_pattern_ref(s);
        if (sp) CHECK(db.lookup(sp->id) == sp);
      }
      for (const auto& variant : stored->permutations)
        CHECK(db.lookup(variant->id) == variant);
    }
}

TEST_CASE("100 generated line patterns are all retrievable") {
  PatternDatabase db;
  std::vector<int> ids;
  for (int k = 1; k <= 100; ++k) {
    const double at = -1.0 + 2.0 * k / 101.0;
    auto p = db.load_text(line_pattern_text(1000 + k, "Line" + std::to_string(k), at));
    ids.push_back(p->id);
  }
  std::set<int> unique(ids.begin(), ids.end());
  CHECK(unique.size() == 100);
  for (int id : ids) CHECK(db.lookup(id) != nullptr);
}

TEST_CASE("dedup closure: re-inserting every stored pattern changes nothing") {
  PatternDatabase db;
  db.load_text(read_file(patterns_dir() + "/tetra_dir_1side.rpt"));
  db.load_text(read_file(patterns_dir() + "/tri_dir_edge.rpt"));
  const int size = db.size();
  for (auto type : {ElementType::Line, ElementType::Triangle, ElementType::Quadrilateral,
                    ElementType::Tetrahedron, ElementType::Prism}) {
    for (const auto& stored : db.patterns_for_type(type)) {
      RefinementPattern copy = *stored;
      copy.id = 0;
      copy.name = "copy-of-" + copy.name;
      auto ref = db.insert(std::move(copy));
      CHECK(ref == stored);
    }
  }
  CHECK(db.size() == size);
}

TEST_CASE("conflicting ids are remapped with a warning") {
  PatternDatabase db;
  auto a = db.load_text(line_pattern_text(-77, "LineA", -0.5));
  // +0.25 is not in LineA's reflection orbit, so this is a genuinely new
  // pattern whose id collides
  auto b = db.load_text(line_pattern_text(-77, "LineB", 0.25));
  CHECK(a->id == -77);
  CHECK(b->id != -77);
  CHECK_FALSE(db.warnings.empty());
  CHECK(db.lookup(-77) == a);
  CHECK(db.lookup(b->id) == b);
}

TEST_CASE("name collision with a non-equal pattern is an error") {
  PatternDatabase db;
  db.load_text(line_pattern_text(-1, "SameName", -0.5));
  CHECK_THROWS_AS(db.load_text(line_pattern_text(-2, "SameName", 0.25)), std::runtime_error);
}

TEST_CASE("load_directory") {
  PatternDatabase empty_db;
  auto empty_dir = make_temp_dir("empty");
  auto r0 = empty_db.load_directory(empty_dir.string());
  CHECK(r0.inserted == 0);
  CHECK(r0.errors.empty());

  // one valid file: the pattern plus at least its line side pattern appear
  {
    PatternDatabase db;
    auto dir = make_temp_dir("fig4");
    fs::copy_file(patterns_dir() + "/tetra_dir_1side.rpt", dir / "a.rpt");
    const int builtin = db.size();
    auto r = db.load_directory(dir.string());
    CHECK(r.errors.empty());
    CHECK(r.inserted >= 2);
    CHECK(db.size() == builtin + r.inserted);
    fs::remove_all(dir);
  }

  // duplicate files load once; a broken file is reported but not fatal
  {
    PatternDatabase db, db_single;
    auto dir = make_temp_dir("dup");
    fs::copy_file(patterns_dir() + "/tetra_dir_1side.rpt", dir / "a.rpt");
    fs::copy_file(patterns_dir() + "/tetra_dir_1side.rpt", dir / "b.rpt");
    std::ofstream(dir / "c.rpt") << "not a pattern\n";
    auto r = db.load_directory(dir.string());

    auto single = make_temp_dir("single");
    fs::copy_file(patterns_dir() + "/tetra_dir_1side.rpt", single / "a.rpt");
    auto rs = db_single.load_directory(single.string());

    CHECK(r.inserted == rs.inserted);
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].find("c.rpt") != std::string::npos);
    fs::remove_all(dir);
    fs::remove_all(single);
  }

  PatternDatabase db;
  CHECK_THROWS_AS(db.load_directory("/nonexistent/refpat"), std::runtime_error);
}

TEST_CASE("the shipped pattern corpus loads cleanly") {
  PatternDatabase db;
  auto r = db.load_directory(patterns_dir());
  for (const auto& e : r.errors) UNSCOPED_INFO(e);
  CHECK(r.errors.empty());
  CHECK(db.lookup("TetraDir1Side") != nullptr);
  CHECK(db.lookup("TetraDir1Edge") != nullptr);
  CHECK(db.lookup("PrismDirBase") != nullptr);
  CHECK(db.lookup("PrismDirEdge") != nullptr);
  // the 2D files dedup against side patterns induced by the 3D ones that
  // load first, so they are present by equality rather than by name
  for (const char* file : {"tri_dir_edge.rpt", "tri_bisect.rpt", "quad_dir_edge.rpt",
                           "quad_dir_node.rpt", "quad_trans_edge.rpt",
                           "quad_trans_3edges.rpt"}) {
    PatternDatabase solo;
    auto ref = solo.load_text(read_file(patterns_dir() + "/" + file));
    INFO(file);
    CHECK(db.find_equal(*ref) != nullptr);
  }
  // equality is reflexive and symmetric across the whole store
  for (auto type : {ElementType::Line, ElementType::Triangle, ElementType::Quadrilateral,
                    ElementType::Tetrahedron, ElementType::Pyramid, ElementType::Prism,
                    ElementType::Hexahedron}) {
    const auto& list = db.patterns_for_type(type);
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(pattern_equality(*list[i], *list[i]));
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        const bool ab = pattern_equality(*list[i], *list[j]);
        const bool ba = pattern_equality(*list[j], *list[i]);
        CHECK(ab == ba);
        CHECK_FALSE(ab);  // the store is deduplicated
      }
    }
  }
}

#include "catch_amalgamated.hpp"

#include <random>
#include <set>

#include "refpat/topology.hpp"

using namespace refpat;

namespace {

const std::array<ElementType, 8> kAllTypes{
    ElementType::Point,       ElementType::Line,    ElementType::Triangle,
    ElementType::Quadrilateral, ElementType::Tetrahedron, ElementType::Pyramid,
    ElementType::Prism,       ElementType::Hexahedron};

std::vector<double> random_in_master(const Topology& topo, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::vector<double> x(static_cast<std::size_t>(topo.dimension()));
    for (auto& v : x) v = u(rng);
    if (topo.is_in_master(x)) return x;
  }
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("side counts match the published table") {
  CHECK(side_count(ElementType::Point) == 1);
  CHECK(side_count(ElementType::Line) == 3);
  CHECK(side_count(ElementType::Triangle) == 7);
  CHECK(side_count(ElementType::Quadrilateral) == 9);
  CHECK(side_count(ElementType::Tetrahedron) == 15);
  CHECK(side_count(ElementType::Pyramid) == 19);
  CHECK(side_count(ElementType::Prism) == 21);
  CHECK(side_count(ElementType::Hexahedron) == 27);
}

TEST_CASE("node counts and codes") {
  const std::array<int, 8> nodes{1, 2, 3, 4, 4, 5, 6, 8};
  for (int code = 0; code < 8; ++code) {
    auto t = type_from_code(code);
    CHECK(type_code(t) == code);
    CHECK(node_count_of(t) == nodes[static_cast<std::size_t>(code)]);
  }
  CHECK_THROWS_AS(type_from_code(8), std::invalid_argument);
  CHECK_THROWS_AS(type_from_code(-1), std::invalid_argument);
}

TEST_CASE("side enumeration structure") {
  for (auto t : kAllTypes) {
    const auto& topo = Topology::of(t);
    // corners first, element itself last
    for (int i = 0; i < topo.node_count(); ++i) {
      CHECK(topo.side(i).dimension == 0);
      REQUIRE(topo.side(i).nodes.size() == 1);
      CHECK(topo.side(i).nodes[0] == i);
    }
    const auto& last = topo.side(topo.side_count() - 1);
    CHECK(last.dimension == topo.dimension());
    CHECK(last.type == t);
    // dimensions are non-decreasing along the enumeration
    for (int s = 1; s < topo.side_count(); ++s)
      CHECK(topo.side(s).dimension >= topo.side(s - 1).dimension);
  }
}

TEST_CASE("specific side node sets") {
  const auto& tri = Topology::of(ElementType::Triangle);
  CHECK(tri.side(4).nodes == std::vector<int>{1, 2});
  CHECK(tri.side(6).nodes == std::vector<int>{0, 1, 2});
  CHECK(Topology::of(ElementType::Hexahedron).side(0).nodes == std::vector<int>{0});
  CHECK_THROWS_AS(tri.side(7), std::invalid_argument);
}

TEST_CASE("every corner lies geometrically in exactly its sides' closures") {
  for (auto t : kAllTypes) {
    const auto& topo = Topology::of(t);
    for (int i = 0; i < topo.node_count(); ++i) {
      const auto& x = topo.corner(i);
      for (const auto& s : topo.sides()) {
        auto p = topo.projection_to_side(s.index).apply(x);
        const bool on_side = dist(p, x) <= 1e-10;
        const bool listed =
            std::find(s.nodes.begin(), s.nodes.end(), i) != s.nodes.end();
        INFO(type_name(t) << " corner " << i << " side " << s.index);
        CHECK(on_side == listed);
      }
    }
  }
}

TEST_CASE("T_se maps side corners onto element corner coordinates") {
  for (auto t : kAllTypes) {
    const auto& topo = Topology::of(t);
    for (const auto& s : topo.sides()) {
      const auto& side_topo = Topology::of(s.type);
      const auto& t_se = topo.side_to_element(s.index);
      for (int j = 0; j < side_topo.node_count(); ++j) {
        auto image = t_se.apply(side_topo.corner(j));
        const auto& expect = topo.corner(s.nodes[static_cast<std::size_t>(j)]);
        REQUIRE(image.size() == expect.size());
        for (std::size_t k = 0; k < image.size(); ++k)
          CHECK(image[k] == Catch::Approx(expect[k]).margin(1e-13));
      }
    }
  }
}

TEST_CASE("triangle edge endpoints and trivial transforms") {
  const auto& tri = Topology::of(ElementType::Triangle);
  auto p0 = tri.side_to_element(3).apply({-1.0});
  CHECK(p0[0] == Catch::Approx(0.0).margin(1e-14));
  CHECK(p0[1] == Catch::Approx(0.0).margin(1e-14));
  auto p1 = tri.side_to_element(3).apply({1.0});
  CHECK(p1[0] == Catch::Approx(1.0));
  CHECK(p1[1] == Catch::Approx(0.0).margin(1e-14));

  CHECK(Topology::of(ElementType::Hexahedron)
            .side_to_element(26)
            .almost_equal(AffineTransform::identity(3), 1e-14));
  auto c = tri.side_to_element(0);
  CHECK(c.cols() == 0);
  auto v = c.apply({});
  CHECK(v[0] == Catch::Approx(0.0).margin(1e-14));
  CHECK(v[1] == Catch::Approx(0.0).margin(1e-14));
  CHECK(tri.element_to_side(6).almost_equal(AffineTransform::identity(2), 1e-12));
}

TEST_CASE("T_es o T_se is the identity on every side of every type") {
  for (auto t : kAllTypes) {
    const auto& topo = Topology::of(t);
    for (int s = 0; s < topo.side_count(); ++s) {
      auto round = compose(topo.element_to_side(s), topo.side_to_element(s));
      INFO(type_name(t) << " side " << s);
      CHECK(round.almost_equal(AffineTransform::identity(topo.side(s).dimension), 1e-12));
    }
  }
}

TEST_CASE("projections are idempotent at 100 random interior points") {
  std::mt19937 rng(2024);
  for (auto t : kAllTypes) {
    const auto& topo = Topology::of(t);
    if (topo.dimension() == 0) continue;
    for (int s = 0; s < topo.side_count(); ++s) {
      auto p = topo.projection_to_side(s);
      for (int rep = 0; rep < 100; ++rep) {
        auto x = random_in_master(topo, rng);
        auto once = p.apply(x);
        auto twice = p.apply(once);
        for (std::size_t k = 0; k < once.size(); ++k)
          CHECK(twice[k] == Catch::Approx(once[k]).margin(1e-12));
      }
    }
  }
}

TEST_CASE("projection to an edge factors through any containing face") {
  for (auto t : {ElementType::Tetrahedron, ElementType::Pyramid, ElementType::Prism,
                 ElementType::Hexahedron}) {
    const auto& topo = Topology::of(t);
    for (int f : topo.sides_of_dimension(2)) {
      std::set<int> face_nodes(topo.side(f).nodes.begin(), topo.side(f).nodes.end());
      for (int e : topo.sides_of_dimension(1)) {
        const auto& en = topo.side(e).nodes;
        if (!std::all_of(en.begin(), en.end(), [&](int n) { return face_nodes.count(n) > 0; }))
          continue;
        auto pe = topo.projection_to_side(e);
        auto pf = topo.projection_to_side(f);
        INFO(type_name(t) << " edge " << e << " face " << f);
        CHECK(compose(pe, pf).almost_equal(pe, 1e-12));
      }
    }
  }
}

TEST_CASE("projecting the triangle centroid onto an edge lands inside it") {
  const auto& tri = Topology::of(ElementType::Triangle);
  const std::vector<double> centroid{1.0 / 3.0, 1.0 / 3.0};
  auto lambda = tri.element_to_side(3).apply(centroid);

  // oracle: discretize edge 3 and find the closest parameter
  double best = 1e30, best_lambda = 0;
  for (int i = 0; i <= 200000; ++i) {
    const double l = -1.0 + 2.0 * i / 200000;
    auto p = tri.side_to_element(3).apply({l});
    const double d = dist(p, centroid);
    if (d < best) {
      best = d;
      best_lambda = l;
    }
  }
  CHECK(std::abs(lambda[0]) <= 1.0);
  CHECK(lambda[0] == Catch::Approx(best_lambda).margin(1e-4));
}

TEST_CASE("permutation counts") {
  CHECK(Topology::of(ElementType::Line).permutations().size() == 2);
  CHECK(Topology::of(ElementType::Triangle).permutations().size() == 6);
  CHECK(Topology::of(ElementType::Quadrilateral).permutations().size() == 8);
  CHECK(Topology::of(ElementType::Tetrahedron).permutations().size() == 24);
  CHECK(Topology::of(ElementType::Pyramid).permutations().size() == 8);
  CHECK(Topology::of(ElementType::Prism).permutations().size() == 12);
  CHECK(Topology::of(ElementType::Hexahedron).permutations().size() == 48);
}

TEST_CASE("permutations form a group and preserve side structure") {
  for (auto t : kAllTypes) {
    const auto& topo = Topology::of(t);
    const auto& perms = topo.permutations();
    std::set<std::vector<int>> all(perms.begin(), perms.end());
    REQUIRE(all.size() == perms.size());
    // identity enumerates first
    std::vector<int> id(static_cast<std::size_t>(topo.node_count()));
    std::iota(id.begin(), id.end(), 0);
    CHECK(perms.front() == id);
    // closed under composition (spot-check a bounded sample for the hexahedron)
    const std::size_t limit = std::min<std::size_t>(perms.size(), 12);
    for (std::size_t a = 0; a < limit; ++a)
      for (std::size_t b = 0; b < limit; ++b) {
        std::vector<int> comp(id.size());
        for (std::size_t i = 0; i < id.size(); ++i)
          comp[i] = perms[a][static_cast<std::size_t>(perms[b][i])];
        CHECK(all.count(comp) == 1);
      }
    // every permutation maps each side's node set onto a side of equal kind
    for (const auto& p : perms) {
      for (const auto& s : topo.sides()) {
        std::vector<int> mapped;
        for (int i : s.nodes) mapped.push_back(p[static_cast<std::size_t>(i)]);
        int target = topo.side_with_nodes(mapped);
        REQUIRE(target >= 0);
        CHECK(topo.side(target).dimension == s.dimension);
        CHECK(topo.side(target).type == s.type);
      }
    }
  }
}

TEST_CASE("is_in_master follows the table domains") {
  CHECK(Topology::of(ElementType::Triangle).is_in_master({0.2, 0.3}));
  CHECK(Topology::of(ElementType::Pyramid).is_in_master({0.0, 0.0, 1.0}));
  CHECK_FALSE(Topology::of(ElementType::Tetrahedron).is_in_master({0.5, 0.5, 0.5}));
  CHECK(Topology::of(ElementType::Tetrahedron).is_in_master({0.5, 0.25, 0.25}));
  CHECK_FALSE(Topology::of(ElementType::Pyramid).is_in_master({0.9, 0.0, 0.5}));
  CHECK(Topology::of(ElementType::Point).is_in_master({}));
  CHECK_THROWS_AS(Topology::of(ElementType::Line).is_in_master({0.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("corner shape functions interpolate and sum to one") {
  std::mt19937 rng(77);
  for (auto t : kAllTypes) {
    const auto& topo = Topology::of(t);
    for (int i = 0; i < topo.node_count(); ++i) {
      auto n = shape_values(t, topo.corner(i));
      for (int j = 0; j < topo.node_count(); ++j)
        CHECK(n[static_cast<std::size_t>(j)] ==
              Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
    }
    for (int rep = 0; rep < 50; ++rep) {
      auto x = random_in_master(topo, rng);
      auto n = shape_values(t, x);
      double sum = 0;
      for (double v : n) {
        sum += v;
        CHECK(v >= -1e-12);
      }
      CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("describe emits one line per side") {
  auto text = Topology::of(ElementType::Triangle).describe();
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
  CHECK(text.find("6 2 Triangle 0 1 2") != std::string::npos);
}

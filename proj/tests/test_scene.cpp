#include <doctest.h>

#include "support.hpp"
#include "vizcomp/error.hpp"
#include "vizcomp/io.hpp"

using namespace vizcomp;

namespace {

constexpr double kTol = 1e-9;

Obb unit_box(Vec3 center, Eigen::Quaterniond q = Eigen::Quaterniond::Identity()) {
  return {center, q.toRotationMatrix(), Vec3::Ones()};
}

Manifest demo_manifest(const std::string& name) {
  return load_manifest(test::read_text(std::string(VIZCOMP_SOURCE_DIR) + "/demos/" + name + ".manifest.json"));
}

}  // namespace

TEST_CASE("body boxes follow the pose") {
  auto v = test::view("v", ChartKind::Scatterplot, "t", Vec3::Zero());
  const Obb a = obb_of(v, Part::body());
  CHECK(a.center.isZero());
  CHECK(a.halfExtents.isApprox(Vec3(0.5, 0.4, 0.01)));

  v.pose.scale = 2.0;
  CHECK(obb_of(v, Part::body()).halfExtents.isApprox(Vec3(1.0, 0.8, 0.02)));

  v.pose.scale = 1.0;
  v.pose.rotation = Eigen::AngleAxisd(EIGEN_PI / 2, Vec3::UnitY());
  v.pose.position = Vec3(1, 2, 3);
  const Obb r = obb_of(v, Part::body());
  // Every corner of the local panel, carried through the pose by hand, lands on a box corner.
  for (int i = 0; i < 8; ++i) {
    const Vec3 local((i & 1 ? 0.5 : -0.5), (i & 2 ? 0.4 : -0.4), (i & 4 ? 0.01 : -0.01));
    const Vec3 world = Vec3(1, 2, 3) + Vec3(local.z(), local.y(), -local.x());
    bool found = false;
    for (int k = 0; k < 8; ++k) found = found || (r.corner(k) - world).norm() < kTol;
    CHECK(found);
  }
}

TEST_CASE("parts outside the chart are rejected") {
  const auto map = test::view("m", ChartKind::Map, "t", Vec3::Zero());
  CHECK_THROWS_AS(obb_of(map, Part::pcp_axis(0)), Error);
  CHECK_THROWS_AS(obb_of(map, Part::handle_x()), Error);
  auto pcp = test::view("p", ChartKind::Pcp, "t", Vec3::Zero());
  pcp.encodings.axes = {"a", "b", "c"};
  CHECK_NOTHROW(obb_of(pcp, Part::pcp_axis(2)));
  CHECK_THROWS_AS(obb_of(pcp, Part::pcp_axis(3)), Error);
  CHECK_THROWS_AS(obb_of(pcp, Part::element("x")), Error);
}

TEST_CASE("part names round-trip") {
  for (const auto& p : {Part::body(), Part::handle_x(), Part::handle_y(), Part::pcp_axis(4), Part::element("GA"),
                        Part{Part::Kind::AxisX, 0, {}}, Part{Part::Kind::AxisY, 0, {}}}) {
    CHECK(Part::parse(p.to_string()) == p);
  }
  CHECK_FALSE(Part::parse("pcp-axis:x"));
  CHECK_FALSE(Part::parse("wheel"));
}

TEST_CASE("collision examples") {
  CHECK(collide(unit_box(Vec3::Zero()), unit_box(Vec3::Zero())));
  CHECK_FALSE(collide(unit_box(Vec3::Zero()), unit_box(Vec3(3, 0, 0))));
  CHECK(collide(unit_box(Vec3::Zero()), unit_box(Vec3(2, 0, 0))));  // touching faces

  const Eigen::Quaterniond q45(Eigen::AngleAxisd(EIGEN_PI / 4, Vec3::UnitZ()));
  for (double factor : {0.7, 1.05, 1.2}) {
    const Obb a = unit_box(Vec3::Zero());
    const Obb b = unit_box(Vec3(factor * std::sqrt(2.0), 0, 0), q45);
    CHECK(collide(a, b) == test::sampled_overlap(a, b, 40));
  }
}

TEST_CASE("separating-axis test agrees with the overlap margin and sampling oracles") {
  std::mt19937 rng(99);
  int overlapping = 0, separated = 0;
  for (int n = 0; n < 400; ++n) {
    const auto [a, b] = test::random_obb_pair(rng);
    const double margin = test::overlap_margin(a, b);
    if (std::abs(margin) <= 1e-6) continue;
    const bool expected = margin > 0;
    REQUIRE(collide(a, b) == expected);
    (expected ? overlapping : separated)++;
    // A ball of radius > 0.09 inside both boxes always holds a sample point.
    if (margin > 0.09 || margin < 0) CHECK(test::sampled_overlap(a, b) == expected);
  }
  CHECK(overlapping > 50);
  CHECK(separated > 50);
}

TEST_CASE("gap and angle by formula") {
  auto a = test::view("a", ChartKind::Scatterplot, "t", Vec3::Zero(), Vec3(0.3, 0.4, 0.0001));
  auto b = test::view("b", ChartKind::Scatterplot, "t", Vec3(1.2, 0, 0), Vec3(0.3, 0.4, 0.0001));
  CHECK(gap_distance(a, b) == doctest::Approx(1.2 - 2 * std::sqrt(0.09 + 0.16 + 1e-8)).epsilon(1e-12));
  b.pose.position = a.pose.position;
  CHECK(gap_distance(a, b) < 0);

  std::mt19937 rng(3);
  for (int n = 0; n < 100; ++n) {
    a.pose.rotation = test::random_rotation(rng);
    b.pose.rotation = test::random_rotation(rng);
    const double angle = orientation_angle(a, b);
    CHECK(angle >= 0.0);
    CHECK(angle <= 90.0 + 1e-12);
    CHECK(angle == doctest::Approx(orientation_angle(b, a)).epsilon(1e-12));
    const double c = std::abs((a.pose.rotation * Vec3::UnitZ()).dot(b.pose.rotation * Vec3::UnitZ()));
    CHECK(angle == doctest::Approx(std::acos(std::min(1.0, c)) * 180.0 / EIGEN_PI).epsilon(1e-6));
  }
  b.pose.rotation = a.pose.rotation * Eigen::AngleAxisd(EIGEN_PI, Vec3::UnitX());
  CHECK(orientation_angle(a, b) == doctest::Approx(0.0));  // back-to-back panels count as parallel
}

TEST_CASE("pcp axes default to even spacing") {
  auto pcp = test::view("p", ChartKind::Pcp, "t", Vec3::Zero(), Vec3(0.6, 0.4, 0.01));
  pcp.encodings.axes = {"a", "b", "c", "d"};
  const auto xs = pcp_axis_positions(pcp);
  REQUIRE(xs.size() == 4);
  CHECK(xs[0] == doctest::Approx(-0.6));
  CHECK(xs[3] == doctest::Approx(0.6));
  CHECK(default_pcp_gap(pcp) == doctest::Approx(0.4));
  pcp.axisPositions = {-0.6, -0.5, 0.5, 0.6};
  CHECK(pcp_axis_positions(pcp) == pcp.axisPositions);
}

TEST_CASE("visible items honour the row subset and domain windows") {
  const auto t = test::table("t", "id", {test::cat("id"), test::num("x"), test::num("y")},
                             {{{"id", std::string("a")}, {"x", 1.0}, {"y", 5.0}},
                              {{"id", std::string("b")}, {"x", 2.0}, {"y", 6.0}},
                              {{"id", std::string("c")}, {"x", 3.0}, {"y", 7.0}}});
  auto v = test::view("v", ChartKind::Scatterplot, "t", Vec3::Zero());
  v.encodings.channels = {{"x", "x"}, {"y", "y"}};
  CHECK(visible_items(v, t) == std::vector<std::string>{"a", "b", "c"});
  v.encodings.xDomain = Interval{1.5, 3.0};
  CHECK(visible_items(v, t) == std::vector<std::string>{"b", "c"});
  v.rows = {"c", "a"};
  CHECK(visible_items(v, t) == std::vector<std::string>{"c"});
  CHECK(chart_layout(v, t).marks.size() == 1);
}

TEST_CASE("induced relations on the demo scenes") {
  for (const char* name : {"integrated", "superimposed", "overloaded", "nested", "juxtaposed"}) {
    const auto m = demo_manifest(name);
    const Catalog catalog(m.tables, m.relationships);
    const auto rel = induced_relations(m.views, catalog, 0.0, std::nullopt);
    const std::size_t n = m.views.size();
    CHECK(rel.pairs.size() == n * (n - 1) / 2);
    for (const auto& p : rel.pairs) {
      CHECK(p.first < p.second);
      CHECK(p.scaleRatio >= 1.0);
      const auto& a = *std::find_if(m.views.begin(), m.views.end(), [&](const auto& v) { return v.id == p.first; });
      const auto& b = *std::find_if(m.views.begin(), m.views.end(), [&](const auto& v) { return v.id == p.second; });
      CHECK(p.colliding == collide(obb_of(a, Part::body()), obb_of(b, Part::body())));
      CHECK(p.gap == doctest::Approx(gap_distance(b, a)));
    }
  }
}

TEST_CASE("velocity is the finite difference since the snapshot") {
  const auto m = demo_manifest("integrated");
  const Catalog catalog(m.tables, m.relationships);
  PoseSnapshot prev{1.0, {}};
  for (const auto& v : m.views) prev.positions[v.id] = v.pose.position - Vec3(0.1, 0, 0);
  const auto rel = induced_relations(m.views, catalog, 1.5, prev);
  for (const auto& v : m.views) CHECK(rel.velocity.at(v.id).isApprox(Vec3(0.2, 0, 0)));
  const auto still = induced_relations(m.views, catalog, 1.5, std::nullopt);
  for (const auto& v : m.views) CHECK(still.velocity.at(v.id).isZero());
}

TEST_CASE("induced relations are invariant under rigid motion of the scene") {
  std::mt19937 rng(5);
  int colliding = 0, embedded = 0;
  for (const char* name : {"superimposed", "overloaded", "nested", "integrated"}) {
    const auto m = demo_manifest(name);
    const Catalog catalog(m.tables, m.relationships);
    for (int trial = 0; trial < 20; ++trial) {
      // Scramble the layout so that some pairs collide and some clients sit in elements.
      auto views = m.views;
      const auto host = std::max_element(views.begin(), views.end(), [](const auto& x, const auto& y) {
        return bounding_radius(x) < bounding_radius(y);
      });
      const Pose base = host->pose;
      // Tight clusters collide and embed; loose ones keep a positive gap.
      const double reach = trial % 4 < 2 ? 0.35 : 1.5;
      std::uniform_real_distribution<double> jitter(-reach, reach), depth(-0.005 * reach, 0.005 * reach);
      for (auto& v : views) {
        if (v.id == host->id) continue;
        v.pose.rotation = base.rotation;
        v.pose.position = base.apply(Vec3(jitter(rng), jitter(rng), depth(rng)));
      }
      const auto before = induced_relations(views, catalog, 0.0, std::nullopt);

      const bool upright = trial % 2 == 0;  // yaw-only motions also keep world y
      Rigid g = test::random_rigid(rng);
      if (upright) g.rotation = Eigen::AngleAxisd(std::uniform_real_distribution<double>(0, 6.3)(rng), Vec3::UnitY());
      auto moved = views;
      for (auto& v : moved) v.pose = g(v.pose);
      const auto after = induced_relations(moved, catalog, 0.0, std::nullopt);

      REQUIRE(before.pairs.size() == after.pairs.size());
      for (std::size_t i = 0; i < before.pairs.size(); ++i) {
        const auto& x = before.pairs[i];
        const auto& y = after.pairs[i];
        CHECK(std::abs(x.gap - y.gap) <= 1e-6);
        CHECK(std::abs(x.orientationAngle - y.orientationAngle) <= 1e-6);
        CHECK(std::abs(x.scaleRatio - y.scaleRatio) <= 1e-6);
        CHECK(x.colliding == y.colliding);
        colliding += x.colliding;
        embedded += x.firstEmbeddedIn.has_value() || x.secondEmbeddedIn.has_value();
        CHECK(x.firstEmbeddedIn == y.firstEmbeddedIn);
        CHECK(x.secondEmbeddedIn == y.secondEmbeddedIn);
        if (upright) CHECK(std::abs(x.verticalOffset - y.verticalOffset) <= 1e-6);
      }
    }
  }
  CHECK(colliding > 0);
  CHECK(embedded > 0);
}

#include <doctest.h>

#include "fuzz.hpp"
#include "support.hpp"
#include "vizcomp/error.hpp"
#include "vizcomp/io.hpp"

using namespace vizcomp;
using Kind = InteractionEvent::Kind;

namespace {

SessionState demo_session(const std::string& name) {
  return make_session(load_manifest(test::read_text(std::string(VIZCOMP_SOURCE_DIR) + "/demos/" + name + ".manifest.json")));
}

InteractionEvent grab(double t, Hand h, std::string view, Part part = Part::body()) {
  return {t, Kind::Grab, h, Target{std::move(view), std::move(part)}, std::nullopt};
}
InteractionEvent move(double t, Hand h, Pose pose) { return {t, Kind::Move, h, std::nullopt, pose}; }
InteractionEvent move(double t, Hand h, Vec3 pos) { return move(t, h, Pose{pos, Eigen::Quaterniond::Identity(), 1.0}); }
InteractionEvent release(double t, Hand h) { return {t, Kind::Release, h, std::nullopt, std::nullopt}; }

ErrorCode code_of(const SessionState& s, const InteractionEvent& e) {
  try {
    step(s, e);
  } catch (const Error& err) {
    return err.code();
  }
  FAIL("event was accepted");
  return ErrorCode::ParseError;
}

/// Left-hand position that puts the body center of an unrotated view at `center`.
Vec3 left_grip_for(const ViewSpec& v, const Vec3& center) { return center - Vec3(v.halfExtents.x() * v.pose.scale, 0, 0); }

int count_composed(const SessionState& s) {
  return s.lastCommand && std::holds_alternative<ComposeCommand>(*s.lastCommand) ? 1 : 0;
}

}  // namespace

TEST_CASE("a fresh session is idle") {
  const auto s = demo_session("integrated");
  CHECK(s.views.size() == 2);
  CHECK(s.views[0].id < s.views[1].id);
  CHECK_FALSE(s.hand(Hand::Left));
  CHECK_FALSE(s.hand(Hand::Right));
  CHECK(s.composites.empty());
  CHECK(s.log == 0);
  CHECK(s.relations.pairs.size() == 1);
}

TEST_CASE("malformed events are refused") {
  const auto s = demo_session("integrated");
  CHECK(code_of(s, release(0, Hand::Left)) == ErrorCode::InvalidEvent);
  CHECK(code_of(s, move(0, Hand::Left, Vec3::Zero())) == ErrorCode::InvalidEvent);
  CHECK(code_of(s, grab(0, Hand::Left, "ghost")) == ErrorCode::InvalidEvent);
  CHECK(code_of(s, grab(0, Hand::Left, "bars", Part::pcp_axis(0))) == ErrorCode::InvalidEvent);
  CHECK(code_of(s, grab(0, Hand::Left, "bars", Part::element("Nope"))) == ErrorCode::InvalidEvent);

  const auto held = step(s, grab(1.0, Hand::Left, "bars"));
  CHECK(code_of(held, grab(1.1, Hand::Left, "line")) == ErrorCode::InvalidEvent);
  CHECK(code_of(held, {0.5, Kind::Tick, Hand::Left, std::nullopt, std::nullopt}) == ErrorCode::InvalidEvent);
  Pose bad;
  bad.rotation.coeffs() << 0, 0, 0, 2;
  CHECK(code_of(held, move(1.2, Hand::Left, bad)) == ErrorCode::InvalidEvent);
}

TEST_CASE("step leaves its input untouched") {
  const auto s = demo_session("integrated");
  const auto views = s.views;
  const auto next = step(step(s, grab(0, Hand::Left, "line")), move(0.1, Hand::Left, Vec3(0, 0, 0)));
  CHECK(s.views == views);
  CHECK(next.log == 2);
  CHECK_FALSE(next.views == views);
}

TEST_CASE("a grabbed body follows the hand rigidly") {
  auto s = demo_session("integrated");
  const ViewSpec line = *s.find_view("line");
  s = step(s, grab(0, Hand::Right, "line"));
  const Pose g = s.hand(Hand::Right)->grab;
  // Right hands grip the right edge.
  CHECK(g.position.isApprox(line.pose.apply(Vec3(line.halfExtents.x(), 0, 0))));

  const Eigen::Quaterniond q(Eigen::AngleAxisd(0.7, Vec3(0.2, 1, 0.3).normalized()));
  const Vec3 p(0.3, 1.0, -0.2);
  s = step(s, move(0.1, Hand::Right, Pose{p, q, 1.0}));
  const ViewSpec& now = *s.find_view("line");
  // The grip point stays under the hand and the panel turns with it.
  CHECK(now.pose.apply(Vec3(line.halfExtents.x(), 0, 0)).isApprox(p, 1e-12));
  CHECK(now.pose.rotation.angularDistance(q) < 1e-12);
  CHECK(now.pose.scale == line.pose.scale);
}

TEST_CASE("two hands on one body rotate and scale it") {
  auto s = demo_session("integrated");
  const ViewSpec bars = *s.find_view("bars");
  s = step(s, grab(0, Hand::Left, "bars"));
  s = step(s, grab(0.1, Hand::Right, "bars"));
  const Vec3 l0 = s.hand(Hand::Left)->grab.position;
  const Vec3 r0 = s.hand(Hand::Right)->grab.position;
  const Vec3 mid = (l0 + r0) / 2;
  // Spread the hands to twice their distance along the same line.
  s = step(s, move(0.2, Hand::Left, mid + (l0 - mid) * 2));
  s = step(s, move(0.3, Hand::Right, mid + (r0 - mid) * 2));
  const ViewSpec& now = *s.find_view("bars");
  CHECK(now.pose.scale == doctest::Approx(2 * bars.pose.scale));
  CHECK(now.pose.position.isApprox(bars.pose.position, 1e-12));
  CHECK(now.pose.rotation.angularDistance(bars.pose.rotation) < 1e-9);
}

TEST_CASE("latch gate makes below the link distance and breaks above the break distance") {
  const Thresholds th;
  CHECK(hysteresis_gate(false, th.linkDistance - 1e-9, th));
  CHECK_FALSE(hysteresis_gate(false, th.linkDistance, th));
  CHECK(hysteresis_gate(true, th.link_break(), th));
  CHECK_FALSE(hysteresis_gate(true, th.link_break() + 1e-9, th));
  CHECK(hysteresis_gate(true, th.linkDistance + 0.01, th));
}

TEST_CASE("bringing two related views close and releasing links them") {
  auto s = demo_session("integrated");
  const ViewSpec bars = *s.find_view("bars");
  const ViewSpec line = *s.find_view("line");
  const double span = bounding_radius(bars) + bounding_radius(line);
  const Vec3 near = bars.pose.position + Vec3(span + 0.1, 0, 0);
  s = step(s, grab(0, Hand::Left, "line"));
  s = step(s, move(0.1, Hand::Left, left_grip_for(line, near)));
  CHECK(s.find_view("line")->pose.position.isApprox(near));
  CHECK(s.latched.count({"bars", "line"}) == 1);
  REQUIRE(!s.preview.empty());
  CHECK(s.preview.front().type == CompositeType::Integrated);
  CHECK(s.preview.front().admissible);
  CHECK(s.composites.empty());  // nothing commits before release

  s = step(s, release(0.2, Hand::Left));
  REQUIRE(s.lastCommand);
  const auto& spec = std::get<ComposeCommand>(*s.lastCommand).spec;
  CHECK(spec.type == CompositeType::Integrated);
  CHECK(spec.id == "c1");
  CHECK(s.composites.size() == 1);

  // Pull the line away past the break distance: release decomposes.
  s = step(s, grab(0.3, Hand::Left, "line"));
  s = step(s, move(0.4, Hand::Left, left_grip_for(line, near + Vec3(1.0, 0, 0))));
  s = step(s, release(0.5, Hand::Left));
  REQUIRE(s.lastCommand);
  const auto& d = std::get<DecomposeCommand>(*s.lastCommand);
  CHECK(d.compositeId == "c1");
  CHECK(d.restored.size() == 2);
  CHECK(s.composites.empty());
}

TEST_CASE("gap oscillation around the link distance latches once and commits once") {
  auto s = demo_session("integrated");
  const ViewSpec bars = *s.find_view("bars");
  const ViewSpec line = *s.find_view("line");
  const double span = bounding_radius(bars) + bounding_radius(line);
  const double tau = s.thresholds->linkDistance;
  int transitions = 0, commits = 0;
  bool latched = false;
  double t = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double gap = tau + (i % 2 == 0 ? -0.01 : 0.01);
    s = step(s, grab(t += 0.01, Hand::Left, "line"));
    s = step(s, move(t += 0.01, Hand::Left, left_grip_for(line, bars.pose.position + Vec3(span + gap, 0, 0))));
    const bool now = s.latched.count({"bars", "line"}) > 0;
    transitions += now != latched;
    latched = now;
    s = step(s, release(t += 0.01, Hand::Left));
    commits += count_composed(s);
  }
  CHECK(transitions == 1);
  CHECK(commits == 1);
  CHECK(s.composites.size() == 1);
}

TEST_CASE("unrelated views only juxtapose") {
  auto s = demo_session("integrated");
  // Rebuild the scene with tables that share nothing.
  auto manifest = load_manifest(test::read_text(std::string(VIZCOMP_SOURCE_DIR) + "/demos/integrated.manifest.json"));
  for (auto& row : manifest.tables[1].rows) row["name"] = "x" + std::get<std::string>(row["name"]);
  for (auto& row : manifest.tables[1].rows) row["calories"] = 1000 + std::get<double>(row["calories"]);
  s = make_session(manifest);
  REQUIRE(s.catalog->relationship("sugar", "energy").kind == RelationshipKind::None);
  const ViewSpec bars = *s.find_view("bars");
  const ViewSpec line = *s.find_view("line");
  const Vec3 near = bars.pose.position + Vec3(bounding_radius(bars) + bounding_radius(line) + 0.1, 0, 0);
  s = step(s, grab(0, Hand::Left, "line"));
  s = step(s, move(0.1, Hand::Left, left_grip_for(line, near)));
  for (const auto& c : s.preview) {
    if (c.type != CompositeType::Juxtaposed) CHECK_FALSE(c.admissible);
  }
  s = step(s, release(0.2, Hand::Left));
  REQUIRE(s.lastCommand);
  CHECK(std::get<ComposeCommand>(*s.lastCommand).spec.type == CompositeType::Juxtaposed);
}

TEST_CASE("candidates list admissible matches first, by precedence") {
  auto s = demo_session("nested");
  s = step(s, grab(0, Hand::Left, "stack", Part::element("p3")));
  s = step(s, move(0.1, Hand::Left, Vec3(0.0, 1.2, -0.6)));
  const auto preview = candidates(s);
  REQUIRE(!preview.empty());
  for (std::size_t i = 0; i < preview.size(); ++i) {
    CHECK(preview[i].rank == static_cast<int>(i));
    if (i > 0) CHECK((preview[i - 1].admissible || !preview[i].admissible));
  }
  CHECK(preview.front().type == CompositeType::Nested);
  CHECK(preview.front().constituents == std::vector<std::string>{"graph", "stack#p3"});
  CHECK(preview.front().context == "p3");
}

TEST_CASE("pulling a bar out of a chart extracts a mini chart") {
  auto s = demo_session("nested");
  const ViewSpec stack = *s.find_view("stack");
  s = step(s, grab(0, Hand::Left, "stack", Part::element("p3")));
  const Vec3 g = s.hand(Hand::Left)->grab.position;
  s = step(s, move(0.1, Hand::Left, g + Vec3(0, 0, s.thresholds->pullDistance * 0.5)));
  CHECK(s.find_view("stack#p3") == nullptr);
  s = step(s, move(0.2, Hand::Left, g + Vec3(0, 0, s.thresholds->pullDistance * 1.5)));
  REQUIRE(s.find_view("stack#p3") != nullptr);
  CHECK(s.hand(Hand::Left)->target.view == "stack#p3");
  CHECK(*s.find_view("stack") == stack);  // the source chart is untouched
  // Dropped in empty space, the uncommitted mini chart goes away.
  s = step(s, move(0.3, Hand::Left, g + Vec3(0, 1.5, 1.5)));
  s = step(s, release(0.4, Hand::Left));
  CHECK(s.find_view("stack#p3") == nullptr);
  CHECK_FALSE(s.lastCommand);
}

TEST_CASE("pcp axes stay ordered and spreading opens a region") {
  auto s = demo_session("overloaded");
  const ViewSpec pcp = *s.find_view("pcp");
  const auto xs0 = pcp_axis_positions(pcp);
  s = step(s, grab(0, Hand::Left, "pcp", Part::pcp_axis(1)));
  // Dragging far past the neighbour clamps just short of it.
  s = step(s, move(0.1, Hand::Left, s.hand(Hand::Left)->grab.position + Vec3(2.0, 0, 0)));
  auto xs = pcp_axis_positions(*s.find_view("pcp"));
  CHECK(xs[1] < xs[2]);
  CHECK(xs[2] - xs[1] == doctest::Approx(1e-3 * pcp.halfExtents.x()));
  CHECK(std::is_sorted(xs.begin(), xs.end()));
  s = step(s, move(0.2, Hand::Left, s.hand(Hand::Left)->grab.position));
  CHECK(pcp_axis_positions(*s.find_view("pcp")) == xs0);

  s = step(s, grab(0.3, Hand::Right, "pcp", Part::pcp_axis(2)));
  s = step(s, move(0.4, Hand::Left, s.hand(Hand::Left)->grab.position + Vec3(-0.15, 0, 0)));
  s = step(s, move(0.5, Hand::Right, s.hand(Hand::Right)->grab.position + Vec3(0.15, 0, 0)));
  CHECK(s.activeRegions.count({"pcp", 1}) == 1);
  CHECK(s.find_view("pcp.sppc1") != nullptr);
  // Closing again before anything was overloaded removes the spawned scatterplot.
  s = step(s, move(0.6, Hand::Right, s.hand(Hand::Right)->grab.position));
  s = step(s, move(0.7, Hand::Left, s.hand(Hand::Left)->grab.position));
  CHECK(s.activeRegions.empty());
  CHECK(s.find_view("pcp.sppc1") == nullptr);
}

TEST_CASE("handle drags partition and retracting the handle dissolves the grid") {
  auto s = demo_session("juxtaposed");
  const ViewSpec v = *s.find_view("scatter");
  const double len = axis_length(v, AxisName::Y);
  s = step(s, grab(0, Hand::Left, "scatter", Part::handle_y()));
  const Vec3 g = s.hand(Hand::Left)->grab.position;
  s = step(s, move(0.1, Hand::Left, g + Vec3(0, 1.1 * len, 0)));
  s = step(s, release(0.2, Hand::Left));
  REQUIRE(s.lastCommand);
  const auto& spec = std::get<ComposeCommand>(*s.lastCommand).spec;
  CHECK(std::get<JuxtaposeLayout>(spec.payload).rows == 3);
  CHECK(std::get<JuxtaposeLayout>(spec.payload).mode == JuxtaposeMode::Partition);

  // Same handle again: the drag continues from where it stopped.
  s = step(s, grab(0.3, Hand::Left, "scatter", Part::handle_y()));
  s = step(s, move(0.4, Hand::Left, s.hand(Hand::Left)->grab.position + Vec3(0, -1.1 * len, 0)));
  s = step(s, release(0.5, Hand::Left));
  REQUIRE(s.lastCommand);
  CHECK(std::get<DecomposeCommand>(*s.lastCommand).compositeId == spec.id);
  CHECK(s.composites.empty());
}

TEST_CASE("both handles of one view held together expand instead of partition") {
  auto s = demo_session("juxtaposed");
  const ViewSpec v = *s.find_view("scatter");
  s = step(s, grab(0, Hand::Left, "scatter", Part::handle_x()));
  s = step(s, grab(0.1, Hand::Right, "scatter", Part::handle_y()));
  s = step(s, move(0.2, Hand::Left, s.hand(Hand::Left)->grab.position + Vec3(1.2 * axis_length(v, AxisName::X), 0, 0)));
  s = step(s, move(0.3, Hand::Right, s.hand(Hand::Right)->grab.position + Vec3(0, 1.2 * axis_length(v, AxisName::Y), 0)));
  s = step(s, release(0.4, Hand::Left));
  REQUIRE(s.lastCommand);
  const auto& layout = std::get<JuxtaposeLayout>(std::get<ComposeCommand>(*s.lastCommand).spec.payload);
  CHECK(layout.mode == JuxtaposeMode::Expansion);
  CHECK(layout.cols == 2);
  CHECK(layout.rows == 2);
  s = step(s, release(0.5, Hand::Right));
  CHECK_FALSE(s.lastCommand);  // the pair fired once
}

TEST_CASE("random gestures never commit an inadmissible composite") {
  const auto report = test::run_admissibility_fuzz(77, 1500);
  for (const auto& f : report.failures) MESSAGE(f);
  CHECK(report.failures.empty());
  CHECK(report.violations == 0);
  CHECK(report.commits > 100);
  // The sequences reach every relationship kind and several composite types.
  CHECK(report.byKind.size() == 4);
  CHECK(report.byType.size() >= 3);
}

// Acceptance runner: one PASS/FAIL line per criterion. Every tolerance,
// sample count and time limit is fixed below; nothing is read from the
// environment. Exit status is 0 only when every criterion passes.

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <thread>

#include "fuzz.hpp"
#include "support.hpp"
#include "vizcomp/cli.hpp"
#include "vizcomp/compose.hpp"
#include "vizcomp/server.hpp"

using namespace vizcomp;

namespace {

constexpr double kGeometryTolerance = 1e-6;
constexpr double kBoundaryBand = 1e-6;
constexpr double kOscillation = 0.01;
constexpr int kOscillationSteps = 100;
constexpr int kInferencePairs = 1000;
constexpr int kFuzzSequences = 10000;
constexpr int kObbPairs = 1000;
constexpr int kEquivarianceTrials = 25;

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  const char* name;
  double seconds;  // wall-clock limit, 0 for none
  std::function<Outcome()> run;
};

Manifest bundled(std::string_view name) { return load_manifest(demo_fixture(name)->manifest); }
std::vector<InteractionEvent> bundled_trace(std::string_view name) { return load_trace(demo_fixture(name)->trace); }

Outcome matrix_exactness() {
  using K = RelationshipKind;
  using T = CompositeType;
  // Rows: none, item-item, item-group, item-dimension. Columns: J, I, S, O, N.
  const bool expected[4][5] = {
      {true, false, false, false, false},
      {true, true, true, true, true},
      {true, true, true, false, true},
      {true, true, true, true, false},
  };
  const K kinds[4] = {K::None, K::ItemItem, K::ItemGroup, K::ItemDimension};
  const T types[5] = {T::Juxtaposed, T::Integrated, T::Superimposed, T::Overloaded, T::Nested};
  int matching = 0;
  for (int k = 0; k < 4; ++k) {
    for (int t = 0; t < 5; ++t) matching += is_admissible(kinds[k], types[t]) == expected[k][t];
  }
  return {matching == 20, std::to_string(matching) + "/20 cells"};
}

Outcome five_demos() {
  std::string detail;
  bool pass = true;
  for (auto name : kDemoCases) {
    const auto m = bundled(name);
    const auto problem = check_demo(name, m, replay(m, bundled_trace(name)));
    if (!problem.empty()) {
      pass = false;
      detail += std::string(name) + ": " + problem + "; ";
    }
  }
  return {pass, pass ? "5/5 cases committed and checked" : detail};
}

Outcome inference_oracle() {
  std::mt19937 rng(1000);
  int agree = 0;
  int kinds[4] = {0, 0, 0, 0};
  for (int n = 0; n < kInferencePairs; ++n) {
    const auto a = test::random_table(rng, "ta");
    const auto b = test::random_table(rng, "tb");
    const auto got = infer_relationship(a, b);
    const auto want = test::oracle_relationship(a, b);
    ++kinds[static_cast<int>(want.kind)];
    bool same = got.kind == want.kind;
    if (same && want.kind != RelationshipKind::None) {
      const auto& ka = got.tableA == "ta" ? got.aKey : got.bKey;
      const auto& kb = got.tableA == "ta" ? got.bKey : got.aKey;
      same = got.tableA == want.itemTable && ka == want.aColumn && kb == want.bColumn;
    }
    agree += same;
  }
  char detail[160];
  std::snprintf(detail, sizeof detail, "%d/%d agree (none %d, item-item %d, item-group %d, item-dimension %d)", agree,
                kInferencePairs, kinds[0], kinds[1], kinds[2], kinds[3]);
  return {agree == kInferencePairs, detail};
}

Outcome determinism() {
  int identical = 0;
  for (auto name : kDemoCases) {
    const auto m = bundled(name);
    const auto events = bundled_trace(name);
    identical += save_composites(replay(m, events).committed) == save_composites(replay(m, events).committed);
  }
  return {identical == 5, std::to_string(identical) + "/5 demos byte-identical"};
}

Outcome admissibility_fuzz() {
  const auto r = test::run_admissibility_fuzz(20261016, kFuzzSequences);
  std::string detail = std::to_string(r.sequences) + " sequences, " + std::to_string(r.events) + " events, " +
                       std::to_string(r.commits) + " commits, " + std::to_string(r.violations) + " violations";
  if (!r.failures.empty()) detail += ", first failure: " + r.failures.front();
  return {r.sequences == kFuzzSequences && r.violations == 0 && r.failures.empty() && r.commits > 0, detail};
}

Outcome hysteresis() {
  using Kind = InteractionEvent::Kind;
  auto s = make_session(bundled("integrated"));
  const ViewSpec bars = *s.find_view("bars");
  const ViewSpec line = *s.find_view("line");
  const double span = bounding_radius(bars) + bounding_radius(line);
  const double tau = s.thresholds->linkDistance;
  int transitions = 0, commits = 0;
  bool latched = false;
  double t = 0.0;
  for (int i = 0; i < kOscillationSteps; ++i) {
    const double gap = tau + (i % 2 == 0 ? -kOscillation : kOscillation);
    const Vec3 center = bars.pose.position + Vec3(span + gap, 0, 0);
    const Vec3 grip = center - Vec3(line.halfExtents.x() * line.pose.scale, 0, 0);
    s = step(s, {t += 0.01, Kind::Grab, Hand::Left, Target{"line", Part::body()}, std::nullopt});
    s = step(s, {t += 0.01, Kind::Move, Hand::Left, std::nullopt, Pose{grip, Eigen::Quaterniond::Identity(), 1.0}});
    const bool now = s.latched.count({"bars", "line"}) > 0;
    transitions += now != latched;
    latched = now;
    s = step(s, {t += 0.01, Kind::Release, Hand::Left, std::nullopt, std::nullopt});
    if (s.lastCommand) {
      const auto* c = std::get_if<ComposeCommand>(&*s.lastCommand);
      commits += c != nullptr && c->spec.type == CompositeType::Integrated;
    }
  }
  return {transitions <= 1 && commits <= 1,
          std::to_string(transitions) + " latch transitions, " + std::to_string(commits) + " integrated commits"};
}

bool same_views(std::vector<ViewSpec> a, std::vector<ViewSpec> b) {
  auto by_id = [](const ViewSpec& x, const ViewSpec& y) { return x.id < y.id; };
  std::sort(a.begin(), a.end(), by_id);
  std::sort(b.begin(), b.end(), by_id);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].table != b[i].table || !(a[i].encodings == b[i].encodings)) return false;
  }
  return true;
}

Outcome round_trip() {
  const Thresholds th;
  std::vector<std::pair<CompositeSpec, DecomposeTrigger>> cases;
  auto view = [](const Manifest& m, std::string_view id) {
    return *std::find_if(m.views.begin(), m.views.end(), [&](const ViewSpec& v) { return v.id == id; });
  };
  {
    const auto m = bundled("integrated");
    const Catalog c(m.tables, m.relationships);
    const auto a = view(m, "bars"), b = view(m, "line");
    cases.push_back({compose_integrated(a, b, c.relationship(a.table, b.table), c), PulledApart{"line", 1.0}});
  }
  {
    const auto m = bundled("superimposed");
    const Catalog c(m.tables, m.relationships);
    const auto a = view(m, "map"), b = view(m, "bars");
    cases.push_back({compose_superimposed(a, b, c.relationship(a.table, b.table), c), ElementLifted{"GA", 0.5}});
  }
  {
    const auto m = bundled("overloaded");
    const Catalog c(m.tables, m.relationships);
    auto pcp = view(m, "pcp");
    pcp.axisPositions = {-0.6, -0.35, 0.35, 0.6};
    const auto spread = spread_pcp_axes(pcp, 1, 0.7, m.thresholds);
    if (!spread.active) return {false, "pcp spread did not open a region"};
    const auto& scatter = *spread.scatter;
    cases.push_back({compose_overloaded(pcp, scatter, 1, true, c.relationship(pcp.table, scatter.table), c),
                     AxesClosed{0.3, 0.4}});
  }
  {
    const auto m = bundled("nested");
    const Catalog c(m.tables, m.relationships);
    const auto a = view(m, "graph"), b = view(m, "stack");
    cases.push_back({compose_nested(a, b, c.relationship(a.table, b.table), c, "p3"), DraggedOut{"p3", 0.5, true}});
  }
  {
    const auto m = bundled("juxtaposed");
    const Catalog c(m.tables, m.relationships);
    const auto v = view(m, "scatter");
    cases.push_back({*partition_axis(v, c.table(v.table), AxisName::Y, 0.8, th), HandleRetracted{1, 1}});
  }
  std::set<CompositeType> restored_types;
  std::string detail;
  for (const auto& [spec, trigger] : cases) {
    const auto restored = decompose(spec, trigger, th);
    std::set<std::string> ids(spec.constituents.begin(), spec.constituents.end());
    std::set<std::string> back;
    for (const auto& v : restored) back.insert(v.id);
    if (same_views(restored, spec.sources) && back == ids) {
      restored_types.insert(spec.type);
    } else {
      detail += std::string(to_string(spec.type)) + " differs; ";
    }
  }
  return {restored_types.size() == 5, detail.empty() ? "5/5 composite types restored" : detail};
}

Outcome geometry() {
  std::mt19937 rng(727);
  double worst = 0.0;
  int mismatched = 0, pairs = 0, colliding = 0, embedded = 0, apart = 0;
  for (const char* name : {"superimposed", "overloaded", "nested", "integrated"}) {
    const auto m = bundled(name);
    const Catalog catalog(m.tables, m.relationships);
    for (int trial = 0; trial < kEquivarianceTrials; ++trial) {
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
      // Vertical offset is measured along world y, so only yaw motions preserve it.
      const bool upright = trial % 2 == 0;
      Rigid g = test::random_rigid(rng);
      if (upright) g.rotation = Eigen::AngleAxisd(std::uniform_real_distribution<double>(0, 6.3)(rng), Vec3::UnitY());
      auto moved = views;
      for (auto& v : moved) v.pose = g(v.pose);
      const auto after = induced_relations(moved, catalog, 0.0, std::nullopt);
      if (before.pairs.size() != after.pairs.size()) return {false, "pair count changed under rigid motion"};
      for (std::size_t i = 0; i < before.pairs.size(); ++i) {
        const auto& x = before.pairs[i];
        const auto& y = after.pairs[i];
        ++pairs;
        worst = std::max({worst, std::abs(x.gap - y.gap), std::abs(x.orientationAngle - y.orientationAngle),
                          std::abs(x.scaleRatio - y.scaleRatio)});
        if (upright) worst = std::max(worst, std::abs(x.verticalOffset - y.verticalOffset));
        mismatched += x.colliding != y.colliding || x.firstEmbeddedIn != y.firstEmbeddedIn ||
                      x.secondEmbeddedIn != y.secondEmbeddedIn;
        colliding += x.colliding;
        apart += x.gap > 0.01;
        embedded += x.firstEmbeddedIn.has_value() || x.secondEmbeddedIn.has_value();
      }
    }
  }

  int decided = 0, sat_agree = 0, sampled = 0, sample_agree = 0;
  for (int n = 0; n < kObbPairs; ++n) {
    const auto [a, b] = test::random_obb_pair(rng);
    const double margin = test::overlap_margin(a, b);
    if (std::abs(margin) <= kBoundaryBand) continue;
    const bool expected = margin > 0;
    ++decided;
    sat_agree += collide(a, b) == expected;
    // The sampling grid is a sound witness for separated pairs and for
    // overlaps deep enough to contain a grid point.
    if (margin > 0.09 || margin < 0) {
      ++sampled;
      sample_agree += test::sampled_overlap(a, b) == expected;
    }
  }

  char detail[256];
  std::snprintf(detail, sizeof detail,
                "equivariance max dev %.2e over %d pairs (%d colliding, %d apart, %d embedded, %d flag flips); "
                "SAT %d/%d outside band, sampling %d/%d",
                worst, pairs, colliding, apart, embedded, mismatched, sat_agree, decided, sample_agree, sampled);
  const bool pass = worst <= kGeometryTolerance && mismatched == 0 && colliding > 0 && apart > 0 && embedded > 0 &&
                    sat_agree == decided && sample_agree == sampled && decided > kObbPairs * 9 / 10;
  return {pass, detail};
}

Outcome socket_equivalence() {
  namespace beast = boost::beast;
  namespace net = boost::asio;
  SessionServer server(0);
  std::thread serving([&] { server.run(); });
  Json committed = Json::array();
  std::string error;
  try {
    net::io_context ioc;
    net::ip::tcp::resolver resolver(ioc);
    beast::websocket::stream<net::ip::tcp::socket> ws(ioc);
    net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
    ws.handshake("127.0.0.1", "/session");
    ws.text(true);
    ProtocolSession mirror("mirror");  // predicts how many frames each message yields
    auto exchange = [&](const Json& message) {
      ws.write(net::buffer(message.dump()));
      for (std::size_t i = mirror.handle_text(message.dump()).size(); i > 0; --i) {
        beast::flat_buffer buffer;
        ws.read(buffer);
        const auto reply = Json::parse(beast::buffers_to_string(buffer.data()));
        if (reply["kind"] == "error") throw std::runtime_error(reply["message"].get<std::string>());
        if (reply["kind"] == "committed") committed.push_back(reply["composite"]);
      }
    };
    exchange({{"kind", "hello"}, {"protocolVersion", kProtocolVersion}});
    exchange({{"kind", "load"}, {"manifest", Json::parse(demo_fixture("integrated")->manifest)}});
    for (const auto& e : bundled_trace("integrated")) exchange({{"kind", "event"}, {"event", to_json(e)}});
    ws.close(beast::websocket::close_code::normal);
  } catch (const std::exception& e) {
    error = e.what();
  }
  server.stop();
  serving.join();
  if (!error.empty()) return {false, error};
  const auto cli = save_composites(replay(bundled("integrated"), bundled_trace("integrated")).committed);
  const bool same = canonical(committed) == cli;
  return {same && !committed.empty(),
          std::to_string(committed.size()) + " committed over the socket, " + (same ? "bytes match" : "bytes differ")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"matrix exactness", 1.0, matrix_exactness},
      {"five demo reproductions", 5.0, five_demos},
      {"inference oracle", 10.0, inference_oracle},
      {"determinism", 0.0, determinism},
      {"admissibility fuzz", 60.0, admissibility_fuzz},
      {"hysteresis", 0.0, hysteresis},
      {"round-trip", 0.0, round_trip},
      {"geometry properties", 30.0, geometry},
      {"socket/CLI equivalence (secondary)", 0.0, socket_equivalence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.seconds > 0 && elapsed >= c.seconds) {
      o.pass = false;
      o.detail += "; over the time limit";
    }
    failed += !o.pass;
    char timing[64];
    if (c.seconds > 0) {
      std::snprintf(timing, sizeof timing, "%.2fs < %.0fs", elapsed, c.seconds);
    } else {
      std::snprintf(timing, sizeof timing, "%.2fs", elapsed);
    }
    std::printf("%s  %-36s %s [%s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), timing);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

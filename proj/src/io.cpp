#include "vizcomp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <set>

#include "vizcomp/error.hpp"

namespace vizcomp {

namespace {

std::string at(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string at(const std::string& path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

[[noreturn]] void fail(const std::string& path, const std::string& message) { throw ValidationError(path, message); }

void expect_object(const Json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(at(path, key), "unknown field");
  }
}

const Json& required(const Json& j, std::string_view key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(at(path, key), "missing field");
  return *it;
}

const Json* optional_field(const Json& j, std::string_view key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

std::vector<std::string> strings(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(text(j[i], at(path, i)));
  return out;
}

std::vector<double> numbers(const Json& j, const std::string& path, std::size_t size = 0) {
  array(j, path);
  if (size != 0 && j.size() != size) fail(path, "expected " + std::to_string(size) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at(path, i)));
  return out;
}

Vec3 vec3(const Json& j, const std::string& path) {
  const auto v = numbers(j, path, 3);
  return {v[0], v[1], v[2]};
}

Vec2 vec2(const Json& j, const std::string& path) {
  const auto v = numbers(j, path, 2);
  return {v[0], v[1]};
}

Interval interval(const Json& j, const std::string& path) {
  const auto v = numbers(j, path, 2);
  if (v[0] > v[1]) fail(path, "interval bounds are reversed");
  return {v[0], v[1]};
}

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json vec_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }
Json interval_json(const Interval& i) { return Json::array({i.lo, i.hi}); }

Value cell(const Json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return number(j, path);
  fail(path, "cell must be text or a number");
}

DataTable table_from_json(const Json& j, const std::string& path) {
  expect_object(j, path, {"name", "key", "columns", "rows"});
  DataTable t;
  t.name = text(required(j, "name", path), at(path, "name"));
  t.key = text(required(j, "key", path), at(path, "key"));
  const auto cpath = at(path, "columns");
  const Json& columns = array(required(j, "columns", path), cpath);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto p = at(cpath, i);
    expect_object(columns[i], p, {"name", "kind"});
    Column c;
    c.name = text(required(columns[i], "name", p), at(p, "name"));
    const auto kind = text(required(columns[i], "kind", p), at(p, "kind"));
    if (kind == "categorical") {
      c.kind = ColumnKind::Categorical;
    } else if (kind == "quantitative") {
      c.kind = ColumnKind::Quantitative;
    } else {
      fail(at(p, "kind"), "expected categorical or quantitative");
    }
    t.columns.push_back(std::move(c));
  }
  const auto rpath = at(path, "rows");
  const Json& rows = array(required(j, "rows", path), rpath);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto p = at(rpath, i);
    if (!rows[i].is_object()) fail(p, "expected an object");
    Row row;
    for (const auto& [key, value] : rows[i].items()) row[key] = cell(value, at(p, key));
    t.rows.push_back(std::move(row));
  }
  const auto violations = validate_table(t);
  if (!violations.empty()) fail(path, violations.front().kind + " (" + violations.front().detail + ")");
  return t;
}

Encodings encodings_from_json(const Json& j, const std::string& path) {
  expect_object(j, path,
                {"x", "y", "value", "label", "stack", "axes", "xDomain", "yDomain", "regions", "nodes", "edges",
                 "nodeRadius"});
  Encodings e;
  for (const char* channel : {"x", "y", "value", "label"}) {
    if (const auto* v = optional_field(j, channel)) e.channels[channel] = text(*v, at(path, channel));
  }
  if (const auto* v = optional_field(j, "stack")) e.stack = strings(*v, at(path, "stack"));
  if (const auto* v = optional_field(j, "axes")) e.axes = strings(*v, at(path, "axes"));
  if (const auto* v = optional_field(j, "xDomain")) e.xDomain = interval(*v, at(path, "xDomain"));
  if (const auto* v = optional_field(j, "yDomain")) e.yDomain = interval(*v, at(path, "yDomain"));
  if (const auto* v = optional_field(j, "regions")) {
    const auto rp = at(path, "regions");
    for (std::size_t i = 0; i < array(*v, rp).size(); ++i) {
      const auto p = at(rp, i);
      expect_object((*v)[i], p, {"key", "polygon"});
      Region r;
      r.key = text(required((*v)[i], "key", p), at(p, "key"));
      const auto pp = at(p, "polygon");
      const Json& poly = array(required((*v)[i], "polygon", p), pp);
      if (poly.size() < 3) fail(pp, "a polygon needs at least 3 vertices");
      for (std::size_t k = 0; k < poly.size(); ++k) r.polygon.push_back(vec2(poly[k], at(pp, k)));
      e.regions.push_back(std::move(r));
    }
  }
  if (const auto* v = optional_field(j, "nodes")) {
    const auto np = at(path, "nodes");
    for (std::size_t i = 0; i < array(*v, np).size(); ++i) {
      const auto p = at(np, i);
      expect_object((*v)[i], p, {"key", "pos"});
      e.nodes.push_back({text(required((*v)[i], "key", p), at(p, "key")),
                         vec2(required((*v)[i], "pos", p), at(p, "pos"))});
    }
  }
  if (const auto* v = optional_field(j, "edges")) {
    const auto ep = at(path, "edges");
    for (std::size_t i = 0; i < array(*v, ep).size(); ++i) {
      const auto pair = strings((*v)[i], at(ep, i));
      if (pair.size() != 2) fail(at(ep, i), "an edge has two endpoints");
      e.edges.emplace_back(pair[0], pair[1]);
    }
  }
  if (const auto* v = optional_field(j, "nodeRadius")) {
    e.nodeRadius = number(*v, at(path, "nodeRadius"));
    if (*e.nodeRadius <= 0) fail(at(path, "nodeRadius"), "must be positive");
  }
  return e;
}

Json encodings_json(const Encodings& e) {
  Json j = Json::object();
  for (const auto& [k, v] : e.channels) j[k] = v;
  if (!e.stack.empty()) j["stack"] = e.stack;
  if (!e.axes.empty()) j["axes"] = e.axes;
  if (e.xDomain) j["xDomain"] = interval_json(*e.xDomain);
  if (e.yDomain) j["yDomain"] = interval_json(*e.yDomain);
  if (!e.regions.empty()) {
    Json regions = Json::array();
    for (const auto& r : e.regions) {
      Json poly = Json::array();
      for (const auto& p : r.polygon) poly.push_back(vec_json(p));
      regions.push_back({{"key", r.key}, {"polygon", poly}});
    }
    j["regions"] = regions;
  }
  if (!e.nodes.empty()) {
    Json nodes = Json::array();
    for (const auto& n : e.nodes) nodes.push_back({{"key", n.key}, {"pos", vec_json(n.pos)}});
    j["nodes"] = nodes;
  }
  if (!e.edges.empty()) {
    Json edges = Json::array();
    for (const auto& [a, b] : e.edges) edges.push_back(Json::array({a, b}));
    j["edges"] = edges;
  }
  if (e.nodeRadius) j["nodeRadius"] = *e.nodeRadius;
  return j;
}

Relationship relationship_from_json(const Json& j, const std::string& path) {
  expect_object(j, path, {"a", "b", "kind", "aKey", "bKey"});
  Relationship r;
  r.source = RelationshipSource::Declared;
  r.tableA = text(required(j, "a", path), at(path, "a"));
  r.tableB = text(required(j, "b", path), at(path, "b"));
  const auto kind = text(required(j, "kind", path), at(path, "kind"));
  const auto parsed = parse_relationship_kind(kind);
  if (!parsed) fail(at(path, "kind"), "unknown relationship kind " + kind);
  r.kind = *parsed;
  if (r.kind != RelationshipKind::None) {
    r.aKey = text(required(j, "aKey", path), at(path, "aKey"));
    r.bKey = text(required(j, "bKey", path), at(path, "bKey"));
  } else if (j.contains("aKey") || j.contains("bKey")) {
    fail(path, "a none relationship records no key columns");
  }
  return r;
}

void validate_view(const ViewSpec& v, const DataTable& t, const std::string& path) {
  const auto need = [&](const std::string& column, const std::string& p) {
    if (t.column(column) == nullptr) fail(p, "table " + t.name + " has no column " + column);
  };
  for (const auto& [k, c] : v.encodings.channels) need(c, at(at(path, "encodings"), k));
  for (std::size_t i = 0; i < v.encodings.stack.size(); ++i) {
    need(v.encodings.stack[i], at(at(at(path, "encodings"), "stack"), i));
  }
  for (std::size_t i = 0; i < v.encodings.axes.size(); ++i) {
    need(v.encodings.axes[i], at(at(at(path, "encodings"), "axes"), i));
  }
  if (v.chart == ChartKind::Pcp && v.encodings.axes.size() < 2) fail(at(path, "encodings.axes"), "a pcp needs two axes");
  for (std::size_t i = 0; i < v.rows.size(); ++i) {
    if (t.find_row(v.rows[i]) == nullptr) fail(at(at(path, "rows"), i), "unknown row " + v.rows[i]);
  }
  if (!v.axisPositions.empty()) {
    if (v.axisPositions.size() != v.encodings.axes.size()) fail(at(path, "axisPositions"), "one position per axis");
    if (!std::is_sorted(v.axisPositions.begin(), v.axisPositions.end())) {
      fail(at(path, "axisPositions"), "positions must increase");
    }
  }
}

Thresholds thresholds_from_json(const Json& j, const std::string& path, Thresholds t) {
  expect_object(j, path,
                {"linkDistance", "hysteresis", "juxtaposeDistance", "superimposeAngle", "hostClientRatio",
                 "spreadFactor", "pullDistance", "binStepFraction"});
  const std::pair<const char*, double*> fields[] = {
      {"linkDistance", &t.linkDistance},       {"hysteresis", &t.hysteresis},
      {"juxtaposeDistance", &t.juxtaposeDistance}, {"superimposeAngle", &t.superimposeAngle},
      {"hostClientRatio", &t.hostClientRatio}, {"spreadFactor", &t.spreadFactor},
      {"pullDistance", &t.pullDistance},       {"binStepFraction", &t.binStepFraction}};
  for (const auto& [name, field] : fields) {
    if (const auto* v = optional_field(j, name)) *field = number(*v, at(path, name));
  }
  if (!t.valid()) fail(path, "thresholds must be positive with hysteresis above 1");
  return t;
}

Json parse_json(std::string_view bytes, std::size_t line = 0) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), line, e.byte);
  }
}

void write_number(std::string& out, double v) {
  if (v == 0.0) v = 0.0;  // folds -0
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  out += buffer;
}

void write_canonical(std::string& out, const Json& j) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {  // object_t is a std::map: keys arrive sorted
        if (!first) out += ',';
        first = false;
        out += Json(k).dump();
        out += ':';
        write_canonical(out, v);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write_canonical(out, j[i]);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

Json transform_json(const ElementTransform& t) {
  return {{"element", t.element}, {"start", to_json(t.start)}, {"target", to_json(t.target)}};
}

Json panel_json(const Panel& p) {
  Json j = {{"view", to_json(p.view)}, {"col", p.col}, {"row", p.row}, {"items", p.items}};
  if (p.xInterval) j["xInterval"] = interval_json(*p.xInterval);
  if (p.yInterval) j["yInterval"] = interval_json(*p.yInterval);
  return j;
}

struct PayloadJson {
  Json operator()(const LinkSet& l) const {
    Json links = Json::array();
    for (const auto& s : l.segments) {
      links.push_back({{"aView", s.aView},
                       {"aItem", s.aItem},
                       {"bView", s.bView},
                       {"bItem", s.bItem},
                       {"endpointA", vec_json(s.endpointA)},
                       {"endpointB", vec_json(s.endpointB)}});
    }
    return links;
  }
  Json operator()(const AnchorMap& a) const {
    Json entries = Json::array();
    for (const auto& e : a.entries) {
      entries.push_back({{"clientItem", e.clientItem}, {"hostRegion", e.hostRegion}, {"target", to_json(e.target)}});
    }
    return {{"host", a.host}, {"client", a.client}, {"entries", entries}};
  }
  Json operator()(const NestPlacementSet& n) const {
    Json placements = Json::array();
    for (const auto& p : n.placements) {
      placements.push_back({{"hostElement", p.hostElement},
                            {"clientRow", p.clientRow},
                            {"target", to_json(p.target)},
                            {"scaleFactor", p.scaleFactor}});
    }
    return {{"host", n.host}, {"client", n.client}, {"placements", placements}};
  }
  Json operator()(const OverloadPlacement& o) const {
    Json points = Json::array();
    for (const auto& p : o.points) points.push_back({{"row", p.row}, {"x", p.x}, {"y", p.y}});
    return {{"pcpView", o.pcpView},
            {"clientView", o.clientView},
            {"axis", o.axis},
            {"region", Json::array({o.region.x0, o.region.y0, o.region.x1, o.region.y1})},
            {"points", points},
            {"hiddenSegments", Json::array({o.hiddenSegments[0], o.hiddenSegments[1]})}};
  }
  Json operator()(const JuxtaposeLayout& l) const {
    Json panels = Json::array();
    for (const auto& p : l.panels) panels.push_back(panel_json(p));
    return {{"mode", std::string(to_string(l.mode))},
            {"source", l.source},
            {"cols", l.cols},
            {"rows", l.rows},
            {"gap", l.gap},
            {"curvature", l.curvature},
            {"dragX", l.dragX},
            {"dragY", l.dragY},
            {"origin", to_json(l.origin)},
            {"panels", panels}};
  }
};

const char* payload_key(const CompositePayload& p) {
  static constexpr const char* kKeys[] = {"links", "anchors", "nests", "overload", "layout"};
  return kKeys[p.index()];
}

Pose pose_of(const Json& j, const std::string& path) { return pose_from_json(j, path); }

CompositePayload payload_from_json(CompositeType type, const Json& j, const std::string& path) {
  switch (type) {
    case CompositeType::Integrated: {
      LinkSet l;
      for (std::size_t i = 0; i < array(j, path).size(); ++i) {
        const auto p = at(path, i);
        const Json& s = j[i];
        expect_object(s, p, {"aView", "aItem", "bView", "bItem", "endpointA", "endpointB"});
        l.segments.push_back({text(required(s, "aView", p), p), text(required(s, "aItem", p), p),
                              text(required(s, "bView", p), p), text(required(s, "bItem", p), p),
                              vec3(required(s, "endpointA", p), at(p, "endpointA")),
                              vec3(required(s, "endpointB", p), at(p, "endpointB"))});
      }
      return l;
    }
    case CompositeType::Superimposed: {
      expect_object(j, path, {"host", "client", "entries"});
      AnchorMap a{text(required(j, "host", path), path), text(required(j, "client", path), path), {}};
      const auto ep = at(path, "entries");
      const Json& entries = array(required(j, "entries", path), ep);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto p = at(ep, i);
        expect_object(entries[i], p, {"clientItem", "hostRegion", "target"});
        a.entries.push_back({text(required(entries[i], "clientItem", p), p),
                             text(required(entries[i], "hostRegion", p), p),
                             pose_of(required(entries[i], "target", p), at(p, "target"))});
      }
      return a;
    }
    case CompositeType::Nested: {
      expect_object(j, path, {"host", "client", "placements"});
      NestPlacementSet n{text(required(j, "host", path), path), text(required(j, "client", path), path), {}};
      const auto pp = at(path, "placements");
      const Json& placements = array(required(j, "placements", path), pp);
      for (std::size_t i = 0; i < placements.size(); ++i) {
        const auto p = at(pp, i);
        expect_object(placements[i], p, {"hostElement", "clientRow", "target", "scaleFactor"});
        n.placements.push_back({text(required(placements[i], "hostElement", p), p),
                                text(required(placements[i], "clientRow", p), p),
                                pose_of(required(placements[i], "target", p), at(p, "target")),
                                number(required(placements[i], "scaleFactor", p), at(p, "scaleFactor"))});
      }
      return n;
    }
    case CompositeType::Overloaded: {
      expect_object(j, path, {"pcpView", "clientView", "axis", "region", "points", "hiddenSegments"});
      OverloadPlacement o;
      o.pcpView = text(required(j, "pcpView", path), path);
      o.clientView = text(required(j, "clientView", path), path);
      o.axis = integer(required(j, "axis", path), at(path, "axis"));
      const auto r = numbers(required(j, "region", path), at(path, "region"), 4);
      o.region = {r[0], r[1], r[2], r[3]};
      const auto ptp = at(path, "points");
      const Json& points = array(required(j, "points", path), ptp);
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto p = at(ptp, i);
        expect_object(points[i], p, {"row", "x", "y"});
        o.points.push_back({text(required(points[i], "row", p), p), number(required(points[i], "x", p), p),
                            number(required(points[i], "y", p), p)});
      }
      const Json& hidden = array(required(j, "hiddenSegments", path), at(path, "hiddenSegments"));
      if (hidden.size() != 2) fail(at(path, "hiddenSegments"), "expected an axis pair");
      o.hiddenSegments = {integer(hidden[0], path), integer(hidden[1], path)};
      return o;
    }
    case CompositeType::Juxtaposed: {
      expect_object(j, path,
                    {"mode", "source", "cols", "rows", "gap", "curvature", "dragX", "dragY", "origin", "panels"});
      JuxtaposeLayout l;
      const auto mode = text(required(j, "mode", path), at(path, "mode"));
      if (mode == "side-by-side") {
        l.mode = JuxtaposeMode::SideBySide;
      } else if (mode == "partition") {
        l.mode = JuxtaposeMode::Partition;
      } else if (mode == "expansion") {
        l.mode = JuxtaposeMode::Expansion;
      } else {
        fail(at(path, "mode"), "unknown layout mode " + mode);
      }
      l.source = text(required(j, "source", path), at(path, "source"));
      l.cols = integer(required(j, "cols", path), at(path, "cols"));
      l.rows = integer(required(j, "rows", path), at(path, "rows"));
      l.gap = number(required(j, "gap", path), at(path, "gap"));
      l.curvature = number(required(j, "curvature", path), at(path, "curvature"));
      l.dragX = number(required(j, "dragX", path), at(path, "dragX"));
      l.dragY = number(required(j, "dragY", path), at(path, "dragY"));
      l.origin = pose_of(required(j, "origin", path), at(path, "origin"));
      const auto pp = at(path, "panels");
      const Json& panels = array(required(j, "panels", path), pp);
      for (std::size_t i = 0; i < panels.size(); ++i) {
        const auto p = at(pp, i);
        expect_object(panels[i], p, {"view", "col", "row", "items", "xInterval", "yInterval"});
        Panel panel;
        panel.view = view_from_json(required(panels[i], "view", p), at(p, "view"));
        panel.col = integer(required(panels[i], "col", p), at(p, "col"));
        panel.row = integer(required(panels[i], "row", p), at(p, "row"));
        panel.items = strings(required(panels[i], "items", p), at(p, "items"));
        if (const auto* v = optional_field(panels[i], "xInterval")) panel.xInterval = interval(*v, at(p, "xInterval"));
        if (const auto* v = optional_field(panels[i], "yInterval")) panel.yInterval = interval(*v, at(p, "yInterval"));
        l.panels.push_back(std::move(panel));
      }
      return l;
    }
  }
  fail(path, "unknown composite type");
}

Json hand_json(const std::optional<HandState>& h) {
  if (!h) return nullptr;
  return {{"view", h->target.view},
          {"part", h->target.part.to_string()},
          {"pose", to_json(h->hand)},
          {"absorbed", h->absorbed},
          {"extracted", h->extracted}};
}

}  // namespace

Json to_json(const Pose& pose) {
  const auto& q = pose.rotation;
  return {{"pos", vec_json(pose.position)}, {"rot", Json::array({q.x(), q.y(), q.z(), q.w()})}, {"scale", pose.scale}};
}

Pose pose_from_json(const Json& j, const std::string& path) {
  expect_object(j, path, {"pos", "rot", "scale"});
  Pose p;
  if (const auto* v = optional_field(j, "pos")) p.position = vec3(*v, at(path, "pos"));
  if (const auto* v = optional_field(j, "rot")) {
    const auto q = numbers(*v, at(path, "rot"), 4);
    p.rotation = Eigen::Quaterniond(q[3], q[0], q[1], q[2]);
    if (std::abs(p.rotation.norm() - 1.0) > 1e-3) fail(at(path, "rot"), "rotation must be a unit quaternion");
    p.rotation.normalize();
  }
  if (const auto* v = optional_field(j, "scale")) {
    p.scale = number(*v, at(path, "scale"));
    if (p.scale <= 0) fail(at(path, "scale"), "scale must be positive");
  }
  return p;
}

Json to_json(const ViewSpec& v) {
  Json j = {{"id", v.id},
            {"chart", std::string(to_string(v.chart))},
            {"table", v.table},
            {"encodings", encodings_json(v.encodings)},
            {"halfExtents", vec_json(v.halfExtents)},
            {"pose", to_json(v.pose)}};
  if (!v.rows.empty()) j["rows"] = v.rows;
  if (!v.axisPositions.empty()) j["axisPositions"] = v.axisPositions;
  return j;
}

ViewSpec view_from_json(const Json& j, const std::string& path) {
  expect_object(j, path, {"id", "chart", "table", "encodings", "halfExtents", "pose", "rows", "axisPositions"});
  ViewSpec v;
  v.id = text(required(j, "id", path), at(path, "id"));
  if (v.id.empty()) fail(at(path, "id"), "id must not be empty");
  const auto chart = text(required(j, "chart", path), at(path, "chart"));
  const auto parsed = parse_chart_kind(chart);
  if (!parsed) fail(at(path, "chart"), "unknown chart " + chart);
  v.chart = *parsed;
  v.table = text(required(j, "table", path), at(path, "table"));
  if (const auto* e = optional_field(j, "encodings")) v.encodings = encodings_from_json(*e, at(path, "encodings"));
  if (const auto* h = optional_field(j, "halfExtents")) {
    v.halfExtents = vec3(*h, at(path, "halfExtents"));
    if ((v.halfExtents.array() <= 0.0).any()) fail(at(path, "halfExtents"), "half extents must be positive");
  }
  if (const auto* p = optional_field(j, "pose")) v.pose = pose_from_json(*p, at(path, "pose"));
  if (const auto* r = optional_field(j, "rows")) v.rows = strings(*r, at(path, "rows"));
  if (const auto* a = optional_field(j, "axisPositions")) v.axisPositions = numbers(*a, at(path, "axisPositions"));
  return v;
}

Json to_json(const Relationship& r) {
  Json j = {{"a", r.tableA},
            {"b", r.tableB},
            {"kind", std::string(to_string(r.kind))},
            {"source", r.source == RelationshipSource::Declared ? "declared" : "inferred"}};
  if (r.kind != RelationshipKind::None) {
    j["aKey"] = r.aKey;
    j["bKey"] = r.bKey;
  }
  return j;
}

Json to_json(const CompositeSpec& spec) {
  Json sources = Json::array();
  for (const auto& v : spec.sources) sources.push_back(to_json(v));
  Json transforms = Json::array();
  for (const auto& t : spec.transforms) transforms.push_back(transform_json(t));
  Json j = {{"id", spec.id},
            {"type", std::string(to_string(spec.type))},
            {"constituents", spec.constituents},
            {"sources", sources},
            {"transforms", transforms}};
  j[payload_key(spec.payload)] = std::visit(PayloadJson{}, spec.payload);
  return j;
}

CompositeSpec composite_from_json(const Json& j, const std::string& path) {
  expect_object(j, path,
                {"id", "type", "constituents", "sources", "transforms", "links", "anchors", "nests", "overload",
                 "layout"});
  CompositeSpec spec;
  spec.id = text(required(j, "id", path), at(path, "id"));
  const auto type = text(required(j, "type", path), at(path, "type"));
  const auto parsed = parse_composite_type(type);
  if (!parsed) fail(at(path, "type"), "unknown composite type " + type);
  spec.type = *parsed;
  spec.constituents = strings(required(j, "constituents", path), at(path, "constituents"));
  const auto sp = at(path, "sources");
  const Json& sources = array(required(j, "sources", path), sp);
  for (std::size_t i = 0; i < sources.size(); ++i) spec.sources.push_back(view_from_json(sources[i], at(sp, i)));
  const auto tp = at(path, "transforms");
  const Json& transforms = array(required(j, "transforms", path), tp);
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    const auto p = at(tp, i);
    expect_object(transforms[i], p, {"element", "start", "target"});
    spec.transforms.push_back({text(required(transforms[i], "element", p), at(p, "element")),
                               pose_from_json(required(transforms[i], "start", p), at(p, "start")),
                               pose_from_json(required(transforms[i], "target", p), at(p, "target"))});
  }
  static constexpr std::pair<CompositeType, const char*> kPayloadKeys[] = {
      {CompositeType::Integrated, "links"},
      {CompositeType::Superimposed, "anchors"},
      {CompositeType::Nested, "nests"},
      {CompositeType::Overloaded, "overload"},
      {CompositeType::Juxtaposed, "layout"}};
  for (const auto& [t, key] : kPayloadKeys) {
    const bool present = j.contains(key);
    if (t == spec.type && !present) fail(at(path, key), "missing field");
    if (t != spec.type && present) fail(at(path, key), "payload does not match type " + type);
    if (present) spec.payload = payload_from_json(t, j[key], at(path, key));
  }
  return spec;
}

Json to_json(const CandidateIntent& c) {
  return {{"type", std::string(to_string(c.type))},
          {"constituents", c.constituents},
          {"context", c.context},
          {"rank", c.rank},
          {"admissible", c.admissible}};
}

Json to_json(const std::vector<CandidateIntent>& candidates) {
  Json out = Json::array();
  for (const auto& c : candidates) out.push_back(to_json(c));
  return out;
}

Json to_json(const InteractionEvent& e) {
  Json j = {{"t", e.t}, {"event", std::string(to_string(e.kind))}};
  if (e.kind != InteractionEvent::Kind::Tick) j["hand"] = std::string(to_string(e.hand));
  if (e.target) j["target"] = {{"view", e.target->view}, {"part", e.target->part.to_string()}};
  if (e.pose) j["pose"] = to_json(*e.pose);
  return j;
}

InteractionEvent event_from_json(const Json& j, const std::string& path) {
  expect_object(j, path, {"t", "event", "hand", "target", "pose"});
  InteractionEvent e;
  e.t = number(required(j, "t", path), at(path, "t"));
  const auto kind = text(required(j, "event", path), at(path, "event"));
  if (kind == "grab") {
    e.kind = InteractionEvent::Kind::Grab;
  } else if (kind == "move") {
    e.kind = InteractionEvent::Kind::Move;
  } else if (kind == "release") {
    e.kind = InteractionEvent::Kind::Release;
  } else if (kind == "tick") {
    e.kind = InteractionEvent::Kind::Tick;
  } else {
    fail(at(path, "event"), "unknown event " + kind);
  }
  if (e.kind != InteractionEvent::Kind::Tick) {
    const auto hand = text(required(j, "hand", path), at(path, "hand"));
    const auto parsed = parse_hand(hand);
    if (!parsed) fail(at(path, "hand"), "expected left or right");
    e.hand = *parsed;
  } else if (j.contains("hand")) {
    fail(at(path, "hand"), "tick events have no hand");
  }
  if (e.kind == InteractionEvent::Kind::Grab) {
    const auto tp = at(path, "target");
    const Json& target = required(j, "target", path);
    expect_object(target, tp, {"view", "part"});
    const auto part_text = text(required(target, "part", tp), at(tp, "part"));
    const auto part = Part::parse(part_text);
    if (!part) fail(at(tp, "part"), "unknown part " + part_text);
    e.target = Target{text(required(target, "view", tp), at(tp, "view")), *part};
  } else if (j.contains("target")) {
    fail(at(path, "target"), "target is only allowed on grab");
  }
  if (e.kind == InteractionEvent::Kind::Move) {
    e.pose = pose_from_json(required(j, "pose", path), at(path, "pose"));
  } else if (j.contains("pose")) {
    fail(at(path, "pose"), "pose is only allowed on move");
  }
  return e;
}

Manifest load_manifest(std::string_view bytes) {
  const Json j = parse_json(bytes);
  expect_object(j, "", {"tables", "relationships", "views", "thresholds"});
  Manifest m;
  const Json& tables = array(required(j, "tables", ""), "tables");
  std::set<std::string> names;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    m.tables.push_back(table_from_json(tables[i], at("tables", i)));
    if (!names.insert(m.tables.back().name).second) fail(at(at("tables", i), "name"), "duplicate table name");
  }
  const auto find = [&](const std::string& name) -> const DataTable* {
    for (const auto& t : m.tables) {
      if (t.name == name) return &t;
    }
    return nullptr;
  };
  if (const auto* rels = optional_field(j, "relationships")) {
    for (std::size_t i = 0; i < array(*rels, "relationships").size(); ++i) {
      const auto p = at("relationships", i);
      auto r = relationship_from_json((*rels)[i], p);
      const auto* a = find(r.tableA);
      const auto* b = find(r.tableB);
      if (a == nullptr) fail(at(p, "a"), "unknown table " + r.tableA);
      if (b == nullptr) fail(at(p, "b"), "unknown table " + r.tableB);
      if (r.kind != RelationshipKind::None) {
        if (a->column(r.aKey) == nullptr) fail(at(p, "aKey"), "table " + a->name + " has no column " + r.aKey);
        if (b->column(r.bKey) == nullptr) fail(at(p, "bKey"), "table " + b->name + " has no column " + r.bKey);
      }
      m.relationships.push_back(std::move(r));
    }
  }
  const Json& views = array(required(j, "views", ""), "views");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const auto p = at("views", i);
    auto v = view_from_json(views[i], p);
    const auto* t = find(v.table);
    if (t == nullptr) fail(at(p, "table"), "unknown table " + v.table);
    validate_view(v, *t, p);
    if (!ids.insert(v.id).second) fail(at(p, "id"), "duplicate view id " + v.id);
    m.views.push_back(std::move(v));
  }
  if (const auto* t = optional_field(j, "thresholds")) m.thresholds = thresholds_from_json(*t, "thresholds", {});
  return m;
}

Thresholds load_thresholds(std::string_view bytes, Thresholds base) {
  return thresholds_from_json(parse_json(bytes), "", base);
}

std::vector<InteractionEvent> load_trace(std::string_view bytes) {
  std::vector<InteractionEvent> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    ++line_no;
    std::string_view line = bytes.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == bytes.size()) break;
      continue;
    }
    const Json j = parse_json(line, line_no);
    InteractionEvent e;
    try {
      e = event_from_json(j, "");
    } catch (const ValidationError& err) {
      throw ParseError("line " + std::to_string(line_no) + ": " + err.what(), line_no);
    }
    if (!out.empty() && e.t < out.back().t) {
      throw OrderError("line " + std::to_string(line_no) + ": time " + std::to_string(e.t) + " precedes " +
                           std::to_string(out.back().t),
                       line_no);
    }
    out.push_back(std::move(e));
    if (end == bytes.size()) break;
  }
  return out;
}

SessionState make_session(const Manifest& m) {
  return make_session(m.tables, m.relationships, m.views, m.thresholds);
}

std::string canonical(const Json& value) {
  std::string out;
  write_canonical(out, value);
  return out;
}

std::string save_composite(const CompositeSpec& spec) { return canonical(to_json(spec)); }

std::string save_composites(const std::vector<CompositeSpec>& specs) {
  Json all = Json::array();
  for (const auto& s : specs) all.push_back(to_json(s));
  return canonical(all);
}

CompositeSpec load_composite(std::string_view bytes) { return composite_from_json(parse_json(bytes), ""); }

Json state_json(const SessionState& s) {
  Json views = Json::array();
  for (const auto& v : s.views) views.push_back(to_json(v));
  Json composites = Json::array();
  for (const auto& c : s.composites) composites.push_back(to_json(c));
  Json regions = Json::array();
  for (const auto& [view, axis] : s.activeRegions) regions.push_back({{"view", view}, {"axis", axis}});
  Json latched = Json::array();
  for (const auto& [a, b] : s.latched) latched.push_back(Json::array({a, b}));
  Json relations = Json::array();
  for (const auto& p : s.relations.pairs) {
    Json r = {{"first", p.first},
              {"second", p.second},
              {"gap", p.gap},
              {"orientationAngle", p.orientationAngle},
              {"scaleRatio", p.scaleRatio},
              {"verticalOffset", p.verticalOffset},
              {"colliding", p.colliding}};
    if (p.firstEmbeddedIn) r["firstEmbeddedIn"] = *p.firstEmbeddedIn;
    if (p.secondEmbeddedIn) r["secondEmbeddedIn"] = *p.secondEmbeddedIn;
    relations.push_back(std::move(r));
  }
  Json velocity = Json::object();
  for (const auto& [id, v] : s.relations.velocity) velocity[id] = vec_json(v);
  return {{"views", views},
          {"composites", composites},
          {"activeRegions", regions},
          {"latched", latched},
          {"hands", {{"left", hand_json(s.hand(Hand::Left))}, {"right", hand_json(s.hand(Hand::Right))}}},
          {"relations", relations},
          {"velocity", velocity},
          {"log", s.log},
          {"t", s.lastT ? Json(*s.lastT) : Json(nullptr)}};
}

}  // namespace vizcomp

#include "vizcomp/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "vizcomp/error.hpp"

namespace vizcomp {

namespace {

constexpr std::array kChartNames{"scatterplot", "barchart", "linechart", "stackedbar", "map", "pcp", "graph"};

double number_of(const Row& row, const std::string& column) {
  const auto& v = row.at(column);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return 0.0;
}

double normalized(double v, double lo, double hi, double degenerate) {
  if (!(hi > lo)) return degenerate;
  return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  double area2 = 0.0;
  Vec2 acc = Vec2::Zero();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    const double cross = p.x() * q.y() - q.x() * p.y();
    area2 += cross;
    acc += (p + q) * cross;
  }
  if (std::abs(area2) < 1e-12) {
    Vec2 mean = Vec2::Zero();
    for (const auto& p : poly) mean += p;
    return poly.empty() ? mean : Vec2(mean / static_cast<double>(poly.size()));
  }
  return acc / (3.0 * area2);
}

double marker_half(const ViewSpec& view) {
  return 0.03 * std::min(view.halfExtents.x(), view.halfExtents.y());
}

double node_radius(const ViewSpec& view) {
  return view.encodings.nodeRadius.value_or(0.1 * std::min(view.halfExtents.x(), view.halfExtents.y()));
}

const DataTable& require_table(const ViewSpec& view, const DataTable& table) {
  if (table.name != view.table) {
    throw Error(ErrorCode::TableMismatch, "view " + view.id + " shows table " + view.table + ", got " + table.name);
  }
  return table;
}

}  // namespace

std::string_view to_string(ChartKind chart) { return kChartNames[static_cast<std::size_t>(chart)]; }

std::optional<ChartKind> parse_chart_kind(std::string_view text) {
  for (std::size_t i = 0; i < kChartNames.size(); ++i) {
    if (text == kChartNames[i]) return static_cast<ChartKind>(i);
  }
  return std::nullopt;
}

const std::string* Encodings::channel(std::string_view name) const {
  auto it = channels.find(std::string(name));
  return it == channels.end() ? nullptr : &it->second;
}

std::string Part::to_string() const {
  switch (kind) {
    case Kind::Body: return "body";
    case Kind::AxisX: return "axis-x";
    case Kind::AxisY: return "axis-y";
    case Kind::AxisHandleX: return "axis-x-handle";
    case Kind::AxisHandleY: return "axis-y-handle";
    case Kind::PcpAxis: return "pcp-axis:" + std::to_string(axis);
    case Kind::Element: return "element:" + item;
  }
  return "?";
}

std::optional<Part> Part::parse(std::string_view text) {
  if (text == "body") return Part::body();
  if (text == "axis-x") return Part{Kind::AxisX, 0, {}};
  if (text == "axis-y") return Part{Kind::AxisY, 0, {}};
  if (text == "axis-x-handle") return Part::handle_x();
  if (text == "axis-y-handle") return Part::handle_y();
  constexpr std::string_view pcp = "pcp-axis:";
  constexpr std::string_view element = "element:";
  if (text.starts_with(pcp)) {
    const auto digits = text.substr(pcp.size());
    int index = -1;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec != std::errc{} || end != digits.data() + digits.size() || index < 0) return std::nullopt;
    return Part::pcp_axis(index);
  }
  if (text.starts_with(element) && text.size() > element.size()) {
    return Part::element(std::string(text.substr(element.size())));
  }
  return std::nullopt;
}

bool has_element_slots(ChartKind chart) {
  switch (chart) {
    case ChartKind::Graph:
    case ChartKind::Map:
    case ChartKind::Barchart:
    case ChartKind::Stackedbar:
    case ChartKind::Scatterplot:
      return true;
    default:
      return false;
  }
}

bool has_cartesian_axes(ChartKind chart) {
  switch (chart) {
    case ChartKind::Scatterplot:
    case ChartKind::Barchart:
    case ChartKind::Linechart:
    case ChartKind::Stackedbar:
      return true;
    default:
      return false;
  }
}

std::vector<std::string> visible_items(const ViewSpec& view, const DataTable& table) {
  require_table(view, table);
  std::set<std::string> subset(view.rows.begin(), view.rows.end());
  std::set<std::string> geometry;
  if (view.chart == ChartKind::Map) {
    for (const auto& r : view.encodings.regions) geometry.insert(r.key);
  } else if (view.chart == ChartKind::Graph) {
    for (const auto& n : view.encodings.nodes) geometry.insert(n.key);
  }
  const auto* x = view.encodings.channel("x");
  const auto* y = view.encodings.channel("y");

  std::vector<std::string> out;
  for (const auto& row : table.rows) {
    auto id = key_string(row.at(table.key));
    if (!subset.empty() && !subset.count(id)) continue;
    if ((view.chart == ChartKind::Map || view.chart == ChartKind::Graph) && !geometry.count(id)) continue;
    if (view.encodings.xDomain && x && !view.encodings.xDomain->contains(number_of(row, *x))) continue;
    if (view.encodings.yDomain && y && !view.encodings.yDomain->contains(number_of(row, *y))) continue;
    out.push_back(std::move(id));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> pcp_axis_positions(const ViewSpec& view) {
  const auto n = view.encodings.axes.size();
  if (view.axisPositions.size() == n) return view.axisPositions;
  std::vector<double> xs(n, 0.0);
  const double hx = view.halfExtents.x();
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = n > 1 ? -hx + static_cast<double>(i) * (2.0 * hx / static_cast<double>(n - 1)) : 0.0;
  }
  return xs;
}

double default_pcp_gap(const ViewSpec& view) {
  const auto n = view.encodings.axes.size();
  return n > 1 ? 2.0 * view.halfExtents.x() / static_cast<double>(n - 1) : 0.0;
}

const ItemMark* ChartLayout::find(std::string_view item) const {
  auto it = std::lower_bound(marks.begin(), marks.end(), item,
                             [](const ItemMark& m, std::string_view key) { return m.item < key; });
  return it != marks.end() && it->item == item ? &*it : nullptr;
}

ChartLayout chart_layout(const ViewSpec& view, const DataTable& table) {
  const auto items = visible_items(view, table);
  const double hx = view.halfExtents.x();
  const double hy = view.halfExtents.y();
  const double hz = view.halfExtents.z();
  const double m = marker_half(view);
  const auto n = items.size();

  ChartLayout layout;
  layout.marks.reserve(n);
  std::vector<const Row*> rows;
  rows.reserve(n);
  for (const auto& id : items) rows.push_back(table.find_row(id));

  auto value_range = [&](const std::string& column) {
    Range r;
    for (const auto* row : rows) r.add(number_of(*row, column));
    return r;
  };

  switch (view.chart) {
    case ChartKind::Barchart:
    case ChartKind::Stackedbar: {
      std::vector<double> values(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (view.chart == ChartKind::Barchart) {
          if (const auto* y = view.encodings.channel("y")) values[i] = number_of(*rows[i], *y);
        } else {
          for (const auto& c : view.encodings.stack) values[i] += number_of(*rows[i], c);
        }
      }
      Range r;
      for (double v : values) r.add(v);
      if (view.chart == ChartKind::Barchart && view.encodings.yDomain) {
        r = {view.encodings.yDomain->lo, view.encodings.yDomain->hi};
      }
      const double w = n > 0 ? 2.0 * hx / static_cast<double>(n) : 2.0 * hx;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = -hx + (static_cast<double>(i) + 0.5) * w;
        const double top = -hy + 2.0 * hy * normalized(values[i], r.lo, r.hi, 1.0);
        const double half_h = std::max((top + hy) / 2.0, 0.01 * hy);
        layout.marks.push_back({items[i], Vec3(x, top, 0.0), Vec3(x, -hy + half_h, 0.0),
                                Vec3(0.4 * w, half_h, hz)});
      }
      break;
    }
    case ChartKind::Linechart: {
      const auto* y = view.encodings.channel("y");
      const Range r = y ? value_range(*y) : Range{};
      for (std::size_t i = 0; i < n; ++i) {
        const double x = n > 1 ? -hx + static_cast<double>(i) * 2.0 * hx / static_cast<double>(n - 1) : 0.0;
        const double v = y ? normalized(number_of(*rows[i], *y), r.lo, r.hi, 0.5) : 0.5;
        const Vec3 p(x, hy * (2.0 * v - 1.0), 0.0);
        layout.marks.push_back({items[i], p, p, Vec3(m, m, hz)});
      }
      break;
    }
    case ChartKind::Scatterplot: {
      const auto* xc = view.encodings.channel("x");
      const auto* yc = view.encodings.channel("y");
      Range rx = xc ? value_range(*xc) : Range{};
      Range ry = yc ? value_range(*yc) : Range{};
      if (view.encodings.xDomain) rx = {view.encodings.xDomain->lo, view.encodings.xDomain->hi};
      if (view.encodings.yDomain) ry = {view.encodings.yDomain->lo, view.encodings.yDomain->hi};
      for (std::size_t i = 0; i < n; ++i) {
        const double nx = xc ? normalized(number_of(*rows[i], *xc), rx.lo, rx.hi, 0.5) : 0.5;
        const double ny = yc ? normalized(number_of(*rows[i], *yc), ry.lo, ry.hi, 0.5) : 0.5;
        const Vec3 p(-hx + 2.0 * hx * nx, -hy + 2.0 * hy * ny, 0.0);
        layout.marks.push_back({items[i], p, p, Vec3(m, m, hz)});
      }
      break;
    }
    case ChartKind::Map: {
      for (const auto& region : view.encodings.regions) {
        if (!std::binary_search(items.begin(), items.end(), region.key)) continue;
        const Vec2 c = polygon_centroid(region.polygon);
        Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
        Vec2 hi = -lo;
        for (const auto& p : region.polygon) {
          lo = lo.cwiseMin(p);
          hi = hi.cwiseMax(p);
        }
        const Vec2 mid = (lo + hi) / 2.0;
        const Vec2 half = ((hi - lo) / 2.0).cwiseMax(Vec2::Constant(m));
        layout.marks.push_back({region.key, Vec3(c.x(), c.y(), 0.0), Vec3(mid.x(), mid.y(), 0.0),
                                Vec3(half.x(), half.y(), hz)});
      }
      break;
    }
    case ChartKind::Graph: {
      const double r = node_radius(view);
      for (const auto& node : view.encodings.nodes) {
        if (!std::binary_search(items.begin(), items.end(), node.key)) continue;
        const Vec3 p(node.pos.x(), node.pos.y(), 0.0);
        layout.marks.push_back({node.key, p, p, Vec3(r, r, r)});
      }
      break;
    }
    case ChartKind::Pcp: {
      const auto xs = pcp_axis_positions(view);
      const auto& axes = view.encodings.axes;
      std::vector<Range> ranges;
      for (const auto& a : axes) ranges.push_back(value_range(a));
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<Vec3> pts;
        for (std::size_t k = 0; k < axes.size(); ++k) {
          const double v = normalized(number_of(*rows[i], axes[k]), ranges[k].lo, ranges[k].hi, 0.5);
          pts.emplace_back(xs[k], hy * (2.0 * v - 1.0), 0.0);
        }
        double total = 0.0;
        for (std::size_t k = 1; k < pts.size(); ++k) total += (pts[k] - pts[k - 1]).norm();
        Vec3 mid = pts.empty() ? Vec3::Zero() : pts.front();
        double walked = 0.0;
        for (std::size_t k = 1; k < pts.size(); ++k) {
          const double len = (pts[k] - pts[k - 1]).norm();
          if (walked + len >= total / 2.0 && len > 0.0) {
            mid = pts[k - 1] + (pts[k] - pts[k - 1]) * ((total / 2.0 - walked) / len);
            break;
          }
          walked += len;
        }
        Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
        Vec3 hi = -lo;
        for (const auto& p : pts) {
          lo = lo.cwiseMin(p);
          hi = hi.cwiseMax(p);
        }
        if (pts.empty()) lo = hi = Vec3::Zero();
        Vec3 half = ((hi - lo) / 2.0).cwiseMax(Vec3::Constant(m));
        half.z() = hz;
        layout.marks.push_back({items[i], mid, (lo + hi) / 2.0, half});
      }
      break;
    }
  }
  std::sort(layout.marks.begin(), layout.marks.end(),
            [](const ItemMark& a, const ItemMark& b) { return a.item < b.item; });
  return layout;
}

Obb obb_of(const ViewSpec& view, const Part& part) {
  const Vec3& h = view.halfExtents;
  const auto unknown = [&] {
    return Error(ErrorCode::UnknownPart, "view " + view.id + " has no part " + part.to_string());
  };
  switch (part.kind) {
    case Part::Kind::Body:
      return Obb::from_local(view.pose, Vec3::Zero(), h);
    case Part::Kind::AxisX:
    case Part::Kind::AxisY:
    case Part::Kind::AxisHandleX:
    case Part::Kind::AxisHandleY: {
      if (!has_cartesian_axes(view.chart)) throw unknown();
      if (part.kind == Part::Kind::AxisX) {
        return Obb::from_local(view.pose, Vec3(0, -h.y(), 0), Vec3(h.x(), 0.01 * h.y(), h.z()));
      }
      if (part.kind == Part::Kind::AxisY) {
        return Obb::from_local(view.pose, Vec3(-h.x(), 0, 0), Vec3(0.01 * h.x(), h.y(), h.z()));
      }
      // Handle cubes are 5% of the axis length on a side.
      if (part.kind == Part::Kind::AxisHandleX) {
        return Obb::from_local(view.pose, Vec3(h.x(), -h.y(), 0), Vec3::Constant(0.05 * h.x()));
      }
      return Obb::from_local(view.pose, Vec3(-h.x(), h.y(), 0), Vec3::Constant(0.05 * h.y()));
    }
    case Part::Kind::PcpAxis: {
      if (view.chart != ChartKind::Pcp) throw unknown();
      const auto xs = pcp_axis_positions(view);
      if (part.axis < 0 || static_cast<std::size_t>(part.axis) >= xs.size()) throw unknown();
      return Obb::from_local(view.pose, Vec3(xs[static_cast<std::size_t>(part.axis)], 0, 0),
                             Vec3(0.01 * h.x(), h.y(), h.z()));
    }
    case Part::Kind::Element:
      throw Error(ErrorCode::UnknownPart, "element parts of view " + view.id + " need its table");
  }
  throw unknown();
}

Obb obb_of(const ViewSpec& view, const Part& part, const DataTable& table) {
  if (part.kind != Part::Kind::Element) return obb_of(view, part);
  const auto layout = chart_layout(view, table);
  const auto* mark = layout.find(part.item);
  if (mark == nullptr) {
    throw Error(ErrorCode::UnknownPart, "view " + view.id + " has no element " + part.item);
  }
  return Obb::from_local(view.pose, mark->boxCenter, mark->boxHalf);
}

double bounding_radius(const ViewSpec& view) { return (view.halfExtents * view.pose.scale).norm(); }

double gap_distance(const ViewSpec& a, const ViewSpec& b) {
  return (a.pose.position - b.pose.position).norm() - (bounding_radius(a) + bounding_radius(b));
}

double orientation_angle(const ViewSpec& a, const ViewSpec& b) {
  return normal_angle_degrees<double>(a.pose.normal(), b.pose.normal());
}

Vec3 anchor_position(const ViewSpec& view, const DataTable& table, std::string_view item) {
  const auto layout = chart_layout(view, table);
  const auto* mark = layout.find(item);
  if (mark == nullptr) {
    throw Error(ErrorCode::UnknownItem, "view " + view.id + " has no item " + std::string(item));
  }
  return view.pose.apply(mark->anchor);
}

const PairRelation* InducedRelations::find(std::string_view a, std::string_view b) const {
  if (b < a) std::swap(a, b);
  for (const auto& p : pairs) {
    if (p.first == a && p.second == b) return &p;
  }
  return nullptr;
}

namespace {

std::optional<std::string> embedding_in_layout(const ViewSpec& client, const ViewSpec& host,
                                               const ChartLayout& layout) {
  if (!has_element_slots(host.chart)) return std::nullopt;
  const Vec3 center = client.pose.position;
  const Obb body = obb_of(client, Part::body());
  std::optional<std::string> best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& mark : layout.marks) {
    const Obb box = Obb::from_local(host.pose, mark.boxCenter, mark.boxHalf);
    if (!box.contains(center, 1e-9) || !collide(box, body)) continue;
    const double d = (box.center - center).norm();
    if (d < best_distance) {
      best_distance = d;
      best = mark.item;
    }
  }
  return best;
}

}  // namespace

std::optional<std::string> embedding_element(const ViewSpec& client, const ViewSpec& host,
                                             const DataTable& host_table) {
  if (!has_element_slots(host.chart)) return std::nullopt;
  return embedding_in_layout(client, host, chart_layout(host, host_table));
}

InducedRelations induced_relations(const std::vector<ViewSpec>& views, const Catalog& catalog,
                                   double now, const std::optional<PoseSnapshot>& previous) {
  std::vector<const ViewSpec*> sorted;
  for (const auto& v : views) sorted.push_back(&v);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->id < b->id; });

  std::map<std::string, ChartLayout> layouts;
  for (const auto* v : sorted) {
    if (has_element_slots(v->chart)) layouts.emplace(v->id, chart_layout(*v, catalog.table(v->table)));
  }

  InducedRelations out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const ViewSpec& a = *sorted[i];
    Vec3 velocity = Vec3::Zero();
    if (previous && now > previous->t) {
      if (auto it = previous->positions.find(a.id); it != previous->positions.end()) {
        velocity = (a.pose.position - it->second) / (now - previous->t);
      }
    }
    out.velocity[a.id] = velocity;

    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const ViewSpec& b = *sorted[j];
      PairRelation rel;
      rel.first = a.id;
      rel.second = b.id;
      rel.gap = gap_distance(a, b);
      rel.orientationAngle = orientation_angle(a, b);
      const double ra = bounding_radius(a);
      const double rb = bounding_radius(b);
      rel.scaleRatio = std::max(ra, rb) / std::min(ra, rb);
      rel.verticalOffset = b.pose.position.y() - a.pose.position.y();
      rel.colliding = collide(obb_of(a, Part::body()), obb_of(b, Part::body()));
      if (rel.colliding) {
        if (auto it = layouts.find(b.id); it != layouts.end()) rel.firstEmbeddedIn = embedding_in_layout(a, b, it->second);
        if (auto it = layouts.find(a.id); it != layouts.end()) rel.secondEmbeddedIn = embedding_in_layout(b, a, it->second);
      }
      out.pairs.push_back(std::move(rel));
    }
  }
  return out;
}

}  // namespace vizcomp

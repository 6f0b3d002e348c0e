#include "vizcomp/compose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "vizcomp/error.hpp"

namespace vizcomp {

namespace {

void require_admissible(const Relationship& rel, CompositeType type) {
  if (!is_admissible(rel.kind, type)) {
    throw Error(ErrorCode::NotAdmissible, std::string(to_string(type)) + " views cannot encode a " +
                                              std::string(to_string(rel.kind)) + " relationship");
  }
}

void require_relates(const Relationship& rel, const ViewSpec& a, const ViewSpec& b) {
  const bool forward = rel.tableA == a.table && rel.tableB == b.table;
  const bool backward = rel.tableA == b.table && rel.tableB == a.table;
  if (!forward && !backward) {
    throw Error(ErrorCode::TableMismatch, "relationship " + rel.tableA + "/" + rel.tableB +
                                              " does not relate views " + a.id + " and " + b.id);
  }
}

void require_pcp(const ViewSpec& pcp, int axis) {
  if (pcp.chart != ChartKind::Pcp) throw Error(ErrorCode::NotPcp, "view " + pcp.id + " is not a pcp");
  const auto n = static_cast<int>(pcp.encodings.axes.size());
  if (axis < 0 || axis >= n - 1) {
    throw Error(ErrorCode::BadAxisIndex,
                "axis " + std::to_string(axis) + " of " + pcp.id + " has no right neighbor");
  }
}

double number_of(const Row& row, const std::string& column) {
  const auto& v = row.at(column);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return 0.0;
}

std::vector<LinkSegment> links_between(const ViewSpec& a, const ViewSpec& b, const Relationship& rel,
                                       const Catalog& catalog) {
  const auto& ta = catalog.table(a.table);
  const auto& tb = catalog.table(b.table);
  const auto la = chart_layout(a, ta);
  const auto lb = chart_layout(b, tb);
  std::vector<LinkSegment> out;
  for (const auto& [ia, ib] : item_pairs(rel, ta, tb)) {
    const auto* ma = la.find(ia);
    const auto* mb = lb.find(ib);
    if (ma == nullptr || mb == nullptr) continue;
    out.push_back({a.id, ia, b.id, ib, a.pose.apply(ma->anchor), b.pose.apply(mb->anchor)});
  }
  return out;
}

Pose element_pose(const ViewSpec& view, const ItemMark& mark) {
  return {view.pose.apply(mark.boxCenter), view.pose.rotation, view.pose.scale};
}

}  // namespace

std::string_view to_string(JuxtaposeMode mode) {
  switch (mode) {
    case JuxtaposeMode::SideBySide: return "side-by-side";
    case JuxtaposeMode::Partition: return "partition";
    case JuxtaposeMode::Expansion: return "expansion";
  }
  return "?";
}

const ElementTransform* CompositeSpec::transform(std::string_view element) const {
  for (const auto& t : transforms) {
    if (t.element == element) return &t;
  }
  return nullptr;
}

CompositeSpec compose_integrated(const ViewSpec& a, const ViewSpec& b, const Relationship& rel,
                                 const Catalog& catalog) {
  require_admissible(rel, CompositeType::Integrated);
  require_relates(rel, a, b);
  CompositeSpec spec;
  spec.type = CompositeType::Integrated;
  spec.constituents = {a.id, b.id};
  spec.sources = {a, b};
  spec.payload = LinkSet{links_between(a, b, rel, catalog)};
  return spec;
}

CompositeSpec join_integrated(const CompositeSpec& group, const ViewSpec& joining,
                              const std::vector<ViewSpec>& members, const Catalog& catalog) {
  if (group.type != CompositeType::Integrated) {
    throw Error(ErrorCode::NotAdmissible, "composite " + group.id + " is not integrated");
  }
  CompositeSpec spec = group;
  auto& links = std::get<LinkSet>(spec.payload).segments;
  bool linked = false;
  for (const auto& member : members) {
    const auto& rel = catalog.relationship(member.table, joining.table);
    if (!is_admissible(rel.kind, CompositeType::Integrated)) continue;
    auto added = links_between(member, joining, rel, catalog);
    links.insert(links.end(), added.begin(), added.end());
    linked = true;
  }
  if (!linked) {
    throw Error(ErrorCode::NotAdmissible, "view " + joining.id + " relates to no member of " + group.id);
  }
  spec.constituents.push_back(joining.id);
  spec.sources.push_back(joining);
  return spec;
}

CompositeSpec compose_juxtaposed(const ViewSpec& a, const ViewSpec& b, const Relationship& rel) {
  require_admissible(rel, CompositeType::Juxtaposed);
  JuxtaposeLayout layout;
  layout.mode = JuxtaposeMode::SideBySide;
  layout.cols = 2;
  layout.gap = gap_distance(a, b);
  layout.origin = a.pose;
  layout.panels = {Panel{a, 0, 0, {}, {}, {}}, Panel{b, 1, 0, {}, {}, {}}};
  CompositeSpec spec;
  spec.type = CompositeType::Juxtaposed;
  spec.constituents = {a.id, b.id};
  spec.sources = {a, b};
  spec.payload = std::move(layout);
  return spec;
}

CompositeSpec compose_superimposed(const ViewSpec& host, const ViewSpec& client, const Relationship& rel,
                                   const Catalog& catalog, const std::optional<Pose>& client_before) {
  require_admissible(rel, CompositeType::Superimposed);
  require_relates(rel, host, client);
  const auto& th = catalog.table(host.table);
  const auto& tc = catalog.table(client.table);
  const auto lh = chart_layout(host, th);
  const auto lc = chart_layout(client, tc);

  std::map<std::string, std::vector<std::string>> hosts_of;
  for (const auto& [ci, hi] : item_pairs(rel, tc, th)) hosts_of[ci].push_back(hi);

  // Marks stand upright: the client's local +y follows the host normal.
  const Eigen::Quaterniond upright =
      host.pose.rotation * Eigen::Quaterniond(Eigen::AngleAxisd(EIGEN_PI / 2, Vec3::UnitX()));

  AnchorMap anchors{host.id, client.id, {}};
  std::vector<std::string> unmatched;
  CompositeSpec spec;
  for (const auto& mark : lc.marks) {
    const ItemMark* target = nullptr;
    std::string region;
    if (auto it = hosts_of.find(mark.item); it != hosts_of.end()) {
      for (const auto& hi : it->second) {
        if ((target = lh.find(hi)) != nullptr) {
          region = hi;
          break;
        }
      }
    }
    if (target == nullptr) {
      unmatched.push_back(mark.item);
      continue;
    }
    const Pose pose{host.pose.apply(target->anchor), upright.normalized(), client.pose.scale};
    anchors.entries.push_back({mark.item, region, pose});
    spec.transforms.push_back({client.id + "/" + mark.item, element_pose(client, mark), pose});
  }
  if (!unmatched.empty()) {
    std::string list;
    for (const auto& u : unmatched) list += (list.empty() ? "" : ", ") + u;
    throw Error(ErrorCode::UnmatchedItems, "client items without a host anchor: " + list);
  }
  spec.transforms.insert(spec.transforms.begin(), {client.id, client_before.value_or(client.pose), client.pose});
  spec.type = CompositeType::Superimposed;
  spec.constituents = {host.id, client.id};
  spec.sources = {host, client};
  spec.payload = std::move(anchors);
  return spec;
}

SpreadResult spread_pcp_axes(const ViewSpec& pcp, int axis, double new_gap, const Thresholds& thresholds) {
  require_pcp(pcp, axis);
  SpreadResult result;
  if (!(new_gap > thresholds.spreadFactor * default_pcp_gap(pcp))) return result;
  result.active = true;

  const auto xs = pcp_axis_positions(pcp);
  const auto i = static_cast<std::size_t>(axis);
  const double hy = pcp.halfExtents.y();
  const double side = 0.35 * hy;
  const double mid = (xs[i] + xs[i + 1]) / 2.0;

  ViewSpec scatter;
  scatter.id = pcp.id + ".sppc" + std::to_string(axis);
  scatter.chart = ChartKind::Scatterplot;
  scatter.table = pcp.table;
  scatter.encodings.channels = {{"x", pcp.encodings.axes[i + 1]}, {"y", pcp.encodings.axes[i]}};
  scatter.rows = pcp.rows;
  scatter.halfExtents = Vec3(side, side, pcp.halfExtents.z());
  scatter.pose = {pcp.pose.apply(Vec3(mid, -hy - 1.5 * side, 0.0)), pcp.pose.rotation, pcp.pose.scale};
  result.scatter = std::move(scatter);
  return result;
}

CompositeSpec compose_overloaded(const ViewSpec& pcp, const ViewSpec& scatter, int axis, bool region_active,
                                 const Relationship& rel, const Catalog& catalog,
                                 const std::optional<Pose>& client_before) {
  require_pcp(pcp, axis);
  if (!region_active) {
    throw Error(ErrorCode::RegionNotActive,
                "region " + std::to_string(axis) + "-" + std::to_string(axis + 1) + " of " + pcp.id + " is not spread");
  }
  require_admissible(rel, CompositeType::Overloaded);
  require_relates(rel, pcp, scatter);

  const auto& table = catalog.table(pcp.table);
  const auto i = static_cast<std::size_t>(axis);
  const auto& left = pcp.encodings.axes[i];
  const auto& right = pcp.encodings.axes[i + 1];
  const auto items = visible_items(pcp, table);

  auto range_of = [&](const std::string& column) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& id : items) {
      const double v = number_of(*table.find_row(id), column);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return std::pair{lo, hi};
  };
  const auto [llo, lhi] = range_of(left);
  const auto [rlo, rhi] = range_of(right);
  auto norm = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.5; };

  OverloadPlacement placement;
  placement.pcpView = pcp.id;
  placement.clientView = scatter.id;
  placement.axis = axis;
  const auto xs = pcp_axis_positions(pcp);
  const double hy = pcp.halfExtents.y();
  placement.region = {xs[i], -hy, xs[i + 1], hy};
  placement.hiddenSegments = {axis, axis + 1};
  for (const auto& id : items) {
    const auto& row = *table.find_row(id);
    placement.points.push_back({id, norm(number_of(row, right), rlo, rhi), norm(number_of(row, left), llo, lhi)});
  }

  const double width = (xs[i + 1] - xs[i]) * pcp.pose.scale;
  const Pose target{pcp.pose.apply(Vec3((xs[i] + xs[i + 1]) / 2.0, 0.0, 0.0)), pcp.pose.rotation,
                    width / (2.0 * scatter.halfExtents.x())};

  CompositeSpec spec;
  spec.type = CompositeType::Overloaded;
  spec.constituents = {pcp.id, scatter.id};
  spec.sources = {pcp, scatter};
  spec.payload = std::move(placement);
  spec.transforms.push_back({scatter.id, client_before.value_or(scatter.pose), target});
  return spec;
}

ViewSpec extract_element(const ViewSpec& view, const DataTable& table, const std::string& item) {
  if (view.chart != ChartKind::Barchart && view.chart != ChartKind::Stackedbar) {
    throw Error(ErrorCode::UnknownPart, "view " + view.id + " is not a bar chart");
  }
  const auto layout = chart_layout(view, table);
  const auto* mark = layout.find(item);
  if (mark == nullptr) throw Error(ErrorCode::UnknownItem, "view " + view.id + " has no item " + item);

  ViewSpec mini = view;
  mini.id = view.id + "#" + item;
  mini.rows = {item};
  mini.halfExtents = Vec3(mark->boxHalf.x(), view.halfExtents.y(), view.halfExtents.z());
  mini.pose.position = view.pose.apply(Vec3(mark->anchor.x(), 0.0, 0.0));
  return mini;
}

CompositeSpec compose_nested(const ViewSpec& host, const ViewSpec& client, const Relationship& rel,
                             const Catalog& catalog, const std::string& seed_element,
                             const std::optional<Pose>& client_before) {
  require_admissible(rel, CompositeType::Nested);
  require_relates(rel, host, client);
  const auto& th = catalog.table(host.table);
  const auto& tc = catalog.table(client.table);
  const auto lh = chart_layout(host, th);
  const auto lc = chart_layout(client, tc);

  std::map<std::string, std::string> row_of;  // host element -> first corresponding client row
  for (const auto& [hi, ci] : item_pairs(rel, th, tc)) {
    if (lh.find(hi) != nullptr) row_of.emplace(hi, ci);
  }
  if (!row_of.count(seed_element)) {
    throw Error(ErrorCode::SeedUnmatched, "host element " + seed_element + " has no corresponding client row");
  }

  const bool bars = client.chart == ChartKind::Barchart || client.chart == ChartKind::Stackedbar;
  NestPlacementSet set{host.id, client.id, {}};
  CompositeSpec spec;
  auto place = [&](const std::string& element, const std::string& row) {
    const auto* mark = lh.find(element);
    // A single-row client is already a mini chart; wider bar charts contribute one bar.
    const auto* own = lc.find(row);
    const Vec3 mini_half =
        bars && client.rows.size() != 1 && own != nullptr ? extract_element(client, tc, row).halfExtents
                                                          : client.halfExtents;
    const double element_size = 2.0 * mark->boxHalf.minCoeff() * host.pose.scale;
    const double factor = kNestInset * element_size / (2.0 * mini_half.norm());
    const Pose target{host.pose.apply(mark->boxCenter), host.pose.rotation, factor};
    set.placements.push_back({element, row, target, factor});
    spec.transforms.push_back({client.id + "/" + row, own ? element_pose(client, *own) : client.pose, target});
  };
  place(seed_element, row_of.at(seed_element));
  for (const auto& [element, row] : row_of) {
    if (element != seed_element) place(element, row);
  }

  spec.transforms.insert(spec.transforms.begin(), {client.id, client_before.value_or(client.pose), client.pose});
  spec.type = CompositeType::Nested;
  spec.constituents = {host.id, client.id};
  spec.sources = {host, client};
  spec.payload = std::move(set);
  return spec;
}

double axis_length(const ViewSpec& view, AxisName axis) {
  const double half = axis == AxisName::X ? view.halfExtents.x() : view.halfExtents.y();
  return 2.0 * half * view.pose.scale;
}

namespace {

const std::string& axis_column(const ViewSpec& view, const DataTable& table, AxisName axis) {
  const char* name = axis == AxisName::X ? "x" : "y";
  const auto* column = has_cartesian_axes(view.chart) ? view.encodings.channel(name) : nullptr;
  const auto* c = column ? table.column(*column) : nullptr;
  if (c == nullptr || c->kind != ColumnKind::Quantitative) {
    throw Error(ErrorCode::NoSuchAxis, "view " + view.id + " has no quantitative " + name + " axis");
  }
  return *column;
}

/// Rows the view draws before any domain window is applied.
std::vector<std::string> source_items(const ViewSpec& view, const DataTable& table) {
  if (!view.rows.empty()) {
    auto rows = view.rows;
    std::sort(rows.begin(), rows.end());
    return rows;
  }
  return table.item_ids();
}

Interval axis_domain(const ViewSpec& view, const DataTable& table, AxisName axis, const std::string& column,
                     const std::vector<std::string>& items) {
  const auto& domain = axis == AxisName::X ? view.encodings.xDomain : view.encodings.yDomain;
  if (domain) return *domain;
  Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& id : items) {
    const double v = number_of(*table.find_row(id), column);
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  if (items.empty()) r = {0.0, 0.0};
  return r;
}

/// Bins along one axis: `edges` has bins + 1 entries; the last bin is closed.
struct AxisBins {
  std::vector<double> edges;

  int count() const { return static_cast<int>(edges.size()) - 1; }

  Interval interval(int k) const {
    return {edges[static_cast<std::size_t>(k)], edges[static_cast<std::size_t>(k) + 1]};
  }

  std::optional<int> bin_of(double v) const {
    if (v < edges.front() || v > edges.back()) return std::nullopt;
    for (int k = 0; k + 1 < count(); ++k) {
      if (v < edges[static_cast<std::size_t>(k) + 1]) return k;
    }
    return count() - 1;
  }
};

AxisBins equal_bins(Interval domain, int n) {
  AxisBins b;
  for (int k = 0; k <= n; ++k) {
    b.edges.push_back(k == n ? domain.hi : domain.lo + (domain.hi - domain.lo) * k / n);
  }
  return b;
}

AxisBins repeated_bins(Interval domain, int n) {
  AxisBins b;
  const double range = domain.hi - domain.lo;
  for (int k = 0; k <= n; ++k) b.edges.push_back(domain.lo + range * k);
  return b;
}

CompositeSpec make_grid(const ViewSpec& view, const DataTable& table, JuxtaposeMode mode,
                        const std::optional<std::string>& x_column, const AxisBins& xb,
                        const std::optional<std::string>& y_column, const AxisBins& yb,
                        const std::vector<std::string>& items, double drag_x, double drag_y) {
  JuxtaposeLayout layout;
  layout.mode = mode;
  layout.source = view.id;
  layout.cols = xb.count();
  layout.rows = yb.count();
  layout.gap = kPanelGap;
  layout.dragX = drag_x;
  layout.dragY = drag_y;
  layout.origin = view.pose;

  const double cell_x = 2.0 * view.halfExtents.x() + kPanelGap / view.pose.scale;
  const double cell_y = 2.0 * view.halfExtents.y() + kPanelGap / view.pose.scale;

  CompositeSpec spec;
  for (int q = 0; q < layout.rows; ++q) {
    for (int p = 0; p < layout.cols; ++p) {
      Panel panel;
      panel.col = p;
      panel.row = q;
      panel.view = view;
      panel.view.id = view.id + ".p" + std::to_string(p) + "." + std::to_string(q);
      panel.view.pose.position = view.pose.apply(Vec3(p * cell_x, q * cell_y, 0.0));
      if (x_column) panel.view.encodings.xDomain = panel.xInterval = xb.interval(p);
      if (y_column) panel.view.encodings.yDomain = panel.yInterval = yb.interval(q);
      spec.transforms.push_back({panel.view.id, view.pose, panel.view.pose});
      layout.panels.push_back(std::move(panel));
    }
  }
  for (const auto& id : items) {
    const auto& row = *table.find_row(id);
    const auto p = x_column ? xb.bin_of(number_of(row, *x_column)) : std::optional<int>(0);
    const auto q = y_column ? yb.bin_of(number_of(row, *y_column)) : std::optional<int>(0);
    if (!p || !q) continue;
    layout.panels[static_cast<std::size_t>(*q * layout.cols + *p)].items.push_back(id);
  }

  spec.type = CompositeType::Juxtaposed;
  spec.constituents = {view.id};
  spec.sources = {view};
  spec.payload = std::move(layout);
  return spec;
}

}  // namespace

std::optional<CompositeSpec> expand_axis(const ViewSpec& view, const DataTable& table, double drag_x,
                                         double drag_y) {
  std::optional<std::string> xc;
  std::optional<std::string> yc;
  if (drag_x > 0.0) xc = axis_column(view, table, AxisName::X);
  if (drag_y > 0.0) yc = axis_column(view, table, AxisName::Y);
  const int kx = xc ? static_cast<int>(std::floor(drag_x / axis_length(view, AxisName::X))) : 0;
  const int ky = yc ? static_cast<int>(std::floor(drag_y / axis_length(view, AxisName::Y))) : 0;
  if (kx == 0 && ky == 0) return std::nullopt;

  const auto items = source_items(view, table);
  const AxisBins xb = xc ? repeated_bins(axis_domain(view, table, AxisName::X, *xc, items), kx + 1) : AxisBins{{0, 0}};
  const AxisBins yb = yc ? repeated_bins(axis_domain(view, table, AxisName::Y, *yc, items), ky + 1) : AxisBins{{0, 0}};
  return make_grid(view, table, JuxtaposeMode::Expansion, xc, xb, yc, yb, items, drag_x, drag_y);
}

int partition_bins(const ViewSpec& view, AxisName axis, double drag, const Thresholds& thresholds) {
  const double step = thresholds.binStepFraction * axis_length(view, axis);
  return 1 + static_cast<int>(std::floor(std::max(drag, 0.0) / step));
}

std::optional<CompositeSpec> partition_axis(const ViewSpec& view, const DataTable& table, AxisName axis,
                                            double drag, const Thresholds& thresholds,
                                            const JuxtaposeLayout* existing) {
  axis_column(view, table, axis);
  const bool keep = existing != nullptr && existing->mode == JuxtaposeMode::Partition;
  double drag_x = axis == AxisName::X ? drag : (keep ? existing->dragX : 0.0);
  double drag_y = axis == AxisName::Y ? drag : (keep ? existing->dragY : 0.0);
  const int nx = drag_x > 0.0 ? partition_bins(view, AxisName::X, drag_x, thresholds) : 1;
  const int ny = drag_y > 0.0 ? partition_bins(view, AxisName::Y, drag_y, thresholds) : 1;
  if (nx == 1 && ny == 1) return std::nullopt;

  const auto items = visible_items(view, table);
  std::optional<std::string> xc;
  std::optional<std::string> yc;
  AxisBins xb{{0, 0}};
  AxisBins yb{{0, 0}};
  if (nx > 1) {
    xc = axis_column(view, table, AxisName::X);
    xb = equal_bins(axis_domain(view, table, AxisName::X, *xc, items), nx);
  }
  if (ny > 1) {
    yc = axis_column(view, table, AxisName::Y);
    yb = equal_bins(axis_domain(view, table, AxisName::Y, *yc, items), ny);
  }
  return make_grid(view, table, JuxtaposeMode::Partition, xc, xb, yc, yb, items, drag_x, drag_y);
}

JuxtaposeLayout bend_layout(const JuxtaposeLayout& layout, double curvature) {
  JuxtaposeLayout out = layout;
  if (layout.mode == JuxtaposeMode::SideBySide || layout.panels.empty()) return out;
  out.curvature = curvature;

  const ViewSpec& any = layout.panels.front().view;
  const double scale = layout.origin.scale;
  const double cell_x = 2.0 * any.halfExtents.x() + layout.gap / scale;
  const double cell_y = 2.0 * any.halfExtents.y() + layout.gap / scale;
  const int n = layout.cols;
  const auto& rot = layout.origin.rotation;

  for (auto& panel : out.panels) {
    const Vec3 flat = layout.origin.apply(Vec3(panel.col * cell_x, panel.row * cell_y, 0.0));
    if (curvature == 0.0 || n < 2) {
      panel.view.pose.position = flat;
      panel.view.pose.rotation = rot;
      continue;
    }
    const Vec3 row_mid = layout.origin.apply(Vec3((n - 1) / 2.0 * cell_x, panel.row * cell_y, 0.0));
    const double radius = cell_x * scale * (n - 1) / curvature;
    const double phi = -curvature / 2.0 + panel.col * curvature / (n - 1);
    panel.view.pose.position =
        row_mid + rot * Vec3(radius * std::sin(phi), 0.0, radius * (1.0 - std::cos(phi)));
    panel.view.pose.rotation = (rot * Eigen::Quaterniond(Eigen::AngleAxisd(-phi, Vec3::UnitY()))).normalized();
  }
  return out;
}

namespace {

const std::string* client_of(const CompositeSpec& composite) {
  if (const auto* a = std::get_if<AnchorMap>(&composite.payload)) return &a->client;
  if (const auto* n = std::get_if<NestPlacementSet>(&composite.payload)) return &n->client;
  if (const auto* o = std::get_if<OverloadPlacement>(&composite.payload)) return &o->clientView;
  return nullptr;
}

bool trigger_holds(const CompositeSpec& composite, const DecomposeTrigger& trigger, const Thresholds& th) {
  switch (composite.type) {
    case CompositeType::Integrated:
      if (const auto* t = std::get_if<PulledApart>(&trigger)) return t->gap > th.link_break();
      return false;
    case CompositeType::Juxtaposed: {
      const auto& layout = std::get<JuxtaposeLayout>(composite.payload);
      if (layout.mode == JuxtaposeMode::SideBySide) {
        if (const auto* t = std::get_if<PulledApart>(&trigger)) return t->gap > th.hysteresis * th.juxtaposeDistance;
        return false;
      }
      if (const auto* t = std::get_if<HandleRetracted>(&trigger)) return t->binsX <= 1 && t->binsY <= 1;
      return false;
    }
    case CompositeType::Superimposed:
      if (const auto* t = std::get_if<ElementLifted>(&trigger)) return t->height >= th.pullDistance;
      return false;
    case CompositeType::Overloaded:
      if (const auto* t = std::get_if<AxesClosed>(&trigger)) return t->gap <= t->defaultGap + 1e-9;
      return false;
    case CompositeType::Nested:
      if (const auto* t = std::get_if<DraggedOut>(&trigger)) return t->outsideElement && t->distance > th.pullDistance;
      return false;
  }
  return false;
}

}  // namespace

std::vector<ViewSpec> decompose(const CompositeSpec& composite, const DecomposeTrigger& trigger,
                                const Thresholds& thresholds, const std::map<std::string, Pose>& current) {
  if (!trigger_holds(composite, trigger, thresholds)) {
    throw Error(ErrorCode::WrongTrigger,
                "trigger does not decompose " + std::string(to_string(composite.type)) + " composite " + composite.id);
  }
  const std::string* client = client_of(composite);
  std::vector<ViewSpec> out;
  for (ViewSpec view : composite.sources) {
    if (client != nullptr && view.id == *client) {
      if (const auto* t = composite.transform(view.id)) view.pose = t->start;
    } else if (auto it = current.find(view.id); it != current.end()) {
      view.pose = it->second;
    }
    out.push_back(std::move(view));
  }
  return out;
}

}  // namespace vizcomp

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vizcomp/data_model.hpp"
#include "vizcomp/geometry.hpp"

namespace vizcomp {

enum class ChartKind { Scatterplot, Barchart, Linechart, Stackedbar, Map, Pcp, Graph };

std::string_view to_string(ChartKind chart);
std::optional<ChartKind> parse_chart_kind(std::string_view text);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Region {
  std::string key;
  std::vector<Vec2> polygon;  // panel-local x/y

  friend bool operator==(const Region&, const Region&) = default;
};

struct GraphNode {
  std::string key;
  Vec2 pos = Vec2::Zero();  // panel-local x/y

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

/// Chart-specific channel bindings. Scatter uses x/y, bar and line charts use
/// y, stacked bars use `stack`, parallel coordinates use `axes`, maps carry
/// region polygons and graphs carry node positions and edges.
struct Encodings {
  std::map<std::string, std::string> channels;  // "x", "y", "value", "label"
  std::vector<std::string> stack;
  std::vector<std::string> axes;
  std::optional<Interval> xDomain;
  std::optional<Interval> yDomain;
  std::vector<Region> regions;
  std::vector<GraphNode> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::optional<double> nodeRadius;

  const std::string* channel(std::string_view name) const;
  friend bool operator==(const Encodings&, const Encodings&) = default;
};

/// A primitive visualization panel. The chart occupies the local rectangle
/// [-hx, hx] x [-hy, hy] at z = 0; hz is the panel half thickness.
struct ViewSpec {
  std::string id;
  ChartKind chart = ChartKind::Scatterplot;
  std::string table;
  Encodings encodings;
  Vec3 halfExtents = Vec3(0.5, 0.4, 0.01);
  Pose pose;
  std::vector<std::string> rows;         // visible subset of row keys; empty = all
  std::vector<double> axisPositions;     // pcp local axis x; empty = evenly spaced

  friend bool operator==(const ViewSpec& a, const ViewSpec& b) {
    return a.id == b.id && a.chart == b.chart && a.table == b.table && a.encodings == b.encodings &&
           a.halfExtents == b.halfExtents && a.pose == b.pose && a.rows == b.rows &&
           a.axisPositions == b.axisPositions;
  }
};

/// Grabbable part of a view.
struct Part {
  enum class Kind { Body, AxisX, AxisY, AxisHandleX, AxisHandleY, PcpAxis, Element };

  Kind kind = Kind::Body;
  int axis = 0;      // PcpAxis index
  std::string item;  // Element row key

  static Part body() { return {}; }
  static Part handle_x() { return {Kind::AxisHandleX, 0, {}}; }
  static Part handle_y() { return {Kind::AxisHandleY, 0, {}}; }
  static Part pcp_axis(int index) { return {Kind::PcpAxis, index, {}}; }
  static Part element(std::string item) { return {Kind::Element, 0, std::move(item)}; }

  /// "body", "axis-x", "axis-y", "axis-x-handle", "axis-y-handle",
  /// "pcp-axis:<i>", "element:<item>".
  std::string to_string() const;
  static std::optional<Part> parse(std::string_view text);

  friend bool operator==(const Part&, const Part&) = default;
};

/// Charts whose elements can host a nested client.
bool has_element_slots(ChartKind chart);
/// Charts with Cartesian x/y axes and handles.
bool has_cartesian_axes(ChartKind chart);

/// Row keys drawn by the view, sorted: the row subset intersected with any
/// domain windows and, for maps and graphs, with the supplied geometry.
std::vector<std::string> visible_items(const ViewSpec& view, const DataTable& table);

/// Local x of every pcp axis (explicit positions or evenly spaced).
std::vector<double> pcp_axis_positions(const ViewSpec& view);
/// Default local spacing between adjacent pcp axes.
double default_pcp_gap(const ViewSpec& view);

/// Mark geometry of one item in panel-local coordinates.
struct ItemMark {
  std::string item;
  Vec3 anchor = Vec3::Zero();
  Vec3 boxCenter = Vec3::Zero();
  Vec3 boxHalf = Vec3::Zero();
};

struct ChartLayout {
  std::vector<ItemMark> marks;  // sorted by item

  const ItemMark* find(std::string_view item) const;
};

ChartLayout chart_layout(const ViewSpec& view, const DataTable& table);

/// World-space box of a part. Element parts need the view's table.
Obb obb_of(const ViewSpec& view, const Part& part);
Obb obb_of(const ViewSpec& view, const Part& part, const DataTable& table);

/// Bounding-sphere radius of the panel: |halfExtents * scale|.
double bounding_radius(const ViewSpec& view);

/// Center distance minus both bounding radii; negative when spheres overlap.
double gap_distance(const ViewSpec& a, const ViewSpec& b);

/// Angle between the world panel normals in degrees, folded into [0, 90].
double orientation_angle(const ViewSpec& a, const ViewSpec& b);

/// World position of an item's mark. Throws UnknownItem.
Vec3 anchor_position(const ViewSpec& view, const DataTable& table, std::string_view item);

/// Geometric relations between two views, `first` < `second` by id.
struct PairRelation {
  std::string first;
  std::string second;
  double gap = 0.0;
  double orientationAngle = 0.0;
  double scaleRatio = 1.0;       // larger diagonal / smaller diagonal
  double verticalOffset = 0.0;   // world y of second minus first
  bool colliding = false;
  std::optional<std::string> firstEmbeddedIn;   // element of `second` containing `first`
  std::optional<std::string> secondEmbeddedIn;  // element of `first` containing `second`
};

struct InducedRelations {
  std::vector<PairRelation> pairs;
  std::map<std::string, Vec3> velocity;

  const PairRelation* find(std::string_view a, std::string_view b) const;
};

/// View positions at an earlier instant, for velocity estimation.
struct PoseSnapshot {
  double t = 0.0;
  std::map<std::string, Vec3> positions;
};

/// Element of `host` whose box contains the center of `client` and collides
/// with the client body; the closest such element wins, ties by key.
std::optional<std::string> embedding_element(const ViewSpec& client, const ViewSpec& host,
                                             const DataTable& host_table);

InducedRelations induced_relations(const std::vector<ViewSpec>& views, const Catalog& catalog,
                                   double now, const std::optional<PoseSnapshot>& previous);

}  // namespace vizcomp

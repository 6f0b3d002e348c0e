#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vizcomp/data_model.hpp"
#include "vizcomp/scene.hpp"
#include "vizcomp/thresholds.hpp"

namespace vizcomp {

struct LinkSegment {
  std::string aView;
  std::string aItem;
  std::string bView;
  std::string bItem;
  Vec3 endpointA = Vec3::Zero();
  Vec3 endpointB = Vec3::Zero();
};

struct LinkSet {
  std::vector<LinkSegment> segments;
};

struct AnchorEntry {
  std::string clientItem;
  std::string hostRegion;
  Pose target;
};

struct AnchorMap {
  std::string host;
  std::string client;
  std::vector<AnchorEntry> entries;
};

struct NestPlacement {
  std::string hostElement;
  std::string clientRow;
  Pose target;
  double scaleFactor = 1.0;
};

struct NestPlacementSet {
  std::string host;
  std::string client;
  std::vector<NestPlacement> placements;  // seed first, then by host element
};

struct ScatterPoint {
  std::string row;
  double x = 0.0;  // normalized value of the right axis column
  double y = 0.0;  // normalized value of the left axis column
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

struct OverloadPlacement {
  std::string pcpView;
  std::string clientView;
  int axis = 0;  // region between axis and axis + 1
  Rect region;   // pcp-local
  std::vector<ScatterPoint> points;
  std::array<int, 2> hiddenSegments{0, 1};
};

enum class JuxtaposeMode { SideBySide, Partition, Expansion };

std::string_view to_string(JuxtaposeMode mode);

struct Panel {
  ViewSpec view;
  int col = 0;
  int row = 0;
  std::optional<Interval> xInterval;
  std::optional<Interval> yInterval;
  std::vector<std::string> items;
};

struct JuxtaposeLayout {
  JuxtaposeMode mode = JuxtaposeMode::SideBySide;
  std::string source;  // partition / expansion source view
  int cols = 1;
  int rows = 1;
  double gap = 0.0;        // meters between panels
  double curvature = 0.0;  // radians of total arc per row
  double dragX = 0.0;      // handle drag distances that produced the grid
  double dragY = 0.0;
  Pose origin;  // source pose; panel (0, 0) of a flat grid
  std::vector<Panel> panels;
};

/// Start and target pose of an element or whole view, for client animation.
/// `element` is a view id, or "<view>/<item>" for a single mark.
struct ElementTransform {
  std::string element;
  Pose start;
  Pose target;
};

using CompositePayload = std::variant<LinkSet, AnchorMap, NestPlacementSet, OverloadPlacement, JuxtaposeLayout>;

struct CompositeSpec {
  std::string id;
  CompositeType type = CompositeType::Juxtaposed;
  std::vector<std::string> constituents;  // original view ids
  std::vector<ViewSpec> sources;          // constituent snapshots at composition time
  CompositePayload payload;
  std::vector<ElementTransform> transforms;

  const ElementTransform* transform(std::string_view element) const;
};

/// Fixed spacing between partition / expansion panels, meters.
inline constexpr double kPanelGap = 0.05;
/// Inset of nested charts relative to their element.
inline constexpr double kNestInset = 0.8;

CompositeSpec compose_integrated(const ViewSpec& a, const ViewSpec& b, const Relationship& rel,
                                 const Catalog& catalog);

/// Adds `joining` to an integrated group, linking it to every member it has a
/// non-None relationship with. `members` are the group's current views.
CompositeSpec join_integrated(const CompositeSpec& group, const ViewSpec& joining,
                              const std::vector<ViewSpec>& members, const Catalog& catalog);

/// Two views side by side with implicit linking only.
CompositeSpec compose_juxtaposed(const ViewSpec& a, const ViewSpec& b, const Relationship& rel);

/// `client_before` is the client's pose before the composing gesture began.
CompositeSpec compose_superimposed(const ViewSpec& host, const ViewSpec& client, const Relationship& rel,
                                   const Catalog& catalog, const std::optional<Pose>& client_before = {});

struct SpreadResult {
  bool active = false;
  std::optional<ViewSpec> scatter;
};

/// Activates the region between axes `axis` and `axis + 1` when `new_gap`
/// (panel-local) exceeds spreadFactor times the default gap, and spawns the
/// matching scatterplot below the region.
SpreadResult spread_pcp_axes(const ViewSpec& pcp, int axis, double new_gap, const Thresholds& thresholds);

CompositeSpec compose_overloaded(const ViewSpec& pcp, const ViewSpec& scatter, int axis, bool region_active,
                                 const Relationship& rel, const Catalog& catalog,
                                 const std::optional<Pose>& client_before = {});

/// Nests one mini chart of `client` into every host element with a
/// correspondence; the seed element's placement comes first.
CompositeSpec compose_nested(const ViewSpec& host, const ViewSpec& client, const Relationship& rel,
                             const Catalog& catalog, const std::string& seed_element,
                             const std::optional<Pose>& client_before = {});

/// Single-item mini chart cut out of a bar or stacked bar chart.
ViewSpec extract_element(const ViewSpec& view, const DataTable& table, const std::string& item);

enum class AxisName { X, Y };

/// World length of a Cartesian axis.
double axis_length(const ViewSpec& view, AxisName axis);

/// Expansion grid of (kx+1) x (ky+1) panels, k = floor(drag / axis length).
/// Returns nullopt for a 1x1 grid.
std::optional<CompositeSpec> expand_axis(const ViewSpec& view, const DataTable& table, double drag_x,
                                         double drag_y);

/// Number of partition bins for a handle drag.
int partition_bins(const ViewSpec& view, AxisName axis, double drag, const Thresholds& thresholds);

/// Equal-width partition of `axis` into 1 + floor(drag / binStep) bins. The
/// other axis keeps the bins of `existing` when given, so successive drags on
/// x and y build a grid. Returns nullopt when the grid is 1x1.
std::optional<CompositeSpec> partition_axis(const ViewSpec& view, const DataTable& table, AxisName axis,
                                            double drag, const Thresholds& thresholds,
                                            const JuxtaposeLayout* existing = nullptr);

/// Re-poses a partition / expansion grid on a circular arc per row with total
/// angle `curvature`, each panel facing the arc center.
JuxtaposeLayout bend_layout(const JuxtaposeLayout& layout, double curvature);

struct PulledApart {
  std::string view;
  double gap = 0.0;
};
struct ElementLifted {
  std::string item;
  double height = 0.0;
};
struct AxesClosed {
  double gap = 0.0;
  double defaultGap = 0.0;
};
struct DraggedOut {
  std::string element;
  double distance = 0.0;
  bool outsideElement = false;
};
struct HandleRetracted {
  int binsX = 1;
  int binsY = 1;
};

using DecomposeTrigger = std::variant<PulledApart, ElementLifted, AxesClosed, DraggedOut, HandleRetracted>;

/// Restores the constituent views. Integrated and juxtaposed views keep the
/// poses in `current`; superimposed, overloaded and nested clients return to
/// their pre-composition pose. Throws WrongTrigger when the trigger does not
/// belong to the composite type or its condition does not hold.
std::vector<ViewSpec> decompose(const CompositeSpec& composite, const DecomposeTrigger& trigger,
                                const Thresholds& thresholds,
                                const std::map<std::string, Pose>& current = {});

}  // namespace vizcomp

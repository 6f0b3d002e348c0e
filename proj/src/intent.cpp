#include "vizcomp/intent.hpp"

#include <algorithm>
#include <cmath>

#include "vizcomp/error.hpp"

namespace vizcomp {

namespace {

std::size_t index_of(Hand h) { return static_cast<std::size_t>(h); }
Hand other(Hand h) { return h == Hand::Left ? Hand::Right : Hand::Left; }

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::InvalidEvent, message); }

ViewSpec& view_ref(SessionState& s, std::string_view id) {
  for (auto& v : s.views) {
    if (v.id == id) return v;
  }
  invalid("unknown view " + std::string(id));
}

CompositeSpec* composite_ref(SessionState& s, std::string_view id) {
  for (auto& c : s.composites) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

bool is_grid(const CompositeSpec& c) {
  const auto* layout = std::get_if<JuxtaposeLayout>(&c.payload);
  return layout != nullptr && layout->mode != JuxtaposeMode::SideBySide;
}

bool is_side_by_side(const CompositeSpec& c) {
  const auto* layout = std::get_if<JuxtaposeLayout>(&c.payload);
  return layout != nullptr && layout->mode == JuxtaposeMode::SideBySide;
}

/// Composites whose constituents stay put while held: placed clients, their
/// hosts and grid sources.
bool places_members(const CompositeSpec& c) {
  return c.type == CompositeType::Superimposed || c.type == CompositeType::Nested ||
         c.type == CompositeType::Overloaded || is_grid(c);
}

void insert_view(SessionState& s, ViewSpec view) {
  auto it = std::lower_bound(s.views.begin(), s.views.end(), view.id,
                             [](const ViewSpec& v, const std::string& id) { return v.id < id; });
  s.views.insert(it, std::move(view));
}

void erase_view(SessionState& s, const std::string& id) {
  std::erase_if(s.views, [&](const ViewSpec& v) { return v.id == id; });
  std::erase_if(s.latched, [&](const auto& p) { return p.first == id || p.second == id; });
}

Vec3 axis_direction(const ViewSpec& view, Part::Kind kind) {
  return view.pose.rotation * (kind == Part::Kind::AxisHandleX ? Vec3::UnitX() : Vec3::UnitY());
}

/// Handle drag after this gesture: the prior drag plus the hand's travel along
/// the axis, never negative.
double handle_drag(const SessionState& s, const HandState& h) {
  const auto* view = s.find_view(h.target.view);
  const double along = (h.hand.position - h.grab.position).dot(axis_direction(*view, h.target.part.kind));
  return std::max(0.0, h.dragBase + along);
}

const CompositeSpec* grid_of(const SessionState& s, std::string_view view) {
  const auto* c = s.composite_of(view);
  return c != nullptr && is_grid(*c) ? c : nullptr;
}

Vec3 grab_point(const SessionState& s, const ViewSpec& view, const Part& part, Hand hand) {
  if (const auto* c = s.composite_of(view.id); c != nullptr && places_members(*c)) {
    if (const auto* a = std::get_if<AnchorMap>(&c->payload); a && a->client == view.id) {
      for (const auto& e : a->entries) {
        if (part.kind == Part::Kind::Element && e.clientItem == part.item) return e.target.position;
      }
    }
    if (const auto* n = std::get_if<NestPlacementSet>(&c->payload)) {
      if (n->client == view.id && part.kind == Part::Kind::Body && !n->placements.empty()) {
        return n->placements.front().target.position;
      }
      if (n->host == view.id && part.kind == Part::Kind::Element) {
        for (const auto& p : n->placements) {
          if (p.hostElement == part.item) return p.target.position;
        }
      }
    }
  }
  if (part.kind == Part::Kind::Body) {
    const double hx = view.halfExtents.x();
    return view.pose.apply(Vec3(hand == Hand::Left ? -hx : hx, 0.0, 0.0));
  }
  return obb_of(view, part, s.catalog->table(view.table)).center;
}

Pose rigid_follow(const HandState& h) {
  const Eigen::Quaterniond rel = (h.hand.rotation * h.grab.rotation.conjugate()).normalized();
  return {h.hand.position + rel * (h.viewAtGrab.position - h.grab.position),
          (rel * h.viewAtGrab.rotation).normalized(), h.viewAtGrab.scale};
}

/// Two hands on one body: translation from the midpoint, rotation taking the
/// old inter-hand direction to the new one, scale from the distance ratio.
Pose bimanual_follow(const HandState& l, const HandState& r) {
  const Vec3 d0 = r.grab.position - l.grab.position;
  const Vec3 d1 = r.hand.position - l.hand.position;
  const Pose& v0 = l.viewAtGrab;
  if (d0.norm() <= 1e-12 || d1.norm() <= 1e-12) return v0;
  const Eigen::Quaterniond rot = Eigen::Quaterniond::FromTwoVectors(d0, d1);
  const double ratio = d1.norm() / d0.norm();
  const Vec3 mid0 = (l.grab.position + r.grab.position) / 2.0;
  const Vec3 mid1 = (l.hand.position + r.hand.position) / 2.0;
  return {mid1 + rot * (ratio * (v0.position - mid0)), (rot * v0.rotation).normalized(), v0.scale * ratio};
}

void reanchor(SessionState& s, HandState& h) {
  h.grab = h.hand;
  h.viewAtGrab = s.find_view(h.target.view)->pose;
}

bool bimanual_body(const SessionState& s) {
  const auto& l = s.hand(Hand::Left);
  const auto& r = s.hand(Hand::Right);
  return l && r && !l->absorbed && !r->absorbed && l->target.view == r->target.view &&
         l->target.part.kind == Part::Kind::Body && r->target.part.kind == Part::Kind::Body;
}

void refresh_links(SessionState& s) {
  for (auto& c : s.composites) {
    auto* links = std::get_if<LinkSet>(&c.payload);
    if (links == nullptr) continue;
    for (auto& seg : links->segments) {
      const auto* a = s.find_view(seg.aView);
      const auto* b = s.find_view(seg.bView);
      if (a) seg.endpointA = anchor_position(*a, s.catalog->table(a->table), seg.aItem);
      if (b) seg.endpointB = anchor_position(*b, s.catalog->table(b->table), seg.bItem);
    }
  }
}

void refresh(SessionState& s, double t) {
  s.relations = induced_relations(s.views, *s.catalog, t, s.previousPoses);
  PoseSnapshot snap{t, {}};
  for (const auto& v : s.views) snap.positions[v.id] = v.pose.position;
  s.previousPoses = std::move(snap);

  std::set<std::pair<std::string, std::string>> latched;
  for (const auto& p : s.relations.pairs) {
    const auto key = std::pair{p.first, p.second};
    if (hysteresis_gate(s.latched.count(key) > 0, p.gap, *s.thresholds)) latched.insert(key);
  }
  s.latched = std::move(latched);
  refresh_links(s);
}

/// Spawned views (SPPC scatterplots, extracted minis) that are in no composite
/// and in no hand.
bool disposable_view(const SessionState& s, const std::string& id) {
  if (s.composite_of(id) != nullptr) return false;
  for (const auto& h : s.hands) {
    if (h && h->target.view == id) return false;
  }
  return true;
}

void update_spread(SessionState& s, const std::string pcp_id) {
  const auto& th = *s.thresholds;
  const ViewSpec pcp = *s.find_view(pcp_id);
  const auto xs = pcp_axis_positions(pcp);
  const double base = default_pcp_gap(pcp);
  for (int i = 0; i + 1 < static_cast<int>(xs.size()); ++i) {
    const double gap = xs[static_cast<std::size_t>(i) + 1] - xs[static_cast<std::size_t>(i)];
    const auto key = std::pair{pcp_id, i};
    const bool active = s.activeRegions.count(key) > 0;
    if (!active) {
      auto spread = spread_pcp_axes(pcp, i, gap, th);
      if (!spread.active) continue;
      s.activeRegions.insert(key);
      if (s.find_view(spread.scatter->id) == nullptr) insert_view(s, std::move(*spread.scatter));
    } else if (gap <= base + 1e-9) {
      bool overloaded = false;
      for (const auto& c : s.composites) {
        const auto* o = std::get_if<OverloadPlacement>(&c.payload);
        overloaded = overloaded || (o && o->pcpView == pcp_id && o->axis == i);
      }
      if (overloaded) continue;  // closing an overloaded pair decomposes on release
      s.activeRegions.erase(key);
      const std::string scatter = pcp_id + ".sppc" + std::to_string(i);
      if (s.find_view(scatter) && disposable_view(s, scatter)) erase_view(s, scatter);
    }
  }
}

void apply_grab(SessionState& s, const InteractionEvent& e) {
  auto& slot = s.hands[index_of(e.hand)];
  if (slot) invalid(std::string(to_string(e.hand)) + " hand already holds " + slot->target.view);
  if (!e.target) invalid("grab without target");
  const auto* view = s.find_view(e.target->view);
  if (view == nullptr) invalid("unknown view " + e.target->view);

  HandState h;
  h.target = *e.target;
  try {
    h.grab = {grab_point(s, *view, h.target.part, e.hand), view->pose.rotation, 1.0};
  } catch (const Error& err) {
    invalid(err.what());
  }
  h.hand = h.grab;
  h.viewAtGrab = view->pose;
  h.gestureStart = view->pose;

  const auto kind = h.target.part.kind;
  const auto* comp = s.composite_of(view->id);
  if (comp != nullptr && places_members(*comp) && (kind == Part::Kind::Body || kind == Part::Kind::Element)) {
    h.absorbed = true;
  }
  if (kind == Part::Kind::AxisHandleX || kind == Part::Kind::AxisHandleY) {
    if (const auto* grid = grid_of(s, view->id)) {
      const auto& layout = std::get<JuxtaposeLayout>(grid->payload);
      h.dragBase = kind == Part::Kind::AxisHandleX ? layout.dragX : layout.dragY;
    }
  }
  if (kind == Part::Kind::PcpAxis) h.axesAtGrab = pcp_axis_positions(*view);

  auto& peer = s.hands[index_of(other(e.hand))];
  if (peer && peer->target.view == view->id) {
    const auto pk = peer->target.part.kind;
    const bool handles = (kind == Part::Kind::AxisHandleX && pk == Part::Kind::AxisHandleY) ||
                         (kind == Part::Kind::AxisHandleY && pk == Part::Kind::AxisHandleX);
    if (handles) h.bimanualHandles = peer->bimanualHandles = true;
  }
  slot = std::move(h);
  if (bimanual_body(s)) reanchor(s, *peer);
}

void apply_move(SessionState& s, const InteractionEvent& e) {
  auto& slot = s.hands[index_of(e.hand)];
  if (!slot) invalid(std::string(to_string(e.hand)) + " hand holds nothing");
  if (!e.pose) invalid("move without pose");
  if (!e.pose->valid()) invalid("move pose is not a valid pose");
  HandState& h = *slot;
  h.hand = *e.pose;
  if (h.absorbed) return;

  const auto& th = *s.thresholds;
  switch (h.target.part.kind) {
    case Part::Kind::Element: {
      const ViewSpec source = *s.find_view(h.target.view);
      const bool bars = source.chart == ChartKind::Barchart || source.chart == ChartKind::Stackedbar;
      if (!bars || (h.hand.position - h.grab.position).norm() <= th.pullDistance) return;
      ViewSpec mini = extract_element(source, s.catalog->table(source.table), h.target.part.item);
      if (s.find_view(mini.id) != nullptr) return;
      h.target = {mini.id, Part::body()};
      h.viewAtGrab = h.gestureStart = mini.pose;
      h.extracted = true;
      insert_view(s, std::move(mini));
      view_ref(s, h.target.view).pose = rigid_follow(h);
      return;
    }
    case Part::Kind::Body:
      if (bimanual_body(s)) {
        view_ref(s, h.target.view).pose = bimanual_follow(*s.hands[0], *s.hands[1]);
      } else {
        view_ref(s, h.target.view).pose = rigid_follow(h);
      }
      return;
    case Part::Kind::PcpAxis: {
      ViewSpec& pcp = view_ref(s, h.target.view);
      const auto k = static_cast<std::size_t>(h.target.part.axis);
      const double hx = pcp.halfExtents.x();
      const double margin = 1e-3 * hx;
      const double along = (h.hand.position - h.grab.position).dot(pcp.pose.rotation * Vec3::UnitX());
      auto xs = pcp_axis_positions(pcp);  // the other hand may hold a neighbour
      const double lo = k > 0 ? xs[k - 1] + margin : -hx;
      const double hi = k + 1 < xs.size() ? xs[k + 1] - margin : hx;
      xs[k] = std::clamp(h.axesAtGrab[k] + along / pcp.pose.scale, lo, hi);
      pcp.axisPositions = std::move(xs);
      update_spread(s, pcp.id);
      return;
    }
    default:
      return;  // handle drags are read from the hand on release
  }
}

std::string next_id(SessionState& s) { return "c" + std::to_string(s.nextComposite++); }

Command apply_decompose(SessionState& s, const CompositeSpec& composite, const DecomposeTrigger& trigger) {
  std::map<std::string, Pose> current;
  for (const auto& v : s.views) current[v.id] = v.pose;
  const auto restored = decompose(composite, trigger, *s.thresholds, current);

  DecomposeCommand cmd{composite.id, composite.type, {}};
  for (const auto& r : restored) {
    if (s.find_view(r.id) == nullptr) continue;
    ViewSpec& live = view_ref(s, r.id);
    live.pose = r.pose;
    cmd.restored.push_back(live);
  }
  if (const auto* o = std::get_if<OverloadPlacement>(&composite.payload)) {
    s.activeRegions.erase({o->pcpView, o->axis});
  }
  std::erase_if(s.composites, [&](const CompositeSpec& c) { return c.id == composite.id; });
  return cmd;
}

Command apply_compose(SessionState& s, CompositeSpec spec, std::optional<std::string> reuse_id = {}) {
  if (reuse_id) {
    spec.id = *reuse_id;
    *composite_ref(s, *reuse_id) = spec;
  } else {
    spec.id = next_id(s);
    s.composites.push_back(spec);
  }
  return ComposeCommand{std::move(spec)};
}

std::optional<Command> release_handles(SessionState& s, const HandState& held, Hand hand) {
  if (held.consumed) return std::nullopt;
  const ViewSpec view = *s.find_view(held.target.view);
  const auto& table = s.catalog->table(view.table);
  const CompositeSpec* grid = grid_of(s, view.id);
  const JuxtaposeLayout* existing = grid ? &std::get<JuxtaposeLayout>(grid->payload) : nullptr;

  JuxtaposeLayout drags;
  drags.mode = JuxtaposeMode::Partition;
  drags.dragX = existing ? existing->dragX : 0.0;
  drags.dragY = existing ? existing->dragY : 0.0;
  const auto set_drag = [&](const HandState& h) {
    (h.target.part.kind == Part::Kind::AxisHandleX ? drags.dragX : drags.dragY) = handle_drag(s, h);
  };
  set_drag(held);
  auto& peer = s.hands[index_of(other(hand))];
  const bool bimanual = held.bimanualHandles && peer && peer->target.view == view.id && peer->bimanualHandles;
  if (bimanual) {
    set_drag(*peer);
    peer->consumed = true;
  }

  const auto mode = existing ? existing->mode : (held.bimanualHandles ? JuxtaposeMode::Expansion : JuxtaposeMode::Partition);
  std::optional<CompositeSpec> result;
  try {
    if (mode == JuxtaposeMode::Expansion) {
      result = expand_axis(view, table, drags.dragX, drags.dragY);
    } else {
      result = partition_axis(view, table, AxisName::X, drags.dragX, *s.thresholds, &drags);
    }
  } catch (const Error&) {
    return std::nullopt;  // the view has no quantitative axis there
  }

  if (!result) {
    if (!grid) return std::nullopt;
    return apply_decompose(s, *grid, HandleRetracted{1, 1});
  }
  if (grid) {
    const auto& now = std::get<JuxtaposeLayout>(result->payload);
    if (now.cols == existing->cols && now.rows == existing->rows) {
      // Same grid; keep the drags so later grabs continue from here.
      composite_ref(s, grid->id)->payload = result->payload;
      return std::nullopt;
    }
    return apply_compose(s, std::move(*result), grid->id);
  }
  return apply_compose(s, std::move(*result));
}

std::optional<Command> release_pcp_axis(SessionState& s, const HandState& held) {
  const ViewSpec& pcp = *s.find_view(held.target.view);
  const auto xs = pcp_axis_positions(pcp);
  for (const auto& c : s.composites) {
    const auto* o = std::get_if<OverloadPlacement>(&c.payload);
    if (o == nullptr || o->pcpView != pcp.id) continue;
    const auto i = static_cast<std::size_t>(o->axis);
    const AxesClosed trigger{xs[i + 1] - xs[i], default_pcp_gap(pcp)};
    if (trigger.gap <= trigger.defaultGap + 1e-9) {
      const CompositeSpec copy = c;
      return apply_decompose(s, copy, trigger);
    }
  }
  return std::nullopt;
}

std::optional<Command> release_absorbed(SessionState& s, const HandState& held) {
  const CompositeSpec* c = s.composite_of(held.target.view);
  if (c == nullptr) return std::nullopt;
  const CompositeSpec copy = *c;
  const Vec3 travel = held.hand.position - held.grab.position;
  const auto& th = *s.thresholds;

  if (const auto* a = std::get_if<AnchorMap>(&copy.payload); a && a->client == held.target.view) {
    const ElementLifted trigger{held.target.part.item, travel.y()};
    if (trigger.height >= th.pullDistance) return apply_decompose(s, copy, trigger);
    return std::nullopt;
  }
  if (const auto* n = std::get_if<NestPlacementSet>(&copy.payload)) {
    std::string element;
    if (n->client == held.target.view && held.target.part.kind == Part::Kind::Body && !n->placements.empty()) {
      element = n->placements.front().hostElement;
    } else if (n->host == held.target.view && held.target.part.kind == Part::Kind::Element) {
      element = held.target.part.item;
    } else {
      return std::nullopt;
    }
    const ViewSpec& host = *s.find_view(n->host);
    const Obb box = obb_of(host, Part::element(element), s.catalog->table(host.table));
    const DraggedOut trigger{element, travel.norm(), !box.contains(held.hand.position)};
    if (trigger.outsideElement && trigger.distance > th.pullDistance) return apply_decompose(s, copy, trigger);
  }
  return std::nullopt;
}

const ViewSpec& must_view(const SessionState& s, const std::string& id) {
  const auto* v = s.find_view(id);
  if (v == nullptr) invalid("unknown view " + id);
  return *v;
}

CompositeSpec build(const SessionState& s, const CandidateIntent& cand, const std::string& released,
                    const std::optional<Pose>& before) {
  const auto& cat = *s.catalog;
  const ViewSpec& a = must_view(s, cand.constituents[0]);
  const ViewSpec& b = must_view(s, cand.constituents[1]);
  const Relationship& rel = cat.relationship(a.table, b.table);
  const auto client_before = b.id == released ? before : std::nullopt;
  switch (cand.type) {
    case CompositeType::Nested:
      return compose_nested(a, b, rel, cat, cand.context, client_before);
    case CompositeType::Overloaded:
      return compose_overloaded(a, b, std::stoi(cand.context), true, rel, cat, client_before);
    case CompositeType::Superimposed:
      return compose_superimposed(a, b, rel, cat, client_before);
    case CompositeType::Integrated:
      if (!cand.context.empty()) {
        const CompositeSpec* group = s.find_composite(cand.context);
        std::vector<ViewSpec> members;
        for (const auto& id : group->constituents) members.push_back(must_view(s, id));
        const ViewSpec& joining = s.composite_of(a.id) == group ? b : a;
        return join_integrated(*group, joining, members, cat);
      }
      return compose_integrated(a, b, rel, cat);
    case CompositeType::Juxtaposed:
      return compose_juxtaposed(a, b, rel);
  }
  throw Error(ErrorCode::NotAdmissible, "unknown composite type");
}

std::optional<Command> release_body(SessionState& s, const HandState& held) {
  const std::string& id = held.target.view;
  const auto& th = *s.thresholds;

  if (const CompositeSpec* c = s.composite_of(id)) {
    const CompositeSpec copy = *c;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& other_id : copy.constituents) {
      if (other_id == id) continue;
      if (const auto* o = s.find_view(other_id)) nearest = std::min(nearest, gap_distance(*s.find_view(id), *o));
    }
    if (copy.type == CompositeType::Integrated && nearest > th.link_break()) {
      return apply_decompose(s, copy, PulledApart{id, nearest});
    }
    if (is_side_by_side(copy)) {
      if (nearest > th.hysteresis * th.juxtaposeDistance) return apply_decompose(s, copy, PulledApart{id, nearest});
      return std::nullopt;
    }
  }

  for (const auto& cand : candidates(s)) {
    if (!cand.admissible) break;
    if (std::find(cand.constituents.begin(), cand.constituents.end(), id) == cand.constituents.end()) continue;
    CompositeSpec spec;
    try {
      spec = build(s, cand, id, held.gestureStart);
    } catch (const Error&) {
      continue;  // e.g. unmatched anchors; try the next candidate
    }
    if (cand.type == CompositeType::Integrated && !cand.context.empty()) {
      return apply_compose(s, std::move(spec), cand.context);
    }
    return apply_compose(s, std::move(spec));
  }
  return std::nullopt;
}

int precedence(CompositeType type) {
  switch (type) {
    case CompositeType::Nested: return 0;
    case CompositeType::Overloaded: return 1;
    case CompositeType::Superimposed: return 2;
    case CompositeType::Integrated: return 3;
    case CompositeType::Juxtaposed: return 4;
  }
  return 5;
}

}  // namespace

std::string_view to_string(Hand hand) { return hand == Hand::Left ? "left" : "right"; }

std::optional<Hand> parse_hand(std::string_view text) {
  if (text == "left") return Hand::Left;
  if (text == "right") return Hand::Right;
  return std::nullopt;
}

std::string_view to_string(InteractionEvent::Kind kind) {
  switch (kind) {
    case InteractionEvent::Kind::Grab: return "grab";
    case InteractionEvent::Kind::Move: return "move";
    case InteractionEvent::Kind::Release: return "release";
    case InteractionEvent::Kind::Tick: return "tick";
  }
  return "?";
}

const ViewSpec* SessionState::find_view(std::string_view id) const {
  auto it = std::lower_bound(views.begin(), views.end(), id,
                             [](const ViewSpec& v, std::string_view key) { return v.id < key; });
  return it != views.end() && it->id == id ? &*it : nullptr;
}

const CompositeSpec* SessionState::find_composite(std::string_view id) const {
  for (const auto& c : composites) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const CompositeSpec* SessionState::composite_of(std::string_view view) const {
  for (const auto& c : composites) {
    if (std::find(c.constituents.begin(), c.constituents.end(), view) != c.constituents.end()) return &c;
  }
  return nullptr;
}

bool hysteresis_gate(bool latched, double gap, const Thresholds& thresholds) {
  return latched ? gap <= thresholds.link_break() : gap < thresholds.linkDistance;
}

SessionState make_session(std::vector<DataTable> tables, std::vector<Relationship> declared,
                          std::vector<ViewSpec> views, Thresholds thresholds) {
  SessionState s;
  s.catalog = std::make_shared<const Catalog>(std::move(tables), std::move(declared));
  s.thresholds = std::make_shared<const Thresholds>(thresholds);
  std::sort(views.begin(), views.end(), [](const ViewSpec& a, const ViewSpec& b) { return a.id < b.id; });
  s.views = std::move(views);
  refresh(s, 0.0);
  s.previousPoses.reset();
  s.preview = candidates(s);
  return s;
}

std::vector<CandidateIntent> candidates(const SessionState& s) {
  const auto& th = *s.thresholds;
  std::vector<CandidateIntent> out;

  for (const auto& p : s.relations.pairs) {
    const CompositeSpec* ca = s.composite_of(p.first);
    const CompositeSpec* cb = s.composite_of(p.second);
    if ((ca && ca->type != CompositeType::Integrated) || (cb && cb->type != CompositeType::Integrated)) continue;
    if (ca && cb) continue;
    const bool joining = ca || cb;

    const ViewSpec& va = *s.find_view(p.first);
    const ViewSpec& vb = *s.find_view(p.second);
    const Relationship& rel = s.catalog->relationship(va.table, vb.table);
    const bool a_hosts = bounding_radius(va) >= bounding_radius(vb);
    const ViewSpec& host = a_hosts ? va : vb;
    const ViewSpec& client = a_hosts ? vb : va;

    auto add = [&](CompositeType type, std::vector<std::string> ids, std::string context) {
      out.push_back({type, std::move(ids), std::move(context), 0, is_admissible(rel.kind, type)});
    };

    if (!joining) {
      const auto& embedded = a_hosts ? p.secondEmbeddedIn : p.firstEmbeddedIn;
      if (p.colliding && embedded && p.scaleRatio >= th.hostClientRatio) {
        add(CompositeType::Nested, {host.id, client.id}, *embedded);
      }
      if (host.chart == ChartKind::Pcp && client.chart != ChartKind::Pcp) {
        const auto xs = pcp_axis_positions(host);
        const Obb body = obb_of(client, Part::body());
        for (auto it = s.activeRegions.lower_bound({host.id, 0});
             it != s.activeRegions.end() && it->first == host.id; ++it) {
          const auto i = static_cast<std::size_t>(it->second);
          const Obb region = Obb::from_local(host.pose, Vec3((xs[i] + xs[i + 1]) / 2.0, 0.0, 0.0),
                                             Vec3((xs[i + 1] - xs[i]) / 2.0, host.halfExtents.y(), host.halfExtents.z()));
          if (collide(region, body)) add(CompositeType::Overloaded, {host.id, client.id}, std::to_string(it->second));
        }
      }
      const double above = client.pose.position.y() - host.pose.position.y();
      if (p.colliding && p.orientationAngle >= th.superimposeAngle && above > 0.0) {
        add(CompositeType::Superimposed, {host.id, client.id}, "");
      }
    }
    if (!p.colliding && s.latched.count({p.first, p.second}) && rel.kind != RelationshipKind::None) {
      add(CompositeType::Integrated, {p.first, p.second}, joining ? (ca ? ca->id : cb->id) : "");
    }
    if (!joining && !p.colliding && p.gap < th.juxtaposeDistance &&
        (rel.kind == RelationshipKind::None || !is_admissible(rel.kind, CompositeType::Integrated))) {
      add(CompositeType::Juxtaposed, {p.first, p.second}, "");
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const CandidateIntent& x, const CandidateIntent& y) {
    if (x.admissible != y.admissible) return x.admissible;
    return precedence(x.type) < precedence(y.type);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i);
  return out;
}

std::pair<std::optional<Command>, SessionState> commit_on_release(const SessionState& state,
                                                                  const HandState& held) {
  SessionState s = state;
  std::optional<Command> cmd;
  const Hand hand = s.hand(Hand::Left) ? Hand::Right : Hand::Left;
  switch (held.target.part.kind) {
    case Part::Kind::AxisHandleX:
    case Part::Kind::AxisHandleY:
      cmd = release_handles(s, held, hand);
      break;
    case Part::Kind::PcpAxis:
      cmd = release_pcp_axis(s, held);
      break;
    case Part::Kind::Body:
      cmd = held.absorbed ? release_absorbed(s, held) : release_body(s, held);
      break;
    case Part::Kind::Element:
      if (held.absorbed) cmd = release_absorbed(s, held);
      break;
    default:
      break;
  }
  return {std::move(cmd), std::move(s)};
}

SessionState step(const SessionState& state, const InteractionEvent& e) {
  if (state.lastT && e.t < *state.lastT) {
    invalid("time " + std::to_string(e.t) + " precedes " + std::to_string(*state.lastT));
  }
  if (!std::isfinite(e.t)) invalid("non-finite time");

  SessionState s = state;
  s.lastCommand.reset();
  switch (e.kind) {
    case InteractionEvent::Kind::Grab:
      apply_grab(s, e);
      break;
    case InteractionEvent::Kind::Move:
      apply_move(s, e);
      break;
    case InteractionEvent::Kind::Tick:
      break;
    case InteractionEvent::Kind::Release: {
      auto& slot = s.hands[index_of(e.hand)];
      if (!slot) invalid(std::string(to_string(e.hand)) + " hand holds nothing");
      const HandState held = std::move(*slot);
      slot.reset();
      auto& peer = s.hands[index_of(other(e.hand))];
      if (peer && peer->target.view == held.target.view && held.target.part.kind == Part::Kind::Body &&
          peer->target.part.kind == Part::Kind::Body) {
        reanchor(s, *peer);
      }
      const auto snapshot = s.previousPoses;
      refresh(s, e.t);
      auto [cmd, next] = commit_on_release(s, held);
      next.previousPoses = snapshot;
      s = std::move(next);
      if (held.extracted && disposable_view(s, held.target.view)) erase_view(s, held.target.view);
      s.lastCommand = std::move(cmd);
      break;
    }
  }
  refresh(s, e.t);
  s.preview = candidates(s);
  s.lastT = e.t;
  ++s.log;
  return s;
}

}  // namespace vizcomp

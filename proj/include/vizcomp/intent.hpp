#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vizcomp/compose.hpp"
#include "vizcomp/data_model.hpp"
#include "vizcomp/scene.hpp"
#include "vizcomp/thresholds.hpp"

namespace vizcomp {

enum class Hand { Left, Right };

std::string_view to_string(Hand hand);
std::optional<Hand> parse_hand(std::string_view text);

struct Target {
  std::string view;
  Part part;

  friend bool operator==(const Target&, const Target&) = default;
};

/// One replayable input. `target` is set on grabs, `pose` (the absolute hand
/// pose) on moves.
struct InteractionEvent {
  enum class Kind { Grab, Move, Release, Tick };

  double t = 0.0;
  Kind kind = Kind::Tick;
  Hand hand = Hand::Left;
  std::optional<Target> target;
  std::optional<Pose> pose;

  friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

std::string_view to_string(InteractionEvent::Kind kind);

/// What a hand holds. The hand is taken to grab at a fixed point of the part
/// with the view's rotation: bodies at the left or right panel edge center,
/// every other part at the center of its box.
struct HandState {
  Target target;
  Pose grab;       // implied hand pose at grab (or re-anchor)
  Pose hand;       // current hand pose
  Pose viewAtGrab; // held view pose at grab (or re-anchor)
  Pose gestureStart;  // view pose when the gesture began, for decomposition
  double dragBase = 0.0;          // handle drag accumulated before this grab
  std::vector<double> axesAtGrab; // pcp axis positions at grab
  bool bimanualHandles = false;   // both handles of one view held at some point
  bool consumed = false;          // release produces no command
  bool absorbed = false;          // view belongs to a placed composite; only the hand moves
  bool extracted = false;         // an element grab turned into a mini chart

  friend bool operator==(const HandState&, const HandState&) = default;
};

/// A composition the current scene would commit. `context` carries the seed
/// element (nested), the axis index (overloaded) or the integrated group id.
struct CandidateIntent {
  CompositeType type = CompositeType::Juxtaposed;
  std::vector<std::string> constituents;  // host first for hierarchical types
  std::string context;
  int rank = 0;
  bool admissible = true;

  friend bool operator==(const CandidateIntent&, const CandidateIntent&) = default;
};

struct ComposeCommand {
  CompositeSpec spec;
};

struct DecomposeCommand {
  std::string compositeId;
  CompositeType type = CompositeType::Juxtaposed;
  std::vector<ViewSpec> restored;
};

using Command = std::variant<ComposeCommand, DecomposeCommand>;

struct SessionState {
  std::shared_ptr<const Catalog> catalog;
  std::shared_ptr<const Thresholds> thresholds;
  std::vector<ViewSpec> views;              // sorted by id
  std::vector<CompositeSpec> composites;    // in commit order
  std::set<std::pair<std::string, int>> activeRegions;  // (pcp view, left axis)
  std::set<std::pair<std::string, std::string>> latched;
  std::array<std::optional<HandState>, 2> hands;
  InducedRelations relations;
  std::vector<CandidateIntent> preview;
  std::optional<Command> lastCommand;  // command fired by the last applied event
  std::size_t log = 0;
  std::optional<double> lastT;
  std::optional<PoseSnapshot> previousPoses;
  int nextComposite = 1;

  const ViewSpec* find_view(std::string_view id) const;
  const CompositeSpec* find_composite(std::string_view id) const;
  /// Composite containing `view`, or nullptr.
  const CompositeSpec* composite_of(std::string_view view) const;
  const std::optional<HandState>& hand(Hand h) const { return hands[static_cast<std::size_t>(h)]; }
};

/// Fresh session over the manifest's views. Thresholds must be valid.
SessionState make_session(std::vector<DataTable> tables, std::vector<Relationship> declared,
                          std::vector<ViewSpec> views, Thresholds thresholds = {});

/// Applies one event and returns the next state. Throws InvalidEvent for a
/// grab by a busy hand, a move or release by an empty hand, a time regression
/// or a target that does not exist.
SessionState step(const SessionState& state, const InteractionEvent& event);

/// Ranked composition candidates of the current scene: admissible matches in
/// precedence order Nested, Overloaded, Superimposed, Integrated, Juxtaposed,
/// then inadmissible matches in the same order.
std::vector<CandidateIntent> candidates(const SessionState& state);

/// Command fired by releasing `hand` whose grab was `held`; `state` already
/// has the hand released and relations refreshed. Returns the command and the
/// state with it applied.
std::pair<std::optional<Command>, SessionState> commit_on_release(const SessionState& state,
                                                                  const HandState& held);

/// Make/break latch for one proximity pair.
bool hysteresis_gate(bool latched, double gap, const Thresholds& thresholds);

}  // namespace vizcomp

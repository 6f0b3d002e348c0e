#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vizcomp/intent.hpp"
#include "vizcomp/io.hpp"

namespace vizcomp {

/// Stable process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitEngine = 3, kExitExpectation = 4 };

struct ReplayResult {
  std::vector<Command> commands;
  std::vector<CompositeSpec> committed;  // every Compose, in order
  SessionState final;
};

/// Applies every event in order. Engine errors propagate.
ReplayResult replay(const Manifest& manifest, const std::vector<InteractionEvent>& events);

/// One line per command, e.g. "compose integrated c1 bars,line".
std::string summarize(const Command& command);

struct DemoFixture {
  std::string_view manifest;
  std::string_view trace;
};

inline constexpr std::string_view kDemoCases[] = {"juxtaposed", "integrated", "superimposed", "overloaded", "nested"};

/// Bundled fixture of a demo case, or nullopt for an unknown name.
std::optional<DemoFixture> demo_fixture(std::string_view name);

/// Structural check of the last composite a demo committed; empty when it
/// holds, otherwise the reason it does not.
std::string check_demo(std::string_view name, const Manifest& manifest, const ReplayResult& result);

/// The admissibility table, one "kind: type, type" line per relationship kind.
std::string matrix_text();

/// Full command line entry point; returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vizcomp

#include "vizcomp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "vizcomp/error.hpp"
#include "vizcomp/server.hpp"

namespace vizcomp {

namespace demo_data {
// Generated at configure time from demos/.
std::string_view manifest(std::string_view name);
std::string_view trace(std::string_view name);
}  // namespace demo_data

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << bytes << '\n';
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : std::string(sep)) + p;
  return out;
}

const ViewSpec* source(const CompositeSpec& spec, std::string_view id) {
  for (const auto& v : spec.sources) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

std::string check_integrated(const Manifest& m, const CompositeSpec& spec) {
  const auto& links = std::get<LinkSet>(spec.payload).segments;
  const Catalog catalog(m.tables, m.relationships);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < spec.sources.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.sources.size(); ++j) {
      const auto& a = spec.sources[i];
      const auto& b = spec.sources[j];
      const auto& rel = catalog.relationship(a.table, b.table);
      if (rel.kind == RelationshipKind::None) continue;
      const auto& ta = catalog.table(rel.tableA);
      const auto& tb = catalog.table(rel.tableB);
      for (const auto& c : item_correspondences(rel, ta, tb)) expected += c.bItems.size();
    }
  }
  if (links.size() != expected) {
    return "expected " + std::to_string(expected) + " links, got " + std::to_string(links.size());
  }
  return {};
}

std::string check_superimposed(const Manifest& m, const CompositeSpec& spec) {
  const auto& anchors = std::get<AnchorMap>(spec.payload);
  const Catalog catalog(m.tables, m.relationships);
  const auto* client = source(spec, anchors.client);
  if (client == nullptr) return "client view missing from sources";
  const auto items = visible_items(*client, catalog.table(client->table));
  std::vector<std::string> placed;
  std::set<std::string> regions;
  for (const auto& e : anchors.entries) {
    placed.push_back(e.clientItem);
    regions.insert(e.hostRegion);
  }
  std::sort(placed.begin(), placed.end());
  if (placed != items) return "anchored items differ from the client items";
  if (regions.size() != placed.size()) return "two items share a host region";
  return {};
}

std::string check_overloaded(const Manifest& m, const CompositeSpec& spec) {
  const auto& o = std::get<OverloadPlacement>(spec.payload);
  const Catalog catalog(m.tables, m.relationships);
  const auto* pcp = source(spec, o.pcpView);
  if (pcp == nullptr) return "pcp view missing from sources";
  const auto rows = visible_items(*pcp, catalog.table(pcp->table)).size();
  if (o.points.size() != rows) {
    return "expected " + std::to_string(rows) + " points, got " + std::to_string(o.points.size());
  }
  for (const auto& p : o.points) {
    if (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0) return "point " + p.row + " leaves the unit square";
  }
  if (o.hiddenSegments[0] != o.axis || o.hiddenSegments[1] != o.axis + 1) return "wrong suppressed axis pair";
  return {};
}

std::string check_nested(const Manifest& m, const CompositeSpec& spec) {
  const auto& n = std::get<NestPlacementSet>(spec.payload);
  const Catalog catalog(m.tables, m.relationships);
  const auto* host = source(spec, n.host);
  const auto* client = source(spec, n.client);
  if (host == nullptr || client == nullptr) return "constituents missing from sources";
  const auto& th = catalog.table(host->table);
  const auto& tc = catalog.table(client->table);
  const auto nodes = visible_items(*host, th);
  std::set<std::string> expected;
  for (const auto& [h, c] : item_pairs(catalog.relationship(host->table, client->table), th, tc)) {
    if (std::binary_search(nodes.begin(), nodes.end(), h)) expected.insert(h);
  }
  std::set<std::string> placed;
  for (const auto& p : n.placements) {
    if (!placed.insert(p.hostElement).second) return "element " + p.hostElement + " nested twice";
  }
  if (placed != expected) {
    return "expected " + std::to_string(expected.size()) + " placements, got " + std::to_string(placed.size());
  }
  return {};
}

std::string check_juxtaposed(const Manifest& m, const CompositeSpec& spec) {
  const auto& layout = std::get<JuxtaposeLayout>(spec.payload);
  const Catalog catalog(m.tables, m.relationships);
  if (layout.mode != JuxtaposeMode::Partition) return "expected a partition";
  if (layout.panels.size() != static_cast<std::size_t>(layout.cols * layout.rows) || layout.panels.size() < 2) {
    return "panel count does not match the grid";
  }
  const auto* src = source(spec, layout.source);
  if (src == nullptr) return "source view missing from sources";
  std::vector<std::string> rows;
  for (const auto& p : layout.panels) rows.insert(rows.end(), p.items.begin(), p.items.end());
  std::sort(rows.begin(), rows.end());
  if (rows != visible_items(*src, catalog.table(src->table))) return "panels do not conserve the source rows";
  return {};
}

int replay_command(const std::string& manifest_path, const std::string& trace_path, const std::string& out_path,
                   const std::string& thresholds_path, std::ostream& out, std::ostream& err) {
  Manifest manifest;
  std::vector<InteractionEvent> events;
  try {
    manifest = load_manifest(read_file(manifest_path));
    if (!thresholds_path.empty()) manifest.thresholds = load_thresholds(read_file(thresholds_path), manifest.thresholds);
    events = load_trace(read_file(trace_path));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  ReplayResult result;
  try {
    result = replay(manifest, events);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitEngine;
  }
  for (const auto& c : result.commands) out << summarize(c) << '\n';
  try {
    write_file(out_path, save_composites(result.committed));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int demo_command(const std::string& name, std::ostream& out, std::ostream& err) {
  const auto fixture = demo_fixture(name);
  if (!fixture) {
    err << "error: unknown demo case " << name << "\n";
    return kExitUsage;
  }
  ReplayResult result;
  Manifest manifest;
  try {
    manifest = load_manifest(fixture->manifest);
    result = replay(manifest, load_trace(fixture->trace));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitEngine;
  }
  for (const auto& c : result.commands) out << summarize(c) << '\n';
  const auto problem = check_demo(name, manifest, result);
  if (!problem.empty()) {
    err << "expectation failed: " << problem << '\n';
    return kExitExpectation;
  }
  out << save_composite(result.committed.back()) << '\n';
  return kExitOk;
}

int infer_command(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  Manifest manifest;
  try {
    manifest = load_manifest(read_file(manifest_path));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const Catalog catalog(manifest.tables, manifest.relationships);
  for (const auto& [pair, rel] : catalog.relationships()) {
    if (pair.first >= pair.second) continue;  // each unordered pair once
    out << pair.first << ' ' << pair.second << ": " << to_string(rel.kind);
    if (rel.kind != RelationshipKind::None) out << " (" << rel.tableA << '.' << rel.aKey << " -> " << rel.tableB << '.' << rel.bKey << ')';
    out << (rel.source == RelationshipSource::Declared ? " declared" : " inferred") << '\n';
  }
  return kExitOk;
}

int validate_command(const std::string& manifest_path, const std::string& trace_path, std::ostream& out,
                     std::ostream& err) {
  if (manifest_path.empty() && trace_path.empty()) {
    err << "error: validate needs --manifest or --trace\n";
    return kExitUsage;
  }
  try {
    if (!manifest_path.empty()) {
      const auto m = load_manifest(read_file(manifest_path));
      out << manifest_path << ": ok (" << m.tables.size() << " tables, " << m.views.size() << " views)\n";
    }
    if (!trace_path.empty()) {
      const auto events = load_trace(read_file(trace_path));
      out << trace_path << ": ok (" << events.size() << " events)\n";
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

ReplayResult replay(const Manifest& manifest, const std::vector<InteractionEvent>& events) {
  ReplayResult result;
  result.final = make_session(manifest);
  for (const auto& e : events) {
    result.final = step(result.final, e);
    if (!result.final.lastCommand) continue;
    const auto& cmd = *result.final.lastCommand;
    if (const auto* c = std::get_if<ComposeCommand>(&cmd)) result.committed.push_back(c->spec);
    result.commands.push_back(cmd);
  }
  return result;
}

std::string summarize(const Command& command) {
  if (const auto* c = std::get_if<ComposeCommand>(&command)) {
    return "compose " + std::string(to_string(c->spec.type)) + " " + c->spec.id + " " + join(c->spec.constituents, ",");
  }
  const auto& d = std::get<DecomposeCommand>(command);
  std::vector<std::string> ids;
  for (const auto& v : d.restored) ids.push_back(v.id);
  return "decompose " + std::string(to_string(d.type)) + " " + d.compositeId + " " + join(ids, ",");
}

std::optional<DemoFixture> demo_fixture(std::string_view name) {
  if (std::find(std::begin(kDemoCases), std::end(kDemoCases), name) == std::end(kDemoCases)) return std::nullopt;
  return DemoFixture{demo_data::manifest(name), demo_data::trace(name)};
}

std::string check_demo(std::string_view name, const Manifest& manifest, const ReplayResult& result) {
  const auto expected = parse_composite_type(name);
  if (!expected) return "unknown demo case " + std::string(name);
  if (result.committed.empty()) return "nothing was committed";
  const auto& spec = result.committed.back();
  if (spec.type != *expected) {
    return "expected " + std::string(name) + ", committed " + std::string(to_string(spec.type));
  }
  if (!is_admissible(Catalog(manifest.tables, manifest.relationships)
                         .relationship(spec.sources.front().table, spec.sources.back().table)
                         .kind,
                     spec.type)) {
    return "committed type is not admissible";
  }
  switch (spec.type) {
    case CompositeType::Integrated: return check_integrated(manifest, spec);
    case CompositeType::Superimposed: return check_superimposed(manifest, spec);
    case CompositeType::Overloaded: return check_overloaded(manifest, spec);
    case CompositeType::Nested: return check_nested(manifest, spec);
    case CompositeType::Juxtaposed: return check_juxtaposed(manifest, spec);
  }
  return "unknown composite type";
}

std::string matrix_text() {
  std::string out;
  for (auto kind : kAllRelationshipKinds) {
    std::vector<std::string> types;
    for (auto type : kAllCompositeTypes) {
      if (is_admissible(kind, type)) types.emplace_back(to_string(type));
    }
    out += std::string(to_string(kind)) + ": " + join(types, ", ") + "\n";
  }
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Composite visualization engine: replay, inspect and serve embodied composition sessions"};
  app.require_subcommand(1);

  std::string manifest;
  std::string trace;
  std::string out_path;
  std::string thresholds;
  std::string demo_case;
  int port = 8080;

  auto* replay_cmd = app.add_subcommand("replay", "Apply a trace to a manifest and write committed composites");
  replay_cmd->add_option("--manifest", manifest, "Manifest (.manifest.json)")->required();
  replay_cmd->add_option("--trace", trace, "Event trace (.trace.jsonl)")->required();
  replay_cmd->add_option("--out", out_path, "Output (.composite.json)")->required();
  replay_cmd->add_option("--thresholds", thresholds, "Threshold overrides (JSON object)");

  auto* infer_cmd = app.add_subcommand("infer", "Print the relationship of every table pair");
  infer_cmd->add_option("--manifest", manifest, "Manifest (.manifest.json)")->required();

  auto* matrix_cmd = app.add_subcommand("matrix", "Print the admissibility matrix");

  auto* demo_cmd = app.add_subcommand("demo", "Replay a bundled scenario and check its result");
  demo_cmd->add_option("--case", demo_case, "juxtaposed | integrated | superimposed | overloaded | nested")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a manifest and/or trace");
  validate_cmd->add_option("--manifest", manifest, "Manifest (.manifest.json)");
  validate_cmd->add_option("--trace", trace, "Event trace (.trace.jsonl)");

  auto* serve_cmd = app.add_subcommand("serve", "Run the WebSocket session server on /session");
  serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  if (replay_cmd->parsed()) return replay_command(manifest, trace, out_path, thresholds, out, err);
  if (infer_cmd->parsed()) return infer_command(manifest, out, err);
  if (matrix_cmd->parsed()) {
    out << matrix_text();
    return kExitOk;
  }
  if (demo_cmd->parsed()) return demo_command(demo_case, out, err);
  if (validate_cmd->parsed()) return validate_command(manifest, trace, out, err);
  if (serve_cmd->parsed()) {
    try {
      serve_forever(static_cast<unsigned short>(port), out);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitEngine;
    }
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace vizcomp

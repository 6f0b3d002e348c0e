#include "vizcomp/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vizcomp/error.hpp"

namespace vizcomp {

std::string key_string(const Value& value) {
  if (const auto* text = std::get_if<std::string>(&value)) return *text;
  const double number = std::get<double>(value);
  char buffer[32];
  if (std::nearbyint(number) == number && std::abs(number) < 1e15) {
    std::snprintf(buffer, sizeof buffer, "%.0f", number == 0.0 ? 0.0 : number);
  } else {
    std::snprintf(buffer, sizeof buffer, "%.15g", number);
  }
  return buffer;
}

const Column* DataTable::column(std::string_view column_name) const {
  for (const auto& c : columns) {
    if (c.name == column_name) return &c;
  }
  return nullptr;
}

const Row* DataTable::find_row(std::string_view item) const {
  for (const auto& row : rows) {
    auto it = row.find(key);
    if (it != row.end() && key_string(it->second) == item) return &row;
  }
  return nullptr;
}

std::vector<std::string> DataTable::item_ids() const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (const auto& row : rows) {
    if (auto it = row.find(key); it != row.end()) ids.push_back(key_string(it->second));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::string> DataTable::measure_columns() const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.kind == ColumnKind::Quantitative && c.name != key) out.push_back(c.name);
  }
  return out;
}

std::vector<TableViolation> validate_table(const DataTable& table) {
  std::vector<TableViolation> out;
  std::set<std::string> names;
  for (const auto& c : table.columns) {
    if (!names.insert(c.name).second) out.push_back({"duplicate column", c.name});
  }
  if (table.column(table.key) == nullptr) {
    out.push_back({"missing key column", table.key});
  }
  std::set<Value> keys;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    for (const auto& c : table.columns) {
      auto it = row.find(c.name);
      if (it == row.end()) {
        out.push_back({"missing cell", "row " + std::to_string(i) + " column " + c.name});
        continue;
      }
      if (const auto* number = std::get_if<double>(&it->second); number && !std::isfinite(*number)) {
        out.push_back({"non-finite value", "row " + std::to_string(i) + " column " + c.name});
      }
      if (c.kind == ColumnKind::Quantitative && !std::holds_alternative<double>(it->second)) {
        out.push_back({"non-numeric value", "row " + std::to_string(i) + " column " + c.name});
      }
    }
    for (const auto& [name, value] : row) {
      if (table.column(name) == nullptr) {
        out.push_back({"unknown column", "row " + std::to_string(i) + " column " + name});
      }
    }
    if (auto it = row.find(table.key); it != row.end()) {
      if (!keys.insert(it->second).second) {
        out.push_back({"duplicate key", key_string(it->second)});
      }
    }
  }
  return out;
}

std::string_view to_string(RelationshipKind kind) {
  switch (kind) {
    case RelationshipKind::None: return "none";
    case RelationshipKind::ItemItem: return "item-item";
    case RelationshipKind::ItemGroup: return "item-group";
    case RelationshipKind::ItemDimension: return "item-dimension";
  }
  return "?";
}

std::string_view to_string(CompositeType type) {
  switch (type) {
    case CompositeType::Juxtaposed: return "juxtaposed";
    case CompositeType::Integrated: return "integrated";
    case CompositeType::Superimposed: return "superimposed";
    case CompositeType::Overloaded: return "overloaded";
    case CompositeType::Nested: return "nested";
  }
  return "?";
}

std::optional<RelationshipKind> parse_relationship_kind(std::string_view text) {
  for (auto kind : kAllRelationshipKinds) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::optional<CompositeType> parse_composite_type(std::string_view text) {
  for (auto type : kAllCompositeTypes) {
    if (to_string(type) == text) return type;
  }
  return std::nullopt;
}

std::set<CompositeType> allowed_composites(RelationshipKind kind) {
  std::set<CompositeType> out;
  for (auto type : kAllCompositeTypes) {
    if (is_admissible(kind, type)) out.insert(type);
  }
  return out;
}

namespace {

struct ColumnProfile {
  std::set<Value> values;
  bool unique = true;
};

ColumnProfile profile(const DataTable& table, const std::string& column) {
  ColumnProfile p;
  for (const auto& row : table.rows) {
    if (!p.values.insert(row.at(column)).second) p.unique = false;
  }
  return p;
}

std::size_t measures_excluding(const DataTable& table, const std::string& column) {
  auto measures = table.measure_columns();
  return static_cast<std::size_t>(
      std::count_if(measures.begin(), measures.end(), [&](const auto& m) { return m != column; }));
}

int precedence(RelationshipKind kind) {
  switch (kind) {
    case RelationshipKind::ItemItem: return 3;
    case RelationshipKind::ItemGroup: return 2;
    case RelationshipKind::ItemDimension: return 1;
    case RelationshipKind::None: return 0;
  }
  return 0;
}

Relationship make(RelationshipKind kind, const DataTable& item_side, const std::string& item_col,
                  const DataTable& other, const std::string& other_col) {
  return Relationship{kind, item_side.name, other.name, item_col, other_col, RelationshipSource::Inferred};
}

}  // namespace

Relationship infer_relationship(const DataTable& a, const DataTable& b) {
  auto sorted_names = [](const DataTable& t) {
    std::vector<std::string> names;
    for (const auto& c : t.columns) names.push_back(c.name);
    std::sort(names.begin(), names.end());
    return names;
  };
  const auto a_cols = sorted_names(a);
  const auto b_cols = sorted_names(b);

  std::map<std::string, ColumnProfile> b_profiles;
  for (const auto& cb : b_cols) b_profiles.emplace(cb, profile(b, cb));

  Relationship best{RelationshipKind::None, a.name, b.name, "", "", RelationshipSource::Inferred};
  for (const auto& ca : a_cols) {
    const auto pa = profile(a, ca);
    if (pa.values.empty()) continue;
    for (const auto& cb : b_cols) {
      const auto& pb = b_profiles.at(cb);
      if (pa.values != pb.values) continue;

      std::optional<Relationship> found;
      if (pa.unique && pb.unique) {
        const auto ma = measures_excluding(a, ca);
        const auto mb = measures_excluding(b, cb);
        if (std::max(ma, mb) >= 2) {
          found = mb >= ma ? make(RelationshipKind::ItemGroup, a, ca, b, cb)
                           : make(RelationshipKind::ItemGroup, b, cb, a, ca);
        } else {
          found = make(RelationshipKind::ItemItem, a, ca, b, cb);
        }
      } else if (pa.unique) {
        found = make(RelationshipKind::ItemDimension, a, ca, b, cb);
      } else if (pb.unique) {
        found = make(RelationshipKind::ItemDimension, b, cb, a, ca);
      }
      // Strictly greater keeps the first (lexicographically smallest) pair.
      if (found && precedence(found->kind) > precedence(best.kind)) best = *found;
    }
  }
  return best;
}

Relationship identity_relationship(const DataTable& table) {
  return Relationship{RelationshipKind::ItemItem, table.name, table.name, table.key, table.key,
                      RelationshipSource::Inferred};
}

std::vector<Correspondence> item_correspondences(const Relationship& rel, const DataTable& a,
                                                 const DataTable& b) {
  if (rel.kind == RelationshipKind::None) {
    throw Error(ErrorCode::KindIsNone, "relationship between " + rel.tableA + " and " + rel.tableB +
                                           " has kind none");
  }
  if (a.name != rel.tableA || b.name != rel.tableB) {
    throw Error(ErrorCode::TableMismatch, "relationship is between " + rel.tableA + " and " +
                                              rel.tableB + ", got " + a.name + " and " + b.name);
  }

  std::map<Value, std::vector<std::string>> b_by_value;
  for (const auto& row : b.rows) {
    b_by_value[row.at(rel.bKey)].push_back(key_string(row.at(b.key)));
  }
  for (auto& [value, items] : b_by_value) std::sort(items.begin(), items.end());

  std::vector<Correspondence> out;
  for (const auto& row : a.rows) {
    auto it = b_by_value.find(row.at(rel.aKey));
    if (it == b_by_value.end()) continue;
    Correspondence c{key_string(row.at(a.key)), it->second};
    if (rel.kind != RelationshipKind::ItemDimension) c.bItems.resize(1);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.aItem < y.aItem; });
  return out;
}

Relationship oriented(const Relationship& rel, std::string_view first) {
  if (rel.tableA == first) return rel;
  Relationship swapped = rel;
  std::swap(swapped.tableA, swapped.tableB);
  std::swap(swapped.aKey, swapped.bKey);
  return swapped;
}

std::vector<std::pair<std::string, std::string>> item_pairs(const Relationship& rel,
                                                            const DataTable& first,
                                                            const DataTable& second) {
  const bool first_is_a = rel.tableA == first.name;
  const DataTable& a = first_is_a ? first : second;
  const DataTable& b = first_is_a ? second : first;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& c : item_correspondences(rel, a, b)) {
    for (const auto& bi : c.bItems) {
      out.push_back(first_is_a ? std::pair{c.aItem, bi} : std::pair{bi, c.aItem});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Catalog::Catalog(std::vector<DataTable> tables, std::vector<Relationship> declared)
    : tables_(std::move(tables)) {
  auto key_of = [](const std::string& x, const std::string& y) {
    return x < y ? std::pair{x, y} : std::pair{y, x};
  };
  for (auto& rel : declared) {
    rel.source = RelationshipSource::Declared;
    relationships_[key_of(rel.tableA, rel.tableB)] = rel;
  }
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    for (std::size_t j = i; j < tables_.size(); ++j) {
      auto k = key_of(tables_[i].name, tables_[j].name);
      if (relationships_.count(k)) continue;
      relationships_[k] = i == j ? identity_relationship(tables_[i])
                                 : infer_relationship(tables_[i], tables_[j]);
    }
  }
}

const DataTable* Catalog::find_table(std::string_view name) const {
  for (const auto& t : tables_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const DataTable& Catalog::table(std::string_view name) const {
  if (const auto* t = find_table(name)) return *t;
  throw Error(ErrorCode::TableMismatch, "unknown table " + std::string(name));
}

const Relationship& Catalog::relationship(std::string_view x, std::string_view y) const {
  std::pair<std::string, std::string> k{std::string(x), std::string(y)};
  if (k.second < k.first) std::swap(k.first, k.second);
  auto it = relationships_.find(k);
  if (it == relationships_.end()) {
    throw Error(ErrorCode::TableMismatch, "no relationship between " + k.first + " and " + k.second);
  }
  return it->second;
}

}  // namespace vizcomp

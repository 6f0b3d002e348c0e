#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace vizcomp {

/// A cell value: text or a finite number.
using Value = std::variant<std::string, double>;

/// Stable textual form of a value, used as an item identifier.
std::string key_string(const Value& value);

enum class ColumnKind { Categorical, Quantitative };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Categorical;

  friend bool operator==(const Column&, const Column&) = default;
};

using Row = std::map<std::string, Value>;

struct DataTable {
  std::string name;
  std::string key;
  std::vector<Column> columns;
  std::vector<Row> rows;

  const Column* column(std::string_view column_name) const;
  /// Row whose key cell renders to `item`, or nullptr.
  const Row* find_row(std::string_view item) const;
  /// Item identifiers of every row, sorted.
  std::vector<std::string> item_ids() const;
  /// Quantitative columns other than the key.
  std::vector<std::string> measure_columns() const;

  friend bool operator==(const DataTable&, const DataTable&) = default;
};

struct TableViolation {
  std::string kind;  // "duplicate key", "missing cell", "duplicate column", ...
  std::string detail;
};

/// All invariant violations of `table`; empty means valid.
std::vector<TableViolation> validate_table(const DataTable& table);

enum class RelationshipKind { None, ItemItem, ItemGroup, ItemDimension };
inline constexpr std::array kAllRelationshipKinds{RelationshipKind::None, RelationshipKind::ItemItem,
                                                  RelationshipKind::ItemGroup,
                                                  RelationshipKind::ItemDimension};

enum class RelationshipSource { Declared, Inferred };

/// Relationship between two tables. For the asymmetric kinds the A side is the
/// item side: for ItemGroup the table with fewer measures, for ItemDimension
/// the table whose single item fans out to many rows of B.
struct Relationship {
  RelationshipKind kind = RelationshipKind::None;
  std::string tableA;
  std::string tableB;
  std::string aKey;  // empty when kind == None
  std::string bKey;
  RelationshipSource source = RelationshipSource::Inferred;

  friend bool operator==(const Relationship&, const Relationship&) = default;
};

enum class CompositeType { Juxtaposed, Integrated, Superimposed, Overloaded, Nested };
inline constexpr std::array kAllCompositeTypes{CompositeType::Juxtaposed, CompositeType::Integrated,
                                               CompositeType::Superimposed, CompositeType::Overloaded,
                                               CompositeType::Nested};

std::string_view to_string(RelationshipKind kind);
std::string_view to_string(CompositeType type);
std::optional<RelationshipKind> parse_relationship_kind(std::string_view text);
std::optional<CompositeType> parse_composite_type(std::string_view text);

/// Admissibility of each composite type per data relationship. Rows follow
/// kAllRelationshipKinds, columns kAllCompositeTypes.
inline constexpr std::array<std::array<bool, 5>, 4> kConstraintMatrix{{
    {true, false, false, false, false},  // none
    {true, true, true, true, true},      // item-item
    {true, true, true, false, true},     // item-group
    {true, true, true, true, false},     // item-dimension
}};

constexpr bool is_admissible(RelationshipKind kind, CompositeType type) {
  return kConstraintMatrix[static_cast<std::size_t>(kind)][static_cast<std::size_t>(type)];
}

std::set<CompositeType> allowed_composites(RelationshipKind kind);

/// Infers the relationship between two valid tables. Precedence is
/// ItemItem > ItemGroup > ItemDimension > None; ties between witnessing column
/// pairs go to the lexicographically smallest (column of a, column of b).
Relationship infer_relationship(const DataTable& a, const DataTable& b);

/// The identity relationship of a table with itself.
Relationship identity_relationship(const DataTable& table);

/// One item of A and the B items it corresponds to. ItemItem and ItemGroup
/// produce exactly one B item; ItemDimension one or more.
struct Correspondence {
  std::string aItem;
  std::vector<std::string> bItems;

  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

/// Item correspondences of `rel`, sorted by A item. Throws KindIsNone or
/// TableMismatch.
std::vector<Correspondence> item_correspondences(const Relationship& rel, const DataTable& a,
                                                 const DataTable& b);

/// `rel` re-expressed with `first` on the A side, swapping roles if needed.
/// Only the correspondence direction changes; the kind is preserved.
Relationship oriented(const Relationship& rel, std::string_view first);

/// Pairs (item of `first`, item of `second`) for every correspondence,
/// regardless of which side `rel` calls A.
std::vector<std::pair<std::string, std::string>> item_pairs(const Relationship& rel,
                                                            const DataTable& first,
                                                            const DataTable& second);

/// Tables plus every pairwise relationship, resolved once. Declared
/// relationships override inference.
class Catalog {
 public:
  Catalog() = default;
  Catalog(std::vector<DataTable> tables, std::vector<Relationship> declared);

  const DataTable& table(std::string_view name) const;
  const DataTable* find_table(std::string_view name) const;
  const std::vector<DataTable>& tables() const { return tables_; }

  /// Relationship between two tables, oriented as resolved (A is the item side).
  const Relationship& relationship(std::string_view x, std::string_view y) const;

  /// Every resolved pair, for inspection.
  const std::map<std::pair<std::string, std::string>, Relationship>& relationships() const {
    return relationships_;
  }

 private:
  std::vector<DataTable> tables_;
  std::map<std::pair<std::string, std::string>, Relationship> relationships_;
};

}  // namespace vizcomp

#pragma once
// Builders and independent oracles shared by the unit tests and the
// acceptance runner. Nothing here calls the code it checks.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vizcomp/data_model.hpp"
#include "vizcomp/geometry.hpp"
#include "vizcomp/scene.hpp"

namespace vizcomp::test {

inline DataTable table(std::string name, std::string key, std::vector<Column> columns, std::vector<Row> rows) {
  return DataTable{std::move(name), std::move(key), std::move(columns), std::move(rows)};
}

inline Column cat(std::string name) { return {std::move(name), ColumnKind::Categorical}; }
inline Column num(std::string name) { return {std::move(name), ColumnKind::Quantitative}; }

inline ViewSpec view(std::string id, ChartKind chart, std::string table_name, Vec3 pos,
                     Vec3 half = Vec3(0.5, 0.4, 0.01)) {
  ViewSpec v;
  v.id = std::move(id);
  v.chart = chart;
  v.table = std::move(table_name);
  v.halfExtents = half;
  v.pose.position = pos;
  return v;
}

inline Eigen::Quaterniond random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

inline Rigid random_rigid(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  return {random_rotation(rng), Vec3(u(rng), u(rng), u(rng))};
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------
// Relationship oracle. Works on the raw match matrix between two columns:
// match[i][j] is true when row i of A and row j of B agree on the pair.

struct OracleResult {
  RelationshipKind kind = RelationshipKind::None;
  std::string itemTable;  // A side of the asymmetric kinds
  std::string aColumn;    // witness column on the A side of the input order
  std::string bColumn;
};

inline std::size_t oracle_measures(const DataTable& t, const std::string& except) {
  std::size_t n = 0;
  for (const auto& c : t.columns) {
    if (c.kind == ColumnKind::Quantitative && c.name != t.key && c.name != except) ++n;
  }
  return n;
}

inline OracleResult oracle_relationship(const DataTable& a, const DataTable& b) {
  auto rank = [](RelationshipKind k) {
    switch (k) {
      case RelationshipKind::ItemItem: return 3;
      case RelationshipKind::ItemGroup: return 2;
      case RelationshipKind::ItemDimension: return 1;
      default: return 0;
    }
  };
  std::vector<std::string> ac, bc;
  for (const auto& c : a.columns) ac.push_back(c.name);
  for (const auto& c : b.columns) bc.push_back(c.name);
  std::sort(ac.begin(), ac.end());
  std::sort(bc.begin(), bc.end());

  OracleResult best{RelationshipKind::None, a.name, "", ""};
  if (a.rows.empty() || b.rows.empty()) return best;
  const std::size_t na = a.rows.size(), nb = b.rows.size();
  for (const auto& ca : ac) {
    for (const auto& cb : bc) {
      std::vector<std::size_t> deg_a(na, 0), deg_b(nb, 0);
      for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
          if (a.rows[i].at(ca) == b.rows[j].at(cb)) {
            ++deg_a[i];
            ++deg_b[j];
          }
        }
      }
      // Every row of each side must take part; otherwise the columns do not
      // share their value set.
      const bool a_total = std::all_of(deg_a.begin(), deg_a.end(), [](auto d) { return d >= 1; });
      const bool b_total = std::all_of(deg_b.begin(), deg_b.end(), [](auto d) { return d >= 1; });
      if (!a_total || !b_total) continue;
      // A many-to-one map B -> A exists when every B row has exactly one A
      // partner; the reverse map when every A row has exactly one B partner.
      const bool a_unique = std::all_of(deg_b.begin(), deg_b.end(), [](auto d) { return d == 1; });
      const bool b_unique = std::all_of(deg_a.begin(), deg_a.end(), [](auto d) { return d == 1; });

      OracleResult found{RelationshipKind::None, a.name, ca, cb};
      if (a_unique && b_unique) {
        const auto ma = oracle_measures(a, ca), mb = oracle_measures(b, cb);
        found.kind = std::max(ma, mb) >= 2 ? RelationshipKind::ItemGroup : RelationshipKind::ItemItem;
        found.itemTable = (found.kind == RelationshipKind::ItemGroup && mb < ma) ? b.name : a.name;
      } else if (a_unique) {
        found.kind = RelationshipKind::ItemDimension;  // one A row fans out to several B rows
        found.itemTable = a.name;
      } else if (b_unique) {
        found.kind = RelationshipKind::ItemDimension;
        found.itemTable = b.name;
      }
      if (rank(found.kind) > rank(best.kind)) best = found;
    }
  }
  return best;
}

/// Random valid table: a unique key column plus up to three value columns
/// drawn from small pools so that columns of different tables often match.
inline DataTable random_table(std::mt19937& rng, const std::string& name) {
  std::uniform_int_distribution<int> nrows(1, 6), ncols(1, 4), coin(0, 1), small(0, 3);
  const std::vector<std::string> words{"a", "b", "c", "d", "e", "f", "g"};
  const int rows = nrows(rng);
  const int cols = ncols(rng);

  DataTable t;
  t.name = name;
  std::vector<std::string> names{"k", "u", "v", "w"};
  std::vector<bool> numeric(static_cast<std::size_t>(cols));
  for (int c = 0; c < cols; ++c) {
    numeric[static_cast<std::size_t>(c)] = coin(rng) == 1;
    t.columns.push_back({names[static_cast<std::size_t>(c)],
                         numeric[static_cast<std::size_t>(c)] ? ColumnKind::Quantitative : ColumnKind::Categorical});
  }
  t.key = "k";
  // Key values without replacement; sometimes a shifted window so tables overlap partially.
  const int offset = small(rng) == 0 ? 1 : 0;
  t.rows.resize(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    auto& row = t.rows[static_cast<std::size_t>(r)];
    if (numeric[0]) {
      row["k"] = static_cast<double>(r + offset);
    } else {
      row["k"] = words[static_cast<std::size_t>(r + offset)];
    }
    for (int c = 1; c < cols; ++c) {
      const auto& cn = names[static_cast<std::size_t>(c)];
      const int pick = std::uniform_int_distribution<int>(0, std::max(0, rows - 1))(rng);
      if (numeric[static_cast<std::size_t>(c)]) {
        row[cn] = static_cast<double>(pick);
      } else {
        row[cn] = words[static_cast<std::size_t>(pick)];
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Overlap margin oracle. Solves max t such that some point x lies inside both
// boxes with every face constraint holding with slack t. t > 0: the boxes
// share interior, t < 0: they are disjoint, t = 0: they touch. The LP has
// four unknowns (x, t); its optimum sits on a vertex where four constraints
// are active, so enumerating all 4-subsets of the 12 face constraints is exact.

inline double overlap_margin(const Obb& a, const Obb& b) {
  std::vector<Eigen::Vector4d> rows;
  std::vector<double> rhs;
  for (const Obb* box : {&a, &b}) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 n = box->axes.col(k);
      const double c = n.dot(box->center);
      for (double s : {1.0, -1.0}) {
        // s*n.x <= s*c + h  ->  s*n.x + t <= s*c + h
        rows.emplace_back(s * n.x(), s * n.y(), s * n.z(), 1.0);
        rhs.push_back(s * c + box->halfExtents[k]);
      }
    }
  }
  const std::size_t m = rows.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k)
        for (std::size_t l = k + 1; l < m; ++l) {
          Eigen::Matrix4d M;
          M.row(0) = rows[i];
          M.row(1) = rows[j];
          M.row(2) = rows[k];
          M.row(3) = rows[l];
          const Eigen::FullPivLU<Eigen::Matrix4d> lu(M);
          if (!lu.isInvertible()) continue;
          const Eigen::Vector4d sol = lu.solve(Eigen::Vector4d(rhs[i], rhs[j], rhs[k], rhs[l]));
          if (sol[3] <= best) continue;
          bool feasible = true;
          for (std::size_t r = 0; r < m && feasible; ++r) feasible = rows[r].dot(sol) <= rhs[r] + 1e-10;
          if (feasible) best = sol[3];
        }
  return best;
}

/// Point-sampling witness: some sampled point of one box (grid over its
/// surface and interior) lies inside the other.
inline bool sampled_overlap(const Obb& a, const Obb& b, int steps = 12) {
  auto probe = [steps](const Obb& x, const Obb& y) {
    for (int i = 0; i <= steps; ++i)
      for (int j = 0; j <= steps; ++j)
        for (int k = 0; k <= steps; ++k) {
          const Vec3 f(2.0 * i / steps - 1.0, 2.0 * j / steps - 1.0, 2.0 * k / steps - 1.0);
          const Vec3 p = x.center + x.axes * f.cwiseProduct(x.halfExtents);
          if (y.contains(p)) return true;
        }
    return false;
  };
  return probe(a, b) || probe(b, a);
}

/// Random box pair: mixed sizes including thin panels, and a share of pairs
/// with a common orientation so the edge cross products degenerate.
inline std::pair<Obb, Obb> random_obb_pair(std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(-0.8, 0.8), ext(0.05, 0.6), u(0.0, 1.0);
  auto box = [&](const Eigen::Quaterniond& q) {
    Obb o;
    o.center = Vec3(pos(rng), pos(rng), pos(rng));
    o.axes = q.toRotationMatrix();
    o.halfExtents = Vec3(ext(rng), ext(rng), u(rng) < 0.3 ? 0.01 : ext(rng));
    return o;
  };
  const auto qa = random_rotation(rng);
  const auto qb = u(rng) < 0.2 ? qa : random_rotation(rng);
  return {box(qa), box(qb)};
}

}  // namespace vizcomp::test

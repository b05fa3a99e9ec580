#include "sobocert/covering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sobocert {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[a] = b;
  }
};

double measure_of(const std::vector<PointId>& points,
                  const std::vector<double>& weights) {
  double total = 0.0;
  for (PointId x : points) total += weights[x];
  return total;
}

std::vector<PointId> sorted_union(const std::vector<std::vector<PointId>*>& sets) {
  std::vector<PointId> out;
  for (const auto* s : sets) out.insert(out.end(), s->begin(), s->end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool sorted_intersects(const std::vector<PointId>& a,
                       const std::vector<PointId>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

bool sorted_contains_all(const std::vector<PointId>& outer,
                         const std::vector<PointId>& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

/// Piece adjacency from neighbor pairs: two pieces touch when some point of
/// one is a neighbor of (or equal to) a point of the other.
std::vector<std::set<std::size_t>> piece_adjacency(
    const FiniteMetricMeasureSpace& space,
    const std::vector<std::size_t>& point_to_piece, std::size_t piece_count) {
  std::vector<std::set<std::size_t>> adj(piece_count);
  for (const auto& pair : space.neighbor_pairs()) {
    const std::size_t pa = point_to_piece[pair.a];
    const std::size_t pb = point_to_piece[pair.b];
    if (pa == GoodCovering::npos || pb == GoodCovering::npos) continue;
    if (pa != pb) {
      adj[pa].insert(pb);
      adj[pb].insert(pa);
    }
  }
  return adj;
}

}  // namespace

std::size_t GoodCovering::piece_of(PointId x) const {
  if (x >= point_to_piece_.size()) return npos;
  return point_to_piece_[x];
}

GoodCovering build_annuli_covering(const FiniteMetricMeasureSpace& space,
                                   double kappa) {
  if (!(kappa > 1.0)) {
    throw Error(ErrorCode::KappaOutOfRange, "kappa must exceed 1");
  }
  if (!space.connected()) {
    throw Error(ErrorCode::Disconnected, "space must be connected");
  }
  const std::size_t n = space.point_count();
  const PointId base = space.base_point();
  const double min_r = space.min_positive_radial();
  const double max_r = space.max_radial();

  // Level boundaries R_i = kappa^i. The ball level is the smallest i with
  // kappa^i strictly above the innermost positive radius, so a point
  // sitting exactly on a dyadic boundary lands inside the ball rather than
  // leaving an empty first annulus behind it.
  int level_min =
      static_cast<int>(std::ceil(std::log(min_r) / std::log(kappa) - 1e-12));
  auto radius_at = [&](int i) { return std::pow(kappa, i); };
  while (radius_at(level_min) <= min_r * (1.0 + 1e-12)) ++level_min;

  auto level_of_radius = [&](double r, int ball_level) {
    if (r <= radius_at(ball_level)) return ball_level;
    int i = ball_level + 1;
    while (r > radius_at(i)) ++i;
    return i;
  };

  int level_max = level_min;
  while (radius_at(level_max) < max_r) ++level_max;

  const int level_count = level_max - level_min + 1;
  std::vector<int> raw_level(n, -1);
  std::vector<std::vector<PointId>> level_points(level_count);
  for (std::size_t x = 0; x < n; ++x) {
    if (x == base) continue;
    const int lvl = level_of_radius(space.radial(static_cast<PointId>(x)),
                                    level_min);
    raw_level[x] = lvl;
    level_points[lvl - level_min].push_back(static_cast<PointId>(x));
  }
  for (int lvl = level_min + 1; lvl <= level_max; ++lvl) {
    if (level_points[lvl - level_min].empty()) {
      throw Error(ErrorCode::EmptyLevel,
                  "annulus at level " + std::to_string(lvl) +
                      " contains no points; densify the sample");
    }
  }
  if (level_points[0].empty()) {
    throw Error(ErrorCode::EmptyLevel, "central ball contains no points");
  }

  // Raw components per level. The ball's components are computed with the
  // base point present, so pieces that meet only through it stay whole.
  struct RawPiece {
    std::vector<PointId> points;
    int level;
    bool kept = true;
    bool alive = true;
    double lambda = 0.0;
  };
  std::vector<RawPiece> raw;
  std::vector<std::size_t> point_to_raw(n, GoodCovering::npos);

  for (int lvl = level_min; lvl <= level_max; ++lvl) {
    std::vector<PointId> pts = level_points[lvl - level_min];
    std::vector<PointId> with_base = pts;
    if (lvl == level_min) with_base.push_back(base);
    std::sort(with_base.begin(), with_base.end());
    std::vector<int> local(n, -1);
    for (std::size_t idx = 0; idx < with_base.size(); ++idx) {
      local[with_base[idx]] = static_cast<int>(idx);
    }
    UnionFind uf(with_base.size());
    for (const auto& pair : space.neighbor_pairs()) {
      const int la = local[pair.a];
      const int lb = local[pair.b];
      if (la >= 0 && lb >= 0) uf.unite(la, lb);
    }
    std::map<int, std::vector<PointId>> comps;
    for (std::size_t idx = 0; idx < with_base.size(); ++idx) {
      if (with_base[idx] == base) continue;
      comps[uf.find(static_cast<int>(idx))].push_back(with_base[idx]);
    }
    for (auto& [root, points] : comps) {
      RawPiece piece;
      std::sort(points.begin(), points.end());
      piece.points = std::move(points);
      piece.level = lvl;
      piece.lambda = measure_of(piece.points, space.lambda_weights());
      for (PointId x : piece.points) point_to_raw[x] = raw.size();
      raw.push_back(std::move(piece));
    }
  }

  // Keep rule: a component survives when its neighbor-extended set meets
  // the next outer annulus; the ball and the outermost level always stay.
  std::vector<char> reaches_out(raw.size(), 0);
  for (const auto& pair : space.neighbor_pairs()) {
    for (int dir = 0; dir < 2; ++dir) {
      const PointId x = dir ? pair.b : pair.a;
      const PointId y = dir ? pair.a : pair.b;
      const std::size_t px = point_to_raw[x];
      if (px == GoodCovering::npos) continue;
      if (y == base) continue;
      if (raw_level[y] == raw[px].level + 1) reaches_out[px] = 1;
    }
  }
  for (std::size_t pi = 0; pi < raw.size(); ++pi) {
    raw[pi].kept = raw[pi].level == level_min || raw[pi].level == level_max ||
                   reaches_out[pi];
  }

  // Merge each dropped component into the previous-level component it
  // touches with the largest lambda measure (ties toward smaller index).
  for (int lvl = level_min + 1; lvl <= level_max; ++lvl) {
    for (std::size_t pi = 0; pi < raw.size(); ++pi) {
      if (raw[pi].level != lvl || raw[pi].kept) continue;
      std::size_t host = GoodCovering::npos;
      for (const auto& pair : space.neighbor_pairs()) {
        for (int dir = 0; dir < 2; ++dir) {
          const PointId x = dir ? pair.b : pair.a;
          const PointId y = dir ? pair.a : pair.b;
          if (point_to_raw[x] != pi) continue;
          const std::size_t py = point_to_raw[y];
          if (py == GoodCovering::npos || !raw[py].alive) continue;
          if (raw[py].level != lvl - 1) continue;
          if (host == GoodCovering::npos ||
              raw[py].lambda > raw[host].lambda ||
              (raw[py].lambda == raw[host].lambda && py < host)) {
            host = py;
          }
        }
      }
      if (host == GoodCovering::npos) {
        throw Error(ErrorCode::Disconnected,
                    "dropped component touches no previous-level component");
      }
      auto& hp = raw[host];
      hp.points.insert(hp.points.end(), raw[pi].points.begin(),
                       raw[pi].points.end());
      std::sort(hp.points.begin(), hp.points.end());
      hp.lambda += raw[pi].lambda;
      for (PointId x : raw[pi].points) point_to_raw[x] = host;
      raw[pi].alive = false;
      raw[pi].points.clear();
    }
  }

  GoodCovering covering;
  covering.kappa = kappa;
  covering.level_min = level_min;
  covering.level_max = level_max;
  covering.point_to_piece_.assign(n, GoodCovering::npos);

  std::vector<std::size_t> raw_to_piece(raw.size(), GoodCovering::npos);
  std::map<int, int> next_label;
  for (std::size_t pi = 0; pi < raw.size(); ++pi) {
    if (!raw[pi].alive) continue;
    CoveringPiece piece;
    piece.u = raw[pi].points;
    piece.level = raw[pi].level;
    piece.label = next_label[raw[pi].level]++;
    raw_to_piece[pi] = covering.pieces.size();
    for (PointId x : piece.u) {
      covering.point_to_piece_[x] = covering.pieces.size();
    }
    covering.pieces.push_back(std::move(piece));
  }

  const std::size_t piece_count = covering.pieces.size();
  auto adjacency =
      piece_adjacency(space, covering.point_to_piece_, piece_count);

  // U* = union of touching pieces (including itself); U# = union of the
  // U* of pieces whose U* touches this piece's U*.
  std::vector<std::vector<std::size_t>> star_sets(piece_count);
  for (std::size_t pi = 0; pi < piece_count; ++pi) {
    star_sets[pi].push_back(pi);
    for (std::size_t pj : adjacency[pi]) star_sets[pi].push_back(pj);
    std::sort(star_sets[pi].begin(), star_sets[pi].end());
    std::vector<std::vector<PointId>*> sets;
    for (std::size_t pj : star_sets[pi]) sets.push_back(&covering.pieces[pj].u);
    covering.pieces[pi].ustar = sorted_union(sets);
  }
  // Stars touch when they share a piece or some pieces of the two stars
  // are adjacent.
  auto stars_touch = [&](std::size_t a, std::size_t b) {
    for (std::size_t pa : star_sets[a]) {
      for (std::size_t pb : star_sets[b]) {
        if (pa == pb || adjacency[pa].count(pb)) return true;
      }
    }
    return false;
  };
  for (std::size_t pi = 0; pi < piece_count; ++pi) {
    std::vector<std::vector<PointId>*> sets;
    for (std::size_t pj = 0; pj < piece_count; ++pj) {
      if (stars_touch(pi, pj)) sets.push_back(&covering.pieces[pj].ustar);
    }
    covering.pieces[pi].usharp = sorted_union(sets);
  }

  // Merge map over touching pairs: either endpoint's star contains both
  // U's; pick the one giving the smaller measure ratio.
  for (std::size_t pi = 0; pi < piece_count; ++pi) {
    for (std::size_t pj : adjacency[pi]) {
      if (pj <= pi) continue;
      auto ratio_for = [&](std::size_t k) {
        const auto& star = covering.pieces[k].ustar;
        const double ls = measure_of(star, space.lambda_weights());
        const double ms = measure_of(star, space.mu_weights());
        const double li = measure_of(covering.pieces[pi].u, space.lambda_weights());
        const double lj = measure_of(covering.pieces[pj].u, space.lambda_weights());
        const double mi = measure_of(covering.pieces[pi].u, space.mu_weights());
        const double mj = measure_of(covering.pieces[pj].u, space.mu_weights());
        return std::max(ls / std::min(li, lj), ms / std::min(mi, mj));
      };
      const std::size_t k = ratio_for(pi) <= ratio_for(pj) ? pi : pj;
      covering.merge_map.push_back({pi, pj, k});
    }
  }

  // Tight constants.
  auto validation = validate_covering(space, covering);
  covering.q1 = validation.q1_tight;
  covering.q2 = validation.q2_tight;
  return covering;
}

CoveringValidation validate_covering(const FiniteMetricMeasureSpace& space,
                                     const GoodCovering& covering) {
  CoveringValidation report;
  const std::size_t n = space.point_count();
  const std::size_t piece_count = covering.pieces.size();

  // (i) the U's partition the points of positive radius.
  std::vector<int> owners(n, 0);
  for (const auto& piece : covering.pieces) {
    for (PointId x : piece.u) ++owners[x];
  }
  for (std::size_t x = 0; x < n; ++x) {
    const bool is_base = x == space.base_point();
    if (is_base && owners[x] != 0) {
      report.violations.push_back(
          {1, "base point belongs to a piece"});
    }
    if (!is_base && owners[x] == 0) {
      report.violations.push_back(
          {1, "point " + std::to_string(x) + " is uncovered"});
    }
    if (!is_base && owners[x] > 1) {
      report.violations.push_back(
          {1, "point " + std::to_string(x) + " lies in several pieces"});
    }
  }

  // (ii) U subset of U* subset of U#.
  for (std::size_t pi = 0; pi < piece_count; ++pi) {
    const auto& piece = covering.pieces[pi];
    if (!sorted_contains_all(piece.ustar, piece.u) ||
        !sorted_contains_all(piece.usharp, piece.ustar)) {
      report.violations.push_back(
          {2, "piece " + std::to_string(pi) + " breaks U in U* in U#"});
    }
  }

  // (iii) tight overlap constant over U# intersections.
  std::size_t q1 = 0;
  for (std::size_t pi = 0; pi < piece_count; ++pi) {
    std::size_t count = 0;
    for (std::size_t pj = 0; pj < piece_count; ++pj) {
      if (sorted_intersects(covering.pieces[pi].usharp,
                            covering.pieces[pj].usharp)) {
        ++count;
      }
    }
    q1 = std::max(q1, count);
  }
  report.q1_tight = q1;
  if (covering.q1 < q1) {
    report.violations.push_back(
        {3, "declared q1 " + std::to_string(covering.q1) +
                " below tight value " + std::to_string(q1)});
  }

  // Touching pairs, recomputed from the neighbor relation.
  std::vector<std::size_t> point_to_piece(n, GoodCovering::npos);
  for (std::size_t pi = 0; pi < piece_count; ++pi) {
    for (PointId x : covering.pieces[pi].u) point_to_piece[x] = pi;
  }
  auto adjacency = piece_adjacency(space, point_to_piece, piece_count);

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> merge_lookup;
  for (const auto& entry : covering.merge_map) {
    merge_lookup[{entry.i, entry.j}] = entry.k;
    merge_lookup[{entry.j, entry.i}] = entry.k;
  }

  // (iv) and (v): merged star contains both U's, with bounded ratios.
  double q2 = 0.0;
  for (std::size_t pi = 0; pi < piece_count; ++pi) {
    for (std::size_t pj : adjacency[pi]) {
      if (pj <= pi) continue;
      auto it = merge_lookup.find({pi, pj});
      if (it == merge_lookup.end()) {
        report.violations.push_back(
            {4, "touching pair (" + std::to_string(pi) + "," +
                    std::to_string(pj) + ") has no merge piece"});
        continue;
      }
      const auto& star = covering.pieces[it->second].ustar;
      if (!sorted_contains_all(star, covering.pieces[pi].u) ||
          !sorted_contains_all(star, covering.pieces[pj].u)) {
        report.violations.push_back(
            {4, "merge piece " + std::to_string(it->second) +
                    " does not contain U_" + std::to_string(pi) + " union U_" +
                    std::to_string(pj)});
        continue;
      }
      const double ls = measure_of(star, space.lambda_weights());
      const double ms = measure_of(star, space.mu_weights());
      const double li =
          measure_of(covering.pieces[pi].u, space.lambda_weights());
      const double lj =
          measure_of(covering.pieces[pj].u, space.lambda_weights());
      const double mi = measure_of(covering.pieces[pi].u, space.mu_weights());
      const double mj = measure_of(covering.pieces[pj].u, space.mu_weights());
      q2 = std::max({q2, ls / std::min(li, lj), ms / std::min(mi, mj)});
    }
  }
  report.q2_tight = q2;
  if (covering.q2 < q2 * (1.0 - 1e-12)) {
    report.violations.push_back(
        {5, "declared q2 " + std::to_string(covering.q2) +
                " below tight value " + std::to_string(q2)});
  }
  return report;
}

WeightedGraph covering_graph(const FiniteMetricMeasureSpace& space,
                             const GoodCovering& covering,
                             const std::function<double(PointId)>& weight_fn) {
  const std::size_t piece_count = covering.pieces.size();
  std::vector<double> measures(piece_count, 0.0);
  for (std::size_t pi = 0; pi < piece_count; ++pi) {
    for (PointId x : covering.pieces[pi].u) measures[pi] += weight_fn(x);
  }
  std::vector<std::size_t> point_to_piece(space.point_count(),
                                          GoodCovering::npos);
  for (std::size_t pi = 0; pi < piece_count; ++pi) {
    for (PointId x : covering.pieces[pi].u) point_to_piece[x] = pi;
  }
  auto adjacency = piece_adjacency(space, point_to_piece, piece_count);
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t pi = 0; pi < piece_count; ++pi) {
    for (std::size_t pj : adjacency[pi]) {
      if (pj > pi) {
        edges.emplace_back(static_cast<VertexId>(pi),
                           static_cast<VertexId>(pj));
      }
    }
  }
  return WeightedGraph(std::move(measures), edges);
}

RcaBound rca_branch_bound(double p, double c_doubling, double c_poincare,
                          double c_volume, double nu) {
  if (!(nu > p)) {
    throw Error(ErrorCode::NuNotAbovePorder, "need nu > p");
  }
  if (!(c_doubling >= 1.0) || !(c_poincare > 0.0) || !(c_volume > 0.0) ||
      !(p >= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "need C_D >= 1, C_P > 0, C_o > 0, p >= 1");
  }
  const double log2_bound = p + std::log2(c_poincare) +
                            2.0 * std::log2(c_doubling) +
                            std::log2(c_doubling) * std::log2(121.0) + nu -
                            std::log2(c_volume);
  RcaBound bound;
  const double raw = std::ceil(log2_bound / (nu - p) - 1e-9);
  bound.l_max = std::max<std::int64_t>(3, static_cast<std::int64_t>(raw));
  bound.kappa0 = std::exp2(static_cast<double>(bound.l_max + 2));
  return bound;
}

std::string GoodCovering::to_json_string() const {
  nlohmann::ordered_json j;
  j["kappa"] = kappa;
  j["level_min"] = level_min;
  j["level_max"] = level_max;
  j["q1"] = q1;
  j["q2"] = q2;
  j["pieces"] = nlohmann::ordered_json::array();
  for (const auto& piece : pieces) {
    nlohmann::ordered_json pj;
    pj["level"] = piece.level;
    pj["label"] = piece.label;
    pj["u"] = piece.u;
    pj["ustar"] = piece.ustar;
    pj["usharp"] = piece.usharp;
    j["pieces"].push_back(pj);
  }
  j["merge"] = nlohmann::ordered_json::array();
  for (const auto& entry : merge_map) {
    j["merge"].push_back({entry.i, entry.j, entry.k});
  }
  return j.dump(2);
}

std::string CoveringValidation::to_json_string() const {
  nlohmann::ordered_json j;
  j["q1_tight"] = q1_tight;
  j["q2_tight"] = q2_tight;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& violation : violations) {
    nlohmann::ordered_json vj;
    vj["condition"] = violation.condition;
    vj["description"] = violation.description;
    j["violations"].push_back(vj);
  }
  return j.dump(2);
}

}  // namespace sobocert

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sobocert/graph.hpp"
#include "sobocert/space.hpp"

namespace sobocert {

/// One triple (U, U*, U#) of the covering, with its annulus level.
struct CoveringPiece {
  std::vector<PointId> u;
  std::vector<PointId> ustar;
  std::vector<PointId> usharp;
  int level = 0;
  int label = 0;
};

struct MergeEntry {
  std::size_t i;
  std::size_t j;
  std::size_t k;  // piece index with U_i and U_j inside U*_k
};

/// Good covering of a finite metric-measure space by annulus components.
/// The base point is the exceptional null set and belongs to no piece.
struct GoodCovering {
  std::vector<CoveringPiece> pieces;
  std::vector<MergeEntry> merge_map;  // one entry per touching pair i < j
  double kappa = 2.0;
  int level_min = 0;  // ball level
  int level_max = 0;
  std::size_t q1 = 0;
  double q2 = 0.0;

  std::size_t piece_of(PointId x) const;  // index into pieces, or npos
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::string to_json_string() const;

 private:
  friend GoodCovering build_annuli_covering(const FiniteMetricMeasureSpace&,
                                            double);
  std::vector<std::size_t> point_to_piece_;
};

/// Builds the annuli covering at ratio kappa: levels are the annuli
/// (kappa^{i-1}, kappa^i] plus the central ball, raw pieces are the
/// connected components of each annulus, and a component whose
/// neighbor-extended set misses the next outer annulus is glued to a
/// previous-level component it touches (largest lambda measure wins ties
/// toward smaller index).
GoodCovering build_annuli_covering(const FiniteMetricMeasureSpace& space,
                                   double kappa);

struct CoveringViolation {
  int condition = 0;  // 1..5 as in the good-covering definition
  std::string description;
};

struct CoveringValidation {
  std::size_t q1_tight = 0;
  double q2_tight = 0.0;
  std::vector<CoveringViolation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_json_string() const;
};

/// Recomputes all five covering conditions from scratch against the space.
CoveringValidation validate_covering(const FiniteMetricMeasureSpace& space,
                                     const GoodCovering& covering);

/// One vertex per piece with vertexMeasure = sum of weight_fn over U;
/// edges between pieces whose neighbor-extended point sets touch.
WeightedGraph covering_graph(const FiniteMetricMeasureSpace& space,
                             const GoodCovering& covering,
                             const std::function<double(PointId)>& weight_fn);

struct RcaBound {
  std::int64_t l_max = 0;
  double kappa0 = 0.0;
};

/// Branch-length bound for relatively connected annuli:
/// L = ceil(log2(2^p C_P C_D^2 121^{log2 C_D} 2^nu / C_o) / (nu - p)),
/// clamped below at 3, and kappa0 = 2^{L+2}. The volume constant enters
/// as 1/C_o: a weaker volume lower bound weakens the branch control.
RcaBound rca_branch_bound(double p, double c_doubling, double c_poincare,
                          double c_volume, double nu);

}  // namespace sobocert

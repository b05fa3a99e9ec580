#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sobocert/errors.hpp"

namespace sobocert {

using PointId = std::uint32_t;

/// Finite stand-in for a pointed metric-measure space: points with a radial
/// coordinate (distance to the base point), two vertex measures lambda and
/// mu, and a symmetric neighbor relation at mesh scale. Neighbor pairs may
/// carry a length used by difference quotients; it defaults to 1.
class FiniteMetricMeasureSpace {
 public:
  struct NeighborPair {
    PointId a;
    PointId b;
    double length;
  };

  FiniteMetricMeasureSpace(std::vector<double> radial,
                           std::vector<double> lambda_weight,
                           std::vector<double> mu_weight,
                           std::vector<NeighborPair> neighbor_pairs,
                           int dimension = 3);

  std::size_t point_count() const { return radial_.size(); }
  int dimension() const { return dimension_; }
  PointId base_point() const { return base_; }

  double radial(PointId x) const { return radial_[x]; }
  double lambda_weight(PointId x) const { return lambda_[x]; }
  double mu_weight(PointId x) const { return mu_[x]; }
  const std::vector<double>& radials() const { return radial_; }
  const std::vector<double>& lambda_weights() const { return lambda_; }
  const std::vector<double>& mu_weights() const { return mu_; }

  const std::vector<NeighborPair>& neighbor_pairs() const { return pairs_; }
  const std::vector<PointId>& neighbors(PointId x) const {
    return adjacency_[x];
  }

  double max_radial() const;
  double min_positive_radial() const;
  bool connected() const;

  /// Copy with replaced measures; structure unchanged. Zero lambda is
  /// tolerated at the base point only (the exceptional-set convention).
  FiniteMetricMeasureSpace reweighted(std::vector<double> lambda,
                                      std::vector<double> mu) const;

 private:
  std::vector<double> radial_;
  std::vector<double> lambda_;
  std::vector<double> mu_;
  std::vector<NeighborPair> pairs_;
  std::vector<std::vector<PointId>> adjacency_;
  int dimension_ = 3;
  PointId base_ = 0;

  void validate(bool allow_zero_lambda_at_base);
};

/// Point-cloud text format: `space <N> <n>` header, `p <index> <radial>
/// <lambda> <mu>` lines, `nb <i> <j> [length]` neighbor lines.
void write_space(std::ostream& out, const FiniteMetricMeasureSpace& space);
FiniteMetricMeasureSpace read_space(std::istream& in);
FiniteMetricMeasureSpace read_space_file(const std::string& path);
void write_space_file(const std::string& path,
                      const FiniteMetricMeasureSpace& space);

/// Uniform 1-D radial chain: base point at 0 plus `count` points at the
/// given radii, consecutive points adjacent, lengths = radial gaps,
/// measures supplied per point (base first).
FiniteMetricMeasureSpace make_radial_chain(const std::vector<double>& radii,
                                           const std::vector<double>& lambda,
                                           const std::vector<double>& mu,
                                           int dimension = 3);

}  // namespace sobocert

#include "sobocert/space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sobocert {

FiniteMetricMeasureSpace::FiniteMetricMeasureSpace(
    std::vector<double> radial, std::vector<double> lambda_weight,
    std::vector<double> mu_weight, std::vector<NeighborPair> neighbor_pairs,
    int dimension)
    : radial_(std::move(radial)),
      lambda_(std::move(lambda_weight)),
      mu_(std::move(mu_weight)),
      pairs_(std::move(neighbor_pairs)),
      dimension_(dimension) {
  validate(false);
}

void FiniteMetricMeasureSpace::validate(bool allow_zero_lambda_at_base) {
  const std::size_t n = radial_.size();
  if (lambda_.size() != n || mu_.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "weight array size mismatch");
  }
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty space");
  std::size_t base_count = 0;
  for (std::size_t x = 0; x < n; ++x) {
    if (radial_[x] < 0.0 || !std::isfinite(radial_[x])) {
      throw Error(ErrorCode::InvalidArgument,
                  "radial value must be finite and nonnegative");
    }
    if (radial_[x] == 0.0) {
      base_ = static_cast<PointId>(x);
      ++base_count;
    }
  }
  if (base_count != 1) {
    throw Error(ErrorCode::InvalidArgument,
                "exactly one point must have radial 0");
  }
  for (std::size_t x = 0; x < n; ++x) {
    const bool base_exception =
        allow_zero_lambda_at_base && x == base_ && lambda_[x] == 0.0;
    if (!base_exception &&
        (!(lambda_[x] > 0.0) || !std::isfinite(lambda_[x]))) {
      throw Error(ErrorCode::NonPositiveMeasure,
                  "lambda weight at point " + std::to_string(x));
    }
    if (!(mu_[x] > 0.0) || !std::isfinite(mu_[x])) {
      throw Error(ErrorCode::NonPositiveMeasure,
                  "mu weight at point " + std::to_string(x));
    }
  }
  for (auto& pair : pairs_) {
    if (pair.a >= n || pair.b >= n) {
      throw Error(ErrorCode::IndexOutOfRange, "neighbor pair index");
    }
    if (pair.a == pair.b) {
      throw Error(ErrorCode::SelfLoop, "neighbor relation is irreflexive");
    }
    if (!(pair.length > 0.0) || !std::isfinite(pair.length)) {
      throw Error(ErrorCode::InvalidArgument, "neighbor length must be > 0");
    }
    if (pair.a > pair.b) std::swap(pair.a, pair.b);
  }
  std::sort(pairs_.begin(), pairs_.end(),
            [](const NeighborPair& x, const NeighborPair& y) {
              return std::tie(x.a, x.b) < std::tie(y.a, y.b);
            });
  for (std::size_t i = 1; i < pairs_.size(); ++i) {
    if (pairs_[i - 1].a == pairs_[i].a && pairs_[i - 1].b == pairs_[i].b) {
      throw Error(ErrorCode::DuplicateEdge, "duplicate neighbor pair");
    }
  }
  adjacency_.assign(n, {});
  for (const auto& pair : pairs_) {
    adjacency_[pair.a].push_back(pair.b);
    adjacency_[pair.b].push_back(pair.a);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

double FiniteMetricMeasureSpace::max_radial() const {
  return *std::max_element(radial_.begin(), radial_.end());
}

double FiniteMetricMeasureSpace::min_positive_radial() const {
  double best = std::numeric_limits<double>::infinity();
  for (double r : radial_) {
    if (r > 0.0) best = std::min(best, r);
  }
  return best;
}

bool FiniteMetricMeasureSpace::connected() const {
  const std::size_t n = point_count();
  std::vector<char> seen(n, 0);
  std::vector<PointId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    PointId x = stack.back();
    stack.pop_back();
    for (PointId y : adjacency_[x]) {
      if (!seen[y]) {
        seen[y] = 1;
        ++reached;
        stack.push_back(y);
      }
    }
  }
  return reached == n;
}

FiniteMetricMeasureSpace FiniteMetricMeasureSpace::reweighted(
    std::vector<double> lambda, std::vector<double> mu) const {
  FiniteMetricMeasureSpace copy = *this;
  copy.lambda_ = std::move(lambda);
  copy.mu_ = std::move(mu);
  copy.validate(true);
  return copy;
}

void write_space(std::ostream& out, const FiniteMetricMeasureSpace& space) {
  out << "space " << space.point_count() << " " << space.dimension() << "\n";
  out.precision(17);
  for (std::size_t x = 0; x < space.point_count(); ++x) {
    out << "p " << x << " " << space.radial(static_cast<PointId>(x)) << " "
        << space.lambda_weight(static_cast<PointId>(x)) << " "
        << space.mu_weight(static_cast<PointId>(x)) << "\n";
  }
  for (const auto& pair : space.neighbor_pairs()) {
    out << "nb " << pair.a << " " << pair.b;
    if (pair.length != 1.0) out << " " << pair.length;
    out << "\n";
  }
}

FiniteMetricMeasureSpace read_space(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw Error(ErrorCode::IoError, "empty space file");
  }
  std::istringstream head(header);
  std::string tag;
  std::size_t n = 0;
  int dim = 0;
  if (!(head >> tag >> n >> dim) || tag != "space") {
    throw Error(ErrorCode::IoError, "expected `space <N> <n>` header");
  }
  std::vector<double> radial(n), lambda(n), mu(n);
  std::vector<char> have(n, 0);
  std::vector<FiniteMetricMeasureSpace::NeighborPair> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    ls >> tag;
    if (tag == "p") {
      std::size_t idx;
      double r, l, m;
      if (!(ls >> idx >> r >> l >> m)) {
        throw Error(ErrorCode::IoError, "bad `p` line: " + line);
      }
      if (idx >= n) throw Error(ErrorCode::IndexOutOfRange, "point index");
      radial[idx] = r;
      lambda[idx] = l;
      mu[idx] = m;
      have[idx] = 1;
    } else if (tag == "nb") {
      PointId i, j;
      double len = 1.0;
      if (!(ls >> i >> j)) {
        throw Error(ErrorCode::IoError, "bad `nb` line: " + line);
      }
      ls >> len;
      pairs.push_back({i, j, len});
    } else {
      throw Error(ErrorCode::IoError, "unknown record `" + tag + "`");
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!have[x]) {
      throw Error(ErrorCode::IoError,
                  "missing point " + std::to_string(x));
    }
  }
  return FiniteMetricMeasureSpace(std::move(radial), std::move(lambda),
                                  std::move(mu), std::move(pairs), dim);
}

FiniteMetricMeasureSpace read_space_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_space(in);
}

void write_space_file(const std::string& path,
                      const FiniteMetricMeasureSpace& space) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  write_space(out, space);
}

FiniteMetricMeasureSpace make_radial_chain(const std::vector<double>& radii,
                                           const std::vector<double>& lambda,
                                           const std::vector<double>& mu,
                                           int dimension) {
  std::vector<double> radial;
  radial.push_back(0.0);
  for (double r : radii) radial.push_back(r);
  std::vector<FiniteMetricMeasureSpace::NeighborPair> pairs;
  for (std::size_t i = 0; i + 1 < radial.size(); ++i) {
    const double len = std::max(radial[i + 1] - radial[i], 1e-12);
    pairs.push_back({static_cast<PointId>(i), static_cast<PointId>(i + 1),
                     len});
  }
  return FiniteMetricMeasureSpace(std::move(radial), lambda, mu,
                                  std::move(pairs), dimension);
}

}  // namespace sobocert

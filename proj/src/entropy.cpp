#include "wpn/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <boost/math/special_functions/digamma.hpp>

#include "wpn/error.hpp"

namespace wpn {

namespace {

constexpr std::size_t kBruteForceLimit = 5000;

// Keeps the k smallest squared distances seen so far.
class KBest {
 public:
  explicit KBest(int k) : k_(static_cast<std::size_t>(k)) {}

  void offer(double d2) {
    if (heap_.size() < k_) {
      heap_.push(d2);
    } else if (d2 < heap_.top()) {
      heap_.pop();
      heap_.push(d2);
    }
  }
  bool full() const { return heap_.size() == k_; }
  double worst() const { return heap_.empty() ? std::numeric_limits<double>::infinity() : heap_.top(); }
  void clear() { heap_ = {}; }

 private:
  std::size_t k_;
  std::priority_queue<double> heap_;
};

std::vector<double> brute_force(const EntropySample& s, int k) {
  const std::size_t n = s.size();
  const int d = s.dim();
  std::vector<double> out(n);
  KBest best(k);
  for (std::size_t i = 0; i < n; ++i) {
    best.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (int a = 0; a < d; ++a) {
        const double diff = s.at(i, a) - s.at(j, a);
        d2 += diff * diff;
      }
      best.offer(d2);
    }
    out[i] = std::sqrt(best.worst());
  }
  return out;
}

// Sorted sweep: the k nearest neighbours on a line are a contiguous window.
std::vector<double> sorted_line(const EntropySample& s, int k) {
  const std::size_t n = s.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.at(a, 0) < s.at(b, 0); });
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = s.at(order[i], 0);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t left = i;   // next candidate is left - 1
    std::size_t right = i;  // next candidate is right + 1
    double dist = 0.0;
    for (int found = 0; found < k; ++found) {
      const double dl = left > 0 ? x[i] - x[left - 1] : std::numeric_limits<double>::infinity();
      const double dr = right + 1 < n ? x[right + 1] - x[i] : std::numeric_limits<double>::infinity();
      if (dl <= dr) {
        dist = dl;
        --left;
      } else {
        dist = dr;
        ++right;
      }
    }
    out[order[i]] = dist;
  }
  return out;
}

// Uniform bucket grid with square cells; queries expand ring by ring until
// the k-th distance is inside the searched block.
std::vector<double> grid_plane(const EntropySample& s, int k) {
  const std::size_t n = s.size();
  double x_lo = s.at(0, 0), x_hi = x_lo, y_lo = s.at(0, 1), y_hi = y_lo;
  for (std::size_t i = 1; i < n; ++i) {
    x_lo = std::min(x_lo, s.at(i, 0));
    x_hi = std::max(x_hi, s.at(i, 0));
    y_lo = std::min(y_lo, s.at(i, 1));
    y_hi = std::max(y_hi, s.at(i, 1));
  }
  const double wx = x_hi - x_lo;
  const double wy = y_hi - y_lo;
  const double nn = static_cast<double>(n);
  // about two points per cell, but never more cells along an axis than points
  double cell = std::max(std::sqrt(2.0 * wx * wy / nn), 2.0 * std::max(wx, wy) / nn);
  if (!(cell > 0.0)) cell = 1.0;
  const auto nx = static_cast<std::ptrdiff_t>(std::floor(wx / cell)) + 1;
  const auto ny = static_cast<std::ptrdiff_t>(std::floor(wy / cell)) + 1;

  auto cell_of = [&](double x, double y) {
    const auto cx = std::min<std::ptrdiff_t>(nx - 1, static_cast<std::ptrdiff_t>((x - x_lo) / cell));
    const auto cy = std::min<std::ptrdiff_t>(ny - 1, static_cast<std::ptrdiff_t>((y - y_lo) / cell));
    return std::pair{cx, cy};
  };

  std::vector<std::size_t> start(static_cast<std::size_t>(nx * ny) + 1, 0);
  std::vector<std::size_t> home(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(s.at(i, 0), s.at(i, 1));
    home[i] = static_cast<std::size_t>(cy * nx + cx);
    ++start[home[i] + 1];
  }
  for (std::size_t c = 1; c < start.size(); ++c) start[c] += start[c - 1];
  std::vector<double> px(n), py(n);
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slot = fill[home[i]]++;
    px[slot] = s.at(i, 0);
    py[slot] = s.at(i, 1);
  }

  std::vector<double> out(n);
  KBest best(k + 1);  // the query point itself is found at distance zero
  for (std::size_t i = 0; i < n; ++i) {
    const double qx = s.at(i, 0);
    const double qy = s.at(i, 1);
    const auto [cx, cy] = cell_of(qx, qy);
    best.clear();
    for (std::ptrdiff_t ring = 0;; ++ring) {
      const std::ptrdiff_t x0 = cx - ring, x1 = cx + ring, y0 = cy - ring, y1 = cy + ring;
      auto scan = [&](std::ptrdiff_t gx, std::ptrdiff_t gy) {
        if (gx < 0 || gx >= nx || gy < 0 || gy >= ny) return;
        const auto c = static_cast<std::size_t>(gy * nx + gx);
        for (std::size_t j = start[c]; j < start[c + 1]; ++j) {
          const double dx = px[j] - qx;
          const double dy = py[j] - qy;
          best.offer(dx * dx + dy * dy);
        }
      };
      // only the boundary of the (2 ring + 1)^2 block is new
      for (std::ptrdiff_t gx = x0; gx <= x1; ++gx) {
        scan(gx, y0);
        if (ring > 0) scan(gx, y1);
      }
      for (std::ptrdiff_t gy = y0 + 1; gy < y1; ++gy) {
        scan(x0, gy);
        scan(x1, gy);
      }
      const bool covers_all = x0 <= 0 && y0 <= 0 && x1 >= nx - 1 && y1 >= ny - 1;
      if (covers_all) break;
      if (best.full()) {
        // distance from the query to the outside of the searched block
        const double margin = std::min({qx - (x_lo + static_cast<double>(x0) * cell),
                                        x_lo + static_cast<double>(x1 + 1) * cell - qx,
                                        qy - (y_lo + static_cast<double>(y0) * cell),
                                        y_lo + static_cast<double>(y1 + 1) * cell - qy});
        if (margin > 0.0 && best.worst() <= margin * margin) break;
      }
    }
    out[i] = std::sqrt(best.worst());
  }
  return out;
}

bool all_identical(const EntropySample& s) {
  const auto c = s.coords();
  const int d = s.dim();
  for (std::size_t i = 1; i < s.size(); ++i) {
    for (int a = 0; a < d; ++a) {
      if (c[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)] != c[static_cast<std::size_t>(a)]) return false;
    }
  }
  return true;
}

}  // namespace

EntropySample::EntropySample(int dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  for (double v : coords_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "sample coordinates must be finite");
  }
}

EntropySample EntropySample::scalar(std::vector<double> values) {
  return EntropySample(1, std::move(values));
}

EntropySample EntropySample::pairs(std::span<const double> first, std::span<const double> second) {
  if (first.size() != second.size()) {
    throw Error(ErrorCode::InvalidInput, "paired coordinates differ in length");
  }
  std::vector<double> coords(2 * first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    coords[2 * i] = first[i];
    coords[2 * i + 1] = second[i];
  }
  return EntropySample(2, std::move(coords));
}

EntropySample EntropySample::marginal(int axis) const {
  if (axis < 0 || axis >= dim_) throw Error(ErrorCode::InvalidInput, "marginal axis out of range");
  std::vector<double> values(size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = at(i, axis);
  return scalar(std::move(values));
}

std::vector<double> knn_distances(const EntropySample& sample, int k, NeighborSearch method) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  if (sample.size() <= static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::InvalidInput, "sample needs more than k points");
  }
  if (method == NeighborSearch::kAuto) {
    method = sample.size() <= kBruteForceLimit ? NeighborSearch::kBruteForce : NeighborSearch::kIndexed;
  }
  if (method == NeighborSearch::kBruteForce) return brute_force(sample, k);
  return sample.dim() == 1 ? sorted_line(sample, k) : grid_plane(sample, k);
}

double knn_entropy(const EntropySample& sample, int k, NeighborSearch method) {
  if (sample.size() > static_cast<std::size_t>(k) && all_identical(sample)) {
    throw Error(ErrorCode::DegenerateSample, "all sample points coincide");
  }
  const std::vector<double> eps = knn_distances(sample, k, method);
  double log_sum = 0.0;
  for (double e : eps) log_sum += std::log(std::max(e, std::numeric_limits<double>::epsilon()));
  const double n = static_cast<double>(sample.size());
  const int d = sample.dim();
  const double unit_ball = d == 1 ? 2.0 : std::numbers::pi;
  const double nats = boost::math::digamma(n) - boost::math::digamma(static_cast<double>(k)) +
                      std::log(unit_ball) + d * log_sum / n;
  return nats / std::numbers::ln2;
}

double conditional_entropy(const EntropySample& joint, int marginal_index, int k) {
  if (joint.dim() != 2) throw Error(ErrorCode::InvalidInput, "conditional entropy needs a 2-D sample");
  if (marginal_index != 0 && marginal_index != 1) {
    throw Error(ErrorCode::InvalidInput, "marginal index must be 0 or 1");
  }
  const std::size_t n = joint.size();
  if (n > static_cast<std::size_t>(k)) {
    // a deterministic (affine) relation collapses the joint onto a line
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += joint.at(i, 0);
      my += joint.at(i, 1);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = joint.at(i, 0) - mx;
      const double dy = joint.at(i, 1) - my;
      sxx += dx * dx;
      syy += dy * dy;
      sxy += dx * dy;
    }
    if (sxx > 0.0 && syy > 0.0 && 1.0 - (sxy * sxy) / (sxx * syy) < 1e-12) {
      throw Error(ErrorCode::DegenerateSample, "joint sample lies on a line");
    }
  }
  const std::vector<double> eps = knn_distances(joint, k);
  std::vector<double> sorted = eps;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  if (sorted[n / 2] < 1e-12) {
    throw Error(ErrorCode::DegenerateSample, "joint neighbour distances collapsed");
  }
  return knn_entropy(joint, k) - knn_entropy(joint.marginal(marginal_index), k);
}

}  // namespace wpn

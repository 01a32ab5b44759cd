#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wpn {

// Row-major sample of N points in d in {1, 2} dimensions.
class EntropySample {
 public:
  static EntropySample scalar(std::vector<double> values);
  static EntropySample pairs(std::span<const double> first, std::span<const double> second);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim_); }
  std::span<const double> coords() const noexcept { return coords_; }
  double at(std::size_t i, int axis) const { return coords_[i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)]; }

  // One coordinate as a 1-D sample.
  EntropySample marginal(int axis) const;

 private:
  EntropySample(int dim, std::vector<double> coords);

  int dim_;
  std::vector<double> coords_;
};

enum class NeighborSearch { kAuto, kBruteForce, kIndexed };

// Distance from each point to its k-th nearest neighbour (Euclidean).
std::vector<double> knn_distances(const EntropySample& sample, int k,
                                  NeighborSearch method = NeighborSearch::kAuto);

constexpr int kDefaultNeighbors = 4;

// Kozachenko-Leonenko k-NN differential entropy, in bits.
double knn_entropy(const EntropySample& sample, int k = kDefaultNeighbors,
                   NeighborSearch method = NeighborSearch::kAuto);

// h(joint) - h(joint[marginal_index]), i.e. the entropy of the other
// coordinate conditioned on the selected one. Bits.
double conditional_entropy(const EntropySample& joint, int marginal_index,
                           int k = kDefaultNeighbors);

}  // namespace wpn

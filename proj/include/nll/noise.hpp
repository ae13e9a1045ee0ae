#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "nll/rng.hpp"

namespace nll {

using Label = int;

/// Row-stochastic K x K class-conditional noise matrix:
/// entry (i, j) is the probability that a sample of true class i is labeled j.
class TransitionMatrix {
 public:
  /// Validates shape, range and row sums (tolerance 1e-9). With
  /// `renormalize`, each row is divided by its sum instead of being checked.
  static TransitionMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                    bool renormalize = false);
  static TransitionMatrix identity(int k);

  int k() const noexcept { return k_; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * k_ + j)]; }
  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<std::ptrdiff_t>(i) * k_, static_cast<std::size_t>(k_)};
  }
  std::vector<std::vector<double>> rows() const;

  /// min over i and j != i of T(i,i) - T(i,j); positive iff diagonally dominant.
  double min_margin() const;

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  TransitionMatrix(int k, std::vector<double> data) : k_(k), data_(std::move(data)) {}

  int k_ = 0;
  std::vector<double> data_;
};

/// Class prior Pr[Y = i].
class ClassPrior {
 public:
  static ClassPrior from_probs(std::vector<double> probs);
  static ClassPrior uniform(int k);

  int k() const noexcept { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
  std::span<const double> probs() const noexcept { return probs_; }
  bool strictly_positive() const;

 private:
  explicit ClassPrior(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

/// Probability that a label is wrong: 1 - sum_i prior_i * T(i,i).
double noise_rate(const TransitionMatrix& t, const ClassPrior& prior);

/// Every row's diagonal strictly exceeds each off-diagonal entry (exact comparison).
bool is_diagonally_dominant(const TransitionMatrix& t);

/// Replaces each label y with a draw from row y of `t`, independently of
/// everything but y. Uses the "corrupt-labels" stream of `seed`.
std::vector<Label> corrupt_labels(std::span<const Label> labels, const TransitionMatrix& t, Seed seed);

/// Diagonal 1 - rate, off-diagonal rate / (k - 1). Requires rate in [0, 1).
TransitionMatrix uniform_noise(int k, double rate);

/// Diagonal 1 - rate, rate moved to the next class (mod k). Requires rate in [0, 0.5).
TransitionMatrix pair_noise(int k, double rate);

nlohmann::json to_json(const TransitionMatrix& t);
TransitionMatrix transition_from_json(const nlohmann::json& j);
void save_transition(const TransitionMatrix& t, const std::filesystem::path& path);
TransitionMatrix load_transition(const std::filesystem::path& path);

}  // namespace nll

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nll/noise.hpp"
#include "nll/rng.hpp"

namespace nll {

/// A finite labeled sample. Features are stored row-major (one sample per
/// row), which is also the column-major layout of the dim x size matrix the
/// MLP consumes.
class LabeledDataset {
 public:
  LabeledDataset(int dim, int k);
  LabeledDataset(std::vector<double> features, std::vector<Label> labels, int dim, int k);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  int dim() const noexcept { return dim_; }
  int k() const noexcept { return k_; }

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  Label label(std::size_t i) const { return labels_[i]; }
  std::span<const Label> labels() const noexcept { return labels_; }
  std::span<const double> flat_features() const noexcept { return features_; }

  void push_back(std::span<const double> x, Label y);

  /// Same features, new labels (must have the same length and lie in [0, k)).
  LabeledDataset with_labels(std::vector<Label> labels) const;
  LabeledDataset subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  int dim_;
  int k_;
  std::vector<double> features_;
  std::vector<Label> labels_;
};

/// Exactly representable joint distribution of (X, Y) over a finite support.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<std::vector<double>> points, std::vector<double> probs,
                       std::vector<Label> true_labels, int k);

  std::size_t size() const noexcept { return probs_.size(); }
  int dim() const noexcept { return dim_; }
  int k() const noexcept { return k_; }
  std::span<const double> point(std::size_t i) const { return points_[i]; }
  double prob(std::size_t i) const { return probs_[i]; }
  Label true_label(std::size_t i) const { return true_labels_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::span<const Label> true_labels() const noexcept { return true_labels_; }

  /// Index of the support point equal to x, if any.
  std::optional<std::size_t> find(std::span<const double> x) const;

  /// Marginal Pr[Y = i]; requires every class to carry some mass only when
  /// the caller needs a strictly positive prior.
  ClassPrior prior() const;

  /// The support with its true labels, one row per point.
  LabeledDataset support() const;

 private:
  int dim_;
  int k_;
  std::vector<std::vector<double>> points_;
  std::vector<double> probs_;
  std::vector<Label> true_labels_;
};

/// The 8-point world X = {(1,+-2),(2,+-2),(1,+-1),(2,+-1)}, uniform mass,
/// class 0 on the points with positive second coordinate.
DiscreteDistribution tabular_world();

inline constexpr double kDefaultCirclesSigma = 0.08;
inline constexpr double kDefaultMoonsSigma = 0.1;
inline constexpr double kOuterRadius = 1.0;
inline constexpr double kInnerRadius = 0.5;

/// Noise-free generator geometry at angle theta.
std::pair<double, double> circles_point(Label y, double theta);
std::pair<double, double> moons_point(Label y, double theta);

/// Concentric circles: class 0 on radius 1.0, class 1 on radius 0.5, plus
/// isotropic Gaussian jitter. Emits floor(m/2) class-0 and ceil(m/2) class-1
/// samples in shuffled order.
LabeledDataset make_circles(std::size_t m, double noise_sigma, Seed seed);

/// Interleaving half circles: class 0 at (cos t, sin t), class 1 at
/// (1 - cos t, 0.5 - sin t), t uniform on [0, pi], plus Gaussian jitter.
LabeledDataset make_moons(std::size_t m, double noise_sigma, Seed seed);

/// Support indices and noisy labels of an i.i.d. sample.
struct IidDraws {
  std::vector<std::size_t> points;
  std::vector<Label> labels;
};

/// The draws behind sample_iid, as support indices; same seed, same sample.
IidDraws sample_iid_indices(const DiscreteDistribution& d, std::size_t m, const TransitionMatrix& t, Seed seed);

/// m i.i.d. draws of X from `d`, each labeled by a draw from the noise row of
/// its true class.
LabeledDataset sample_iid(const DiscreteDistribution& d, std::size_t m, const TransitionMatrix& t, Seed seed);

/// Random partition into (train, validation) of sizes round(m (1 - f)) and the remainder.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, double val_fraction, Seed seed);

void write_csv(const LabeledDataset& ds, std::ostream& out);
void write_csv(const LabeledDataset& ds, const std::filesystem::path& path);
/// Parses the `x0,...,x{d-1},label` format. The class count is `k` when
/// given, otherwise max(label) + 1 (at least 2).
LabeledDataset read_csv(std::istream& in, std::optional<int> k = std::nullopt);
LabeledDataset read_csv(const std::filesystem::path& path, std::optional<int> k = std::nullopt);

nlohmann::json to_json(const DiscreteDistribution& d);
DiscreteDistribution world_from_json(const nlohmann::json& j);
void save_world(const DiscreteDistribution& d, const std::filesystem::path& path);
DiscreteDistribution load_world(const std::filesystem::path& path);

/// Shortest-safe decimal form with 17 significant digits.
std::string format_double(double v);

}  // namespace nll

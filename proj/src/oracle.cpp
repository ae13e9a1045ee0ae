#include "nll/oracle.hpp"

#include <string>

#include "nll/errors.hpp"
#include "nll/numeric.hpp"

namespace nll {

DiscreteClassifier::DiscreteClassifier(const DiscreteDistribution& d, std::vector<Label> assignment, Label fallback)
    : dim_(d.dim()), k_(d.k()), fallback_(fallback), assignment_(std::move(assignment)) {
  if (assignment_.size() != d.size()) throw InvalidArgument("DiscreteClassifier: one label per support point");
  if (fallback_ < 0 || fallback_ >= k_) throw InvalidArgument("DiscreteClassifier: fallback out of range");
  for (std::size_t x = 0; x < assignment_.size(); ++x) {
    if (assignment_[x] < 0 || assignment_[x] >= k_) throw InvalidArgument("DiscreteClassifier: label out of range");
    const auto p = d.point(x);
    by_point_.emplace(std::vector<double>(p.begin(), p.end()), assignment_[x]);
  }
}

DiscreteClassifier DiscreteClassifier::from_classifier(const Classifier& h, const DiscreteDistribution& d) {
  if (h.k() != d.k() || h.dim() != d.dim()) throw InvalidArgument("from_classifier: shape mismatch");
  std::vector<Label> assignment(d.size());
  for (std::size_t x = 0; x < d.size(); ++x) assignment[x] = h.predict(d.point(x));
  return DiscreteClassifier(d, std::move(assignment));
}

Label DiscreteClassifier::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw InvalidArgument("DiscreteClassifier: feature dimension mismatch");
  const auto it = by_point_.find(std::vector<double>(x.begin(), x.end()));
  return it == by_point_.end() ? fallback_ : it->second;
}

std::vector<double> DiscreteClassifier::predict_scores(std::span<const double> x) const {
  std::vector<double> scores(static_cast<std::size_t>(k_), 0.0);
  scores[static_cast<std::size_t>(predict(x))] = 1.0;
  return scores;
}

namespace {

void check_size(const DiscreteClassifier& h, const DiscreteDistribution& d, const char* what) {
  if (h.size() != d.size() || h.k() != d.k() || h.dim() != d.dim()) {
    throw InvalidArgument(std::string(what) + ": classifier does not match the distribution");
  }
}

}  // namespace

double exact_clean_accuracy(const DiscreteClassifier& h, const DiscreteDistribution& d) {
  check_size(h, d, "exact_clean_accuracy");
  CompensatedSum acc;
  for (std::size_t x = 0; x < d.size(); ++x) {
    if (h[x] == d.true_label(x)) acc += d.prob(x);
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

double exact_noisy_accuracy(const DiscreteClassifier& h, const DiscreteDistribution& d, const TransitionMatrix& t) {
  check_size(h, d, "exact_noisy_accuracy");
  if (t.k() != d.k()) throw InvalidArgument("exact_noisy_accuracy: noise matrix k mismatch");
  CompensatedSum acc;
  for (std::size_t x = 0; x < d.size(); ++x) acc += d.prob(x) * t(d.true_label(x), h[x]);
  return std::clamp(acc.value(), 0.0, 1.0);
}

ConfusionMatrix exact_confusion(const DiscreteClassifier& h, const DiscreteDistribution& d) {
  check_size(h, d, "exact_confusion");
  const auto k = static_cast<std::size_t>(d.k());
  std::vector<CompensatedSum> cells(k * k);
  std::vector<CompensatedSum> mass(k);
  for (std::size_t x = 0; x < d.size(); ++x) {
    const auto y = static_cast<std::size_t>(d.true_label(x));
    cells[y * k + static_cast<std::size_t>(h[x])] += d.prob(x);
    mass[y] += d.prob(x);
  }
  std::vector<std::vector<double>> rows(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i) {
    const double total = mass[i].value();
    if (!(total > 0.0)) throw InvalidArgument("exact_confusion: class " + std::to_string(i) + " has zero mass");
    CompensatedSum row_sum;
    for (std::size_t j = 0; j < k; ++j) {
      rows[i][j] = cells[i * k + j].value() / total;
      row_sum += rows[i][j];
    }
    // Keep exact zeros and ones; only rescale rounding residue.
    if (row_sum.value() != 1.0) {
      for (auto& v : rows[i]) v /= row_sum.value();
    }
  }
  return ConfusionMatrix::from_rows(rows);
}

std::vector<double> Objective::point_weights(const DiscreteDistribution& d) const {
  const auto k = static_cast<std::size_t>(d.k());
  std::vector<double> w(d.size() * k, 0.0);
  switch (kind_) {
    case Kind::Clean:
      for (std::size_t x = 0; x < d.size(); ++x) w[x * k + static_cast<std::size_t>(d.true_label(x))] = d.prob(x);
      break;
    case Kind::Noisy:
      if (noise_->k() != d.k()) throw InvalidArgument("noisy objective: noise matrix k mismatch");
      for (std::size_t x = 0; x < d.size(); ++x) {
        for (std::size_t j = 0; j < k; ++j) {
          w[x * k + j] = d.prob(x) * (*noise_)(d.true_label(x), static_cast<int>(j));
        }
      }
      break;
    case Kind::Empirical: {
      const LabeledDataset& s = *sample_;
      if (s.empty()) throw InvalidArgument("empirical objective: empty sample");
      if (s.k() != d.k() || s.dim() != d.dim()) throw InvalidArgument("empirical objective: sample shape mismatch");
      std::vector<std::size_t> counts(w.size(), 0);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto x = d.find(s.features(i));
        if (!x) throw InvalidArgument("empirical objective: sample point off the support");
        ++counts[*x * k + static_cast<std::size_t>(s.label(i))];
      }
      for (std::size_t c = 0; c < w.size(); ++c) {
        w[c] = static_cast<double>(counts[c]) / static_cast<double>(s.size());
      }
      break;
    }
  }
  return w;
}

std::optional<std::size_t> hypothesis_space_size(const DiscreteDistribution& d) {
  std::size_t total = 1;
  for (std::size_t x = 0; x < d.size(); ++x) {
    total *= static_cast<std::size_t>(d.k());
    if (total > kMaxAssignments) return std::nullopt;
  }
  return total;
}

std::vector<Label> assignment_at(std::size_t index, std::size_t points, int k) {
  std::vector<Label> a(points, 0);
  for (std::size_t x = points; x-- > 0;) {
    a[x] = static_cast<Label>(index % static_cast<std::size_t>(k));
    index /= static_cast<std::size_t>(k);
  }
  return a;
}

namespace {

struct BlockBest {
  std::size_t index = 0;
  double value = -1.0;
  bool unique = true;
};

// Folds a later block into an earlier one; earlier indices win ties.
void merge(BlockBest& acc, const BlockBest& next) {
  if (next.value > acc.value + kTieTolerance) {
    acc = next;
  } else if (next.value >= acc.value - kTieTolerance) {
    acc.unique = false;
  }
}

}  // namespace

OracleResult enumerate_best(const DiscreteDistribution& d, const Objective& objective, std::size_t workers) {
  const auto space = hypothesis_space_size(d);
  if (!space) {
    throw CapacityError("enumerate_best: k^|support| exceeds " + std::to_string(kMaxAssignments) + " assignments");
  }
  const std::vector<double> w = objective.point_weights(d);
  const std::size_t points = d.size();
  const int k = d.k();

  constexpr std::size_t kBlock = 1 << 14;
  const std::size_t blocks = (*space + kBlock - 1) / kBlock;
  std::vector<BlockBest> partial(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(*space, begin + kBlock);
    std::vector<Label> a = assignment_at(begin, points, k);
    BlockBest best;
    for (std::size_t idx = begin; idx < end; ++idx) {
      CompensatedSum value;
      for (std::size_t x = 0; x < points; ++x) value += w[x * static_cast<std::size_t>(k) + static_cast<std::size_t>(a[x])];
      merge(best, BlockBest{idx, value.value(), true});
      // Odometer increment, last point fastest.
      for (std::size_t x = points; x-- > 0;) {
        if (++a[x] < k) break;
        a[x] = 0;
      }
    }
    partial[b] = best;
  });

  BlockBest total = partial.front();
  for (std::size_t b = 1; b < blocks; ++b) merge(total, partial[b]);
  return {assignment_at(total.index, points, k), std::clamp(total.value, 0.0, 1.0), total.unique};
}

nlohmann::json to_json(const OracleResult& r) {
  return {{"value", r.value}, {"assignment", r.assignment}, {"unique", r.unique}};
}

}  // namespace nll

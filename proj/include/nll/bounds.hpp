#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "nll/classifier.hpp"
#include "nll/dataset.hpp"
#include "nll/noise.hpp"

namespace nll {

/// A_D~(h) = sum_i prior_i sum_j T(i,j) C(i,j). Every confusion row must be defined.
double noisy_accuracy(const ConfusionMatrix& c, const TransitionMatrix& t, const ClassPrior& prior);

/// 1 - noise_rate(t, prior), the largest noisy accuracy any classifier can reach.
/// Throws AssumptionViolated unless t is diagonally dominant and the prior
/// strictly positive.
double max_noisy_accuracy(const TransitionMatrix& t, const ClassPrior& prior);

/// sum over i and j != i of prior_i (T(i,i) - T(i,j)) C(i,j); equals
/// max_noisy_accuracy - noisy_accuracy.
double noisy_gap_identity(const ConfusionMatrix& c, const TransitionMatrix& t, const ClassPrior& prior);

/// max(0, 1 - noisy_gap / t.min_margin()), a lower bound on clean accuracy.
double clean_accuracy_lower_bound(double noisy_gap, const TransitionMatrix& t);

struct BoundParams {
  double d_vc = 1.0;
  double delta = 0.05;
  std::size_t m = 1;
  std::size_t n = 1;

  /// d_vc > 0, delta in (0, 1], m and n >= 1.
  void validate() const;
};

/// sqrt(8 (d (ln(2m/d) + 1) + ln(4/delta)) / m). Requires 2m > d_vc.
double generalization_gap_bound(const BoundParams& p);

/// sqrt(ln(1/delta) / (2n)).
double validation_gap_bound(std::size_t n, double delta);

/// Union bound over `selections` candidates: validation_gap_bound(n, delta / selections).
/// Covers picking the best of several checkpoints by validation accuracy.
double bonferroni_validation_gap_bound(std::size_t n, double delta, std::size_t selections);

struct AuditResult {
  double bound = 0.0;
  double exact_noisy_accuracy = 0.0;
  std::size_t trials = 0;
  std::size_t violations = 0;
  /// Mean of the sampled validation accuracies.
  double mean_val_accuracy = 0.0;

  double violation_frequency() const {
    return trials == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(trials);
  }
};

/// Draws `trials` noisy validation sets of size n from (d, t) and counts the
/// trials with A_D~(h) - A_V~(h) < -validation_gap_bound(n, delta). Trial i
/// uses seed derive_seed(seed, i), so the count does not depend on `workers`.
AuditResult audit_validation_bound(const Classifier& h, const DiscreteDistribution& d, const TransitionMatrix& t,
                                   std::size_t n, double delta, std::size_t trials, Seed seed,
                                   std::size_t workers = 1);

/// audit_validation_bound for several deltas over the same validation draws.
std::vector<AuditResult> audit_validation_bounds(const Classifier& h, const DiscreteDistribution& d,
                                                 const TransitionMatrix& t, std::size_t n,
                                                 std::span<const double> deltas, std::size_t trials, Seed seed,
                                                 std::size_t workers = 1);

nlohmann::json to_json(const BoundParams& p);
nlohmann::json to_json(const AuditResult& r);

}  // namespace nll

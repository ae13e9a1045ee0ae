#include "nll/bounds.hpp"

#include <cmath>
#include <string>

#include "nll/errors.hpp"
#include "nll/numeric.hpp"
#include "nll/oracle.hpp"

namespace nll {

namespace {

void check_shapes(const ConfusionMatrix& c, const TransitionMatrix& t, const ClassPrior& prior, const char* what) {
  if (c.k() != t.k() || prior.k() != t.k()) {
    throw InvalidArgument(std::string(what) + ": confusion, noise matrix and prior disagree on k");
  }
  if (!c.all_defined()) throw InvalidArgument(std::string(what) + ": confusion matrix has undefined rows");
}

void check_dominant(const TransitionMatrix& t, const char* what) {
  if (!is_diagonally_dominant(t)) {
    throw AssumptionViolated(std::string(what) + ": noise matrix is not diagonally dominant");
  }
}

void check_delta(double delta, const char* what) {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument(std::string(what) + ": delta must lie in (0, 1]");
}

}  // namespace

double noisy_accuracy(const ConfusionMatrix& c, const TransitionMatrix& t, const ClassPrior& prior) {
  check_shapes(c, t, prior, "noisy_accuracy");
  CompensatedSum acc;
  for (int i = 0; i < t.k(); ++i) {
    for (int j = 0; j < t.k(); ++j) acc += prior[i] * t(i, j) * c(i, j);
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

double max_noisy_accuracy(const TransitionMatrix& t, const ClassPrior& prior) {
  check_dominant(t, "max_noisy_accuracy");
  if (!prior.strictly_positive()) throw AssumptionViolated("max_noisy_accuracy: every class needs positive prior");
  return 1.0 - noise_rate(t, prior);
}

double noisy_gap_identity(const ConfusionMatrix& c, const TransitionMatrix& t, const ClassPrior& prior) {
  check_shapes(c, t, prior, "noisy_gap_identity");
  CompensatedSum gap;
  for (int i = 0; i < t.k(); ++i) {
    for (int j = 0; j < t.k(); ++j) {
      if (j != i) gap += prior[i] * (t(i, i) - t(i, j)) * c(i, j);
    }
  }
  return gap.value();
}

double clean_accuracy_lower_bound(double noisy_gap, const TransitionMatrix& t) {
  check_dominant(t, "clean_accuracy_lower_bound");
  if (!(noisy_gap >= 0.0)) throw InvalidArgument("clean_accuracy_lower_bound: noisy_gap must be >= 0");
  return std::max(0.0, 1.0 - noisy_gap / t.min_margin());
}

void BoundParams::validate() const {
  if (!(d_vc > 0.0) || !std::isfinite(d_vc)) throw InvalidArgument("d_vc must be positive");
  check_delta(delta, "BoundParams");
  if (m < 1 || n < 1) throw InvalidArgument("m and n must be >= 1");
}

double generalization_gap_bound(const BoundParams& p) {
  p.validate();
  const double m = static_cast<double>(p.m);
  if (!(2.0 * m > p.d_vc)) throw InvalidArgument("generalization_gap_bound: requires 2m > d_vc");
  const double inner = p.d_vc * (std::log(2.0 * m / p.d_vc) + 1.0) + std::log(4.0 / p.delta);
  return std::sqrt(8.0 * inner / m);
}

double validation_gap_bound(std::size_t n, double delta) {
  check_delta(delta, "validation_gap_bound");
  if (n < 1) throw InvalidArgument("validation_gap_bound: n must be >= 1");
  return std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

double bonferroni_validation_gap_bound(std::size_t n, double delta, std::size_t selections) {
  if (selections < 1) throw InvalidArgument("bonferroni_validation_gap_bound: selections must be >= 1");
  check_delta(delta, "bonferroni_validation_gap_bound");
  return validation_gap_bound(n, delta / static_cast<double>(selections));
}

std::vector<AuditResult> audit_validation_bounds(const Classifier& h, const DiscreteDistribution& d,
                                                 const TransitionMatrix& t, std::size_t n,
                                                 std::span<const double> deltas, std::size_t trials, Seed seed,
                                                 std::size_t workers) {
  if (trials < 1) throw InvalidArgument("audit_validation_bound: trials must be >= 1");
  if (h.k() != d.k() || t.k() != d.k()) throw InvalidArgument("audit_validation_bound: k mismatch");
  if (h.dim() != d.dim()) throw InvalidArgument("audit_validation_bound: feature dimension mismatch");

  const auto fixed = DiscreteClassifier::from_classifier(h, d);
  const double exact = exact_noisy_accuracy(fixed, d, t);
  std::vector<AuditResult> out;
  for (const double delta : deltas) {
    AuditResult r;
    r.bound = validation_gap_bound(n, delta);
    r.exact_noisy_accuracy = exact;
    r.trials = trials;
    out.push_back(r);
  }

  std::vector<double> val_acc(trials);
  parallel_for(trials, workers, [&](std::size_t trial) {
    const IidDraws draws = sample_iid_indices(d, n, t, derive_seed(seed, trial));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += fixed[draws.points[i]] == draws.labels[i] ? 1 : 0;
    val_acc[trial] = static_cast<double>(hits) / static_cast<double>(n);
  });
  const double mean_acc = mean(val_acc);
  for (auto& r : out) {
    for (const double a : val_acc) {
      if (exact - a < -r.bound) ++r.violations;
    }
    r.mean_val_accuracy = mean_acc;
  }
  return out;
}

AuditResult audit_validation_bound(const Classifier& h, const DiscreteDistribution& d, const TransitionMatrix& t,
                                   std::size_t n, double delta, std::size_t trials, Seed seed,
                                   std::size_t workers) {
  const double deltas[] = {delta};
  return audit_validation_bounds(h, d, t, n, deltas, trials, seed, workers).front();
}

nlohmann::json to_json(const BoundParams& p) {
  return {{"d_vc", p.d_vc}, {"delta", p.delta}, {"m", p.m}, {"n", p.n}};
}

nlohmann::json to_json(const AuditResult& r) {
  return {{"bound", r.bound},
          {"exact_noisy_accuracy", r.exact_noisy_accuracy},
          {"trials", r.trials},
          {"violations", r.violations},
          {"violation_frequency", r.violation_frequency()},
          {"mean_val_accuracy", r.mean_val_accuracy}};
}

}  // namespace nll

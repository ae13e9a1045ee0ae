// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails. Usage: nll_acceptance [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli_driver.hpp"
#include "gradcheck.hpp"
#include "instances.hpp"
#include "nll/bounds.hpp"
#include "nll/classifier.hpp"
#include "nll/dataset.hpp"
#include "nll/experiments.hpp"
#include "nll/numeric.hpp"
#include "nll/nts.hpp"
#include "nll/oracle.hpp"
#include "oracles.hpp"

using namespace nll;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

void info(const std::string& line) { std::printf("  info: %s\n", line.c_str()); }

const std::vector<Label> kHStar{0, 0, 0, 0, 1, 1, 1, 1};

Outcome robustness_by_enumeration() {
  const auto w = tabular_world();
  bool ok = true;
  double worst = 0;
  for (int step = 1; step <= 9; ++step) {
    const auto t = uniform_noise(2, 0.05 * step);
    const double ceiling = 1.0 - noise_rate(t, w.prior());
    double best = -1;
    std::size_t attained = 0;
    std::vector<Label> arg;
    for (std::size_t i = 0; i < 256; ++i) {
      const auto a = assignment_at(i, 8, 2);
      const double v = exact_noisy_accuracy(DiscreteClassifier(w, a), w, t);
      if (v > best + kTieTolerance) {
        best = v;
        arg = a;
        attained = 1;
      } else if (std::abs(v - best) <= kTieTolerance) {
        ++attained;
      }
    }
    const auto r = enumerate_best(w, Objective::noisy(t));
    worst = std::max(worst, std::abs(best - ceiling));
    ok = ok && std::abs(best - ceiling) <= 1e-12 && attained == 1 && arg == kHStar && r.assignment == kHStar &&
         r.unique;
    if (step == 5) ok = ok && std::abs(best - 0.75) <= 1e-12;
  }
  return {ok, fmt("9 noise rates, max |max A - (1 - eps)| = %.2e, unique maximizer h*", worst)};
}

Outcome factorization_equivalence() {
  const auto w = tabular_world();
  double worst = 0;
  for (const double rate : {0.1, 0.25, 0.4}) {
    const auto t = uniform_noise(2, rate);
    for (std::size_t i = 0; i < 256; ++i) {
      const auto a = assignment_at(i, 8, 2);
      const double direct = testing::joint_noisy_accuracy(a, w, t);
      const double factored = noisy_accuracy(exact_confusion(DiscreteClassifier(w, a), w), t, w.prior());
      worst = std::max(worst, std::abs(direct - factored));
    }
  }
  return {worst <= 1e-12, fmt("768 classifier/noise pairs, max deviation %.2e", worst)};
}

Outcome convergence_rate() {
  Rng rng(20260101);
  double identity_err = 0, bound_excess = -INFINITY;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto in = testing::random_instance(rng);
    const double acc = noisy_accuracy(in.c, in.t, in.prior);
    const double ceiling = max_noisy_accuracy(in.t, in.prior);
    const double gap = noisy_gap_identity(in.c, in.t, in.prior);
    identity_err = std::max(identity_err, std::abs(gap - (ceiling - acc)));
    const double clean_error = 1.0 - testing::clean_accuracy_of(in);
    bound_excess = std::max(bound_excess, clean_error - gap / in.t.min_margin());
  }
  return {identity_err <= 1e-12 && bound_excess <= 1e-12,
          fmt("10^4 instances, gap identity max error %.2e, max (1-A_D) - gap/margin = %.3e", identity_err,
              bound_excess)};
}

Outcome validation_bound_number() {
  const double bound = validation_gap_bound(1000, 0.01);
  const auto w = tabular_world();
  const auto r = audit_validation_bound(DiscreteClassifier(w, kHStar), w, uniform_noise(2, 0.25), 1000, 0.01, 10000,
                                        derive_seed(4, "acceptance"), 0);
  return {std::abs(bound - 0.0480) <= 5e-4 && r.violation_frequency() <= 0.013,
          fmt("bound %.6f, violation frequency %.4f over %.0f trials", bound, r.violation_frequency(),
              static_cast<double>(r.trials))};
}

Outcome generalization_bound() {
  double worst = 0;
  int points = 0;
  for (const double m : {100.0, 1e3, 1e4, 1e5, 1e6}) {
    for (const double d_vc : {1.0, 10.0}) {
      for (const double delta : {0.01, 0.05}) {
        const double v = generalization_gap_bound({d_vc, delta, static_cast<std::size_t>(m), 1});
        const double ref = static_cast<double>(testing::vc_bound_reference(m, d_vc, delta));
        worst = std::max(worst, std::abs(v - ref));
        ++points;
      }
    }
  }
  const double bound = generalization_gap_bound({8, 0.05, 100000, 1});
  const double gap = worst_lookup_gap(100000, uniform_noise(2, 0.25), derive_seed(5, "acceptance"));
  return {points == 20 && worst <= 1e-10 && gap <= bound,
          fmt("%.0f-point grid max deviation %.2e; worst lookup gap %.5f <= bound %.5f", points, worst, gap,
              bound)};
}

const SweepAggregate* at_size(const SweepResult& r, std::size_t m) {
  for (const auto& a : r.aggregates) {
    if (a.m == m) return &a;
  }
  return nullptr;
}

Outcome regime_reproduction() {
  SweepConfig cfg;
  cfg.dataset = DatasetKind::Moons;
  cfg.noise = TransitionMatrix::from_rows({{0.7, 0.3}, {0.2, 0.8}});
  cfg.sizes = {8, 32, 100, 200, 400, 1600, 6400, 50000};
  cfg.repeats = 10;
  cfg.test_size = 10000;
  cfg.seed = 2026;
  cfg.train.checkpoint_every = 500;
  cfg.train.convergence_window = 2000;
  cfg.train.convergence_tol = 1e-3;
  const auto r = run_regime_sweep(cfg);
  for (const auto& a : r.aggregates) {
    info(fmt("m=%-6.0f train %.4f +- %.4f  test %.4f", static_cast<double>(a.m), a.mean_train_acc, a.std_train_acc,
             a.mean_test_acc) +
         fmt(" +- %.4f  failed %.0f", a.std_test_acc, static_cast<double>(a.failed)));
  }
  const auto* mid = at_size(r, 100);
  const auto* large = at_size(r, 50000);
  const auto* tiny = at_size(r, 8);
  const double rho = sweep_spearman(r);
  info(fmt("small-m variance: std test at m=8 is %.4f vs %.4f at m=50000", tiny->std_test_acc, large->std_test_acc));
  const bool mid_ok = mid->mean_train_acc >= 0.97 && mid->mean_test_acc >= 0.69 && mid->mean_test_acc <= 0.81;
  const bool large_ok = large->mean_train_acc >= 0.72 && large->mean_train_acc <= 0.78 && large->mean_test_acc >= 0.95;
  std::size_t failed = 0;
  for (const auto& a : r.aggregates) failed += a.failed;
  return {mid_ok && large_ok && rho >= 0.8 && failed == 0,
          fmt("intermediate m=100 train %.4f test %.4f; m=50000 train %.4f", mid->mean_train_acc, mid->mean_test_acc,
              large->mean_train_acc) +
              fmt(" test %.4f; spearman %.3f", large->mean_test_acc, rho)};
}

double max_abs_deviation(const ConfusionMatrix& c, const TransitionMatrix& t) {
  double worst = 0;
  for (int i = 0; i < t.k(); ++i) {
    for (int j = 0; j < t.k(); ++j) worst = std::max(worst, std::abs(c(i, j) - t(i, j)));
  }
  return worst;
}

Outcome regime_two_confusion() {
  const auto w = tabular_world();
  const auto t = uniform_noise(2, 0.25);
  const auto draws = sample_iid_indices(w, 100000, t, derive_seed(7, "acceptance"));
  const auto noisy = sample_iid(w, 100000, t, derive_seed(7, "acceptance"));
  const LookupClassifier memorizer(noisy);
  std::vector<Label> truth;
  for (const std::size_t x : draws.points) truth.push_back(w.true_label(x));
  const auto c = confusion(memorizer, noisy.with_labels(truth));
  const double dev = max_abs_deviation(c, t);

  // The same check where every training input is distinct, so a memorizer can fit every noisy label.
  const auto clean = make_moons(100000, kDefaultMoonsSigma, derive_seed(7, "moons"));
  const auto moons_noisy = clean.with_labels(corrupt_labels(clean.labels(), t, derive_seed(7, "moons-noise")));
  const double moons_dev = max_abs_deviation(confusion(LookupClassifier(moons_noisy), clean), t);
  info(fmt("distinct-point memorizer (moons, m=10^5): max |C - T| = %.4f", moons_dev));
  return {dev <= 0.01, fmt("tabular lookup, m=10^5: C = [[%.4f, %.4f], [%.4f, %.4f]]", c(0, 0), c(0, 1), c(1, 0),
                           c(1, 1)) +
                           fmt(", max |C - T| = %.4f (8 support points, the modal label recovers h*)", dev)};
}

Outcome nts_utility() {
  TrainConfig cfg;
  cfg.checkpoint_every = 100;
  const auto t = uniform_noise(2, 0.3);
  std::vector<double> last, nt, ns;
  for (Seed s = 0; s < 10; ++s) {
    const Seed base = derive_seed(derive_seed(2026, "nts"), s);
    const auto train_clean = make_moons(2000, kDefaultMoonsSigma, derive_seed(base, "train"));
    const auto val_clean = make_moons(1000, kDefaultMoonsSigma, derive_seed(base, "val"));
    const auto test = make_moons(10000, kDefaultMoonsSigma, derive_seed(base, "test"));
    const auto train = train_clean.with_labels(corrupt_labels(train_clean.labels(), t, derive_seed(base, "train-noise")));
    const auto val = val_clean.with_labels(corrupt_labels(val_clean.labels(), t, derive_seed(base, "val-noise")));
    cfg.seed = derive_seed(base, "model");
    const auto r = run_nts(train, val, cfg, &test);
    last.push_back(*r.last_epoch_acc);
    nt.push_back(*r.nt_acc);
    ns.push_back(*r.ns_acc);
    info(fmt("seed %.0f: last %.4f  NT %.4f  NS %.4f", static_cast<double>(s), last.back(), nt.back(), ns.back()));
  }
  const double m_last = median(last), m_nt = median(nt), m_ns = median(ns);
  return {m_last <= m_nt && m_ns >= m_nt - 0.01,
          fmt("medians: last %.4f, NT %.4f, NS %.4f", m_last, m_nt, m_ns)};
}

Outcome gradient_check() {
  double worst = 0;
  for (int c = 0; c < 20; ++c) {
    const auto [p, ds] = testing::random_gradcheck_case(derive_seed(9, "acceptance"), c);
    worst = std::max(worst, testing::check_gradient(p, ds).relative_error);
  }
  return {worst <= 1e-4, fmt("20 configurations, max relative error %.2e", worst)};
}

Outcome cli_determinism() {
  const auto root = std::filesystem::temp_directory_path() / "nll_acceptance_cli";
  std::filesystem::remove_all(root);
  const auto a = testing::run_cli_pipeline(NLL_CLI_PATH, root / "a");
  const auto b = testing::run_cli_pipeline(NLL_CLI_PATH, root / "b");
  bool ok = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].exit_code != 0 || b[i].exit_code != 0) {
      info("command failed: " + a[i].name);
      ok = false;
    }
  }
  const auto files = testing::list_files(root / "a");
  ok = ok && files == testing::list_files(root / "b");
  std::size_t differing = 0;
  for (const auto& f : files) {
    if (testing::read_file(root / "a" / f) != testing::read_file(root / "b" / f)) {
      info("differs: " + f.string());
      ++differing;
    }
  }
  std::filesystem::remove_all(root);
  return {ok && differing == 0, fmt("%.0f commands, %.0f output files, %.0f differing", static_cast<double>(a.size()),
                                    static_cast<double>(files.size()), static_cast<double>(differing))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, 1, robustness_by_enumeration}, {2, 1, factorization_equivalence},     {3, 5, convergence_rate},
      {4, 30, validation_bound_number},  {5, 120, generalization_bound}, {6, 1800, regime_reproduction},
      {7, 10, regime_two_confusion},     {8, 1200, nts_utility},         {9, 10, gradient_check},
      {10, 0, cli_determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds <= 0 || seconds <= c.budget_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %d: %s (%.1f s%s) %s\n", c.id, pass ? "PASS" : "FAIL", seconds,
                in_time ? "" : ", over budget", out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

#include "nll/experiments.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "nll/bounds.hpp"
#include "nll/classifier.hpp"
#include "nll/errors.hpp"
#include "nll/numeric.hpp"
#include "nll/oracle.hpp"

namespace nll {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

DatasetKind dataset_kind_from_string(const std::string& name) {
  if (name == "tabular") return DatasetKind::Tabular;
  if (name == "circles") return DatasetKind::Circles;
  if (name == "moons") return DatasetKind::Moons;
  throw InvalidArgument("unknown dataset kind '" + name + "' (expected tabular, circles or moons)");
}

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Tabular: return "tabular";
    case DatasetKind::Circles: return "circles";
    case DatasetKind::Moons: return "moons";
  }
  return "moons";
}

LabeledDataset make_clean(DatasetKind kind, std::size_t m, double sigma, Seed seed) {
  switch (kind) {
    case DatasetKind::Tabular: return sample_iid(tabular_world(), m, TransitionMatrix::identity(2), seed);
    case DatasetKind::Circles: return make_circles(m, sigma < 0.0 ? kDefaultCirclesSigma : sigma, seed);
    case DatasetKind::Moons: return make_moons(m, sigma < 0.0 ? kDefaultMoonsSigma : sigma, seed);
  }
  throw InvalidArgument("unknown dataset kind");
}

void SweepConfig::validate() const {
  if (repeats < 1) throw InvalidArgument("sweep: repeats must be >= 1");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2) throw InvalidArgument("sweep: training sizes must be >= 2");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw InvalidArgument("sweep: training sizes must be strictly increasing");
  }
  if (test_size < 1) throw InvalidArgument("sweep: test_size must be >= 1");
  if (noise.k() != 2) throw InvalidArgument("sweep: the synthetic datasets are binary, noise matrix must be 2 x 2");
  train.validate();
}

Seed cell_seed(Seed base, std::size_t m, int repeat) {
  return derive_seed(base, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(repeat));
}

SweepCell run_cell(const SweepConfig& cfg, std::size_t m, int repeat) {
  const Seed seed = cell_seed(cfg.seed, m, repeat);
  const int k = cfg.noise.k();
  SweepCell cell;
  cell.m = m;
  cell.repeat = repeat;

  const LabeledDataset clean = make_clean(cfg.dataset, m, cfg.noise_sigma, derive_seed(seed, "train-data"));
  const LabeledDataset noisy = clean.with_labels(corrupt_labels(clean.labels(), cfg.noise, derive_seed(seed, "noise")));
  const LabeledDataset test = make_clean(cfg.dataset, cfg.test_size, cfg.noise_sigma, derive_seed(seed, "clean-test"));
  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(seed, "train");
  try {
    const TrainResult res = train_mlp(noisy, tc);
    const Mlp model(res.params);
    cell.final_train_acc = res.checkpoints.back().train_acc;
    cell.steps = res.checkpoints.back().step;
    cell.final_test_acc = accuracy(model, test);
    const ConfusionMatrix c = confusion(model, test);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) cell.confusion.push_back(c.row_defined(i) ? c(i, j) : kNaN);
    }
  } catch (const TrainingDiverged& e) {
    cell.failed = true;
    cell.error = e.what();
    cell.steps = e.step();
    cell.final_train_acc = kNaN;
    cell.final_test_acc = kNaN;
    cell.confusion.assign(static_cast<std::size_t>(k * k), kNaN);
  }
  return cell;
}

std::vector<SweepAggregate> SweepResult::aggregate(const std::vector<SweepCell>& cells, int k) {
  std::vector<SweepAggregate> out;
  const auto kk = static_cast<std::size_t>(k * k);
  for (std::size_t begin = 0; begin < cells.size();) {
    std::size_t end = begin;
    while (end < cells.size() && cells[end].m == cells[begin].m) ++end;
    SweepAggregate agg;
    agg.m = cells[begin].m;
    std::vector<double> train, test;
    std::vector<std::vector<double>> conf(kk);
    for (std::size_t i = begin; i < end; ++i) {
      const SweepCell& c = cells[i];
      if (c.failed) {
        ++agg.failed;
        continue;
      }
      train.push_back(c.final_train_acc);
      test.push_back(c.final_test_acc);
      for (std::size_t e = 0; e < kk && e < c.confusion.size(); ++e) {
        if (!std::isnan(c.confusion[e])) conf[e].push_back(c.confusion[e]);
      }
    }
    agg.mean_train_acc = train.empty() ? kNaN : mean(train);
    agg.std_train_acc = train.empty() ? kNaN : sample_stddev(train);
    agg.mean_test_acc = test.empty() ? kNaN : mean(test);
    agg.std_test_acc = test.empty() ? kNaN : sample_stddev(test);
    for (const auto& v : conf) agg.mean_confusion.push_back(v.empty() ? kNaN : mean(v));
    out.push_back(std::move(agg));
    begin = end;
  }
  return out;
}

SweepResult run_regime_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult result;
  result.k = cfg.noise.k();
  const auto repeats = static_cast<std::size_t>(cfg.repeats);
  result.cells.resize(cfg.sizes.size() * repeats);
  // Largest cells first so the pool is not left waiting on one long task.
  std::vector<std::size_t> order(result.cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
  parallel_for(order.size(), resolve_workers(cfg.workers), [&](std::size_t t) {
    const std::size_t slot = order[t];
    result.cells[slot] = run_cell(cfg, cfg.sizes[slot / repeats], static_cast<int>(slot % repeats));
  });
  result.aggregates = SweepResult::aggregate(result.cells, result.k);
  return result;
}

nlohmann::json to_json(const SweepConfig& cfg) {
  return {{"dataset", to_string(cfg.dataset)}, {"noise_sigma", cfg.noise_sigma}, {"noise", to_json(cfg.noise)},
          {"sizes", cfg.sizes},           {"repeats", cfg.repeats},         {"train", to_json(cfg.train)},
          {"test_size", cfg.test_size},   {"seed", cfg.seed},               {"workers", cfg.workers}};
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  try {
    if (j.contains("dataset")) cfg.dataset = dataset_kind_from_string(j.at("dataset").get<std::string>());
    if (j.contains("noise_sigma")) cfg.noise_sigma = j.at("noise_sigma").get<double>();
    if (j.contains("noise")) cfg.noise = transition_from_json(j.at("noise"));
    if (j.contains("sizes")) cfg.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<int>();
    if (j.contains("train")) cfg.train = train_config_from_json(j.at("train"));
    if (j.contains("test_size")) cfg.test_size = j.at("test_size").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<Seed>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed sweep config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open sweep config");
  try {
    return sweep_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string(), e.what());
  }
}

namespace {

std::string conf_name(std::string prefix, int i, int j) {
  return prefix + "conf_" + std::to_string(i) + std::to_string(j);
}

}  // namespace

void write_sweep_csv(const SweepResult& r, std::ostream& out) {
  out << "# aggregate rows have repeat=-1 and hold m,repeat,mean_final_train_acc,mean_final_test_acc";
  for (int i = 0; i < r.k; ++i) {
    for (int j = 0; j < r.k; ++j) out << ',' << conf_name("mean_", i, j);
  }
  out << ",failed (count of failed cells),std_final_train_acc,std_final_test_acc\n";
  out << "m,repeat,final_train_acc,final_test_acc";
  for (int i = 0; i < r.k; ++i) {
    for (int j = 0; j < r.k; ++j) out << ',' << conf_name("", i, j);
  }
  out << ",failed\n";
  for (const SweepCell& c : r.cells) {
    out << c.m << ',' << c.repeat << ',' << format_double(c.final_train_acc) << ',' << format_double(c.final_test_acc);
    for (const double v : c.confusion) out << ',' << format_double(v);
    out << ',' << (c.failed ? 1 : 0) << '\n';
  }
  for (const SweepAggregate& a : r.aggregates) {
    out << a.m << ",-1," << format_double(a.mean_train_acc) << ',' << format_double(a.mean_test_acc);
    for (const double v : a.mean_confusion) out << ',' << format_double(v);
    out << ',' << a.failed << ',' << format_double(a.std_train_acc) << ',' << format_double(a.std_test_acc) << '\n';
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

double parse_real(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InvalidArgument("sweep csv: bad number '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InvalidArgument("sweep csv: bad integer '" + s + "'");
  return v;
}

}  // namespace

SweepResult read_sweep_csv(std::istream& in) {
  SweepResult r;
  std::string line;
  bool header_seen = false;
  std::size_t kk = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = split_fields(line);
    if (!header_seen) {
      if (f.size() < 5 || f[0] != "m" || f[1] != "repeat" || f.back() != "failed") {
        throw InvalidArgument("sweep csv: unexpected header");
      }
      kk = f.size() - 5;
      r.k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(kk))));
      if (static_cast<std::size_t>(r.k * r.k) != kk) throw InvalidArgument("sweep csv: confusion columns not square");
      header_seen = true;
      continue;
    }
    const long long repeat = parse_int(f.at(1));
    if (repeat >= 0) {
      if (f.size() != kk + 5) throw InvalidArgument("sweep csv: wrong field count in cell row");
      SweepCell c;
      c.m = static_cast<std::size_t>(parse_int(f[0]));
      c.repeat = static_cast<int>(repeat);
      c.final_train_acc = parse_real(f[2]);
      c.final_test_acc = parse_real(f[3]);
      for (std::size_t e = 0; e < kk; ++e) c.confusion.push_back(parse_real(f[4 + e]));
      c.failed = parse_int(f[4 + kk]) != 0;
      r.cells.push_back(std::move(c));
    } else {
      if (f.size() != kk + 7) throw InvalidArgument("sweep csv: wrong field count in aggregate row");
      SweepAggregate a;
      a.m = static_cast<std::size_t>(parse_int(f[0]));
      a.mean_train_acc = parse_real(f[2]);
      a.mean_test_acc = parse_real(f[3]);
      for (std::size_t e = 0; e < kk; ++e) a.mean_confusion.push_back(parse_real(f[4 + e]));
      a.failed = static_cast<std::size_t>(parse_int(f[4 + kk]));
      a.std_train_acc = parse_real(f[5 + kk]);
      a.std_test_acc = parse_real(f[6 + kk]);
      r.aggregates.push_back(std::move(a));
    }
  }
  if (!header_seen) throw InvalidArgument("sweep csv: missing header");
  return r;
}

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json numbers_or_null(const std::vector<double>& vs) {
  nlohmann::json out = nlohmann::json::array();
  for (const double v : vs) out.push_back(number_or_null(v));
  return out;
}

}  // namespace

nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const SweepCell& c : r.cells) {
    nlohmann::json j = {{"m", c.m},
                        {"repeat", c.repeat},
                        {"final_train_acc", number_or_null(c.final_train_acc)},
                        {"final_test_acc", number_or_null(c.final_test_acc)},
                        {"steps", c.steps},
                        {"confusion", numbers_or_null(c.confusion)},
                        {"failed", c.failed}};
    if (c.failed) j["error"] = c.error;
    cells.push_back(std::move(j));
  }
  nlohmann::json aggs = nlohmann::json::array();
  for (const SweepAggregate& a : r.aggregates) {
    aggs.push_back({{"m", a.m},
                    {"mean_final_train_acc", number_or_null(a.mean_train_acc)},
                    {"std_final_train_acc", number_or_null(a.std_train_acc)},
                    {"mean_final_test_acc", number_or_null(a.mean_test_acc)},
                    {"std_final_test_acc", number_or_null(a.std_test_acc)},
                    {"mean_confusion", numbers_or_null(a.mean_confusion)},
                    {"failed", a.failed}});
  }
  nlohmann::json out = {{"k", r.k}, {"cells", std::move(cells)}, {"aggregates", std::move(aggs)}};
  if (r.aggregates.size() >= 2) out["spearman_m_test_acc"] = number_or_null(sweep_spearman(r));
  return out;
}

double sweep_spearman(const SweepResult& r) {
  std::vector<double> ms, acc;
  for (const SweepAggregate& a : r.aggregates) {
    if (std::isnan(a.mean_test_acc)) continue;
    ms.push_back(static_cast<double>(a.m));
    acc.push_back(a.mean_test_acc);
  }
  return spearman(ms, acc);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string sweep_svg(const SweepResult& r) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 130, kTop = 20, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  std::vector<const SweepAggregate*> rows;
  for (const auto& a : r.aggregates) {
    if (!std::isnan(a.mean_test_acc)) rows.push_back(&a);
  }
  double lo = 0.0, hi = 1.0;
  if (!rows.empty()) {
    lo = std::log10(static_cast<double>(rows.front()->m));
    hi = std::log10(static_cast<double>(rows.back()->m));
    if (hi <= lo) hi = lo + 1.0;
  }
  auto px = [&](std::size_t m) { return kLeft + (std::log10(static_cast<double>(m)) - lo) / (hi - lo) * plot_w; };
  auto py = [&](double acc) { return kTop + (1.0 - std::clamp(acc, 0.0, 1.0)) * plot_h; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
    << kTop + plot_h << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double acc = i * 0.25;
    s << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fmt(py(acc)) << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << fmt(py(acc)) << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(py(acc) + 4) << "\" text-anchor=\"end\">" << fmt(acc)
      << "</text>\n";
  }
  for (const auto* a : rows) {
    s << "<text x=\"" << fmt(px(a->m)) << "\" y=\"" << kTop + plot_h + 16 << "\" text-anchor=\"middle\">" << a->m
      << "</text>\n";
  }
  s << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << kHeight - 10
    << "\" text-anchor=\"middle\">training samples m (log scale)</text>\n";
  s << "<text x=\"15\" y=\"" << fmt(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << fmt(kTop + plot_h / 2) << ")\">accuracy</text>\n";

  struct Series {
    const char* name;
    const char* color;
    double SweepAggregate::*mean;
    double SweepAggregate::*std;
  };
  const Series series[] = {{"train (noisy)", "#1f77b4", &SweepAggregate::mean_train_acc, &SweepAggregate::std_train_acc},
                           {"test (clean)", "#d62728", &SweepAggregate::mean_test_acc, &SweepAggregate::std_test_acc}};
  for (std::size_t si = 0; si < 2; ++si) {
    const Series& ser = series[si];
    s << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"2\" points=\"";
    for (const auto* a : rows) s << fmt(px(a->m)) << ',' << fmt(py(a->*ser.mean)) << ' ';
    s << "\"/>\n";
    for (const auto* a : rows) {
      const double sd = std::isnan(a->*ser.std) ? 0.0 : a->*ser.std;
      s << "<line x1=\"" << fmt(px(a->m)) << "\" y1=\"" << fmt(py(a->*ser.mean - sd)) << "\" x2=\"" << fmt(px(a->m))
        << "\" y2=\"" << fmt(py(a->*ser.mean + sd)) << "\" stroke=\"" << ser.color << "\"/>\n";
      s << "<circle cx=\"" << fmt(px(a->m)) << "\" cy=\"" << fmt(py(a->*ser.mean)) << "\" r=\"3\" fill=\""
        << ser.color << "\"/>\n";
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(si);
    s << "<line x1=\"" << kLeft + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + plot_w + 30 << "\" y2=\""
      << ly << "\" stroke=\"" << ser.color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << kLeft + plot_w + 35 << "\" y=\"" << ly + 4 << "\">" << ser.name << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

TabularPanel tabular_panel(std::size_t m, const TransitionMatrix& t, Seed seed, bool one_per_point) {
  const DiscreteDistribution world = tabular_world();
  TabularPanel panel;
  if (one_per_point) {
    const auto labels = corrupt_labels(world.true_labels(), t, seed);
    panel.sample = LabeledDataset(world.dim(), world.k());
    for (std::size_t x = 0; x < world.size(); ++x) panel.sample.push_back(world.point(x), labels[x]);
  } else {
    panel.sample = sample_iid(world, m, t, seed);
  }
  panel.m = panel.sample.size();
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < panel.sample.size(); ++i) seen.insert(*world.find(panel.sample.features(i)));
  panel.distinct_points = seen.size();

  const OracleResult best = enumerate_best(world, Objective::empirical(panel.sample));
  const DiscreteClassifier h(world, best.assignment);
  panel.maximizer = best.assignment;
  panel.unique = best.unique;
  panel.objective = best.value;
  panel.clean_accuracy = exact_clean_accuracy(h, world);
  panel.confusion = exact_confusion(h, world).rows();
  return panel;
}

TabularDemo run_tabular_demo(Seed seed) {
  const DiscreteDistribution world = tabular_world();
  TabularDemo demo;
  demo.noise = uniform_noise(2, 0.25);
  demo.max_noisy_accuracy = max_noisy_accuracy(demo.noise, world.prior());
  demo.panels.push_back(tabular_panel(4, demo.noise, derive_seed(seed, 4)));
  demo.panels.push_back(tabular_panel(8, demo.noise, derive_seed(seed, 8), true));
  demo.panels.push_back(tabular_panel(32, demo.noise, derive_seed(seed, 32)));

  const OracleResult best = enumerate_best(world, Objective::noisy(demo.noise));
  const DiscreteClassifier h(world, best.assignment);
  TabularPanel exact;
  exact.sample = world.support();
  exact.maximizer = best.assignment;
  exact.unique = best.unique;
  exact.objective = best.value;
  exact.clean_accuracy = exact_clean_accuracy(h, world);
  exact.confusion = exact_confusion(h, world).rows();
  exact.distinct_points = world.size();
  demo.panels.push_back(std::move(exact));
  return demo;
}

nlohmann::json to_json(const TabularDemo& demo) {
  nlohmann::json panels = nlohmann::json::array();
  for (const TabularPanel& p : demo.panels) {
    nlohmann::json j = {{"case", p.m == 0 ? "exact" : "sample"},
                        {"m", p.m},
                        {"maximizer", p.maximizer},
                        {"unique", p.unique},
                        {"clean_accuracy", p.clean_accuracy},
                        {"confusion", p.confusion},
                        {"distinct_points", p.distinct_points}};
    if (p.m == 0) {
      j["noisy_accuracy"] = p.objective;
    } else {
      j["train_accuracy"] = p.objective;
      nlohmann::json points = nlohmann::json::array();
      for (std::size_t i = 0; i < p.sample.size(); ++i) {
        const auto x = p.sample.features(i);
        points.push_back({x[0], x[1], p.sample.label(i)});
      }
      j["sample"] = std::move(points);
    }
    panels.push_back(std::move(j));
  }
  return {{"noise", to_json(demo.noise)},
          {"max_noisy_accuracy", demo.max_noisy_accuracy},
          {"support", to_json(tabular_world())},
          {"panels", std::move(panels)}};
}

bool BoundAuditReport::all_ok() const {
  for (const auto& r : validation) {
    if (!r.ok) return false;
  }
  for (const auto& r : generalization) {
    if (!r.ok) return false;
  }
  return true;
}

double worst_lookup_gap(std::size_t m, const TransitionMatrix& t, Seed seed) {
  const DiscreteDistribution world = tabular_world();
  const IidDraws draws = sample_iid_indices(world, m, t, seed);
  const auto k = static_cast<std::size_t>(world.k());
  std::vector<std::size_t> counts(world.size() * k, 0);
  for (std::size_t i = 0; i < m; ++i) ++counts[draws.points[i] * k + static_cast<std::size_t>(draws.labels[i])];

  const std::size_t space = *hypothesis_space_size(world);
  double worst = 0.0;
  for (std::size_t idx = 0; idx < space; ++idx) {
    const DiscreteClassifier h(world, assignment_at(idx, world.size(), world.k()));
    std::size_t hits = 0;
    for (std::size_t x = 0; x < world.size(); ++x) hits += counts[x * k + static_cast<std::size_t>(h[x])];
    const double train_acc = static_cast<double>(hits) / static_cast<double>(m);
    worst = std::max(worst, std::abs(train_acc - exact_noisy_accuracy(h, world, t)));
  }
  return worst;
}

BoundAuditReport run_bound_audit_suite(Seed seed, const BoundAuditOptions& opts) {
  const DiscreteDistribution world = tabular_world();
  const TransitionMatrix t = uniform_noise(2, 0.25);
  const std::vector<Label> truth(world.true_labels().begin(), world.true_labels().end());
  std::vector<Label> complement, constant(world.size(), 0), two_flipped = truth;
  for (const Label y : truth) complement.push_back(1 - y);
  two_flipped[0] = 1 - two_flipped[0];
  two_flipped[world.size() - 1] = 1 - two_flipped[world.size() - 1];
  const std::vector<std::pair<std::string, std::vector<Label>>> fixed = {
      {"h_star", truth}, {"two_flipped", two_flipped}, {"constant_0", constant}, {"complement", complement}};

  const std::size_t workers = resolve_workers(opts.workers);
  BoundAuditReport report;
  for (std::size_t c = 0; c < fixed.size(); ++c) {
    const DiscreteClassifier h(world, fixed[c].second);
    for (const std::size_t n : opts.val_sizes) {
      const auto results =
          audit_validation_bounds(h, world, t, n, opts.deltas, opts.trials, derive_seed(seed, c, n), workers);
      for (std::size_t i = 0; i < results.size(); ++i) {
        const double delta = opts.deltas[i];
        const AuditResult& a = results[i];
        const double slack = 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(a.trials));
        report.validation.push_back({fixed[c].first, n, delta, a.bound, a.exact_noisy_accuracy, a.trials,
                                     a.violations, a.violation_frequency() <= delta + slack});
      }
    }
  }
  const Seed gen_seed = derive_seed(seed, "generalization");
  for (const std::size_t m : opts.train_sizes) {
    GeneralizationAuditRow row;
    row.m = m;
    row.d_vc = static_cast<double>(world.size());
    row.delta = opts.gen_delta;
    row.bound = generalization_gap_bound({row.d_vc, row.delta, m, 1});
    row.worst_gap = worst_lookup_gap(m, t, derive_seed(gen_seed, m));
    row.ok = row.worst_gap <= row.bound;
    report.generalization.push_back(row);
  }
  return report;
}

nlohmann::json to_json(const BoundAuditReport& r) {
  nlohmann::json val = nlohmann::json::array();
  for (const auto& v : r.validation) {
    val.push_back({{"classifier", v.classifier},
                   {"n", v.n},
                   {"delta", v.delta},
                   {"bound", v.bound},
                   {"exact_noisy_accuracy", v.exact_noisy_accuracy},
                   {"trials", v.trials},
                   {"violations", v.violations},
                   {"violation_frequency", static_cast<double>(v.violations) / static_cast<double>(v.trials)},
                   {"ok", v.ok}});
  }
  nlohmann::json gen = nlohmann::json::array();
  for (const auto& g : r.generalization) {
    gen.push_back({{"m", g.m},
                   {"d_vc", g.d_vc},
                   {"delta", g.delta},
                   {"bound", g.bound},
                   {"worst_gap", g.worst_gap},
                   {"ok", g.ok}});
  }
  return {{"validation", std::move(val)}, {"generalization", std::move(gen)}, {"all_ok", r.all_ok()}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace nll

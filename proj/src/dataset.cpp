#include "nll/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "nll/errors.hpp"
#include "nll/numeric.hpp"

namespace nll {

LabeledDataset::LabeledDataset(int dim, int k) : dim_(dim), k_(k) {
  if (dim < 1) throw InvalidArgument("dataset feature dimension must be >= 1");
  if (k < 2) throw InvalidArgument("dataset class count must be >= 2");
}

LabeledDataset::LabeledDataset(std::vector<double> features, std::vector<Label> labels, int dim, int k)
    : LabeledDataset(dim, k) {
  if (features.size() != labels.size() * static_cast<std::size_t>(dim)) {
    throw InvalidArgument("dataset has " + std::to_string(labels.size()) + " labels but " +
                          std::to_string(features.size()) + " feature values for dimension " +
                          std::to_string(dim));
  }
  for (const Label y : labels) {
    if (y < 0 || y >= k) throw InvalidArgument("dataset label " + std::to_string(y) + " out of range");
  }
  features_ = std::move(features);
  labels_ = std::move(labels);
}

void LabeledDataset::push_back(std::span<const double> x, Label y) {
  if (static_cast<int>(x.size()) != dim_) throw InvalidArgument("push_back: feature dimension mismatch");
  if (y < 0 || y >= k_) throw InvalidArgument("push_back: label out of range");
  features_.insert(features_.end(), x.begin(), x.end());
  labels_.push_back(y);
}

LabeledDataset LabeledDataset::with_labels(std::vector<Label> labels) const {
  if (labels.size() != labels_.size()) throw InvalidArgument("with_labels: length mismatch");
  return LabeledDataset(features_, std::move(labels), dim_, k_);
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  LabeledDataset out(dim_, k_);
  out.features_.reserve(rows.size() * static_cast<std::size_t>(dim_));
  out.labels_.reserve(rows.size());
  for (const std::size_t r : rows) {
    if (r >= size()) throw InvalidArgument("subset: row index out of range");
    out.push_back(features(r), labels_[r]);
  }
  return out;
}

DiscreteDistribution::DiscreteDistribution(std::vector<std::vector<double>> points, std::vector<double> probs,
                                           std::vector<Label> true_labels, int k)
    : dim_(points.empty() ? 0 : static_cast<int>(points.front().size())),
      k_(k),
      points_(std::move(points)),
      probs_(std::move(probs)),
      true_labels_(std::move(true_labels)) {
  if (k_ < 2) throw InvalidArgument("distribution class count must be >= 2");
  if (points_.empty()) throw InvalidArgument("distribution support is empty");
  if (probs_.size() != points_.size() || true_labels_.size() != points_.size()) {
    throw InvalidArgument("distribution: points, probs and labels must have equal length");
  }
  CompensatedSum total;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (static_cast<int>(points_[i].size()) != dim_ || dim_ < 1) {
      throw InvalidArgument("distribution: inconsistent point dimension");
    }
    if (!(probs_[i] >= 0.0)) throw InvalidArgument("distribution: negative probability");
    if (true_labels_[i] < 0 || true_labels_[i] >= k_) throw InvalidArgument("distribution: label out of range");
    total += probs_[i];
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw InvalidArgument("distribution probabilities sum to " + format_double(total.value()));
  }
  const std::set<std::vector<double>> distinct(points_.begin(), points_.end());
  if (distinct.size() != points_.size()) throw InvalidArgument("distribution: support points must be distinct");
}

std::optional<std::size_t> DiscreteDistribution::find(std::span<const double> x) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (std::equal(x.begin(), x.end(), points_[i].begin(), points_[i].end())) return i;
  }
  return std::nullopt;
}

ClassPrior DiscreteDistribution::prior() const {
  std::vector<CompensatedSum> mass(static_cast<std::size_t>(k_));
  for (std::size_t i = 0; i < size(); ++i) mass[static_cast<std::size_t>(true_labels_[i])] += probs_[i];
  std::vector<double> probs;
  for (const auto& m : mass) probs.push_back(m.value());
  return ClassPrior::from_probs(std::move(probs));
}

LabeledDataset DiscreteDistribution::support() const {
  LabeledDataset out(dim_, k_);
  for (std::size_t i = 0; i < size(); ++i) out.push_back(points_[i], true_labels_[i]);
  return out;
}

DiscreteDistribution tabular_world() {
  std::vector<std::vector<double>> points;
  std::vector<Label> labels;
  for (const double y : {2.0, 1.0, -1.0, -2.0}) {
    for (const double x : {1.0, 2.0}) {
      points.push_back({x, y});
      labels.push_back(y > 0 ? 0 : 1);
    }
  }
  return DiscreteDistribution(std::move(points), std::vector<double>(8, 0.125), std::move(labels), 2);
}

namespace {

void check_generator_args(std::size_t m, double sigma) {
  if (m < 2) throw InvalidArgument("generator needs m >= 2, got " + std::to_string(m));
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("noise_sigma must be finite and >= 0");
}

// Draws floor(m/2) class-0 and ceil(m/2) class-1 points from `place`, jitters
// them and shuffles the rows.
template <class Place>
LabeledDataset generate_two_class(std::size_t m, double sigma, Seed seed, Place place) {
  check_generator_args(m, sigma);
  auto geometry = Rng::stream(seed, "geometry");
  auto jitter = Rng::stream(seed, "jitter");
  auto order_rng = Rng::stream(seed, "order");
  const std::size_t n0 = m / 2;
  std::vector<double> features;
  std::vector<Label> labels;
  features.reserve(2 * m);
  labels.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Label y = i < n0 ? 0 : 1;
    auto [x0, x1] = place(y, geometry);
    features.push_back(x0 + sigma * jitter.normal());
    features.push_back(x1 + sigma * jitter.normal());
    labels.push_back(y);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(std::span(order), order_rng);
  return LabeledDataset(std::move(features), std::move(labels), 2, 2).subset(order);
}

}  // namespace

std::pair<double, double> circles_point(Label y, double theta) {
  const double r = y == 0 ? kOuterRadius : kInnerRadius;
  return {r * std::cos(theta), r * std::sin(theta)};
}

std::pair<double, double> moons_point(Label y, double theta) {
  if (y == 0) return {std::cos(theta), std::sin(theta)};
  return {1.0 - std::cos(theta), 0.5 - std::sin(theta)};
}

LabeledDataset make_circles(std::size_t m, double noise_sigma, Seed seed) {
  return generate_two_class(m, noise_sigma, seed, [](Label y, Rng& rng) {
    return circles_point(y, rng.uniform(0.0, 2.0 * std::numbers::pi));
  });
}

LabeledDataset make_moons(std::size_t m, double noise_sigma, Seed seed) {
  return generate_two_class(m, noise_sigma, seed, [](Label y, Rng& rng) {
    return moons_point(y, rng.uniform(0.0, std::numbers::pi));
  });
}

IidDraws sample_iid_indices(const DiscreteDistribution& d, std::size_t m, const TransitionMatrix& t, Seed seed) {
  if (d.k() != t.k()) throw InvalidArgument("sample_iid: distribution and noise matrix disagree on k");
  auto points = Rng::stream(seed, "points");
  auto flips = Rng::stream(seed, "labels");
  IidDraws out;
  out.points.reserve(m);
  out.labels.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t x = points.categorical(d.probs());
    out.points.push_back(x);
    out.labels.push_back(static_cast<Label>(flips.categorical(t.row(d.true_label(x)))));
  }
  return out;
}

LabeledDataset sample_iid(const DiscreteDistribution& d, std::size_t m, const TransitionMatrix& t, Seed seed) {
  const IidDraws draws = sample_iid_indices(d, m, t, seed);
  LabeledDataset out(d.dim(), d.k());
  for (std::size_t i = 0; i < m; ++i) out.push_back(d.point(draws.points[i]), draws.labels[i]);
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, double val_fraction, Seed seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw InvalidArgument("split: val_fraction must lie in (0, 1)");
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = Rng::stream(seed, "split");
  shuffle(std::span(order), rng);
  const auto n_train =
      static_cast<std::size_t>(std::llround(static_cast<double>(ds.size()) * (1.0 - val_fraction)));
  const std::span<const std::size_t> all(order);
  return {ds.subset(all.first(n_train)), ds.subset(all.subspan(n_train))};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(const LabeledDataset& ds, std::ostream& out) {
  for (int j = 0; j < ds.dim(); ++j) out << 'x' << j << ',';
  out << "label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (const double v : ds.features(i)) out << format_double(v) << ',';
    out << ds.label(i) << '\n';
  }
}

void write_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  write_csv(ds, out);
  if (!out) throw IoError(path.string(), "write failed");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <class T>
T parse_number(std::string_view s, std::size_t line_no) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw InvalidArgument("csv line " + std::to_string(line_no) + ": cannot parse '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

LabeledDataset read_csv(std::istream& in, std::optional<int> k) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.front() != '#') break;
  }
  if (line.empty() || line.front() == '#') throw InvalidArgument("csv: missing header");
  if (line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  const int dim = static_cast<int>(header.size()) - 1;
  if (dim < 1 || header.back() != "label") throw InvalidArgument("csv: header must be x0,...,x{d-1},label");
  for (int j = 0; j < dim; ++j) {
    if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j)) {
      throw InvalidArgument("csv: unexpected header column '" + std::string(header[static_cast<std::size_t>(j)]) + "'");
    }
  }
  std::vector<double> features;
  std::vector<Label> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw InvalidArgument("csv line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " fields");
    }
    for (int j = 0; j < dim; ++j) features.push_back(parse_number<double>(fields[static_cast<std::size_t>(j)], line_no));
    labels.push_back(parse_number<Label>(fields.back(), line_no));
  }
  int classes = 2;
  if (k) {
    classes = *k;
  } else {
    for (const Label y : labels) classes = std::max(classes, y + 1);
  }
  return LabeledDataset(std::move(features), std::move(labels), dim, classes);
}

LabeledDataset read_csv(const std::filesystem::path& path, std::optional<int> k) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  return read_csv(in, k);
}

nlohmann::json to_json(const DiscreteDistribution& d) {
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < d.size(); ++i) points.push_back(std::vector<double>(d.point(i).begin(), d.point(i).end()));
  return {{"k", d.k()},
          {"points", points},
          {"probs", std::vector<double>(d.probs().begin(), d.probs().end())},
          {"labels", std::vector<Label>(d.true_labels().begin(), d.true_labels().end())}};
}

DiscreteDistribution world_from_json(const nlohmann::json& j) {
  try {
    return DiscreteDistribution(j.at("points").get<std::vector<std::vector<double>>>(),
                                j.at("probs").get<std::vector<double>>(), j.at("labels").get<std::vector<Label>>(),
                                j.at("k").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed world document: ") + e.what());
  }
}

void save_world(const DiscreteDistribution& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << to_json(d).dump(2) << '\n';
}

DiscreteDistribution load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  try {
    return world_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string(), e.what());
  }
}

}  // namespace nll

#include "nll/noise.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "nll/errors.hpp"
#include "nll/numeric.hpp"

namespace nll {

namespace {

constexpr double kRowSumTolerance = 1e-9;

void check_class_count(int k) {
  if (k < 2) throw InvalidArgument("class count must be >= 2, got " + std::to_string(k));
}

}  // namespace

TransitionMatrix TransitionMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                             bool renormalize) {
  const int k = static_cast<int>(rows.size());
  check_class_count(k);
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    if (static_cast<int>(r.size()) != k) {
      throw InvalidArgument("transition matrix row " + std::to_string(i) + " has " +
                            std::to_string(r.size()) + " entries, expected " + std::to_string(k));
    }
    CompensatedSum sum;
    for (const double v : r) {
      if (!std::isfinite(v) || v < 0.0 || (!renormalize && v > 1.0)) {
        throw InvalidArgument("transition matrix entries must lie in [0, 1]");
      }
      sum += v;
    }
    if (renormalize) {
      if (sum.value() <= 0.0) throw InvalidArgument("cannot renormalize an all-zero row");
      for (const double v : r) data.push_back(v / sum.value());
    } else {
      if (std::abs(sum.value() - 1.0) > kRowSumTolerance) {
        throw InvalidArgument("transition matrix row " + std::to_string(i) + " sums to " +
                              std::to_string(sum.value()));
      }
      data.insert(data.end(), r.begin(), r.end());
    }
  }
  return TransitionMatrix(k, std::move(data));
}

TransitionMatrix TransitionMatrix::identity(int k) {
  check_class_count(k);
  std::vector<double> data(static_cast<std::size_t>(k * k), 0.0);
  for (int i = 0; i < k; ++i) data[static_cast<std::size_t>(i * k + i)] = 1.0;
  return TransitionMatrix(k, std::move(data));
}

std::vector<std::vector<double>> TransitionMatrix::rows() const {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < k_; ++i) out.emplace_back(row(i).begin(), row(i).end());
  return out;
}

double TransitionMatrix::min_margin() const {
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j < k_; ++j) {
      if (j != i) margin = std::min(margin, (*this)(i, i) - (*this)(i, j));
    }
  }
  return margin;
}

ClassPrior ClassPrior::from_probs(std::vector<double> probs) {
  check_class_count(static_cast<int>(probs.size()));
  CompensatedSum sum;
  for (const double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidArgument("class prior entries must be >= 0");
    sum += p;
  }
  if (std::abs(sum.value() - 1.0) > kRowSumTolerance) {
    throw InvalidArgument("class prior sums to " + std::to_string(sum.value()));
  }
  return ClassPrior(std::move(probs));
}

ClassPrior ClassPrior::uniform(int k) {
  check_class_count(k);
  return ClassPrior(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

bool ClassPrior::strictly_positive() const {
  return std::all_of(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; });
}

double noise_rate(const TransitionMatrix& t, const ClassPrior& prior) {
  if (t.k() != prior.k()) {
    throw InvalidArgument("noise_rate: matrix has " + std::to_string(t.k()) + " classes, prior has " +
                          std::to_string(prior.k()));
  }
  CompensatedSum kept;
  for (int i = 0; i < t.k(); ++i) kept += prior[i] * t(i, i);
  return std::clamp(1.0 - kept.value(), 0.0, 1.0);
}

bool is_diagonally_dominant(const TransitionMatrix& t) {
  for (int i = 0; i < t.k(); ++i) {
    for (int j = 0; j < t.k(); ++j) {
      if (j != i && !(t(i, i) > t(i, j))) return false;
    }
  }
  return true;
}

std::vector<Label> corrupt_labels(std::span<const Label> labels, const TransitionMatrix& t, Seed seed) {
  for (const Label y : labels) {
    if (y < 0 || y >= t.k()) {
      throw InvalidArgument("corrupt_labels: label " + std::to_string(y) + " outside [0, " +
                            std::to_string(t.k()) + ")");
    }
  }
  auto rng = Rng::stream(seed, "corrupt-labels");
  std::vector<Label> out;
  out.reserve(labels.size());
  for (const Label y : labels) out.push_back(static_cast<Label>(rng.categorical(t.row(y))));
  return out;
}

TransitionMatrix uniform_noise(int k, double rate) {
  check_class_count(k);
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidArgument("uniform_noise: rate must lie in [0, 1)");
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(k),
                                        std::vector<double>(static_cast<std::size_t>(k), rate / (k - 1)));
  for (int i = 0; i < k; ++i) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0 - rate;
  return TransitionMatrix::from_rows(rows);
}

TransitionMatrix pair_noise(int k, double rate) {
  check_class_count(k);
  if (!(rate >= 0.0 && rate < 0.5)) throw InvalidArgument("pair_noise: rate must lie in [0, 0.5)");
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(k),
                                        std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int i = 0; i < k; ++i) {
    auto& r = rows[static_cast<std::size_t>(i)];
    r[static_cast<std::size_t>(i)] = 1.0 - rate;
    r[static_cast<std::size_t>((i + 1) % k)] += rate;
  }
  return TransitionMatrix::from_rows(rows);
}

nlohmann::json to_json(const TransitionMatrix& t) {
  return {{"k", t.k()}, {"rows", t.rows()}};
}

TransitionMatrix transition_from_json(const nlohmann::json& j) {
  try {
    const auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
    const int k = j.at("k").get<int>();
    if (k != static_cast<int>(rows.size())) {
      throw InvalidArgument("transition document: k = " + std::to_string(k) + " but " +
                            std::to_string(rows.size()) + " rows");
    }
    return TransitionMatrix::from_rows(rows);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed transition document: ") + e.what());
  }
}

void save_transition(const TransitionMatrix& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << to_json(t).dump(2) << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

TransitionMatrix load_transition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  try {
    return transition_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string(), e.what());
  }
}

}  // namespace nll

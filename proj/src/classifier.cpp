#include "nll/classifier.hpp"

#include <cmath>
#include <string>

#include "nll/errors.hpp"
#include "nll/numeric.hpp"

namespace nll {

Label Classifier::predict(std::span<const double> x) const {
  const auto scores = predict_scores(x);
  return static_cast<Label>(argmax_lowest(std::span<const double>(scores)));
}

std::vector<Label> Classifier::predict_all(const LabeledDataset& ds) const {
  std::vector<Label> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.push_back(predict(ds.features(i)));
  return out;
}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int k = static_cast<int>(rows.size());
  if (k < 2) throw InvalidArgument("confusion matrix needs k >= 2");
  std::vector<double> data;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != k) throw InvalidArgument("confusion matrix must be square");
    CompensatedSum sum;
    for (const double v : r) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("confusion entries must lie in [0, 1]");
      sum += v;
    }
    if (std::abs(sum.value() - 1.0) > 1e-9) throw InvalidArgument("confusion row does not sum to 1");
    data.insert(data.end(), r.begin(), r.end());
  }
  return ConfusionMatrix(k, std::move(data), std::vector<bool>(static_cast<std::size_t>(k), true));
}

ConfusionMatrix ConfusionMatrix::identity(int k) {
  if (k < 2) throw InvalidArgument("confusion matrix needs k >= 2");
  std::vector<double> data(static_cast<std::size_t>(k * k), 0.0);
  for (int i = 0; i < k; ++i) data[static_cast<std::size_t>(i * k + i)] = 1.0;
  return ConfusionMatrix(k, std::move(data), std::vector<bool>(static_cast<std::size_t>(k), true));
}

ConfusionMatrix ConfusionMatrix::from_counts(int k, std::span<const double> counts) {
  if (k < 2 || counts.size() != static_cast<std::size_t>(k * k)) {
    throw InvalidArgument("from_counts: expected k*k counts");
  }
  std::vector<double> data(counts.begin(), counts.end());
  std::vector<bool> defined(static_cast<std::size_t>(k), false);
  for (int i = 0; i < k; ++i) {
    CompensatedSum total;
    for (int j = 0; j < k; ++j) total += data[static_cast<std::size_t>(i * k + j)];
    if (total.value() > 0.0) {
      defined[static_cast<std::size_t>(i)] = true;
      for (int j = 0; j < k; ++j) data[static_cast<std::size_t>(i * k + j)] /= total.value();
    }
  }
  return ConfusionMatrix(k, std::move(data), std::move(defined));
}

bool ConfusionMatrix::all_defined() const {
  return std::all_of(defined_.begin(), defined_.end(), [](bool b) { return b; });
}

std::vector<std::vector<double>> ConfusionMatrix::rows() const {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < k_; ++i) {
    out.emplace_back(data_.begin() + i * k_, data_.begin() + (i + 1) * k_);
  }
  return out;
}

namespace {

void check_compatible(const Classifier& h, const LabeledDataset& ds, const char* who) {
  if (h.dim() != ds.dim()) throw InvalidArgument(std::string(who) + ": feature dimension mismatch");
  if (h.k() != ds.k()) throw InvalidArgument(std::string(who) + ": class count mismatch");
}

}  // namespace

double accuracy(const Classifier& h, const LabeledDataset& ds) {
  if (ds.empty()) throw InvalidArgument("accuracy: empty dataset");
  check_compatible(h, ds, "accuracy");
  const auto predictions = h.predict_all(ds);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) hits += predictions[i] == ds.label(i) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

ConfusionMatrix confusion(const Classifier& h, const LabeledDataset& ds) {
  check_compatible(h, ds, "confusion");
  const int k = ds.k();
  std::vector<double> counts(static_cast<std::size_t>(k * k), 0.0);
  const auto predictions = h.predict_all(ds);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    counts[static_cast<std::size_t>(ds.label(i) * k + predictions[i])] += 1.0;
  }
  return ConfusionMatrix::from_counts(k, counts);
}

ConstantClassifier::ConstantClassifier(int dim, int k, Label value) : dim_(dim), k_(k), value_(value) {
  if (value < 0 || value >= k) throw InvalidArgument("constant classifier label out of range");
}

std::vector<double> ConstantClassifier::predict_scores(std::span<const double>) const {
  std::vector<double> s(static_cast<std::size_t>(k_), 0.0);
  s[static_cast<std::size_t>(value_)] = 1.0;
  return s;
}

LookupClassifier::LookupClassifier(const LabeledDataset& train, TieBreak tie_break, Label fallback)
    : dim_(train.dim()), k_(train.k()), fallback_(fallback) {
  if (fallback < 0 || fallback >= k_) throw InvalidArgument("lookup classifier fallback label out of range");
  std::map<std::vector<double>, std::vector<std::size_t>> counts;
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto& c = counts[std::vector<double>(train.features(i).begin(), train.features(i).end())];
    if (c.empty()) c.assign(static_cast<std::size_t>(k_), 0);
    ++c[static_cast<std::size_t>(train.label(i))];
  }
  for (auto& [x, c] : counts) {
    Label best = 0;
    for (int j = 1; j < k_; ++j) {
      const auto cj = c[static_cast<std::size_t>(j)];
      const auto cb = c[static_cast<std::size_t>(best)];
      if (cj > cb || (cj == cb && tie_break == TieBreak::HighestIndex)) best = j;
    }
    table_.emplace(x, best);
  }
}

Label LookupClassifier::predict(std::span<const double> x) const {
  const auto it = table_.find(std::vector<double>(x.begin(), x.end()));
  return it == table_.end() ? fallback_ : it->second;
}

std::vector<double> LookupClassifier::predict_scores(std::span<const double> x) const {
  std::vector<double> s(static_cast<std::size_t>(k_), 0.0);
  s[static_cast<std::size_t>(predict(x))] = 1.0;
  return s;
}

}  // namespace nll

#include "nll/mlp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "nll/errors.hpp"
#include "nll/numeric.hpp"

namespace nll {

namespace {

void check_layer_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw InvalidArgument("an MLP needs at least input and output layers");
  for (const int s : sizes) {
    if (s < 1) throw InvalidArgument("layer sizes must be positive");
  }
  if (sizes.back() < 2) throw InvalidArgument("output layer must have >= 2 classes");
}

}  // namespace

MlpParams MlpParams::zeros(std::vector<int> layer_sizes) {
  check_layer_sizes(layer_sizes);
  MlpParams p;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    p.weights.push_back(Eigen::MatrixXd::Zero(layer_sizes[l + 1], layer_sizes[l]));
    p.biases.push_back(Eigen::VectorXd::Zero(layer_sizes[l + 1]));
  }
  p.layer_sizes = std::move(layer_sizes);
  return p;
}

MlpParams MlpParams::he_init(std::vector<int> layer_sizes, Seed seed) {
  MlpParams p = zeros(std::move(layer_sizes));
  auto rng = Rng::stream(seed, "mlp-init");
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    auto& w = p.weights[l];
    const double scale = std::sqrt(2.0 / static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * rng.normal();
    }
  }
  return p;
}

std::size_t MlpParams::num_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  }
  return n;
}

bool MlpParams::all_finite() const {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

std::vector<double> MlpParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(num_params());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const auto& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    }
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) flat.push_back(biases[l](r));
  }
  return flat;
}

void MlpParams::assign(std::span<const double> flat) {
  if (flat.size() != num_params()) {
    throw InvalidArgument("parameter vector has " + std::to_string(flat.size()) + " entries, expected " +
                          std::to_string(num_params()));
  }
  std::size_t i = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    auto& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[i++];
    }
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) biases[l](r) = flat[i++];
  }
}

bool operator==(const MlpParams& a, const MlpParams& b) {
  return a.layer_sizes == b.layer_sizes && a.flatten() == b.flatten();
}

namespace {

// Dense rectifier network in scalar type S with reusable workspaces.
template <class S>
class Network {
 public:
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  explicit Network(const MlpParams& p) {
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      weights_.push_back(p.weights[l].cast<S>());
      biases_.push_back(p.biases[l].cast<S>());
    }
    grad_w_.resize(weights_.size());
    grad_b_.resize(weights_.size());
    pre_.resize(weights_.size());
    post_.resize(weights_.size());
    delta_.resize(weights_.size());
  }

  std::size_t layers() const { return weights_.size(); }

  void to_params(MlpParams& p) const {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      p.weights[l] = weights_[l].template cast<double>();
      p.biases[l] = biases_[l].template cast<double>();
    }
  }

  /// Forward pass over the columns of x; returns the output-layer scores.
  template <class Input>
  const Mat& forward(const Input& x) {
    const std::size_t last = layers() - 1;
    for (std::size_t l = 0; l < layers(); ++l) {
      if (l == 0) {
        pre_[l].noalias() = weights_[l] * x;
      } else {
        pre_[l].noalias() = weights_[l] * post_[l - 1];
      }
      pre_[l].colwise() += biases_[l];
      if (l != last) post_[l] = pre_[l].cwiseMax(S(0));
    }
    return pre_[last];
  }

  /// Forward + backward over all columns of x; returns the mean
  /// cross-entropy and leaves the full-batch gradient in grad_w_/grad_b_.
  /// Columns are processed in blocks so the activations stay cache resident.
  template <class Input>
  double loss_and_backward(const Input& x, std::span<const Label> labels) {
    const Eigen::Index n = x.cols();
    for (std::size_t l = 0; l < layers(); ++l) {
      grad_w_[l].setZero(weights_[l].rows(), weights_[l].cols());
      grad_b_[l].setZero(biases_[l].size());
    }
    CompensatedSum loss;
    const S inv_n = S(1) / static_cast<S>(n);
    for (Eigen::Index start = 0; start < n; start += kBlock) {
      const Eigen::Index len = std::min(kBlock, n - start);
      loss += accumulate_block(x.middleCols(start, len), labels.subspan(static_cast<std::size_t>(start)), inv_n);
    }
    return loss.value() / static_cast<double>(n);
  }

  /// Heavy-ball update: v <- momentum * v + g, w <- w - lr * v. With zero
  /// momentum this is plain gradient descent.
  void sgd_step(S learning_rate, S momentum) {
    if (vel_w_.empty()) {
      for (std::size_t l = 0; l < layers(); ++l) {
        vel_w_.push_back(Mat::Zero(weights_[l].rows(), weights_[l].cols()));
        vel_b_.push_back(Vec::Zero(biases_[l].size()));
      }
    }
    for (std::size_t l = 0; l < layers(); ++l) {
      vel_w_[l] = momentum * vel_w_[l] + grad_w_[l];
      vel_b_[l] = momentum * vel_b_[l] + grad_b_[l];
      weights_[l].noalias() -= learning_rate * vel_w_[l];
      biases_[l].noalias() -= learning_rate * vel_b_[l];
    }
  }

  void gradients_to(MlpParams& g) const {
    for (std::size_t l = 0; l < layers(); ++l) {
      g.weights[l] = grad_w_[l].template cast<double>();
      g.biases[l] = grad_b_[l].template cast<double>();
    }
  }

 private:
  static constexpr Eigen::Index kBlock = 1024;

  template <class Block>
  double accumulate_block(const Block& x, std::span<const Label> labels, S inv_n) {
    const Mat& scores = forward(x);
    const Eigen::Index n = scores.cols();
    const std::size_t last = layers() - 1;
    // delta_[last] = (softmax(scores) - onehot(labels)) / total count.
    Mat& top_delta = delta_[last];
    top_delta.resize(scores.rows(), n);
    double loss = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      const S top = scores.col(c).maxCoeff();
      S total = S(0);
      for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        const S e = std::exp(scores(r, c) - top);
        top_delta(r, c) = e;
        total += e;
      }
      const auto y = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(c)]);
      loss += static_cast<double>(std::log(total) + top - scores(y, c));
      top_delta.col(c) *= inv_n / total;
      top_delta(y, c) -= inv_n;
    }
    for (std::size_t l = last + 1; l-- > 0;) {
      if (l == 0) {
        grad_w_[l].noalias() += delta_[l] * x.transpose();
      } else {
        grad_w_[l].noalias() += delta_[l] * post_[l - 1].transpose();
      }
      grad_b_[l].noalias() += delta_[l].rowwise().sum();
      if (l > 0) {
        delta_[l - 1].noalias() = weights_[l].transpose() * delta_[l];
        delta_[l - 1] = (post_[l - 1].array() > S(0)).select(delta_[l - 1], S(0));
      }
    }
    return loss;
  }

  std::vector<Mat> weights_;
  std::vector<Vec> biases_;
  std::vector<Mat> grad_w_;
  std::vector<Vec> grad_b_;
  std::vector<Mat> pre_;
  std::vector<Mat> post_;
  std::vector<Mat> delta_;
  std::vector<Mat> vel_w_;
  std::vector<Vec> vel_b_;
};

Eigen::Map<const Eigen::MatrixXd> feature_matrix(const LabeledDataset& ds) {
  return {ds.flat_features().data(), ds.dim(), static_cast<Eigen::Index>(ds.size())};
}

void check_fits(const MlpParams& p, const LabeledDataset& ds, const char* who) {
  if (ds.dim() != p.input_dim()) throw InvalidArgument(std::string(who) + ": feature dimension mismatch");
  if (ds.k() != p.num_classes()) throw InvalidArgument(std::string(who) + ": class count mismatch");
}

}  // namespace

Mlp::Mlp(MlpParams params) : params_(std::move(params)) {
  check_layer_sizes(params_.layer_sizes);
  if (params_.weights.size() + 1 != params_.layer_sizes.size()) throw InvalidArgument("malformed MLP parameters");
}

std::vector<double> Mlp::predict_scores(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw InvalidArgument("predict_scores: feature dimension mismatch");
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < params_.weights.size(); ++l) {
    Eigen::VectorXd z = params_.weights[l] * a + params_.biases[l];
    a = l + 1 == params_.weights.size() ? z : Eigen::VectorXd(z.cwiseMax(0.0));
  }
  return {a.data(), a.data() + a.size()};
}

std::vector<Label> Mlp::predict_all(const LabeledDataset& ds) const {
  if (ds.dim() != dim()) throw InvalidArgument("predict_all: feature dimension mismatch");
  std::vector<Label> out(ds.size());
  if (ds.empty()) return out;
  Network<double> net(params_);
  const auto x = feature_matrix(ds);
  constexpr Eigen::Index kChunk = 8192;
  for (Eigen::Index start = 0; start < x.cols(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, x.cols() - start);
    const auto& scores = net.forward(x.middleCols(start, len));
    for (Eigen::Index c = 0; c < len; ++c) {
      Eigen::Index best = 0;
      for (Eigen::Index r = 1; r < scores.rows(); ++r) {
        if (scores(r, c) > scores(best, c)) best = r;
      }
      out[static_cast<std::size_t>(start + c)] = static_cast<Label>(best);
    }
  }
  return out;
}

void TrainConfig::validate() const {
  if (max_steps < 1) throw InvalidArgument("max_steps must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning_rate must be finite and >= 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("momentum must lie in [0, 1)");
  if (checkpoint_every < 1) throw InvalidArgument("checkpoint_every must be >= 1");
  if (convergence_window < 0) throw InvalidArgument("convergence_window must be >= 0");
  if (!(convergence_tol >= 0.0)) throw InvalidArgument("convergence_tol must be >= 0");
  for (const int h : hidden_layers) {
    if (h < 1) throw InvalidArgument("hidden layer sizes must be positive");
  }
}

TrainingDiverged::TrainingDiverged(int step, CheckpointRecord last_finite)
    : std::runtime_error("training diverged at step " + std::to_string(step) + " (last finite checkpoint at step " +
                         std::to_string(last_finite.step) + ")"),
      step_(step),
      last_finite_(std::move(last_finite)) {}

LossAndGradient loss_and_gradient(const MlpParams& params, const LabeledDataset& ds) {
  check_fits(params, ds, "loss_and_gradient");
  if (ds.empty()) throw InvalidArgument("loss_and_gradient: empty dataset");
  Network<double> net(params);
  LossAndGradient out{net.loss_and_backward(feature_matrix(ds), ds.labels()), MlpParams::zeros(params.layer_sizes)};
  net.gradients_to(out.gradient);
  return out;
}

namespace {

// Relative change of the training loss over the last convergence_window
// steps, checked on checkpoint boundaries only.
bool has_converged(const std::vector<double>& losses, const TrainConfig& cfg) {
  if (cfg.convergence_window <= 0) return false;
  const auto step = static_cast<int>(losses.size());
  if (step % cfg.checkpoint_every != 0 || step <= cfg.convergence_window) return false;
  const double before = losses[static_cast<std::size_t>(step - 1 - cfg.convergence_window)];
  const double now = losses.back();
  return std::abs(before - now) <= cfg.convergence_tol * std::abs(before);
}

template <class S>
TrainResult train_impl(const LabeledDataset& train, const TrainConfig& cfg, const LabeledDataset* monitor,
                       const LabeledDataset* clean_test) {
  std::vector<int> sizes{train.dim()};
  sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  sizes.push_back(train.k());

  TrainResult result{MlpParams::he_init(sizes, cfg.seed), {}, {}};
  Network<S> net(result.params);
  using Mat = typename Network<S>::Mat;
  const Mat x_full = feature_matrix(train).template cast<S>();

  const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= train.size();
  auto batch_rng = Rng::stream(cfg.seed, "minibatch");
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();
  Mat x_batch;
  std::vector<Label> y_batch;

  auto make_record = [&](int step, double loss) {
    CheckpointRecord rec;
    rec.step = step;
    rec.params = result.params;
    net.to_params(rec.params);
    rec.train_loss = loss;
    const Mlp model(rec.params);
    rec.train_acc = accuracy(model, train);
    if (monitor != nullptr) rec.noisy_val_acc = accuracy(model, *monitor);
    if (clean_test != nullptr) rec.clean_test_acc = accuracy(model, *clean_test);
    return rec;
  };

  CheckpointRecord last_finite = make_record(0, std::numeric_limits<double>::quiet_NaN());
  result.loss_history.reserve(static_cast<std::size_t>(cfg.max_steps));
  const auto lr = static_cast<S>(cfg.learning_rate);
  const auto momentum = static_cast<S>(cfg.momentum);

  for (int step = 1; step <= cfg.max_steps; ++step) {
    double loss = 0.0;
    if (full_batch) {
      loss = net.loss_and_backward(x_full, train.labels());
    } else {
      x_batch.resize(train.dim(), static_cast<Eigen::Index>(cfg.batch_size));
      y_batch.resize(cfg.batch_size);
      for (std::size_t b = 0; b < cfg.batch_size; ++b) {
        if (cursor == order.size()) {
          shuffle(std::span(order), batch_rng);
          cursor = 0;
        }
        const std::size_t row = order[cursor++];
        x_batch.col(static_cast<Eigen::Index>(b)) = x_full.col(static_cast<Eigen::Index>(row));
        y_batch[b] = train.label(row);
      }
      loss = net.loss_and_backward(x_batch, y_batch);
    }
    if (!std::isfinite(loss)) throw TrainingDiverged(step, std::move(last_finite));
    result.loss_history.push_back(loss);
    net.sgd_step(lr, momentum);

    const bool converged = has_converged(result.loss_history, cfg);
    if (step % cfg.checkpoint_every == 0 || step == cfg.max_steps || converged) {
      auto rec = make_record(step, loss);
      if (!rec.params.all_finite()) throw TrainingDiverged(step, std::move(last_finite));
      last_finite = rec;
      result.checkpoints.push_back(std::move(rec));
    }
    if (converged) break;
  }
  result.params = result.checkpoints.back().params;
  return result;
}

}  // namespace

TrainResult train_mlp(const LabeledDataset& train, const TrainConfig& cfg, const LabeledDataset* monitor,
                      const LabeledDataset* clean_test) {
  cfg.validate();
  if (train.empty()) throw InvalidArgument("train_mlp: empty training set");
  for (const LabeledDataset* extra : {monitor, clean_test}) {
    if (extra != nullptr && (extra->dim() != train.dim() || extra->k() != train.k())) {
      throw InvalidArgument("train_mlp: evaluation set does not match the training set's shape");
    }
  }
  if (cfg.precision == Precision::Float64) return train_impl<double>(train, cfg, monitor, clean_test);
  return train_impl<float>(train, cfg, monitor, clean_test);
}

nlohmann::json to_json(const MlpParams& p) {
  return {{"kind", "mlp"}, {"layer_sizes", p.layer_sizes}, {"params", p.flatten()}};
}

MlpParams mlp_params_from_json(const nlohmann::json& j) {
  try {
    MlpParams p = MlpParams::zeros(j.at("layer_sizes").get<std::vector<int>>());
    p.assign(j.at("params").get<std::vector<double>>());
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const MlpParams& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << to_json(p).dump() << '\n';
}

MlpParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  try {
    return mlp_params_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string(), e.what());
  }
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"hidden_layers", cfg.hidden_layers},
          {"max_steps", cfg.max_steps},
          {"learning_rate", cfg.learning_rate},
          {"momentum", cfg.momentum},
          {"batch_size", cfg.batch_size},
          {"seed", cfg.seed},
          {"checkpoint_every", cfg.checkpoint_every},
          {"convergence_window", cfg.convergence_window},
          {"convergence_tol", cfg.convergence_tol},
          {"precision", cfg.precision == Precision::Float32 ? "float32" : "float64"}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  try {
    if (j.contains("hidden_layers")) cfg.hidden_layers = j.at("hidden_layers").get<std::vector<int>>();
    if (j.contains("max_steps")) cfg.max_steps = j.at("max_steps").get<int>();
    if (j.contains("learning_rate")) cfg.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("momentum")) cfg.momentum = j.at("momentum").get<double>();
    if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<Seed>();
    if (j.contains("checkpoint_every")) cfg.checkpoint_every = j.at("checkpoint_every").get<int>();
    if (j.contains("convergence_window")) cfg.convergence_window = j.at("convergence_window").get<int>();
    if (j.contains("convergence_tol")) cfg.convergence_tol = j.at("convergence_tol").get<double>();
    if (j.contains("precision")) {
      const auto p = j.at("precision").get<std::string>();
      if (p == "float32") {
        cfg.precision = Precision::Float32;
      } else if (p == "float64") {
        cfg.precision = Precision::Float64;
      } else {
        throw InvalidArgument("precision must be float32 or float64, got " + p);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed training config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  try {
    return train_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string(), e.what());
  }
}

}  // namespace nll

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "nll/bounds.hpp"
#include "nll/classifier.hpp"
#include "nll/dataset.hpp"
#include "nll/errors.hpp"
#include "nll/experiments.hpp"
#include "nll/mlp.hpp"
#include "nll/noise.hpp"
#include "nll/nts.hpp"
#include "nll/oracle.hpp"

namespace py = pybind11;
using namespace nll;

namespace {

LabeledDataset dataset_from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> x,
                                   const std::vector<Label>& labels, int k) {
  if (x.ndim() != 2) throw InvalidArgument("features must be a 2-d array");
  const auto n = static_cast<std::size_t>(x.shape(0));
  const int dim = static_cast<int>(x.shape(1));
  std::vector<double> flat(x.data(), x.data() + n * static_cast<std::size_t>(dim));
  return LabeledDataset(std::move(flat), labels, dim, k);
}

py::array_t<double> features_array(const LabeledDataset& ds) {
  py::array_t<double> out({static_cast<py::ssize_t>(ds.size()), static_cast<py::ssize_t>(ds.dim())});
  const auto flat = ds.flat_features();
  std::copy(flat.begin(), flat.end(), out.mutable_data());
  return out;
}

Objective objective_from(const std::string& kind, const TransitionMatrix* t, const LabeledDataset* sample) {
  if (kind == "clean") return Objective::clean();
  if (kind == "noisy") {
    if (t == nullptr) throw InvalidArgument("noisy objective needs a noise matrix");
    return Objective::noisy(*t);
  }
  if (kind == "empirical") {
    if (sample == nullptr) throw InvalidArgument("empirical objective needs a sample");
    return Objective::empirical(*sample);
  }
  throw InvalidArgument("objective must be clean, noisy or empirical");
}

}  // namespace

PYBIND11_MODULE(_nll, m) {
  m.doc() = "Label-noise robustness toolkit";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<AssumptionViolated>(m, "AssumptionViolated", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_OverflowError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_ArithmeticError);

  py::class_<TransitionMatrix>(m, "TransitionMatrix")
      .def_static("from_rows", &TransitionMatrix::from_rows, py::arg("rows"), py::arg("renormalize") = false)
      .def_static("identity", &TransitionMatrix::identity)
      .def_property_readonly("k", &TransitionMatrix::k)
      .def("rows", &TransitionMatrix::rows)
      .def("min_margin", &TransitionMatrix::min_margin)
      .def("__getitem__", [](const TransitionMatrix& t, std::pair<int, int> ij) { return t(ij.first, ij.second); })
      .def("__eq__", [](const TransitionMatrix& a, const TransitionMatrix& b) { return a == b; });

  py::class_<ClassPrior>(m, "ClassPrior")
      .def_static("from_probs", &ClassPrior::from_probs)
      .def_static("uniform", &ClassPrior::uniform)
      .def_property_readonly("k", &ClassPrior::k)
      .def("probs", [](const ClassPrior& p) { return std::vector<double>(p.probs().begin(), p.probs().end()); });

  m.def("uniform_noise", &uniform_noise, py::arg("k"), py::arg("rate"));
  m.def("pair_noise", &pair_noise, py::arg("k"), py::arg("rate"));
  m.def("noise_rate", &noise_rate, py::arg("t"), py::arg("prior"));
  m.def("is_diagonally_dominant", &is_diagonally_dominant);
  m.def("corrupt_labels", [](const std::vector<Label>& labels, const TransitionMatrix& t, Seed seed) {
    return corrupt_labels(labels, t, seed);
  }, py::arg("labels"), py::arg("t"), py::arg("seed"));

  py::class_<LabeledDataset>(m, "LabeledDataset")
      .def(py::init(&dataset_from_arrays), py::arg("features"), py::arg("labels"), py::arg("k"))
      .def("__len__", &LabeledDataset::size)
      .def_property_readonly("dim", &LabeledDataset::dim)
      .def_property_readonly("k", &LabeledDataset::k)
      .def("features", &features_array)
      .def("labels", [](const LabeledDataset& d) { return std::vector<Label>(d.labels().begin(), d.labels().end()); })
      .def("with_labels", &LabeledDataset::with_labels);

  py::class_<DiscreteDistribution>(m, "DiscreteDistribution")
      .def(py::init<std::vector<std::vector<double>>, std::vector<double>, std::vector<Label>, int>(),
           py::arg("points"), py::arg("probs"), py::arg("true_labels"), py::arg("k"))
      .def("__len__", &DiscreteDistribution::size)
      .def_property_readonly("k", &DiscreteDistribution::k)
      .def("prior", &DiscreteDistribution::prior)
      .def("support", &DiscreteDistribution::support)
      .def("true_labels", [](const DiscreteDistribution& d) {
        return std::vector<Label>(d.true_labels().begin(), d.true_labels().end());
      });

  m.def("tabular_world", &tabular_world);
  m.def("make_moons", &make_moons, py::arg("m"), py::arg("noise_sigma") = kDefaultMoonsSigma, py::arg("seed") = 0);
  m.def("make_circles", &make_circles, py::arg("m"), py::arg("noise_sigma") = kDefaultCirclesSigma,
        py::arg("seed") = 0);
  m.def("sample_iid", &sample_iid, py::arg("d"), py::arg("m"), py::arg("t"), py::arg("seed"));

  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def_static("from_rows", &ConfusionMatrix::from_rows)
      .def_static("identity", &ConfusionMatrix::identity)
      .def_property_readonly("k", &ConfusionMatrix::k)
      .def("rows", &ConfusionMatrix::rows)
      .def("__getitem__", [](const ConfusionMatrix& c, std::pair<int, int> ij) { return c(ij.first, ij.second); });

  py::class_<Classifier>(m, "Classifier")
      .def("predict_all", &Classifier::predict_all)
      .def_property_readonly("k", &Classifier::k)
      .def_property_readonly("dim", &Classifier::dim);
  py::class_<ConstantClassifier, Classifier>(m, "ConstantClassifier").def(py::init<int, int, Label>());
  py::class_<LookupClassifier, Classifier>(m, "LookupClassifier")
      .def(py::init([](const LabeledDataset& train) { return LookupClassifier(train); }));
  py::class_<DiscreteClassifier, Classifier>(m, "DiscreteClassifier")
      .def(py::init<const DiscreteDistribution&, std::vector<Label>, Label>(), py::arg("d"), py::arg("assignment"),
           py::arg("fallback") = 0)
      .def("assignment", [](const DiscreteClassifier& h) {
        return std::vector<Label>(h.assignment().begin(), h.assignment().end());
      });
  py::class_<Mlp, Classifier>(m, "Mlp");
  m.def("accuracy", &accuracy);
  m.def("confusion", &confusion);

  m.def("noisy_accuracy", &noisy_accuracy, py::arg("c"), py::arg("t"), py::arg("prior"));
  m.def("max_noisy_accuracy", &max_noisy_accuracy, py::arg("t"), py::arg("prior"));
  m.def("noisy_gap_identity", &noisy_gap_identity, py::arg("c"), py::arg("t"), py::arg("prior"));
  m.def("clean_accuracy_lower_bound", &clean_accuracy_lower_bound, py::arg("noisy_gap"), py::arg("t"));
  m.def("generalization_gap_bound", [](std::size_t mm, double d_vc, double delta) {
    return generalization_gap_bound({d_vc, delta, mm, 1});
  }, py::arg("m"), py::arg("d_vc"), py::arg("delta"));
  m.def("validation_gap_bound", &validation_gap_bound, py::arg("n"), py::arg("delta"));
  m.def("bonferroni_validation_gap_bound", &bonferroni_validation_gap_bound, py::arg("n"), py::arg("delta"),
        py::arg("selections"));
  m.def("audit_validation_bound", [](const Classifier& h, const DiscreteDistribution& d, const TransitionMatrix& t,
                                     std::size_t n, double delta, std::size_t trials, Seed seed) {
    return to_json(audit_validation_bound(h, d, t, n, delta, trials, seed)).dump();
  }, py::arg("h"), py::arg("d"), py::arg("t"), py::arg("n"), py::arg("delta"), py::arg("trials"), py::arg("seed"));

  m.def("exact_clean_accuracy", &exact_clean_accuracy);
  m.def("exact_noisy_accuracy", &exact_noisy_accuracy);
  m.def("exact_confusion", &exact_confusion);
  m.def("enumerate_best", [](const DiscreteDistribution& d, const std::string& objective, const TransitionMatrix* t,
                             const LabeledDataset* sample) {
    return to_json(enumerate_best(d, objective_from(objective, t, sample))).dump();
  }, py::arg("d"), py::arg("objective"), py::arg("t") = nullptr, py::arg("sample") = nullptr);

  m.def("train_mlp", [](const LabeledDataset& train, const std::string& config, const LabeledDataset* val,
                        const LabeledDataset* test) {
    const auto r = train_mlp(train, train_config_from_json(nlohmann::json::parse(config)), val, test);
    nlohmann::json checkpoints = nlohmann::json::array();
    for (const auto& c : r.checkpoints) {
      checkpoints.push_back({{"step", c.step},
                             {"train_loss", c.train_loss},
                             {"train_acc", c.train_acc},
                             {"val_acc", c.noisy_val_acc ? nlohmann::json(*c.noisy_val_acc) : nlohmann::json()},
                             {"test_acc", c.clean_test_acc ? nlohmann::json(*c.clean_test_acc) : nlohmann::json()}});
    }
    return std::make_pair(Mlp(r.params), nlohmann::json{{"checkpoints", checkpoints}, {"model", to_json(r.params)}}.dump());
  }, py::arg("train"), py::arg("config") = "{}", py::arg("val") = nullptr, py::arg("test") = nullptr);
  m.def("load_model", [](const std::string& json) { return Mlp(mlp_params_from_json(nlohmann::json::parse(json))); });

  m.def("run_nts", [](const LabeledDataset& train, const LabeledDataset& val, const std::string& config,
                      const LabeledDataset* test) {
    return to_json(run_nts(train, val, train_config_from_json(nlohmann::json::parse(config)), test)).dump();
  }, py::arg("train"), py::arg("val"), py::arg("config") = "{}", py::arg("test") = nullptr,
        py::call_guard<py::gil_scoped_release>());

  m.def("run_regime_sweep", [](const std::string& config) {
    return to_json(run_regime_sweep(sweep_config_from_json(nlohmann::json::parse(config)))).dump();
  }, py::arg("config") = "{}", py::call_guard<py::gil_scoped_release>());
  m.def("run_tabular_demo", [](Seed seed) { return to_json(run_tabular_demo(seed)).dump(); }, py::arg("seed") = 0);
  m.def("run_bound_audit_suite", [](Seed seed, std::size_t trials) {
    BoundAuditOptions opts;
    opts.trials = trials;
    return to_json(run_bound_audit_suite(seed, opts)).dump();
  }, py::arg("seed") = 0, py::arg("trials") = 10000, py::call_guard<py::gil_scoped_release>());
}

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>

#include "canonscreen/cca.hpp"
#include "canonscreen/error.hpp"
#include "canonscreen/evaluation.hpp"
#include "canonscreen/kernels.hpp"
#include "canonscreen/model_io.hpp"
#include "canonscreen/prediction.hpp"
#include "canonscreen/toydata.hpp"

namespace py = pybind11;
using namespace canonscreen;

namespace {

DescriptorMatrix as_descriptors(const Eigen::MatrixXd& values, const std::optional<std::vector<std::string>>& ids) {
  const DescriptorMatrix plain = DescriptorMatrix::from_values(values);
  if (!ids) return plain;
  return DescriptorMatrix(values, plain.column_names(), *ids);
}

Side parse_side(const std::string& name) {
  if (name == "protein") return Side::Protein;
  if (name == "ligand") return Side::Ligand;
  throw Error(ErrorCode::InvalidArgument, "side must be 'protein' or 'ligand', got '" + name + "'");
}

KernelSpec make_kernel(const std::string& kernel, double sigma, int k_ngl, bool literal_bandwidth) {
  switch (parse_kernel_family(kernel)) {
    case KernelFamily::Linear: return KernelSpec::linear();
    case KernelFamily::Rbf: return KernelSpec::rbf(sigma);
    case KernelFamily::Ngl: return KernelSpec::ngl(k_ngl, literal_bandwidth);
  }
  return {};
}

CanonicalModel fit_arrays(const Eigen::MatrixXd& proteins, const Eigen::MatrixXd& ligands, const std::string& method,
                          const std::string& kernel, double sigma, int k_ngl, double kappa, int p, bool standardize,
                          bool literal_bandwidth, const std::string& projection,
                          const std::optional<std::vector<std::string>>& ids) {
  FitConfig cfg;
  cfg.method = parse_method(method);
  cfg.protein_kernel = cfg.ligand_kernel = make_kernel(kernel, sigma, k_ngl, literal_bandwidth);
  if (cfg.method == Method::Cca && cfg.protein_kernel.family != KernelFamily::Linear)
    throw Error(ErrorCode::InvalidArgument, "linear CCA takes no kernel");
  cfg.options.kappa = kappa;
  cfg.options.p = p;
  cfg.options.standardize = standardize;
  cfg.options.projection = parse_projection_mode(projection);
  const PairedDataset data(as_descriptors(proteins, ids), as_descriptors(ligands, ids));
  py::gil_scoped_release release;
  return fit(data, cfg);
}

Eigen::MatrixXd predict_rows(const CanonicalModel& model, const Eigen::MatrixXd& proteins, int k_lle) {
  const DescriptorMatrix points = DescriptorMatrix::from_values(proteins);
  py::gil_scoped_release release;
  const auto results = predict_batch(model, points, k_lle);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(results.size()), model.p);
  for (std::size_t i = 0; i < results.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = results[i].predicted;
  return out;
}

py::dict screen(const CanonicalModel& model, const Eigen::MatrixXd& proteins, const Eigen::MatrixXd& ligands,
                const std::vector<std::string>& ids, const Eigen::MatrixXd& embed,
                const std::vector<std::string>& embed_ids, int k_lle) {
  const PairedDataset queries(as_descriptors(proteins, ids), as_descriptors(ligands, ids));
  const DescriptorMatrix candidates = as_descriptors(embed, embed_ids);
  ScreenReport r;
  {
    py::gil_scoped_release release;
    r = run_screen(model, k_lle, queries, candidates);
  }
  py::list ranks;
  for (const auto& q : r.per_query) ranks.append(q.ok ? py::object(py::int_(q.rank)) : py::object(py::none()));
  py::dict out;
  out["mean_rank"] = std::isnan(r.mean_rank) ? py::object(py::none()) : py::object(py::float_(r.mean_rank));
  out["ranks"] = ranks;
  out["failed"] = r.failed;
  out["embed_size"] = r.embed_size;
  return out;
}

py::dict toy(const std::string& kind, int n, std::optional<double> noise, std::uint64_t seed) {
  ToySpec spec;
  spec.kind = parse_toy_kind(kind);
  spec.n = n;
  spec.noise_sd = noise.value_or(ToySpec::default_noise(spec.kind));
  spec.seed = seed;
  py::dict out;
  std::optional<LabeledDataset> labeled;
  PairedDataset data = [&] {
    switch (spec.kind) {
      case ToyKind::LinearPair: return gen_toy_linear(spec);
      case ToyKind::QuadraticPair: return gen_toy_quadratic(spec);
      case ToyKind::SmileyCluster: labeled = gen_smiley_cluster(spec); return labeled->data;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown toy kind");
  }();
  out["ids"] = data.ids();
  out["proteins"] = data.proteins().values();
  out["ligands"] = data.ligands().values();
  if (labeled) out["labels"] = labeled->labels;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Canonical correlation screening of paired protein/ligand descriptors";

  static py::exception<Error> error(m, "CanonscreenError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(error_name(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<CanonicalModel>(m, "Model")
      .def_property_readonly("method", [](const CanonicalModel& s) { return std::string(method_name(s.method)); })
      .def_readonly("p", &CanonicalModel::p)
      .def_readonly("requested_p", &CanonicalModel::requested_p)
      .def_readonly("kappa", &CanonicalModel::kappa)
      .def_readonly("rank_deficient", &CanonicalModel::rank_deficient)
      .def_readonly("correlations", &CanonicalModel::correlations)
      .def_readonly("training_ids", &CanonicalModel::training_ids)
      .def(
          "variates", [](const CanonicalModel& s, const std::string& side) { return s.side(parse_side(side)).variates; },
          py::arg("side") = "protein", "In-sample canonical variates, n x p.")
      .def(
          "project",
          [](const CanonicalModel& s, const Eigen::MatrixXd& points, const std::string& side) {
            return project(s, DescriptorMatrix::from_values(points), parse_side(side)).coords;
          },
          py::arg("points"), py::arg("side") = "protein")
      .def("predict", &predict_rows, py::arg("proteins"), py::arg("k_lle") = 5,
           "Predicted canonical ligand coordinates for raw protein rows.")
      .def("save", [](const CanonicalModel& s, const std::filesystem::path& path) { save_model(s, path); })
      .def("to_json", &model_to_json)
      .def_static("load", &load_model)
      .def_static("from_json", &model_from_json)
      .def("__repr__", [](const CanonicalModel& s) {
        return "<Model " + std::string(method_name(s.method)) + " p=" + std::to_string(s.p) + ">";
      });

  m.def("fit", &fit_arrays, py::arg("proteins"), py::arg("ligands"), py::arg("method") = "kcca",
        py::arg("kernel") = "rbf", py::arg("sigma") = 1.0, py::arg("k_ngl") = 7, py::arg("kappa") = 0.1,
        py::arg("p") = 2, py::arg("standardize") = true, py::arg("literal_bandwidth") = false,
        py::arg("projection") = "indefinite", py::arg("ids") = py::none());
  m.def("screen", &screen, py::arg("model"), py::arg("proteins"), py::arg("ligands"), py::arg("ids"),
        py::arg("embed"), py::arg("embed_ids"), py::arg("k_lle") = 5);
  m.def("gen_toy", &toy, py::arg("kind"), py::arg("n") = 60, py::arg("noise") = py::none(), py::arg("seed") = 0);
  m.def(
      "positive_part",
      [](const Eigen::MatrixXd& k0) {
        KernelMatrix k;
        k.values = k0;
        return positive_part(k).values;
      },
      py::arg("matrix"));
  m.def("kmeans", &kmeans, py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("restarts") = 10,
        py::arg("max_iterations") = 300);
  m.def("adjusted_rand_index", &adjusted_rand_index, py::arg("a"), py::arg("b"));
}

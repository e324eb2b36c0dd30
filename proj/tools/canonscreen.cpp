// canonscreen command-line interface.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "canonscreen/cca.hpp"
#include "canonscreen/csv.hpp"
#include "canonscreen/data.hpp"
#include "canonscreen/error.hpp"
#include "canonscreen/evaluation.hpp"
#include "canonscreen/kernels.hpp"
#include "canonscreen/model_io.hpp"
#include "canonscreen/prediction.hpp"
#include "canonscreen/toydata.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace canonscreen;

namespace {

struct DataFlags {
  std::string proteins;
  std::string ligands;
  std::string id_column = "id";

  void add(CLI::App* cmd, const std::string& what) {
    cmd->add_option("--proteins", proteins, "protein descriptor CSV (" + what + ")")->required();
    cmd->add_option("--ligands", ligands, "ligand descriptor CSV (" + what + ")")->required();
    cmd->add_option("--id-column", id_column, "name of the id column")->capture_default_str();
  }

  PairedDataset load(std::vector<std::string>& warnings) const {
    return load_paired_csv(proteins, ligands, id_column, &warnings);
  }

  json to_json() const { return {{"proteins", proteins}, {"ligands", ligands}, {"id_column", id_column}}; }
};

struct ModelFlags {
  std::string method = "kcca";
  std::string kernel;
  double sigma = 1.0;
  int k_ngl = 7;
  bool literal_bandwidth = false;
  double kappa = 0.1;
  int p = 2;
  bool no_standardize = false;
  double jitter = 1e-10;
  std::string projection = "indefinite";

  void add(CLI::App* cmd, bool with_hyper) {
    cmd->add_option("--method", method, "cca, kcca or ikcca")
        ->check(CLI::IsMember({"cca", "kcca", "ikcca"}))
        ->capture_default_str();
    cmd->add_option("--kernel", kernel, "linear, rbf or ngl (kernel methods; default rbf)")
        ->check(CLI::IsMember({"linear", "rbf", "ngl"}));
    cmd->add_flag("--literal-bandwidth", literal_bandwidth, "ngl: exp(-d^2/(2 sigma_ij)) instead of sigma_ij^2");
    cmd->add_flag("--no-standardize", no_standardize, "center descriptors without scaling to unit variance");
    cmd->add_option("--jitter", jitter, "relative eigenvalue floor of the constraint matrices")->capture_default_str();
    cmd->add_option("--projection", projection, "ikcca out-of-sample kernel: indefinite or clipped")
        ->check(CLI::IsMember({"indefinite", "clipped"}))
        ->capture_default_str();
    if (!with_hyper) return;
    cmd->add_option("--sigma", sigma, "rbf bandwidth")->capture_default_str();
    cmd->add_option("--k-ngl", k_ngl, "ngl neighborhood size")->capture_default_str();
    cmd->add_option("--kappa", kappa, "regularization")->capture_default_str();
    cmd->add_option("--p", p, "number of canonical directions")->capture_default_str();
  }

  Method parsed_method() const { return parse_method(method); }

  KernelFamily family() const {
    const Method m = parsed_method();
    if (m == Method::Cca) {
      if (!kernel.empty() && kernel != "linear")
        throw Error(ErrorCode::InvalidArgument, "--kernel " + kernel + " requires --method kcca or ikcca");
      return KernelFamily::Linear;
    }
    return kernel.empty() ? KernelFamily::Rbf : parse_kernel_family(kernel);
  }

  SolverOptions options() const {
    SolverOptions o;
    o.kappa = kappa;
    o.p = p;
    o.jitter = jitter;
    o.standardize = !no_standardize;
    o.projection = parse_projection_mode(projection);
    o.validate();
    return o;
  }

  FitConfig config() const {
    FitConfig c;
    c.method = parsed_method();
    c.options = options();
    switch (family()) {
      case KernelFamily::Linear: c.protein_kernel = KernelSpec::linear(); break;
      case KernelFamily::Rbf: c.protein_kernel = KernelSpec::rbf(sigma); break;
      case KernelFamily::Ngl: c.protein_kernel = KernelSpec::ngl(k_ngl, literal_bandwidth); break;
    }
    c.protein_kernel.validate();
    c.ligand_kernel = c.protein_kernel;
    return c;
  }
};

json fit_config_json(const FitConfig& c) {
  json j = {{"method", method_name(c.method)},
            {"kappa", c.options.kappa},
            {"p", c.options.p},
            {"jitter", c.options.jitter},
            {"standardize", c.options.standardize}};
  if (c.method != Method::Cca) {
    const KernelSpec& k = c.protein_kernel;
    j["kernel"] = kernel_family_name(k.family);
    if (k.family == KernelFamily::Rbf) j["sigma"] = k.sigma;
    if (k.family == KernelFamily::Ngl) {
      j["k_ngl"] = k.k;
      j["literal_bandwidth"] = k.literal_bandwidth;
    }
  }
  if (c.method == Method::Ikcca) j["projection"] = projection_mode_name(c.options.projection);
  return j;
}

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void emit(const std::string& command, json config, json outputs, const std::vector<std::string>& warnings,
          json extra = json::object()) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  json j = {{"command", command}, {"config", std::move(config)}, {"outputs", std::move(outputs)}, {"warnings", warnings}};
  for (auto& [key, value] : extra.items()) j[key] = value;
  std::cout << j.dump(2) << std::endl;
}

void write_text(const fs::path& path, const std::string& text) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::Io, "cannot create directory '" + dir.string() + "'");
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) ensure_dir(file.parent_path());
}

std::vector<std::string> model_warnings(const CanonicalModel& m) {
  std::vector<std::string> w;
  if (m.rank_deficient)
    w.push_back("rank deficiency: requested p=" + std::to_string(m.requested_p) + " but only " + std::to_string(m.p) +
                " canonical direction(s) have nonzero correlation");
  return w;
}

void append_zero_variance(const CanonicalModel& m, std::vector<std::string>& warnings) {
  for (const auto side : {Side::Protein, Side::Ligand}) {
    const auto& flags = m.centering.side(side).zero_variance;
    for (std::size_t j = 0; j < flags.size(); ++j)
      if (flags[j])
        warnings.push_back(std::string(side_name(side)) + " column '" + m.side(side).column_names[j] +
                           "' has zero variance");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized, kernel and indefinite-kernel CCA for paired protein/ligand descriptors"};
  app.require_subcommand(1);

  // gen-toy
  auto* gen = app.add_subcommand("gen-toy", "write a synthetic paired dataset");
  std::string toy_kind = "linear";
  int toy_n = 60;
  std::optional<double> toy_noise;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  gen->add_option("--kind", toy_kind, "linear, quadratic or smiley")
      ->check(CLI::IsMember({"linear", "quadratic", "smiley"}))
      ->capture_default_str();
  gen->add_option("--n", toy_n, "number of pairs")->capture_default_str();
  gen->add_option("--noise", toy_noise, "noise standard deviation (default depends on kind)");
  gen->add_option("--seed", seed, "random seed")->capture_default_str();
  gen->add_option("--out-dir", out_dir, "output directory")->capture_default_str();

  // fit
  auto* fitc = app.add_subcommand("fit", "fit a canonical model and save it");
  DataFlags fit_data;
  ModelFlags fit_model;
  std::string model_out;
  fit_data.add(fitc, "training");
  fit_model.add(fitc, true);
  fitc->add_option("--model-out", model_out, "model file to write")->required();

  // tune
  auto* tune = app.add_subcommand("tune", "cross-validated grid search on mean rank");
  DataFlags tune_data;
  ModelFlags tune_model;
  std::vector<double> kappa_grid, sigma_grid;
  std::vector<int> p_grid, k_lle_grid, k_ngl_grid;
  int folds = 5;
  std::string tune_out = "tune";
  std::string tune_model_out;
  tune_data.add(tune, "training");
  tune_model.add(tune, false);
  tune->add_option("--kappa-grid", kappa_grid, "comma-separated kappa values")->delimiter(',');
  tune->add_option("--p-grid", p_grid, "comma-separated p values")->delimiter(',');
  tune->add_option("--k-lle-grid", k_lle_grid, "comma-separated k_lle values")->delimiter(',');
  tune->add_option("--sigma-grid", sigma_grid, "comma-separated rbf sigma values")->delimiter(',');
  tune->add_option("--k-ngl-grid", k_ngl_grid, "comma-separated ngl k values")->delimiter(',');
  tune->add_option("--folds", folds, "cross-validation folds")->capture_default_str();
  tune->add_option("--seed", seed, "fold assignment seed")->capture_default_str();
  tune->add_option("--out", tune_out, "output prefix for <prefix>_cv.csv and <prefix>_cv.json")->capture_default_str();
  tune->add_option("--model-out", tune_model_out, "also fit the best configuration and save it here");

  // screen
  auto* screen = app.add_subcommand("screen", "rank predictions for test pairs against an embed library");
  std::string model_path, embed_path, report_out = "screen";
  DataFlags screen_data;
  int k_lle = 5;
  screen->add_option("--model", model_path, "model file")->required();
  screen_data.add(screen, "test pairs");
  screen->add_option("--embed", embed_path, "ligand library CSV to rank against")->required();
  screen->add_option("--k-lle", k_lle, "LLE neighbors")->capture_default_str();
  screen->add_option("--report-out", report_out, "output prefix for <prefix>.csv and <prefix>.json")
      ->capture_default_str();

  // export-projections
  auto* exportp = app.add_subcommand("export-projections", "write canonical coordinates of descriptor rows");
  std::string data_path, side_name_flag = "protein", out_path;
  std::string id_column = "id";
  exportp->add_option("--model", model_path, "model file")->required();
  exportp->add_option("--data", data_path, "descriptor CSV")->required();
  exportp->add_option("--side", side_name_flag, "protein or ligand")
      ->check(CLI::IsMember({"protein", "ligand"}))
      ->capture_default_str();
  exportp->add_option("--id-column", id_column, "name of the id column")->capture_default_str();
  exportp->add_option("--out", out_path, "output CSV")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "predict canonical ligand locations for proteins");
  predict->add_option("--model", model_path, "model file")->required();
  predict->add_option("--proteins", data_path, "protein descriptor CSV")->required();
  predict->add_option("--id-column", id_column, "name of the id column")->capture_default_str();
  predict->add_option("--k-lle", k_lle, "LLE neighbors")->capture_default_str();
  predict->add_option("--out", out_path, "output CSV")->required();

  // export-kernel
  auto* exportk = app.add_subcommand("export-kernel", "write a Gram matrix for cross-implementation checks");
  ModelFlags kernel_flags;
  bool center = false, clip = false, no_standardize = false;
  exportk->add_option("--data", data_path, "descriptor CSV")->required();
  exportk->add_option("--id-column", id_column, "name of the id column")->capture_default_str();
  exportk->add_option("--kernel", kernel_flags.kernel, "linear, rbf or ngl")
      ->check(CLI::IsMember({"linear", "rbf", "ngl"}))
      ->required();
  exportk->add_option("--sigma", kernel_flags.sigma, "rbf bandwidth")->capture_default_str();
  exportk->add_option("--k-ngl", kernel_flags.k_ngl, "ngl neighborhood size")->capture_default_str();
  exportk->add_flag("--literal-bandwidth", kernel_flags.literal_bandwidth, "ngl literal exponent");
  exportk->add_flag("--no-standardize", no_standardize, "use raw descriptors instead of standardized ones");
  exportk->add_flag("--positive-part", clip, "clip negative eigenvalues");
  exportk->add_flag("--center", center, "double-center the matrix");
  exportk->add_option("--out", out_path, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      ToySpec spec;
      spec.kind = parse_toy_kind(toy_kind);
      spec.n = toy_n;
      spec.noise_sd = toy_noise.value_or(ToySpec::default_noise(spec.kind));
      spec.seed = seed;
      spec.validate();
      ensure_dir(out_dir);
      const std::string stem = "toy_" + toy_kind;
      const fs::path pp = fs::path(out_dir) / (stem + "_proteins.csv");
      const fs::path lp = fs::path(out_dir) / (stem + "_ligands.csv");
      json outputs = json::array({pp.string(), lp.string()});
      if (spec.kind == ToyKind::SmileyCluster) {
        const LabeledDataset d = gen_smiley_cluster(spec);
        write_descriptor_csv(pp, d.data.proteins());
        write_descriptor_csv(lp, d.data.ligands());
        const fs::path labels = fs::path(out_dir) / (stem + "_labels.csv");
        std::string text = "id,label\n";
        for (std::size_t i = 0; i < d.labels.size(); ++i)
          text += d.data.ids()[i] + "," + std::to_string(d.labels[i]) + "\n";
        write_text(labels, text);
        outputs.push_back(labels.string());
      } else {
        const PairedDataset d = spec.kind == ToyKind::LinearPair ? gen_toy_linear(spec) : gen_toy_quadratic(spec);
        write_descriptor_csv(pp, d.proteins());
        write_descriptor_csv(lp, d.ligands());
      }
      emit("gen-toy",
           {{"kind", toy_kind}, {"n", spec.n}, {"noise", spec.noise_sd}, {"seed", spec.seed}, {"out_dir", out_dir}},
           outputs, {});
      return 0;
    }

    if (*fitc) {
      const FitConfig cfg = fit_model.config();
      std::vector<std::string> warnings;
      const PairedDataset data = fit_data.load(warnings);
      const CanonicalModel model = fit(data, cfg);
      for (auto& w : model_warnings(model)) warnings.push_back(w);
      append_zero_variance(model, warnings);
      ensure_parent(model_out);
      save_model(model, model_out);
      json config = fit_config_json(cfg);
      config["data"] = fit_data.to_json();
      config["model_out"] = model_out;
      emit("fit", config, json::array({model_out}), warnings,
           {{"n_train", data.size()},
            {"p", model.p},
            {"rank_deficient", model.rank_deficient},
            {"correlations", as_vector(model.correlations)}});
      return 0;
    }

    if (*tune) {
      TuneSpec spec;
      spec.method = tune_model.parsed_method();
      spec.kernel = tune_model.family();
      spec.literal_bandwidth = tune_model.literal_bandwidth;
      spec.options = tune_model.options();
      spec.folds = folds;
      spec.seed = seed;
      TuningGrid grid = TuningGrid::defaults(spec.method, spec.kernel);
      if (!kappa_grid.empty()) grid.kappa_values = kappa_grid;
      if (!p_grid.empty()) grid.p_values = p_grid;
      if (!k_lle_grid.empty()) grid.k_lle_values = k_lle_grid;
      if (spec.kernel == KernelFamily::Rbf && !sigma_grid.empty()) grid.kernel_param_values = sigma_grid;
      if (spec.kernel == KernelFamily::Ngl && !k_ngl_grid.empty())
        grid.kernel_param_values.assign(k_ngl_grid.begin(), k_ngl_grid.end());
      if (spec.folds < 2) throw Error(ErrorCode::InvalidArgument, "--folds must be at least 2");

      std::vector<std::string> warnings;
      const PairedDataset data = tune_data.load(warnings);
      const GridResult result = grid_search(data, spec, grid);
      const std::string csv_path = tune_out + "_cv.csv", json_path = tune_out + "_cv.json";
      ensure_parent(csv_path);
      write_cv_csv(csv_path, result);
      write_text(json_path, cv_json(result));
      json outputs = json::array({csv_path, json_path});

      std::size_t skipped = 0;
      for (const auto& row : result.table) skipped += row.feasible ? 0 : 1;
      if (skipped > 0) warnings.push_back(std::to_string(skipped) + " infeasible configuration(s) skipped");
      json best = nullptr;
      if (result.best) {
        best = {{"kappa", result.best->kappa}, {"p", result.best->p}, {"k_lle", result.best->k_lle},
                {"mean_rank", result.best_score}};
        if (result.best->kernel_param) best[spec.kernel == KernelFamily::Ngl ? "k_ngl" : "sigma"] = *result.best->kernel_param;
        if (!tune_model_out.empty()) {
          FitConfig cfg;
          cfg.method = spec.method;
          cfg.protein_kernel = cfg.ligand_kernel = kernel_for(spec, result.best->kernel_param);
          cfg.options = spec.options;
          cfg.options.kappa = result.best->kappa;
          cfg.options.p = result.best->p;
          ensure_parent(tune_model_out);
          save_model(fit(data, cfg), tune_model_out);
          outputs.push_back(tune_model_out);
        }
      } else {
        warnings.push_back("no feasible configuration");
      }
      json config = {{"method", tune_model.method},
                     {"kernel", kernel_family_name(spec.kernel)},
                     {"folds", spec.folds},
                     {"seed", spec.seed},
                     {"standardize", spec.options.standardize},
                     {"data", tune_data.to_json()},
                     {"grid",
                      {{"kappa", grid.kappa_values},
                       {"p", grid.p_values},
                       {"k_lle", grid.k_lle_values},
                       {"kernel_param", grid.kernel_param_values}}}};
      emit("tune", config, outputs, warnings, {{"configs", result.table.size()}, {"best", best}});
      return result.best ? 0 : 4;
    }

    if (*screen) {
      std::vector<std::string> warnings;
      const CanonicalModel model = load_model(model_path);
      const PairedDataset queries = screen_data.load(warnings);
      const DescriptorMatrix embed = load_descriptor_csv(embed_path, screen_data.id_column);
      const ScreenReport report = run_screen(model, k_lle, queries, embed);
      const std::string csv_path = report_out + ".csv", json_path = report_out + ".json";
      ensure_parent(csv_path);
      write_screen_csv(csv_path, report);
      write_screen_json(json_path, report);
      if (report.failed > 0) warnings.push_back(std::to_string(report.failed) + " query(ies) could not be ranked");
      if (report.embed_failed > 0)
        warnings.push_back(std::to_string(report.embed_failed) + " embed ligand(s) could not be projected");
      json config = {{"model", model_path},
                     {"data", screen_data.to_json()},
                     {"embed", embed_path},
                     {"k_lle", k_lle},
                     {"model_config", json::parse(describe_model(model))}};
      emit("screen", config, json::array({csv_path, json_path}), warnings,
           {{"mean_rank", std::isfinite(report.mean_rank) ? json(report.mean_rank) : json(nullptr)},
            {"queries", report.per_query.size()}});
      return 0;
    }

    if (*exportp) {
      const Side side = side_name_flag == "protein" ? Side::Protein : Side::Ligand;
      const CanonicalModel model = load_model(model_path);
      const DescriptorMatrix data = load_descriptor_csv(data_path, id_column);
      if (data.column_names() != model.side(side).column_names)
        throw Error(ErrorCode::InvalidArgument, "descriptor columns of '" + data_path + "' do not match the model's " +
                                                    side_name_flag + " side");
      const Projection proj = project(model, data, side);
      ensure_parent(out_path);
      std::string text = "id";
      for (int j = 1; j <= model.p; ++j) text += ",cv" + std::to_string(j);
      text += '\n';
      for (Eigen::Index i = 0; i < proj.coords.rows(); ++i) {
        text += csv::escape(proj.ids[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < proj.coords.cols(); ++j) text += "," + csv::format_double(proj.coords(i, j));
        text += '\n';
      }
      write_text(out_path, text);
      emit("export-projections",
           {{"model", model_path}, {"data", data_path}, {"side", side_name_flag}, {"id_column", id_column}},
           json::array({out_path}), {}, {{"rows", proj.coords.rows()}, {"p", model.p}});
      return 0;
    }

    if (*predict) {
      const CanonicalModel model = load_model(model_path);
      const DescriptorMatrix proteins = load_descriptor_csv(data_path, id_column);
      const auto results = predict_batch(model, proteins, k_lle);
      ensure_parent(out_path);
      write_predictions_csv(out_path, results);
      emit("predict", {{"model", model_path}, {"proteins", data_path}, {"k_lle", k_lle}, {"id_column", id_column}},
           json::array({out_path}), {}, {{"rows", results.size()}});
      return 0;
    }

    if (*exportk) {
      const DescriptorMatrix raw = load_descriptor_csv(data_path, id_column);
      DescriptorMatrix data = raw;
      if (!no_standardize) {
        const PairedDataset twin(raw, raw);
        data = center_and_scale(twin, true).data.proteins();
      }
      KernelSpec spec;
      switch (parse_kernel_family(kernel_flags.kernel)) {
        case KernelFamily::Linear: spec = KernelSpec::linear(); break;
        case KernelFamily::Rbf: spec = KernelSpec::rbf(kernel_flags.sigma); break;
        case KernelFamily::Ngl: spec = KernelSpec::ngl(kernel_flags.k_ngl, kernel_flags.literal_bandwidth); break;
      }
      KernelMatrix k = gram(spec, data);
      if (clip) k = positive_part(k);
      if (center) k = center_kernel(k);
      double floor = 0.0;
      const PsdStatus status = classify_psd(k.values, &floor);
      ensure_parent(out_path);
      write_kernel_csv(out_path, k, data.row_ids());
      json config = {{"data", data_path},        {"kernel", kernel_flags.kernel}, {"standardize", !no_standardize},
                     {"positive_part", clip},    {"center", center}};
      if (spec.family == KernelFamily::Rbf) config["sigma"] = spec.sigma;
      if (spec.family == KernelFamily::Ngl) {
        config["k_ngl"] = spec.k;
        config["literal_bandwidth"] = spec.literal_bandwidth;
      }
      emit("export-kernel", config, json::array({out_path}), {},
           {{"psd_status", psd_status_name(status)}, {"min_eigenvalue", floor}});
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "canonscreen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <numeric>

#include "canonscreen/csv.hpp"
#include "canonscreen/error.hpp"
#include "canonscreen/parallel.hpp"
#include "canonscreen/prediction.hpp"
#include "canonscreen/rng.hpp"

namespace canonscreen {

using nlohmann::json;

namespace {

int count_closer(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual, const Eigen::MatrixXd& embed,
                 const std::vector<bool>* skip) {
  const double target = (predicted - actual).norm();
  int closer = 0;
  for (Eigen::Index j = 0; j < embed.rows(); ++j) {
    if (skip && (*skip)[static_cast<std::size_t>(j)]) continue;
    if ((embed.row(j).transpose() - actual).norm() < target) ++closer;
  }
  return closer;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

int rank_of_prediction(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual, const Eigen::MatrixXd& embed) {
  if (predicted.size() != actual.size() || embed.cols() != actual.size())
    throw Error(ErrorCode::DimensionMismatch, "prediction, target and candidates must share one dimension");
  return 1 + count_closer(predicted, actual, embed, nullptr);
}

ScreenReport run_screen(const CanonicalModel& model, int k_lle, const PairedDataset& queries,
                        const DescriptorMatrix& embed) {
  if (k_lle < 1 || k_lle > static_cast<int>(model.training_ids.size()))
    throw Error(ErrorCode::InvalidArgument, "k_lle=" + std::to_string(k_lle) + " must lie in [1, " +
                                                std::to_string(model.training_ids.size()) + "]");
  ScreenReport report;
  report.k_lle = k_lle;
  report.embed_size = static_cast<int>(embed.rows());
  report.config_json = describe_model(model);

  // Embed ligands are projected one by one so a single degenerate row does
  // not sink the whole screen.
  Eigen::MatrixXd embed_coords(embed.rows(), model.p);
  std::vector<bool> embed_bad(static_cast<std::size_t>(embed.rows()), false);
  parallel_for(static_cast<std::size_t>(embed.rows()), [&](std::size_t j) {
    const auto r = static_cast<Eigen::Index>(j);
    try {
      embed_coords.row(r) = project_point(model, embed.values().row(r).transpose(), Side::Ligand).transpose();
    } catch (const Error&) {
      embed_bad[j] = true;
    }
  });
  report.embed_failed = static_cast<int>(std::count(embed_bad.begin(), embed_bad.end(), true));

  report.per_query.resize(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) {
    QueryRank& q = report.per_query[i];
    q.query_id = queries.ids()[i];
    const auto r = static_cast<Eigen::Index>(i);
    try {
      const PredictionResult pred =
          predict_ligand(model, queries.proteins().values().row(r).transpose(), k_lle, q.query_id);
      const Eigen::VectorXd actual = project_point(model, queries.ligands().values().row(r).transpose(), Side::Ligand);
      std::vector<bool> skip = embed_bad;
      if (const auto own = embed.index_of(q.query_id)) skip[*own] = true;
      q.candidates_total = static_cast<int>(std::count(skip.begin(), skip.end(), false));
      q.rank = 1 + count_closer(pred.predicted, actual, embed_coords, &skip);
    } catch (const Error& e) {
      q.ok = false;
      q.error = e.what();
    }
  });

  double total = 0.0;
  int ok = 0;
  for (const auto& q : report.per_query) {
    if (q.ok) {
      total += q.rank;
      ++ok;
    } else {
      ++report.failed;
    }
  }
  report.mean_rank = ok > 0 ? total / ok : std::numeric_limits<double>::quiet_NaN();
  return report;
}

std::string describe_model(const CanonicalModel& m) {
  json j = {{"method", method_name(m.method)},
            {"kappa", m.kappa},
            {"p", m.p},
            {"requested_p", m.requested_p},
            {"rank_deficient", m.rank_deficient},
            {"standardize", m.standardize},
            {"jitter", m.jitter},
            {"n_train", m.training_ids.size()}};
  if (m.is_kernel()) {
    for (const auto side : {Side::Protein, Side::Ligand}) {
      const KernelSpec& s = m.side(side).spec;
      json k = {{"family", kernel_family_name(s.family)}};
      if (s.family == KernelFamily::Rbf) k["sigma"] = s.sigma;
      if (s.family == KernelFamily::Ngl) {
        k["k"] = s.k;
        k["literal_bandwidth"] = s.literal_bandwidth;
      }
      j[std::string(side_name(side)) + "_kernel"] = k;
    }
    if (m.method == Method::Ikcca) j["projection"] = projection_mode_name(m.projection);
  }
  std::vector<double> rho(m.correlations.data(), m.correlations.data() + m.correlations.size());
  j["correlations"] = rho;
  return j.dump();
}

std::string screen_report_json(const ScreenReport& r) {
  json rows = json::array();
  for (const auto& q : r.per_query) {
    json row = {{"query_id", q.query_id}, {"ok", q.ok}};
    if (q.ok) {
      row["rank"] = q.rank;
      row["candidates_total"] = q.candidates_total;
    } else {
      row["error"] = q.error;
    }
    rows.push_back(row);
  }
  json j = {{"mean_rank", nullable(r.mean_rank)},
            {"queries", r.per_query.size()},
            {"failed", r.failed},
            {"embed_size", r.embed_size},
            {"embed_failed", r.embed_failed},
            {"k_lle", r.k_lle},
            {"config", json::parse(r.config_json)},
            {"per_query", rows}};
  return j.dump(2) + "\n";
}

void write_screen_json(const std::filesystem::path& path, const ScreenReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << screen_report_json(report);
}

void write_screen_csv(const std::filesystem::path& path, const ScreenReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << "query_id,rank,candidates_total,error\n";
  for (const auto& q : report.per_query) {
    out << csv::escape(q.query_id) << ',';
    if (q.ok) out << q.rank << ',' << q.candidates_total << ",\n";
    else out << ",," << csv::escape(q.error) << '\n';
  }
}

// ---- grid search ----------------------------------------------------------

TuningGrid TuningGrid::defaults(Method method, KernelFamily kernel) {
  TuningGrid g;
  g.kappa_values = {0.001, 0.01, 0.1};
  g.p_values = {2, 3, 5};
  g.k_lle_values = {3, 5, 8};
  if (method != Method::Cca) {
    if (kernel == KernelFamily::Rbf) g.kernel_param_values = {0.25, 0.5, 1.0};
    if (kernel == KernelFamily::Ngl) g.kernel_param_values = {5, 7, 9};
  }
  return g;
}

std::size_t TuningGrid::size() const {
  return kappa_values.size() * p_values.size() * k_lle_values.size() *
         std::max<std::size_t>(1, kernel_param_values.size());
}

void TuningGrid::validate(bool needs_kernel_axis) const {
  if (kappa_values.empty() || p_values.empty() || k_lle_values.empty())
    throw Error(ErrorCode::InvalidArgument, "every grid axis needs at least one value");
  if (needs_kernel_axis && kernel_param_values.empty())
    throw Error(ErrorCode::InvalidArgument, "the kernel parameter axis is empty");
  for (double k : kappa_values)
    if (!(k >= 0.0 && std::isfinite(k))) throw Error(ErrorCode::InvalidArgument, "grid kappa must be >= 0");
  for (int p : p_values)
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "grid p must be >= 1");
  for (int k : k_lle_values)
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "grid k_lle must be >= 1");
}

bool tie_break_less(const GridConfig& a, const GridConfig& b) {
  if (a.p != b.p) return a.p < b.p;
  if (a.kappa != b.kappa) return a.kappa > b.kappa;
  if (a.k_lle != b.k_lle) return a.k_lle < b.k_lle;
  return a.kernel_param.value_or(0.0) < b.kernel_param.value_or(0.0);
}

KernelSpec kernel_for(const TuneSpec& spec, std::optional<double> param) {
  if (spec.method == Method::Cca) return KernelSpec::linear();
  switch (spec.kernel) {
    case KernelFamily::Linear: return KernelSpec::linear();
    case KernelFamily::Rbf: return KernelSpec::rbf(param.value_or(1.0));
    case KernelFamily::Ngl: {
      const double k = param.value_or(5.0);
      if (k != std::floor(k)) throw Error(ErrorCode::InvalidArgument, "ngl k must be an integer");
      return KernelSpec::ngl(static_cast<int>(k), spec.literal_bandwidth);
    }
  }
  return KernelSpec::linear();
}

namespace {

struct RankTally {
  double sum = 0.0;
  int evaluated = 0;
  int failed = 0;
  std::string infeasible;  // non-empty if this fold could not run the config
};

}  // namespace

GridResult grid_search(const PairedDataset& train, const TuneSpec& spec, const TuningGrid& grid) {
  const bool kernel_axis = spec.method != Method::Cca && spec.kernel != KernelFamily::Linear;
  grid.validate(kernel_axis);
  const std::size_t n = train.size();
  if (spec.folds < 2) throw Error(ErrorCode::InvalidArgument, "folds must be at least 2");
  if (static_cast<std::size_t>(spec.folds) > n)
    throw Error(ErrorCode::InvalidArgument, "more folds than training pairs");

  std::vector<std::optional<double>> params;
  if (kernel_axis) params.assign(grid.kernel_param_values.begin(), grid.kernel_param_values.end());
  else params.push_back(std::nullopt);
  const int p_max = *std::max_element(grid.p_values.begin(), grid.p_values.end());

  Rng rng(spec.seed);
  const std::vector<std::size_t> perm = rng.permutation(n);
  std::vector<std::vector<std::size_t>> held(static_cast<std::size_t>(spec.folds));
  for (std::size_t i = 0; i < n; ++i) held[i % static_cast<std::size_t>(spec.folds)].push_back(perm[i]);
  for (auto& h : held) std::sort(h.begin(), h.end());

  const std::size_t n_kappa = grid.kappa_values.size(), n_param = params.size();
  const std::size_t n_p = grid.p_values.size(), n_k = grid.k_lle_values.size();
  const auto folds = static_cast<std::size_t>(spec.folds);
  // tallies[((kappa * n_param + param) * folds + fold) * n_p * n_k + p * n_k + k]
  std::vector<RankTally> tallies(n_kappa * n_param * folds * n_p * n_k);

  parallel_for(n_kappa * n_param * folds, [&](std::size_t unit) {
    const std::size_t fold = unit % folds;
    const std::size_t ip = (unit / folds) % n_param;
    const std::size_t ik = unit / folds / n_param;
    RankTally* out = &tallies[unit * n_p * n_k];

    std::vector<bool> is_held(n, false);
    for (auto i : held[fold]) is_held[i] = true;
    std::vector<std::size_t> fit_rows;
    for (std::size_t i = 0; i < n; ++i)
      if (!is_held[i]) fit_rows.push_back(i);
    const PairedDataset fit_data = train.select_rows(fit_rows);
    const PairedDataset query_data = train.select_rows(held[fold]);

    FitConfig cfg;
    cfg.method = spec.method;
    cfg.protein_kernel = cfg.ligand_kernel = kernel_for(spec, params[ip]);
    cfg.options = spec.options;
    cfg.options.kappa = grid.kappa_values[ik];
    cfg.options.p = p_max;

    CanonicalModel full;
    try {
      full = fit(fit_data, cfg);
    } catch (const Error& e) {
      for (std::size_t c = 0; c < n_p * n_k; ++c) out[c].infeasible = e.what();
      return;
    }
    for (std::size_t a = 0; a < n_p; ++a) {
      const int p = grid.p_values[a];
      if (p > full.p) {
        for (std::size_t b = 0; b < n_k; ++b)
          out[a * n_k + b].infeasible = "only " + std::to_string(full.p) + " canonical direction(s) available";
        continue;
      }
      const CanonicalModel model = full.truncated(p);
      Eigen::MatrixXd embed(static_cast<Eigen::Index>(n), p);
      std::vector<bool> embed_bad(n, false);
      for (std::size_t j = 0; j < n; ++j) {
        try {
          embed.row(static_cast<Eigen::Index>(j)) =
              project_point(model, train.ligands().values().row(static_cast<Eigen::Index>(j)).transpose(), Side::Ligand)
                  .transpose();
        } catch (const Error&) {
          embed_bad[j] = true;
        }
      }
      for (std::size_t q = 0; q < query_data.size(); ++q) {
        const auto r = static_cast<Eigen::Index>(q);
        Eigen::VectorXd coords, actual;
        try {
          coords = project_point(model, query_data.proteins().values().row(r).transpose(), Side::Protein);
          actual = project_point(model, query_data.ligands().values().row(r).transpose(), Side::Ligand);
        } catch (const Error&) {
          for (std::size_t b = 0; b < n_k; ++b) ++out[a * n_k + b].failed;
          continue;
        }
        std::vector<bool> skip = embed_bad;
        skip[held[fold][q]] = true;
        for (std::size_t b = 0; b < n_k; ++b) {
          RankTally& t = out[a * n_k + b];
          const int k_lle = grid.k_lle_values[b];
          if (k_lle > static_cast<int>(fit_rows.size())) {
            t.infeasible = "k_lle exceeds the fold's training size";
            continue;
          }
          const PredictionResult pred = predict_from_coords(model, coords, k_lle);
          t.sum += 1 + count_closer(pred.predicted, actual, embed, &skip);
          ++t.evaluated;
        }
      }
    }
  });

  GridResult result;
  for (std::size_t ik = 0; ik < n_kappa; ++ik)
    for (std::size_t a = 0; a < n_p; ++a)
      for (std::size_t b = 0; b < n_k; ++b)
        for (std::size_t ip = 0; ip < n_param; ++ip) {
          CvRow row;
          row.config = {grid.kappa_values[ik], grid.p_values[a], grid.k_lle_values[b], params[ip]};
          double sum = 0.0;
          for (std::size_t f = 0; f < folds; ++f) {
            const RankTally& t = tallies[((ik * n_param + ip) * folds + f) * n_p * n_k + a * n_k + b];
            if (!t.infeasible.empty() && row.feasible) {
              row.feasible = false;
              row.note = t.infeasible;
            }
            sum += t.sum;
            row.evaluated += t.evaluated;
            row.failed += t.failed;
          }
          if (row.feasible && row.evaluated == 0) {
            row.feasible = false;
            row.note = "no query could be ranked";
          }
          row.mean_rank = row.feasible ? sum / row.evaluated : std::numeric_limits<double>::quiet_NaN();
          result.table.push_back(std::move(row));
        }

  for (const auto& row : result.table) {
    if (!row.feasible) continue;
    if (!result.best || row.mean_rank < result.best_score ||
        (row.mean_rank == result.best_score && tie_break_less(row.config, *result.best))) {
      result.best = row.config;
      result.best_score = row.mean_rank;
    }
  }
  return result;
}

void write_cv_csv(const std::filesystem::path& path, const GridResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << "kappa,p,k_lle,kernel_param,feasible,mean_rank,evaluated,failed,note\n";
  for (const auto& r : result.table) {
    out << csv::format_double(r.config.kappa) << ',' << r.config.p << ',' << r.config.k_lle << ','
        << (r.config.kernel_param ? csv::format_double(*r.config.kernel_param) : "") << ','
        << (r.feasible ? "true" : "false") << ',' << (r.feasible ? csv::format_double(r.mean_rank) : "") << ','
        << r.evaluated << ',' << r.failed << ',' << csv::escape(r.note) << '\n';
  }
}

std::string cv_json(const GridResult& result) {
  auto config = [](const GridConfig& c) {
    json j = {{"kappa", c.kappa}, {"p", c.p}, {"k_lle", c.k_lle}};
    j["kernel_param"] = c.kernel_param ? json(*c.kernel_param) : json(nullptr);
    return j;
  };
  json rows = json::array();
  for (const auto& r : result.table) {
    json j = config(r.config);
    j["feasible"] = r.feasible;
    j["mean_rank"] = nullable(r.mean_rank);
    j["evaluated"] = r.evaluated;
    j["failed"] = r.failed;
    if (!r.note.empty()) j["note"] = r.note;
    rows.push_back(j);
  }
  json j = {{"configs", result.table.size()}, {"table", rows}};
  j["best"] = result.best ? config(*result.best) : json(nullptr);
  j["best_mean_rank"] = result.best ? json(result.best_score) : json(nullptr);
  return j.dump(2) + "\n";
}

// ---- clustering -------------------------------------------------------------

std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts, int max_iterations) {
  const Eigen::Index n = points.rows();
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "kmeans needs 1 <= k <= n");
  Rng rng(seed);
  std::vector<int> best_labels;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int run = 0; run < std::max(1, restarts); ++run) {
    Eigen::MatrixXd centers(k, points.cols());
    centers.row(0) = points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
    Eigen::VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double total = d2.sum();
      Eigen::Index pick = 0;
      if (total > 0.0) {
        double u = rng.uniform() * total;
        for (pick = 0; pick < n - 1; ++pick) {
          u -= d2(pick);
          if (u < 0.0) break;
        }
      } else {
        pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
      }
      centers.row(c) = points.row(pick);
      d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    double inertia = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
      bool changed = false;
      inertia = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index arg = 0;
        const double d = (centers.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&arg);
        inertia += d;
        if (labels[static_cast<std::size_t>(i)] != static_cast<int>(arg)) {
          labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
          changed = true;
        }
      }
      if (!changed) break;
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
        counts(labels[static_cast<std::size_t>(i)]) += 1.0;
      }
      for (int c = 0; c < k; ++c)
        if (counts(c) > 0) centers.row(c) = sums.row(c) / counts(c);
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  return best_labels;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "label vectors differ in length");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto pairs = [](double c) { return c * (c - 1.0) / 2.0; };
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [key, c] : joint) index += pairs(c);
  for (const auto& [key, c] : ra) sa += pairs(c);
  for (const auto& [key, c] : rb) sb += pairs(c);
  const double expected = sa * sb / pairs(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;  // both partitions trivial and identical in structure
  return (index - expected) / (max_index - expected);
}

}  // namespace canonscreen

#include "gbw/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <numeric>
#include <sstream>

#include "gbw/matrix_io.hpp"
#include "gbw/random.hpp"
#include "gbw/transport.hpp"

#ifndef GBW_VERSION
#define GBW_VERSION "0.0.0"
#endif

namespace gbw {

using nlohmann::json;

const char* library_version() { return GBW_VERSION; }

namespace {

const std::vector<std::string> kCommands = {"logdet", "gmm",      "pca",      "metric",
                                            "barycenter", "distance", "convexity"};

std::vector<std::string> default_geometries(const std::string& cmd) {
  if (cmd == "logdet" || cmd == "gmm") return {"ai", "bw", "gbw"};
  if (cmd == "barycenter" || cmd == "distance") return {"bw", "gbw_fixed"};
  return {"bw"};
}

std::vector<GeometryKind> geometries_of(const ExperimentConfig& cfg) {
  std::vector<GeometryKind> out;
  for (const auto& g : cfg.geometries.empty() ? default_geometries(cfg.command) : cfg.geometries)
    out.push_back(parse_geometry(g));
  return out;
}

// the fixed M used whenever a run asks for gbw_fixed
GbwParam fixed_param(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  return GbwParam(random_spd(rng, n, 0.5, 2.0));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json trace_summary(const SolveTrace& t) {
  json j = {{"converged", t.converged}, {"aborted", t.aborted}, {"message", t.message}};
  if (!t.rows.empty()) {
    const TraceRow& b = t.rows.back();
    j["iterations"] = b.iter;
    j["cumulative_inner_iters"] = b.cumulative_inner_iters;
    j["final_cost"] = b.cost;
    j["final_grad_norm"] = b.grad_norm;
    if (!std::isnan(b.dist_to_ref)) j["final_dist_to_ref"] = b.dist_to_ref;
  }
  return j;
}

// split indices 50/50 with a seeded shuffle
std::pair<LabeledSpd, LabeledSpd> split_half(const LabeledSpd& all, std::uint64_t seed) {
  std::vector<std::size_t> idx(all.points.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  LabeledSpd tr, te;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    LabeledSpd& dst = i < idx.size() / 2 ? tr : te;
    dst.points.push_back(all.points[idx[i]]);
    dst.labels.push_back(all.labels[idx[i]]);
  }
  return {tr, te};
}

LabeledSpd class_data(const ExperimentConfig& cfg) {
  if (!cfg.data.empty()) return ingest_covariances(cfg.data, cfg.group_size);
  SpdClassConfig c;
  c.n = cfg.n;
  c.per_class = cfg.per_class;
  c.seed = cfg.seed;
  return spd_classes(c);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

// ------------------------------------------------------------------ config

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& knob, const std::string& why) {
    throw ConfigError("invalid " + knob + ": " + why);
  };
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    bad("command", "'" + command + "' is not a known command");
  if (n < 1) bad("n", "must be at least 1");
  if (d < 1) bad("d", "must be at least 1");
  if ((command == "pca" || command == "metric") && data.empty() && d > n) bad("d", "must not exceed n");
  if (k < 1) bad("k", "must be at least 1");
  if (!(cond >= 1.0) || !std::isfinite(cond)) bad("cond", "must be a finite number >= 1");
  if (!(tol > 0.0)) bad("tol", "must be positive");
  if (max_iters < 1) bad("max-iters", "must be positive");
  if (step0 && !(*step0 > 0.0)) bad("step0", "must be positive");
  if (batch < 1) bad("batch", "must be positive");
  if (epochs < 1) bad("epochs", "must be positive");
  if (samples < 1) bad("samples", "must be positive");
  if (points < 1) bad("points", "must be positive");
  if (per_class < 1) bad("per-class", "must be positive");
  if (splits < 1) bad("splits", "must be positive");
  if (trials < 1) bad("trials", "must be positive");
  if (group_size < 2) bad("group-size", "must be at least 2");
  if (out.empty()) bad("out", "must be a directory path");
  for (const auto& g : geometries) {
    GeometryKind kind = parse_geometry(g);
    bool iterative = command == "logdet" || command == "gmm";
    if (!iterative && kind != GeometryKind::bw && kind != GeometryKind::gbw)
      bad("geometry", "'" + g + "' is not available for " + command + " (use bw or gbw_fixed)");
  }
}

json ExperimentConfig::to_json() const {
  json j = {{"command", command},   {"n", n},           {"d", d},
            {"k", k},               {"cond", cond},     {"geometry", geometries.empty() ? default_geometries(command) : geometries},
            {"seed", seed},         {"tol", tol},       {"max_iters", max_iters},
            {"batch", batch},       {"epochs", epochs}, {"samples", samples},
            {"points", points},     {"per_class", per_class}, {"splits", splits},
            {"trials", trials},     {"group_size", group_size}, {"data", data}};
  j["step0"] = step0 ? json(*step0) : json(nullptr);
  return j;
}

// ---------------------------------------------------------------- commands

ResultBundle run_logdet(const ExperimentConfig& cfg) {
  LogDetProblem prob = LogDetProblem::synthetic(cfg.n, cfg.cond, cfg.seed);
  const double ref = prob.x_star.max_eigenvalue();
  TrustRegionConfig tc;
  tc.gtol = cfg.tol;
  tc.max_outer = cfg.max_iters;
  tc.reference = prob.x_star;
  const GbwParam m = fixed_param(cfg.n, cfg.seed);

  auto kinds = geometries_of(cfg);
  std::vector<std::future<TrustRegionResult>> jobs;
  for (GeometryKind k : kinds)
    jobs.push_back(std::async(std::launch::async, [&, k] {
      if (k == GeometryKind::gbw) return trust_region(GbwGeometry(m), prob.objective(), SpdMatrix::identity(cfg.n), tc);
      return trust_region(k, prob.objective(), SpdMatrix::identity(cfg.n), tc);
    }));

  ResultBundle b;
  b.plot_x = "cumulative_inner_iters";
  b.plot_y = "dist_to_ref";
  json runs = json::array();
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    json s = {{"geometry", geometry_name(kinds[i])}};
    try {
      TrustRegionResult r = jobs[i].get();
      s.update(trace_summary(r.trace));
      double dist = r.trace.rows.back().dist_to_ref;
      s["relative_dist"] = dist / ref;
      s["reached_1e-6"] = dist <= 1e-6 * ref;
      if (r.trace.aborted) b.failed = true;
      b.traces.push_back({geometry_name(kinds[i]), std::move(r.trace)});
    } catch (const Error& e) {
      s["error"] = e.what();
      b.failed = true;
    }
    runs.push_back(s);
  }
  b.summary = {{"runs", runs}, {"optimum_spectral_norm", ref}};
  return b;
}

const std::vector<double>& gmm_step_grid() {
  static const std::vector<double> grid = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0};
  return grid;
}

ResultBundle run_gmm(const ExperimentConfig& cfg) {
  Matrix data;
  if (!cfg.data.empty()) {
    data = read_samples_csv(cfg.data);
    if (data.rows() == 0) throw ConfigError("invalid data: empty dataset '" + cfg.data + "'");
  } else {
    data = gmm_synthetic(cfg.n, cfg.k, cfg.samples, cfg.seed).data;
  }
  GmmObjective obj(std::move(data), cfg.k);
  GmmModel init = obj.initial_model(cfg.seed);
  const double ll0 = obj.log_likelihood(init);
  std::vector<double> steps = cfg.step0 ? std::vector<double>{*cfg.step0} : gmm_step_grid();

  auto kinds = geometries_of(cfg);
  const GbwParam m = fixed_param(obj.data().cols(), cfg.seed);
  struct Sweep {
    json runs = json::array();
    std::optional<RsgdResult> best;
    std::optional<double> best_step;
    std::string error;
  };
  std::vector<std::future<Sweep>> jobs;
  for (GeometryKind k : kinds)
    jobs.push_back(std::async(std::launch::async, [&, k] {
      Sweep sw;
      for (double a : steps) {
        RsgdConfig rc;
        rc.step0 = a;
        rc.batch = cfg.batch;
        rc.epochs = cfg.epochs;
        rc.seed = cfg.seed;
        try {
          RsgdResult r = rsgd(k, obj.stochastic(), init.as_point(), rc, m);
          double proxy = r.trace.rows.back().grad_norm;
          sw.runs.push_back({{"step0", a}, {"final_proxy", proxy}, {"aborted", r.trace.aborted},
                             {"final_loss", r.trace.rows.back().cost}});
          bool better = !r.trace.aborted && std::isfinite(proxy) &&
                        (!sw.best || proxy < sw.best->trace.rows.back().grad_norm);
          if (better) {
            sw.best = std::move(r);
            sw.best_step = a;
          }
        } catch (const Error& e) {
          sw.runs.push_back({{"step0", a}, {"error", e.what()}});
        }
      }
      return sw;
    }));

  ResultBundle b;
  b.plot_y = "grad_norm";
  json runs = json::array();
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    Sweep sw = jobs[i].get();
    json s = {{"geometry", geometry_name(kinds[i])}, {"sweep", sw.runs}};
    if (!sw.best) {
      s["error"] = "every initial stepsize aborted";
      b.failed = true;
    } else {
      const auto& rows = sw.best->trace.rows;
      s["best_step0"] = *sw.best_step;
      s["initial_proxy"] = rows.front().grad_norm;
      s["final_proxy"] = rows.back().grad_norm;
      s["proxy_reduction"] = rows.front().grad_norm / rows.back().grad_norm;
      s["initial_log_likelihood"] = ll0;
      s["final_log_likelihood"] = obj.log_likelihood(GmmModel::from_point(sw.best->point));
      Vector w = GmmModel::from_point(sw.best->point).weights();
      s["weights"] = std::vector<double>(w.data(), w.data() + w.size());
      b.traces.push_back({geometry_name(kinds[i]), std::move(sw.best->trace)});
    }
    runs.push_back(s);
  }
  b.summary = {{"runs", runs}, {"samples", obj.data().rows()}, {"dim", obj.data().cols()}};
  if (cfg.k == 1) {
    SpdMatrix opt = obj.single_component_optimum();
    b.summary["closed_form_optimum"] = matrix_to_json(opt.matrix());
  }
  return b;
}

ResultBundle run_pca(const ExperimentConfig& cfg) {
  LabeledSpd all = class_data(cfg);
  if (all.points.size() < 4) throw ConfigError("invalid data: need at least four samples");
  const Eigen::Index n = all.points.front().dim();
  if (cfg.d > n) throw ConfigError("invalid d: must not exceed the data dimension");

  struct Split {
    json summary;
    SolveTrace trace;
  };
  std::vector<std::future<Split>> jobs;
  for (int s = 0; s < cfg.splits; ++s)
    jobs.push_back(std::async(std::launch::async, [&, s] {
      const std::uint64_t split_seed = cfg.seed + static_cast<std::uint64_t>(s);
      auto [tr, te] = split_half(all, split_seed);
      PcaProblem prob = PcaProblem::with_barycenter(tr.points, cfg.d);
      StiefelConfig sc;
      sc.max_iters = cfg.max_iters;
      Stiefel st(n, cfg.d);
      StiefelResult r = stiefel_optimize(
          st, [&](const Matrix& w) { return prob.objective(w); },
          [&](const Matrix& w) { return prob.gradient(w); }, st.random_point(split_seed), sc);
      std::vector<double> gn = r.grad_norm;
      if (gn.size() < r.objective.size()) gn.push_back(st.rgrad(r.w, prob.gradient(r.w)).norm());
      Split out;
      out.trace.seed = split_seed;
      out.trace.converged = r.converged;
      for (std::size_t i = 0; i < r.objective.size(); ++i)
        out.trace.rows.push_back({static_cast<int>(i), 0, r.objective[i], gn[i], 0.0, NAN});
      double full = nearest_neighbor_accuracy(tr, te, std::nullopt);
      double red = nearest_neighbor_accuracy(tr, te, r.w);
      bool monotone = true;
      for (std::size_t i = 1; i < r.objective.size(); ++i) monotone &= r.objective[i] >= r.objective[i - 1];
      out.summary = {{"split", s},          {"seed", split_seed},
                     {"full_accuracy", full}, {"reduced_accuracy", red},
                     {"initial_objective", r.objective.front()}, {"final_objective", r.objective.back()},
                     {"monotone", monotone},  {"converged", r.converged},
                     {"test_size", te.points.size()}};
      return out;
    }));

  ResultBundle b;
  json splits = json::array();
  double full_sum = 0.0, red_sum = 0.0;
  for (int s = 0; s < cfg.splits; ++s) {
    Split sp = jobs[s].get();
    full_sum += sp.summary["full_accuracy"].get<double>();
    red_sum += sp.summary["reduced_accuracy"].get<double>();
    splits.push_back(sp.summary);
    b.traces.push_back({"split" + std::to_string(s), std::move(sp.trace)});
  }
  b.summary = {{"splits", splits},
               {"mean_full_accuracy", full_sum / cfg.splits},
               {"mean_reduced_accuracy", red_sum / cfg.splits},
               {"n", n},
               {"d", cfg.d},
               {"samples", all.points.size()}};
  return b;
}

ResultBundle run_metric(const ExperimentConfig& cfg) {
  LabeledSpd all = class_data(cfg);
  if (all.points.size() < 4) throw ConfigError("invalid data: need at least four samples");
  const Eigen::Index n = all.points.front().dim();
  if (cfg.d > n) throw ConfigError("invalid d: must not exceed the data dimension");
  auto [tr, te] = split_half(all, cfg.seed);
  MetricLearnProblem prob(tr.points, tr.labels, cfg.d);
  DescentConfig dc;
  dc.max_iters = cfg.max_iters;
  if (cfg.step0) dc.step0 = *cfg.step0;
  MetricFit fit = metric_learn_fit(prob, cfg.seed, dc);
  Matrix w0 = Stiefel(n, cfg.d).random_point(cfg.seed);

  ResultBundle b;
  SolveTrace t;
  t.seed = cfg.seed;
  for (std::size_t i = 0; i < fit.objective.size(); ++i)
    t.rows.push_back({static_cast<int>(i), 0, fit.objective[i], NAN, 0.0, NAN});
  // gradient norms are recomputed only at the ends; interior rows keep NaN out of the CSV
  t.rows.front().grad_norm = prob.gradient(w0).norm();
  t.rows.back().grad_norm = prob.gradient(fit.w).norm();
  for (auto& r : t.rows)
    if (std::isnan(r.grad_norm)) r.grad_norm = 0.0;
  b.summary = {{"initial_objective", fit.objective.front()},
               {"final_objective", fit.objective.back()},
               {"initial_separation_ratio", prob.separation_ratio(w0)},
               {"final_separation_ratio", prob.separation_ratio(fit.w)},
               {"full_accuracy", nearest_neighbor_accuracy(tr, te, std::nullopt)},
               {"learned_accuracy", nearest_neighbor_accuracy(tr, te, fit.w)},
               {"iterations", fit.objective.size() - 1}};
  b.traces.push_back({"metric", std::move(t)});
  return b;
}

ResultBundle run_barycenter(const ExperimentConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<SpdMatrix> pts;
  for (std::size_t i = 0; i < cfg.points; ++i) pts.push_back(random_spd(rng, cfg.n, 0.2, 5.0));
  ResultBundle b;
  json runs = json::array();
  for (GeometryKind k : geometries_of(cfg)) {
    GbwManifold man = k == GeometryKind::bw ? GbwManifold::bures_wasserstein(cfg.n)
                                            : GbwManifold(fixed_param(cfg.n, cfg.seed));
    BarycenterProblem prob(pts, man);
    BarycenterOptions o;
    o.tol = cfg.tol;
    o.max_iters = cfg.max_iters;
    BarycenterResult r = barycenter(prob, o);
    SolveTrace t;
    t.seed = cfg.seed;
    t.converged = r.converged;
    SpdMatrix a0 = prob.euclidean_mean();
    for (std::size_t i = 0; i < r.objective.size(); ++i) {
      double ch = i == 0 ? prob.optimality_residual(a0).norm() : r.change[i - 1];
      t.rows.push_back({static_cast<int>(i), 0, r.objective[i], ch, i == 0 ? 0.0 : r.change[i - 1], NAN});
    }
    json s = r.to_json();
    s["geometry"] = geometry_name(k);
    runs.push_back(s);
    b.traces.push_back({geometry_name(k), std::move(t)});
  }
  b.summary = {{"runs", runs}, {"points", cfg.points}};
  return b;
}

ResultBundle run_distance(const ExperimentConfig& cfg) {
  Rng rng(cfg.seed);
  SpdMatrix x = random_spd(rng, cfg.n, 0.2, 5.0), y = random_spd(rng, cfg.n, 0.2, 5.0);
  ResultBundle b;
  json runs = json::array();
  for (GeometryKind k : geometries_of(cfg)) {
    GbwParam m = k == GeometryKind::bw ? GbwParam::identity(cfg.n) : fixed_param(cfg.n, cfg.seed);
    GbwManifold man(m);
    Matrix t = transport_plan(x, y, m);
    double d2 = man.distance_squared(x, y);
    json s = {{"geometry", geometry_name(k)},
              {"distance_squared", d2},
              {"f_tilde", f_tilde(man, x, y)},
              {"pushforward_residual", (t * x.matrix() * t.transpose() - y.matrix()).norm() / y.matrix().norm()},
              {"closed_form_cost", transport_cost(x, y, m, t)},
              {"monte_carlo_cost", monte_carlo_transport_cost(x, t, m, static_cast<std::int64_t>(cfg.samples), cfg.seed)},
              {"transport_plan", matrix_to_json(t)}};
    runs.push_back(s);
  }
  RobustAscentConfig rc;
  rc.max_iters = cfg.max_iters;
  if (cfg.step0) rc.step = *cfg.step0;
  RobustResult r = robust_distance(x, y, {}, rc);
  SolveTrace t;
  t.seed = cfg.seed;
  t.converged = r.converged;
  for (std::size_t i = 0; i < r.trace.size(); ++i) t.rows.push_back({static_cast<int>(i), 0, r.trace[i], 0.0, 0.0, NAN});
  b.traces.push_back({"robust", std::move(t)});
  b.summary = {{"runs", runs}, {"robust", r.to_json()}};
  return b;
}

ResultBundle run_convexity(const ExperimentConfig& cfg) {
  ResultBundle b;
  json fns = json::array();
  bool clean = true;
  for (ConvexFn f : {ConvexFn::trace_linear, ConvexFn::trace_quadratic, ConvexFn::neg_logdet, ConvexFn::spectral}) {
    ConvexityConfig cc;
    cc.n = cfg.n;
    cc.trials = cfg.trials;
    cc.seed = cfg.seed;
    ConvexityReport r = geodesic_convexity_suite(f, cc);
    clean &= r.violations == 0;
    fns.push_back({{"function", convex_fn_name(f)}, {"checks", r.checks}, {"violations", r.violations},
                   {"worst_gap", r.worst_gap}, {"witness", r.witness}});
  }
  b.summary = {{"functions", fns}, {"all_convex", clean}};
  return b;
}

ResultBundle run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  ResultBundle b;
  const std::string& c = cfg.command;
  if (c == "logdet") b = run_logdet(cfg);
  else if (c == "gmm") b = run_gmm(cfg);
  else if (c == "pca") b = run_pca(cfg);
  else if (c == "metric") b = run_metric(cfg);
  else if (c == "barycenter") b = run_barycenter(cfg);
  else if (c == "distance") b = run_distance(cfg);
  else b = run_convexity(cfg);
  for (auto& t : b.traces) t.trace.seed = cfg.seed;
  b.summary["config"] = cfg.to_json();
  b.summary["version"] = library_version();
  b.summary["wall_seconds"] = seconds_since(t0);
  b.summary["failed"] = b.failed;
  return b;
}

// ---------------------------------------------------------------- ingest

double ingest_ridge(const Matrix& cov) {
  double md = cov.diagonal().mean();
  return md > 0.0 ? 1e-6 * md : 1e-6;
}

LabeledSpd ingest_covariances_text(const std::string& text, int group_size) {
  if (group_size < 2) throw ConfigError("invalid group-size: must be at least 2");
  Matrix rows;
  try {
    rows = matrix_from_csv(text);
  } catch (const IoError& e) {
    throw IoError(std::string("covariance input: ") + e.what());
  }
  if (rows.rows() == 0 || rows.cols() < 2) throw IoError("covariance input: need rows of label,v1,...,vn");
  const Eigen::Index n = rows.cols() - 1;

  std::vector<double> order;  // labels by first appearance
  std::map<double, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double l = rows(i, 0);
    if (!members.count(l)) order.push_back(l);
    members[l].push_back(i);
  }
  LabeledSpd out;
  for (std::size_t li = 0; li < order.size(); ++li) {
    const auto& idx = members[order[li]];
    for (std::size_t start = 0; start < idx.size(); start += group_size) {
      std::size_t len = std::min<std::size_t>(group_size, idx.size() - start);
      if (len < 2) {
        std::ostringstream os;
        os << "covariance input: label " << order[li] << " leaves a group of one row";
        throw IoError(os.str());
      }
      Matrix g(len, n);
      for (std::size_t r = 0; r < len; ++r) g.row(r) = rows.row(idx[start + r]).tail(n);
      Matrix c = g.rowwise() - g.colwise().mean();
      Matrix cov = c.transpose() * c / static_cast<double>(len - 1);
      cov += ingest_ridge(cov) * Matrix::Identity(n, n);
      out.points.emplace_back(sym_part(cov));
      out.labels.push_back(static_cast<int>(li));
    }
  }
  return out;
}

LabeledSpd ingest_covariances(const std::string& path, int group_size) {
  return ingest_covariances_text(slurp(path), group_size);
}

Matrix read_samples_csv(const std::string& path) {
  std::string text = slurp(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return Matrix(0, 0);
  return matrix_from_csv(text);
}

// ---------------------------------------------------------------- output

namespace {

double column_value(const TraceRow& r, const std::string& col) {
  if (col == "iter") return r.iter;
  if (col == "cumulative_inner_iters") return static_cast<double>(r.cumulative_inner_iters);
  if (col == "cost") return r.cost;
  if (col == "grad_norm") return r.grad_norm;
  if (col == "step") return r.step;
  if (col == "dist_to_ref") return r.dist_to_ref;
  throw ConfigError("unknown trace column '" + col + "'");
}

}  // namespace

std::string trace_plot_svg(const std::vector<NamedTrace>& traces, const std::string& x,
                           const std::string& y) {
  const double w = 640, h = 400, pad = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  std::vector<std::vector<std::pair<double, double>>> lines;
  for (const auto& t : traces) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : t.trace.rows) {
      double xv = column_value(r, x), yv = column_value(r, y);
      if (!(yv > 0.0) || !std::isfinite(xv)) continue;
      double ly = std::log10(yv);
      pts.emplace_back(xv, ly);
      x0 = std::min(x0, xv), x1 = std::max(x1, xv), y0 = std::min(y0, ly), y1 = std::max(y1, ly);
    }
    lines.push_back(std::move(pts));
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">" << x << "</text>\n";
  os << "<text x=\"15\" y=\"" << h / 2 << "\" transform=\"rotate(-90 15 " << h / 2
     << ")\" text-anchor=\"middle\">log10 " << y << "</text>\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << colors[i % 6] << "\" points=\"";
    for (auto [xv, ly] : lines[i]) {
      double px = pad + (xv - x0) / (x1 - x0) * (w - 2 * pad);
      double py = h - pad - (ly - y0) / (y1 - y0) * (h - 2 * pad);
      os << px << ',' << py << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << w - pad << "\" y=\"" << pad + 16 * i << "\" fill=\"" << colors[i % 6]
       << "\" text-anchor=\"end\">" << traces[i].name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit(const ResultBundle& bundle, const std::string& dir, bool plot) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& body) {
    fs::path p = fs::path(dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    f << body;
    if (!f) throw IoError("write failed for '" + p.string() + "'");
  };
  for (const auto& t : bundle.traces) write("trace_" + t.name + ".csv", t.trace.to_csv());
  write("summary.json", bundle.summary.dump(2) + "\n");
  if (plot && !bundle.traces.empty()) write("plot.svg", trace_plot_svg(bundle.traces, bundle.plot_x, bundle.plot_y));
}

}  // namespace gbw

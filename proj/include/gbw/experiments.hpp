#pragma once

// Experiment runners behind the command-line tool: each command builds its
// problem from an ExperimentConfig, runs the solvers and returns traces plus a
// JSON summary. Nothing here touches the filesystem except ingest and emit.

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gbw/applications.hpp"

namespace gbw {

const char* library_version();

struct ExperimentConfig {
  std::string command;  // logdet, gmm, pca, metric, barycenter, distance, convexity
  Eigen::Index n = 20;
  Eigen::Index d = 5;
  std::size_t k = 2;
  double cond = 10.0;
  std::vector<std::string> geometries;  // empty: the command's default set
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int max_iters = 1000;
  std::optional<double> step0;  // unset: sweep (gmm) or solver default
  std::size_t batch = 50;
  int epochs = 50;
  std::size_t samples = 2000;  // gmm rows, Monte-Carlo draws
  std::size_t points = 10;     // barycenter inputs
  int per_class = 40;
  int splits = 10;
  int trials = 500;
  int group_size = 50;
  std::string data;  // optional CSV input
  std::string out = "out";
  bool plot = false;

  /// Throws ConfigError naming the first offending knob.
  void validate() const;
  nlohmann::json to_json() const;
};

struct NamedTrace {
  std::string name;  // file is trace_<name>.csv
  SolveTrace trace;
};

struct ResultBundle {
  std::vector<NamedTrace> traces;
  nlohmann::json summary;
  bool failed = false;  // a solver aborted or threw
  std::string plot_x = "iter", plot_y = "cost";
};

ResultBundle run_experiment(const ExperimentConfig& cfg);

ResultBundle run_logdet(const ExperimentConfig& cfg);
ResultBundle run_gmm(const ExperimentConfig& cfg);
ResultBundle run_pca(const ExperimentConfig& cfg);
ResultBundle run_metric(const ExperimentConfig& cfg);
ResultBundle run_barycenter(const ExperimentConfig& cfg);
ResultBundle run_distance(const ExperimentConfig& cfg);
ResultBundle run_convexity(const ExperimentConfig& cfg);

/// Initial stepsizes tried by the gmm sweep.
const std::vector<double>& gmm_step_grid();

// ---- data plumbing

/// Ridge added to an ingested covariance: 1e-6 times its mean diagonal, or
/// 1e-6 when that is zero.
double ingest_ridge(const Matrix& cov);

/// CSV rows are `label,v1,...,vn`. Rows of each label (in file order) are cut
/// into consecutive groups of `group_size`; a shorter tail group is kept if it
/// has at least two rows. Each group yields its sample covariance plus a ridge.
/// Labels are numbered by first appearance.
LabeledSpd ingest_covariances_text(const std::string& text, int group_size);
LabeledSpd ingest_covariances(const std::string& path, int group_size);

/// Rows = samples, no label column.
Matrix read_samples_csv(const std::string& path);

/// Writes trace_<name>.csv for every trace, summary.json and, if asked, plot.svg.
void emit(const ResultBundle& bundle, const std::string& dir, bool plot);

/// Static SVG of log10 of column `y` against column `x` (header names), one
/// polyline per trace. Nonpositive or missing values are skipped.
std::string trace_plot_svg(const std::vector<NamedTrace>& traces, const std::string& x,
                           const std::string& y);

}  // namespace gbw

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "rfi/config.hpp"
#include "rfi/graph.hpp"
#include "rfi/solvers.hpp"

namespace rfi {

enum class TestCase { kTc1, kTc2, kTc3, kCustom };
enum class Algorithm { kFi, kRfiIter, kRfiDExact, kRfiDSample, kRfiR, kTlsSem };
enum class SweepParam { kNoisePower, kSignals, kPerturbation };
enum class GraphSource { kErdosRenyi, kKarate };
/// How outputs are generated: polynomial filter ("H") or structural equations ("SEM").
enum class DataModel { kFilter, kSem };

std::string to_string(TestCase v);
std::string to_string(Algorithm v);
std::string to_string(SweepParam v);
std::string to_string(GraphSource v);
std::string to_string(DataModel v);
TestCase parse_test_case(const std::string& s);
Algorithm parse_algorithm(const std::string& s);
SweepParam parse_sweep_param(const std::string& s);
GraphSource parse_graph_source(const std::string& s);
DataModel parse_data_model(const std::string& s);

struct ExperimentConfig {
  TestCase test_case = TestCase::kCustom;
  int n_graphs = 100;
  GraphSource graph = GraphSource::kErdosRenyi;
  int n = 20;
  double p = 0.25;
  PerturbationSpec perturbation = PerturbationSpec::symmetric(0.1);
  int m = 10;
  int k = 4;
  double noise_power = 0.1;
  SweepParam sweep_param = SweepParam::kNoisePower;
  std::vector<double> sweep{0.1};
  std::vector<DataModel> data_models{DataModel::kFilter};
  std::vector<Algorithm> algorithms{Algorithm::kFi};
  RfiConfig solver;
  GsoConstraintSet constraints;
  TlsSemConfig tls_sem;
  /// Build polynomial filters on S / ||S||_2 so that powers of S stay bounded.
  bool normalize_filter_gso = true;
  std::uint64_t seed = 0;
  double trial_time_limit = 60.0;  // seconds; slower trials count as failures
  int threads = 0;                 // 0 = hardware concurrency

  void validate() const;
  /// Defaults for the three reference test cases (and a plain default for custom).
  static ExperimentConfig preset(TestCase tc);
};

/// Overlays the keys present in `j` onto `cfg`; unknown keys are rejected.
void apply_json(const nlohmann::json& j, ExperimentConfig& cfg);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Curve label: the algorithm name, suffixed with the data model when several are run.
std::string curve_name(const ExperimentConfig& cfg, Algorithm alg, DataModel model);

struct AlgorithmOutcome {
  std::string curve;
  bool ok = false;
  double filter_error = 0.0;
  double graph_error = 0.0;
  std::string error;
};

/// One Monte-Carlo instance: draws the graph, filter, perturbation and signals, runs
/// every configured algorithm on every data model and scores the estimates.
std::vector<AlgorithmOutcome> run_trial(const ExperimentConfig& cfg, int trial_index,
                                        double sweep_value, Rng& rng);

/// Sub-seed of (master seed, sweep index, trial index).
std::uint64_t trial_seed(std::uint64_t master, int sweep_index, int trial_index);

struct MetricRecord {
  std::string algorithm;
  std::string sweep_param;
  double sweep_value = 0.0;
  double median_filter_error = 0.0;
  double median_graph_error = 0.0;
  int trials = 0;
  int failures = 0;

  bool operator==(const MetricRecord&) const = default;
};

/// Median; the mean of the central pair for even sizes. NaN when empty.
double median(std::vector<double> values);

/// Per-trial outcomes of a full sweep, indexed [sweep][trial].
using SweepOutcomes = std::vector<std::vector<std::vector<AlgorithmOutcome>>>;
SweepOutcomes run_sweep_trials(const ExperimentConfig& cfg);
std::vector<MetricRecord> aggregate(const ExperimentConfig& cfg, const SweepOutcomes& outcomes);

std::vector<MetricRecord> run_experiment(const ExperimentConfig& cfg);
std::vector<MetricRecord> run_test_case_1(const ExperimentConfig& cfg);
std::vector<MetricRecord> run_test_case_2(const ExperimentConfig& cfg);
std::vector<MetricRecord> run_test_case_3(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader =
    "algorithm,sweep_param,sweep_value,median_filter_error,median_graph_error,trials,failures";

void write_csv(const std::vector<MetricRecord>& records, std::ostream& os);
void write_csv(const std::vector<MetricRecord>& records, const std::string& path);
std::vector<MetricRecord> read_csv(std::istream& is);
std::vector<MetricRecord> read_csv(const std::string& path);

/// One "<dir>/<curve>_filter.dat" and "<dir>/<curve>_graph.dat" per curve, two
/// whitespace-separated columns (sweep value, median error).
void write_plot_data(const std::vector<MetricRecord>& records, const std::string& dir);

/// Command-line entry point. Returns the process exit code.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfi

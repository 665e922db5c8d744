#include "rfi/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "rfi/errors.hpp"
#include "rfi/filter.hpp"

namespace rfi {

namespace {

using nlohmann::json;

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const std::pair<E, const char*> (&table)[N], const char* what) {
  for (const auto& [value, name] : table) {
    if (s == name) return value;
  }
  std::string expected;
  for (const auto& [value, name] : table) expected += std::string(expected.empty() ? "" : ", ") + name;
  throw ParameterError(std::string("invalid ") + what + " '" + s + "' (expected one of: " +
                       expected + ")");
}

template <typename E, std::size_t N>
std::string enum_name(E v, const std::pair<E, const char*> (&table)[N]) {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::pair<TestCase, const char*> kTestCases[] = {
    {TestCase::kTc1, "tc1"}, {TestCase::kTc2, "tc2"}, {TestCase::kTc3, "tc3"},
    {TestCase::kCustom, "custom"}};
constexpr std::pair<Algorithm, const char*> kAlgorithms[] = {
    {Algorithm::kFi, "FI"},
    {Algorithm::kRfiIter, "RFI_ITER"},
    {Algorithm::kRfiDExact, "RFI_D_EXACT"},
    {Algorithm::kRfiDSample, "RFI_D_SAMPLE"},
    {Algorithm::kRfiR, "RFI_R"},
    {Algorithm::kTlsSem, "TLS_SEM"}};
constexpr std::pair<SweepParam, const char*> kSweepParams[] = {
    {SweepParam::kNoisePower, "noise_power"},
    {SweepParam::kSignals, "m"},
    {SweepParam::kPerturbation, "p_pert"}};
constexpr std::pair<GraphSource, const char*> kGraphSources[] = {
    {GraphSource::kErdosRenyi, "er"}, {GraphSource::kKarate, "karate"}};
constexpr std::pair<DataModel, const char*> kDataModels[] = {
    {DataModel::kFilter, "H"}, {DataModel::kSem, "SEM"}};

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config key '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw ParameterError(std::string(what) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ParameterError(std::string(what) + ": unknown key '" + key + "'");
    }
  }
}

void apply_perturbation(const json& j, PerturbationSpec& spec) {
  check_keys(j, {"p_create", "p_destroy", "weight_sampler"}, "perturbation");
  read_if(j, "p_create", spec.p_create);
  read_if(j, "p_destroy", spec.p_destroy);
  if (j.contains("weight_sampler")) {
    const json& w = j.at("weight_sampler");
    check_keys(w, {"rule", "value", "low", "high"}, "weight_sampler");
    if (w.contains("rule")) {
      const std::string rule = w.at("rule").get<std::string>();
      if (rule == "fixed") {
        spec.weight_sampler.rule = WeightSampler::Rule::kFixed;
      } else if (rule == "uniform") {
        spec.weight_sampler.rule = WeightSampler::Rule::kUniform;
      } else {
        throw ParameterError("weight_sampler.rule must be 'fixed' or 'uniform'");
      }
    }
    read_if(w, "value", spec.weight_sampler.value);
    read_if(w, "low", spec.weight_sampler.low);
    read_if(w, "high", spec.weight_sampler.high);
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Gso spectrally_normalized(const Gso& s) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.matrix());
  const double norm = svd.singularValues()(0);
  if (norm == 0.0) return s;
  return Gso(s.matrix() / norm, s.kind(), s.directed(), true);
}

}  // namespace

std::string to_string(TestCase v) { return enum_name(v, kTestCases); }
std::string to_string(Algorithm v) { return enum_name(v, kAlgorithms); }
std::string to_string(SweepParam v) { return enum_name(v, kSweepParams); }
std::string to_string(GraphSource v) { return enum_name(v, kGraphSources); }
std::string to_string(DataModel v) { return enum_name(v, kDataModels); }
TestCase parse_test_case(const std::string& s) { return parse_enum(s, kTestCases, "test case"); }
Algorithm parse_algorithm(const std::string& s) { return parse_enum(s, kAlgorithms, "algorithm"); }
SweepParam parse_sweep_param(const std::string& s) {
  return parse_enum(s, kSweepParams, "sweep parameter");
}
GraphSource parse_graph_source(const std::string& s) {
  return parse_enum(s, kGraphSources, "graph source");
}
DataModel parse_data_model(const std::string& s) { return parse_enum(s, kDataModels, "data model"); }

void ExperimentConfig::validate() const {
  if (n_graphs < 1) throw ParameterError("n_graphs must be >= 1");
  if (graph == GraphSource::kErdosRenyi && n < 2) throw ParameterError("n must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0, 1]");
  perturbation.validate();
  if (m < 1) throw ParameterError("m must be >= 1");
  if (k < 0) throw ParameterError("k must be >= 0");
  if (!(noise_power >= 0.0)) throw ParameterError("noise_power must be >= 0");
  if (sweep.empty()) throw ParameterError("sweep list must be non-empty");
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (!(sweep[i] > sweep[i - 1])) throw ParameterError("sweep list must be strictly increasing");
  }
  for (double v : sweep) {
    switch (sweep_param) {
      case SweepParam::kNoisePower:
        if (!(v >= 0.0)) throw ParameterError("noise sweep values must be >= 0");
        break;
      case SweepParam::kSignals:
        if (v < 1.0 || v != std::floor(v)) throw ParameterError("m sweep values must be integers >= 1");
        break;
      case SweepParam::kPerturbation:
        if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("perturbation sweep values must lie in [0, 1]");
        break;
    }
  }
  if (data_models.empty()) throw ParameterError("data_models must be non-empty");
  if (algorithms.empty()) throw ParameterError("algorithms must be non-empty");
  solver.validate();
  if (!constraints.zero_diagonal) throw ParameterError("constraints must zero the diagonal");
  if (!(trial_time_limit > 0.0)) throw ParameterError("trial_time_limit must be > 0");
  if (threads < 0) throw ParameterError("threads must be >= 0");
}

ExperimentConfig ExperimentConfig::preset(TestCase tc) {
  ExperimentConfig cfg;
  cfg.test_case = tc;
  cfg.constraints = GsoConstraintSet::symmetric_adjacency();
  cfg.constraints.nonnegative = true;
  switch (tc) {
    case TestCase::kTc1:
      cfg.sweep_param = SweepParam::kNoisePower;
      cfg.sweep = {0.0, 0.025, 0.05, 0.1, 0.2};
      cfg.algorithms = {Algorithm::kFi, Algorithm::kRfiIter, Algorithm::kRfiDExact,
                        Algorithm::kRfiDSample};
      cfg.solver.lambda = 0.0059;
      cfg.solver.beta = 0.0;
      cfg.solver.gamma_schedule = {0.266, 35300.0, 8240.0};
      cfg.solver.max_outer_iters = 18;
      cfg.solver.inner.max_iters = 3;
      break;
    case TestCase::kTc2:
      cfg.graph = GraphSource::kKarate;
      cfg.n = 34;
      cfg.sweep_param = SweepParam::kSignals;
      cfg.sweep = {10, 25, 50, 100, 200};
      cfg.algorithms = {Algorithm::kFi, Algorithm::kRfiIter, Algorithm::kRfiDSample,
                        Algorithm::kRfiR};
      cfg.solver.lambda = 0.04;
      cfg.solver.beta = 0.004;
      cfg.solver.gamma_schedule.cap = 1.2;
      break;
    case TestCase::kTc3:
      cfg.m = 200;
      cfg.sweep_param = SweepParam::kPerturbation;
      cfg.sweep = {0.05, 0.1, 0.15, 0.2, 0.3};
      cfg.data_models = {DataModel::kFilter, DataModel::kSem};
      cfg.algorithms = {Algorithm::kRfiDSample, Algorithm::kRfiR, Algorithm::kTlsSem};
      cfg.tls_sem.alpha = 10.0;
      cfg.tls_sem.model_weight = 3.0;
      break;
    case TestCase::kCustom:
      break;
  }
  return cfg;
}

void apply_json(const json& j, ExperimentConfig& cfg) {
  check_keys(j,
             {"test_case", "n_graphs", "graph", "n", "p", "perturbation", "m", "k", "noise_power",
              "sweep_param", "sweep", "data_models", "algorithms", "solver", "constraints",
              "tls_sem", "normalize_filter_gso", "seed", "trial_time_limit", "threads"},
             "experiment config");
  if (j.contains("test_case")) cfg.test_case = parse_test_case(j.at("test_case").get<std::string>());
  read_if(j, "n_graphs", cfg.n_graphs);
  if (j.contains("graph")) cfg.graph = parse_graph_source(j.at("graph").get<std::string>());
  read_if(j, "n", cfg.n);
  read_if(j, "p", cfg.p);
  if (j.contains("perturbation")) apply_perturbation(j.at("perturbation"), cfg.perturbation);
  read_if(j, "m", cfg.m);
  read_if(j, "k", cfg.k);
  read_if(j, "noise_power", cfg.noise_power);
  if (j.contains("sweep_param")) {
    cfg.sweep_param = parse_sweep_param(j.at("sweep_param").get<std::string>());
  }
  read_if(j, "sweep", cfg.sweep);
  if (j.contains("data_models")) {
    cfg.data_models.clear();
    for (const auto& v : j.at("data_models")) cfg.data_models.push_back(parse_data_model(v.get<std::string>()));
  }
  if (j.contains("algorithms")) {
    cfg.algorithms.clear();
    for (const auto& v : j.at("algorithms")) cfg.algorithms.push_back(parse_algorithm(v.get<std::string>()));
  }
  // Nested objects overlay their present keys onto the current values.
  if (j.contains("solver")) from_json(j.at("solver"), cfg.solver);
  if (j.contains("constraints")) from_json(j.at("constraints"), cfg.constraints);
  if (j.contains("tls_sem")) {
    const json& t = j.at("tls_sem");
    check_keys(t, {"alpha", "model_weight", "max_iters", "tol", "inner"}, "tls_sem");
    read_if(t, "alpha", cfg.tls_sem.alpha);
    read_if(t, "model_weight", cfg.tls_sem.model_weight);
    read_if(t, "max_iters", cfg.tls_sem.max_iters);
    read_if(t, "tol", cfg.tls_sem.tol);
    read_if(t, "inner", cfg.tls_sem.inner);
  }
  read_if(j, "normalize_filter_gso", cfg.normalize_filter_gso);
  read_if(j, "seed", cfg.seed);
  read_if(j, "trial_time_limit", cfg.trial_time_limit);
  read_if(j, "threads", cfg.threads);
  cfg.validate();
}

json to_json(const ExperimentConfig& cfg) {
  json algorithms = json::array();
  for (Algorithm a : cfg.algorithms) algorithms.push_back(to_string(a));
  json models = json::array();
  for (DataModel d : cfg.data_models) models.push_back(to_string(d));
  const WeightSampler& w = cfg.perturbation.weight_sampler;
  return json{
      {"test_case", to_string(cfg.test_case)},
      {"n_graphs", cfg.n_graphs},
      {"graph", to_string(cfg.graph)},
      {"n", cfg.n},
      {"p", cfg.p},
      {"perturbation",
       {{"p_create", cfg.perturbation.p_create},
        {"p_destroy", cfg.perturbation.p_destroy},
        {"weight_sampler",
         {{"rule", w.rule == WeightSampler::Rule::kFixed ? "fixed" : "uniform"},
          {"value", w.value},
          {"low", w.low},
          {"high", w.high}}}}},
      {"m", cfg.m},
      {"k", cfg.k},
      {"noise_power", cfg.noise_power},
      {"sweep_param", to_string(cfg.sweep_param)},
      {"sweep", cfg.sweep},
      {"data_models", models},
      {"algorithms", algorithms},
      {"solver", cfg.solver},
      {"constraints", cfg.constraints},
      {"tls_sem",
       {{"alpha", cfg.tls_sem.alpha},
        {"model_weight", cfg.tls_sem.model_weight},
        {"max_iters", cfg.tls_sem.max_iters},
        {"tol", cfg.tls_sem.tol},
        {"inner", cfg.tls_sem.inner}}},
      {"normalize_filter_gso", cfg.normalize_filter_gso},
      {"seed", cfg.seed},
      {"trial_time_limit", cfg.trial_time_limit},
      {"threads", cfg.threads}};
}

std::string curve_name(const ExperimentConfig& cfg, Algorithm alg, DataModel model) {
  std::string name = to_string(alg);
  if (cfg.data_models.size() > 1) name += "-" + to_string(model);
  return name;
}

std::uint64_t trial_seed(std::uint64_t master, int sweep_index, int trial_index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(sweep_index));
  return splitmix64(h ^ (static_cast<std::uint64_t>(trial_index) << 20));
}

std::vector<AlgorithmOutcome> run_trial(const ExperimentConfig& cfg, int trial_index,
                                        double sweep_value, Rng& rng) {
  (void)trial_index;
  int m = cfg.m;
  double noise_power = cfg.noise_power;
  PerturbationSpec perturbation = cfg.perturbation;
  switch (cfg.sweep_param) {
    case SweepParam::kNoisePower: noise_power = sweep_value; break;
    case SweepParam::kSignals: m = static_cast<int>(sweep_value); break;
    case SweepParam::kPerturbation:
      perturbation.p_create = sweep_value;
      perturbation.p_destroy = sweep_value;
      break;
  }

  const Gso s = cfg.graph == GraphSource::kKarate ? load_karate() : generate_er(cfg.n, cfg.p, rng);
  const FilterCoeffs coeffs = random_coeffs(cfg.k, true, rng);
  const Gso s_bar = perturb_links(s, perturbation, rng);
  const Eigen::MatrixXd x = generate_white_inputs(s.n(), m, rng);

  std::vector<AlgorithmOutcome> outcomes;
  for (DataModel model : cfg.data_models) {
    auto fail_all = [&](const std::string& why) {
      for (Algorithm alg : cfg.algorithms) {
        outcomes.push_back({curve_name(cfg, alg, model), false, 0.0, 0.0, why});
      }
    };
    Eigen::MatrixXd h_true;
    try {
      if (model == DataModel::kFilter) {
        h_true = build_filter(cfg.normalize_filter_gso ? spectrally_normalized(s) : s, coeffs).matrix;
      } else {
        h_true = sem_filter(s).matrix;
      }
    } catch (const std::exception& e) {
      fail_all(std::string("data generation: ") + e.what());
      continue;
    }
    const Eigen::MatrixXd clean = h_true * x;
    const SignalBatch batch(x, add_awgn(clean, noise_power, rng), noise_power);
    const double h_norm = h_true.norm();

    for (Algorithm alg : cfg.algorithms) {
      AlgorithmOutcome out;
      out.curve = curve_name(cfg, alg, model);
      try {
        Eigen::MatrixXd s_hat;
        Eigen::MatrixXd h_hat;
        switch (alg) {
          case Algorithm::kFi:
            h_hat = fi_baseline(s_bar, batch, cfg.solver.gamma_schedule.cap,
                                resolve_ridge(cfg.solver, batch))
                        .matrix;
            s_hat = s_bar.matrix();
            break;
          case Algorithm::kRfiIter: {
            RfiResult r = rfi_iter(s_bar, batch, cfg.constraints, cfg.solver);
            s_hat = r.s_hat.matrix();
            h_hat = r.h_hat.matrix;
            break;
          }
          case Algorithm::kRfiDExact: {
            const double noise_variance =
                noise_power * (h_true * h_true.transpose()).trace() / static_cast<double>(s.n());
            RfiResult r = rfi_d(s_bar, batch, cfg.constraints, cfg.solver,
                                output_covariance(h_true, noise_variance));
            s_hat = r.s_hat.matrix();
            h_hat = r.h_hat.matrix;
            break;
          }
          case Algorithm::kRfiDSample: {
            RfiResult r =
                rfi_d(s_bar, batch, cfg.constraints, cfg.solver, sample_covariance(batch.y));
            s_hat = r.s_hat.matrix();
            h_hat = r.h_hat.matrix;
            break;
          }
          case Algorithm::kRfiR: {
            RfiResult r =
                rfi_r(s_bar, batch, cfg.constraints, cfg.solver, sample_covariance(batch.y));
            s_hat = r.s_hat.matrix();
            h_hat = r.h_hat.matrix;
            break;
          }
          case Algorithm::kTlsSem: {
            RfiResult r = tls_sem_baseline(s_bar, batch, cfg.tls_sem);
            s_hat = r.s_hat.matrix();
            h_hat = r.h_hat.matrix;
            break;
          }
        }
        out.filter_error = (h_hat - h_true).norm() / h_norm;
        out.graph_error = graph_l1_error(s_hat, s.matrix());
        out.ok = std::isfinite(out.filter_error) && std::isfinite(out.graph_error);
        if (!out.ok) out.error = "non-finite error metric";
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      outcomes.push_back(std::move(out));
    }
  }
  return outcomes;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

SweepOutcomes run_sweep_trials(const ExperimentConfig& cfg) {
  cfg.validate();
  const int sweeps = static_cast<int>(cfg.sweep.size());
  const int trials = cfg.n_graphs;
  SweepOutcomes outcomes(sweeps, std::vector<std::vector<AlgorithmOutcome>>(trials));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int job = next++; job < sweeps * trials; job = next++) {
      const int sweep_index = job / trials;
      const int trial = job % trials;
      Rng rng(trial_seed(cfg.seed, sweep_index, trial));
      const auto start = std::chrono::steady_clock::now();
      auto result = run_trial(cfg, trial, cfg.sweep[sweep_index], rng);
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (elapsed > cfg.trial_time_limit) {
        for (auto& o : result) {
          o.ok = false;
          o.error = "trial exceeded the wall-clock limit";
        }
      }
      outcomes[sweep_index][trial] = std::move(result);
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, sweeps * trials);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return outcomes;
}

std::vector<MetricRecord> aggregate(const ExperimentConfig& cfg, const SweepOutcomes& outcomes) {
  // Group curves by algorithm so rows are ordered by algorithm, then sweep value.
  std::vector<std::string> ordered;
  for (Algorithm alg : cfg.algorithms) {
    for (DataModel model : cfg.data_models) ordered.push_back(curve_name(cfg, alg, model));
  }
  std::vector<MetricRecord> records;
  for (const std::string& curve : ordered) {
    for (std::size_t s = 0; s < cfg.sweep.size(); ++s) {
      std::vector<double> filter_errors;
      std::vector<double> graph_errors;
      int failures = 0;
      for (const auto& trial : outcomes[s]) {
        for (const auto& o : trial) {
          if (o.curve != curve) continue;
          if (o.ok) {
            filter_errors.push_back(o.filter_error);
            graph_errors.push_back(o.graph_error);
          } else {
            ++failures;
          }
        }
      }
      records.push_back({curve, to_string(cfg.sweep_param), cfg.sweep[s],
                         median(filter_errors), median(graph_errors),
                         static_cast<int>(filter_errors.size()), failures});
    }
  }
  return records;
}

std::vector<MetricRecord> run_experiment(const ExperimentConfig& cfg) {
  return aggregate(cfg, run_sweep_trials(cfg));
}

namespace {
std::vector<MetricRecord> run_checked(const ExperimentConfig& cfg, TestCase expected) {
  if (cfg.test_case != expected) {
    throw ParameterError("configuration is for test case '" + to_string(cfg.test_case) +
                         "', expected '" + to_string(expected) + "'");
  }
  return run_experiment(cfg);
}
}  // namespace

std::vector<MetricRecord> run_test_case_1(const ExperimentConfig& cfg) {
  return run_checked(cfg, TestCase::kTc1);
}
std::vector<MetricRecord> run_test_case_2(const ExperimentConfig& cfg) {
  return run_checked(cfg, TestCase::kTc2);
}
std::vector<MetricRecord> run_test_case_3(const ExperimentConfig& cfg) {
  return run_checked(cfg, TestCase::kTc3);
}

void write_csv(const std::vector<MetricRecord>& records, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.algorithm << ',' << r.sweep_param << ',' << format_double(r.sweep_value) << ','
       << format_double(r.median_filter_error) << ',' << format_double(r.median_graph_error) << ','
       << r.trials << ',' << r.failures << '\n';
  }
}

void write_csv(const std::vector<MetricRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<MetricRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw ParameterError("CSV: missing or unexpected header");
  }
  std::vector<MetricRecord> records;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw ParameterError("CSV: expected 7 fields in '" + line + "'");
    try {
      records.push_back({fields[0], fields[1], std::stod(fields[2]), std::stod(fields[3]),
                         std::stod(fields[4]), std::stoi(fields[5]), std::stoi(fields[6])});
    } catch (const std::logic_error&) {
      throw ParameterError("CSV: malformed number in '" + line + "'");
    }
  }
  return records;
}

std::vector<MetricRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_csv(in);
}

void write_plot_data(const std::vector<MetricRecord>& records, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
  std::map<std::string, std::vector<const MetricRecord*>> curves;
  for (const auto& r : records) curves[r.algorithm].push_back(&r);
  for (const auto& [name, rows] : curves) {
    for (const bool filter : {true, false}) {
      const std::string path =
          (std::filesystem::path(dir) / (name + (filter ? "_filter.dat" : "_graph.dat"))).string();
      std::ofstream out(path);
      if (!out) throw IoError("cannot open '" + path + "' for writing");
      for (const MetricRecord* r : rows) {
        out << format_double(r->sweep_value) << ' '
            << format_double(filter ? r->median_filter_error : r->median_graph_error) << '\n';
      }
    }
  }
}

}  // namespace rfi

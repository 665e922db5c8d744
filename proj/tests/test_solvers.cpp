#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "rfi/errors.hpp"
#include "rfi/solvers.hpp"

#include "oracles.hpp"

using namespace rfi;

namespace {

// Polynomial filter on S / ||S||_2, as the experiments draw them.
Eigen::MatrixXd random_filter(const Gso& s, int order, Rng& rng) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.matrix(), Eigen::EigenvaluesOnly);
  const double radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  const Gso scaled = Gso::adjacency(s.matrix() / (radius > 0.0 ? radius : 1.0), false, true);
  return build_filter(scaled, random_coeffs(order, true, rng)).matrix;
}

}  // namespace

TEST_CASE("objective_eval") {
  Gso zero = Gso::adjacency(Eigen::MatrixXd::Zero(3, 3));
  SignalBatch empty(Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(3, 2));
  RfiConfig cfg;
  CHECK(objective_eval(Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3), zero, empty, cfg,
                       5.0) == 0.0);

  Rng rng(1);
  Gso s = generate_er(8, 0.4, rng);
  Eigen::MatrixXd h = random_filter(s, 3, rng);
  Eigen::MatrixXd x = generate_white_inputs(8, 5, rng);
  SignalBatch clean(x, h * x);
  const double value = objective_eval(s.matrix(), h, s, clean, cfg, 10.0);
  CHECK(value == doctest::Approx(cfg.beta * s.matrix().cwiseAbs().sum()).epsilon(1e-9));

  cfg.lambda = 0.3;
  cfg.beta = 0.05;
  Eigen::MatrixXd s2 = oracle::random_matrix(8, 8, rng);
  Eigen::MatrixXd h2 = oracle::random_matrix(8, 8, rng);
  SignalBatch noisy(x, oracle::random_matrix(8, 5, rng));
  const double expected = oracle::joint_objective(s2, h2, s.matrix(), x, noisy.y, 0.3, 0.05, 2.0);
  CHECK(std::abs(objective_eval(s2, h2, s, noisy, cfg, 2.0) - expected) <= 1e-10 * expected);

  CHECK_THROWS_AS(objective_eval(Eigen::MatrixXd::Zero(4, 4), h, s, clean, cfg, 1.0),
                  ParameterError);
}

TEST_CASE("filter_id_step trivial cases") {
  Rng rng(2);
  Gso s = generate_er(10, 0.3, rng);
  Eigen::MatrixXd h = random_filter(s, 4, rng);
  Eigen::MatrixXd x = generate_white_inputs(10, 20, rng);
  SignalBatch batch(x, h * x);
  Eigen::MatrixXd est = filter_id_step(s.matrix(), batch, 0.0, 0.0).matrix;
  CHECK((est - h).norm() / h.norm() < 1e-8);

  Eigen::MatrixXd y = oracle::random_matrix(10, 10, rng);
  SignalBatch identity(Eigen::MatrixXd::Identity(10, 10), y);
  CHECK((filter_id_step(s.matrix(), identity, 0.0, 0.0).matrix - y).norm() < 1e-12 * y.norm());

  CHECK_THROWS_AS(filter_id_step(s.matrix(), batch, -1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(filter_id_step(Eigen::MatrixXd::Zero(3, 3), batch, 1.0, 0.0), ParameterError);

  // M < N with gamma = 0 leaves the system rank deficient.
  SignalBatch short_batch(generate_white_inputs(10, 3, rng), oracle::random_matrix(10, 3, rng));
  CHECK_THROWS_AS(filter_id_step(s.matrix(), short_batch, 0.0, 0.0), SingularityError);
  CHECK_NOTHROW(filter_id_step(s.matrix(), short_batch, 0.0, 1e-6));
}

TEST_CASE("filter_id_step matches an iterative oracle and the optimality condition") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 4;
    const int m = trial < 5 ? 2 : 1 + trial % 5;
    Eigen::MatrixXd s = oracle::random_matrix(n, n, rng);
    SignalBatch batch(oracle::random_matrix(n, m, rng), oracle::random_matrix(n, m, rng));
    const double gamma = 1.0;
    const double ridge = trial % 2 == 0 ? 0.0 : 1e-3;
    Eigen::MatrixXd est = filter_id_step(s, batch, gamma, ridge).matrix;
    Eigen::MatrixXd iterative = oracle::filter_step_cg(s, batch.x, batch.y, gamma, ridge);
    CHECK((est - iterative).norm() <= 1e-5 * iterative.norm());
    Eigen::MatrixXd grad = oracle::first_order_residual(est, s, batch.x, batch.y, gamma, ridge);
    CHECK(grad.norm() < 1e-6 * (1.0 + (batch.y * batch.x.transpose()).norm()));
  }
}

TEST_CASE("filter_id_step optimality on the experiment scale") {
  Rng rng(4);
  Gso s = generate_er(20, 0.25, rng);
  Eigen::MatrixXd h = random_filter(s, 4, rng);
  Eigen::MatrixXd x = generate_white_inputs(20, 10, rng);
  SignalBatch batch(x, add_awgn(h * x, 0.1, rng));
  for (double gamma : {0.0, 0.1, 10.0, 1000.0}) {
    const double ridge = default_ridge(batch);
    Eigen::MatrixXd est = filter_id_step(s.matrix(), batch, gamma, ridge).matrix;
    Eigen::MatrixXd grad = oracle::first_order_residual(est, s.matrix(), x, batch.y, gamma, ridge);
    CHECK(grad.norm() < 1e-6 * (1.0 + (batch.y * x.transpose()).norm()));
  }
}

TEST_CASE("fi_baseline") {
  Rng rng(5);
  std::vector<double> clean_err, perturbed_err;
  for (int t = 0; t < 50; ++t) {
    Gso s = generate_er(12, 0.3, rng);
    Eigen::MatrixXd h = random_filter(s, 4, rng);
    Gso s_bar = perturb_links(s, PerturbationSpec::symmetric(0.1), rng);
    Eigen::MatrixXd x = generate_white_inputs(12, 6, rng);
    SignalBatch batch(x, h * x);
    Eigen::MatrixXd a = fi_baseline(s, batch, 1e3, default_ridge(batch)).matrix;
    Eigen::MatrixXd b = fi_baseline(s_bar, batch, 1e3, default_ridge(batch)).matrix;
    clean_err.push_back((a - h).norm() / h.norm());
    perturbed_err.push_back((b - h).norm() / h.norm());
    // gamma ||[S, H]||^2 is at most the objective value, which H = 0 bounds by ||Y||^2.
    CHECK(commutation_residual(s_bar.matrix(), b) <= batch.y.norm() / std::sqrt(1e3));
  }
  CHECK(oracle::sorted_median(perturbed_err) > oracle::sorted_median(clean_err));

  Gso s = generate_er(10, 0.3, rng);
  Eigen::MatrixXd h = random_filter(s, 4, rng);
  Eigen::MatrixXd x = generate_white_inputs(10, 20, rng);
  SignalBatch batch(x, h * x);
  CHECK((fi_baseline(s, batch, 1e3, default_ridge(batch)).matrix - h).norm() / h.norm() < 1e-6);
}

TEST_CASE("prox_double_l1 closed forms") {
  auto soft = [](double v, double t) { return std::copysign(std::max(std::abs(v) - t, 0.0), v); };
  Rng rng(6);
  std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.01, 2.0);
  for (int t = 0; t < 200; ++t) {
    const double v = u(rng), step = pos(rng), lambda = pos(rng), beta = pos(rng), a = u(rng);
    CHECK(prox_double_l1(v, step, lambda, beta, 0.0) ==
          doctest::Approx(soft(v, step * (lambda + beta))));
    CHECK(prox_double_l1(v, step, lambda, 0.0, a) == doctest::Approx(a + soft(v - a, step * lambda)));
  }
}

TEST_CASE("prox_double_l1 matches a grid search and is non-expansive") {
  Rng rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.05, 1.5), w(0.0, 1.0);
  std::vector<double> vs, outs;
  const double step = 0.7, lambda = 0.4, beta = 0.15, anchor = 0.8;
  for (int t = 0; t < 1000; ++t) {
    const double v = u(rng), s = pos(rng), l = w(rng), b = w(rng), a = u(rng);
    const double grid = oracle::prox_grid_search(v, s, l, b, a, 1e-5);
    CHECK(std::abs(prox_double_l1(v, s, l, b, a) - grid) < 1e-4);
    vs.push_back(v);
    outs.push_back(prox_double_l1(v, step, lambda, beta, anchor));
  }
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i + 1; j < vs.size(); j += 7) {
      CHECK(std::abs(outs[i] - outs[j]) <= std::abs(vs[i] - vs[j]) + 1e-15);
    }
  }
}

TEST_CASE("graph_denoise_step trivial cases") {
  Rng rng(8);
  Gso s_bar = generate_er(10, 0.3, rng);
  Eigen::MatrixXd h = oracle::random_matrix(10, 10, rng);
  RfiConfig cfg;
  cfg.beta = 0.0;
  DenoiseResult same = graph_denoise_step(h, s_bar, {}, cfg, 0.0);
  CHECK(same.s_hat.matrix() == s_bar.matrix());
  CHECK(same.converged);

  cfg.beta = 1.0 + 2.0 * 4.0 * h.squaredNorm();
  cfg.lambda = 0.5;
  CHECK(graph_denoise_step(h, s_bar, {}, cfg, 1.0).s_hat.matrix().isZero(0.0));

  GsoConstraintSet keeps_diagonal{true, false, false, std::nullopt};
  CHECK_THROWS_AS(graph_denoise_step(h, s_bar, keeps_diagonal, cfg, 1.0), ParameterError);
  CHECK_THROWS_AS(graph_denoise_step(h, s_bar, {}, cfg, -1.0), ParameterError);
}

TEST_CASE("graph_denoise_step recovers a graph that commutes with the filter") {
  Rng rng(9);
  Gso s = generate_er(20, 0.25, rng);
  Eigen::MatrixXd h = random_filter(s, 4, rng);
  Gso s_bar = perturb_links(s, PerturbationSpec::symmetric(0.1), rng);
  RfiConfig cfg;
  cfg.lambda = 0.01;
  cfg.beta = 0.0;
  GsoConstraintSet c;
  c.nonnegative = true;
  DenoiseResult r = graph_denoise_step(h, s_bar, c, cfg, 1000.0);
  CHECK(r.converged);
  CHECK(graph_l1_error(r.s_hat, s) < 0.1 * graph_l1_error(s_bar, s));
  CHECK(satisfies_constraints(r.s_hat.matrix(), c));
}

TEST_CASE("graph_denoise_step is optimal on small instances") {
  Rng rng(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int instance = 0; instance < 3; ++instance) {
    Gso s = generate_er(4, 0.6, rng);
    Gso s_bar = perturb_links(s, PerturbationSpec::symmetric(0.3), rng);
    Eigen::MatrixXd h = random_filter(s, 2, rng) +
                        0.1 * oracle::random_matrix(4, 4, rng);
    Eigen::MatrixXd c_y = h * h.transpose();
    RfiConfig cfg;
    cfg.lambda = 0.2 + 0.3 * instance;
    cfg.beta = 0.05;
    cfg.stationarity_weight_y = 0.5;
    cfg.inner.tol = 1e-13;
    cfg.inner.max_iters = 200000;
    const double gamma = 1.5;
    GsoConstraintSet c;
    c.nonnegative = instance != 1;
    DenoiseOptions opts;
    opts.cov_y = Covariance(c_y);

    DenoiseResult r = graph_denoise_step(h, s_bar, c, cfg, gamma, opts);
    CHECK(satisfies_constraints(r.s_hat.matrix(), c));
    auto objective = [&](const Eigen::MatrixXd& x) {
      return oracle::denoise_objective(x, s_bar.matrix(), cfg.lambda, cfg.beta,
                                       {{h, gamma}, {c_y, cfg.stationarity_weight_y}});
    };
    const double value = objective(r.s_hat.matrix());
    CHECK(std::abs(denoise_objective(r.s_hat.matrix(), h, s_bar, cfg, gamma, opts) - value) <=
          1e-12 * value);

    const Eigen::MatrixXd cd = oracle::coordinate_descent(objective, s_bar.matrix(),
                                                          c.nonnegative, 1e-10);
    CHECK(value <= (1.0 + 1e-6) * objective(cd));

    int worse = 0;
    for (int t = 0; t < 100000; ++t) {
      Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 4);
      const double spread = t % 2 == 0 ? 1.5 : 0.05;
      for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
          double v = t % 2 == 0 ? spread * unit(rng) - (c.nonnegative ? 0.0 : 0.5)
                                : r.s_hat.matrix()(i, j) + spread * (2.0 * unit(rng) - 1.0);
          if (c.nonnegative) v = std::max(v, 0.0);
          x(i, j) = x(j, i) = v;
        }
      }
      if (objective(x) < value) ++worse;
    }
    CHECK(worse == 0);
  }
}

TEST_CASE("rfi_iter objective is monotone with gamma fixed") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    Gso s = generate_er(10, 0.3, rng);
    Eigen::MatrixXd h = random_filter(s, 3, rng);
    Gso s_bar = perturb_links(s, PerturbationSpec::symmetric(0.1), rng);
    Eigen::MatrixXd x = generate_white_inputs(10, 15, rng);
    SignalBatch batch(x, add_awgn(h * x, 0.1, rng));
    RfiConfig cfg;
    cfg.lambda = 0.05;
    cfg.beta = 0.005;
    cfg.ridge = 0.0;
    cfg.gamma_schedule = GammaSchedule::fixed(1.0 + t);
    cfg.max_outer_iters = 15;
    cfg.outer_tol = 1e-12;
    RfiResult r = rfi_iter(s_bar, batch, {}, cfg);
    const auto& f = r.objective_trajectory;
    REQUIRE(f.size() >= 2);
    for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] <= f[i - 1] + 1e-9 * std::abs(f[i - 1]));
  }
}

TEST_CASE("rfi_iter limiting schedules") {
  Rng rng(12);
  Gso s = generate_er(10, 0.3, rng);
  Eigen::MatrixXd h = random_filter(s, 4, rng);
  Gso s_bar = perturb_links(s, PerturbationSpec::symmetric(0.1), rng);
  Eigen::MatrixXd x = generate_white_inputs(10, 20, rng);
  SignalBatch batch(x, add_awgn(h * x, 0.05, rng));
  const double ridge = default_ridge(batch);

  SUBCASE("gamma = 0 decouples") {
    RfiConfig cfg;
    cfg.gamma_schedule = GammaSchedule::fixed(0.0);
    RfiResult r = rfi_iter(s_bar, batch, {}, cfg);
    CHECK(r.converged);
    CHECK(r.outer_iters <= 2);
    CHECK((r.h_hat.matrix - filter_id_step(s_bar.matrix(), batch, 0.0, ridge).matrix).norm() <
          1e-10 * r.h_hat.matrix.norm());
    CHECK(r.s_hat.matrix() == graph_denoise_step(h, s_bar, {}, cfg, 0.0).s_hat.matrix());
  }

  SUBCASE("very large gamma reproduces the non-robust filter") {
    RfiConfig cfg;
    cfg.gamma_schedule = GammaSchedule::fixed(1e6);
    RfiResult r = rfi_iter(s_bar, batch, {}, cfg);
    CHECK(r.converged);
    CHECK(r.outer_iters <= 2);
    Eigen::MatrixXd fi = fi_baseline(s_bar, batch, 1e6, ridge).matrix;
    CHECK((r.h_hat.matrix - fi).norm() < 1e-4 * fi.norm());
  }

  SUBCASE("clean instance is recovered") {
    SignalBatch clean(x, h * x);
    RfiConfig cfg;
    cfg.beta = 0.0;
    RfiResult r = rfi_iter(s, clean, {}, cfg);
    CHECK((r.h_hat.matrix - h).norm() / h.norm() < 1e-3);
  }
}

TEST_CASE("rfi_d") {
  Rng rng(13);
  SUBCASE("nothing to denoise with the exact covariance of an unperturbed graph") {
    Gso s = generate_er(12, 0.3, rng);
    Eigen::MatrixXd h = random_filter(s, 4, rng);
    Eigen::MatrixXd x = generate_white_inputs(12, 8, rng);
    SignalBatch batch(x, h * x);
    RfiConfig cfg;
    cfg.beta = 0.0;
    RfiResult r = rfi_d(s, batch, {}, cfg, output_covariance(h, 0.0));
    CHECK((r.s_hat.matrix() - s.matrix()).cwiseAbs().maxCoeff() < 1e-8);
    Eigen::MatrixXd fi = fi_baseline(s, batch, cfg.gamma_schedule.cap, default_ridge(batch)).matrix;
    CHECK((r.h_hat.matrix - fi).norm() < 1e-6 * fi.norm());
    CHECK(r.outer_iters == 1);
  }

  SUBCASE("exact covariance denoises and beats the sample covariance") {
    RfiConfig cfg;
    cfg.lambda = 0.01;
    cfg.beta = 0.001;
    cfg.gamma_schedule.cap = 1000.0;
    GsoConstraintSet c;
    c.nonnegative = true;
    std::vector<double> before, after, exact_err, sample_err;
    for (int t = 0; t < 50; ++t) {
      Gso s = generate_er(20, 0.25, rng);
      Eigen::MatrixXd h = random_filter(s, 4, rng);
      Gso s_bar = perturb_links(s, PerturbationSpec::symmetric(0.1), rng);
      Eigen::MatrixXd x = generate_white_inputs(20, 10, rng);
      SignalBatch batch(x, add_awgn(h * x, 0.1, rng));
      RfiResult exact = rfi_d(s_bar, batch, c, cfg, output_covariance(h, 0.0));
      RfiResult sample = rfi_d(s_bar, batch, c, cfg, sample_covariance(batch.y));
      before.push_back(graph_l1_error(s_bar, s));
      after.push_back(graph_l1_error(exact.s_hat, s));
      exact_err.push_back((exact.h_hat.matrix - h).norm() / h.norm());
      sample_err.push_back((sample.h_hat.matrix - h).norm() / h.norm());
    }
    CHECK(oracle::sorted_median(after) < oracle::sorted_median(before));
    CHECK(oracle::sorted_median(exact_err) <= oracle::sorted_median(sample_err));
  }
}

TEST_CASE("rfi_r") {
  Rng rng(14);
  Gso s = generate_er(10, 0.3, rng);
  Eigen::MatrixXd h = random_filter(s, 4, rng);
  Gso s_bar = perturb_links(s, PerturbationSpec::symmetric(0.1), rng);
  Eigen::MatrixXd x = generate_white_inputs(10, 40, rng);
  SignalBatch batch(x, add_awgn(h * x, 0.05, rng));
  RfiConfig cfg;

  SUBCASE("identity covariance reduces to least squares") {
    RfiResult r = rfi_r(s_bar, batch, {}, cfg, Covariance(Eigen::MatrixXd::Identity(10, 10)));
    Eigen::MatrixXd ls = filter_id_step(s_bar.matrix(), batch, 0.0, default_ridge(batch)).matrix;
    CHECK((r.h_hat.matrix - ls).norm() < 1e-8 * ls.norm());
  }

  SUBCASE("the two steps are independent") {
    Covariance c = sample_covariance(batch.y);
    RfiResult r = rfi_r(s_bar, batch, {}, cfg, c);
    const double gamma = cfg.gamma_schedule.cap;
    DenoiseResult s_first = graph_denoise_step(c.matrix(), s_bar, {}, cfg, gamma);
    GraphFilter h_second = filter_id_step(c.matrix(), batch, gamma, default_ridge(batch));
    CHECK((r.s_hat.matrix() - s_first.s_hat.matrix()).norm() <= 1e-10 * (1.0 + s_first.s_hat.matrix().norm()));
    CHECK((r.h_hat.matrix - h_second.matrix).norm() <= 1e-10 * h_second.matrix.norm());
  }

  SUBCASE("exact covariance and clean outputs recover the filter") {
    Gso g = generate_er(12, 0.3, rng);
    Eigen::MatrixXd f = random_filter(g, 4, rng);
    Gso g_bar = perturb_links(g, PerturbationSpec::symmetric(0.1), rng);
    Eigen::MatrixXd xs = generate_white_inputs(12, 30, rng);
    SignalBatch b(xs, f * xs);
    RfiResult r = rfi_r(g_bar, b, {}, cfg, output_covariance(f, 0.0));
    CHECK((r.h_hat.matrix - f).norm() < 1e-6 * f.norm());
  }
}

TEST_CASE("tls_sem_baseline") {
  Rng rng(15);
  SUBCASE("exact structural equations leave the graph alone") {
    Gso s = generate_er(10, 0.3, rng);
    Gso scaled = Gso::adjacency(0.2 * s.matrix(), false, true);
    Eigen::MatrixXd h = sem_filter(scaled).matrix;
    Eigen::MatrixXd x = generate_white_inputs(10, 30, rng);
    SignalBatch batch(x, h * x);
    RfiResult r = tls_sem_baseline(scaled, batch, {});
    CHECK((r.s_hat.matrix() - scaled.matrix()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((r.h_hat.matrix - h).norm() < 1e-8 * h.norm());
  }

  SUBCASE("identity chain") {
    Gso empty = Gso::adjacency(Eigen::MatrixXd::Zero(6, 6));
    Eigen::MatrixXd x = generate_white_inputs(6, 12, rng);
    RfiResult r = tls_sem_baseline(empty, SignalBatch(x, x), {});
    CHECK(r.s_hat.matrix().isZero(1e-12));
  }

  SUBCASE("undirected nonnegative graphs stay undirected and nonnegative") {
    Gso s = generate_er(12, 0.3, rng);
    // Binary graphs can have a unit eigenvalue; redraw until I - S is invertible.
    while ((Eigen::MatrixXd::Identity(12, 12) - s.matrix()).jacobiSvd().singularValues()(11) < 1e-6) {
      s = generate_er(12, 0.3, rng);
    }
    Gso s_bar = perturb_links(s, PerturbationSpec::symmetric(0.1), rng);
    Eigen::MatrixXd x = generate_white_inputs(12, 60, rng);
    SignalBatch batch(x, add_awgn(sem_filter(s).matrix * x, 0.1, rng));
    TlsSemConfig cfg;
    cfg.alpha = 10.0;
    cfg.model_weight = 3.0;
    RfiResult r = tls_sem_baseline(s_bar, batch, cfg);
    CHECK(satisfies_constraints(r.s_hat.matrix(), GsoConstraintSet{true, true, true, std::nullopt}));
    CHECK_FALSE(r.s_hat.directed());
  }

  SUBCASE("rejects a Laplacian") {
    Gso l = Gso::laplacian_of(generate_er(6, 0.5, rng));
    Eigen::MatrixXd x = generate_white_inputs(6, 12, rng);
    CHECK_THROWS_AS(tls_sem_baseline(l, SignalBatch(x, x), {}), ParameterError);
  }
}

TEST_CASE("write_report is valid JSON") {
  Rng rng(16);
  Gso s = generate_er(5, 0.5, rng);
  Eigen::MatrixXd x = generate_white_inputs(5, 8, rng);
  RfiConfig cfg;
  RfiResult r = rfi_iter(s, SignalBatch(x, x), {}, cfg);
  std::stringstream ss;
  write_report(ss, r);
  nlohmann::json j = nlohmann::json::parse(ss.str());
  CHECK(j.at("outer_iters").get<int>() == r.outer_iters);
  CHECK(j.at("s_hat").size() == 5);
  CHECK(j.at("objective_trajectory").size() == r.objective_trajectory.size());
}

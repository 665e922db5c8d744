#include "rfi/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rfi/errors.hpp"

namespace rfi {

namespace {

std::string dims(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

Gso::Gso(Eigen::MatrixXd entries, GsoKind kind, bool directed, bool weighted)
    : entries_(std::move(entries)), kind_(kind), directed_(directed), weighted_(weighted) {
  validate();
}

Gso Gso::adjacency(Eigen::MatrixXd a, bool directed, bool weighted) {
  return Gso(std::move(a), GsoKind::kAdjacency, directed, weighted);
}

Gso Gso::laplacian_of(const Gso& adjacency) {
  if (adjacency.kind() != GsoKind::kAdjacency) {
    throw ParameterError("laplacian_of expects an adjacency GSO");
  }
  const Eigen::MatrixXd& a = adjacency.matrix();
  Eigen::MatrixXd l = -a;
  l.diagonal() = a.rowwise().sum();
  return Gso(std::move(l), GsoKind::kLaplacian, adjacency.directed(), adjacency.weighted());
}

Gso Gso::underlying_adjacency() const {
  if (kind_ == GsoKind::kAdjacency) return *this;
  Eigen::MatrixXd a = -entries_;
  a.diagonal().setZero();
  return Gso(std::move(a), GsoKind::kAdjacency, directed_, weighted_);
}

int Gso::edge_count() const {
  const int size = n();
  int count = 0;
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) {
      if (i != j && entries_(i, j) != 0.0) ++count;
    }
  }
  return directed_ ? count : count / 2;
}

void Gso::validate() const {
  if (entries_.rows() != entries_.cols()) {
    throw ParameterError("GSO must be square, got " + dims(entries_));
  }
  if (entries_.rows() < 2) throw ParameterError("GSO needs at least 2 nodes");
  if (!entries_.allFinite()) throw ParameterError("GSO has non-finite entries");
  const int size = n();
  if (!directed_ && entries_ != entries_.transpose()) {
    throw ParameterError("undirected GSO must be symmetric");
  }
  if (kind_ == GsoKind::kAdjacency) {
    for (int i = 0; i < size; ++i) {
      if (entries_(i, i) != 0.0) throw ParameterError("adjacency GSO must have a zero diagonal");
    }
    if (!weighted_) {
      for (int j = 0; j < size; ++j) {
        for (int i = 0; i < size; ++i) {
          const double v = entries_(i, j);
          if (i != j && v != 0.0 && v != 1.0) {
            throw ParameterError("unweighted adjacency GSO must have entries in {0, 1}");
          }
        }
      }
    }
  } else {
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    for (int i = 0; i < size; ++i) {
      if (std::abs(entries_.row(i).sum()) > 1e-12 * size * scale) {
        throw ParameterError("Laplacian GSO rows must sum to zero");
      }
      for (int j = 0; j < size; ++j) {
        if (i != j && entries_(i, j) > 0.0) {
          throw ParameterError("Laplacian GSO off-diagonal entries must be <= 0");
        }
      }
    }
  }
}

double WeightSampler::draw(Rng& rng) const {
  if (rule == Rule::kFixed) return value;
  std::uniform_real_distribution<double> dist(low, high);
  return dist(rng);
}

void PerturbationSpec::validate() const {
  require_probability(p_create, "p_create");
  require_probability(p_destroy, "p_destroy");
  if (weight_sampler.rule == WeightSampler::Rule::kUniform &&
      !(weight_sampler.low <= weight_sampler.high)) {
    throw ParameterError("uniform weight sampler needs low <= high");
  }
}

Gso generate_er(int n, double p, Rng& rng) {
  if (n < 2) throw ParameterError("generate_er needs n >= 2");
  require_probability(p, "edge probability");
  std::bernoulli_distribution edge(p);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (edge(rng)) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
    }
  }
  return Gso::adjacency(std::move(a));
}

Gso perturb_links(const Gso& s, const PerturbationSpec& spec, Rng& rng) {
  spec.validate();
  if (s.kind() == GsoKind::kLaplacian) {
    return Gso::laplacian_of(perturb_links(s.underlying_adjacency(), spec, rng));
  }
  const int n = s.n();
  Eigen::MatrixXd a = s.matrix();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto flip = [&](int i, int j) {
    // One uniform draw per link keeps the stream layout independent of the graph.
    const double u = unit(rng);
    if (a(i, j) != 0.0) {
      if (u < spec.p_destroy) a(i, j) = 0.0;
    } else if (u < spec.p_create) {
      a(i, j) = s.weighted() ? spec.weight_sampler.draw(rng) : 1.0;
    }
  };
  for (int i = 0; i < n; ++i) {
    for (int j = s.directed() ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      flip(i, j);
      if (!s.directed()) a(j, i) = a(i, j);
    }
  }
  return Gso::adjacency(std::move(a), s.directed(), s.weighted());
}

Gso load_karate() {
  std::istringstream in{std::string(karate_edge_list())};
  std::vector<std::pair<int, int>> edges;
  int u = 0;
  int v = 0;
  int n = 0;
  while (in >> u >> v) {
    edges.emplace_back(u, v);
    n = std::max({n, u + 1, v + 1});
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : edges) {
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return Gso::adjacency(std::move(a));
}

Eigen::MatrixXd project_onto_constraints(const Eigen::MatrixXd& m, const GsoConstraintSet& c) {
  if (m.rows() != m.cols()) throw ParameterError("projection needs a square matrix");
  Eigen::MatrixXd out = c.symmetric ? Eigen::MatrixXd(0.5 * (m + m.transpose())) : m;
  if (c.nonnegative) out = out.cwiseMax(0.0);
  if (c.entry_upper_bound) out = out.cwiseMin(*c.entry_upper_bound);
  if (c.zero_diagonal) out.diagonal().setZero();
  return out;
}

bool satisfies_constraints(const Eigen::MatrixXd& m, const GsoConstraintSet& c) {
  if (m.rows() != m.cols()) return false;
  if (c.symmetric && m != m.transpose()) return false;
  if (c.zero_diagonal && !m.diagonal().isZero(0.0)) return false;
  if (c.nonnegative && m.minCoeff() < 0.0) return false;
  if (c.entry_upper_bound && m.maxCoeff() > *c.entry_upper_bound) return false;
  return true;
}

double graph_l1_error(const Eigen::MatrixXd& s_hat, const Eigen::MatrixXd& s_true) {
  if (s_hat.rows() != s_true.rows() || s_hat.cols() != s_true.cols() ||
      s_hat.rows() != s_hat.cols() || s_hat.rows() < 2) {
    throw ParameterError("graph_l1_error dimension mismatch: " + dims(s_hat) + " vs " +
                         dims(s_true));
  }
  const double n = static_cast<double>(s_hat.rows());
  return (s_hat - s_true).cwiseAbs().sum() / (n * (n - 1.0));
}

double graph_l1_error(const Gso& s_hat, const Gso& s_true) {
  return graph_l1_error(s_hat.matrix(), s_true.matrix());
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << m.rows() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ' ';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

Eigen::MatrixXd read_matrix(std::istream& is) {
  std::string line;
  long rows = -1;
  while (std::getline(is, line)) {
    std::istringstream header(line);
    if (header >> rows) break;
  }
  if (rows < 1) throw ParameterError("matrix text: missing or invalid row count");
  std::vector<std::vector<double>> data;
  while (static_cast<long>(data.size()) < rows && std::getline(is, line)) {
    std::istringstream row(line);
    std::vector<double> values;
    double v = 0.0;
    while (row >> v) values.push_back(v);
    if (!row.eof()) throw ParameterError("matrix text: non-numeric entry in row " +
                                         std::to_string(data.size()));
    if (values.empty()) continue;
    if (!data.empty() && values.size() != data.front().size()) {
      throw ParameterError("matrix text: ragged rows");
    }
    data.push_back(std::move(values));
  }
  if (static_cast<long>(data.size()) != rows) {
    throw ParameterError("matrix text: expected " + std::to_string(rows) + " rows, got " +
                         std::to_string(data.size()));
  }
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(data.front().size()));
  for (long i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < data[i].size(); ++j) m(i, static_cast<Eigen::Index>(j)) = data[i][j];
  }
  return m;
}

void write_gso(std::ostream& os, const Gso& s) { write_matrix(os, s.matrix()); }

Gso read_adjacency(std::istream& is) {
  Eigen::MatrixXd a = read_matrix(is);
  if (a.rows() != a.cols()) throw ParameterError("GSO text must be square, got " + dims(a));
  const bool directed = a != a.transpose();
  const bool weighted = ((a.array() != 0.0) && (a.array() != 1.0)).any();
  return Gso::adjacency(std::move(a), directed, weighted);
}

}  // namespace rfi

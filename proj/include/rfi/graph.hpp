#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace rfi {

/// Seeded random source passed explicitly to every generator.
using Rng = std::mt19937_64;

enum class GsoKind { kAdjacency, kLaplacian };

/// A graph-shift operator: a square matrix whose sparsity follows the graph.
///
/// Construction validates the structural invariants:
///  - adjacency GSOs have an exactly zero diagonal,
///  - Laplacian GSOs have zero row sums and non-positive off-diagonal entries,
///  - undirected GSOs are exactly symmetric,
///  - unweighted adjacency GSOs have off-diagonal entries in {0, 1}.
/// Instances are immutable after construction.
class Gso {
 public:
  Gso(Eigen::MatrixXd entries, GsoKind kind, bool directed, bool weighted);

  static Gso adjacency(Eigen::MatrixXd a, bool directed = false, bool weighted = false);
  /// L = diag(A 1) - A for an adjacency GSO.
  static Gso laplacian_of(const Gso& adjacency);

  int n() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  GsoKind kind() const { return kind_; }
  bool directed() const { return directed_; }
  bool weighted() const { return weighted_; }

  /// The adjacency underlying this GSO (itself for adjacency kinds).
  Gso underlying_adjacency() const;

  /// Number of links: non-zero off-diagonal entries, unordered pairs when undirected.
  int edge_count() const;

 private:
  void validate() const;

  Eigen::MatrixXd entries_;
  GsoKind kind_;
  bool directed_;
  bool weighted_;
};

/// Admissible-set descriptor. Every combination describes a closed convex set.
struct GsoConstraintSet {
  bool symmetric = true;
  bool zero_diagonal = true;
  bool nonnegative = false;
  std::optional<double> entry_upper_bound;

  /// Symmetric adjacency matrices with no self-loops.
  static GsoConstraintSet symmetric_adjacency() { return {}; }
};

/// Analog value given to links created on weighted graphs.
struct WeightSampler {
  enum class Rule { kFixed, kUniform };
  Rule rule = Rule::kFixed;
  double value = 1.0;
  double low = 0.0;
  double high = 1.0;

  double draw(Rng& rng) const;
};

/// Independent Bernoulli link creation / destruction.
struct PerturbationSpec {
  double p_create = 0.0;
  double p_destroy = 0.0;
  WeightSampler weight_sampler;

  static PerturbationSpec symmetric(double p) { return {p, p, {}}; }
  void validate() const;
};

/// Undirected, unweighted Erdos-Renyi G(n, p) adjacency.
Gso generate_er(int n, double p, Rng& rng);

/// Flips links of `s` independently. Undirected graphs draw once per unordered pair
/// and mirror the outcome; self-loops are never touched. Laplacians are perturbed
/// through their adjacency and rebuilt.
Gso perturb_links(const Gso& s, const PerturbationSpec& spec, Rng& rng);

/// Embedded Zachary karate-club graph (34 nodes, 78 edges).
Gso load_karate();
std::string_view karate_edge_list();

/// Euclidean projection onto the admissible set.
Eigen::MatrixXd project_onto_constraints(const Eigen::MatrixXd& m, const GsoConstraintSet& c);

/// True when `m` satisfies every constraint of `c` exactly.
bool satisfies_constraints(const Eigen::MatrixXd& m, const GsoConstraintSet& c);

/// ||s_hat - s_true||_1 / (n (n - 1)).
double graph_l1_error(const Gso& s_hat, const Gso& s_true);
double graph_l1_error(const Eigen::MatrixXd& s_hat, const Eigen::MatrixXd& s_true);

// Dense text format: first line "n", then n whitespace-separated rows.
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& is);

void write_gso(std::ostream& os, const Gso& s);
/// Reads an adjacency GSO; directedness and weightedness are inferred from the entries.
Gso read_adjacency(std::istream& is);

}  // namespace rfi

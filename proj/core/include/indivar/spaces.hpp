#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "indivar/errors.hpp"

namespace indivar {

class CounterRng;

/// Undirected simple finite weighted graph.
struct Graph {
  struct Edge {
    int k;
    int l;
    double weight;
  };

  int n_vertices = 0;
  std::vector<Edge> edges;  // normalized to k < l, unique pairs

  static Graph from_edges(int n_vertices, std::vector<Edge> edges);
  /// Plain-text edge list: vertex count on the first line, then one edge per
  /// line `k l weight` (0-indexed); `#` starts a comment.
  static Graph parse(std::istream& in);
  static Graph load(const std::string& path);

  bool unweighted() const;  // all weights equal to 1
  std::vector<std::vector<std::pair<int, double>>> adjacency() const;
};

/// Dense symmetric matrix stored as the lower triangle, so symmetry holds by
/// representation.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(int n) : n_(n), tri_(n * (n + 1) / 2, 0.0) {}

  int size() const { return n_; }
  double operator()(int k, int l) const { return tri_[index(k, l)]; }
  void set(int k, int l, double v) { tri_[index(k, l)] = v; }

  Eigen::MatrixXd dense() const;
  static SymmetricMatrix from_dense(const Eigen::MatrixXd& m);

 private:
  std::size_t index(int k, int l) const {
    if (k < l) std::swap(k, l);
    return static_cast<std::size_t>(k) * (k + 1) / 2 + l;
  }
  int n_ = 0;
  std::vector<double> tri_;
};

enum class SpaceKind { euclidean, sphere, graph };

/// A point-hosting space: Euclidean space, sphere, or finite weighted graph.
class SpaceRef {
 public:
  static SpaceRef euclidean(int dim);
  static SpaceRef sphere(int dim, double radius);
  static SpaceRef graph(std::shared_ptr<const Graph> g,
                        std::string graph_id = "graph");

  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double radius() const { return radius_; }
  const Graph& graph() const;
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }
  /// Embedding dimension of point coordinates (N for Euclidean, N+1 for the
  /// N-sphere).
  int coord_size() const;
  std::string describe() const;

 private:
  SpaceRef(SpaceKind k, int dim, double radius,
           std::shared_ptr<const Graph> g, std::string id)
      : kind_(k), dim_(dim), radius_(radius), graph_(std::move(g)),
        graph_id_(std::move(id)) {}

  SpaceKind kind_;
  int dim_;
  double radius_;
  std::shared_ptr<const Graph> graph_;
  std::string graph_id_;
};

/// A point of a space: embedding coordinates, or a vertex index for graphs.
struct Point {
  std::vector<double> coords;
  int vertex = -1;

  static Point at(std::vector<double> c) { return Point{std::move(c), -1}; }
  static Point of_vertex(int v) { return Point{{}, v}; }
};

/// Distance in the space: Euclidean, great-circle, or shortest-path weight
/// sum (+infinity between disconnected vertices).
double distance(const SpaceRef& space, const Point& x, const Point& y);

/// All-pairs shortest-path distances of a graph (Dijkstra per source).
SymmetricMatrix shortest_path_matrix(const Graph& g);

/// Resistance distances from the Moore-Penrose pseudoinverse of the weighted
/// Laplacian. Throws input_error on disconnected graphs.
SymmetricMatrix resistance_distance_matrix(const Graph& g);

/// Communicability distances d(k,l) = sqrt(G_kk + G_ll - 2 G_kl) with
/// G = exp(adjacency), computed by symmetric eigendecomposition. The graph
/// must be unweighted and connected.
SymmetricMatrix communicability_distance_matrix(const Graph& g);

struct SphereMatrixDiagnostics {
  bool valid = false;
  std::vector<double> eigenvalues;  // of r^2 cos(D/r), descending
  int rank = 0;
  std::string reason;
};

/// Checks whether D can be the geodesic distance matrix of points on the
/// N-sphere of radius r: r^2 cos(D/r) must be positive semidefinite with
/// rank at most N+1.
SphereMatrixDiagnostics validate_sphere_distance_matrix(
    const SymmetricMatrix& D, int N, double r);

/// Seeded point sampling used by the CLI and the test harnesses. Euclidean
/// points are uniform in [0, box]^dim, sphere points uniform on the sphere,
/// graph points uniform over vertices.
std::vector<Point> random_points(const SpaceRef& space, int count, double box,
                                 CounterRng& rng);

}  // namespace indivar

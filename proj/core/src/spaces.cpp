#include "indivar/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "indivar/rng.hpp"

namespace indivar {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Graph Graph::from_edges(int n_vertices, std::vector<Edge> edges) {
  if (n_vertices <= 0) throw input_error("graph needs a positive vertex count");
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges) {
    if (e.k == e.l) throw input_error("graph has a self-loop");
    if (e.k > e.l) std::swap(e.k, e.l);
    if (e.k < 0 || e.l >= n_vertices)
      throw input_error("edge endpoint out of range");
    if (!(e.weight > 0)) throw input_error("edge weight must be positive");
    if (!seen.insert({e.k, e.l}).second)
      throw input_error("duplicate edge between a vertex pair");
  }
  Graph g;
  g.n_vertices = n_vertices;
  g.edges = std::move(edges);
  return g;
}

Graph Graph::parse(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    if (n < 0) {
      if (ls >> n) continue;
      continue;  // blank/comment before the count line
    }
    Edge e;
    if (ls >> e.k >> e.l >> e.weight) {
      edges.push_back(e);
    } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
      throw input_error("graph file: malformed edge at line " +
                        std::to_string(line_no));
    }
  }
  if (n < 0) throw input_error("graph file: missing vertex count line");
  return from_edges(n, std::move(edges));
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open graph file: " + path);
  return parse(in);
}

bool Graph::unweighted() const {
  return std::all_of(edges.begin(), edges.end(),
                     [](const Edge& e) { return e.weight == 1.0; });
}

std::vector<std::vector<std::pair<int, double>>> Graph::adjacency() const {
  std::vector<std::vector<std::pair<int, double>>> adj(n_vertices);
  for (const auto& e : edges) {
    adj[e.k].push_back({e.l, e.weight});
    adj[e.l].push_back({e.k, e.weight});
  }
  return adj;
}

Eigen::MatrixXd SymmetricMatrix::dense() const {
  Eigen::MatrixXd m(n_, n_);
  for (int k = 0; k < n_; ++k)
    for (int l = 0; l <= k; ++l) m(k, l) = m(l, k) = (*this)(k, l);
  return m;
}

SymmetricMatrix SymmetricMatrix::from_dense(const Eigen::MatrixXd& m) {
  SymmetricMatrix s(static_cast<int>(m.rows()));
  for (int k = 0; k < m.rows(); ++k)
    for (int l = 0; l <= k; ++l) s.set(k, l, m(k, l));
  return s;
}

SpaceRef SpaceRef::euclidean(int dim) {
  if (dim < 1) throw input_error("Euclidean dimension must be >= 1");
  return SpaceRef(SpaceKind::euclidean, dim, 0.0, nullptr, "");
}

SpaceRef SpaceRef::sphere(int dim, double radius) {
  if (dim < 1) throw input_error("sphere dimension must be >= 1");
  if (!(radius > 0)) throw input_error("sphere radius must be positive");
  return SpaceRef(SpaceKind::sphere, dim, radius, nullptr, "");
}

SpaceRef SpaceRef::graph(std::shared_ptr<const Graph> g, std::string id) {
  if (!g) throw input_error("null graph");
  const int n = g->n_vertices;
  return SpaceRef(SpaceKind::graph, n, 0.0, std::move(g), std::move(id));
}

const Graph& SpaceRef::graph() const {
  if (!graph_) throw input_error("space is not a graph");
  return *graph_;
}

int SpaceRef::coord_size() const {
  switch (kind_) {
    case SpaceKind::euclidean:
      return dim_;
    case SpaceKind::sphere:
      return dim_ + 1;
    case SpaceKind::graph:
      return 0;
  }
  return 0;
}

std::string SpaceRef::describe() const {
  switch (kind_) {
    case SpaceKind::euclidean:
      return "euclidean:" + std::to_string(dim_);
    case SpaceKind::sphere: {
      std::ostringstream os;
      os << "sphere:" << dim_ << ":" << radius_;
      return os.str();
    }
    case SpaceKind::graph:
      return "graph:" + graph_id_;
  }
  return "?";
}

namespace {

double euclidean_distance(const Point& x, const Point& y, int dim) {
  if (static_cast<int>(x.coords.size()) != dim ||
      static_cast<int>(y.coords.size()) != dim)
    throw input_error("point dimension does not match the space");
  double s = 0;
  for (int i = 0; i < dim; ++i) {
    const double d = x.coords[i] - y.coords[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void require_on_sphere(const Point& p, int coord_size, double r) {
  if (static_cast<int>(p.coords.size()) != coord_size)
    throw input_error("sphere point must have N+1 embedding coordinates");
  double s = 0;
  for (double c : p.coords) s += c * c;
  const double norm = std::sqrt(s);
  if (std::abs(norm - r) > 1e-9 * r)
    throw input_error("point is not on the sphere (|x| != r)");
}

double great_circle_distance(const Point& x, const Point& y, int coord_size,
                             double r) {
  require_on_sphere(x, coord_size, r);
  require_on_sphere(y, coord_size, r);
  double dot = 0;
  for (int i = 0; i < coord_size; ++i) dot += x.coords[i] * y.coords[i];
  double c = dot / (r * r);
  if (c > 1.0 || c < -1.0) {
    if (c > 1.0 + 1e-12 || c < -1.0 - 1e-12)
      throw input_error("cosine of great-circle angle outside [-1,1]");
    c = std::clamp(c, -1.0, 1.0);
  }
  return r * std::acos(c);
}

double dijkstra_distance(const Graph& g, int source, int target) {
  if (source < 0 || source >= g.n_vertices || target < 0 ||
      target >= g.n_vertices)
    throw input_error("vertex index out of range");
  if (source == target) return 0.0;
  const auto adj = g.adjacency();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.n_vertices, inf);
  dist[source] = 0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (v == target) return d;
    for (auto [w, wt] : adj[v]) {
      if (d + wt < dist[w]) {
        dist[w] = d + wt;
        pq.push({dist[w], w});
      }
    }
  }
  return inf;  // no connecting path
}

}  // namespace

double distance(const SpaceRef& space, const Point& x, const Point& y) {
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return euclidean_distance(x, y, space.dim());
    case SpaceKind::sphere:
      return great_circle_distance(x, y, space.coord_size(), space.radius());
    case SpaceKind::graph:
      return dijkstra_distance(space.graph(), x.vertex, y.vertex);
  }
  throw input_error("unknown space kind");
}

SymmetricMatrix shortest_path_matrix(const Graph& g) {
  const int n = g.n_vertices;
  const auto adj = g.adjacency();
  const double inf = std::numeric_limits<double>::infinity();
  SymmetricMatrix out(n);
  for (int s = 0; s < n; ++s) {
    std::vector<double> dist(n, inf);
    dist[s] = 0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0.0, s});
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v]) continue;
      for (auto [w, wt] : adj[v])
        if (d + wt < dist[w]) {
          dist[w] = d + wt;
          pq.push({dist[w], w});
        }
    }
    for (int t = 0; t <= s; ++t) out.set(s, t, dist[t]);
  }
  return out;
}

SymmetricMatrix resistance_distance_matrix(const Graph& g) {
  const int n = g.n_vertices;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges) {
    lap(e.k, e.k) += e.weight;
    lap(e.l, e.l) += e.weight;
    lap(e.k, e.l) -= e.weight;
    lap(e.l, e.k) -= e.weight;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  const double cutoff = 1e-12 * vals(n - 1);
  int null_dim = 0;
  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (vals(i) <= cutoff) {
      ++null_dim;
      continue;
    }
    pinv += vecs.col(i) * vecs.col(i).transpose() / vals(i);
  }
  if (null_dim != 1)
    throw input_error("resistance distance requires a connected graph");
  SymmetricMatrix out(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < k; ++l)
      out.set(k, l, pinv(k, k) + pinv(l, l) - 2 * pinv(k, l));
  return out;
}

SymmetricMatrix communicability_distance_matrix(const Graph& g) {
  if (!g.unweighted())
    throw input_error("communicability distance is defined for unweighted graphs");
  const int n = g.n_vertices;
  {  // connectivity via shortest paths
    const auto sp = shortest_path_matrix(g);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < k; ++l)
        if (!std::isfinite(sp(k, l)))
          throw input_error("communicability distance requires a connected graph");
  }
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges) adj(e.k, e.l) = adj(e.l, e.k) = 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adj);
  Eigen::VectorXd expvals = es.eigenvalues().array().exp();
  Eigen::MatrixXd comm =
      es.eigenvectors() * expvals.asDiagonal() * es.eigenvectors().transpose();
  SymmetricMatrix out(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < k; ++l) {
      const double sq = comm(k, k) + comm(l, l) - 2 * comm(k, l);
      out.set(k, l, std::sqrt(std::max(0.0, sq)));
    }
  return out;
}

SphereMatrixDiagnostics validate_sphere_distance_matrix(
    const SymmetricMatrix& D, int N, double r) {
  if (N < 1) throw input_error("sphere dimension must be >= 1");
  if (!(r > 0)) throw input_error("sphere radius must be positive");
  const int n = D.size();
  Eigen::MatrixXd cosm(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l <= k; ++l) {
      const double d = D(k, l);
      if (d < 0 || d > kPi * r + 1e-12)
        throw input_error("distance entry outside [0, pi r]");
      cosm(k, l) = cosm(l, k) = r * r * std::cos(d / r);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cosm);
  SphereMatrixDiagnostics diag;
  diag.eigenvalues.assign(es.eigenvalues().data(),
                          es.eigenvalues().data() + n);
  std::reverse(diag.eigenvalues.begin(), diag.eigenvalues.end());
  double scale = 0;
  for (double v : diag.eigenvalues) scale = std::max(scale, std::abs(v));
  const double tol = 1e-9 * std::max(scale, 1e-300);
  diag.rank = 0;
  bool psd = true;
  for (double v : diag.eigenvalues) {
    if (v < -tol) psd = false;
    if (v > tol) ++diag.rank;
  }
  if (!psd) {
    diag.valid = false;
    diag.reason = "cosine matrix has a negative eigenvalue";
  } else if (diag.rank > N + 1) {
    diag.valid = false;
    diag.reason = "cosine matrix rank exceeds N+1";
  } else {
    diag.valid = true;
  }
  return diag;
}

std::vector<Point> random_points(const SpaceRef& space, int count, double box,
                                 CounterRng& rng) {
  std::vector<Point> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    switch (space.kind()) {
      case SpaceKind::euclidean: {
        std::vector<double> c(space.dim());
        for (auto& v : c) v = box * rng.next_double();
        pts.push_back(Point::at(std::move(c)));
        break;
      }
      case SpaceKind::sphere: {
        const int m = space.coord_size();
        std::vector<double> c(m);
        double norm = 0;
        do {
          norm = 0;
          for (auto& v : c) {
            v = rng.next_normal();
            norm += v * v;
          }
          norm = std::sqrt(norm);
        } while (norm < 1e-12);
        for (auto& v : c) v *= space.radius() / norm;
        pts.push_back(Point::at(std::move(c)));
        break;
      }
      case SpaceKind::graph:
        pts.push_back(Point::of_vertex(static_cast<int>(
            rng.next_below(static_cast<std::uint32_t>(space.graph().n_vertices)))));
        break;
    }
  }
  return pts;
}

}  // namespace indivar

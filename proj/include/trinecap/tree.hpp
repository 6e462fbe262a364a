#pragma once

// Measurement/refinement trees over a pure-state ensemble.
//
// Every node x carries a positive element E_x and unnormalized priors p_{x,i}
// (probability of reaching x with signal i). Measurement nodes split E_x
// among their children; refinement nodes keep E_x and split the priors, which
// models classical information arriving from other signals. The information
// gained at a measurement node is
//   I_x = p_x H(p_{x,.}/p_x) - sum_k p_{y_k} H(p_{y_k,.}/p_{y_k}),
// and refinement and leaf nodes contribute 0.

#include "trinecap/adaptive.hpp"
#include "trinecap/ensembles.hpp"
#include "trinecap/info.hpp"
#include "trinecap/optimize.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace trinecap {

enum class NodeKind { measurement, refinement, leaf };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::measurement: return "measurement";
    case NodeKind::refinement: return "refinement";
    case NodeKind::leaf: return "leaf";
  }
  return "unknown";
}

struct TreeNode {
  NodeKind kind = NodeKind::leaf;
  SymMatrix element = SymMatrix::identity(3);
  std::vector<double> priors;
  std::vector<TreeNode> children;

  double mass() const { return std::accumulate(priors.begin(), priors.end(), 0.0); }
};

/// Invariant violation, with the path of the failing node ("r", "r.1.0", ...).
class TreeError : public std::runtime_error {
 public:
  TreeError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct TreeTolerances {
  double element = 1e-9;     // sum of child elements vs parent
  double measurement_prior = 1e-9;
  double refinement_prior = 1e-12;
  double psd = -1e-10;       // eigenvalue floor
};

namespace detail {

inline void validate_node(const TreeNode& n, const Ensemble& e, const std::string& path, const TreeTolerances& tol) {
  if (n.element.dim() != e.dim()) throw TreeError(path, "element dimension differs from ensemble");
  if (n.priors.size() != e.size()) throw TreeError(path, "prior count differs from ensemble size");
  for (double p : n.priors) {
    if (!(p >= 0.0)) throw TreeError(path, "negative prior");
  }
  if (min_eigenvalue(n.element) < tol.psd) throw TreeError(path, "element is not positive semidefinite");
  switch (n.kind) {
    case NodeKind::leaf:
      if (!n.children.empty()) throw TreeError(path, "leaf has children");
      return;
    case NodeKind::measurement: {
      if (n.children.empty()) throw TreeError(path, "measurement node without children");
      SymMatrix sum = SymMatrix::zero(e.dim());
      for (const auto& c : n.children) sum += c.element;
      if (sum.max_abs_diff(n.element) > tol.element) {
        throw TreeError(path, "child elements do not sum to the parent element");
      }
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        for (std::size_t i = 0; i < e.size(); ++i) {
          const double parent_tr = n.element.expectation(e.state(i));
          const double child_tr = n.children[k].element.expectation(e.state(i));
          const double want = parent_tr > 0.0 ? n.priors[i] * child_tr / parent_tr : 0.0;
          if (std::abs(n.children[k].priors[i] - want) > tol.measurement_prior) {
            throw TreeError(path + "." + std::to_string(k),
                            "child prior p_{y," + std::to_string(i) + "} != p_{x,i} Tr(E_y rho_i)/Tr(E_x rho_i)");
          }
        }
      }
      break;
    }
    case NodeKind::refinement: {
      if (n.children.empty()) throw TreeError(path, "refinement node without children");
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        if (n.children[k].element.max_abs_diff(n.element) > tol.element) {
          throw TreeError(path + "." + std::to_string(k), "refinement child element differs from parent");
        }
      }
      for (std::size_t i = 0; i < e.size(); ++i) {
        double s = 0.0;
        for (const auto& c : n.children) s += c.priors[i];
        if (std::abs(s - n.priors[i]) > tol.refinement_prior) {
          throw TreeError(path, "refinement child priors do not sum to p_{x," + std::to_string(i) + "}");
        }
      }
      break;
    }
  }
  for (std::size_t k = 0; k < n.children.size(); ++k) {
    validate_node(n.children[k], e, path + "." + std::to_string(k), tol);
  }
}

/// p H(w / p) for unnormalized weights w with total p.
inline double scaled_entropy(const std::vector<double>& w) {
  const double p = std::accumulate(w.begin(), w.end(), 0.0);
  if (p <= 0.0) return 0.0;
  double h = 0.0;
  for (double x : w) h -= xlog2x(x / p);
  return p * h;
}

}  // namespace detail

/// Throws TreeError at the first violated invariant.
inline void validate_tree(const TreeNode& root, const Ensemble& e, const TreeTolerances& tol = {}) {
  if (root.element.max_abs_diff(SymMatrix::identity(e.dim())) > tol.element) {
    throw TreeError("r", "root element is not the identity");
  }
  if (std::abs(root.mass() - 1.0) > 1e-9) throw TreeError("r", "root priors do not sum to 1");
  detail::validate_node(root, e, "r", tol);
}

/// Information gained at this node alone (0 for refinement and leaf nodes).
inline double node_info_gain(const TreeNode& n) {
  if (n.kind != NodeKind::measurement) return 0.0;
  double g = detail::scaled_entropy(n.priors);
  for (const auto& c : n.children) g -= detail::scaled_entropy(c.priors);
  return g;
}

inline double node_info_gain(const TreeNode& n, const Ensemble& e, const std::string& path = "r") {
  detail::validate_node(n, e, path, {});
  return node_info_gain(n);
}

struct TreeEvaluation {
  double total_info = 0.0;  // bits
  std::vector<std::pair<std::string, double>> per_node;
};

/// Validates the tree, then sums the node gains.
inline TreeEvaluation evaluate_tree(const TreeNode& root, const Ensemble& e) {
  validate_tree(root, e);
  TreeEvaluation ev;
  auto walk = [&](auto&& self, const TreeNode& n, const std::string& path) -> void {
    const double g = node_info_gain(n);
    ev.per_node.emplace_back(path, g);
    ev.total_info += g;
    for (std::size_t k = 0; k < n.children.size(); ++k) self(self, n.children[k], path + "." + std::to_string(k));
  };
  walk(walk, root, "r");
  return ev;
}

// ---------------------------------------------------------------------------
// Builders

/// Children for a measurement of node x with the given elements; priors follow
/// p_{y,i} = p_{x,i} Tr(E_y rho_i) / Tr(E_x rho_i).
inline std::vector<TreeNode> measure_children(const TreeNode& x, const Ensemble& e,
                                              const std::vector<SymMatrix>& elements) {
  std::vector<TreeNode> out;
  for (const auto& el : elements) {
    TreeNode c;
    c.kind = NodeKind::leaf;
    c.element = el;
    c.priors.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double parent_tr = x.element.expectation(e.state(i));
      c.priors[i] = parent_tr > 0.0 ? std::max(0.0, x.priors[i] * el.expectation(e.state(i)) / parent_tr) : 0.0;
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// E^{1/2} |v><v| E^{1/2} for each v.
inline std::vector<SymMatrix> rank_one_split(const SymMatrix& e, const std::vector<StateVector>& basis) {
  const SymMatrix r = e.sqrt();
  std::vector<SymMatrix> out;
  for (const auto& v : basis) out.push_back(r.sandwich(SymMatrix::outer(v)));
  return out;
}

namespace detail {

/// Refinement of x by the pair label a of the code b = a + s: child a keeps
/// half of the mass of letters a and a+1.
inline void refine_by_pair(TreeNode& x) {
  x.kind = NodeKind::refinement;
  x.children.clear();
  for (int a = 0; a < 3; ++a) {
    TreeNode c;
    c.kind = NodeKind::leaf;
    c.element = x.element;
    c.priors.assign(3, 0.0);
    c.priors[static_cast<std::size_t>(a)] = 0.5 * x.priors[static_cast<std::size_t>(a)];
    c.priors[static_cast<std::size_t>((a + 1) % 3)] = 0.5 * x.priors[static_cast<std::size_t>((a + 1) % 3)];
    x.children.push_back(std::move(c));
  }
}

}  // namespace detail

/// Tree of the lift-or-project protocol on T(alpha) with uniform letters:
/// root lift-or-project; the projected branch is refined by the pair label
/// learned from other signals and then measured with the planar pair basis;
/// the lifted branch is measured with V(0) and then refined by the pair label.
inline TreeNode protocol_tree(double alpha, double gamma = kGamma2) {
  const Ensemble e = lifted_trines(alpha);
  const KrausSet lp = lift_or_project(alpha, gamma);
  TreeNode root;
  root.kind = NodeKind::measurement;
  root.element = SymMatrix::identity(3);
  root.priors.assign(3, 1.0 / 3.0);
  root.children = measure_children(root, e, {lp.effect(kProjectOutcome), lp.effect(kLiftOutcome)});

  TreeNode& flat = root.children[kProjectOutcome];
  detail::refine_by_pair(flat);
  for (int a = 0; a < 3; ++a) {
    TreeNode& m = flat.children[static_cast<std::size_t>(a)];
    m.kind = NodeKind::measurement;
    const auto pair = planar_pair_basis(a, 3);
    m.children = measure_children(m, e, rank_one_split(m.element, {pair[0], pair[1]}));
  }

  TreeNode& up = root.children[kLiftOutcome];
  up.kind = NodeKind::measurement;
  std::vector<StateVector> v;
  for (const auto& el : vn_basis(0.0)) v.push_back(el.vector);
  up.children = measure_children(up, e, rank_one_split(up.element, v));
  for (auto& c : up.children) detail::refine_by_pair(c);
  return root;
}

/// Tree of the first protocol: the four-outcome D-vector measurement at the
/// root, then for the planar outcome a pair refinement and the pair basis.
inline TreeNode simple_protocol_tree(double alpha) {
  const Ensemble e = lifted_trines(alpha);
  const KrausSet m = first_protocol_measurement(alpha);
  TreeNode root;
  root.kind = NodeKind::measurement;
  root.element = SymMatrix::identity(3);
  root.priors.assign(3, 1.0 / 3.0);
  std::vector<SymMatrix> els;
  for (std::size_t i = 0; i < m.size(); ++i) els.push_back(m.effect(i));
  root.children = measure_children(root, e, els);
  TreeNode& flat = root.children[3];
  detail::refine_by_pair(flat);
  for (int a = 0; a < 3; ++a) {
    TreeNode& c = flat.children[static_cast<std::size_t>(a)];
    c.kind = NodeKind::measurement;
    const auto pair = planar_pair_basis(a, 3);
    c.children = measure_children(c, e, rank_one_split(c.element, {pair[0], pair[1]}));
  }
  return root;
}

// ---------------------------------------------------------------------------
// Two-pure-state collapse

namespace detail {

/// Path (child indices) of a deepest refinement node, or nullopt.
inline std::optional<std::vector<std::size_t>> deepest_refinement(const TreeNode& root) {
  std::optional<std::vector<std::size_t>> best;
  std::vector<std::size_t> path;
  auto walk = [&](auto&& self, const TreeNode& n) -> void {
    if (n.kind == NodeKind::refinement && (!best || path.size() > best->size())) best = path;
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      path.push_back(k);
      self(self, n.children[k]);
      path.pop_back();
    }
  };
  walk(walk, root);
  return best;
}

/// Optimal measurement of node x for a two-state ensemble: a projective
/// measurement on the span of E^{1/2} v_i, plus the complement.
inline TreeNode optimal_two_state_node(const TreeNode& x, const Ensemble& e) {
  const int d = e.dim();
  const SymMatrix r = x.element.sqrt();
  std::array<Vec, 2> psi;
  for (std::size_t i = 0; i < 2; ++i) psi[i] = r.matrix() * e.state(i).coords();
  // Orthonormal pair spanning the effective states.
  Vec u1 = psi[0].norm() > 1e-14 ? Vec(psi[0].normalized()) : Vec(psi[1].normalized());
  Vec w = psi[1] - psi[1].dot(u1) * u1;
  if (w.norm() < 1e-12) {
    w = Vec::Zero(d);
    for (int k = 0; k < d && w.norm() < 0.5; ++k) {
      Vec t = Vec::Unit(d, k);
      t -= t.dot(u1) * u1;
      if (t.norm() > 1e-6) w = t;
    }
  }
  const Vec u2 = w.normalized();
  const double p0 = x.priors[0], p1 = x.priors[1];
  auto info = [&](double ang) {
    const Vec a = std::cos(ang) * u1 + std::sin(ang) * u2;
    const Vec b = -std::sin(ang) * u1 + std::cos(ang) * u2;
    std::vector<double> ya, yb;
    for (std::size_t i = 0; i < 2; ++i) {
      const double n2 = psi[i].squaredNorm();
      const double pi = i == 0 ? p0 : p1;
      ya.push_back(n2 > 0.0 ? pi * std::pow(a.dot(psi[i]), 2) / n2 : 0.0);
      yb.push_back(n2 > 0.0 ? pi * std::pow(b.dot(psi[i]), 2) / n2 : 0.0);
    }
    return scaled_entropy(x.priors) - scaled_entropy(ya) - scaled_entropy(yb);
  };
  const double ang = maximize_1d(info, 0.0, kPi / 2.0, 90).arg;
  const Vec a = std::cos(ang) * u1 + std::sin(ang) * u2;
  const Vec b = -std::sin(ang) * u1 + std::cos(ang) * u2;
  std::vector<SymMatrix> els{r.sandwich(SymMatrix::outer(a)), r.sandwich(SymMatrix::outer(b))};
  if (d == 3) {
    const Vec c = Vec{{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
    els.push_back(r.sandwich(SymMatrix::outer(c)));
  }
  TreeNode m;
  m.kind = NodeKind::measurement;
  m.element = x.element;
  m.priors = x.priors;
  m.children = measure_children(x, e, els);
  return m;
}

}  // namespace detail

/// Replaces a deepest refinement node (and its subtree) by a single optimal
/// measurement of the two pure states at that node's priors.
inline TreeNode collapse_deepest_refinement(const TreeNode& root, const Ensemble& e) {
  if (e.size() != 2) throw DomainError("collapse_deepest_refinement: ensemble must have exactly two states");
  const auto path = detail::deepest_refinement(root);
  if (!path) throw DomainError("collapse_deepest_refinement: tree has no refinement node");
  TreeNode out = root;
  TreeNode* n = &out;
  for (std::size_t k : *path) n = &n->children[k];
  *n = detail::optimal_two_state_node(*n, e);
  return out;
}

inline bool has_refinement(const TreeNode& n) {
  if (n.kind == NodeKind::refinement) return true;
  for (const auto& c : n.children) {
    if (has_refinement(c)) return true;
  }
  return false;
}

struct RandomTreeOptions {
  int max_depth = 3;
  int max_branching = 3;
  double refinement_probability = 0.4;
  double leaf_probability = 0.2;
};

namespace detail {

inline SymMatrix random_psd(std::mt19937_64& g, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat b(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) b(i, j) = n(g);
  }
  return SymMatrix::symmetrized(b * b.transpose() + 1e-3 * Mat::Identity(d, d));
}

inline void grow(TreeNode& x, const Ensemble& e, std::mt19937_64& g, int depth, const RandomTreeOptions& opt) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> branch(2, std::max(2, opt.max_branching));
  if (depth >= opt.max_depth) {
    x.kind = NodeKind::leaf;
    return;
  }
  const double roll = u(g);
  const int k = branch(g);
  if (depth > 0 && roll < opt.leaf_probability) {
    x.kind = NodeKind::leaf;
    return;
  }
  if (roll < opt.leaf_probability + opt.refinement_probability) {
    x.kind = NodeKind::refinement;
    std::vector<std::vector<double>> frac(static_cast<std::size_t>(k), std::vector<double>(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i) {
      double s = 0.0;
      for (auto& f : frac) s += (f[i] = u(g));
      for (auto& f : frac) f[i] /= s;
    }
    for (int c = 0; c < k; ++c) {
      TreeNode ch;
      ch.element = x.element;
      ch.priors.resize(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) ch.priors[i] = x.priors[i] * frac[static_cast<std::size_t>(c)][i];
      x.children.push_back(std::move(ch));
    }
    // Children priors must sum exactly to the parent's.
    for (std::size_t i = 0; i < e.size(); ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c + 1 < x.children.size(); ++c) s += x.children[c].priors[i];
      x.children.back().priors[i] = std::max(0.0, x.priors[i] - s);
    }
  } else {
    x.kind = NodeKind::measurement;
    std::vector<SymMatrix> gs;
    Mat s = Mat::Zero(e.dim(), e.dim());
    for (int c = 0; c < k; ++c) {
      gs.push_back(random_psd(g, e.dim()));
      s += gs.back().matrix();
    }
    const SymMatrix s_inv_half = SymMatrix::symmetrized(s.inverse()).sqrt();
    const SymMatrix root = x.element.sqrt();
    std::vector<SymMatrix> els;
    for (const auto& gk : gs) els.push_back(root.sandwich(s_inv_half.sandwich(gk)));
    x.children = measure_children(x, e, els);
  }
  for (auto& c : x.children) grow(c, e, g, depth + 1, opt);
}

}  // namespace detail

/// Seeded random tree over `e` with root priors `priors`. Redraws until the
/// tree contains at least one refinement node.
inline TreeNode random_tree(const Ensemble& e, std::uint64_t seed, const RandomTreeOptions& opt = {}) {
  std::mt19937_64 g(seed);
  for (;;) {
    TreeNode root;
    root.element = SymMatrix::identity(e.dim());
    root.priors.assign(e.priors().begin(), e.priors().end());
    detail::grow(root, e, g, 0, opt);
    if (has_refinement(root)) return root;
  }
}

// ---------------------------------------------------------------------------
// Concavity audit for two pure states

struct ConcavityReport {
  double kappa;
  double min_f;               // min of F(x) over the grid
  double min_f_at;
  double max_second_diff;     // max second central difference of I_acc(q), bits
  double max_second_diff_at;  // q
  bool f_ok;
  bool curvature_ok;
  bool ok() const { return f_ok && curvature_ok; }
};

/// F(x) = 2x/(1-x^2) - ln((1+x)/(1-x)).
inline double concavity_f(double x) { return 2.0 * x / (1.0 - x * x) - std::log((1.0 + x) / (1.0 - x)); }

/// Checks F >= 0 on `grid` points of [0, 0.999] and that the accessible
/// information of two states with overlap kappa has nonpositive second
/// differences in q = p - 1/2 on a `grid`-step lattice of [-1/2, 1/2].
inline ConcavityReport concavity_audit(double kappa, int grid) {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw DomainError("concavity_audit: kappa outside [0,1)");
  if (grid < 4) throw DomainError("concavity_audit: grid too small");
  ConcavityReport r{kappa, std::numeric_limits<double>::infinity(), 0.0, -std::numeric_limits<double>::infinity(),
                    0.0, true, true};
  for (int k = 0; k < grid; ++k) {
    const double x = 0.999 * k / (grid - 1);
    const double f = concavity_f(x);
    if (f < r.min_f) {
      r.min_f = f;
      r.min_f_at = x;
    }
  }
  const double h = 1.0 / grid;
  auto iacc = [kappa](double q) { return two_state_accessible_info(kappa, std::clamp(0.5 + q, 0.0, 1.0)); };
  for (int k = 1; k < grid; ++k) {
    const double q = -0.5 + k * h;
    const double d2 = iacc(q - h) - 2.0 * iacc(q) + iacc(q + h);
    if (d2 > r.max_second_diff) {
      r.max_second_diff = d2;
      r.max_second_diff_at = q;
    }
  }
  r.f_ok = r.min_f >= -1e-12;
  r.curvature_ok = r.max_second_diff <= 1e-9;
  return r;
}

// ---------------------------------------------------------------------------
// Text serialization
//
//   trinecap-tree 1
//   dim <d> states <n>
//   node <kind> <child count>
//   E <d*d entries, row-major>
//   p <n entries>
//   ... children in order, depth first

inline constexpr int kTreeFormatVersion = 1;

namespace detail {

inline void write_node(std::ostream& os, const TreeNode& n) {
  os << "node " << to_string(n.kind) << ' ' << n.children.size() << "\nE";
  for (int i = 0; i < n.element.dim(); ++i) {
    for (int j = 0; j < n.element.dim(); ++j) os << ' ' << n.element(i, j);
  }
  os << "\np";
  for (double p : n.priors) os << ' ' << p;
  os << '\n';
  for (const auto& c : n.children) write_node(os, c);
}

inline void expect_token(std::istream& is, const std::string& want) {
  std::string tok;
  if (!(is >> tok) || tok != want) throw std::runtime_error("tree parse: expected '" + want + "', got '" + tok + "'");
}

inline TreeNode read_node(std::istream& is, int d, std::size_t n, int depth) {
  if (depth > 64) throw std::runtime_error("tree parse: nesting too deep");
  expect_token(is, "node");
  std::string kind;
  std::size_t nc = 0;
  if (!(is >> kind >> nc)) throw std::runtime_error("tree parse: bad node header");
  TreeNode t;
  if (kind == "measurement") {
    t.kind = NodeKind::measurement;
  } else if (kind == "refinement") {
    t.kind = NodeKind::refinement;
  } else if (kind == "leaf") {
    t.kind = NodeKind::leaf;
  } else {
    throw std::runtime_error("tree parse: unknown node kind '" + kind + "'");
  }
  expect_token(is, "E");
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (!(is >> m(i, j))) throw std::runtime_error("tree parse: bad matrix entry");
    }
  }
  t.element = SymMatrix(m);
  expect_token(is, "p");
  t.priors.resize(n);
  for (auto& p : t.priors) {
    if (!(is >> p)) throw std::runtime_error("tree parse: bad prior");
  }
  for (std::size_t k = 0; k < nc; ++k) t.children.push_back(read_node(is, d, n, depth + 1));
  return t;
}

}  // namespace detail

inline void write_tree(std::ostream& os, const TreeNode& root) {
  const auto old_prec = os.precision(17);
  os << "trinecap-tree " << kTreeFormatVersion << "\ndim " << root.element.dim() << " states " << root.priors.size()
     << '\n';
  detail::write_node(os, root);
  os.precision(old_prec);
}

inline std::string tree_to_string(const TreeNode& root) {
  std::ostringstream os;
  write_tree(os, root);
  return os.str();
}

inline TreeNode read_tree(std::istream& is) {
  detail::expect_token(is, "trinecap-tree");
  int version = 0;
  if (!(is >> version) || version != kTreeFormatVersion) {
    throw std::runtime_error("tree parse: unsupported format version " + std::to_string(version));
  }
  int d = 0;
  std::size_t n = 0;
  detail::expect_token(is, "dim");
  is >> d;
  detail::expect_token(is, "states");
  is >> n;
  if (!is || (d != 2 && d != 3) || n == 0) throw std::runtime_error("tree parse: bad header");
  return detail::read_node(is, d, n, 0);
}

inline TreeNode tree_from_string(const std::string& s) {
  std::istringstream is(s);
  return read_tree(is);
}

}  // namespace trinecap

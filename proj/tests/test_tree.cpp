#include "trinecap/tree.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace trinecap;

namespace {

Ensemble two_states(double theta, double p) {
  return Ensemble({StateVector{1.0, 0.0}, StateVector{std::cos(theta), std::sin(theta)}}, ProbDist({p, 1.0 - p}));
}

TreeNode single_measurement(const Ensemble& e, const std::vector<StateVector>& basis) {
  TreeNode root;
  root.kind = NodeKind::measurement;
  root.element = SymMatrix::identity(e.dim());
  root.priors.assign(e.priors().begin(), e.priors().end());
  root.children = measure_children(root, e, rank_one_split(root.element, basis));
  return root;
}

}  // namespace

TEST(ProtocolTree, MatchesAdaptiveRate) {
  for (double a : {0.02, 0.03, 0.05}) {
    const TreeNode t = protocol_tree(a);
    EXPECT_NO_THROW(validate_tree(t, lifted_trines(a)));
    EXPECT_NEAR(evaluate_tree(t, lifted_trines(a)).total_info, best_protocol_rate(a).total, 1e-6) << a;
  }
}

TEST(ProtocolTree, SimpleProtocol) {
  for (double a : {0.05, 0.2}) {
    const TreeNode t = simple_protocol_tree(a);
    EXPECT_NEAR(evaluate_tree(t, lifted_trines(a)).total_info, simple_protocol_rate(a).total, 1e-6) << a;
  }
}

TEST(NodeGain, Examples) {
  // Orthogonal states at equal priors: one bit.
  const Ensemble orth = two_states(kPi / 2.0, 0.5);
  EXPECT_NEAR(evaluate_tree(single_measurement(orth, {StateVector{1.0, 0.0}, StateVector{0.0, 1.0}}), orth).total_info,
              1.0, 1e-12);
  // kappa = 1/4 measured in the basis straddling the bisector at pi/3.
  const Ensemble pair = two_states(2.0 * kPi / 3.0, 0.5);
  const double u = kPi / 12.0, w = 7.0 * kPi / 12.0;
  const TreeNode t =
      single_measurement(pair, {StateVector{std::cos(u), std::sin(u)}, StateVector{std::cos(w), std::sin(w)}});
  EXPECT_NEAR(evaluate_tree(t, pair).total_info, 0.64542, 1e-5);
  EXPECT_NEAR(evaluate_tree(t, pair).total_info, two_state_accessible_info(0.25, 0.5), 1e-12);
}

TEST(NodeGain, RefinementAddsNothingLocally) {
  const Ensemble e = two_states(0.7, 0.3);
  TreeNode root;
  root.kind = NodeKind::refinement;
  root.element = SymMatrix::identity(2);
  root.priors = {0.3, 0.7};
  for (int k = 0; k < 2; ++k) {
    TreeNode c;
    c.element = root.element;
    c.priors = {0.15, 0.35};
    root.children.push_back(c);
  }
  EXPECT_EQ(node_info_gain(root), 0.0);
  EXPECT_EQ(evaluate_tree(root, e).total_info, 0.0);
}

TEST(Validate, ReportsPath) {
  const Ensemble e = lifted_trines(0.04);
  TreeNode t = protocol_tree(0.04);
  t.children[1].children[2].priors[0] += 1e-3;
  try {
    validate_tree(t, e);
    FAIL() << "expected TreeError";
  } catch (const TreeError& err) {
    EXPECT_EQ(err.path(), "r.1.2");
  }
  TreeNode bad = protocol_tree(0.04);
  bad.children[0].children[0].element = SymMatrix::identity(3);
  EXPECT_THROW(validate_tree(bad, e), TreeError);
  TreeNode leaf;
  leaf.priors = {1.0, 0.0, 0.0};
  leaf.children.push_back(TreeNode{});
  EXPECT_THROW(validate_tree(leaf, e), TreeError);
}

TEST(Serialization, RoundTrip) {
  const TreeNode t = protocol_tree(0.03);
  const std::string s = tree_to_string(t);
  const TreeNode back = tree_from_string(s);
  EXPECT_EQ(tree_to_string(back), s);
  EXPECT_NEAR(evaluate_tree(back, lifted_trines(0.03)).total_info, evaluate_tree(t, lifted_trines(0.03)).total_info,
              1e-12);
  EXPECT_THROW(tree_from_string("trinecap-tree 2\n"), std::exception);
  EXPECT_THROW(tree_from_string(s.substr(0, s.size() / 2)), std::exception);
}

TEST(Collapse, NeverLosesInformation) {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Ensemble e = two_states(u(g) * kPi / 2.0, u(g));
    TreeNode t = random_tree(e, seed);
    ASSERT_NO_THROW(validate_tree(t, e));
    const double before = evaluate_tree(t, e).total_info;
    const double h = shannon_entropy(e.priors());
    EXPECT_LE(before, h + 1e-12);
    // Repeated collapse ends in a refinement-free tree without ever losing.
    double prev = before;
    while (has_refinement(t)) {
      t = collapse_deepest_refinement(t, e);
      const double now = evaluate_tree(t, e).total_info;
      EXPECT_GE(now, prev - 1e-9) << seed;
      prev = now;
    }
    const double kappa = std::pow(e.state(0).dot(e.state(1)), 2);
    EXPECT_LE(prev, two_state_accessible_info(kappa, e.priors()[0]) + 1e-7) << seed;
  }
}

TEST(Collapse, ProportionalSplitAddsNothing) {
  // Children with priors proportional to the parent's carry no information.
  const Ensemble e = two_states(0.9, 0.4);
  TreeNode root;
  root.kind = NodeKind::refinement;
  root.element = SymMatrix::identity(2);
  root.priors = {0.4, 0.6};
  for (double f : {0.25, 0.75}) {
    TreeNode c;
    c.element = root.element;
    c.priors = {0.4 * f, 0.6 * f};
    root.children.push_back(c);
  }
  const double v = evaluate_tree(collapse_deepest_refinement(root, e), e).total_info;
  EXPECT_NEAR(v, two_state_accessible_info(std::pow(std::cos(0.9), 2), 0.4), 1e-7);
}

TEST(Collapse, RequiresTwoStatesAndARefinement) {
  EXPECT_THROW(collapse_deepest_refinement(protocol_tree(0.03), lifted_trines(0.03)), DomainError);
  const Ensemble e = two_states(0.5, 0.5);
  EXPECT_THROW(collapse_deepest_refinement(single_measurement(e, {StateVector{1.0, 0.0}, StateVector{0.0, 1.0}}), e),
               DomainError);
}

TEST(Concavity, Audit) {
  const ConcavityReport r = concavity_audit(0.25, 1000);
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(concavity_audit(0.0, 1000).ok());
  EXPECT_EQ(concavity_f(0.0), 0.0);
  EXPECT_GT(concavity_f(0.9), 0.0);
  EXPECT_THROW(concavity_audit(1.0, 100), DomainError);
}

// Finite-dimensional bilinear model: the chain examples, the conserved
// quantity, drift increments against quadrature oracles, controllability
// rank, and the boundary-term reduction of the constant-pair quadratic.

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "driftlab/findim.hpp"

namespace dl = driftlab;

namespace {

// theta = t^3 (1-t)^3 vanishes to second order at both ends of [0,1]
const dl::ThetaProfile kBump{
    [](double t) { return std::pow(t, 3) * std::pow(1.0 - t, 3); },
    [](double t) { return 3 * t * t - 12 * std::pow(t, 3) + 15 * std::pow(t, 4) - 6 * std::pow(t, 5); },
    [](double t) { return 6 * t - 36 * t * t + 60 * std::pow(t, 3) - 30 * std::pow(t, 4); },
    [](double t) { return 6 - 72 * t + 180 * t * t - 120 * std::pow(t, 3); }};

}  // namespace

TEST(FinDim, ExampleStructure) {
  for (int which : {1, 2, 3}) {
    const dl::FinDimSystem sys = dl::findim_example(which);
    ASSERT_EQ(sys.M.rows(), 3);
    ASSERT_EQ(sys.L.rows(), 1);
    ASSERT_EQ(sys.Q.size(), 1u);
    EXPECT_EQ(sys.M(0, 1), 1.0);
    EXPECT_EQ(sys.M(1, 2), 1.0);
    EXPECT_EQ(sys.M.cwiseAbs().sum(), 2.0);
    EXPECT_EQ(sys.m(0), 0.0);
    EXPECT_EQ(sys.m(1), 0.0);
    EXPECT_EQ(sys.m(2), 1.0);
    EXPECT_EQ(sys.L(0, 0), 0.0);
    EXPECT_EQ(sys.Q[0], sys.Q[0].transpose().eval());
  }
  EXPECT_EQ(dl::findim_example(1).Q[0](1, 1), 1.0);
  EXPECT_EQ(dl::findim_example(1).Q[0](0, 2), 0.5);
  EXPECT_EQ(dl::findim_example(2).Q[0](2, 2), 1.0);
  EXPECT_EQ(dl::findim_example(3).Q[0](1, 1), 1.0);
  EXPECT_THROW(dl::findim_example(0), std::invalid_argument);
  EXPECT_THROW(dl::findim_example(4), std::invalid_argument);
}

TEST(FinDim, SystemFactorySymmetrizesAndValidates) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(1, 1);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2, 2);
  q(0, 1) = 1.0;  // asymmetric input gets stored as its symmetric part
  const dl::FinDimSystem sys = dl::make_findim_system(M, m, L, {q});
  EXPECT_EQ(sys.Q[0](0, 1), 0.5);
  EXPECT_EQ(sys.Q[0](1, 0), 0.5);

  EXPECT_THROW(dl::make_findim_system(Eigen::MatrixXd::Zero(2, 3), m, L, {q}),
               std::invalid_argument);
  EXPECT_THROW(dl::make_findim_system(M, Eigen::VectorXd::Zero(3), L, {q}),
               std::invalid_argument);
  EXPECT_THROW(dl::make_findim_system(M, m, L, {q, q}), std::invalid_argument);
  EXPECT_THROW(dl::make_findim_system(M, m, L, {Eigen::MatrixXd::Zero(3, 3)}),
               std::invalid_argument);
}

TEST(FinDim, NilpotentChainClosedForm) {
  // u(t) = t integrates through the chain in closed form:
  //   a3 = a3(0) + t^2/2, a2 = a2(0) + int a3, a1 = a1(0) + int a2
  const dl::FinDimSystem sys = dl::findim_example(1);
  Eigen::VectorXd a0(3);
  a0 << 0.1, -0.2, 0.3;
  const Eigen::VectorXd b0 = Eigen::VectorXd::Zero(1);
  const double T = 1.5;
  const dl::AbTrajectory traj =
      dl::simulate_ab(sys, [](double t) { return t; }, T, a0, b0, 512);
  ASSERT_EQ(traj.a.rows(), 513);
  for (int k : {0, 100, 256, 512}) {
    const double t = traj.times[k];
    const double a3 = 0.3 + 0.5 * t * t;
    const double a2 = -0.2 + 0.3 * t + std::pow(t, 3) / 6.0;
    const double a1 = 0.1 - 0.2 * t + 0.15 * t * t + std::pow(t, 4) / 24.0;
    EXPECT_NEAR(traj.a(k, 2), a3, 1e-12);
    EXPECT_NEAR(traj.a(k, 1), a2, 1e-12);
    EXPECT_NEAR(traj.a(k, 0), a1, 1e-12);
  }
  EXPECT_THROW(dl::simulate_ab(sys, [](double) { return 0.0; }, -1.0, a0, b0),
               std::invalid_argument);
  EXPECT_THROW(
      dl::simulate_ab(sys, [](double) { return 0.0; }, 1.0, Eigen::VectorXd::Zero(2), b0),
      std::invalid_argument);
}

TEST(FinDim, Example1ConservesItsInvariant) {
  // d/dt (b - a1 a2) = (a2^2 + a1 a3) - a2 a2 - a1 a3 = 0 along any control
  Eigen::VectorXd a0(3);
  a0 << 0.5, 0.1, -0.3;
  const double worst = dl::conservation_check_example1(
      [](double t) { return std::cos(2.0 * t) + 0.5; }, 1.5, a0, 0.7, 2048);
  EXPECT_LT(worst, 1e-10);
}

TEST(FinDim, DriftIncrementsMatchQuadratureOracles) {
  // example 2 accumulates int theta''^2, example 3 int theta'^2; for the
  // cubic bump these are 2/35 and 1/770
  const dl::DriftCheck two = dl::drift_check_examples23(2, kBump, 1.0);
  EXPECT_NEAR(two.weak_norm, 2.0 / 35.0, 1e-10);
  EXPECT_GT(two.increment, 0.0);
  EXPECT_LT(two.rel_gap, 1e-6);

  const dl::DriftCheck three = dl::drift_check_examples23(3, kBump, 1.0);
  EXPECT_NEAR(three.weak_norm, 1.0 / 770.0, 1e-11);
  EXPECT_GT(three.increment, 0.0);
  EXPECT_LT(three.rel_gap, 1e-6);
}

TEST(FinDim, DriftCheckRejectsBadProfilesAndParameters) {
  const dl::ThetaProfile ramp{[](double t) { return t; }, [](double) { return 1.0; },
                              [](double) { return 0.0; }, [](double) { return 0.0; }};
  EXPECT_THROW(dl::drift_check_examples23(2, ramp, 1.0), std::invalid_argument);
  EXPECT_THROW(dl::drift_check_examples23(1, kBump, 1.0), std::invalid_argument);
  EXPECT_THROW(dl::drift_check_examples23(2, kBump, 0.0), std::invalid_argument);
  EXPECT_THROW(dl::drift_check_examples23(2, kBump, 1.0, 4096, 3), std::invalid_argument);
}

TEST(FinDim, KalmanRankSeparatesControlDirections) {
  const dl::FinDimSystem sys = dl::findim_example(1);
  EXPECT_EQ(dl::kalman_rank(sys.M, sys.m), 3);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1(0) = 1.0;  // feeding the top of the chain reaches nothing else
  EXPECT_EQ(dl::kalman_rank(sys.M, e1), 1);
  EXPECT_THROW(dl::kalman_rank(sys.M, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST(FinDim, Q11ReducesToBoundaryTerm) {
  const auto sine = [](double t) { return std::sin(dl::kPi * t); };
  const dl::Q11Check s = dl::lie_bracket_q11_check(sine);
  EXPECT_TRUE(s.admissible);
  EXPECT_NEAR(s.value, 0.0, 1e-15);

  const dl::Q11Check c = dl::lie_bracket_q11_check(
      [](double t) { return std::cos(dl::kPi * t); });
  EXPECT_FALSE(c.admissible);
  EXPECT_NEAR(c.value, -1.0, 1e-15);

  const dl::Q11Check bump = dl::lie_bracket_q11_check(
      [](double t) { return t * t * (1.0 - t) * (1.0 - t); });
  EXPECT_TRUE(bump.admissible);
  EXPECT_NEAR(bump.value, 0.0, 1e-15);

  // the panel sum telescopes, so the panel count never changes the value
  const auto expgrow = [](double t) { return std::exp(t); };
  EXPECT_DOUBLE_EQ(dl::lie_bracket_q11_check(expgrow, 7).value,
                   dl::lie_bracket_q11_check(expgrow, 64).value);
  EXPECT_NEAR(dl::lie_bracket_q11_check(expgrow, 3).value, 0.5 * (std::exp(1.0) - 1.0),
              1e-15);
  EXPECT_FALSE(dl::lie_bracket_q11_check(expgrow).admissible);
  EXPECT_THROW(dl::lie_bracket_q11_check(expgrow, 0), std::invalid_argument);

  const auto batch = dl::lie_bracket_q11_check({sine, expgrow}, 16);
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_TRUE(batch[0].admissible);
  EXPECT_FALSE(batch[1].admissible);
  EXPECT_DOUBLE_EQ(batch[1].value, dl::lie_bracket_q11_check(expgrow, 16).value);
}

// Randomized property checks over the bundled objectives and the solvers.
#include <gtest/gtest.h>

#include <cmath>

#include "greedymax/greedymax.hpp"

using namespace greedymax;

namespace {

Vector v1(double a) { return make_vector({a}); }

Box sample_region(const std::optional<Box>& domain, int dim) {
  return domain ? *domain : Box::cube(dim, -10.0, 10.0);
}

}  // namespace

TEST(Property, BundledGradientsMatchFiniteDifferences) {
  for (const auto& name : function_names()) {
    const auto f = make_function(name);
    CounterRng rng = substream(1, name);
    // Keep the finite-difference stencil inside compact domains.
    const Box rx = f.domain_x ? Box::cube(f.dim_x, -0.99, 0.99) : sample_region(f.domain_x, f.dim_x);
    const Box ry = f.domain_y ? Box::cube(f.dim_y, -0.99, 0.99) : sample_region(f.domain_y, f.dim_y);
    for (int k = 0; k < 100; ++k) {
      const Vector x = rx.sample(rng);
      const Vector y = ry.sample(rng);
      EXPECT_LT(finite_diff_check(f, x, y, 1e-5), 1e-6) << name << " at " << x[0] << "," << y[0];
    }
  }
}

TEST(Property, SineFamilyGradientsMatchFiniteDifferences) {
  const auto f = make_sine_family(32, 2, 2, 1.0, 7).mean_spec();
  CounterRng rng(3);
  for (int k = 0; k < 100; ++k) {
    const Vector x = Box::cube(2, -3, 3).sample(rng);
    const Vector y = Box::cube(2, -3, 3).sample(rng);
    EXPECT_LT(finite_diff_check(f, x, y, 1e-5), 1e-6);
  }
}

TEST(Property, BoundedSpecsRespectTheirBound) {
  for (const auto& name : function_names()) {
    const auto f = make_function(name);
    if (!f.bounded()) continue;
    const Box rx = f.constants_region_x ? *f.constants_region_x : sample_region(f.domain_x, f.dim_x);
    const Box ry = f.constants_region_y ? *f.constants_region_y : sample_region(f.domain_y, f.dim_y);
    CounterRng rng = substream(2, name);
    for (int k = 0; k < 10000; ++k) {
      const Vector x = rx.sample(rng);
      const Vector y = ry.sample(rng);
      ASSERT_LE(std::abs(eval_value(f, x, y)), *f.bound_b) << name;
    }
  }
  const auto fam = make_sine_family(16, 1, 1, 0.7, 1).mean_spec();
  CounterRng rng(5);
  for (int k = 0; k < 10000; ++k) {
    ASSERT_LE(std::abs(eval_value(fam, Box::cube(1, -50, 50).sample(rng), Box::cube(1, -50, 50).sample(rng))), 0.7);
  }
}

TEST(Property, ExhaustiveSingletonBatchesGiveExactGradient) {
  const auto fam = make_sine_family(64, 2, 2, 1.0, 8);
  const auto exact = fam.mean_spec();
  const Vector x = make_vector({0.1, 0.9});
  const Vector y = make_vector({-0.4, 0.6});
  Vector sum = Vector::Zero(2);
  for (std::size_t i = 0; i < fam.m(); ++i) {
    OracleSet single(EmpiricalObjective({fam.components[i]}), OracleMode::Stochastic, {1, 1, 1}, i);
    sum += single.grad_y(x, y);
  }
  EXPECT_LT((sum / 64.0 - eval_grad_y(exact, x, y)).norm(), 1e-15);
}

TEST(Property, ConstantValuedComponentsAverageExactly) {
  OracleSet o(EmpiricalObjective({make_constant(1.0), make_constant(3.0)}), OracleMode::Deterministic, {}, 0);
  EXPECT_EQ(o.value(v1(0), v1(0)), 2.0);
  // Identical components: any batch reproduces the exact gradient.
  const auto part = make_sine_family(1, 1, 1, 1.0, 3).components[0];
  OracleSet same(EmpiricalObjective({part, part, part}), OracleMode::Stochastic, {2, 2, 7}, 5);
  EXPECT_DOUBLE_EQ(same.grad_y(v1(0.3), v1(0.2))[0], part.grad_y(v1(0.3), v1(0.2))[0]);
}

TEST(Property, ProjectionIdempotentAndNonexpansive) {
  const Box b(make_vector({-1.0, 0.0, -2.0}), make_vector({1.0, 0.5, 3.0}));
  CounterRng rng(11);
  const Box wide = Box::cube(3, -10, 10);
  for (int k = 0; k < 1000; ++k) {
    const Vector a = wide.sample(rng);
    const Vector c = wide.sample(rng);
    const Vector pa = b.project(a);
    EXPECT_EQ(b.project(pa), pa);
    EXPECT_TRUE(b.contains(pa));
    EXPECT_LE((pa - b.project(c)).norm(), (a - c).norm() + 1e-15);
  }
}

TEST(Property, AscentStepIncreaseAndCap) {
  // Sine family with unit frequencies: b = 1, L = 1, eta <= 1/(10 L).
  const auto fam = make_sine_family(16, 2, 2, 1.0, 21);
  const auto exact = fam.mean_spec();
  OracleSet o = OracleSet::deterministic(fam);
  const double eta = 0.1, eps = 0.05;
  const std::size_t cap = default_inner_cap(exact, eta, eps);
  CounterRng rng(4);
  for (int start = 0; start < 30; ++start) {
    const Vector x = Box::cube(2, -3, 3).sample(rng);
    const Vector y0 = Box::cube(2, -3, 3).sample(rng);
    const AscentPath p = ascend(o, x, y0, eps, eta, 10 * cap);
    EXPECT_EQ(p.status, AscentStatus::Converged);
    EXPECT_LE(p.steps(), cap);
    EXPECT_LE(eval_grad_y(exact, x, p.last()).norm(), eps);
    for (std::size_t j = 0; j < p.steps(); ++j) {
      const double gain = eval_value(exact, x, p.points[j + 1]) - eval_value(exact, x, p.points[j]);
      EXPECT_GE(gain, eta * p.step_grads[j].squaredNorm() / 8.0);
    }
    const auto rate = increasing_path_rate(eta, *exact.lip_grad_L, eps);
    for (const auto& d : path_directional_derivatives(exact, p)) EXPECT_GE(*d, rate);
  }
}

TEST(Property, DeterministicAcceptanceNeverCycles) {
  for (const char* name : {"F1", "F3"}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      OracleSet o = OracleSet::deterministic(make_function(name));
      RunConfig c;
      c.inner_cap = 100000;
      c.seed = seed;
      c.x0 = v1(5.5);
      c.y0 = v1(5.5);
      c.proposal = ProposalSpec::gaussian(0.25);
      const RunRecord rec = run(o, c);
      double last = std::numeric_limits<double>::infinity();
      for (const auto& row : rec.rows) {
        if (!row.accepted) continue;
        EXPECT_LE(row.f_new, last - c.delta / 4.0);
        last = row.f_new;
      }
    }
  }
}

TEST(Property, EpsilonStaysInScheduleBand) {
  OracleSet o = OracleSet::deterministic(make_function("BilinearFree"));
  RunConfig c;
  c.inner_cap = 1000;
  c.x0 = v1(0.5);
  c.y0 = v1(0.5);
  c.lipschitz = 1.0;
  c.max_outer_iters = 50;
  c.seed = 4;
  const RunRecord rec = run(o, c);
  const double factor = 1.0 / std::pow(1.0 - 2.0 * c.eta, 2.0);
  std::size_t accepted = 0;
  for (const auto& row : rec.rows) {
    EXPECT_GE(row.eps_i, c.epsilon / 2.0);
    EXPECT_LE(row.eps_i, c.epsilon / 2.0 * std::pow(factor, static_cast<double>(accepted)) * (1 + 1e-12));
    accepted += row.accepted;
  }
}

TEST(Property, RecordsReplayBitwise) {
  for (std::uint64_t seed : {1u, 99u, 12345u}) {
    OracleSet a = OracleSet::deterministic(make_function("F3"));
    OracleSet b = OracleSet::deterministic(make_function("F3"));
    RunConfig c;
    c.seed = seed;
    c.x0 = v1(5.5);
    c.y0 = v1(5.5);
    c.accept = AcceptRule::annealed(5.0);
    c.max_outer_iters = 400;
    EXPECT_EQ(to_csv(run(a, c)), to_csv(run(b, c)));
  }
}

TEST(Property, QuadraticGdaEqualsLinearRecurrence) {
  // Random quadratics a x^2 + b xy + c y^2 under simultaneous GDA.
  CounterRng rng(8);
  for (int k = 0; k < 20; ++k) {
    const double a = 4 * rng.uniform() - 2, b = 4 * rng.uniform() - 2, c = 4 * rng.uniform() - 2;
    ObjectiveSpec q;
    q.name = "quadratic";
    q.value = [=](const Vector& x, const Vector& y) { return a * x[0] * x[0] + b * x[0] * y[0] + c * y[0] * y[0]; };
    q.grad_x = [=](const Vector& x, const Vector& y) { return v1(2 * a * x[0] + b * y[0]); };
    q.grad_y = [=](const Vector& x, const Vector& y) { return v1(b * x[0] + 2 * c * y[0]); };
    OracleSet o = OracleSet::deterministic(q);
    const double lr = 0.05;
    const Trajectory t = run_gda(o, v1(1.0), v1(-0.5), lr, 1, 60);
    Eigen::Matrix2d m;
    m << 1 - 2 * lr * a, -lr * b, lr * b, 1 + 2 * lr * c;
    Eigen::Vector2d z(1.0, -0.5);
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_LE(std::abs(t.xs[i][0] - z[0]), 1e-12 * std::max(1.0, std::abs(z[0])));
      EXPECT_LE(std::abs(t.ys[i][0] - z[1]), 1e-12 * std::max(1.0, std::abs(z[1])));
      z = m * z;
    }
  }
}

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "jcpot/datagen.hpp"
#include "jcpot/error.hpp"
#include "jcpot/solver.hpp"

using namespace jcpot;

namespace {

LabeledDataset blobs(int n, double class0, double separation, std::uint64_t seed) {
  return datagen::gen_gaussian_binary(n, ProportionVector{Vector{{class0, 1.0 - class0}}},
                                      Vector::Zero(2), Vector::Constant(2, separation), 1.0,
                                      seed);
}

Matrix random_positive(Index rows, Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-14 * std::max(1.0, std::abs(b))) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - r * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + r * (b - a), fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double kl_entry(double x, double z) { return x > 0.0 ? x * (std::log(x / z) - 1.0) : 0.0; }

JcpotProblem problem_for(std::vector<LabeledDataset> sources, Matrix target) {
  JcpotProblem p;
  p.sources = std::move(sources);
  p.target_points = std::move(target);
  return p;
}

}  // namespace

TEST_CASE("proportion update examples") {
  const std::vector<int> labels{0, 1};
  const std::vector<ClassOperators> one{ClassOperators(labels, 2)};
  const std::vector<ClassOperators> two{ClassOperators(labels, 2), ClassOperators(labels, 2)};

  SUBCASE("single domain returns the class mass") {
    Matrix z(2, 3);
    z << 0.1, 0.2, 0.1, 0.3, 0.2, 0.1;
    const Vector h = proportion_update(std::span(&z, 1), one, Vector::Ones(1));
    CHECK(h(0) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(h(1) == doctest::Approx(0.6).epsilon(1e-14));
  }
  SUBCASE("balanced domains") {
    const std::vector<Vector> sums{Vector{{0.5, 0.5}}, Vector{{0.5, 0.5}}};
    const Vector h = proportion_update_from_row_sums(sums, two, Vector{{0.5, 0.5}});
    CHECK(h(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h(1) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("geometric mean need not sum to one") {
    const std::vector<Vector> sums{Vector{{0.4, 0.6}}, Vector{{0.9, 0.1}}};
    const Vector h = proportion_update_from_row_sums(sums, two, Vector{{0.5, 0.5}});
    CHECK(h(0) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(h(1) == doctest::Approx(std::sqrt(0.06)).epsilon(1e-14));
    CHECK(h.sum() < 1.0);
  }
  SUBCASE("zero class mass") {
    const std::vector<Vector> sums{Vector{{0.0, 1.0}}, Vector{{0.5, 0.5}}};
    try {
      proportion_update_from_row_sums(sums, two, Vector{{0.5, 0.5}});
      FAIL("expected degenerate mass");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDegenerateMass);
    }
  }
}

TEST_CASE("proportion update minimizes the summed class-mass divergence") {
  // For fixed h the cheapest coupling with class masses h scales each class
  // block of zeta, leaving sum_c h_c log(h_c / M_c) - h_c with M = D1 zeta 1.
  // The weighted sum separates over classes, so each h_c is a 1-D problem.
  std::mt19937_64 rng(307);
  const std::vector<int> labels_a{0, 1, 1, 2, 0};
  const std::vector<int> labels_b{2, 1, 0, 0};
  const std::vector<int> labels_c{0, 1, 2};
  const std::vector<ClassOperators> ops{ClassOperators(labels_a, 3), ClassOperators(labels_b, 3),
                                        ClassOperators(labels_c, 3)};
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<Matrix> kernels{random_positive(5, 4, rng), random_positive(4, 4, rng),
                                      random_positive(3, 4, rng)};
    std::uniform_real_distribution<double> w(0.1, 1.0);
    Vector lambda{{w(rng), w(rng), w(rng)}};
    lambda /= lambda.sum();
    const Vector h = proportion_update(kernels, ops, lambda);
    for (int c = 0; c < 3; ++c) {
      const auto objective = [&](double hc) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kernels.size(); ++k) {
          const double mass = ops[k].class_mass(kernels[k].rowwise().sum())(c);
          acc += lambda(static_cast<Index>(k)) * kl_entry(hc, mass);
        }
        return acc;
      };
      CHECK(golden_section(objective, 1e-6, 10.0) == doctest::Approx(h(c)).epsilon(1e-6));
    }
  }
}

TEST_CASE("class row projection") {
  const std::vector<int> five{0, 0, 0, 1, 1};
  const ClassOperators ops(five, 2);
  std::mt19937_64 rng(311);

  SUBCASE("five-instance example") {
    const Matrix z = random_positive(5, 3, rng);
    const Matrix g = class_row_projection(z, ops, Vector{{0.6, 0.4}});
    for (Index i = 0; i < 5; ++i) CHECK(g.row(i).sum() == doctest::Approx(0.2).epsilon(1e-14));
  }
  SUBCASE("single class reduces to the uniform row projection") {
    const std::vector<int> same{0, 0, 0, 0};
    const ClassOperators single(same, 1);
    const Matrix z = random_positive(4, 6, rng);
    const Matrix expected = ot::row_projection(z, Vector::Constant(4, 0.25));
    CHECK((class_row_projection(z, single, Vector::Ones(1)) - expected).cwiseAbs().maxCoeff() <=
          1e-16);
  }
  SUBCASE("idempotent and exact class mass") {
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix z = random_positive(5, 4, rng);
      const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const Vector h{{p, 1.0 - p}};
      const Matrix once = class_row_projection(z, ops, h);
      const Matrix twice = class_row_projection(once, ops, h);
      CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-15);
      CHECK((ops.aggregate() * once.rowwise().sum() - h).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(class_row_projection(random_positive(4, 2, rng), ops, Vector{{0.5, 0.5}}),
                    Error);
    CHECK_THROWS_AS(class_row_projection(random_positive(5, 2, rng), ops, Vector{{1.5, -0.5}}),
                    Error);
    Matrix dead = random_positive(5, 2, rng);
    dead.row(2).setZero();
    try {
      class_row_projection(dead, ops, Vector{{0.5, 0.5}});
      FAIL("expected degenerate kernel");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDegenerateKernel);
    }
  }
}

TEST_CASE("class row projection matches a numerical KL minimizer") {
  // With two target columns each row of the constrained problem is a
  // segment {(t, s_i - t)}; minimize KL along it by golden section.
  std::mt19937_64 rng(313);
  const std::vector<int> labels{0, 1, 1};
  const ClassOperators ops(labels, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix z = random_positive(3, 2, rng);
    const double p = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    const Vector h{{p, 1.0 - p}};
    const Vector row_mass = ops.distribute() * h;
    const Matrix closed = class_row_projection(z, ops, h);
    for (Index i = 0; i < 3; ++i) {
      const double s = row_mass(i);
      const double t = golden_section(
          [&](double x) { return kl_entry(x, z(i, 0)) + kl_entry(s - x, z(i, 1)); }, 0.0, s);
      CHECK(std::abs(closed(i, 0) - t) <= 1e-6);
      CHECK(std::abs(closed(i, 1) - (s - t)) <= 1e-6);
    }
  }
}

TEST_CASE("lambda resolution") {
  CHECK(resolve_lambda(Vector(), 4) == Vector::Constant(4, 0.25));
  CHECK(resolve_lambda(Vector{{0.3, 0.7}}, 2) == Vector{{0.3, 0.7}});
  for (const Vector& bad : {Vector{{0.5, 0.6}}, Vector{{1.5, -0.5}}, Vector{{1.0}}}) {
    try {
      resolve_lambda(bad, 2);
      FAIL("expected invalid parameter");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInvalidParameter);
    }
  }
}

TEST_CASE("jcpot recovers proportions on a self-matched source") {
  const auto data = blobs(60, 0.3, 8.0, 401);
  auto p = problem_for({data}, data.points);
  p.epsilon = 1e-3;
  p.max_iter = 20000;
  const auto sol = jcpot_fit(p);
  CHECK(sol.converged);
  CHECK(std::abs(sol.h_hat.values(0) - 0.3) <= 1e-3);
  CHECK(std::abs(sol.h_hat.values(1) - 0.7) <= 1e-3);
}

TEST_CASE("jcpot corrects a shifted target") {
  const auto source = blobs(400, 0.5, 6.0, 409);
  const auto target = blobs(400, 0.2, 6.0, 419);
  const auto sol = jcpot_fit(problem_for({source}, target.points));
  REQUIRE(sol.converged);
  CHECK((sol.h_hat.values - Vector{{0.2, 0.8}}).lpNorm<1>() <= 0.05);
}

TEST_CASE("solution invariants") {
  const auto s0 = blobs(120, 0.3, 3.0, 421);
  const auto s1 = blobs(90, 0.7, 3.0, 431);
  const auto target = blobs(100, 0.2, 3.0, 433);
  const auto sol = jcpot_fit(problem_for({s0, s1}, target.points));
  REQUIRE(sol.converged);
  CHECK(sol.h_hat.on_simplex(1e-12));
  CHECK(sol.h_trace.size() == static_cast<std::size_t>(sol.iterations));
  CHECK(sol.h_trace.back() <= 1e-6);
  CHECK((sol.h_hat.values - sol.h_raw / sol.h_raw.sum()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(sol.lambda == Vector{{0.5, 0.5}});
  const std::vector<ClassOperators> ops{ClassOperators(s0.labels, 2),
                                        ClassOperators(s1.labels, 2)};
  for (std::size_t k = 0; k < 2; ++k) {
    const Matrix& g = sol.couplings[k];
    CHECK(g.rows() == (k == 0 ? 120 : 90));
    CHECK(g.cols() == 100);
    CHECK((g.array() >= 0.0).all());
    CHECK((ops[k].aggregate() * g.rowwise().sum() - sol.h_raw).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(sol.col_residuals[k] == doctest::Approx(
                                      ot::col_residual(g, Vector::Constant(100, 0.01))));
  }
}

TEST_CASE("identical domains collapse to a single domain") {
  const auto source = blobs(150, 0.4, 3.0, 443);
  const auto target = blobs(120, 0.25, 3.0, 449);
  const auto single = jcpot_fit(problem_for({source}, target.points));

  auto doubled = problem_for({source, source}, target.points);
  doubled.lambda = Vector{{0.5, 0.5}};
  const auto twin = jcpot_fit(doubled);
  CHECK((twin.h_hat.values - single.h_hat.values).cwiseAbs().maxCoeff() <= 1e-9);

  auto tripled = problem_for({source, source, source}, target.points);
  for (const Vector& lambda : {Vector{{0.2, 0.3, 0.5}}, Vector{{0.9, 0.05, 0.05}}}) {
    tripled.lambda = lambda;
    const auto weighted = jcpot_fit(tripled);
    CHECK((weighted.h_hat.values - single.h_hat.values).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("domain permutation equivariance") {
  const std::vector<LabeledDataset> sources{blobs(80, 0.2, 3.0, 457), blobs(100, 0.6, 3.0, 461),
                                            blobs(70, 0.8, 3.0, 463)};
  const auto target = blobs(90, 0.3, 3.0, 467);
  auto base = problem_for(sources, target.points);
  base.lambda = Vector{{0.5, 0.3, 0.2}};
  const auto reference = jcpot_fit(base);

  auto permuted = problem_for({sources[2], sources[0], sources[1]}, target.points);
  permuted.lambda = Vector{{0.2, 0.5, 0.3}};
  const auto sol = jcpot_fit(permuted);
  CHECK((sol.h_hat.values - reference.h_hat.values).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((sol.couplings[1] - reference.couplings[0]).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("instance order invariance") {
  const auto s0 = blobs(100, 0.35, 3.0, 479);
  const auto s1 = blobs(80, 0.65, 3.0, 487);
  const auto target = blobs(90, 0.2, 3.0, 491);
  const auto reference = jcpot_fit(problem_for({s0, s1}, target.points));

  std::mt19937_64 rng(499);
  std::vector<int> order(100);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  LabeledDataset shuffled{Matrix(100, 2), std::vector<int>(100)};
  for (int i = 0; i < 100; ++i) {
    shuffled.points.row(i) = s0.points.row(order[static_cast<std::size_t>(i)]);
    shuffled.labels[static_cast<std::size_t>(i)] = s0.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }
  const auto sol = jcpot_fit(problem_for({shuffled, s1}, target.points));
  CHECK((sol.h_hat.values - reference.h_hat.values).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("jcpot errors and flags") {
  const auto source = blobs(50, 0.5, 3.0, 503);
  const auto target = blobs(40, 0.5, 3.0, 509);

  SUBCASE("missing class names the source") {
    LabeledDataset broken = source;
    for (int& y : broken.labels) y = 0;
    auto p = problem_for({source, broken}, target.points);
    p.num_classes = 2;
    try {
      jcpot_fit(p);
      FAIL("expected missing class");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kMissingClass);
      CHECK(std::string(e.what()).find("source 1") != std::string::npos);
      CHECK(std::string(e.what()).find("class 1") != std::string::npos);
    }
  }
  SUBCASE("underflow propagates") {
    auto p = problem_for({source}, target.points);
    p.epsilon = 1e-5;
    try {
      jcpot_fit(p);
      FAIL("expected underflow");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kNumericalUnderflow);
    }
  }
  SUBCASE("max_iter = 1 is flagged, not an error") {
    auto p = problem_for({source}, target.points);
    p.max_iter = 1;
    const auto sol = jcpot_fit(p);
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 1);
    CHECK(sol.h_trace.size() == 1);
    CHECK(sol.h_hat.on_simplex(1e-12));
  }
  SUBCASE("bad inputs") {
    auto p = problem_for({source}, Matrix::Zero(3, 3));
    CHECK_THROWS_AS(jcpot_fit(p), Error);
    p = problem_for({}, target.points);
    CHECK_THROWS_AS(jcpot_fit(p), Error);
    p = problem_for({source}, target.points);
    p.lambda = Vector{{0.4}};
    CHECK_THROWS_AS(jcpot_fit(p), Error);
    p.lambda = Vector();
    p.tol = 0.0;
    CHECK_THROWS_AS(jcpot_fit(p), Error);
    LabeledDataset unlabeled = source;
    unlabeled.labels[0] = -1;
    CHECK_THROWS_AS(jcpot_fit(problem_for({unlabeled}, target.points)), Error);
  }
}

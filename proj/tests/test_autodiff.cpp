#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpa/errors.hpp"
#include "gpa/ops.hpp"
#include "gpa/params.hpp"
#include "gradcheck_suite.hpp"
#include "support.hpp"

using namespace gpa;
using namespace gpa::testing;

TEST_CASE("forward op examples") {
  Tape t;
  SUBCASE("relu") {
    Var x = t.constant(Tensor::row({-1.0, 2.0}));
    Var y = relu(x);
    CHECK(y.value().values == std::vector<double>{0.0, 2.0});
  }
  SUBCASE("cosine similarity orthonormal cases") {
    Var a = t.constant(Tensor::row({1.0, 0.0}));
    CHECK(cosine_similarity(a, a).value().item() == doctest::Approx(1.0));
    Var b = t.constant(Tensor::row({0.0, 1.0}));
    CHECK(cosine_similarity(a, b).value().item() == doctest::Approx(0.0));
  }
  SUBCASE("segment_sum") {
    Var x = t.constant(Tensor::from_rows({{1, 2}, {3, 4}, {5, 6}}));
    Var y = segment_sum(x, {0, 0, 1}, 2);
    CHECK(y.value().values == std::vector<double>{4, 6, 5, 6});
  }
  SUBCASE("row_softmax rows sum to one and shift invariance") {
    Var x = t.constant(Tensor::from_rows({{1.0, 2.0, 3.0}, {100.0, 100.0, 100.0}}));
    Tensor y = row_softmax(x).value();
    for (int i = 0; i < 2; ++i) {
      double s = 0;
      for (int j = 0; j < 3; ++j) s += y.at(i, j);
      CHECK(s == doctest::Approx(1.0));
    }
    CHECK(y.at(1, 0) == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("shape errors") {
    Var a = t.constant(Tensor(2, 3));
    Var b = t.constant(Tensor(2, 4));
    CHECK_THROWS_AS(matmul(a, b), ShapeError);
    CHECK_THROWS_AS(add(a, b), ShapeError);
    Var z = t.constant(Tensor(1, 2));  // zero row
    CHECK_THROWS_AS(cosine_similarity(z, z), ZeroNormError);
  }
}

TEST_CASE("backward basics") {
  SUBCASE("x squared at 3") {
    Tape t;
    Var x = t.leaf(Tensor::scalar(3.0));
    Var loss = sum(mul(x, x));
    t.run_backward(loss);
    CHECK(t.grad(x).item() == doctest::Approx(6.0));
  }
  SUBCASE("sum of relu") {
    Tape t;
    Var x = t.leaf(Tensor::row({-1.0, 2.0}));
    t.run_backward(sum(relu(x)));
    CHECK(t.grad(x).values == std::vector<double>{0.0, 1.0});
  }
  SUBCASE("accumulation across reuse") {
    Tape t;
    Var x = t.leaf(Tensor::scalar(1.5));
    t.run_backward(sum(add(x, x)));
    CHECK(t.grad(x).item() == doctest::Approx(2.0));
  }
  SUBCASE("non-scalar loss rejected") {
    Tape t;
    Var x = t.leaf(Tensor(2, 2));
    CHECK_THROWS_AS(t.run_backward(x), NonScalarLoss);
  }
  SUBCASE("segment_sum backward scatters the segment gradient") {
    Tape t;
    Var x = t.leaf(Tensor::from_rows({{1, 1}, {2, 2}, {3, 3}}));
    Var seg = segment_sum(x, {1, 0, 1}, 2);
    Var w = t.constant(Tensor::from_rows({{2, 2}, {5, 5}}));
    t.run_backward(sum(mul(seg, w)));
    Tensor g = t.grad(x);
    CHECK(g.at(0, 0) == doctest::Approx(5.0));
    CHECK(g.at(1, 0) == doctest::Approx(2.0));
    CHECK(g.at(2, 0) == doctest::Approx(5.0));
  }
}

TEST_CASE("two-layer MLP gradient matches finite differences") {
  RngStream rng(11, 0, 0, 0);
  Tensor w1 = random_tensor(rng, 3, 5, -1, 1);
  Tensor b1 = random_tensor(rng, 1, 5, -1, 1);
  Tensor w2 = random_tensor(rng, 5, 1, -1, 1);
  Tensor x0 = random_tensor_off_kink(rng, 4, 3);
  auto net = [&](Tape& t, Var x) {
    Var h = relu(add(matmul(x, t.constant(w1)), t.constant(b1)));
    return sum(matmul(h, t.constant(w2)));
  };
  CHECK(grad_check(net, x0, 1e-5) < 1e-5);
}

TEST_CASE("grad_check edge behavior") {
  SUBCASE("quadratic form is near-exact") {
    RngStream rng(3, 0, 0, 0);
    Tensor x = random_tensor(rng, 2, 3, -1, 1);
    double err = grad_check([](Tape&, Var v) { return sum(mul(v, v)); }, x, 1e-5);
    CHECK(err < 1e-8);
  }
  SUBCASE("constant function has zero gradient both ways") {
    Tensor x = Tensor::row({1.0, 2.0});
    double err = grad_check([](Tape& t, Var v) { return sum(mul(v, t.constant(Tensor(1, 2)))); },
                            x, 1e-5);
    CHECK(err == doctest::Approx(0.0));
  }
}

TEST_CASE("all primitives pass gradcheck at random points") {
  for (const auto& pc : run_primitive_gradchecks(10, 77)) {
    INFO(pc.name);
    CHECK(pc.max_rel_err < 1e-5);
  }
}

TEST_CASE("tape determinism is bitwise") {
  auto run = [] {
    RngStream rng(9, 1, 2, 3);
    Tensor x = random_tensor(rng, 4, 3, -1, 1);
    Tensor w = random_tensor(rng, 3, 3, -1, 1);
    Tape t;
    Var xv = t.leaf(x);
    Var wv = t.leaf(w);
    Var loss = mean(mul(row_softmax(matmul(xv, wv)), matmul(xv, wv)));
    t.run_backward(loss);
    return std::make_pair(loss.value().item(), t.grad(wv).values);
  };
  auto [l1, g1] = run();
  auto [l2, g2] = run();
  CHECK(l1 == l2);
  CHECK(g1 == g2);
}

TEST_CASE("optimizer steps") {
  SUBCASE("sgd example") {
    ParamSet p;
    p.add("w", Tensor::scalar(1.0));
    GradMap g{{"w", Tensor::scalar(0.5)}};
    sgd_step(p, g, 0.1);
    CHECK(p.at("w").item() == doctest::Approx(0.95));
    GradMap zero{{"w", Tensor::scalar(0.0)}};
    sgd_step(p, zero, 0.1);
    CHECK(p.at("w").item() == doctest::Approx(0.95));
  }
  SUBCASE("adam first step is approximately lr") {
    ParamSet p;
    p.add("w", Tensor::scalar(1.0));
    AdamState st;
    GradMap g{{"w", Tensor::scalar(1.0)}};
    adam_step(p, g, 0.1, st);
    CHECK(p.at("w").item() == doctest::Approx(0.9).epsilon(1e-6));
  }
  SUBCASE("non-finite gradient throws") {
    ParamSet p;
    p.add("w", Tensor::scalar(1.0));
    GradMap g{{"w", Tensor::scalar(std::nan(""))}};
    CHECK_THROWS_AS(sgd_step(p, g, 0.1), NonFiniteGradient);
  }
}

TEST_CASE("ParamSet save/load round trip") {
  RngStream rng(5, 0, 0, 0);
  ParamSet p;
  p.add("enc.w1", random_tensor(rng, 4, 3, -1, 1));
  p.add("enc.b1", random_tensor(rng, 1, 3, -1, 1));
  p.add("score.w", random_tensor(rng, 6, 2, -1, 1));
  TempDir tmp("paramset");
  auto path = tmp.path() / "params.bin";
  p.save(path);
  ParamSet q = ParamSet::load(path);
  REQUIRE(q.size() == p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    CHECK(q.name(i) == p.name(i));
    CHECK(q.tensor(i).values == p.tensor(i).values);
    CHECK(q.tensor(i).nrows == p.tensor(i).nrows);
  }
}

TEST_CASE("uniform init is seed-deterministic and bounded") {
  RngStream a(42, 0, 0, 1), b(42, 0, 0, 1);
  Tensor ta = uniform_init(8, 4, a);
  Tensor tb = uniform_init(8, 4, b);
  CHECK(ta.values == tb.values);
  const double bound = std::sqrt(6.0 / 12.0);
  for (double x : ta.values) CHECK(std::abs(x) <= bound);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qpbound/piecewise.hpp"

using namespace qpbound;

TEST_CASE("T-partition classification and representatives") {
  CHECK(t_component_of({0, 0}) == 1);
  CHECK(t_component_of({1, 0}) == 2);
  CHECK(t_component_of({7, 0}) == 3);
  CHECK(t_component_of({0, 1}) == 4);
  CHECK(t_component_of({1, 1}) == 5);
  CHECK(t_component_of({9, 1}) == 6);
  CHECK(t_component_of({0, 5}) == 7);
  CHECK(t_component_of({1, 4}) == 8);
  CHECK(t_component_of({3, 2}) == 9);
  for (int t = 1; t <= 9; ++t)
    CHECK(t_component_of(t_representative(t)) == t);
  CHECK(enclosing_component(1) == 3);
  CHECK(enclosing_component(3) == 1);
  CHECK(enclosing_component(7) == 2);
  CHECK(enclosing_component(9) == 4);
}

TEST_CASE("evaluate") {
  CLinearFn f;
  f.f40 = 2;
  f.f41 = 3;
  CHECK(f.evaluate({5, 7}) == 17);
  CHECK(measure_indicator_origin().evaluate({0, 0}) == 1);
  CHECK(measure_indicator_origin().evaluate({1, 0}) == 0);

  TLinearSymbolic shifted = shift(measure_n1(), -kE1);
  CHECK_FALSE(shifted.in_domain(1));
  CHECK_THROWS_AS(shifted.evaluate_concrete({0, 0}), Error);
}

TEST_CASE("embed") {
  TLinearSymbolic ind = embed(measure_indicator_origin());
  CHECK(ind.domain_size() == 9);
  CHECK(ind.h(1, 0).constant() == 1);
  for (int t = 2; t <= 9; ++t)
    for (int i = 0; i < 3; ++i) CHECK(ind.h(t, i).constant() == 0);

  TLinearSymbolic n1 = embed(measure_n1());
  for (int t : {2, 3, 5, 6, 8, 9}) CHECK(n1.h(t, 1).constant() == 1);
  for (int t : {1, 4, 7}) CHECK(n1.h(t, 1).constant() == 0);

  TLinearSymbolic zero = embed(CLinearFn{});
  for (int t = 1; t <= 9; ++t)
    for (int i = 0; i < 3; ++i) CHECK(zero.h(t, i).is_zero());
}

TEST_CASE("shift worked examples") {
  // h(n) = n1 on the interior, shifted by -e1.
  CLinearFn h;
  h.f41 = 1;
  TLinearSymbolic s = shift(h, -kE1);
  CHECK(s.h(9, 0).constant() == -1);
  CHECK(s.h(9, 1).constant() == 1);
  CHECK(s.h(9, 2).constant() == 0);

  // Zero shift is the embedding.
  std::mt19937_64 rng(1);
  CLinearFn f = random_clinear(rng);
  TLinearSymbolic via_shift = shift(f, kZero);
  TLinearSymbolic via_embed = embed(f);
  for (int t = 1; t <= 9; ++t)
    for (int i = 0; i < 3; ++i)
      CHECK(via_shift.h(t, i).constant() == via_embed.h(t, i).constant());

  // Indicator of the origin shifted by -d1 is the indicator of (1,1).
  TLinearSymbolic ind = shift(measure_indicator_origin(), -kD1);
  CHECK(ind.domain_mask() == ((1u << 4) | (1u << 5) | (1u << 7) | (1u << 8)));
  CHECK(ind.evaluate_concrete({1, 1}) == 1);
  CHECK(ind.evaluate_concrete({2, 1}) == 0);
  CHECK(ind.evaluate_concrete({1, 2}) == 0);
  CHECK(ind.evaluate_concrete({5, 5}) == 0);
}

TEST_CASE("shift equals pointwise composition exactly") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    CLinearFn f = random_clinear(rng);
    for (Step u : kAllSteps) {
      TLinearSymbolic s = shift(f, u);
      for (long n2 = 0; n2 <= 30; ++n2)
        for (long n1 = 0; n1 <= 30; ++n1) {
          Point n{n1, n2};
          Point moved = n + u;
          if (!moved.in_quarter_plane()) continue;
          if (!s.in_domain(t_component_of(n))) continue;
          CHECK(s.evaluate_concrete(n) == f.evaluate(moved));
        }
    }
  }
}

TEST_CASE("shift domain covers exactly the states that stay inside") {
  for (Step u : kAllSteps) {
    TLinearSymbolic s = shift(CLinearFn{}, u);
    for (int t = 1; t <= 9; ++t) {
      Point rep = t_representative(t);
      CHECK(s.in_domain(t) == (rep + u).in_quarter_plane());
    }
  }
}

TEST_CASE("nonnegativity inequality count") {
  std::mt19937_64 rng(7);
  TLinearSymbolic full = random_concrete_tlinear(rng);
  CHECK(nonneg_inequalities(full).size() == 15);

  TLinearSymbolic restricted = full;
  restricted.restrict_domain((1u << 4) | (1u << 5) | (1u << 7) | (1u << 8));
  CHECK(nonneg_inequalities(restricted).size() == 8);

  // h(n) = n1 - 2 everywhere: the origin inequality evaluates to -2.
  CLinearFn g;
  g.f10 = -2;
  g.f11 = 1;
  g.f20 = -2;
  g.f30 = -2;
  g.f40 = -2;
  g.f41 = 1;
  auto ineqs = nonneg_inequalities(embed(g));
  CHECK(ineqs.front().t == 1);
  CHECK(ineqs.front().expr.constant() == -2);
}

TEST_CASE("nonnegativity inequalities match brute force") {
  std::mt19937_64 rng(99);
  int checked_positive = 0, checked_violated = 0;
  for (int trial = 0; trial < 500; ++trial) {
    TLinearSymbolic h = random_concrete_tlinear(rng);
    bool all_hold = true;
    for (const auto& iq : nonneg_inequalities(h)) {
      if (iq.expr.constant() < 0) {
        all_hold = false;
        Point w = nonneg_violation_witness(h, iq);
        CHECK(h.evaluate_concrete(w) < 0);
        ++checked_violated;
      }
    }
    if (all_hold) {
      double lowest = 0;
      for (long n2 = 0; n2 <= 200; ++n2)
        for (long n1 = 0; n1 <= 200; ++n1)
          lowest = std::min(lowest, h.evaluate_concrete({n1, n2}));
      CHECK(lowest >= 0);
      ++checked_positive;
    }
  }
  CHECK(checked_violated > 0);  // the sample hit both sides
}

TEST_CASE("expectation closed forms") {
  GeometricProductForm r(0.3, 0.45);
  CHECK(expectation(measure_indicator_origin(), r) ==
        doctest::Approx(0.7 * 0.55).epsilon(1e-14));
  CHECK(expectation(measure_n1(), r) == doctest::Approx(0.3 / 0.7).epsilon(1e-14));
  CLinearFn one;
  one.f10 = one.f20 = one.f30 = one.f40 = 1;
  CHECK(expectation(one, r) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("expectation agrees with the truncated sum") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> unif(0.05, 0.9);
  for (int trial = 0; trial < 100; ++trial) {
    CLinearFn f = random_clinear(rng);
    GeometricProductForm r(unif(rng), unif(rng));
    double closed = expectation(f, r);
    double summed = 0;
    for (long n2 = 300; n2 >= 0; --n2)
      for (long n1 = 300; n1 >= 0; --n1)
        summed += f.evaluate({n1, n2}) * r.pi({n1, n2});
    CHECK(closed == doctest::Approx(summed).epsilon(0).scale(1).epsilon(1e-12));
    CHECK(std::abs(closed - summed) <= 1e-8);
  }
}

TEST_CASE("expectation and inequality emission are linear in the function") {
  std::mt19937_64 rng(321);
  GeometricProductForm r(0.35, 0.6);
  for (int trial = 0; trial < 50; ++trial) {
    CLinearFn f = random_clinear(rng);
    CLinearFn g = random_clinear(rng);
    double alpha = 0.75, beta = -1.25;
    CLinearFn combo;
    for (int k = 1; k <= 4; ++k)
      for (int i = 0; i < 3; ++i)
        if (clinear_slot_exists(k, i))
          combo.set_coef(k, i, alpha * f.coef(k, i) + beta * g.coef(k, i));
    CHECK(expectation(combo, r) ==
          doctest::Approx(alpha * expectation(f, r) + beta * expectation(g, r))
              .epsilon(1e-12));

    auto if_ = nonneg_inequalities(embed(f));
    auto ig = nonneg_inequalities(embed(g));
    auto ic = nonneg_inequalities(embed(combo));
    REQUIRE(if_.size() == ic.size());
    for (size_t idx = 0; idx < ic.size(); ++idx)
      CHECK(ic[idx].expr.constant() ==
            doctest::Approx(alpha * if_[idx].expr.constant() +
                            beta * ig[idx].expr.constant())
                .epsilon(1e-12));
  }
}

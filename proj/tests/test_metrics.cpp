#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "fcstgnn/errors.hpp"
#include "fcstgnn/metrics.hpp"
#include "fcstgnn/rng.hpp"

using namespace fcstgnn;

TEST_CASE("rmse hand values") {
  CHECK(metric_rmse({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  // Squared errors 9 and 16 mean to 12.5.
  CHECK(metric_rmse({3.0, 4.0}, {0.0, 0.0}) ==
        doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
  CHECK(metric_rmse({-2.0}, {2.0}) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("asymmetric score hand values") {
  CHECK(metric_nasa_score({10.0}, {10.0}) == 0.0);
  // Early by 13 and late by 10 both land on exp(1) - 1.
  CHECK(std::abs(metric_nasa_score({0.0}, {13.0}) - (std::exp(1.0) - 1.0)) <= 1e-9);
  CHECK(std::abs(metric_nasa_score({23.0}, {13.0}) - (std::exp(1.0) - 1.0)) <= 1e-9);
  // Late by 13 is penalized harder than early by 13.
  CHECK(std::abs(metric_nasa_score({26.0}, {13.0}) - (std::exp(1.3) - 1.0)) <= 1e-9);
  CHECK(metric_nasa_score({26.0}, {13.0}) > metric_nasa_score({0.0}, {13.0}));
  // Contributions sum instead of averaging.
  const double one = metric_nasa_score({0.0}, {13.0});
  const double two = metric_nasa_score({0.0, 0.0}, {13.0, 13.0});
  CHECK(std::abs(two - 2.0 * one) <= 1e-9);
}

TEST_CASE("accuracy hand values") {
  CHECK(metric_accuracy({0, 1, 2}, {0, 1, 2}) == 1.0);
  CHECK(metric_accuracy({0, 0, 0, 0}, {0, 1, 0, 1}) == 0.5);
  CHECK(metric_accuracy({1}, {0}) == 0.0);
}

TEST_CASE("macro F1 hand values") {
  // Everything predicted class 0 against targets {0,1}: class 0 gets
  // precision 1/2 recall 1 (F1 = 2/3), class 1 gets 0, macro 1/3.
  std::vector<ClassStats> table;
  const double f1 = metric_macro_f1({0, 0}, {0, 1}, &table);
  CHECK(f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  REQUIRE(table.size() == 2);
  CHECK(table[0].cls == 0);
  CHECK(table[0].tp == 1);
  CHECK(table[0].fp == 1);
  CHECK(table[0].fn == 0);
  CHECK(table[0].precision == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(table[0].recall == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(table[0].f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(table[1].cls == 1);
  CHECK(table[1].f1 == 0.0);

  CHECK(metric_macro_f1({0, 1, 2}, {0, 1, 2}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("macro F1 skips classes absent from both sides") {
  // Only classes 0 and 2 appear anywhere; class 1 must not drag the mean.
  std::vector<ClassStats> table;
  const double f1 = metric_macro_f1({0, 2, 0, 2}, {0, 2, 2, 0}, &table);
  REQUIRE(table.size() == 2);
  CHECK(table[0].cls == 0);
  CHECK(table[1].cls == 2);
  // Each class: tp=1, fp=1, fn=1, so F1 = 1/2 for both.
  CHECK(f1 == doctest::Approx(0.5).epsilon(1e-12));

  // A class present only in predictions still counts (with F1 = 0).
  const double with_spurious = metric_macro_f1({0, 1}, {0, 0});
  CHECK(with_spurious == doctest::Approx((2.0 / 3.0 + 0.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("pairwise metrics are invariant to sample order") {
  Rng rng(61);
  const int n = 40;
  std::vector<double> pred_r(n), target_r(n);
  std::vector<int> pred_c(n), target_c(n);
  for (int i = 0; i < n; ++i) {
    pred_r[static_cast<size_t>(i)] = rng.uniform(0.0, 50.0);
    target_r[static_cast<size_t>(i)] = rng.uniform(0.0, 50.0);
    pred_c[static_cast<size_t>(i)] = static_cast<int>(rng.below(4));
    target_c[static_cast<size_t>(i)] = static_cast<int>(rng.below(4));
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  Rng shuffle_rng(62);
  shuffle_rng.shuffle(order);

  std::vector<double> pred_r2(n), target_r2(n);
  std::vector<int> pred_c2(n), target_c2(n);
  for (int i = 0; i < n; ++i) {
    pred_r2[static_cast<size_t>(i)] = pred_r[static_cast<size_t>(order[static_cast<size_t>(i)])];
    target_r2[static_cast<size_t>(i)] = target_r[static_cast<size_t>(order[static_cast<size_t>(i)])];
    pred_c2[static_cast<size_t>(i)] = pred_c[static_cast<size_t>(order[static_cast<size_t>(i)])];
    target_c2[static_cast<size_t>(i)] = target_c[static_cast<size_t>(order[static_cast<size_t>(i)])];
  }

  CHECK(std::abs(metric_rmse(pred_r, target_r) - metric_rmse(pred_r2, target_r2)) <= 1e-12);
  CHECK(std::abs(metric_nasa_score(pred_r, target_r) -
                 metric_nasa_score(pred_r2, target_r2)) <= 1e-9);
  CHECK(metric_accuracy(pred_c, target_c) == metric_accuracy(pred_c2, target_c2));
  CHECK(std::abs(metric_macro_f1(pred_c, target_c) -
                 metric_macro_f1(pred_c2, target_c2)) <= 1e-12);
}

TEST_CASE("metric inputs must pair up") {
  CHECK_THROWS_AS(metric_rmse({1.0}, {1.0, 2.0}), ShapeError);
  CHECK_THROWS_AS(metric_rmse({}, {}), ShapeError);
  CHECK_THROWS_AS(metric_nasa_score({1.0, 2.0}, {1.0}), ShapeError);
  CHECK_THROWS_AS(metric_accuracy({0}, {}), ShapeError);
  CHECK_THROWS_AS(metric_macro_f1({}, {}), ShapeError);
}

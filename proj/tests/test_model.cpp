#include <algorithm>

#include "doctest.h"
#include "ljsr/model.hpp"
#include "ljsr/recovery.hpp"
#include "ljsr/rng.hpp"

using namespace ljsr;

TEST_SUITE("model") {
  TEST_CASE("make_random_lrjs plants the requested rank and support") {
    SUBCASE("single nonzero row, rank 1") {
      const SignalMatrix X = make_random_lrjs(8, 6, 1, 1, 0);
      CHECK(joint_support(X, 1e-12).size() == 1);
      CHECK(numerical_rank(X.values) == 1);
    }
    SUBCASE("rank 4 on 10 rows") {
      const SignalMatrix X = make_random_lrjs(64, 40, 4, 10, 7);
      CHECK(numerical_rank(X.values) == 4);
      const auto support = joint_support(X, 1e-12);
      CHECK(support.size() == 10);
      CHECK(support == *X.true_support);
    }
    SUBCASE("infeasible parameters rejected") {
      CHECK_THROWS_AS(make_random_lrjs(8, 6, 3, 2, 0), std::invalid_argument);   // r > k
      CHECK_THROWS_AS(make_random_lrjs(8, 6, 7, 8, 0), std::invalid_argument);   // r > N
      CHECK_THROWS_AS(make_random_lrjs(8, 6, 2, 9, 0), std::invalid_argument);   // k > n
    }
    SUBCASE("seed determinism") {
      const SignalMatrix a = make_random_lrjs(16, 8, 2, 5, 42);
      const SignalMatrix b = make_random_lrjs(16, 8, 2, 5, 42);
      CHECK((a.values - b.values).norm() == 0.0);
      const SignalMatrix c = make_random_lrjs(16, 8, 2, 5, 43);
      CHECK((a.values - c.values).norm() > 0.0);
    }
  }

  TEST_CASE("make_random_lrjs invariant holds over seeds") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const SignalMatrix X = make_random_lrjs(24, 12, 3, 6, seed);
      CHECK(numerical_rank(X.values) == 3);
      CHECK(joint_support(X, 1e-9).size() == 6);
    }
  }

  TEST_CASE("dynamic phantom is periodic, low rank and gradient sparse") {
    SUBCASE("period 1 collapses to rank 1") {
      const SignalMatrix X = make_dynamic_phantom({16, 16, 10, 1, 0, 0});
      CHECK(numerical_rank(X.values) == 1);
      for (Index t = 1; t < X.frames(); ++t)
        CHECK((X.values.col(t) - X.values.col(0)).norm() == 0.0);
    }
    SUBCASE("32x32, period 6") {
      const SignalMatrix X = make_dynamic_phantom({32, 32, 60, 6, 0, 1});
      CHECK(*X.true_rank == 6);
      CHECK(numerical_rank(X.values) == 6);
      // bit-exact periodicity
      for (Index t = 0; t + 6 < X.frames(); ++t)
        CHECK((X.values.col(t) - X.values.col(t + 6)).norm() == 0.0);
      // joint gradient support far below the pixel count
      const FrameShape shape = *X.frame_shape;
      const MatC gx = grad_x(X.values, shape);
      const MatC gy = grad_y(X.values, shape);
      MatC g(gx.rows(), gx.cols() + gy.cols());
      g << gx, gy;
      const auto support = joint_support(g, 1e-12);
      CHECK(support.size() < static_cast<std::size_t>(shape.pixels()) / 2);
      CHECK(support.size() > 0);
    }
    SUBCASE("precondition violations") {
      CHECK_THROWS_AS(make_dynamic_phantom({32, 32, 4, 6, 0, 0}), std::invalid_argument);
      CHECK_THROWS_AS(make_dynamic_phantom({3, 32, 10, 2, 0, 0}), std::invalid_argument);
      CHECK_THROWS_AS(make_dynamic_phantom({32, 32, 10, 0, 0, 0}), std::invalid_argument);
    }
  }

  TEST_CASE("truncated_svd reproduces the matrix and is deterministic") {
    SUBCASE("single nonzero column") {
      MatC X = MatC::Zero(5, 4);
      X(0, 2) = Complex(3.0, 0.0);
      X(2, 2) = Complex(4.0, 0.0);
      const SVDFactors f = truncated_svd(X, 1);
      CHECK(f.S[0] == doctest::Approx(5.0).epsilon(1e-12));
      // one-hot row of V, real-positive by the phase convention
      CHECK(std::abs(f.V(0, 2) - Complex(1.0, 0.0)) < 1e-12);
      CHECK(f.V.row(0).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("reconstruction at the true rank") {
      const SignalMatrix X = make_random_lrjs(32, 20, 4, 8, 3);
      const SVDFactors f = truncated_svd(X, 4);
      const MatC back = f.U * f.S.asDiagonal() * f.V;
      CHECK((back - X.values).norm() / X.values.norm() < 1e-10);
      CHECK((f.U.adjoint() * f.U - MatC::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((f.V * f.V.adjoint() - MatC::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
      for (int i = 1; i < 4; ++i) CHECK(f.S[i] <= f.S[i - 1]);
    }
    SUBCASE("rank above numerical rank fails") {
      const SignalMatrix X = make_random_lrjs(16, 10, 4, 6, 5);
      CHECK_THROWS(truncated_svd(X, 5));
      CHECK_THROWS_AS(truncated_svd(X.values, 0), std::invalid_argument);
      CHECK_THROWS_AS(truncated_svd(X.values, 11), std::invalid_argument);
    }
  }

  TEST_CASE("spark oracle") {
    SUBCASE("identity has full spark") {
      CHECK(spark_bruteforce(MatC::Identity(2, 2)) == 3);
      CHECK(spark_bruteforce(MatC::Identity(4, 4)) == 5);
    }
    SUBCASE("duplicate column gives spark 2") {
      Rng rng(1);
      MatC A = rng.cgaussian_matrix(4, 6);
      A.col(5) = A.col(1);
      const SparkCertificate c = spark_bruteforce_detail(A);
      CHECK(c.spark == 2);
      CHECK(c.columns == std::vector<int>{1, 5});
      // witness: the null vector annihilates those columns
      MatC sub(4, 2);
      sub.col(0) = A.col(1);
      sub.col(1) = A.col(5);
      CHECK((sub * c.null_vector).norm() < 1e-10 * sub.norm());
    }
    SUBCASE("zero column gives spark 1") {
      Rng rng(2);
      MatC A = rng.cgaussian_matrix(4, 5);
      A.col(3).setZero();
      CHECK(spark_bruteforce(A) == 1);
    }
    SUBCASE("random wide matrices have spark m+1") {
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Rng rng(seed);
        CHECK(spark_bruteforce(rng.cgaussian_matrix(4, 8)) == 5);
      }
    }
    SUBCASE("spark never exceeds rank + 1") {
      for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Rng rng(seed * 17 + 1);
        const MatC A = rng.cgaussian_matrix(3 + static_cast<int>(seed % 3), 7);
        CHECK(spark_bruteforce(A) <= numerical_rank(A) + 1);
      }
    }
    SUBCASE("spark_at_least agrees with the full oracle") {
      Rng rng(9);
      const MatC A = rng.cgaussian_matrix(4, 8);  // spark 5
      CHECK(spark_at_least(A, 5));
      CHECK(spark_at_least(A, 4));
      CHECK(!spark_at_least(A, 6));
    }
    SUBCASE("size guard") {
      Rng rng(3);
      CHECK_THROWS_AS(spark_bruteforce(rng.cgaussian_matrix(2, 25)), std::invalid_argument);
    }
  }

  TEST_CASE("joint_support") {
    SUBCASE("zero matrix has empty support") {
      SignalMatrix X;
      X.values = MatC::Zero(6, 3);
      CHECK(joint_support(X, 1e-9).empty());
    }
    SUBCASE("planted support recovered") {
      const SignalMatrix X = make_random_lrjs(32, 10, 2, 10, 11);
      CHECK(joint_support(X, 1e-9) == *X.true_support);
    }
    SUBCASE("tol = 0 on a dense matrix keeps every row") {
      Rng rng(4);
      SignalMatrix X;
      X.values = rng.cgaussian_matrix(7, 3);
      CHECK(joint_support(X, 0.0).size() == 7);
    }
  }

  TEST_CASE("degrees_of_freedom") {
    CHECK(degrees_of_freedom(1, 1, 1, 1) == 1);
    CHECK(degrees_of_freedom(64, 40, 4, 10) == 184);
    CHECK(degrees_of_freedom(16, 5, 5, 5) == 25);  // square full case k=r=N
    CHECK_THROWS_AS(degrees_of_freedom(8, 6, 3, 2), std::invalid_argument);
  }
}

#include <cmath>

#include "doctest.h"
#include "ljsr/analysis.hpp"
#include "ljsr/model.hpp"
#include "ljsr/recovery.hpp"
#include "ljsr/rng.hpp"
#include "ljsr/sampling.hpp"
#include "ljsr/subspace.hpp"

using namespace ljsr;

namespace {

struct Instance {
  SignalMatrix X;
  VariableOperatorSet vset;
  SubspaceEstimate est;
  std::vector<VecC> Y;
};

/// Identifiable noiseless dense-Gaussian instance with consecutive
/// clustering; the stacked cluster operators have full column rank.
Instance make_identifiable(int n, int N, int r, int k, int p, int m_v, std::uint64_t seed) {
  Instance ins;
  ins.X = make_random_lrjs(n, N, r, k, seed);
  ins.vset = build_variable_set(ClusterScheme::Consecutive, p, N, m_v,
                                {OperatorKind::DenseGaussian, n, {}}, seed + 1);
  const MeasurementOperator phi = build_common_gaussian(r, n, seed + 2);
  const MeasurementSet ms = measure(ins.X, phi, ins.vset, 0.0, seed);
  ins.est = estimate_right_subspace(gram(ms.Z));
  ins.Y = ms.Y;
  return ins;
}

}  // namespace

TEST_SUITE("recovery") {
  TEST_CASE("block system structure") {
    Rng rng(3);
    SUBCASE("rank-one forward is v_i * (A_i p)") {
      const int n = 10, N = 4;
      const auto vset = build_variable_set(ClusterScheme::Consecutive, 2, N, 3,
                                           {OperatorKind::DenseGaussian, n, {}}, 5);
      MatC Q(1, N);
      for (int i = 0; i < N; ++i) Q(0, i) = rng.cgaussian();
      const BlockSystem B = assemble_block_system(vset, Q);
      const MatC p = rng.cgaussian_matrix(n, 1);
      const auto blocks = B.forward(p);
      for (int i = 0; i < N; ++i) {
        const VecC expect = Q(0, i) * vset.op(i).apply(p.col(0));
        CHECK((blocks[i] - expect).norm() <= 1e-14 * expect.norm());
      }
    }
    SUBCASE("zero coefficients give zero measurements") {
      const auto vset = build_variable_set(ClusterScheme::Periodic, 2, 6, 2,
                                           {OperatorKind::DenseGaussian, 8, {}}, 7);
      const BlockSystem B = assemble_block_system(vset, MatC::Ones(2, 6));
      for (const auto& b : B.forward(MatC::Zero(8, 2))) CHECK(b.norm() == 0.0);
    }
    SUBCASE("implicit operator matches the dense materialization") {
      const int n = 12, N = 5, r = 2;
      const auto vset = build_variable_set(ClusterScheme::Consecutive, 2, N, 4,
                                           {OperatorKind::DenseGaussian, n, {}}, 11);
      const MatC Q = rng.cgaussian_matrix(r, N);
      const BlockSystem B = assemble_block_system(vset, Q);
      const MatC D = B.dense_materialize();
      REQUIRE(D.rows() == B.total_rows);
      REQUIRE(D.cols() == n * r);
      for (int t = 0; t < 5; ++t) {
        const MatC P = rng.cgaussian_matrix(n, r);
        // vec(P) stacks the columns of P
        VecC vp(n * r);
        for (int j = 0; j < r; ++j) vp.segment(j * n, n) = P.col(j);
        const auto blocks = B.forward(P);
        VecC stacked(B.total_rows);
        Index at = 0;
        for (const auto& b : blocks) {
          stacked.segment(at, b.size()) = b;
          at += b.size();
        }
        CHECK((stacked - D * vp).norm() <= 1e-12 * stacked.norm());
      }
    }
    SUBCASE("adjoint identity") {
      const int n = 9, N = 6, r = 3;
      const auto vset = build_variable_set(ClusterScheme::Permuted, 3, N, 2,
                                           {OperatorKind::DenseGaussian, n, {}}, 13);
      const BlockSystem B = assemble_block_system(vset, rng.cgaussian_matrix(r, N));
      for (int t = 0; t < 20; ++t) {
        const MatC u = rng.cgaussian_matrix(n, r);
        std::vector<VecC> w(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) w[i] = rng.cgaussian_vector(vset.op(i).rows());
        const auto Bu = B.forward(u);
        Complex lhs(0, 0);
        for (int i = 0; i < N; ++i) lhs += (Bu[i].adjoint() * w[i])(0, 0);
        const Complex rhs = (u.conjugate().cwiseProduct(B.adjoint(w))).sum();
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + std::abs(rhs) + 1e-30));
      }
    }
    SUBCASE("dimension guards") {
      const auto vset = build_variable_set(ClusterScheme::Consecutive, 2, 4, 2,
                                           {OperatorKind::DenseGaussian, 8, {}}, 1);
      CHECK_THROWS_AS(assemble_block_system(vset, MatC::Ones(2, 5)), std::invalid_argument);
      const BlockSystem B = assemble_block_system(vset, MatC::Ones(2, 4));
      CHECK_THROWS_AS(B.forward(MatC::Zero(7, 2)), std::invalid_argument);
    }
  }

  TEST_CASE("least squares recovery") {
    SUBCASE("identifiable noiseless instance is exact") {
      const Instance ins = make_identifiable(20, 12, 2, 5, 6, 4, 17);
      // stacked cluster operators have full column rank -> spark n+1 >= 2k
      const Theorem3Check chk =
          check_theorem3(stack_cluster_operators(ins.vset), 5, ins.est, ins.vset.cluster_map);
      REQUIRE(chk.satisfied);
      const LeastSquaresResult res = solve_least_squares(assemble_block_system(ins.vset, ins.est),
                                                         ins.Y, 1e-12, 500);
      CHECK(res.converged);
      const SignalMatrix Xhat = reconstruct(res.P, ins.est);
      CHECK(relative_error(Xhat.values, ins.X.values) < 1e-6);
    }
    SUBCASE("zero measurements give zero coefficients") {
      const Instance ins = make_identifiable(16, 8, 2, 4, 4, 3, 23);
      std::vector<VecC> Y0;
      for (const auto& y : ins.Y) Y0.push_back(VecC::Zero(y.size()));
      const LeastSquaresResult res =
          solve_least_squares(assemble_block_system(ins.vset, ins.est), Y0, 1e-10, 100);
      CHECK(res.P.norm() == 0.0);
      CHECK(res.converged);
    }
    SUBCASE("duplicate frames make the minimizer non-unique") {
      Rng rng(41);
      VariableOperatorSet vset;
      vset.cluster_ops.push_back(MeasurementOperator::dense_gaussian(4, 8, rng));
      vset.cluster_map = {0, 0};  // two frames, one operator
      MatC Q(1, 2);
      Q << 1.0, 1.0;  // and the same subspace column
      const BlockSystem B = assemble_block_system(vset, Q);
      const VecC p_true = rng.cgaussian_vector(8);
      const auto Y = B.forward(p_true);
      const LeastSquaresResult res = solve_least_squares(B, Y, 1e-10, 200);
      CHECK(res.converged);  // consistent system, residual reaches zero
      double gap = 0.0;
      CHECK(!least_squares_minimizer_unique(B, Y, 1e-10, 200, 5, &gap));
      CHECK(gap > 1e-3);
      // a full-column-rank instance passes the same probe
      const Instance ok = make_identifiable(16, 8, 2, 4, 4, 5, 29);
      CHECK(least_squares_minimizer_unique(assemble_block_system(ok.vset, ok.est), ok.Y, 1e-10,
                                           800, 5, &gap));
    }
  }

  TEST_CASE("periodic-difference gradients") {
    const FrameShape shape{6, 5};
    Rng rng(19);
    SUBCASE("constant images have zero gradient") {
      const MatC P = MatC::Constant(30, 2, Complex(3.25, -1.0));
      CHECK(grad_x(P, shape).norm() == 0.0);
      CHECK(grad_y(P, shape).norm() == 0.0);
    }
    SUBCASE("adjoint identities") {
      for (int t = 0; t < 20; ++t) {
        const MatC u = rng.cgaussian_matrix(30, 3);
        const MatC w = rng.cgaussian_matrix(30, 3);
        const Complex lx = (grad_x(u, shape).conjugate().cwiseProduct(w)).sum();
        const Complex rx = (u.conjugate().cwiseProduct(grad_x_adj(w, shape))).sum();
        CHECK(std::abs(lx - rx) <= 1e-12 * (std::abs(lx) + std::abs(rx) + 1e-30));
        const Complex ly = (grad_y(u, shape).conjugate().cwiseProduct(w)).sum();
        const Complex ry = (u.conjugate().cwiseProduct(grad_y_adj(w, shape))).sum();
        CHECK(std::abs(ly - ry) <= 1e-12 * (std::abs(ly) + std::abs(ry) + 1e-30));
      }
    }
    SUBCASE("impulse hits exactly two pixels per direction") {
      MatC P = MatC::Zero(30, 1);
      P(2 + 6 * 3, 0) = 1.0;  // pixel (2, 3)
      for (const MatC& g : {grad_x(P, shape), grad_y(P, shape)}) {
        int nonzero = 0;
        for (Index i = 0; i < g.rows(); ++i)
          if (std::abs(g(i, 0)) > 0.0) ++nonzero;
        CHECK(nonzero == 2);
      }
    }
    SUBCASE("shape guard") {
      CHECK_THROWS_AS(grad_x(MatC::Zero(29, 1), shape), std::invalid_argument);
    }
  }

  TEST_CASE("group shrinkage") {
    SUBCASE("scalar case: 3 shrinks to 2 under threshold 1") {
      MatC vx(1, 1), vy(1, 1);
      vx << Complex(3.0, 0.0);
      vy << Complex(0.0, 0.0);
      const auto [gx, gy] = group_shrink(vx, vy, 1.0);
      CHECK(std::abs(gx(0, 0) - Complex(2.0, 0.0)) < 1e-15);
      CHECK(std::abs(gy(0, 0)) == 0.0);
    }
    SUBCASE("deadzone zeroes small groups") {
      Rng rng(2);
      const MatC vx = rng.cgaussian_matrix(10, 2);
      const MatC vy = rng.cgaussian_matrix(10, 2);
      const auto [gx, gy] = group_shrink(vx, vy, 1e9);
      CHECK(gx.norm() == 0.0);
      CHECK(gy.norm() == 0.0);
    }
    SUBCASE("zero threshold is the identity") {
      Rng rng(3);
      const MatC vx = rng.cgaussian_matrix(7, 3);
      const MatC vy = rng.cgaussian_matrix(7, 3);
      const auto [gx, gy] = group_shrink(vx, vy, 0.0);
      CHECK((gx - vx).norm() == 0.0);
      CHECK((gy - vy).norm() == 0.0);
    }
    SUBCASE("non-expansiveness") {
      Rng rng(4);
      for (int t = 0; t < 25; ++t) {
        const MatC ax = rng.cgaussian_matrix(8, 2), ay = rng.cgaussian_matrix(8, 2);
        const MatC bx = rng.cgaussian_matrix(8, 2), by = rng.cgaussian_matrix(8, 2);
        const double thr = std::abs(rng.gaussian());
        const auto [sax, say] = group_shrink(ax, ay, thr);
        const auto [sbx, sby] = group_shrink(bx, by, thr);
        const double moved = std::sqrt((sax - sbx).squaredNorm() + (say - sby).squaredNorm());
        const double dist = std::sqrt((ax - bx).squaredNorm() + (ay - by).squaredNorm());
        CHECK(moved <= dist + 1e-12);
      }
    }
  }

  TEST_CASE("admm recovery") {
    SUBCASE("lambda -> 0 matches least squares on an identifiable instance") {
      Instance ins = make_identifiable(20, 12, 2, 5, 6, 4, 31);
      ins.X.frame_shape = FrameShape{4, 5};  // 4*5 = 20 pixels
      const BlockSystem B = assemble_block_system(ins.vset, ins.est);
      const LeastSquaresResult ls = solve_least_squares(B, ins.Y, 1e-12, 1000);
      REQUIRE(ls.converged);
      ADMMConfig cfg;
      cfg.lambda = 1e-12;
      cfg.beta = 1.0;
      cfg.max_outer = 40;
      cfg.pcg_tol = 1e-12;
      cfg.pcg_max = 400;
      cfg.stop_tol = 1e-9;
      const ADMMResult res = admm_recover(ins.Y, ins.vset, ins.est, *ins.X.frame_shape, cfg);
      CHECK((res.P - ls.P).norm() / ls.P.norm() < 1e-5);
    }
    SUBCASE("zero data is a fixed point at the first iteration") {
      Instance ins = make_identifiable(16, 8, 2, 4, 4, 3, 37);
      ins.X.frame_shape = FrameShape{4, 4};
      std::vector<VecC> Y0;
      for (const auto& y : ins.Y) Y0.push_back(VecC::Zero(y.size()));
      ADMMConfig cfg;
      cfg.lambda = 1e-3;
      const ADMMResult res = admm_recover(Y0, ins.vset, ins.est, *ins.X.frame_shape, cfg);
      CHECK(res.P.norm() == 0.0);
      CHECK(res.report.iterations_run == 1);
      CHECK(res.report.converged);
    }
    SUBCASE("TV recovery of the phantom from undersampled lines") {
      const SignalMatrix X = make_dynamic_phantom({16, 16, 12, 3, 0, 5});
      REQUIRE(*X.true_rank == 3);
      const auto vset = build_variable_set(ClusterScheme::Consecutive, 4, 12, 4,
                                           {OperatorKind::FourierLines, 256, {16, 16}}, 6);
      const MeasurementOperator phi = build_common_fourier(16, 16, 2, 7);
      const MeasurementSet ms = measure(X, phi, vset, 0.0, 8);
      const SubspaceEstimate est = estimate_right_subspace(gram(ms.Z));
      REQUIRE(est.r_est == 3);
      ADMMConfig cfg;
      cfg.lambda = 1e-4;
      cfg.beta = 32.0;
      cfg.max_outer = 150;
      cfg.pcg_tol = 1e-9;
      cfg.pcg_max = 120;
      cfg.stop_tol = 1e-6;
      const ADMMResult res = admm_recover(ms.Y, vset, est, *X.frame_shape, cfg, &X);
      REQUIRE(res.report.final_relative_error.has_value());
      CHECK(*res.report.final_relative_error < 1e-3);
      // the reported objective settles: final value within 1% of the best seen
      const auto& obj = res.report.objective_trace;
      const double best = *std::min_element(obj.begin(), obj.end());
      CHECK(obj.back() <= 1.01 * best + 1e-30);
      if (res.report.converged)
        CHECK(res.report.primal_residual_trace.back() <= cfg.stop_tol);
    }
    SUBCASE("subspace factor invariance of the product P Q") {
      Rng rng(43);
      const Instance ins = make_identifiable(18, 10, 2, 4, 5, 4, 41);
      const BlockSystem B1 = assemble_block_system(ins.vset, ins.est);
      const LeastSquaresResult r1 = solve_least_squares(B1, ins.Y, 1e-12, 800);
      // well-conditioned nonsingular mixing factor
      Eigen::HouseholderQR<MatC> qr(rng.cgaussian_matrix(2, 2));
      MatC T = qr.householderQ();
      T.col(0) *= 2.0;
      const MatC QT = T * ins.est.Q;
      const BlockSystem B2 = assemble_block_system(ins.vset, QT);
      const LeastSquaresResult r2 = solve_least_squares(B2, ins.Y, 1e-12, 800);
      REQUIRE(r1.converged);
      REQUIRE(r2.converged);
      const MatC X1 = r1.P * ins.est.Q;
      const MatC X2 = r2.P * QT;
      CHECK((X1 - X2).norm() / X1.norm() < 1e-8);
    }
    SUBCASE("config validation") {
      ADMMConfig bad;
      bad.lambda = 0.0;
      CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
      bad = ADMMConfig{};
      bad.pcg_tol = 2.0;
      CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
  }

  TEST_CASE("reconstruct and relative error") {
    Rng rng(51);
    SUBCASE("factor cancellation") {
      const SignalMatrix X = make_random_lrjs(14, 9, 3, 5, 47);
      const SVDFactors f = truncated_svd(X, 3);
      const MatC R = rng.cgaussian_matrix(3, 3);
      const MatC P = f.U * f.S.asDiagonal() * R.inverse();
      const MatC Q = R * f.V;
      CHECK((reconstruct(P, Q).values - X.values).norm() / X.values.norm() < 1e-12);
    }
    SUBCASE("zero coefficients give the zero matrix") {
      CHECK(reconstruct(MatC::Zero(6, 2), MatC::Ones(2, 4)).values.norm() == 0.0);
    }
    SUBCASE("relative error basics") {
      const MatC X = rng.cgaussian_matrix(5, 4);
      CHECK(relative_error(X, X) == 0.0);
      CHECK(relative_error(MatC::Zero(5, 4), X) == doctest::Approx(1.0));
      CHECK(relative_error(MatC(2 * X), X) == doctest::Approx(1.0));
      CHECK_THROWS_AS(relative_error(X, MatC::Zero(5, 4)), std::invalid_argument);
    }
  }
}

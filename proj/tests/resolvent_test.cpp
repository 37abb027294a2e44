#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "loctime/exact.hpp"
#include "loctime/resolvent.hpp"
#include "support/graphs.hpp"

using namespace loctime;

namespace {

const std::vector<double> kZGrid = {1.1, 1.5, 2.0, 5.0};

Eigen::MatrixXd direct_resolvent(const Eigen::MatrixXd& M, double z) {
    const Eigen::MatrixXd shifted =
        M - z * Eigen::MatrixXd::Identity(M.rows(), M.cols());
    return shifted.partialPivLu().solve(
        Eigen::MatrixXd::Identity(M.rows(), M.cols()));
}

}  // namespace

TEST_CASE("series coefficients restate the step statistics") {
    SplitMix64 rng(201);
    const TransitionMatrix P = testsupport::random_walk_matrix(rng, 5, true);
    ResolventSolver solver(P);
    const std::vector<double> seq = bracket_sequence(P, 1, 3, 12);
    const ZSeries r = solver.element_series(1, 3, 12);
    const ZSeries rp = solver.rp_element_series(1, 3, 12);
    for (int m = 0; m <= 11; ++m) {
        CHECK(r.coefficient(m + 1) == -seq[static_cast<std::size_t>(m)]);
    }
    for (int m = 1; m <= 12; ++m) {
        CHECK(rp.coefficient(m) == -seq[static_cast<std::size_t>(m)]);
    }
    CHECK(r.coefficient(0) == 0.0);
}

TEST_CASE("numeric resolvent satisfies its defining identities") {
    SplitMix64 rng(202);
    const TransitionMatrix P = testsupport::random_walk_matrix(rng, 6);
    ResolventSolver solver(P);
    for (double z : kZGrid) {
        const Eigen::MatrixXd& R = solver.resolvent_matrix(z);
        const Eigen::MatrixXd identity_residual =
            (P.matrix() - z * Eigen::MatrixXd::Identity(6, 6)) * R -
            Eigen::MatrixXd::Identity(6, 6);
        CHECK(identity_residual.cwiseAbs().maxCoeff() < 1e-12);
        // Row sums: R applied to the all-ones vector gives 1/(1-z).
        for (int v = 0; v < 6; ++v) {
            CHECK(R.row(v).sum() == doctest::Approx(1.0 / (1.0 - z)).epsilon(1e-12));
        }
        // RP = I + zR, elementwise through the cached accessors.
        for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
                const double expected =
                    (a == b ? 1.0 : 0.0) + z * solver.element(z, a, b);
                CHECK(solver.rp_element(z, a, b) ==
                      doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS(solver.element(1.0, 0, 0), SingularSystem);
    CHECK_THROWS_AS(solver.element(0.5, 0, 0), SingularSystem);
}

TEST_CASE("deformed resolvent equals direct inversion of the tilted chain") {
    SplitMix64 rng(203);
    for (int trial = 0; trial < 25; ++trial) {
        const int size = 3 + static_cast<int>(rng.next() % 5);
        const TransitionMatrix P = testsupport::random_walk_matrix(rng, size, true);
        const int v = static_cast<int>(rng.next() % static_cast<unsigned>(size));
        const double u = 4.0 * rng.uniform() - 2.0;
        const double z = kZGrid[trial % kZGrid.size()];
        Eigen::MatrixXd tilted = P.matrix();
        tilted.col(v) *= std::exp(u);
        const Eigen::MatrixXd direct = direct_resolvent(tilted, z);
        for (int a = 0; a < size; ++a) {
            for (int b = 0; b < size; ++b) {
                CHECK(deformed_resolvent_element(P, z, v, u, a, b) ==
                      doctest::Approx(direct(a, b)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("zero deformation reduces to the plain resolvent") {
    const TransitionMatrix P = testsupport::lazy_triangle();
    for (double z : kZGrid) {
        CHECK(deformed_resolvent_element(P, z, 1, 0.0, 0, 2) ==
              doctest::Approx(resolvent_element(P, z, 0, 2)).epsilon(1e-13));
    }
}

TEST_CASE("mean series agrees with the time-domain engine") {
    SplitMix64 rng(204);
    for (int trial = 0; trial < 4; ++trial) {
        const int size = 2 + static_cast<int>(rng.next() % 7);
        const TransitionMatrix P = testsupport::random_walk_matrix(rng, size, true);
        const int va = static_cast<int>(rng.next() % static_cast<unsigned>(size));
        const int v1 = static_cast<int>(rng.next() % static_cast<unsigned>(size));
        const int vb = static_cast<int>(rng.next() % static_cast<unsigned>(size));
        const ZSeries free_series =
            mean_z_series(P, va, Endpoint::free(), v1, 20);
        const ZSeries fixed_series =
            mean_z_series(P, va, Endpoint::fixed(vb), v1, 20);
        for (int n = 0; n <= 20; ++n) {
            CHECK(free_series.coefficient(n) ==
                  doctest::Approx(mean_local_time_free(P, va, v1, n)).epsilon(1e-10));
            CHECK(fixed_series.coefficient(n) ==
                  doctest::Approx(mean_local_time_fixed(P, va, vb, v1, n))
                      .epsilon(1e-10));
        }
    }
}

TEST_CASE("correlation series agrees with the time-domain engine") {
    SplitMix64 rng(205);
    for (int trial = 0; trial < 4; ++trial) {
        const int size = 2 + static_cast<int>(rng.next() % 7);
        const TransitionMatrix P = testsupport::random_walk_matrix(rng, size, true);
        const int v1 = static_cast<int>(rng.next() % static_cast<unsigned>(size));
        const int v2 = static_cast<int>(rng.next() % static_cast<unsigned>(size));
        const ZSeries free_series =
            correlation_z_series(P, 0, Endpoint::free(), v1, v2, 18);
        const ZSeries fixed_series =
            correlation_z_series(P, 0, Endpoint::fixed(v1), v1, v2, 18);
        for (int n = 0; n <= 18; ++n) {
            CHECK(free_series.coefficient(n) ==
                  doctest::Approx(correlation_free(P, 0, v1, v2, n)).epsilon(1e-10));
            CHECK(fixed_series.coefficient(n) ==
                  doctest::Approx(correlation_fixed(P, 0, v1, v1, v2, n))
                      .epsilon(1e-10));
        }
    }
}

TEST_CASE("distribution series agrees with the time-domain engine") {
    SplitMix64 rng(206);
    for (int trial = 0; trial < 3; ++trial) {
        const int size = 3 + static_cast<int>(rng.next() % 4);
        const TransitionMatrix P = testsupport::random_walk_matrix(rng, size, true);
        const int v = static_cast<int>(rng.next() % static_cast<unsigned>(size));
        const int n = 14;
        const DistributionTable free_table =
            local_time_distribution_exact(P, 0, Endpoint::free(), v, n, n);
        const DistributionTable fixed_table =
            local_time_distribution_exact(P, 0, Endpoint::fixed(1), v, n, n);
        for (int l = 0; l <= 6; ++l) {
            const ZSeries free_series =
                distribution_z_series(P, 0, Endpoint::free(), v, l, n);
            const ZSeries fixed_series =
                distribution_z_series(P, 0, Endpoint::fixed(1), v, l, n);
            CHECK(free_series.coefficient(n) ==
                  doctest::Approx(free_table.mass[static_cast<std::size_t>(l)])
                      .epsilon(1e-10));
            CHECK(fixed_series.coefficient(n) ==
                  doctest::Approx(fixed_table.mass[static_cast<std::size_t>(l)])
                      .epsilon(1e-10));
        }
    }
}

TEST_CASE("numeric statistics match series sums at large z") {
    // At z = 5 the tail beyond w^60 is below 1e-40; evaluating the truncated
    // series numerically pins the closed-form z expressions.
    const TransitionMatrix P = testsupport::lazy_triangle();
    const double z = 5.0;
    const double w = 1.0 / z;
    const int order = 60;
    const auto eval = [&](const ZSeries& s) {
        double acc = 0.0;
        for (int k = order; k >= 0; --k) {
            acc = acc * w + s.coefficient(k);
        }
        return acc;
    };
    CHECK(mean_z(P, z, 0, Endpoint::free(), 1) ==
          doctest::Approx(eval(mean_z_series(P, 0, Endpoint::free(), 1, order)))
              .epsilon(1e-12));
    CHECK(correlation_z(P, z, 0, Endpoint::fixed(2), 1, 1) ==
          doctest::Approx(
              eval(correlation_z_series(P, 0, Endpoint::fixed(2), 1, 1, order)))
              .epsilon(1e-12));
    CHECK(distribution_z(P, z, 0, Endpoint::free(), 1, 2) ==
          doctest::Approx(
              eval(distribution_z_series(P, 0, Endpoint::free(), 1, 2, order)))
              .epsilon(1e-12));
}

TEST_CASE("kernel coefficient quadrature matches the closed form") {
    for (double alpha : {-2.0, -0.5, 0.0, 0.3, 0.45}) {
        for (int ell = -2; ell <= 6; ++ell) {
            const KernelCoefficient k = geometric_kernel_coefficient(alpha, ell);
            CHECK(std::abs(k.quadrature - k.closed_form) < 1e-8);
            if (ell < 0) {
                CHECK(k.closed_form == 0.0);
            }
        }
    }
    CHECK_THROWS_AS(geometric_kernel_coefficient(0.5, 1), ValidationError);
    CHECK_THROWS_AS(geometric_kernel_coefficient(0.7, 0), ValidationError);
}

TEST_CASE("kernel coefficient known values") {
    // alpha = 0: the integrand is 1, so only ell = 0 survives.
    CHECK(geometric_kernel_coefficient(0.0, 0).closed_form == 1.0);
    CHECK(geometric_kernel_coefficient(0.0, 3).closed_form == 0.0);
    // alpha = 0.3, ell = 0: -1/(alpha - 1) = 1/0.7.
    CHECK(geometric_kernel_coefficient(0.3, 0).closed_form ==
          doctest::Approx(1.0 / 0.7).epsilon(1e-14));
}

TEST_CASE("deformation pole raises a dedicated error") {
    // On the two-cycle, <v|RP|v> = -1/(z^2-1); the update denominator
    // 1 - (1 - e^u) <v|RP|v> vanishes exactly at e^u = z^2.
    const TransitionMatrix P = testsupport::two_cycle();
    const double z = 2.0;
    const double u = 2.0 * std::log(z);
    CHECK_THROWS_AS(deformed_resolvent_element(P, z, 0, u, 0, 1),
                    DenominatorVanishes);
}

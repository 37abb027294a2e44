#include <doctest.h>

#include <cmath>
#include <vector>

#include "loctime/asymptotics.hpp"
#include "loctime/closed_forms.hpp"
#include "loctime/exact.hpp"
#include "loctime/resolvent.hpp"

using namespace loctime;

TEST_CASE("family builders produce the expected chains") {
    const TransitionMatrix K = complete_graph(4);
    for (int i = 0; i < 4; ++i) {
        CHECK(K(i, i) == 0.0);
        for (int j = 0; j < 4; ++j) {
            if (i != j) {
                CHECK(K(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
            }
        }
    }
    CHECK_THROWS_AS(complete_graph(1), ValidationError);

    const TransitionMatrix S = star_graph(3);
    CHECK(S.size() == 4);
    for (int leaf = 1; leaf <= 3; ++leaf) {
        CHECK(S(0, leaf) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(S(leaf, 0) == 1.0);
    }
    CHECK_THROWS_AS(star_graph(0), ValidationError);
}

TEST_CASE("complete-graph resolvent matches the generic solver") {
    for (int N : {2, 3, 5, 8}) {
        const TransitionMatrix P = complete_graph(N);
        for (double z : {1.1, 1.5, 2.0, 5.0}) {
            CHECK(complete_resolvent(N, z, 0, 0) ==
                  doctest::Approx(resolvent_element(P, z, 0, 0)).epsilon(1e-12));
            if (N > 1) {
                CHECK(complete_resolvent(N, z, 0, 1) ==
                      doctest::Approx(resolvent_element(P, z, 0, 1)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("complete-graph mean matches the generic engine on the full grid") {
    for (int N = 2; N <= 6; ++N) {
        const TransitionMatrix P = complete_graph(N);
        for (int n = 0; n <= 20; ++n) {
            CHECK(complete_mean_local_time(N, n, false) ==
                  doctest::Approx(mean_local_time_free(P, 0, 1, n)).epsilon(1e-13));
            CHECK(complete_mean_local_time(N, n, true) ==
                  doctest::Approx(mean_local_time_free(P, 0, 0, n)).epsilon(1e-13));
        }
    }
}

TEST_CASE("complete-graph mean closed-form values") {
    // N = 4, n = 5 away from the start: (1/4)(5 + 1/4 + 1/(4*243)) = 319/243.
    CHECK(complete_mean_local_time(4, 5, false) ==
          doctest::Approx(319.0 / 243.0).epsilon(1e-15));
    // Observing the start delays the curve by one step.
    CHECK(complete_mean_local_time(4, 5, true) ==
          doctest::Approx(complete_mean_local_time(4, 4, false)).epsilon(1e-15));
    CHECK(complete_mean_local_time(3, 2, false) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("star resolvent matches the generic solver") {
    for (int N : {1, 3, 5}) {
        const TransitionMatrix P = star_graph(N);
        ResolventSolver solver(P);
        for (double z : {1.1, 2.0, 5.0}) {
            const Eigen::MatrixXd closed = star_resolvent(N, z);
            const Eigen::MatrixXd& numeric = solver.resolvent_matrix(z);
            CHECK((closed - numeric).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("star limiting fractions") {
    for (int N : {1, 2, 3, 10}) {
        const TransitionMatrix P = star_graph(N);
        CHECK(star_limiting_fraction(N, true) ==
              doctest::Approx(limiting_local_time_fraction(P, 0)).epsilon(1e-12));
        CHECK(star_limiting_fraction(N, false) ==
              doctest::Approx(limiting_local_time_fraction(P, 1)).epsilon(1e-12));
        CHECK(star_limiting_fraction(N, true) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(star_limiting_fraction(N, false) ==
              doctest::Approx(0.5 / N).epsilon(1e-14));
    }
}

TEST_CASE("line window geometry") {
    const LineWindow window(5);
    CHECK(window.radius() == 5);
    CHECK(window.transition().size() == 11);
    CHECK(window.index(0) == 5);
    CHECK(window.index(-5) == 0);
    CHECK(window.coordinate(10) == 5);
    CHECK_THROWS_AS(window.index(6), ValidationError);
    CHECK_THROWS_AS(window.coordinate(11), ValidationError);
    CHECK(window.exact_for(0, 5));
    CHECK_FALSE(window.exact_for(0, 6));
    CHECK(window.exact_for(-2, 3));

    // Interior rows split evenly, end rows reflect.
    const TransitionMatrix& P = window.transition();
    CHECK(P(5, 4) == 0.5);
    CHECK(P(5, 6) == 0.5);
    CHECK(P(0, 1) == 1.0);
    CHECK(P(10, 9) == 1.0);
}

TEST_CASE("line resolvent matches a wide window") {
    const LineWindow window(60);
    ResolventSolver solver(window.transition());
    for (double z : {1.1, 1.5, 2.0, 5.0}) {
        for (long delta : {0L, 1L, -3L, 5L}) {
            CHECK(line_resolvent(z, delta) ==
                  doctest::Approx(
                      solver.element(z, window.index(0), window.index(delta)))
                      .epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(line_resolvent(1.0, 0), SingularSystem);
}

TEST_CASE("line zero-visit probabilities are central binomials") {
    for (int m = 1; m <= 10; ++m) {
        const double expected =
            binomial(2 * m, m) / std::ldexp(1.0, 2 * m);
        CHECK(line_zero_visit(2 * m) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(line_zero_visit(2 * m + 1) == doctest::Approx(expected).epsilon(1e-14));

        // Windowed engine cross-check; the window is wide enough for
        // exactness at both horizons.
        const int n = 2 * m + 1;
        const LineWindow window(n + 1);
        const int center = window.index(0);
        CHECK(zero_visit_probability(window.transition(), center, Endpoint::free(),
                                     center, n) ==
              doctest::Approx(line_zero_visit(n)).epsilon(1e-13));
    }
    CHECK(line_zero_visit(0) == 1.0);
    CHECK(line_zero_visit(1) == 1.0);
}

TEST_CASE("line distribution series coefficients are return probabilities") {
    const int order = 25;
    for (int ell = 0; ell <= 3; ++ell) {
        const ZSeries series = line_distribution_series(ell, order);
        const LineWindow window(order + 1);
        const int center = window.index(0);
        for (int n = ell; n <= order; ++n) {
            const DistributionTable table = local_time_distribution_exact(
                window.transition(), center, Endpoint::free(), center, n, n);
            CHECK(series.coefficient(n) ==
                  doctest::Approx(table.mass[static_cast<std::size_t>(ell)])
                      .epsilon(1e-11));
        }
    }
}

TEST_CASE("line distribution values match the windowed solver at numeric z") {
    const LineWindow window(80);
    const int center = window.index(0);
    for (double z : {1.2, 1.5, 2.0}) {
        for (int ell = 0; ell <= 4; ++ell) {
            CHECK(line_distribution_z(ell, z) ==
                  doctest::Approx(distribution_z(window.transition(), z, center,
                                                 Endpoint::free(), center, ell))
                      .epsilon(1e-10));
        }
    }
}

TEST_CASE("binomial coefficients") {
    CHECK(binomial(0, 0) == 1.0);
    CHECK(binomial(5, 2) == 10.0);
    CHECK(binomial(30, 15) == 155117520.0);
    CHECK(binomial(62, 31) == 465428353255261088.0);
    CHECK(binomial(10, 11) == 0.0);
    CHECK(binomial(10, -1) == 0.0);
    // Beyond the exact range the log-gamma path is correct to ~1e-13.
    const double big = binomial(100, 50);
    CHECK(big == doctest::Approx(1.008913445455642e29).epsilon(1e-10));
}

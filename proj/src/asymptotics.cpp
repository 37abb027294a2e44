#include "loctime/asymptotics.hpp"

#include <cmath>
#include <vector>

namespace loctime {

StationaryDistribution invariant_distribution(const TransitionMatrix& P) {
    if (!strongly_connected(P)) {
        throw NotStronglyConnected();
    }
    const int n = P.size();
    // (P^T - I) has rank n-1 for a strongly connected chain; the appended
    // all-ones row picks the normalized element of the null space.
    Eigen::MatrixXd system(n + 1, n);
    system.topRows(n) = P.matrix().transpose() - Eigen::MatrixXd::Identity(n, n);
    system.row(n).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    StationaryDistribution out;
    out.pi = system.colPivHouseholderQr().solve(rhs);
    out.pi /= out.pi.sum();
    return out;
}

double perron_limit_residual(const TransitionMatrix& P, double epsilon) {
    if (!(epsilon > 0.0) || epsilon > 0.5) {
        throw ValidationError("epsilon must lie in (0, 1/2], got " +
                              std::to_string(epsilon));
    }
    const StationaryDistribution stat = invariant_distribution(P);
    const int n = P.size();
    const double z = 1.0 + epsilon;
    const Eigen::MatrixXd shifted = P.matrix() - z * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd resolvent =
        Eigen::PartialPivLU<Eigen::MatrixXd>(shifted).solve(
            Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd projection =
        Eigen::VectorXd::Ones(n) * stat.pi.transpose();
    return ((1.0 - z) * resolvent - projection).cwiseAbs().maxCoeff();
}

double final_value(const std::function<double(double)>& F, int k) {
    if (k < 0) {
        throw ValidationError("power must be nonnegative, got " + std::to_string(k));
    }
    double factorial = 1.0;
    for (int i = 2; i <= k; ++i) {
        factorial *= i;
    }
    // Ladder epsilon = 2^-4, 2^-6, ..., 2^-20; consecutive entries shrink by
    // 4, so one Richardson step cancels an error term linear in epsilon.
    std::vector<double> scaled;
    for (int e = 4; e <= 20; e += 2) {
        const double epsilon = std::ldexp(1.0, -e);
        const double z = 1.0 + epsilon;
        scaled.push_back(std::pow(z - 1.0, k + 1) / factorial * F(z));
    }
    std::vector<double> extrapolated;
    for (std::size_t j = 0; j + 1 < scaled.size(); ++j) {
        extrapolated.push_back((4.0 * scaled[j + 1] - scaled[j]) / 3.0);
    }
    const std::size_t last = extrapolated.size() - 1;
    if (std::abs(extrapolated[last] - extrapolated[last - 1]) > 1e-7) {
        throw ExtrapolationDiverged();
    }
    return extrapolated[last];
}

double limiting_local_time_fraction(const TransitionMatrix& P, int v1) {
    check_vertex(P, v1);
    return invariant_distribution(P).pi(v1);
}

double limiting_pair_fraction(const TransitionMatrix& P, int v1, int v2) {
    check_vertex(P, v1);
    check_vertex(P, v2);
    const StationaryDistribution stat = invariant_distribution(P);
    return stat.pi(v1) * stat.pi(v2);
}

}  // namespace loctime

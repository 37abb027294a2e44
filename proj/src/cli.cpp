#include "loctime/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "loctime/asymptotics.hpp"
#include "loctime/closed_forms.hpp"
#include "loctime/exact.hpp"
#include "loctime/graph_io.hpp"
#include "loctime/montecarlo.hpp"
#include "loctime/resolvent.hpp"

namespace loctime {

namespace {

using nlohmann::ordered_json;

constexpr double kVerifyTolerance = 1e-8;

// One flat bag of flag values shared by every subcommand; each subcommand
// registers only the flags it understands. Sentinels mark "not given":
// negative for counts and vertices (user input is parse-checked nonnegative),
// NaN for z.
struct Options {
    std::string graph_path;
    std::string out_path;
    int va = 0;
    int vb = -1;
    std::string endpoint_mode;
    int v1 = -1;
    int v2 = -1;
    int n = -1;
    int lmax = -1;
    long long ell = -1;
    double z = std::numeric_limits<double>::quiet_NaN();
    int family_size = 0;
    long delta = 0;
    std::uint64_t seed = 0;
    long long trials = 100000;
    std::string format = "json";
    bool verify = false;

    bool has_n() const { return n >= 0; }
    bool has_z() const { return !std::isnan(z); }
};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(9);
    os << x;
    return os.str();
}

std::string cell(const ordered_json& value) {
    return value.is_string() ? value.get<std::string>() : value.dump();
}

void emit(const ordered_json& rec, const std::string& format, std::ostream& out) {
    if (format == "json") {
        out << rec.dump() << '\n';
        return;
    }
    // csv: "key,value" per scalar, "key,index,value" per array element,
    // "outer.inner,value" per nested field.
    for (const auto& [key, value] : rec.items()) {
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                out << key << ',' << i << ',' << cell(value[i]) << '\n';
            }
        } else if (value.is_object()) {
            for (const auto& [inner, v2] : value.items()) {
                out << key << '.' << inner << ',' << cell(v2) << '\n';
            }
        } else {
            out << key << ',' << cell(value) << '\n';
        }
    }
}

Endpoint resolve_endpoint(const Options& o) {
    if (!o.endpoint_mode.empty() && o.vb >= 0) {
        throw ValidationError("--vb and --endpoint free are mutually exclusive");
    }
    return o.vb >= 0 ? Endpoint::fixed(o.vb) : Endpoint::free();
}

// Statistics subcommands take exactly one of --n (time domain) and --z
// (generating-function value); --verify needs the time-domain form, where a
// second engine exists.
void check_stat_mode(const Options& o) {
    if (o.has_n() == o.has_z()) {
        throw ValidationError("exactly one of --n and --z is required");
    }
    if (o.verify && !o.has_n()) {
        throw ValidationError("--verify applies to --n queries");
    }
}

void echo_endpoint(ordered_json& rec, const Options& o, Endpoint ep) {
    rec["va"] = o.va;
    if (ep.is_free()) {
        rec["endpoint"] = "free";
    } else {
        rec["vb"] = ep.vertex();
    }
}

// Attaches the cross-check block and fails the run when the engines differ
// by more than the tolerance.
void check_verified(ordered_json& rec, const std::string& engine, double delta,
                    double tolerance) {
    ordered_json block;
    block["engine"] = engine;
    block["max_delta"] = delta;
    block["tolerance"] = tolerance;
    rec["verify"] = block;
    if (!(delta <= tolerance)) {
        throw ComputeError("verification against " + engine +
                           " failed: max difference " + fmt(delta) + " exceeds " +
                           fmt(tolerance));
    }
}

int simulation_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) {
        hw = 1;
    }
    const char* env = std::getenv("LOCALTIME_THREADS");
    if (env == nullptr || *env == '\0') {
        return static_cast<int>(hw);
    }
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap <= 0) {
        throw ValidationError("LOCALTIME_THREADS must be a positive integer");
    }
    return static_cast<int>(std::min<long>(cap, hw));
}

// Truncated expansions R = -sum_{m>=0} P^m z^{-(m+1)} and
// RP = -sum_{m>=1} P^m z^{-m}, cut where the tail bound z^{-(M+1)}/(z-1)
// drops below 1e-10.
std::pair<double, double> neumann_resolvent_pair(const TransitionMatrix& P, double z,
                                                 int va, int vb) {
    const double needed = std::log(1e10 / (z - 1.0)) / std::log(z);
    if (!(needed < static_cast<double>(1 << 20))) {
        throw ComputeError("z = " + fmt(z) + " too close to 1 for the series check");
    }
    const int terms = std::max(1, static_cast<int>(std::ceil(needed)));
    const std::vector<double> seq = bracket_sequence(P, va, vb, terms);
    double r_sum = 0.0;
    for (int m = terms; m >= 0; --m) {
        r_sum = seq[static_cast<std::size_t>(m)] + r_sum / z;
    }
    double rp_sum = 0.0;
    for (int m = terms; m >= 1; --m) {
        rp_sum = seq[static_cast<std::size_t>(m)] + rp_sum / z;
    }
    return {-r_sum / z, -rp_sum / z};
}

// Window wide enough that boundary contact distorts the queried line
// quantity by far less than the verification tolerance; contributions decay
// by (z - sqrt(z^2-1)) per site.
int line_check_radius(double z, long reach) {
    const double base = z - std::sqrt(z * z - 1.0);
    const double needed = std::ceil(std::log(1e-11) / std::log(base));
    const long radius = static_cast<long>(needed) + std::labs(reach) + 2;
    if (radius > 400) {
        throw ComputeError("z = " + fmt(z) + " too close to 1 for a finite-window check");
    }
    return static_cast<int>(radius);
}

double exact_indicator_probability(const TransitionMatrix& P, int va, Endpoint ep,
                                   int site, int n, long long ell) {
    if (ell > n) {
        return 0.0;
    }
    // lmax = n never saturates, so the bucket is the exact point mass.
    DistributionTable table = local_time_distribution_exact(P, va, ep, site, n, n);
    if (!ep.is_free()) {
        table = table.normalized();
    }
    return table.mass[static_cast<std::size_t>(ell)];
}

void require_site(const Options& o) {
    if (o.v1 < 0) {
        throw ValidationError("--v1 is required");
    }
}

void handle_mean(const Options& o, std::ostream& out) {
    check_stat_mode(o);
    require_site(o);
    const TransitionMatrix P = load_transition(o.graph_path);
    const Endpoint ep = resolve_endpoint(o);
    ordered_json rec;
    rec["op"] = "mean";
    rec["graph"] = o.graph_path;
    echo_endpoint(rec, o, ep);
    rec["v1"] = o.v1;
    if (o.has_n()) {
        rec["n"] = o.n;
        rec["engine"] = "exact";
        double unnormalized = 0.0;
        if (ep.is_free()) {
            unnormalized = mean_local_time_free(P, o.va, o.v1, o.n);
            rec["value"] = unnormalized;
        } else {
            unnormalized = mean_local_time_fixed(P, o.va, ep.vertex(), o.v1, o.n);
            rec["value_unnormalized"] = unnormalized;
            rec["endpoint_weight"] = endpoint_weight(P, o.va, ep.vertex(), o.n);
            rec["value_normalized"] =
                normalize_fixed(unnormalized, P, o.va, ep.vertex(), o.n);
        }
        if (o.verify) {
            const double coeff =
                mean_z_series(P, o.va, ep, o.v1, o.n).coefficient(o.n);
            check_verified(rec, "zdomain-series", std::abs(coeff - unnormalized),
                           kVerifyTolerance);
        }
    } else {
        rec["z"] = o.z;
        rec["engine"] = "zdomain-numeric";
        const double value = mean_z(P, o.z, o.va, ep, o.v1);
        rec[ep.is_free() ? "value" : "value_unnormalized"] = value;
    }
    emit(rec, o.format, out);
}

void handle_corr(const Options& o, std::ostream& out) {
    check_stat_mode(o);
    require_site(o);
    if (o.v2 < 0) {
        throw ValidationError("--v2 is required");
    }
    const TransitionMatrix P = load_transition(o.graph_path);
    const Endpoint ep = resolve_endpoint(o);
    ordered_json rec;
    rec["op"] = "corr";
    rec["graph"] = o.graph_path;
    echo_endpoint(rec, o, ep);
    rec["v1"] = o.v1;
    rec["v2"] = o.v2;
    if (o.has_n()) {
        rec["n"] = o.n;
        rec["engine"] = "exact";
        double unnormalized = 0.0;
        if (ep.is_free()) {
            unnormalized = correlation_free(P, o.va, o.v1, o.v2, o.n);
            rec["value"] = unnormalized;
        } else {
            unnormalized = correlation_fixed(P, o.va, ep.vertex(), o.v1, o.v2, o.n);
            rec["value_unnormalized"] = unnormalized;
            rec["endpoint_weight"] = endpoint_weight(P, o.va, ep.vertex(), o.n);
            rec["value_normalized"] =
                normalize_fixed(unnormalized, P, o.va, ep.vertex(), o.n);
        }
        if (o.verify) {
            const double coeff =
                correlation_z_series(P, o.va, ep, o.v1, o.v2, o.n).coefficient(o.n);
            check_verified(rec, "zdomain-series", std::abs(coeff - unnormalized),
                           kVerifyTolerance);
        }
    } else {
        rec["z"] = o.z;
        rec["engine"] = "zdomain-numeric";
        const double value = correlation_z(P, o.z, o.va, ep, o.v1, o.v2);
        rec[ep.is_free() ? "value" : "value_unnormalized"] = value;
    }
    emit(rec, o.format, out);
}

void handle_dist(const Options& o, std::ostream& out) {
    check_stat_mode(o);
    require_site(o);
    const TransitionMatrix P = load_transition(o.graph_path);
    const Endpoint ep = resolve_endpoint(o);
    ordered_json rec;
    rec["op"] = "dist";
    rec["graph"] = o.graph_path;
    echo_endpoint(rec, o, ep);
    rec["v1"] = o.v1;
    if (o.has_n()) {
        const int lmax = o.lmax >= 0 ? o.lmax : o.n;
        rec["n"] = o.n;
        rec["lmax"] = lmax;
        rec["engine"] = "exact";
        const DistributionTable table =
            local_time_distribution_exact(P, o.va, ep, o.v1, o.n, lmax);
        rec["top_bucket_saturated"] = table.top_bucket_saturated;
        if (ep.is_free()) {
            rec["mass"] = table.mass;
        } else {
            rec["mass_unnormalized"] = table.mass;
            rec["endpoint_weight"] = endpoint_weight(P, o.va, ep.vertex(), o.n);
            rec["mass_normalized"] = table.normalized().mass;
        }
        if (o.verify) {
            // The saturated top bucket aggregates counts >= lmax and has no
            // single-coefficient counterpart.
            double worst = 0.0;
            for (int l = 0; l <= lmax; ++l) {
                if (l == lmax && table.top_bucket_saturated) {
                    continue;
                }
                const double coeff =
                    distribution_z_series(P, o.va, ep, o.v1, l, o.n).coefficient(o.n);
                worst = std::max(
                    worst, std::abs(coeff - table.mass[static_cast<std::size_t>(l)]));
            }
            check_verified(rec, "zdomain-series", worst, kVerifyTolerance);
        }
    } else {
        if (o.ell < 0) {
            throw ValidationError("--l is required with --z");
        }
        rec["z"] = o.z;
        rec["l"] = o.ell;
        rec["engine"] = "zdomain-numeric";
        const double value =
            distribution_z(P, o.z, o.va, ep, o.v1, static_cast<int>(o.ell));
        rec[ep.is_free() ? "value" : "value_unnormalized"] = value;
    }
    emit(rec, o.format, out);
}

void handle_zero_visit(const Options& o, std::ostream& out) {
    check_stat_mode(o);
    require_site(o);
    const TransitionMatrix P = load_transition(o.graph_path);
    const Endpoint ep = resolve_endpoint(o);
    ordered_json rec;
    rec["op"] = "zero-visit";
    rec["graph"] = o.graph_path;
    echo_endpoint(rec, o, ep);
    rec["v1"] = o.v1;
    if (o.has_n()) {
        rec["n"] = o.n;
        rec["engine"] = "exact";
        const double unnormalized = zero_visit_probability(P, o.va, ep, o.v1, o.n);
        if (ep.is_free()) {
            rec["value"] = unnormalized;
        } else {
            rec["value_unnormalized"] = unnormalized;
            rec["endpoint_weight"] = endpoint_weight(P, o.va, ep.vertex(), o.n);
            rec["value_normalized"] =
                normalize_fixed(unnormalized, P, o.va, ep.vertex(), o.n);
        }
        if (o.verify) {
            // The l = 0 bucket of the visit-count distribution is the
            // zero-visit weight.
            const double coeff =
                distribution_z_series(P, o.va, ep, o.v1, 0, o.n).coefficient(o.n);
            check_verified(rec, "zdomain-series", std::abs(coeff - unnormalized),
                           kVerifyTolerance);
        }
    } else {
        rec["z"] = o.z;
        rec["engine"] = "zdomain-numeric";
        const double value = distribution_z(P, o.z, o.va, ep, o.v1, 0);
        rec[ep.is_free() ? "value" : "value_unnormalized"] = value;
    }
    emit(rec, o.format, out);
}

void handle_stationary(const Options& o, std::ostream& out) {
    const TransitionMatrix P = load_transition(o.graph_path);
    const StationaryDistribution stat = invariant_distribution(P);
    ordered_json rec;
    rec["op"] = "stationary";
    rec["graph"] = o.graph_path;
    rec["engine"] = "exact";
    std::vector<double> pi(stat.pi.data(), stat.pi.data() + stat.pi.size());
    rec["pi"] = pi;
    if (o.verify) {
        double worst = 0.0;
        for (int v = 0; v < P.size(); ++v) {
            const double limit = final_value(
                [&](double z) { return mean_z(P, z, 0, Endpoint::free(), v); }, 1);
            worst = std::max(worst, std::abs(limit - stat.pi(v)));
        }
        check_verified(rec, "zdomain-numeric", worst, kVerifyTolerance);
    }
    emit(rec, o.format, out);
}

void handle_limit_fraction(const Options& o, std::ostream& out) {
    require_site(o);
    const TransitionMatrix P = load_transition(o.graph_path);
    ordered_json rec;
    rec["op"] = "limit-fraction";
    rec["graph"] = o.graph_path;
    rec["v1"] = o.v1;
    const bool pair = o.v2 >= 0;
    if (pair) {
        rec["v2"] = o.v2;
    }
    rec["engine"] = "exact";
    const double value = pair ? limiting_pair_fraction(P, o.v1, o.v2)
                              : limiting_local_time_fraction(P, o.v1);
    rec["value"] = value;
    if (o.verify) {
        const double limit =
            pair ? final_value(
                       [&](double z) {
                           return correlation_z(P, z, 0, Endpoint::free(), o.v1, o.v2);
                       },
                       2)
                 : final_value(
                       [&](double z) { return mean_z(P, z, 0, Endpoint::free(), o.v1); },
                       1);
        check_verified(rec, "zdomain-numeric", std::abs(limit - value),
                       kVerifyTolerance);
    }
    emit(rec, o.format, out);
}

void handle_resolvent(const Options& o, std::ostream& out) {
    if (!o.has_z()) {
        throw ValidationError("--z is required");
    }
    if (o.vb < 0) {
        throw ValidationError("--vb is required");
    }
    const TransitionMatrix P = load_transition(o.graph_path);
    ResolventSolver solver(P);
    ordered_json rec;
    rec["op"] = "resolvent";
    rec["graph"] = o.graph_path;
    rec["va"] = o.va;
    rec["vb"] = o.vb;
    rec["z"] = o.z;
    rec["engine"] = "zdomain-numeric";
    const double r = solver.element(o.z, o.va, o.vb);
    const double rp = solver.rp_element(o.z, o.va, o.vb);
    rec["resolvent"] = r;
    rec["resolvent_p"] = rp;
    if (o.verify) {
        const auto [r_series, rp_series] = neumann_resolvent_pair(P, o.z, o.va, o.vb);
        const double delta =
            std::max(std::abs(r - r_series), std::abs(rp - rp_series));
        check_verified(rec, "zdomain-series", delta, kVerifyTolerance);
    }
    emit(rec, o.format, out);
}

void handle_simulate(const Options& o, const std::string& kind, std::ostream& out) {
    require_site(o);
    if (o.n < 0) {
        throw ValidationError("--n is required");
    }
    const TransitionMatrix P = load_transition(o.graph_path);
    const Endpoint ep = resolve_endpoint(o);
    Functional functional = MeanAt{o.v1};
    if (kind == "corr") {
        if (o.v2 < 0) {
            throw ValidationError("--v2 is required");
        }
        functional = ProductAt{o.v1, o.v2};
    } else if (kind == "dist") {
        if (o.ell < 0) {
            throw ValidationError("--l is required");
        }
        functional = IndicatorAt{o.v1, o.ell};
    } else if (kind == "zero-visit") {
        functional = ZeroVisitAt{o.v1};
    }
    SimulationConfig config;
    config.seed = o.seed;
    config.trials = o.trials;
    config.spec = EnsembleSpec{o.va, o.n, ep};
    const EstimateWithError est =
        estimate(P, config, functional, simulation_threads());

    ordered_json rec;
    rec["op"] = "simulate " + kind;
    rec["graph"] = o.graph_path;
    echo_endpoint(rec, o, ep);
    rec["v1"] = o.v1;
    if (kind == "corr") {
        rec["v2"] = o.v2;
    }
    if (kind == "dist") {
        rec["l"] = o.ell;
    }
    rec["n"] = o.n;
    rec["seed"] = o.seed;
    rec["trials"] = o.trials;
    rec["engine"] = "montecarlo";
    rec["estimate"] = est.mean;
    rec["standard_error"] = est.standard_error;
    rec["trials_used"] = est.trials_used;
    if (!ep.is_free()) {
        // Rejection sampling estimates the endpoint-conditioned value; the
        // acceptance rate recovers the unnormalized ensemble sum.
        const double rate = static_cast<double>(est.trials_used) /
                            static_cast<double>(o.trials);
        rec["acceptance_rate"] = rate;
        rec["estimate_unnormalized"] = est.mean * rate;
    }
    if (o.verify) {
        double exact = 0.0;
        if (kind == "mean") {
            exact = ep.is_free()
                        ? mean_local_time_free(P, o.va, o.v1, o.n)
                        : normalize_fixed(
                              mean_local_time_fixed(P, o.va, ep.vertex(), o.v1, o.n),
                              P, o.va, ep.vertex(), o.n);
        } else if (kind == "corr") {
            exact = ep.is_free()
                        ? correlation_free(P, o.va, o.v1, o.v2, o.n)
                        : normalize_fixed(correlation_fixed(P, o.va, ep.vertex(), o.v1,
                                                            o.v2, o.n),
                                          P, o.va, ep.vertex(), o.n);
        } else if (kind == "dist") {
            exact = exact_indicator_probability(P, o.va, ep, o.v1, o.n, o.ell);
        } else {
            exact = ep.is_free()
                        ? zero_visit_probability(P, o.va, ep, o.v1, o.n)
                        : normalize_fixed(
                              zero_visit_probability(P, o.va, ep, o.v1, o.n), P, o.va,
                              ep.vertex(), o.n);
        }
        // A statistical bracket: four standard errors, floored at the fixed
        // tolerance for vanishing-variance cases.
        const double tol = std::max(4.0 * est.standard_error, kVerifyTolerance);
        check_verified(rec, "exact", std::abs(est.mean - exact), tol);
    }
    emit(rec, o.format, out);
}

void handle_closed_complete(const Options& o, std::ostream& out) {
    if (o.has_n() == o.has_z()) {
        throw ValidationError("exactly one of --n and --z is required");
    }
    ordered_json rec;
    rec["op"] = "closed-form complete";
    rec["N"] = o.family_size;
    if (o.has_n()) {
        const bool at_start = o.v1 >= 0 && o.v1 == o.va;
        rec["va"] = o.va;
        rec["v1"] = o.v1 >= 0 ? o.v1 : (o.va + 1) % o.family_size;
        rec["n"] = o.n;
        rec["engine"] = "closed-form";
        const double value = complete_mean_local_time(o.family_size, o.n, at_start);
        rec["value"] = value;
        if (o.verify) {
            const TransitionMatrix P = complete_graph(o.family_size);
            const int site = at_start ? o.va : (o.va + 1) % o.family_size;
            const double exact = mean_local_time_free(P, o.va, site, o.n);
            check_verified(rec, "exact", std::abs(exact - value), kVerifyTolerance);
        }
    } else {
        const int vb = o.vb >= 0 ? o.vb : o.va;
        rec["va"] = o.va;
        rec["vb"] = vb;
        rec["z"] = o.z;
        rec["engine"] = "closed-form";
        const double value = complete_resolvent(o.family_size, o.z, o.va, vb);
        rec["value"] = value;
        if (o.verify) {
            const double exact =
                resolvent_element(complete_graph(o.family_size), o.z, o.va, vb);
            check_verified(rec, "zdomain-numeric", std::abs(exact - value),
                           kVerifyTolerance);
        }
    }
    emit(rec, o.format, out);
}

void handle_closed_star(const Options& o, std::ostream& out) {
    ordered_json rec;
    rec["op"] = "closed-form star";
    rec["N"] = o.family_size;
    if (o.has_z()) {
        const int vb = o.vb >= 0 ? o.vb : o.va;
        rec["va"] = o.va;
        rec["vb"] = vb;
        rec["z"] = o.z;
        rec["engine"] = "closed-form";
        const Eigen::MatrixXd R = star_resolvent(o.family_size, o.z);
        if (o.va >= R.rows() || vb >= R.rows()) {
            throw ValidationError("vertex out of range for star graph");
        }
        const double value = R(o.va, vb);
        rec["value"] = value;
        if (o.verify) {
            const double exact =
                resolvent_element(star_graph(o.family_size), o.z, o.va, vb);
            check_verified(rec, "zdomain-numeric", std::abs(exact - value),
                           kVerifyTolerance);
        }
    } else {
        rec["engine"] = "closed-form";
        const double center = star_limiting_fraction(o.family_size, true);
        const double peripheral = star_limiting_fraction(o.family_size, false);
        rec["center"] = center;
        rec["peripheral"] = peripheral;
        if (o.verify) {
            const TransitionMatrix P = star_graph(o.family_size);
            const double worst =
                std::max(std::abs(limiting_local_time_fraction(P, 0) - center),
                         std::abs(limiting_local_time_fraction(P, 1) - peripheral));
            check_verified(rec, "exact", worst, kVerifyTolerance);
        }
    }
    emit(rec, o.format, out);
}

void handle_closed_line(const Options& o, std::ostream& out) {
    ordered_json rec;
    rec["op"] = "closed-form line";
    if (o.has_n()) {
        rec["n"] = o.n;
        rec["engine"] = "closed-form";
        const double value = line_zero_visit(o.n);
        rec["value"] = value;
        if (o.verify) {
            const LineWindow window(o.n + 1);
            const int center = window.index(0);
            const double exact = zero_visit_probability(
                window.transition(), center, Endpoint::free(), center, o.n);
            check_verified(rec, "exact", std::abs(exact - value), kVerifyTolerance);
        }
    } else if (o.has_z()) {
        rec["z"] = o.z;
        if (o.ell >= 0) {
            rec["l"] = o.ell;
            rec["engine"] = "closed-form";
            const double value = line_distribution_z(static_cast<int>(o.ell), o.z);
            rec["value"] = value;
            if (o.verify) {
                const LineWindow window(line_check_radius(o.z, 0));
                const int center = window.index(0);
                const double exact =
                    distribution_z(window.transition(), o.z, center, Endpoint::free(),
                                   center, static_cast<int>(o.ell));
                check_verified(rec, "zdomain-numeric", std::abs(exact - value),
                               kVerifyTolerance);
            }
        } else {
            rec["delta"] = o.delta;
            rec["engine"] = "closed-form";
            const double value = line_resolvent(o.z, o.delta);
            rec["value"] = value;
            if (o.verify) {
                const LineWindow window(line_check_radius(o.z, o.delta));
                const double exact =
                    resolvent_element(window.transition(), o.z, window.index(0),
                                      window.index(o.delta));
                check_verified(rec, "zdomain-numeric", std::abs(exact - value),
                               kVerifyTolerance);
            }
        }
    } else {
        throw ValidationError("one of --n and --z is required");
    }
    emit(rec, o.format, out);
}

void handle_export(const Options& o, std::ostream& out) {
    const TransitionMatrix P = load_transition(o.graph_path);
    const bool json_out = o.format == "json";
    const std::string text = json_out ? graph_to_json(P) : graph_to_csv(P);
    if (o.verify) {
        double delta = 0.0;
        if (json_out) {
            const TransitionMatrix back = to_transition(parse_graph_json(text));
            delta = (back.matrix() - P.matrix()).cwiseAbs().maxCoeff();
            // The JSON round trip reproduces the matrix bit for bit.
            if (delta != 0.0) {
                throw ComputeError("exported JSON did not reload bit-identically; "
                                   "max difference " +
                                   fmt(delta));
            }
        } else {
            GraphFile file;
            file.graph = parse_graph_csv(text);
            file.stochastic = false;
            const TransitionMatrix back = to_transition(file);
            delta = (back.matrix() - P.matrix()).cwiseAbs().maxCoeff();
            if (!(delta <= 1e-12)) {
                throw ComputeError("exported CSV reloads with max difference " +
                                   fmt(delta) + ", tolerance 1e-12");
            }
        }
    }
    if (o.out_path.empty()) {
        out << text;
        if (json_out) {
            out << '\n';
        }
        return;
    }
    std::ofstream file(o.out_path);
    if (!file) {
        throw ValidationError("cannot write " + o.out_path);
    }
    file << text;
    if (json_out) {
        file << '\n';
    }
    ordered_json rec;
    rec["op"] = "export";
    rec["graph"] = o.graph_path;
    rec["path"] = o.out_path;
    rec["format"] = o.format;
    rec["vertices"] = P.size();
    emit(rec, "json", out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Local-time statistics of random walks on finite directed graphs"};
    app.require_subcommand(1);

    const auto add_graph = [&](CLI::App* cmd) {
        cmd->add_option("--graph", o.graph_path, "graph file (.json or .csv)")
            ->required();
    };
    const auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
    };
    const auto add_verify = [&](CLI::App* cmd) {
        cmd->add_flag("--verify", o.verify, "cross-check against a second engine");
    };
    const auto add_ensemble = [&](CLI::App* cmd) {
        cmd->add_option("--va", o.va, "start vertex")->check(CLI::NonNegativeNumber);
        cmd->add_option("--vb", o.vb, "fixed final vertex")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--endpoint", o.endpoint_mode, "endpoint condition")
            ->check(CLI::IsMember({"free"}));
    };
    const auto add_site = [&](CLI::App* cmd, const char* text) {
        cmd->add_option("--v1", o.v1, text)->check(CLI::NonNegativeNumber);
    };
    const auto add_horizon = [&](CLI::App* cmd) {
        cmd->add_option("--n", o.n, "walk length")->check(CLI::NonNegativeNumber);
    };
    const auto add_z = [&](CLI::App* cmd) {
        cmd->add_option("--z", o.z, "evaluation point, z > 1");
    };

    CLI::App* mean = app.add_subcommand("mean", "mean visit count at a vertex");
    add_graph(mean);
    add_ensemble(mean);
    add_site(mean, "observed vertex");
    add_horizon(mean);
    add_z(mean);
    add_format(mean);
    add_verify(mean);
    mean->callback([&] { handle_mean(o, out); });

    CLI::App* corr = app.add_subcommand("corr", "visit-count correlation of two vertices");
    add_graph(corr);
    add_ensemble(corr);
    add_site(corr, "first observed vertex");
    corr->add_option("--v2", o.v2, "second observed vertex")
        ->check(CLI::NonNegativeNumber);
    add_horizon(corr);
    add_z(corr);
    add_format(corr);
    add_verify(corr);
    corr->callback([&] { handle_corr(o, out); });

    CLI::App* dist = app.add_subcommand("dist", "visit-count distribution at a vertex");
    add_graph(dist);
    add_ensemble(dist);
    add_site(dist, "observed vertex");
    add_horizon(dist);
    dist->add_option("--lmax", o.lmax, "top bucket of the table, aggregates counts >= lmax")
        ->check(CLI::NonNegativeNumber);
    add_z(dist);
    dist->add_option("--l", o.ell, "visit count, with --z")->check(CLI::NonNegativeNumber);
    add_format(dist);
    add_verify(dist);
    dist->callback([&] { handle_dist(o, out); });

    CLI::App* zero = app.add_subcommand("zero-visit", "probability of never standing on a vertex");
    add_graph(zero);
    add_ensemble(zero);
    add_site(zero, "avoided vertex");
    add_horizon(zero);
    add_z(zero);
    add_format(zero);
    add_verify(zero);
    zero->callback([&] { handle_zero_visit(o, out); });

    CLI::App* stationary = app.add_subcommand("stationary", "stationary distribution");
    add_graph(stationary);
    add_format(stationary);
    add_verify(stationary);
    stationary->callback([&] { handle_stationary(o, out); });

    CLI::App* limit = app.add_subcommand("limit-fraction", "long-run fraction of time at a vertex");
    add_graph(limit);
    add_site(limit, "observed vertex");
    limit->add_option("--v2", o.v2, "second vertex for the pair fraction")
        ->check(CLI::NonNegativeNumber);
    add_format(limit);
    add_verify(limit);
    limit->callback([&] { handle_limit_fraction(o, out); });

    CLI::App* resolvent = app.add_subcommand("resolvent", "resolvent elements at a point z > 1");
    add_graph(resolvent);
    resolvent->add_option("--va", o.va, "row vertex")->check(CLI::NonNegativeNumber);
    resolvent->add_option("--vb", o.vb, "column vertex")->check(CLI::NonNegativeNumber);
    add_z(resolvent);
    add_format(resolvent);
    add_verify(resolvent);
    resolvent->callback([&] { handle_resolvent(o, out); });

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
    simulate->require_subcommand(1);
    for (const std::string kind : {"mean", "corr", "dist", "zero-visit"}) {
        CLI::App* sub = simulate->add_subcommand(kind, "sampled " + kind);
        add_graph(sub);
        add_ensemble(sub);
        add_site(sub, "observed vertex");
        if (kind == "corr") {
            sub->add_option("--v2", o.v2, "second observed vertex")
                ->check(CLI::NonNegativeNumber);
        }
        if (kind == "dist") {
            sub->add_option("--l", o.ell, "visit count whose probability is estimated")
                ->check(CLI::NonNegativeNumber);
        }
        add_horizon(sub);
        sub->add_option("--seed", o.seed, "stream seed");
        sub->add_option("--trials", o.trials, "number of sampled walks")
            ->check(CLI::PositiveNumber);
        add_format(sub);
        add_verify(sub);
        sub->callback([&o, &out, kind] { handle_simulate(o, kind, out); });
    }

    CLI::App* closed = app.add_subcommand("closed-form", "reference-family formulas");
    closed->require_subcommand(1);
    CLI::App* complete = closed->add_subcommand("complete", "complete graph on N vertices");
    complete->add_option("--N", o.family_size, "vertex count")
        ->required()
        ->check(CLI::PositiveNumber);
    complete->add_option("--va", o.va, "start vertex")->check(CLI::NonNegativeNumber);
    complete->add_option("--vb", o.vb, "column vertex, with --z")
        ->check(CLI::NonNegativeNumber);
    add_site(complete, "observed vertex, with --n");
    add_horizon(complete);
    add_z(complete);
    add_format(complete);
    add_verify(complete);
    complete->callback([&] { handle_closed_complete(o, out); });

    CLI::App* star = closed->add_subcommand("star", "star graph with N peripheral vertices");
    star->add_option("--N", o.family_size, "peripheral vertex count")
        ->required()
        ->check(CLI::PositiveNumber);
    star->add_option("--va", o.va, "row vertex, with --z")->check(CLI::NonNegativeNumber);
    star->add_option("--vb", o.vb, "column vertex, with --z")
        ->check(CLI::NonNegativeNumber);
    add_z(star);
    add_format(star);
    add_verify(star);
    star->callback([&] { handle_closed_star(o, out); });

    CLI::App* line = closed->add_subcommand("line", "unbiased walk on the integers");
    add_horizon(line);
    add_z(line);
    line->add_option("--l", o.ell, "visit count at the start, with --z")
        ->check(CLI::NonNegativeNumber);
    line->add_option("--delta", o.delta, "displacement for the resolvent, with --z");
    add_format(line);
    add_verify(line);
    line->callback([&] { handle_closed_line(o, out); });

    CLI::App* exporter = app.add_subcommand("export", "write the normalized graph back out");
    add_graph(exporter);
    add_format(exporter);
    exporter->add_option("--out", o.out_path, "destination file, stdout when omitted");
    add_verify(exporter);
    exporter->callback([&] { handle_export(o, out); });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("loctime");
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace loctime

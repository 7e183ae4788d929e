#ifndef ICEDEM_CALIBRATION_HPP
#define ICEDEM_CALIBRATION_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "icedem/errors.hpp"
#include "icedem/rheology.hpp"

namespace icedem {

/// Fast-sintering measurements for one temperature: fracture force against
/// sintering time at a fixed load, or against applied load at a fixed time.
struct SinteringDataset {
    enum class Kind { time_series, load_series };
    Kind kind = Kind::time_series;
    double temperature = 272.15;  ///< K
    double R_eq = 1.5e-3;         ///< equivalent contact radius (m)
    double tau_n = 0.6e6;         ///< assumed tensile strength (Pa)
    double applied_load = 0.0;    ///< N; constant sintering load (time series)
    std::vector<std::pair<double, double>> samples;  ///< (time s | load N, fracture force N)

    void validate() const {
        if (samples.empty()) throw ConfigError("SinteringDataset: no samples");
        if (!(R_eq > 0.0) || !(tau_n > 0.0))
            throw ConfigError("SinteringDataset: R_eq and tau_n must be positive");
        for (const auto& [x, f] : samples) {
            if (!(x > 0.0)) throw ConfigError("SinteringDataset: abscissae must be positive");
            if (!(f >= 0.0)) throw ConfigError("SinteringDataset: fracture forces must be >= 0");
        }
        if (kind == Kind::time_series && !(applied_load > 0.0))
            throw ConfigError("SinteringDataset: time series needs a positive applied_load");
    }
};

/// Invert a fracture force to the creep indentation that welded the bond:
/// d = (f_frac - f0_b) / (pi tau_n R_eq).
inline double sintering_to_indentation(double f_frac, double f0_b, double tau_n, double R_eq) {
    if (!(tau_n > 0.0) || !(R_eq > 0.0))
        throw std::invalid_argument("sintering_to_indentation: tau_n and R_eq must be positive");
    if (f_frac < f0_b)
        throw std::invalid_argument(
            "sintering_to_indentation: fracture force below the load-independent capacity");
    return (f_frac - f0_b) / (std::numbers::pi * tau_n * R_eq);
}

/// Load-independent capacity from a load sweep: ordinary least-squares
/// intercept of fracture force vs applied load at zero load.
inline double estimate_f0b(const SinteringDataset& data) {
    data.validate();
    if (data.kind != SinteringDataset::Kind::load_series)
        throw ConfigError("estimate_f0b: needs a load-series dataset");
    if (data.samples.size() < 2) throw ConfigError("estimate_f0b: needs at least two loads");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(data.samples.size());
    for (const auto& [x, y] : data.samples) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw ConfigError("estimate_f0b: degenerate load sweep");
    return (sy * sxx - sx * sxy) / den;
}

struct ParameterMask {
    bool fix_k_i = false;
    bool fix_k_d = false;
    bool fix_c_i = false;
    bool fix_c_d = false;
};

struct FitResult {
    BurgersParams params;
    double residual_norm = 0.0;   ///< 2-norm of the residual vector
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> accepted_residuals;  ///< residual norm after each accepted step
};

namespace detail {

struct DlsOptions {
    double lambda0 = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    int max_iter = 500;
    double tol_rel_residual = 1e-10;
    double tol_gradient = 1e-12;
};

struct DlsOutcome {
    std::vector<double> x;
    double residual_norm = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> accepted_residuals;
};

/// Solve A x = b by Gaussian elimination with partial pivoting (tiny n).
inline std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (A[piv * n + col] == 0.0) throw NumericalError("singular normal equations");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = A[r * n + col] / A[col * n + col];
            for (std::size_t c = col; c < n; ++c) A[r * n + c] -= m * A[col * n + c];
            b[r] -= m * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= A[ri * n + c] * x[c];
        x[ri] = acc / A[ri * n + ri];
    }
    return x;
}

/// Damped least squares (Levenberg-Marquardt with multiplicative damping of
/// the normal-equation diagonal). `model(x, r, J)` fills the residuals and
/// the row-major Jacobian. Accepted steps never increase the residual.
template <class Model>
DlsOutcome dls_minimize(std::vector<double> x, Model&& model, const DlsOptions& opt = {}) {
    DlsOutcome out;
    const std::size_t nx = x.size();
    std::vector<double> r, J;
    model(x, r, J);
    const std::size_t nr = r.size();
    auto sumsq = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s += e * e;
        return s;
    };
    double S = sumsq(r);
    out.accepted_residuals.push_back(std::sqrt(S));

    double lambda = opt.lambda0;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        // g = J^T r, N = J^T J
        std::vector<double> g(nx, 0.0), N(nx * nx, 0.0);
        for (std::size_t k = 0; k < nr; ++k)
            for (std::size_t a = 0; a < nx; ++a) {
                g[a] += J[k * nx + a] * r[k];
                for (std::size_t b = 0; b <= a; ++b) N[a * nx + b] += J[k * nx + a] * J[k * nx + b];
            }
        for (std::size_t a = 0; a < nx; ++a)
            for (std::size_t b = a + 1; b < nx; ++b) N[a * nx + b] = N[b * nx + a];

        double gnorm = 0.0;
        for (double e : g) gnorm += e * e;
        gnorm = std::sqrt(gnorm);
        out.gradient_norm = gnorm;
        if (gnorm < opt.tol_gradient || S < 1e-30) {
            out.converged = true;
            break;
        }

        std::vector<double> A = N;
        for (std::size_t a = 0; a < nx; ++a) {
            const double d = N[a * nx + a];
            A[a * nx + a] += lambda * (d > 0.0 ? d : 1.0);
        }
        std::vector<double> rhs(nx);
        for (std::size_t a = 0; a < nx; ++a) rhs[a] = -g[a];
        std::vector<double> dx;
        try {
            dx = solve_dense(A, rhs);
        } catch (const NumericalError&) {
            lambda *= opt.lambda_up;
            continue;
        }

        std::vector<double> x_new(nx);
        for (std::size_t a = 0; a < nx; ++a) x_new[a] = x[a] + dx[a];
        std::vector<double> r_new, J_new;
        model(x_new, r_new, J_new);
        const double S_new = sumsq(r_new);

        if (std::isfinite(S_new) && S_new <= S) {
            const double rel = (S - S_new) / (S > 0.0 ? S : 1.0);
            x = std::move(x_new);
            r = std::move(r_new);
            J = std::move(J_new);
            S = S_new;
            out.accepted_residuals.push_back(std::sqrt(S));
            lambda = std::max(lambda * opt.lambda_down, 1e-15);
            if (rel < opt.tol_rel_residual) {
                out.converged = true;
                ++it;
                break;
            }
        } else {
            lambda *= opt.lambda_up;
            if (lambda > 1e15) break;
        }
    }
    out.x = x;
    out.residual_norm = std::sqrt(S);
    out.iterations = it;
    return out;
}

}  // namespace detail

/// Fit the Burgers constants to one fast-sintering time series by damped
/// least squares on the creep model. Fracture forces are converted to
/// indentations with init.f0_b before fitting (f0_b itself is estimated
/// separately from a load sweep and stays fixed here). Free parameters are
/// optimized in log space, which keeps them positive.
inline FitResult fit_burgers_dls(const SinteringDataset& data, const BurgersParams& init,
                                 const ParameterMask& mask = {}) {
    data.validate();
    if (data.kind != SinteringDataset::Kind::time_series)
        throw ConfigError("fit_burgers_dls: needs a time-series dataset");
    init.validate();

    const double f = data.applied_load;
    std::vector<double> ts, ds;
    ts.reserve(data.samples.size());
    for (const auto& [t, ff] : data.samples) {
        ts.push_back(t);
        ds.push_back(sintering_to_indentation(ff, init.f0_b, data.tau_n, data.R_eq));
    }

    // active parameter order: k_i, k_d, c_i, c_d (free ones only)
    const bool free_p[4] = {!mask.fix_k_i, !mask.fix_k_d, !mask.fix_c_i, !mask.fix_c_d};
    std::vector<int> active;
    for (int a = 0; a < 4; ++a)
        if (free_p[a]) active.push_back(a);
    if (active.empty()) throw ConfigError("fit_burgers_dls: all parameters fixed");
    if (ts.size() < active.size())
        throw ConfigError("fit_burgers_dls: fewer samples than free parameters");

    double full[4] = {init.k_i, init.k_d, init.c_i, init.c_d};
    std::vector<double> x0;
    for (int a : active) x0.push_back(std::log(full[a]));

    auto model = [&](const std::vector<double>& x, std::vector<double>& r, std::vector<double>& J) {
        double p[4] = {full[0], full[1], full[2], full[3]};
        for (std::size_t a = 0; a < active.size(); ++a) p[active[a]] = std::exp(x[a]);
        const double k_i = p[0], k_d = p[1], c_i = p[2], c_d = p[3];
        const std::size_t n = ts.size();
        r.assign(n, 0.0);
        J.assign(n * active.size(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = ts[k];
            const double E = std::exp(-t * k_d / c_d);
            r[k] = f * (1.0 / k_i + t / c_i + (1.0 - E) / k_d) - ds[k];
            // closed-form partials, chained onto log parameters
            const double d_ki = -f / (k_i * k_i);
            const double d_kd = f * (-(1.0 - E) / (k_d * k_d) + t * E / (k_d * c_d));
            const double d_ci = -f * t / (c_i * c_i);
            const double d_cd = -f * t * E / (c_d * c_d);
            const double dp[4] = {d_ki, d_kd, d_ci, d_cd};
            for (std::size_t a = 0; a < active.size(); ++a)
                J[k * active.size() + a] = dp[active[a]] * p[active[a]];
        }
    };

    const auto res = detail::dls_minimize(x0, model);

    FitResult out;
    double p[4] = {full[0], full[1], full[2], full[3]};
    for (std::size_t a = 0; a < active.size(); ++a) p[active[a]] = std::exp(res.x[a]);
    out.params = init;
    out.params.k_i = p[0];
    out.params.k_d = p[1];
    out.params.c_i = p[2];
    out.params.c_d = p[3];
    out.residual_norm = res.residual_norm;
    out.gradient_norm = res.gradient_norm;
    out.iterations = res.iterations;
    out.converged = res.converged;
    out.accepted_residuals = res.accepted_residuals;
    return out;
}

/// Model residuals of one fitted parameter set against its dataset, for fit
/// reports: (t, measured d, model d) per sample.
inline std::vector<std::array<double, 3>> creep_fit_residuals(const SinteringDataset& data,
                                                              const BurgersParams& params) {
    std::vector<std::array<double, 3>> rows;
    for (const auto& [t, ff] : data.samples) {
        const double d = sintering_to_indentation(ff, params.f0_b, data.tau_n, data.R_eq);
        rows.push_back({t, d, creep_displacement(params, data.applied_load, t)});
    }
    return rows;
}

/// Empirical temperature-shift constants fitted from per-temperature
/// parameter sets: one (C1, C2) pair each for the delayed viscosity, the
/// instantaneous viscosity, and the relaxation time scale c_d/k_d.
struct TemperatureShiftFit {
    WlfConstants delayed;
    WlfConstants instantaneous;
    WlfConstants relaxation_time;
    bool converged = false;
};

namespace detail {

inline WlfConstants fit_wlf(const std::vector<double>& dT, const std::vector<double>& log_shift,
                            bool& ok) {
    // log a = -C1 dT / (C2 + dT); start from a generic viscoelastic guess
    std::vector<double> x0 = {-2.0, -10.0};
    auto model = [&](const std::vector<double>& x, std::vector<double>& r, std::vector<double>& J) {
        const double c1 = x[0], c2 = x[1];
        r.assign(dT.size(), 0.0);
        J.assign(dT.size() * 2, 0.0);
        for (std::size_t k = 0; k < dT.size(); ++k) {
            const double den = c2 + dT[k];
            r[k] = -c1 * dT[k] / den - log_shift[k];
            J[k * 2 + 0] = -dT[k] / den;
            J[k * 2 + 1] = c1 * dT[k] / (den * den);
        }
    };
    const auto res = dls_minimize(x0, model);
    ok = ok && res.converged;
    return {res.x[0], res.x[1]};
}

}  // namespace detail

/// Fit shift constants from at least three temperatures, one of which must
/// sit at the anchor T0. Shifts are taken relative to the anchor row and
/// fitted on log-shift data with the same damped least-squares engine.
inline TemperatureShiftFit fit_temperature_shifts(
    const std::vector<std::pair<double, BurgersParams>>& fits, double T0 = 272.15) {
    if (fits.size() < 3) throw ConfigError("fit_temperature_shifts: need at least 3 temperatures");
    const BurgersParams* anchor = nullptr;
    for (const auto& [T, p] : fits)
        if (T == T0) anchor = &p;
    if (anchor == nullptr) throw ConfigError("fit_temperature_shifts: no row at the anchor T0");
    std::vector<double> dT;
    std::vector<double> s_cd, s_ci, s_tr;
    for (const auto& [T, p] : fits) {
        if (T == T0) continue;
        for (double seen : dT)
            if (seen == T - T0)
                throw ConfigError("fit_temperature_shifts: duplicate temperature rows");
        dT.push_back(T - T0);
        s_cd.push_back(std::log(p.c_d / anchor->c_d));
        s_ci.push_back(std::log(p.c_i / anchor->c_i));
        s_tr.push_back(std::log((p.c_d / p.k_d) / (anchor->c_d / anchor->k_d)));
    }
    if (dT.size() < 2) throw ConfigError("fit_temperature_shifts: need at least 2 non-anchor rows");
    TemperatureShiftFit out;
    bool ok = true;
    out.delayed = detail::fit_wlf(dT, s_cd, ok);
    out.instantaneous = detail::fit_wlf(dT, s_ci, ok);
    out.relaxation_time = detail::fit_wlf(dT, s_tr, ok);
    out.converged = ok;
    return out;
}

}  // namespace icedem

#endif  // ICEDEM_CALIBRATION_HPP

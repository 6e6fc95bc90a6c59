#include "nlsym/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>

namespace nlsym {

void EvolveConfig::validate() const {
    if (!(dt_initial > 0) || !(t_max > 0) || !(cfl_safety > 0) ||
        !(blowup_gradient_factor > 0) || !(scatter_window > 0) ||
        !(scatter_decay_factor > 0) || sample_stride <= 0 || !(energy_drift_tol > 0) ||
        !(dt_floor > 0))
        throw InvalidParameters("evolve configuration entries must be positive");
    if (scatter_window < 10.0 * dt_initial)
        throw InvalidParameters("scatter window must cover at least 10 initial steps");
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::ScatterLike: return "SCATTER_LIKE";
        case Outcome::BlowupLike: return "BLOWUP_LIKE";
        case Outcome::Undecided: return "UNDECIDED";
    }
    return "?";
}

double scattering_alpha(const NlsParameters& params) {
    const double p = params.p;
    const double d = params.dim;
    return 2.0 * (p - 1.0) * (p + 1.0) / (4.0 - (d - 2.0) * (p - 1.0));
}

namespace {

void nonlinear_phase(std::vector<Complex>& samples, double tau, double p) {
    for (Complex& z : samples) {
        const double amp = std::abs(z);
        if (amp == 0) continue;
        z *= std::polar(1.0, tau * std::pow(amp, p - 1.0));
    }
}

std::vector<Complex> linear_multiplier(const Grid& grid, double dt) {
    const std::vector<double> k2 = laplacian_symbol(grid);
    std::vector<Complex> mult(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i) mult[i] = std::polar(1.0, -k2[i] * dt);
    return mult;
}

struct StepDiagnostics {
    double grad_sq = 0;
    double pot = 0;       // |u|_{p+1}^{p+1}
    double energy = 0;
    double virial = 0;
    double lp_norm_p1 = 0;
};

StepDiagnostics diagnose(const ComplexField& u, const NlsParameters& params) {
    StepDiagnostics d;
    d.grad_sq = gradient_norm_sq(u);
    d.pot = lp_norm_pow(u, params.p + 1.0);
    d.energy = 0.5 * d.grad_sq - d.pot / (params.p + 1.0);
    d.virial = (2.0 / params.dim) * d.grad_sq -
               (params.p - 1.0) / (params.p + 1.0) * d.pot;
    d.lp_norm_p1 = std::pow(d.pot, 1.0 / (params.p + 1.0));
    return d;
}

// Windowed scattering bookkeeping shared by the grid and sector drivers.
class ScatterDetector {
  public:
    ScatterDetector(double window, double decay_factor, double alpha)
        : window_(window), decay_(decay_factor), alpha_(alpha) {}

    // feed one accepted step; returns true when the scattering signature fires
    bool feed(double t_new, double dt, double lp_norm_p1, double virial, double virial_tol) {
        accum_ += dt * std::pow(lp_norm_p1, alpha_);
        norm_time_integral_ += dt * lp_norm_p1;
        if (virial < -virial_tol) virial_stayed_positive_ = false;
        if (t_new >= (completed_ + 1) * window_) {
            const double mean_norm = norm_time_integral_ / window_;
            const double increment = accum_ - last_accum_;
            last_accum_ = accum_;
            norm_time_integral_ = 0;
            ++completed_;
            if (first_window_norm_ < 0) {
                first_window_norm_ = mean_norm;
            } else {
                recent_increments_.push_back(increment);
                if (recent_increments_.size() > 3) recent_increments_.pop_front();
                const bool decayed = mean_norm <= decay_ * first_window_norm_;
                bool slowing = recent_increments_.size() == 3;
                for (std::size_t i = 0; i + 1 < recent_increments_.size() && slowing; ++i)
                    if (recent_increments_[i] <= recent_increments_[i + 1]) slowing = false;
                if (decayed && slowing && virial_stayed_positive_) return true;
            }
        }
        return false;
    }

    double accumulated() const { return accum_; }

  private:
    double window_, decay_, alpha_;
    double accum_ = 0, last_accum_ = 0, norm_time_integral_ = 0;
    double first_window_norm_ = -1;
    long long completed_ = 0;
    std::deque<double> recent_increments_;
    bool virial_stayed_positive_ = true;
};

}  // namespace

ComplexField step(const ComplexField& u, double dt, const NlsParameters& params,
                  bool linear_only) {
    if (!(dt != 0) || !std::isfinite(dt)) throw InvalidParameters("dt must be nonzero finite");
    std::vector<Complex> samples = u.samples();
    if (!linear_only) nonlinear_phase(samples, 0.5 * dt, params.p);
    ComplexField half(u.grid(), std::move(samples));
    ComplexField lin = apply_spectral_multiplier(half, linear_multiplier(u.grid(), dt));
    std::vector<Complex> out = lin.samples();
    if (!linear_only) nonlinear_phase(out, 0.5 * dt, params.p);
    ComplexField result(u.grid(), std::move(out));
    result.check_finite();
    return result;
}

TrajectoryRecord evolve(const ComplexField& u0, const NlsParameters& params,
                        const EvolveConfig& config, const SymmetryGroup* group) {
    config.validate();
    u0.check_finite();
    if (group && symmetrization_residual(u0, *group) > 1e-8)
        throw NotGroupInvariant("initial data breaks the requested invariance");

    TrajectoryRecord traj;
    traj.params = params;
    const Grid& grid = u0.grid();

    ComplexField u = u0;
    double t = 0;
    double dt = config.dt_initial * config.cfl_safety;
    const double mass0 = mass(u0);
    StepDiagnostics diag = diagnose(u, params);
    const double grad0 = std::sqrt(diag.grad_sq);
    const double alpha = scattering_alpha(params);
    ScatterDetector scatter(config.scatter_window, config.scatter_decay_factor, alpha);

    std::vector<Complex> mult = linear_multiplier(grid, dt);
    double mult_dt = dt;

    // diagnostics_valid_until grows while samples stay uncontaminated
    traj.diagnostics_valid_until = -1;
    auto push_sample = [&](double accum) {
        const double bmass = u.boundary_mass_fraction();
        FunctionalReport rep;
        rep.gradient_sq = diag.grad_sq;
        rep.mass = mass(u);
        rep.potential = diag.pot;
        rep.momentum = momentum(u);
        rep.energy = diag.energy;
        rep.action = rep.energy + 0.5 * params.omega * rep.mass;
        rep.virial = diag.virial;
        rep.positive_part = rep.action - 0.25 * params.dim * rep.virial;
        traj.times.push_back(t);
        traj.reports.push_back(rep);
        traj.variances.push_back(variance(u));
        traj.scatter_accum.push_back(accum);
        traj.sym_residuals.push_back(group ? symmetrization_residual(u, *group) : 0.0);
        traj.dts.push_back(dt);
        traj.boundary_mass.push_back(bmass);
        if (bmass < 1e-6 &&
            traj.diagnostics_valid_until == static_cast<long long>(traj.times.size()) - 2)
            traj.diagnostics_valid_until = static_cast<long long>(traj.times.size()) - 1;
    };

    push_sample(0.0);

    long long steps = 0;
    bool done = false;
    while (!done && t < config.t_max - 1e-15) {
        const double dt_eff = std::min(dt, config.t_max - t);
        if (dt_eff != mult_dt) {
            mult = linear_multiplier(grid, dt_eff);
            mult_dt = dt_eff;
        }
        // Strang step with the cached linear phase
        std::vector<Complex> samples = u.samples();
        if (!config.linear_only) nonlinear_phase(samples, 0.5 * dt_eff, params.p);
        ComplexField half(grid, std::move(samples));
        ComplexField lin = apply_spectral_multiplier(half, mult);
        std::vector<Complex> out = lin.samples();
        if (!config.linear_only) nonlinear_phase(out, 0.5 * dt_eff, params.p);
        ComplexField u_try(grid, std::move(out));

        const StepDiagnostics diag_try = diagnose(u_try, params);
        if (config.adaptive) {
            const bool drift_bad =
                std::abs(diag_try.energy - diag.energy) >
                config.energy_drift_tol * std::max(mass0, 1e-300);
            const bool grad_jump = diag_try.grad_sq > 4.0 * std::max(diag.grad_sq, 1e-300);
            if (drift_bad || grad_jump) {
                dt *= 0.5;
                if (dt < config.dt_floor) {
                    traj.outcome = Outcome::BlowupLike;
                    traj.termination_reason = "DT_UNDERFLOW";
                    done = true;
                }
                continue;
            }
        }

        u = std::move(u_try);
        t += dt_eff;
        diag = diag_try;
        ++steps;

        const double virial_tol = 1e-8 * (2.0 / params.dim) * diag.grad_sq + 1e-14;
        const bool scatter_fired =
            scatter.feed(t, dt_eff, diag.lp_norm_p1, diag.virial, virial_tol);

        if (std::sqrt(diag.grad_sq) >= config.blowup_gradient_factor * grad0) {
            traj.outcome = Outcome::BlowupLike;
            traj.termination_reason = "GRADIENT_GROWTH";
            done = true;
        } else if (scatter_fired) {
            traj.outcome = Outcome::ScatterLike;
            traj.termination_reason = "WINDOWED_NORM_DECAY";
            done = true;
        }

        if (steps % config.sample_stride == 0 || done) push_sample(scatter.accumulated());
    }

    if (!done) {
        traj.outcome = Outcome::Undecided;
        traj.termination_reason = "T_MAX";
        if (traj.times.empty() || traj.times.back() != t) push_sample(scatter.accumulated());
    }
    traj.final_state = std::move(u);
    return traj;
}

void TrajectoryRecord::save_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << "t,M,E";
    const char* names[3] = {"Px", "Py", "Pz"};
    for (int a = 0; a < params.dim; ++a) os << ',' << names[a];
    os << ",S_omega,K,variance,scatter_norm_accum,sym_residual,dt\n";
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t i = 0; i < times.size(); ++i) {
        const FunctionalReport& r = reports[i];
        os << num(times[i]) << ',' << num(r.mass) << ',' << num(r.energy);
        for (double p : r.momentum) os << ',' << num(p);
        os << ',' << num(r.action) << ',' << num(r.virial) << ',' << num(variances[i]) << ','
           << num(scatter_accum[i]) << ',' << num(sym_residuals[i]) << ',' << num(dts[i])
           << "\n";
    }
}

VirialReport virial_report(const TrajectoryRecord& traj, const NlsParameters& params) {
    const long long limit = traj.diagnostics_valid_until >= 0
                                ? traj.diagnostics_valid_until
                                : static_cast<long long>(traj.size()) - 1;
    if (limit + 1 < 5) throw TooFewSamples("need at least 5 uncontaminated samples");

    // longest uniformly spaced prefix
    const double dt0 = traj.times[1] - traj.times[0];
    long long last = 1;
    for (long long i = 2; i <= limit; ++i) {
        if (std::abs((traj.times[i] - traj.times[i - 1]) - dt0) > 1e-9 * dt0) break;
        last = i;
    }
    if (last + 1 < 5) throw TooFewSamples("fewer than 5 uniformly spaced samples");

    VirialReport rep;
    rep.samples_used = static_cast<int>(last + 1);
    for (long long i = 1; i < last; ++i) {
        const double lhs = (traj.variances[i - 1] - 2 * traj.variances[i] +
                            traj.variances[i + 1]) / (dt0 * dt0);
        const double rhs = 4.0 * params.dim * traj.reports[i].virial;
        const double dev = std::abs(lhs - rhs);
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, dev);
        rep.max_rel_deviation =
            std::max(rep.max_rel_deviation, dev / std::max(std::abs(rhs), 1e-12));
    }
    return rep;
}

double symmetry_drift(const TrajectoryRecord& traj, const SymmetryGroup& group) {
    (void)group;
    double worst = 0;
    for (double r : traj.sym_residuals) worst = std::max(worst, r);
    return worst;
}

// -- rotation-phase sector (d = 2) ----------------------------------------------

namespace {

struct SectorOperator {
    // tridiagonal coefficients of g'' + g'/r - m^2 g/r^2 on the uniform
    // interior grid, conservative form (Hermitian w.r.t. the r dr weight)
    std::vector<double> lower, diag, upper;

    SectorOperator(const std::vector<double>& r, int m) {
        const std::size_t n = r.size();
        const double h = r[1] - r[0];
        lower.assign(n, 0.0);
        diag.assign(n, 0.0);
        upper.assign(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double rm = r[i] - 0.5 * h;
            const double rp = r[i] + 0.5 * h;
            lower[i] = rm / (r[i] * h * h);
            upper[i] = rp / (r[i] * h * h);
            diag[i] = -(rm + rp) / (r[i] * h * h) - double(m) * m / (r[i] * r[i]);
        }
    }
};

// Thomas solve of (I - i dt/2 L) x = rhs with Dirichlet ends.
void crank_nicolson(std::vector<Complex>& g, const SectorOperator& op, double dt) {
    const std::size_t n = g.size();
    const Complex ih(0.0, 0.5 * dt);
    std::vector<Complex> rhs(n, Complex(0, 0));
    for (std::size_t i = 1; i + 1 < n; ++i) {
        rhs[i] = g[i] + ih * (op.lower[i] * g[i - 1] + op.diag[i] * g[i] +
                              op.upper[i] * g[i + 1]);
    }
    std::vector<Complex> a(n), b(n), c(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        a[i] = -ih * op.lower[i];
        b[i] = Complex(1, 0) - ih * op.diag[i];
        c[i] = -ih * op.upper[i];
    }
    // forward sweep on the interior block
    std::vector<Complex> cp(n), dp(n);
    const std::size_t lo = 1, hi = n - 2;
    cp[lo] = c[lo] / b[lo];
    dp[lo] = rhs[lo] / b[lo];
    for (std::size_t i = lo + 1; i <= hi; ++i) {
        const Complex denom = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / denom;
        dp[i] = (rhs[i] - a[i] * dp[i - 1]) / denom;
    }
    g[hi] = dp[hi];
    for (std::size_t i = hi; i-- > lo;) g[i] = dp[i] - cp[i] * g[i + 1];
    g[0] = Complex(0, 0);
    g[n - 1] = Complex(0, 0);
}

struct SectorDiagnostics {
    double mass = 0, grad_sq = 0, pot = 0, energy = 0, virial = 0, lp_norm_p1 = 0;
    double variance = 0, boundary_mass = 0;
};

SectorDiagnostics sector_diagnose(const RadialState& s, const NlsParameters& params) {
    SectorDiagnostics d;
    const std::size_t n = s.values.size();
    const double h = s.radii[1] - s.radii[0];
    const double twopi = 2.0 * M_PI;
    const int m = s.harmonic;
    double boundary = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const double r = s.radii[i];
        const double a2 = std::norm(s.values[i]);
        const double w = r * h * twopi;
        d.mass += a2 * w;
        d.pot += std::pow(std::sqrt(a2), params.p + 1.0) * w;
        d.variance += r * r * a2 * w;
        d.grad_sq += double(m) * m / (r * r) * a2 * w;
        if (i + 2 >= n) boundary += a2 * w;
        const Complex dg = (i + 1 < n ? s.values[i + 1] : Complex(0, 0)) - s.values[i - 1];
        const double deriv2 = std::norm(dg / (2 * h));
        d.grad_sq += deriv2 * w;
    }
    d.energy = 0.5 * d.grad_sq - d.pot / (params.p + 1.0);
    d.virial = (2.0 / params.dim) * d.grad_sq -
               (params.p - 1.0) / (params.p + 1.0) * d.pot;
    d.lp_norm_p1 = std::pow(d.pot, 1.0 / (params.p + 1.0));
    d.boundary_mass = d.mass > 0 ? boundary / d.mass : 0.0;
    return d;
}

}  // namespace

TrajectoryRecord angular_sector_evolve(const RadialState& g0, const NlsParameters& params,
                                       const EvolveConfig& config) {
    if (params.dim != 2) throw WrongDimension("sector reduction is two-dimensional");
    if (g0.harmonic < 1) throw InvalidParameters("harmonic index m must be >= 1");
    if (g0.radii.size() < 8 || g0.radii[0] != 0.0)
        throw InvalidParameters("radial grid must start at 0");
    config.validate();

    TrajectoryRecord traj;
    traj.params = params;
    RadialState s = g0;
    s.values.front() = Complex(0, 0);
    s.values.back() = Complex(0, 0);

    SectorOperator op(s.radii, s.harmonic);
    double t = 0;
    double dt = config.dt_initial * config.cfl_safety;
    SectorDiagnostics diag = sector_diagnose(s, params);
    const double mass0 = diag.mass;
    const double grad0 = std::sqrt(diag.grad_sq);
    ScatterDetector scatter(config.scatter_window, config.scatter_decay_factor,
                            scattering_alpha(params));

    traj.diagnostics_valid_until = -1;
    auto push_sample = [&]() {
        FunctionalReport rep;
        rep.gradient_sq = diag.grad_sq;
        rep.mass = diag.mass;
        rep.potential = diag.pot;
        rep.momentum = {0.0, 0.0};
        rep.energy = diag.energy;
        rep.action = rep.energy + 0.5 * params.omega * rep.mass;
        rep.virial = diag.virial;
        rep.positive_part = rep.action - 0.25 * params.dim * rep.virial;
        traj.times.push_back(t);
        traj.reports.push_back(rep);
        traj.variances.push_back(diag.variance);
        traj.scatter_accum.push_back(scatter.accumulated());
        traj.sym_residuals.push_back(0.0);
        traj.dts.push_back(dt);
        traj.boundary_mass.push_back(diag.boundary_mass);
        if (diag.boundary_mass < 1e-6 &&
            traj.diagnostics_valid_until == static_cast<long long>(traj.times.size()) - 2)
            traj.diagnostics_valid_until = static_cast<long long>(traj.times.size()) - 1;
    };
    push_sample();

    long long steps = 0;
    bool done = false;
    while (!done && t < config.t_max - 1e-15) {
        const double dt_eff = std::min(dt, config.t_max - t);
        RadialState s_try = s;
        if (!config.linear_only) {
            for (Complex& z : s_try.values) {
                const double amp = std::abs(z);
                if (amp > 0) z *= std::polar(1.0, 0.5 * dt_eff * std::pow(amp, params.p - 1.0));
            }
        }
        crank_nicolson(s_try.values, op, dt_eff);
        if (!config.linear_only) {
            for (Complex& z : s_try.values) {
                const double amp = std::abs(z);
                if (amp > 0) z *= std::polar(1.0, 0.5 * dt_eff * std::pow(amp, params.p - 1.0));
            }
        }
        for (const Complex& z : s_try.values)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw NonFinite("sector state became non-finite");

        const SectorDiagnostics diag_try = sector_diagnose(s_try, params);
        if (config.adaptive) {
            const bool drift_bad = std::abs(diag_try.energy - diag.energy) >
                                   config.energy_drift_tol * std::max(mass0, 1e-300);
            const bool grad_jump = diag_try.grad_sq > 4.0 * std::max(diag.grad_sq, 1e-300);
            if (drift_bad || grad_jump) {
                dt *= 0.5;
                if (dt < config.dt_floor) {
                    traj.outcome = Outcome::BlowupLike;
                    traj.termination_reason = "DT_UNDERFLOW";
                    done = true;
                }
                continue;
            }
        }
        s = std::move(s_try);
        t += dt_eff;
        diag = diag_try;
        ++steps;

        const double virial_tol = 1e-8 * (2.0 / params.dim) * diag.grad_sq + 1e-14;
        const bool scatter_fired =
            scatter.feed(t, dt_eff, diag.lp_norm_p1, diag.virial, virial_tol);
        if (std::sqrt(diag.grad_sq) >= config.blowup_gradient_factor * grad0) {
            traj.outcome = Outcome::BlowupLike;
            traj.termination_reason = "GRADIENT_GROWTH";
            done = true;
        } else if (scatter_fired) {
            traj.outcome = Outcome::ScatterLike;
            traj.termination_reason = "WINDOWED_NORM_DECAY";
            done = true;
        }
        if (steps % config.sample_stride == 0 || done) push_sample();
    }
    if (!done) {
        traj.outcome = Outcome::Undecided;
        traj.termination_reason = "T_MAX";
        if (traj.times.empty() || traj.times.back() != t) push_sample();
    }
    return traj;
}

ComplexField reconstruct_sector_field(const RadialState& g, const Grid& grid) {
    if (grid.dim != 2) throw WrongDimension("sector reconstruction needs a 2D grid");
    const double h = g.radii[1] - g.radii[0];
    const double r_max = g.radii.back();
    std::vector<Complex> samples(grid.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto idx = grid.unflatten(i);
        const double x = grid.coord(idx[0]);
        const double y = grid.coord(idx[1]);
        const double r = std::hypot(x, y);
        Complex gv(0, 0);
        if (r < r_max) {
            const double pos = r / h;
            const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(pos),
                                                        g.values.size() - 2);
            const double w = pos - j;
            gv = (1.0 - w) * g.values[j] + w * g.values[j + 1];
        }
        const double phi = std::atan2(y, x);
        samples[i] = gv * std::polar(1.0, g.harmonic * phi);
    }
    return ComplexField(grid, std::move(samples));
}

}  // namespace nlsym

#include "nlsym/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace nlsym {

namespace {

double sphere_area(int d) {
    switch (d) {
        case 1: return 2.0;          // two half-lines
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        default: throw WrongDimension("unsupported dimension");
    }
}

}  // namespace

// -- RadialProfile -------------------------------------------------------------

double RadialProfile::at(double r) const {
    if (radii.size() < 4) throw Error("profile too short");
    const double dr = radii[1] - radii[0];
    if (r >= radii.back()) return 0.0;
    if (r <= 0) return values.front();
    const double pos = r / dr;
    long long i = static_cast<long long>(std::floor(pos));
    // 4-point Lagrange interpolation clamped to the table
    long long i0 = std::clamp<long long>(i - 1, 0, static_cast<long long>(radii.size()) - 4);
    double out = 0;
    for (int a = 0; a < 4; ++a) {
        double w = 1;
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            w *= (pos - (i0 + b)) / double(a - b);
        }
        out += w * values[i0 + a];
    }
    return out;
}

double RadialProfile::radial_integral(const std::function<double(double)>& integrand) const {
    // composite Simpson over the uniform grid, r^{d-1} weight
    const double dr = radii[1] - radii[0];
    const int d = params.dim;
    const std::size_t n = radii.size();
    auto term = [&](std::size_t i) {
        return integrand(values[i]) * std::pow(radii[i], d - 1);
    };
    double acc = 0;
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) acc += (term(i) + 4.0 * term(i + 1) + term(i + 2)) * dr / 3.0;
    if (i + 1 < n) acc += 0.5 * (term(i) + term(i + 1)) * dr;  // trapezoid remainder
    return acc * sphere_area(d);
}

double RadialProfile::mass() const {
    return radial_integral([](double q) { return q * q; });
}

double RadialProfile::lp_pow(double q) const {
    return radial_integral([q](double v) { return std::pow(std::abs(v), q); });
}

double RadialProfile::gradient_norm_sq() const {
    const double dr = radii[1] - radii[0];
    const int d = params.dim;
    const std::size_t n = radii.size();
    std::vector<double> deriv(n, 0.0);
    for (std::size_t i = 2; i + 2 < n; ++i)
        deriv[i] = (values[i - 2] - 8 * values[i - 1] + 8 * values[i + 1] - values[i + 2]) /
                   (12 * dr);
    deriv[0] = 0.0;  // even profile
    deriv[1] = (values[2] - values[0]) / (2 * dr);
    deriv[n - 2] = (values[n - 1] - values[n - 3]) / (2 * dr);
    deriv[n - 1] = (values[n - 1] - values[n - 2]) / dr;
    double acc = 0;
    auto term = [&](std::size_t i) { return deriv[i] * deriv[i] * std::pow(radii[i], d - 1); };
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) acc += (term(i) + 4.0 * term(i + 1) + term(i + 2)) * dr / 3.0;
    if (i + 1 < n) acc += 0.5 * (term(i) + term(i + 1)) * dr;
    return acc * sphere_area(d);
}

FunctionalReport RadialProfile::functionals() const {
    FunctionalReport r;
    r.gradient_sq = gradient_norm_sq();
    r.mass = mass();
    r.potential = lp_pow(params.p + 1.0);
    r.momentum.assign(params.dim, 0.0);  // real radial profile
    const double p = params.p;
    r.energy = 0.5 * r.gradient_sq - r.potential / (p + 1.0);
    r.action = r.energy + 0.5 * params.omega * r.mass;
    r.virial = (2.0 / params.dim) * r.gradient_sq - (p - 1.0) / (p + 1.0) * r.potential;
    r.positive_part = r.action - 0.25 * params.dim * r.virial;
    return r;
}

double RadialProfile::ode_residual() const {
    const double dr = radii[1] - radii[0];
    const int d = params.dim;
    const double peak_v = peak();
    double worst = 0;
    for (std::size_t i = 2; i + 2 < radii.size(); ++i) {
        const double r = radii[i];
        const double q = values[i];
        const double d1 = (values[i - 2] - 8 * values[i - 1] + 8 * values[i + 1] -
                           values[i + 2]) / (12 * dr);
        const double d2 = (-values[i - 2] + 16 * values[i - 1] - 30 * values[i] +
                           16 * values[i + 1] - values[i + 2]) / (12 * dr * dr);
        const double res = -d2 - (d - 1) / r * d1 + params.omega * q -
                           std::pow(std::abs(q), params.p - 1.0) * q;
        worst = std::max(worst, std::abs(res));
    }
    return worst / peak_v;
}

double ground_state_action(const RadialProfile& profile) {
    return profile.functionals().action;
}

// -- closed form (d = 1) --------------------------------------------------------

RadialProfile closed_form_1d(const NlsParameters& params, double r_max, double dr) {
    if (params.dim != 1) throw WrongDimension("closed form is one-dimensional only");
    const double p = params.p;
    const double w = params.omega;
    const double amp = std::pow((p + 1.0) * w / 2.0, 1.0 / (p - 1.0));
    const double rate = (p - 1.0) * std::sqrt(w) / 2.0;
    const double b = 2.0 / (p - 1.0);
    if (r_max <= 0) r_max = 24.0 / std::sqrt(w);
    RadialProfile prof;
    prof.params = params;
    const std::size_t n = static_cast<std::size_t>(std::ceil(r_max / dr)) + 1;
    prof.radii.resize(n);
    prof.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = i * dr;
        prof.radii[i] = r;
        prof.values[i] = amp * std::pow(1.0 / std::cosh(rate * r), b);
    }
    return prof;
}

// -- radial shooting (d = 2, 3) ---------------------------------------------------

namespace {

struct OdeState {
    double q, dq;
};

enum class ShotClass { Overshoot, Undershoot };

struct ShotResult {
    ShotClass cls;
    std::vector<double> r, q, dq;  // accepted steps
    double r_event = 0;
};

// Dormand-Prince 5(4) with adaptive steps; stops on zero crossing (overshoot)
// or slope turning positive (undershoot).
ShotResult integrate_profile(double q0, const NlsParameters& params, double r_end,
                             bool record) {
    const double w = params.omega;
    const double p = params.p;
    const int d = params.dim;
    auto rhs = [&](double r, const OdeState& s) {
        const double nl = std::pow(std::abs(s.q), p - 1.0) * s.q;
        return OdeState{s.dq, -(d - 1) / r * s.dq + w * s.q - nl};
    };

    // series start around the regular singular point
    const double r0 = 1e-4;
    const double curv = (w * q0 - std::pow(q0, p)) / d;
    OdeState s{q0 + 0.5 * curv * r0 * r0, curv * r0};
    double r = r0;
    double h = 1e-4;
    ShotResult out;
    out.cls = ShotClass::Undershoot;
    if (record) {
        out.r.push_back(0.0);
        out.q.push_back(q0);
        out.dq.push_back(0.0);
    }

    static const double A[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double C[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double B5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192,
                                 -2187.0 / 6784, 11.0 / 84, 0};
    static const double B4[7] = {5179.0 / 57600, 0, 7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    const double tol = 1e-12;
    int steps = 0;
    while (r < r_end && steps++ < 2000000) {
        h = std::min(h, r_end - r);
        OdeState k[7];
        k[0] = rhs(r, s);
        for (int stage = 1; stage < 7; ++stage) {
            OdeState acc{0, 0};
            for (int j = 0; j < stage; ++j) {
                acc.q += A[stage][j] * k[j].q;
                acc.dq += A[stage][j] * k[j].dq;
            }
            k[stage] = rhs(r + C[stage] * h, {s.q + h * acc.q, s.dq + h * acc.dq});
        }
        OdeState s5{s.q, s.dq}, s4{s.q, s.dq};
        for (int j = 0; j < 7; ++j) {
            s5.q += h * B5[j] * k[j].q;
            s5.dq += h * B5[j] * k[j].dq;
            s4.q += h * B4[j] * k[j].q;
            s4.dq += h * B4[j] * k[j].dq;
        }
        const double scale_q = std::abs(s5.q) + std::abs(h * k[0].q) + 1e-30;
        const double scale_dq = std::abs(s5.dq) + std::abs(h * k[0].dq) + 1e-30;
        const double err = std::max(std::abs(s5.q - s4.q) / (tol * scale_q + tol),
                                    std::abs(s5.dq - s4.dq) / (tol * scale_dq + tol));
        if (err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }
        r += h;
        s = s5;
        if (record) {
            out.r.push_back(r);
            out.q.push_back(s.q);
            out.dq.push_back(s.dq);
        }
        // overshoot has priority over undershoot
        if (s.q <= 0.0) {
            out.cls = ShotClass::Overshoot;
            out.r_event = r;
            return out;
        }
        if (s.dq > 0.0) {
            out.cls = ShotClass::Undershoot;
            out.r_event = r;
            return out;
        }
        h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
    }
    out.r_event = r;
    return out;  // reached r_end still decaying: undershoot side
}

double tail_value(double r, int d, double w, double a) {
    const double sw = std::sqrt(w);
    if (d == 3) return a * std::exp(-sw * r) / r;
    return a * std::cyl_bessel_k(0.0, sw * r);
}

}  // namespace

RadialProfile shoot_radial(const NlsParameters& params, double tol) {
    if (params.dim != 2 && params.dim != 3)
        throw WrongDimension("radial shooting covers d = 2 and d = 3");
    const double w = params.omega;
    const double sw = std::sqrt(w);
    const double r_end = 30.0 / sw;

    // bracket search over Q(0)
    double lo = 0, hi = 0;
    double prev = 0.1;
    ShotClass prev_cls = integrate_profile(prev, params, r_end, false).cls;
    bool found = false;
    for (double q0 = prev * 1.25; q0 <= 50.0; q0 *= 1.25) {
        const ShotClass cls = integrate_profile(q0, params, r_end, false).cls;
        if (cls != prev_cls) {
            if (prev_cls == ShotClass::Undershoot) {
                lo = prev;
                hi = q0;
            } else {
                lo = q0;
                hi = prev;
            }
            found = true;
            break;
        }
        prev = q0;
        prev_cls = cls;
    }
    if (!found) throw BracketNotFound("no sign change of the shot over Q(0) in [0.1, 50]");

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // hit double resolution
        const ShotClass cls = integrate_profile(mid, params, r_end, false).cls;
        if (cls == ShotClass::Overshoot)
            hi = mid;
        else
            lo = mid;
    }

    // final run on the decaying side
    ShotResult run = integrate_profile(lo, params, r_end, true);
    const double peak = run.q.front();

    // matching radius: last clean decaying point above 1e-6 of the peak
    std::size_t match = 0;
    for (std::size_t i = 1; i < run.r.size(); ++i) {
        if (run.q[i] <= 0 || run.dq[i] > 0) break;
        if (run.q[i] >= 1e-6 * peak) match = i;
    }
    if (match == 0 || run.r[match] < 2.0 / sw)
        throw NoConvergence("profile did not decay cleanly");
    const double r_match = run.r[match];
    const double a = (params.dim == 3)
                         ? run.q[match] * r_match * std::exp(sw * r_match)
                         : run.q[match] / std::cyl_bessel_k(0.0, sw * r_match);

    const double dr = 1e-3 / sw;
    const double r_max = std::max(r_match + 18.0 / sw, 24.0 / sw);
    const std::size_t n = static_cast<std::size_t>(std::ceil(r_max / dr)) + 1;
    RadialProfile prof;
    prof.params = params;
    prof.radii.resize(n);
    prof.values.resize(n);

    // cubic Hermite interpolation of the integrated steps
    std::size_t seg = 0;
    const double blend_w = 1.0 / sw;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = i * dr;
        prof.radii[i] = r;
        double numeric = 0;
        if (r <= run.r[match]) {
            while (seg + 1 < run.r.size() && run.r[seg + 1] < r) ++seg;
            const std::size_t s2 = std::min(seg + 1, run.r.size() - 1);
            const double hseg = run.r[s2] - run.r[seg];
            if (hseg <= 0) {
                numeric = run.q[seg];
            } else {
                const double t = (r - run.r[seg]) / hseg;
                const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
                const double h10 = t * (1 - t) * (1 - t);
                const double h01 = t * t * (3 - 2 * t);
                const double h11 = t * t * (t - 1);
                numeric = h00 * run.q[seg] + h10 * hseg * run.dq[seg] + h01 * run.q[s2] +
                          h11 * hseg * run.dq[s2];
            }
        }
        if (r <= r_match - blend_w) {
            prof.values[i] = numeric;
        } else if (r >= r_match) {
            prof.values[i] = tail_value(r, params.dim, w, a);
        } else {
            const double t = (r - (r_match - blend_w)) / blend_w;
            const double chi = t * t * (3 - 2 * t);
            prof.values[i] = (1 - chi) * numeric + chi * tail_value(r, params.dim, w, a);
        }
    }
    return prof;
}

RadialProfile ground_state_profile(const NlsParameters& params) {
    return params.dim == 1 ? closed_form_1d(params) : shoot_radial(params);
}

ComplexField profile_to_field(const RadialProfile& profile, const Grid& grid) {
    if (grid.dim != profile.params.dim)
        throw DimensionMismatch("grid dimension does not match profile");
    std::vector<Complex> samples(grid.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto idx = grid.unflatten(i);
        double r2 = 0;
        for (int a = 0; a < grid.dim; ++a) {
            const double x = grid.coord(idx[a]);
            r2 += x * x;
        }
        samples[i] = Complex(profile.at(std::sqrt(r2)), 0.0);
    }
    return ComplexField(grid, std::move(samples));
}

// -- constrained minimization -----------------------------------------------------

namespace {

struct NehariNorms {
    double grad_sq, mass, pot;
};

NehariNorms norms_of(const ComplexField& f, const NlsParameters& params) {
    return {gradient_norm_sq(f), lp_norm_pow(f, 2.0), lp_norm_pow(f, params.p + 1.0)};
}

// Amplitude placing mu*f on K = 0.
double nehari_amplitude(const NehariNorms& n, const NlsParameters& params) {
    const double p = params.p;
    const double ratio = (2.0 / params.dim) * n.grad_sq / ((p - 1.0) / (p + 1.0) * n.pot);
    return std::pow(ratio, 1.0 / (p - 1.0));
}

double action_of(const NehariNorms& n, const NlsParameters& params) {
    return 0.5 * n.grad_sq + 0.5 * params.omega * n.mass - n.pot / (params.p + 1.0);
}

}  // namespace

MinimizationResult minimize_action(const SymmetryGroup& group, const NlsParameters& params,
                                   const ComplexField& init, const MinimizeOptions& opts) {
    ComplexField f = symmetrize(init, group);
    if (lp_norm(f, 2.0) < 1e-10) throw CollapseToZero("seed symmetrizes to zero");

    const Grid& grid = f.grid();
    const std::vector<double> k2 = laplacian_symbol(grid);
    const double p = params.p;
    const double w = params.omega;

    auto project = [&](ComplexField& field) {
        NehariNorms n = norms_of(field, params);
        if (!(n.pot > 0) || !(n.grad_sq > 0))
            throw CollapseToZero("iterate lost its shape during descent");
        const double mu = nehari_amplitude(n, params);
        for (std::size_t i = 0; i < field.size(); ++i) field[i] *= mu;
        n.grad_sq *= mu * mu;
        n.mass *= mu * mu;
        n.pot *= std::pow(mu, p + 1.0);
        return action_of(n, params);
    };

    double value = project(f);
    double step = opts.step;
    const double step0 = opts.step;
    int rejects = 0;
    int iter = 0;
    std::deque<double> history;

    for (; iter < opts.max_iter; ++iter) {
        // preconditioned action gradient: (omega - Lap)^{-1} (-Lap f + w f - |f|^{p-1} f)
        std::vector<Complex> spec = fft_forward(f);
        std::vector<Complex> grad_spec(spec.size());
        for (std::size_t i = 0; i < spec.size(); ++i)
            grad_spec[i] = spec[i] * (k2[i] + w) ;
        ComplexField lin = fft_inverse(grid, std::move(grad_spec));
        std::vector<Complex> dir(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double amp = std::abs(f[i]);
            dir[i] = lin[i] - std::pow(amp, p - 1.0) * f[i];
        }
        // divide by (omega + |k|^2) in Fourier space
        ComplexField gfield(grid, std::move(dir));
        std::vector<Complex> gspec = fft_forward(gfield);
        for (std::size_t i = 0; i < gspec.size(); ++i) gspec[i] /= (k2[i] + w);
        ComplexField precond = fft_inverse(grid, std::move(gspec));

        bool accepted = false;
        while (!accepted) {
            ComplexField trial = axpy(Complex(1, 0), f, Complex(-step, 0), precond);
            trial = symmetrize(trial, group);
            if (lp_norm(trial, 2.0) < 1e-10) throw CollapseToZero("iterate collapsed to zero");
            double trial_value;
            try {
                trial_value = project(trial);
            } catch (const CollapseToZero&) {
                trial_value = value + 1;  // reject
            }
            if (trial_value <= value + 1e-15 * std::abs(value)) {
                f = std::move(trial);
                value = trial_value;
                accepted = true;
                rejects = 0;
                step = std::min(step * 1.25, step0);
            } else {
                if (++rejects >= opts.no_descent_limit)
                    throw NoDescent("no descending step found");
                step *= 0.5;
                if (step < 1e-14) {
                    accepted = true;  // step underflow: converged
                    iter = opts.max_iter;
                }
            }
        }

        history.push_back(value);
        if (history.size() > 25) {
            const double old = history.front();
            history.pop_front();
            if (std::abs(old - value) < opts.value_tol * std::abs(value)) break;
        }
    }

    // land exactly on K = 0 through the scaling flow and report the exponent
    NehariRescale final_rescale = rescale_to_nehari(f, params);
    ComplexField minimizer = symmetrize(final_rescale.field, group);

    MinimizationResult res;
    res.value = evaluate(minimizer, params).action;
    res.iterations = iter;
    res.lambda0_final = final_rescale.lambda0;

    // Euler-Lagrange residual along the Nehari constraint
    {
        std::vector<Complex> spec = fft_forward(minimizer);
        std::vector<Complex> lap_spec(spec.size());
        for (std::size_t i = 0; i < spec.size(); ++i) lap_spec[i] = spec[i] * k2[i];
        ComplexField neg_lap = fft_inverse(grid, std::move(lap_spec));
        std::vector<Complex> us(minimizer.size()), uk(minimizer.size());
        for (std::size_t i = 0; i < minimizer.size(); ++i) {
            const double amp = std::abs(minimizer[i]);
            const Complex nl = std::pow(amp, p - 1.0) * minimizer[i];
            us[i] = neg_lap[i] + w * minimizer[i] - nl;
            uk[i] = (4.0 / params.dim) * neg_lap[i] - (p - 1.0) * nl;
        }
        double usk = 0, ukk = 0, uss = 0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            usk += (us[i] * std::conj(uk[i])).real();
            ukk += std::norm(uk[i]);
            uss += std::norm(us[i]);
        }
        double resid = 0;
        if (ukk > 0) {
            const double c = usk / ukk;
            for (std::size_t i = 0; i < us.size(); ++i) resid += std::norm(us[i] - c * uk[i]);
        } else {
            resid = uss;
        }
        const double denom = std::max(std::sqrt(uss), 1e-300);
        res.residual = std::sqrt(resid) / denom;
    }
    res.minimizer = std::move(minimizer);
    return res;
}

ComplexField default_seed(const SymmetryGroup& group, const Grid& grid,
                          const NlsParameters& params) {
    const double width = 2.0 / std::sqrt(params.omega);
    std::vector<Complex> samples(grid.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto idx = grid.unflatten(i);
        double r2 = 0;
        for (int a = 0; a < grid.dim; ++a) {
            const double x = grid.coord(idx[a]);
            r2 += x * x;
        }
        samples[i] = Complex(std::exp(-r2 / (2 * width * width)), 0.0);
    }
    ComplexField bump(grid, std::move(samples));
    // displace off every reflection axis so the symmetrization cannot vanish
    std::vector<double> x0(grid.dim, 0.0);
    const double h = grid.spacing();
    x0[0] = std::round(grid.length / 5.0 / h) * h;
    if (grid.dim > 1) x0[1] = std::round(grid.length / 7.0 / h) * h;
    if (grid.dim > 2) x0[2] = std::round(grid.length / 11.0 / h) * h;
    ComplexField seed = symmetrized_translate(bump, x0, group);
    if (lp_norm(seed, 2.0) < 1e-12) seed = bump;  // trivial-like groups keep the bump
    return seed;
}

}  // namespace nlsym

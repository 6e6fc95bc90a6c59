#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlsym/functionals.hpp"

namespace nlsym {

/// Radial profile of the positive ground state Q: strictly decreasing,
/// zero slope at the origin, decayed below 1e-8 of the peak at r_max.
struct RadialProfile {
    std::vector<double> radii;   // uniform grid from 0
    std::vector<double> values;
    NlsParameters params;

    double peak() const { return values.empty() ? 0.0 : values.front(); }
    double at(double r) const;   // cubic interpolation, tail-aware
    double r_max() const { return radii.empty() ? 0.0 : radii.back(); }

    /// int_0^inf g(Q(r)) r^{d-1} dr times the sphere area S_{d-1}.
    double radial_integral(const std::function<double(double)>& integrand) const;

    double mass() const;
    double gradient_norm_sq() const;
    double lp_pow(double q) const;  // integral of Q^q
    FunctionalReport functionals() const;

    /// Max-norm residual of -Q'' - (d-1)/r Q' + omega Q - Q^p over the
    /// profile, relative to the peak (fourth-order finite differences).
    double ode_residual() const;
};

/// Closed-form 1D soliton Q(x) = ((p+1) w / 2)^{1/(p-1)} sech^{2/(p-1)}((p-1) sqrt(w) x / 2).
RadialProfile closed_form_1d(const NlsParameters& params, double r_max = 0.0,
                             double dr = 1e-3);

/// Radial shooting with bisection on Q(0) for d in {2,3}; overshoot = sign
/// change, undershoot = slope turns positive. Adaptive Dormand-Prince
/// integration at relative tolerance 1e-12; exponential tail attached past
/// the matching radius.
RadialProfile shoot_radial(const NlsParameters& params, double tol = 1e-12);

/// Ground state for any supported dimension (closed form in 1D, shooting
/// otherwise).
RadialProfile ground_state_profile(const NlsParameters& params);

/// Samples a radial profile onto a periodic grid (torus distance from the
/// origin).
ComplexField profile_to_field(const RadialProfile& profile, const Grid& grid);

/// Ground-state action l = S(Q) from radial quadrature.
double ground_state_action(const RadialProfile& profile);

struct MinimizationResult {
    ComplexField minimizer;
    double value = 0;       // attained S_omega
    int iterations = 0;
    double residual = 0;    // Euler-Lagrange residual along the constraint
    double lambda0_final = 0;
};

struct MinimizeOptions {
    int max_iter = 4000;
    double step = 1.0;          // preconditioned gradient step
    double value_tol = 1e-9;    // relative S plateau over a 25-iteration window
    int no_descent_limit = 50;  // consecutive rejected steps before NoDescent
};

/// Minimizes S_omega over nonzero G-invariant fields on the Nehari set K = 0
/// by projected descent: preconditioned gradient step, symmetrization, Nehari
/// reprojection. Throws CollapseToZero / NoDescent.
MinimizationResult minimize_action(const SymmetryGroup& group, const NlsParameters& params,
                                   const ComplexField& init, const MinimizeOptions& opts = {});

/// Default nontrivial G-invariant seed: symmetrized translate of a Gaussian
/// bump placed off every reflection axis of the group.
ComplexField default_seed(const SymmetryGroup& group, const Grid& grid,
                          const NlsParameters& params);

}  // namespace nlsym

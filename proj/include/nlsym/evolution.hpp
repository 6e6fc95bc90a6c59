#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlsym/functionals.hpp"
#include "nlsym/symmetry.hpp"

namespace nlsym {

struct EvolveConfig {
    double dt_initial = 1e-3;
    double t_max = 10.0;
    double cfl_safety = 1.0;                 // multiplies dt_initial
    double blowup_gradient_factor = 1e3;     // on |grad u| / |grad u0|
    double scatter_window = 2.0;
    double scatter_decay_factor = 0.5;       // on windowed |u|_{p+1}
    int sample_stride = 20;
    double energy_drift_tol = 1e-8;          // per-step, mass-weighted
    double dt_floor = 1e-12;
    bool linear_only = false;                // drop the nonlinear phase (test mode)
    bool adaptive = true;

    void validate() const;
};

enum class Outcome { ScatterLike, BlowupLike, Undecided };
std::string to_string(Outcome o);

struct TrajectoryRecord {
    NlsParameters params;
    std::vector<double> times;
    std::vector<FunctionalReport> reports;
    std::vector<double> variances;
    std::vector<double> scatter_accum;   // cumulative int |u|_{p+1}^alpha dt
    std::vector<double> sym_residuals;
    std::vector<double> dts;
    std::vector<double> boundary_mass;
    Outcome outcome = Outcome::Undecided;
    std::string termination_reason;
    long long diagnostics_valid_until = -1;  // last sample before boundary contamination
    ComplexField final_state;

    std::size_t size() const { return times.size(); }
    void save_csv(const std::string& path) const;
};

/// Scattering diagnostic exponent alpha = 2(p-1)(p+1) / (4 - (d-2)(p-1))
/// paired with the norm index r = p+1.
double scattering_alpha(const NlsParameters& params);

/// One Strang step: exact half nonlinear phase, exact linear spectral step,
/// half nonlinear phase. Mass-conserving by construction.
ComplexField step(const ComplexField& u, double dt, const NlsParameters& params,
                  bool linear_only = false);

/// Split-step evolution with adaptive halving on energy drift or gradient
/// doubling; detects blow-up (gradient factor / dt underflow) and scattering
/// (windowed norm decay with saturating space-time accumulation).
TrajectoryRecord evolve(const ComplexField& u0, const NlsParameters& params,
                        const EvolveConfig& config,
                        const SymmetryGroup* group = nullptr);

struct VirialReport {
    double max_rel_deviation = 0;  // max |lhs - rhs| / max(|rhs|, 1e-12), pointwise
    double max_abs_deviation = 0;
    int samples_used = 0;
};

/// Checks the virial identity: second centered difference of the variance
/// against 4 d K at interior samples of the longest uniform, uncontaminated
/// sample window. Throws TooFewSamples below 5 usable samples.
VirialReport virial_report(const TrajectoryRecord& traj, const NlsParameters& params);

/// Max over samples of the recorded symmetrization residual.
double symmetry_drift(const TrajectoryRecord& traj, const SymmetryGroup& group);

// -- rotation-phase sector reduction (d = 2) ---------------------------------

/// Evolution of u(x) = e^{im phi} g(r) reduced to the radial equation
///   i g_t + g'' + g'/r - m^2 g / r^2 + |g|^{p-1} g = 0
/// on [0, r_max] with Crank-Nicolson linear steps (conservative stencil)
/// inside Strang splitting.
struct RadialState {
    std::vector<double> radii;    // uniform, radii[0] = 0
    std::vector<Complex> values;  // values[0] = 0 for m >= 1
    int harmonic = 1;
};

TrajectoryRecord angular_sector_evolve(const RadialState& g0, const NlsParameters& params,
                                       const EvolveConfig& config);

/// Samples e^{im phi} g(r) on a 2D grid.
ComplexField reconstruct_sector_field(const RadialState& g, const Grid& grid);

}  // namespace nlsym

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "nlsym/grid.hpp"

namespace nlsym {

using Complex = std::complex<double>;

/// Parameters of the focusing nonlinear Schroedinger equation
/// i u_t + Lap u + |u|^{p-1} u = 0 with frequency omega > 0, restricted to
/// the mass-supercritical, energy-subcritical window 1+4/d < p < 1+4/(d-2).
struct NlsParameters {
    int dim = 1;
    double p = 7.0;
    double omega = 1.0;

    NlsParameters() = default;
    NlsParameters(int d, double p_, double omega_);
    void validate() const;
};

/// Complex scalar field sampled on a periodic grid. Values are row-major.
class ComplexField {
  public:
    ComplexField() = default;
    ComplexField(Grid grid, std::vector<Complex> samples);
    static ComplexField zeros(const Grid& grid);

    const Grid& grid() const { return grid_; }
    const std::vector<Complex>& samples() const { return samples_; }
    std::vector<Complex>& samples() { return samples_; }
    std::size_t size() const { return samples_.size(); }

    Complex& operator[](std::size_t i) { return samples_[i]; }
    const Complex& operator[](std::size_t i) const { return samples_[i]; }

    /// Largest |f| over the outermost grid layer divided by max |f|;
    /// 0 for the zero field.
    double boundary_decay_ratio() const;
    /// Fraction of mass within two cells of the box boundary.
    double boundary_mass_fraction() const;

    void check_finite() const;

  private:
    Grid grid_;
    std::vector<Complex> samples_;
};

// -- quadrature, norms and lattice operations ------------------------------

/// Spectral Dirichlet energy  sum_k |k|^2 |f_hat(k)|^2  (Parseval-normalized,
/// equals the integral of |grad f|^2 over the box).
double gradient_norm_sq(const ComplexField& f);

/// L^q norm by equal-weight quadrature, q >= 1.
double lp_norm(const ComplexField& f, double q);

/// Integral of |f|^q (the q-th power of lp_norm, computed directly).
double lp_norm_pow(const ComplexField& f, double q);

double mass(const ComplexField& f);  // == lp_norm(f,2)^2

/// Exact cyclic shift: output(x) = f(x - y), y on the lattice.
ComplexField translate(const ComplexField& f, const std::vector<double>& y);

/// Second moment integral of |f|^2 with the centered box coordinate.
double variance(const ComplexField& f);

/// Momentum integral Im int conj(f) grad f dx, one component per dimension.
std::vector<double> momentum(const ComplexField& f);

/// Pointwise linear combination a*f + b*g on a common grid.
ComplexField axpy(Complex a, const ComplexField& f, Complex b, const ComplexField& g);
ComplexField scaled(const ComplexField& f, Complex a);

double l2_distance(const ComplexField& f, const ComplexField& g);

// -- spectral transform access ---------------------------------------------

/// Forward DFT, unnormalized FFTW convention, FFT index order.
std::vector<Complex> fft_forward(const ComplexField& f);
/// Inverse DFT including the 1/N^d normalization.
ComplexField fft_inverse(const Grid& grid, std::vector<Complex> spectrum);

/// Applies a pointwise spectral multiplier m(k) given per-bin values.
ComplexField apply_spectral_multiplier(const ComplexField& f,
                                       const std::vector<Complex>& multiplier);

/// Per-bin |k|^2 table in FFT index order.
std::vector<double> laplacian_symbol(const Grid& grid);

// -- snapshot i/o ------------------------------------------------------------

/// Binary snapshot: magic "NLSF", u32 version, u32 d, u32 N, f64 L,
/// interleaved (re,im) f64 samples in row-major order, little endian.
void save_field(const ComplexField& f, const std::string& path);
ComplexField load_field(const std::string& path);

/// Throws NotDecayedAtBoundary unless boundary_decay_ratio < tol.
void require_decayed(const ComplexField& f, double tol = 1e-8);

}  // namespace nlsym

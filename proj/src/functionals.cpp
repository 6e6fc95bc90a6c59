#include "nlsym/functionals.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>

namespace nlsym {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Scaled-DFT evaluation (Bluestein): given one line of N samples, evaluates
// the trigonometric interpolant at the uniformly dilated points alpha * x_j.
// Exact for band-limited data; the padded length 2N avoids wrap collisions.
class DilatedLineEvaluator {
  public:
    DilatedLineEvaluator(int n, double alpha) : n_(n), padded_(2 * n) {
        const double q = 2.0 * M_PI * alpha / n;
        chirp_.resize(n_);
        for (int k = 0; k < n_; ++k) {
            const int kappa = k - n_ / 2;
            chirp_[k] = std::polar(1.0, 0.5 * q * kappa * kappa);
        }
        prefactor_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            const int s = j - n_ / 2;
            prefactor_[j] = std::polar(1.0, 0.5 * q * s * s);
        }
        // kernel v(t) = e^{-i q t^2 / 2} stored reversed on the padded circle
        std::vector<Complex> kernel(padded_, Complex(0, 0));
        for (int t = -(n_ - 1); t <= n_ - 1; ++t) {
            const Complex v = std::polar(1.0, -0.5 * q * double(t) * double(t));
            kernel[((-t) % padded_ + padded_) % padded_] = v;
        }
        buf_ = fftw_alloc_complex(padded_);
        line_ = fftw_alloc_complex(n_);
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fwd_pad_ = fftw_plan_dft_1d(padded_, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
            inv_pad_ = fftw_plan_dft_1d(padded_, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
            fwd_line_ = fftw_plan_dft_1d(n_, line_, line_, FFTW_FORWARD, FFTW_ESTIMATE);
        }
        std::memcpy(buf_, kernel.data(), padded_ * sizeof(Complex));
        fftw_execute(fwd_pad_);
        kernel_hat_.resize(padded_);
        std::memcpy(kernel_hat_.data(), buf_, padded_ * sizeof(Complex));
    }

    ~DilatedLineEvaluator() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_pad_);
        fftw_destroy_plan(inv_pad_);
        fftw_destroy_plan(fwd_line_);
        fftw_free(buf_);
        fftw_free(line_);
    }

    DilatedLineEvaluator(const DilatedLineEvaluator&) = delete;
    DilatedLineEvaluator& operator=(const DilatedLineEvaluator&) = delete;

    // in/out may alias; both hold n samples with unit stride.
    void evaluate(const Complex* in, Complex* out) {
        std::memcpy(line_, in, n_ * sizeof(Complex));
        fftw_execute(fwd_line_);
        // centered spectral coefficients times the half-turn phase e^{i pi kappa}
        std::vector<Complex> a(padded_, Complex(0, 0));
        const double inv_n = 1.0 / n_;
        for (int k = 0; k < n_; ++k) {
            const int kappa = k - n_ / 2;
            const int m = (kappa + n_) % n_;  // FFT bin of centered index kappa
            Complex c(line_[m][0], line_[m][1]);
            c *= inv_n;
            if (kappa & 1) c = -c;  // e^{i pi kappa}
            a[k] = c * chirp_[k];
        }
        std::memcpy(buf_, a.data(), padded_ * sizeof(Complex));
        fftw_execute(fwd_pad_);
        for (int i = 0; i < padded_; ++i) {
            Complex z(buf_[i][0], buf_[i][1]);
            z *= kernel_hat_[i];
            buf_[i][0] = z.real();
            buf_[i][1] = z.imag();
        }
        fftw_execute(inv_pad_);
        const double norm = 1.0 / padded_;
        for (int j = 0; j < n_; ++j) {
            Complex z(buf_[j][0], buf_[j][1]);
            out[j] = prefactor_[j] * z * norm;
        }
    }

  private:
    int n_;
    int padded_;
    std::vector<Complex> chirp_, prefactor_, kernel_hat_;
    fftw_complex* buf_ = nullptr;
    fftw_complex* line_ = nullptr;
    fftw_plan fwd_pad_ = nullptr, inv_pad_ = nullptr, fwd_line_ = nullptr;
};

// Applies the dilation x -> alpha x separably along every axis.
std::vector<Complex> dilate_samples(const Grid& grid, const std::vector<Complex>& in,
                                    double alpha) {
    std::vector<Complex> data = in;
    const int n = grid.n;
    DilatedLineEvaluator eval(n, alpha);
    std::vector<Complex> line(n), result(n);
    for (int axis = 0; axis < grid.dim; ++axis) {
        // stride of the axis in the row-major layout
        std::size_t stride = 1;
        for (int a = grid.dim - 1; a > axis; --a) stride *= n;
        const std::size_t lines = data.size() / n;
        for (std::size_t l = 0; l < lines; ++l) {
            // base offset of the l-th line orthogonal to `axis`
            const std::size_t block = l / stride;
            const std::size_t within = l % stride;
            const std::size_t base = block * stride * n + within;
            for (int j = 0; j < n; ++j) line[j] = data[base + j * stride];
            eval.evaluate(line.data(), result.data());
            for (int j = 0; j < n; ++j) data[base + j * stride] = result[j];
        }
    }
    return data;
}

}  // namespace

// ---------------------------------------------------------------------------

double delta_gap_constant(const NlsParameters& params) {
    const double d = params.dim;
    const double p = params.p;
    return 2.0 * (p - 1.0 - 4.0 / d) / (d * (p - 1.0 + 4.0 / d));
}

FunctionalReport evaluate(const ComplexField& f, const NlsParameters& params) {
    if (f.grid().dim != params.dim)
        throw DimensionMismatch("field dimension does not match parameters");
    FunctionalReport r;
    r.gradient_sq = gradient_norm_sq(f);
    r.mass = lp_norm_pow(f, 2.0);
    r.potential = lp_norm_pow(f, params.p + 1.0);
    r.momentum = momentum(f);
    const double p = params.p;
    r.energy = 0.5 * r.gradient_sq - r.potential / (p + 1.0);
    r.action = r.energy + 0.5 * params.omega * r.mass;
    r.virial = (2.0 / params.dim) * r.gradient_sq - (p - 1.0) / (p + 1.0) * r.potential;
    r.positive_part = r.action - 0.25 * params.dim * r.virial;
    return r;
}

std::string FunctionalReport::csv_header(int dim) {
    std::string h = "t,M,E";
    const char* names[3] = {"Px", "Py", "Pz"};
    for (int a = 0; a < dim; ++a) h += std::string(",") + names[a];
    return h + ",S_omega,K,J_omega";
}

std::string FunctionalReport::csv_row(double t) const {
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::string row = num(t) + "," + num(mass) + "," + num(energy);
    for (double p : momentum) row += "," + num(p);
    row += "," + num(action) + "," + num(virial) + "," + num(positive_part);
    return row;
}

ComplexField scale(const ComplexField& f, double lambda, const NlsParameters& params,
                   double boundary_tol) {
    if (lambda == 0.0) return f;
    const double alpha = std::exp(2.0 * lambda / params.dim);
    const double amplitude = std::exp(lambda);
    std::vector<Complex> out = dilate_samples(f.grid(), f.samples(), alpha);
    for (Complex& z : out) z *= amplitude;
    ComplexField result(f.grid(), std::move(out));
    if (result.boundary_decay_ratio() >= boundary_tol)
        throw UnresolvedAfterScaling("scaled field is not decayed in the box (lambda = " +
                                     std::to_string(lambda) + ")");
    return result;
}

double nehari_exponent(const ComplexField& f, const NlsParameters& params) {
    const double m = lp_norm_pow(f, 2.0);
    if (!(m > 0)) throw ZeroField("cannot rescale the zero field");
    const double grad = gradient_norm_sq(f);
    const double pot = lp_norm_pow(f, params.p + 1.0);
    if (!(pot > 0)) throw ZeroPotentialTerm("potential term vanishes");
    if (!(grad > 0)) throw ZeroField("field has no gradient content");
    const double p = params.p;
    const double d = params.dim;
    const double ratio = (2.0 / d) * grad / ((p - 1.0) / (p + 1.0) * pot);
    return std::log(ratio) / (p - 1.0 - 4.0 / d);
}

NehariRescale rescale_to_nehari(const ComplexField& f, const NlsParameters& params) {
    const double lambda0 = nehari_exponent(f, params);
    NehariRescale out;
    out.lambda0 = lambda0;
    out.field = scale(f, lambda0, params);
    return out;
}

std::vector<double> snap_to_frequency_lattice(const Grid& grid, const std::vector<double>& xi) {
    const double unit = 2.0 * M_PI / grid.length;
    std::vector<double> snapped(xi.size());
    for (std::size_t a = 0; a < xi.size(); ++a) snapped[a] = unit * std::round(xi[a] / unit);
    return snapped;
}

ComplexField galilean_boost(const ComplexField& f, const std::vector<double>& xi0) {
    const Grid& g = f.grid();
    if (static_cast<int>(xi0.size()) != g.dim)
        throw DimensionMismatch("boost frequency dimension mismatch");
    const double unit = 2.0 * M_PI / g.length;
    for (double x : xi0)
        if (std::abs(x / unit - std::round(x / unit)) > 1e-9)
            throw OffLatticeFrequency("boost frequency is not a multiple of 2pi/L");
    std::vector<Complex> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto idx = g.unflatten(i);
        double phase = 0;
        for (int a = 0; a < g.dim; ++a) phase += xi0[a] * g.coord(idx[a]);
        out[i] = std::polar(1.0, phase) * f[i];
    }
    return ComplexField(g, std::move(out));
}

ComplexField galilean_boost_to_rest(const ComplexField& f, const NlsParameters& params) {
    (void)params;
    const double m = mass(f);
    if (!(m > 0)) throw ZeroMass("rest-frame boost of a zero-mass field");
    std::vector<double> p = momentum(f);
    std::vector<double> xi(p.size());
    for (std::size_t a = 0; a < p.size(); ++a) xi[a] = -p[a] / m;
    return galilean_boost(f, snap_to_frequency_lattice(f.grid(), xi));
}

}  // namespace nlsym

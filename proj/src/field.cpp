#include "nlsym/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

namespace nlsym {

// ---------------------------------------------------------------------------
// FFT engine. Plan creation is serialized (FFTW requirement); execution runs
// on per-thread scratch buffers so concurrent evolutions do not contend.
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    fftw_complex* buf = nullptr;
    std::size_t size = 0;

    ~PlanPair() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
        if (buf) fftw_free(buf);
    }
};

PlanPair& plans_for(const Grid& grid) {
    thread_local std::map<std::pair<int, int>, PlanPair> cache;
    auto key = std::make_pair(grid.dim, grid.n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    PlanPair pp;
    pp.size = grid.size();
    pp.buf = fftw_alloc_complex(pp.size);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        int dims[3] = {grid.n, grid.n, grid.n};
        pp.forward = fftw_plan_dft(grid.dim, dims, pp.buf, pp.buf, FFTW_FORWARD, FFTW_ESTIMATE);
        pp.inverse = fftw_plan_dft(grid.dim, dims, pp.buf, pp.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    auto [pos, _] = cache.emplace(key, std::move(pp));
    return pos->second;
}

}  // namespace

// ---------------------------------------------------------------------------

NlsParameters::NlsParameters(int d, double p_, double omega_) : dim(d), p(p_), omega(omega_) {
    validate();
}

void NlsParameters::validate() const {
    if (dim < 1 || dim > 3) throw InvalidParameters("dimension must be 1, 2 or 3");
    if (!(omega > 0) || !std::isfinite(omega)) throw InvalidParameters("omega must be positive");
    if (!(p > 1.0 + 4.0 / dim))
        throw InvalidParameters("p must exceed 1 + 4/d (mass-supercritical)");
    if (dim >= 3 && !(p < 1.0 + 4.0 / (dim - 2)))
        throw InvalidParameters("p must stay below 1 + 4/(d-2) (energy-subcritical)");
}

ComplexField::ComplexField(Grid grid, std::vector<Complex> samples)
    : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.size())
        throw DimensionMismatch("sample count does not match grid size");
    check_finite();
}

ComplexField ComplexField::zeros(const Grid& grid) {
    return ComplexField(grid, std::vector<Complex>(grid.size(), Complex(0, 0)));
}

void ComplexField::check_finite() const {
    for (const Complex& z : samples_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NonFinite("field contains non-finite samples");
}

double ComplexField::boundary_decay_ratio() const {
    double peak = 0, edge = 0;
    const int n = grid_.n;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const double a = std::abs(samples_[i]);
        peak = std::max(peak, a);
        auto idx = grid_.unflatten(i);
        for (int ax = 0; ax < grid_.dim; ++ax)
            if (idx[ax] == 0 || idx[ax] == n - 1) {
                edge = std::max(edge, a);
                break;
            }
    }
    return peak > 0 ? edge / peak : 0.0;
}

double ComplexField::boundary_mass_fraction() const {
    double total = 0, shell = 0;
    const int n = grid_.n;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const double a2 = std::norm(samples_[i]);
        total += a2;
        auto idx = grid_.unflatten(i);
        for (int ax = 0; ax < grid_.dim; ++ax)
            if (idx[ax] < 2 || idx[ax] >= n - 2) {
                shell += a2;
                break;
            }
    }
    return total > 0 ? shell / total : 0.0;
}

void require_decayed(const ComplexField& f, double tol) {
    const double r = f.boundary_decay_ratio();
    if (r >= tol)
        throw NotDecayedAtBoundary("boundary decay ratio " + std::to_string(r) +
                                   " exceeds " + std::to_string(tol));
}

// -- transforms ---------------------------------------------------------------

std::vector<Complex> fft_forward(const ComplexField& f) {
    PlanPair& pp = plans_for(f.grid());
    std::memcpy(pp.buf, f.samples().data(), pp.size * sizeof(Complex));
    fftw_execute(pp.forward);
    std::vector<Complex> out(pp.size);
    std::memcpy(out.data(), pp.buf, pp.size * sizeof(Complex));
    return out;
}

ComplexField fft_inverse(const Grid& grid, std::vector<Complex> spectrum) {
    if (spectrum.size() != grid.size())
        throw DimensionMismatch("spectrum size does not match grid");
    PlanPair& pp = plans_for(grid);
    std::memcpy(pp.buf, spectrum.data(), pp.size * sizeof(Complex));
    fftw_execute(pp.inverse);
    const double norm = 1.0 / static_cast<double>(grid.size());
    for (std::size_t i = 0; i < pp.size; ++i) {
        spectrum[i] = Complex(pp.buf[i][0] * norm, pp.buf[i][1] * norm);
    }
    return ComplexField(grid, std::move(spectrum));
}

ComplexField apply_spectral_multiplier(const ComplexField& f,
                                       const std::vector<Complex>& multiplier) {
    std::vector<Complex> spec = fft_forward(f);
    if (multiplier.size() != spec.size())
        throw DimensionMismatch("multiplier size does not match spectrum");
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= multiplier[i];
    return fft_inverse(f.grid(), std::move(spec));
}

std::vector<double> laplacian_symbol(const Grid& grid) {
    std::vector<double> sym(grid.size());
    for (std::size_t i = 0; i < sym.size(); ++i) {
        auto idx = grid.unflatten(i);
        double k2 = 0;
        for (int a = 0; a < grid.dim; ++a) {
            const double k = grid.freq(idx[a]);
            k2 += k * k;
        }
        sym[i] = k2;
    }
    return sym;
}

// -- norms and integrals ------------------------------------------------------

double gradient_norm_sq(const ComplexField& f) {
    const Grid& g = f.grid();
    std::vector<Complex> spec = fft_forward(f);
    const double parseval = g.cell_volume() / static_cast<double>(g.size());
    double acc = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto idx = g.unflatten(i);
        double k2 = 0;
        for (int a = 0; a < g.dim; ++a) {
            const double k = g.freq(idx[a]);
            k2 += k * k;
        }
        acc += k2 * std::norm(spec[i]);
    }
    return acc * parseval;
}

double lp_norm_pow(const ComplexField& f, double q) {
    if (q < 1.0) throw InvalidParameters("lp_norm requires q >= 1");
    double acc = 0;
    if (q == 2.0) {
        for (const Complex& z : f.samples()) acc += std::norm(z);
    } else {
        for (const Complex& z : f.samples()) acc += std::pow(std::abs(z), q);
    }
    return acc * f.grid().cell_volume();
}

double lp_norm(const ComplexField& f, double q) {
    return std::pow(lp_norm_pow(f, q), 1.0 / q);
}

double mass(const ComplexField& f) { return lp_norm_pow(f, 2.0); }

ComplexField translate(const ComplexField& f, const std::vector<double>& y) {
    const Grid& g = f.grid();
    if (static_cast<int>(y.size()) != g.dim)
        throw DimensionMismatch("translation vector dimension mismatch");
    const double h = g.spacing();
    std::array<int, 3> shift{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        const double steps = y[a] / h;
        const double rounded = std::round(steps);
        if (std::abs(steps - rounded) > 1e-9)
            throw OffLatticeTranslation("translation is not a lattice vector");
        shift[a] = static_cast<int>(rounded) % g.n;
        if (shift[a] < 0) shift[a] += g.n;
    }
    std::vector<Complex> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto idx = g.unflatten(i);
        std::array<int, 3> src{0, 0, 0};
        for (int a = 0; a < g.dim; ++a) src[a] = (idx[a] - shift[a] + g.n) % g.n;
        out[i] = f[g.flatten(src)];
    }
    return ComplexField(g, std::move(out));
}

double variance(const ComplexField& f) {
    const Grid& g = f.grid();
    double acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto idx = g.unflatten(i);
        double x2 = 0;
        for (int a = 0; a < g.dim; ++a) {
            const double x = g.coord(idx[a]);
            x2 += x * x;
        }
        acc += x2 * std::norm(f[i]);
    }
    return acc * g.cell_volume();
}

std::vector<double> momentum(const ComplexField& f) {
    const Grid& g = f.grid();
    std::vector<Complex> spec = fft_forward(f);
    const double parseval = g.cell_volume() / static_cast<double>(g.size());
    std::vector<double> p(g.dim, 0.0);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double a2 = std::norm(spec[i]);
        if (a2 == 0) continue;
        auto idx = g.unflatten(i);
        for (int a = 0; a < g.dim; ++a) {
            if (idx[a] == g.n / 2) continue;  // Nyquist bin carries no signed frequency
            p[a] += g.freq(idx[a]) * a2;
        }
    }
    for (double& v : p) v *= parseval;
    return p;
}

ComplexField axpy(Complex a, const ComplexField& f, Complex b, const ComplexField& g) {
    if (!(f.grid() == g.grid())) throw DimensionMismatch("axpy on mismatched grids");
    std::vector<Complex> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * f[i] + b * g[i];
    return ComplexField(f.grid(), std::move(out));
}

ComplexField scaled(const ComplexField& f, Complex a) {
    std::vector<Complex> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * f[i];
    return ComplexField(f.grid(), std::move(out));
}

double l2_distance(const ComplexField& f, const ComplexField& g) {
    if (!(f.grid() == g.grid())) throw DimensionMismatch("distance on mismatched grids");
    double acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += std::norm(f[i] - g[i]);
    return std::sqrt(acc * f.grid().cell_volume());
}

// -- snapshot i/o --------------------------------------------------------------

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace

void save_field(const ComplexField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os.write("NLSF", 4);
    put_u32(os, kSnapshotVersion);
    put_u32(os, static_cast<std::uint32_t>(f.grid().dim));
    put_u32(os, static_cast<std::uint32_t>(f.grid().n));
    put_f64(os, f.grid().length);
    for (const Complex& z : f.samples()) {
        put_f64(os, z.real());
        put_f64(os, z.imag());
    }
    if (!os) throw IoError("write failed: " + path);
}

ComplexField load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "NLSF", 4) != 0)
        throw IoError("bad snapshot magic in " + path);
    const std::uint32_t version = get_u32(is);
    if (version != kSnapshotVersion) throw IoError("unsupported snapshot version");
    const int d = static_cast<int>(get_u32(is));
    const int n = static_cast<int>(get_u32(is));
    const double L = get_f64(is);
    Grid grid(d, n, L);
    std::vector<Complex> samples(grid.size());
    for (Complex& z : samples) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        z = Complex(re, im);
    }
    if (!is) throw IoError("truncated snapshot: " + path);
    return ComplexField(grid, std::move(samples));
}

}  // namespace nlsym

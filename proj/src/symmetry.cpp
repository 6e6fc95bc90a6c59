#include "nlsym/symmetry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nlsym {

namespace {

constexpr double kTol = 1e-12;
constexpr double kTwoPi = 2.0 * M_PI;

double normalize_phase(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0) t += kTwoPi;
    if (t > kTwoPi - kTol) t = 0.0;  // wrap values that round to a full turn
    return t;
}

bool phase_equal(double a, double b, double tol) {
    const double d = std::abs(normalize_phase(a) - normalize_phase(b));
    return d < tol || std::abs(d - kTwoPi) < tol;
}

}  // namespace

GroupElement::GroupElement(double theta, int d, const std::vector<double>& mat) : dim(d) {
    if (d < 1 || d > 3) throw DimensionMismatch("group element dimension must be 1, 2 or 3");
    if (static_cast<int>(mat.size()) != d * d)
        throw DimensionMismatch("matrix entry count does not match dimension");
    phase = normalize_phase(theta);
    matrix.fill(0.0);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) at(r, c) = mat[r * d + c];
    // orthogonality: R^T R = I within 1e-12 per entry
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            double dot = 0;
            for (int k = 0; k < d; ++k) dot += at(k, r) * at(k, c);
            const double expect = (r == c) ? 1.0 : 0.0;
            if (std::abs(dot - expect) > kTol)
                throw NotOrthogonal("matrix is not orthogonal within 1e-12");
        }
}

GroupElement GroupElement::identity(int d) {
    std::vector<double> mat(d * d, 0.0);
    for (int i = 0; i < d; ++i) mat[i * d + i] = 1.0;
    return GroupElement(0.0, d, mat);
}

bool GroupElement::matrix_equals(const GroupElement& o, double tol) const {
    if (dim != o.dim) return false;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            if (std::abs(at(r, c) - o.at(r, c)) > tol) return false;
    return true;
}

bool GroupElement::equals(const GroupElement& o, double tol) const {
    return matrix_equals(o, tol) && phase_equal(phase, o.phase, tol);
}

bool GroupElement::is_signed_permutation(double tol) const {
    for (int r = 0; r < dim; ++r) {
        int nonzero = 0;
        for (int c = 0; c < dim; ++c) {
            const double v = at(r, c);
            if (std::abs(v) <= tol) continue;
            if (std::abs(std::abs(v) - 1.0) > tol) return false;
            ++nonzero;
        }
        if (nonzero != 1) return false;
    }
    // orthogonality already guarantees one nonzero per column
    return true;
}

GroupElement GroupElement::inverse() const {
    std::vector<double> mat(dim * dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) mat[r * dim + c] = at(c, r);  // transpose
    return GroupElement(-phase, dim, mat);
}

std::vector<double> GroupElement::act(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim) throw DimensionMismatch("vector dimension mismatch");
    std::vector<double> y(dim, 0.0);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) y[r] += at(r, c) * x[c];
    return y;
}

std::string GroupElement::describe() const {
    char buf[64];
    std::string s = "(";
    std::snprintf(buf, sizeof(buf), "%.6gpi|", phase / M_PI);
    s += buf;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            std::snprintf(buf, sizeof(buf), "%.6g%s", at(r, c),
                          (r == dim - 1 && c == dim - 1) ? "" : " ");
            s += buf;
        }
    return s + ")";
}

GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
    if (g1.dim != g2.dim) throw DimensionMismatch("composing elements of different dimensions");
    const int d = g1.dim;
    std::vector<double> mat(d * d, 0.0);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            double acc = 0;
            for (int k = 0; k < d; ++k) acc += g1.at(r, k) * g2.at(k, c);
            mat[r * d + c] = acc;
        }
    return GroupElement(g1.phase + g2.phase, d, mat);
}

// ---------------------------------------------------------------------------

bool SymmetryGroup::contains(const GroupElement& g, double tol) const {
    return std::any_of(elements.begin(), elements.end(),
                       [&](const GroupElement& e) { return e.equals(g, tol); });
}

SymmetryGroup SymmetryGroup::trivial(int d) {
    SymmetryGroup g;
    g.dim = d;
    g.elements = {GroupElement::identity(d)};
    return g;
}

std::string SymmetryGroup::id() const {
    std::vector<std::string> parts;
    parts.reserve(elements.size());
    for (const GroupElement& e : elements) {
        char buf[160];
        std::string s;
        // snap to 9 decimals so equal groups built along different paths agree
        std::snprintf(buf, sizeof(buf), "%.9f|", e.phase / M_PI);
        s += buf;
        for (int r = 0; r < e.dim; ++r)
            for (int c = 0; c < e.dim; ++c) {
                double v = e.at(r, c);
                if (std::abs(v) < 5e-10) v = 0.0;  // avoid "-0"
                std::snprintf(buf, sizeof(buf), "%.9f,", v);
                s += buf;
            }
        parts.push_back(s);
    }
    std::sort(parts.begin(), parts.end());
    std::string out = "d" + std::to_string(dim) + ":";
    for (const std::string& p : parts) out += p + ";";
    return out;
}

SymmetryGroup verify_group(const std::vector<GroupElement>& elements, int d) {
    if (elements.empty()) throw MissingIdentity("element set is empty");
    SymmetryGroup g;
    g.dim = d;
    for (const GroupElement& e : elements) {
        if (e.dim != d) throw DimensionMismatch("element dimension mismatch");
        bool duplicate = false;
        for (const GroupElement& have : g.elements) {
            if (have.matrix_equals(e)) {
                if (!phase_equal(have.phase, e.phase, kTol))
                    throw AssumptionAViolated("same matrix with two distinct phases");
                duplicate = true;
                break;
            }
        }
        if (!duplicate) g.elements.push_back(e);
    }
    if (!g.contains(GroupElement::identity(d)))
        throw MissingIdentity("identity element is missing");
    for (const GroupElement& a : g.elements) {
        if (!g.contains(a.inverse()))
            throw NotClosed("inverse of " + a.describe() + " is missing");
        for (const GroupElement& b : g.elements) {
            const GroupElement ab = compose(a, b);
            bool found = false;
            for (const GroupElement& have : g.elements) {
                if (have.matrix_equals(ab)) {
                    if (!phase_equal(have.phase, ab.phase, kTol))
                        throw NotClosed("composition " + a.describe() + "*" + b.describe() +
                                        " conflicts with a listed phase");
                    found = true;
                    break;
                }
            }
            if (!found)
                throw NotClosed("composition " + a.describe() + "*" + b.describe() +
                                " leaves the set");
        }
    }
    return g;
}

SubgroupRelation subgroup_relation(const SymmetryGroup& parent, const SymmetryGroup& child) {
    if (parent.dim != child.dim) throw NotASubgroup("dimension mismatch");
    for (const GroupElement& e : child.elements)
        if (!parent.contains(e)) throw NotASubgroup("child element " + e.describe() +
                                                    " is not in the parent");
    if (parent.order() % child.order() != 0)
        throw NotASubgroup("child order does not divide parent order");
    SubgroupRelation rel;
    rel.parent = parent;
    rel.child = child;
    std::vector<bool> covered(parent.order(), false);
    for (std::size_t i = 0; i < parent.order(); ++i) {
        if (covered[i]) continue;
        const GroupElement& rep = parent.elements[i];
        rel.cosets.push_back(rep);
        for (const GroupElement& c : child.elements) {
            const GroupElement e = compose(rep, c);
            for (std::size_t j = 0; j < parent.order(); ++j)
                if (parent.elements[j].equals(e)) covered[j] = true;
        }
    }
    if (rel.cosets.size() * child.order() != parent.order())
        throw NotASubgroup("cosets do not partition the parent");
    return rel;
}

// -- field actions ------------------------------------------------------------

ComplexField apply(const GroupElement& g, const ComplexField& f) {
    const Grid& grid = f.grid();
    if (g.dim != grid.dim) throw DimensionMismatch("group element / field dimension mismatch");
    if (!g.is_signed_permutation())
        throw NonGridCompatibleMatrix("matrix does not act on the lattice: " + g.describe());

    // column structure of R: one nonzero sign per column
    std::array<int, 3> src_axis{0, 1, 2};
    std::array<int, 3> sign{1, 1, 1};
    for (int c = 0; c < g.dim; ++c)
        for (int r = 0; r < g.dim; ++r)
            if (std::abs(g.at(r, c)) > 0.5) {
                src_axis[c] = r;
                sign[c] = g.at(r, c) > 0 ? 1 : -1;
            }

    const Complex scalar = std::polar(1.0, -g.phase);
    const int n = grid.n;
    std::vector<Complex> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto idx = grid.unflatten(i);
        // y = R^{-1} x = R^T x: component b reads from axis src_axis[b] with its sign
        std::array<int, 3> src{0, 0, 0};
        for (int b = 0; b < grid.dim; ++b) {
            const int j = idx[src_axis[b]];
            src[b] = (sign[b] > 0) ? j : (n - j) % n;
        }
        out[i] = scalar * f[grid.flatten(src)];
    }
    return ComplexField(grid, std::move(out));
}

ComplexField symmetrize(const ComplexField& f, const SymmetryGroup& group) {
    if (group.is_trivial()) return f;
    ComplexField acc = ComplexField::zeros(f.grid());
    for (const GroupElement& g : group.elements) {
        const ComplexField gf = apply(g, f);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += gf[i];
    }
    const double w = 1.0 / static_cast<double>(group.order());
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= w;
    return acc;
}

double symmetrization_residual(const ComplexField& f, const SymmetryGroup& group) {
    const double nf = lp_norm(f, 2.0);
    if (nf == 0) return 0.0;
    return l2_distance(f, symmetrize(f, group)) / nf;
}

// -- fixed subspaces and condition (*) ----------------------------------------

std::vector<std::vector<double>> fixed_subspace(const std::vector<GroupElement>& elements) {
    if (elements.empty()) return {};
    const int d = elements.front().dim;
    Eigen::MatrixXd stacked(static_cast<int>(elements.size()) * d, d);
    for (std::size_t e = 0; e < elements.size(); ++e) {
        if (elements[e].dim != d) throw DimensionMismatch("mixed dimensions in fixed_subspace");
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                stacked(static_cast<int>(e) * d + r, c) =
                    elements[e].at(r, c) - (r == c ? 1.0 : 0.0);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-10) ++rank;
    std::vector<std::vector<double>> basis;
    for (int c = rank; c < d; ++c) {
        std::vector<double> v(d);
        for (int r = 0; r < d; ++r) v[r] = svd.matrixV()(r, c);
        basis.push_back(v);
    }
    return basis;
}

std::size_t fixed_subspace_dim(const std::vector<GroupElement>& elements) {
    if (elements.empty()) return 0;
    return fixed_subspace(elements).size();
}

bool satisfies_star(const SymmetryGroup& group, const SymmetryGroup& sub) {
    subgroup_relation(group, sub);  // validates, throws NotASubgroup
    const std::size_t fix_dim = fixed_subspace_dim(sub.elements);
    for (const GroupElement& g : group.elements) {
        if (sub.contains(g)) continue;
        std::vector<GroupElement> extended = sub.elements;
        extended.push_back(g);
        if (fixed_subspace_dim(extended) >= fix_dim) return false;
    }
    return true;
}

std::vector<SymmetryGroup> proper_subgroups(const SymmetryGroup& group) {
    const std::size_t m = group.order();
    if (m > 16) throw GroupTooLarge("subgroup enumeration is limited to order 16");

    // Cayley table over element indices
    std::vector<std::vector<int>> table(m, std::vector<int>(m, -1));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const GroupElement e = compose(group.elements[i], group.elements[j]);
            for (std::size_t k = 0; k < m; ++k)
                if (group.elements[k].equals(e)) table[i][j] = static_cast<int>(k);
        }
    int id_index = -1;
    const GroupElement id = GroupElement::identity(group.dim);
    for (std::size_t k = 0; k < m; ++k)
        if (group.elements[k].equals(id)) id_index = static_cast<int>(k);

    std::vector<int> rest;
    for (std::size_t k = 0; k < m; ++k)
        if (static_cast<int>(k) != id_index) rest.push_back(static_cast<int>(k));

    std::vector<SymmetryGroup> subs;
    const std::size_t limit = std::size_t{1} << rest.size();
    for (std::size_t bits = 0; bits < limit; ++bits) {
        if (bits + 1 == limit) continue;  // the whole group is not a proper subgroup
        std::vector<bool> in(m, false);
        in[id_index] = true;
        for (std::size_t b = 0; b < rest.size(); ++b)
            if (bits & (std::size_t{1} << b)) in[rest[b]] = true;
        bool closed = true;
        for (std::size_t i = 0; i < m && closed; ++i) {
            if (!in[i]) continue;
            for (std::size_t j = 0; j < m && closed; ++j)
                if (in[j] && !in[table[i][j]]) closed = false;
        }
        if (!closed) continue;
        SymmetryGroup s;
        s.dim = group.dim;
        for (std::size_t k = 0; k < m; ++k)
            if (in[k]) s.elements.push_back(group.elements[k]);
        subs.push_back(std::move(s));
    }
    std::sort(subs.begin(), subs.end(), [](const SymmetryGroup& a, const SymmetryGroup& b) {
        if (a.order() != b.order()) return a.order() < b.order();
        return a.id() < b.id();
    });
    return subs;
}

ComplexField symmetrized_translate(const ComplexField& f, const std::vector<double>& x0,
                                   const SymmetryGroup& group) {
    return symmetrize(translate(f, x0), group);
}

// -- group files ----------------------------------------------------------------

SymmetryGroup parse_group_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<GroupElement> elements;
    int dim = 0;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::vector<double> values;
        double v;
        while (ls >> v) values.push_back(v);
        if (values.empty()) continue;
        const int d = static_cast<int>(std::lround(std::sqrt(double(values.size() - 1))));
        if (static_cast<std::size_t>(d) * d + 1 != values.size() || d < 1 || d > 3)
            throw IoError("group file line does not contain phase + d*d matrix entries");
        if (dim == 0) dim = d;
        if (d != dim) throw IoError("group file mixes dimensions");
        elements.emplace_back(values[0] * M_PI, d,
                              std::vector<double>(values.begin() + 1, values.end()));
    }
    if (elements.empty()) throw IoError("group file has no elements");
    return verify_group(elements, dim);
}

SymmetryGroup load_group(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open group file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_group_text(ss.str());
}

void save_group(const SymmetryGroup& group, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << "# phase_over_pi  matrix entries row-major (d=" << group.dim << ")\n";
    for (const GroupElement& e : group.elements) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", e.phase / M_PI);
        os << buf;
        for (int r = 0; r < e.dim; ++r)
            for (int c = 0; c < e.dim; ++c) {
                std::snprintf(buf, sizeof(buf), " %.12g", e.at(r, c));
                os << buf;
            }
        os << "\n";
    }
}

// -- built-ins --------------------------------------------------------------------

SymmetryGroup group_odd_1d() {
    return verify_group({GroupElement::identity(1), GroupElement(M_PI, 1, {-1.0})}, 1);
}

SymmetryGroup group_even_1d() {
    return verify_group({GroupElement::identity(1), GroupElement(0.0, 1, {-1.0})}, 1);
}

SymmetryGroup group_quarter_turn_2d() {
    return verify_group({GroupElement::identity(2),
                         GroupElement(M_PI, 2, {0, -1, 1, 0}),
                         GroupElement(M_PI, 2, {0, 1, -1, 0}),
                         GroupElement(0.0, 2, {-1, 0, 0, -1})},
                        2);
}

SymmetryGroup group_mirror_phase_2d() {
    return verify_group({GroupElement::identity(2), GroupElement(M_PI, 2, {-1, 0, 0, 1})}, 2);
}

}  // namespace nlsym

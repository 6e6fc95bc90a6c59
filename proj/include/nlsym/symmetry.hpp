#pragma once

#include <array>
#include <string>
#include <vector>

#include "nlsym/field.hpp"

namespace nlsym {

/// Element (theta, R) of R/2piZ x O(d): a phase rotation paired with an
/// orthogonal matrix. Acts on fields by (g f)(x) = e^{-i theta} f(R^{-1} x).
struct GroupElement {
    double phase = 0.0;                  // radians, normalized to [0, 2pi)
    int dim = 1;
    std::array<double, 9> matrix{};      // row-major d x d block

    GroupElement() { matrix[0] = 1.0; }
    GroupElement(double theta, int d, const std::vector<double>& mat);

    static GroupElement identity(int d);

    double at(int r, int c) const { return matrix[r * 3 + c]; }
    double& at(int r, int c) { return matrix[r * 3 + c]; }

    bool matrix_equals(const GroupElement& o, double tol = 1e-12) const;
    bool equals(const GroupElement& o, double tol = 1e-12) const;

    bool is_signed_permutation(double tol = 1e-12) const;
    GroupElement inverse() const;

    /// Applies the matrix to a spatial vector.
    std::vector<double> act(const std::vector<double>& x) const;

    std::string describe() const;
};

GroupElement compose(const GroupElement& g1, const GroupElement& g2);

/// Finite subgroup of R/2piZ x O(d): contains the identity, closed under
/// composition and inverse, and no two elements share a matrix with
/// different phases.
struct SymmetryGroup {
    int dim = 1;
    std::vector<GroupElement> elements;

    std::size_t order() const { return elements.size(); }
    bool contains(const GroupElement& g, double tol = 1e-12) const;
    bool is_trivial() const { return elements.size() == 1; }

    /// Canonical id string (sorted element fingerprints); used as ledger key.
    std::string id() const;

    static SymmetryGroup trivial(int d);
};

/// Validates a set of elements as a SymmetryGroup. Throws NotClosed,
/// AssumptionAViolated or MissingIdentity.
SymmetryGroup verify_group(const std::vector<GroupElement>& elements, int d);

/// Checks child <= parent elementwise and returns coset representatives
/// partitioning the parent. Throws NotASubgroup.
struct SubgroupRelation {
    SymmetryGroup parent;
    SymmetryGroup child;
    std::vector<GroupElement> cosets;
};
SubgroupRelation subgroup_relation(const SymmetryGroup& parent, const SymmetryGroup& child);

/// Group action on a sampled field, exact for signed-permutation matrices:
/// an index permutation times a unit scalar. Throws NonGridCompatibleMatrix.
ComplexField apply(const GroupElement& g, const ComplexField& f);

/// Group average (1/#G) sum_g apply(g, f); idempotent projector onto the
/// G-invariant subspace.
ComplexField symmetrize(const ComplexField& f, const SymmetryGroup& group);

/// Relative L2 distance of f from its symmetrization.
double symmetrization_residual(const ComplexField& f, const SymmetryGroup& group);

/// Orthonormal basis (columns) of {x : Rx = x for every element matrix}.
/// Rank decisions at absolute tolerance 1e-10.
std::vector<std::vector<double>> fixed_subspace(const std::vector<GroupElement>& elements);

std::size_t fixed_subspace_dim(const std::vector<GroupElement>& elements);

/// Decides whether the proper subgroup `sub` of `group` admits lattice rays
/// that stay fixed under `sub` while escaping every other element: true iff
/// every g outside `sub` strictly cuts the fixed subspace dimension.
bool satisfies_star(const SymmetryGroup& group, const SymmetryGroup& sub);

/// All strict subgroups (identity included, group itself excluded),
/// enumerated exhaustively. Throws GroupTooLarge for order > 16.
std::vector<SymmetryGroup> proper_subgroups(const SymmetryGroup& group);

/// (1/#G) sum_g apply(g, translate(f, x0)); the generator of G-invariant
/// multi-bump data. x0 must lie on the lattice.
ComplexField symmetrized_translate(const ComplexField& f, const std::vector<double>& x0,
                                   const SymmetryGroup& group);

// -- group definition files ---------------------------------------------------
// One element per line: phase in units of pi followed by the d*d matrix
// entries row-major. '#' starts a comment.
SymmetryGroup load_group(const std::string& path);
void save_group(const SymmetryGroup& group, const std::string& path);
SymmetryGroup parse_group_text(const std::string& text);

// Built-in groups used across experiments and tests.
SymmetryGroup group_odd_1d();    // { (0,1), (pi,-1) }
SymmetryGroup group_even_1d();   // { (0,1), (0,-1) }
SymmetryGroup group_quarter_turn_2d();  // order 4: phase-pi quarter turns plus -I
SymmetryGroup group_mirror_phase_2d();  // { (0,I), (pi, diag(-1,1)) }

}  // namespace nlsym

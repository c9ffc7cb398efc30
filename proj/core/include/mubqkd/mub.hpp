#pragma once

#include <string>
#include <vector>

#include "mubqkd/galois.hpp"
#include "mubqkd/matrix.hpp"

namespace mubqkd {

enum class Construction { WoottersFields, Durt };

/// (d+1) mutually unbiased bases over GF(p^N): d phase bases (index 0..d-1)
/// plus the computational basis stored as the identity at index d.
/// Basis states are columns: entry (m, n) is the amplitude of computational
/// state m in phase state n.
struct MubFamily {
    FieldCtx ctx;
    Construction construction;
    std::vector<CMatrix> bases;  // size d+1, bases[d] == identity

    int d() const { return ctx.order(); }
};

struct MubReport {
    bool ok = false;
    double worst_unbiased_deviation = 0.0;  // max | |<psi|phi>|^2 - 1/d |
    double worst_unitarity_deviation = 0.0;
    int worst_pair_r = -1;
    int worst_pair_s = -1;
};

// r-th phase basis in the quadratic-form construction: the entry phase is a
// power of i (p = 2) or a p-th root of unity (odd p), built from the
// structure matrices, so the phase alphabet has at most max(4, p) values.
CMatrix build_wf_basis(const FieldCtx& ctx, int r);

// Diagonal unitary with build_wf_basis(r) == build_diag(r) * build_wf_basis(0).
CMatrix build_diag(const FieldCtx& ctx, int r);

// d-dimensional discrete Fourier basis, entry (m, n) = exp(2 pi i m n / d) / sqrt(d).
CMatrix build_fourier(int d);

// r-th phase basis in the shift-operator-eigenbasis form; related to
// build_wf_basis by the label permutations of equivalence_map.
CMatrix build_durt_basis(const FieldCtx& ctx, int r);

MubFamily build_family(const FieldCtx& ctx, Construction construction);

// Distinct unit phases appearing in a matrix of equal-modulus entries,
// clustered at the given tolerance. Throws std::domain_error on zero entries.
std::vector<Cx> phase_alphabet(const CMatrix& m, double tol = 1e-9);

MubReport verify_mub(const MubFamily& family);

/// Label maps identifying the two constructions basiswise and statewise:
/// durt_basis(r) column j == wf_basis(basis_perm[r]) column state_perm[r][j].
/// For p = 2 the column map is f0(j) + a(r) + b(r') with the correction
/// vectors kept for inspection; for odd p it is f0(-j) with r' = f0(r / 2).
struct EquivalenceMap {
    std::vector<int> basis_perm;              // r -> r'
    std::vector<std::vector<int>> state_perm; // [r][j] -> j'
    std::vector<int> a_correction;            // p = 2 only, label per r
    std::vector<int> b_correction;            // p = 2 only, label per r
};

EquivalenceMap equivalence_map(const FieldCtx& ctx);

// Generalized Weyl operator: V_ij = sum_k gamma^{(k+i) * j} |k+i><k| with
// field-label index arithmetic; gamma = -1 for p = 2, exp(2 pi i / p) otherwise.
CMatrix weyl(const FieldCtx& ctx, int i, int j);

// Phase factor alpha_i^r from the shift law V_ij |e_k^(r)> =
// gamma^{i*k} conj(alpha_i^r) |e_{r*i - j + k}^(r)> on the Durt bases.
Cx weyl_alpha(const FieldCtx& ctx, int i, int r);

// gamma raised to the label of a field element.
Cx gamma_power(const FieldCtx& ctx, int element);

struct WeylLawReport {
    bool ok = false;
    double worst_deviation = 0.0;
    std::string failure;  // empty when ok
};

// Checks, exhaustively over all indices: the shift laws on the Durt bases
// and on the computational basis, the eigenstate relation for V_{l, r*l},
// and the decomposition V_ij = V_0j V_i0.
WeylLawReport weyl_shift_laws_check(const FieldCtx& ctx, double tol = 1e-10);

// Generalized Bell state |Phi_ij> = (V_ij x I)|Phi_00> as a length-d^2
// vector, component (a, b) at index a*d + b.
CVec bell_state(const FieldCtx& ctx, int i, int j);

std::string construction_name(Construction c);
Construction construction_from_name(const std::string& name);

}  // namespace mubqkd

#include "mubqkd/mub.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mubqkd {

namespace {

// exp(2 pi i k / n) for k in [0, n)
std::vector<Cx> root_table(int n) {
    std::vector<Cx> w(n);
    for (int k = 0; k < n; ++k)
        w[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    return w;
}

const Cx kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

// m_vec^T A^(j) m_vec as a plain integer (no reduction).
int quad_form(const FieldCtx& ctx, int j, const std::vector<int>& m_digits) {
    const auto& a = ctx.structure_matrices()[j];
    int s = 0;
    for (int u = 0; u < ctx.degree(); ++u) {
        if (m_digits[u] == 0) continue;
        for (int v = 0; v < ctx.degree(); ++v) s += m_digits[u] * a[u][v] * m_digits[v];
    }
    return s;
}

int dot(const std::vector<int>& a, const std::vector<int>& b) {
    int s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

Cx gamma_power(const FieldCtx& ctx, int element) {
    const int p = ctx.characteristic();
    const int e0 = ctx.digit(element, 0);
    if (p == 2) return e0 ? Cx{-1, 0} : Cx{1, 0};
    return std::polar(1.0, 2.0 * std::numbers::pi * e0 / p);
}

CMatrix build_wf_basis(const FieldCtx& ctx, int r) {
    const int d = ctx.order();
    if (r < 0 || r >= d) throw std::domain_error("basis index out of range");
    const int p = ctx.characteristic();
    const std::vector<int> rd = ctx.digits(r);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    CMatrix b(d, d);
    const std::vector<Cx> omega = (p == 2) ? std::vector<Cx>{} : root_table(p);
    for (int m = 0; m < d; ++m) {
        const std::vector<int> md = ctx.digits(m);
        int quad = 0;
        for (int j = 0; j < ctx.degree(); ++j)
            if (rd[j]) quad += rd[j] * quad_form(ctx, j, md);
        for (int n = 0; n < d; ++n) {
            const std::vector<int> nd = ctx.digits(n);
            if (p == 2) {
                b(m, n) = kPowersOfI[(quad + 2 * dot(md, nd)) % 4] * scale;
            } else {
                b(m, n) = omega[(quad + dot(md, nd)) % p] * scale;
            }
        }
    }
    return b;
}

CMatrix build_diag(const FieldCtx& ctx, int r) {
    const int d = ctx.order();
    if (r < 0 || r >= d) throw std::domain_error("basis index out of range");
    const int p = ctx.characteristic();
    const std::vector<int> rd = ctx.digits(r);
    const std::vector<Cx> omega = (p == 2) ? std::vector<Cx>{} : root_table(p);

    CMatrix m(d, d);
    for (int k = 0; k < d; ++k) {
        const std::vector<int> kd = ctx.digits(k);
        int quad = 0;
        for (int j = 0; j < ctx.degree(); ++j)
            if (rd[j]) quad += rd[j] * quad_form(ctx, j, kd);
        m(k, k) = (p == 2) ? kPowersOfI[quad % 4] : omega[quad % p];
    }
    return m;
}

CMatrix build_fourier(int d) {
    if (d < 2) throw std::domain_error("dimension must be >= 2");
    const std::vector<Cx> omega = root_table(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    CMatrix f(d, d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n)
            f(m, n) = omega[static_cast<int>((static_cast<long long>(m) * n) % d)] * scale;
    return f;
}

Cx weyl_alpha(const FieldCtx& ctx, int i, int r) {
    const int p = ctx.characteristic();
    if (p == 2) {
        // product over digit pairs of i raised to the label of r * x^m * x^n
        const std::vector<int> id = ctx.digits(i);
        int exponent = 0;
        for (int m = 0; m < ctx.degree(); ++m) {
            if (!id[m]) continue;
            for (int n = 0; n < ctx.degree(); ++n) {
                if (!id[n]) continue;
                exponent += ctx.mul(r, ctx.mul(ctx.monomial(m), ctx.monomial(n)));
            }
        }
        return kPowersOfI[exponent % 4];
    }
    // p odd, so the constant 2 is an invertible field element
    const int t = ctx.div(ctx.neg(ctx.mul(r, ctx.mul(i, i))), 2);
    return gamma_power(ctx, t);
}

CMatrix build_durt_basis(const FieldCtx& ctx, int r) {
    const int d = ctx.order();
    if (r < 0 || r >= d) throw std::domain_error("basis index out of range");
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    CMatrix h(d, d);
    for (int i = 0; i < d; ++i) {
        const int mi = ctx.neg(i);
        const Cx alpha = weyl_alpha(ctx, mi, r);
        for (int j = 0; j < d; ++j)
            h(i, j) = std::conj(alpha) * gamma_power(ctx, ctx.mul(mi, j)) * scale;
    }
    return h;
}

MubFamily build_family(const FieldCtx& ctx, Construction construction) {
    MubFamily family{ctx, construction, {}};
    const int d = ctx.order();
    family.bases.reserve(d + 1);
    for (int r = 0; r < d; ++r)
        family.bases.push_back(construction == Construction::WoottersFields
                                   ? build_wf_basis(ctx, r)
                                   : build_durt_basis(ctx, r));
    family.bases.push_back(CMatrix::identity(d));
    return family;
}

std::vector<Cx> phase_alphabet(const CMatrix& m, double tol) {
    std::vector<double> angles;
    double modulus = -1.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            const double mag = std::abs(m(i, j));
            if (mag < 1e-14) throw std::domain_error("phase_alphabet: zero entry");
            if (modulus < 0) modulus = mag;
            if (std::abs(mag - modulus) > 1e-9)
                throw std::domain_error("phase_alphabet: entries have unequal modulus");
            double a = std::arg(m(i, j));
            if (a < 0) a += 2.0 * std::numbers::pi;
            angles.push_back(a);
        }
    std::sort(angles.begin(), angles.end());
    std::vector<double> reps;
    for (double a : angles)
        if (reps.empty() || a - reps.back() > tol) reps.push_back(a);
    // wrap-around: first and last cluster may be the same phase
    if (reps.size() > 1 && (2.0 * std::numbers::pi - reps.back()) + reps.front() <= tol)
        reps.pop_back();
    std::vector<Cx> out;
    out.reserve(reps.size());
    for (double a : reps) out.push_back(std::polar(1.0, a));
    return out;
}

MubReport verify_mub(const MubFamily& family) {
    const int d = family.d();
    MubReport report;
    report.ok = true;
    const double target = 1.0 / d;
    for (const CMatrix& b : family.bases)
        report.worst_unitarity_deviation =
            std::max(report.worst_unitarity_deviation, unitarity_deviation(b));
    const int count = static_cast<int>(family.bases.size());
    for (int r = 0; r < count; ++r)
        for (int s = r + 1; s < count; ++s) {
            const CMatrix overlap = family.bases[r].adjoint() * family.bases[s];
            double worst = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    worst = std::max(worst, std::abs(std::norm(overlap(i, j)) - target));
            if (worst > report.worst_unbiased_deviation) {
                report.worst_unbiased_deviation = worst;
                report.worst_pair_r = r;
                report.worst_pair_s = s;
            }
        }
    report.ok = report.worst_unbiased_deviation <= 1e-10 &&
                report.worst_unitarity_deviation <= 1e-10;
    return report;
}

EquivalenceMap equivalence_map(const FieldCtx& ctx) {
    const int d = ctx.order();
    const int p = ctx.characteristic();
    EquivalenceMap map;
    map.basis_perm.resize(d);
    map.state_perm.assign(d, std::vector<int>(d));

    if (p == 2) {
        map.a_correction.resize(d);
        map.b_correction.resize(d);
        const auto& mats = ctx.structure_matrices();
        for (int r = 0; r < d; ++r) {
            const int rp = structure_map(ctx, 0, r);
            map.basis_perm[r] = rp;
            // a_n: second digit of r * x^n * x^n
            std::vector<int> a_vec(ctx.degree(), 0);
            for (int n = 0; n < ctx.degree(); ++n) {
                const int mono = ctx.monomial(n);
                const int prod = ctx.mul(r, ctx.mul(mono, mono));
                a_vec[n] = ctx.degree() > 1 ? ctx.digit(prod, 1) : 0;
            }
            // b_n from the residue of sum_k r'_k A^(k)_nn mod 4
            const std::vector<int> rpd = ctx.digits(rp);
            std::vector<int> b_vec(ctx.degree(), 0);
            for (int n = 0; n < ctx.degree(); ++n) {
                int s = 0;
                for (int k = 0; k < ctx.degree(); ++k) s += rpd[k] * mats[k][n][n];
                const int res = s % 4;
                b_vec[n] = (res == 1 || res == 2) ? 1 : 0;
            }
            const int a_label = ctx.label(a_vec);
            const int b_label = ctx.label(b_vec);
            map.a_correction[r] = a_label;
            map.b_correction[r] = b_label;
            for (int j = 0; j < d; ++j)
                map.state_perm[r][j] =
                    ctx.add(ctx.add(structure_map(ctx, 0, j), a_label), b_label);
        }
    } else {
        const int inv2 = ctx.inv(2 % p);
        for (int r = 0; r < d; ++r) {
            map.basis_perm[r] = structure_map(ctx, 0, ctx.mul(r, inv2));
            for (int j = 0; j < d; ++j)
                map.state_perm[r][j] = structure_map(ctx, 0, ctx.neg(j));
        }
    }
    return map;
}

CMatrix weyl(const FieldCtx& ctx, int i, int j) {
    const int d = ctx.order();
    if (i < 0 || i >= d || j < 0 || j >= d) throw std::domain_error("index out of range");
    CMatrix v(d, d);
    for (int k = 0; k < d; ++k) {
        const int row = ctx.add(k, i);
        v(row, k) = gamma_power(ctx, ctx.mul(row, j));
    }
    return v;
}

WeylLawReport weyl_shift_laws_check(const FieldCtx& ctx, double tol) {
    const int d = ctx.order();
    WeylLawReport report;
    std::vector<CMatrix> durt;
    durt.reserve(d);
    for (int r = 0; r < d; ++r) durt.push_back(build_durt_basis(ctx, r));

    auto note = [&](double dev, const std::string& what) {
        if (dev > report.worst_deviation) {
            report.worst_deviation = dev;
            if (dev > tol && report.failure.empty()) report.failure = what;
        }
    };

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const CMatrix v = weyl(ctx, i, j);
            // computational-basis shift law
            for (int k = 0; k < d; ++k) {
                CVec ek(d);
                ek[k] = 1.0;
                const CVec lhs = v * ek;
                CVec rhs(d);
                rhs[ctx.add(i, k)] = gamma_power(ctx, ctx.mul(ctx.add(k, i), j));
                double dev = 0.0;
                for (int t = 0; t < d; ++t) dev = std::max(dev, std::abs(lhs[t] - rhs[t]));
                note(dev, "computational-basis shift law");
            }
            // phase-basis shift law
            for (int r = 0; r < d; ++r) {
                const Cx alpha_conj = std::conj(weyl_alpha(ctx, i, r));
                for (int k = 0; k < d; ++k) {
                    const CVec lhs = v * durt[r].column(k);
                    const int target = ctx.add(ctx.sub(ctx.mul(r, i), j), k);
                    const Cx factor = gamma_power(ctx, ctx.mul(i, k)) * alpha_conj;
                    const CVec col = durt[r].column(target);
                    double dev = 0.0;
                    for (int t = 0; t < d; ++t)
                        dev = std::max(dev, std::abs(lhs[t] - factor * col[t]));
                    note(dev, "phase-basis shift law");
                }
            }
            // decomposition into a phase part and a shift part
            note(max_abs_diff(v, weyl(ctx, 0, j) * weyl(ctx, i, 0)),
                 "V_ij = V_0j V_i0 decomposition");
        }
    report.ok = report.worst_deviation <= tol;
    return report;
}

CVec bell_state(const FieldCtx& ctx, int i, int j) {
    const int d = ctx.order();
    const CMatrix v = weyl(ctx, i, j);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    CVec out(static_cast<size_t>(d) * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) out[static_cast<size_t>(a) * d + b] = v(a, b) * scale;
    return out;
}

std::string construction_name(Construction c) {
    return c == Construction::WoottersFields ? "wootters-fields" : "durt";
}

Construction construction_from_name(const std::string& name) {
    if (name == "wootters-fields" || name == "wf") return Construction::WoottersFields;
    if (name == "durt") return Construction::Durt;
    throw std::invalid_argument("unknown construction: " + name);
}

}  // namespace mubqkd

#include "emb/etale.hpp"

#include <algorithm>

namespace emb {

EtaleInvolutionAlgebra::EtaleInvolutionAlgebra(EtaleF factors, FElem dd)
    : F(std::move(factors)), d(std::move(dd)) {
    if (F.empty()) throw domain_error("EtaleInvolutionAlgebra: no factors");
    if (d.size() != F.size())
        throw domain_error("EtaleInvolutionAlgebra: d needs one component per factor");
    for (size_t j = 0; j < F.size(); ++j) {
        if (d[j].c.size() != static_cast<size_t>(F[j].degree()))
            throw domain_error("EtaleInvolutionAlgebra: d component has wrong arity");
        if (fe_norm(F[j], d[j]) == 0)
            throw domain_error("EtaleInvolutionAlgebra: d not invertible");
    }
}

int EtaleInvolutionAlgebra::dim_F() const {
    int n = 0;
    for (const auto& f : F) n += f.degree();
    return n;
}

std::string EtaleInvolutionAlgebra::str() const {
    std::string s;
    for (size_t j = 0; j < F.size(); ++j) {
        if (j) s += " x ";
        s += F[j].str() + "[x]/(x^2 - (" + d[j].str(F[j]) + "))";
    }
    return s;
}

EElem ee_from_F(const FElem& u) {
    EElem e;
    e.u = u;
    for (const auto& c : u) {
        FactorElem z;
        z.c.assign(c.c.size(), Rat(0));
        e.v.push_back(z);
    }
    return e;
}

EElem ee_mul(const EtaleInvolutionAlgebra& A, const EElem& x, const EElem& y) {
    EElem r;
    for (size_t j = 0; j < A.F.size(); ++j) {
        const FieldFactor& f = A.F[j];
        // (u1 + v1 X)(u2 + v2 X) = u1 u2 + d v1 v2 + (u1 v2 + v1 u2) X
        r.u.push_back(fe_add(f, fe_mul(f, x.u[j], y.u[j]),
                             fe_mul(f, A.d[j], fe_mul(f, x.v[j], y.v[j]))));
        r.v.push_back(fe_add(f, fe_mul(f, x.u[j], y.v[j]), fe_mul(f, x.v[j], y.u[j])));
    }
    return r;
}

EElem ee_conj(const EtaleInvolutionAlgebra& A, const EElem& x) {
    EElem r = x;
    for (size_t j = 0; j < A.F.size(); ++j) r.v[j] = fe_neg(A.F[j], r.v[j]);
    return r;
}

bool ee_invertible(const EtaleInvolutionAlgebra& A, const EElem& x) {
    for (size_t j = 0; j < A.F.size(); ++j) {
        const FieldFactor& f = A.F[j];
        FactorElem n = fe_sub(f, fe_mul(f, x.u[j], x.u[j]),
                              fe_mul(f, A.d[j], fe_mul(f, x.v[j], x.v[j])));
        if (fe_norm(f, n) == 0) return false;
    }
    return true;
}

EElem ee_inv(const EtaleInvolutionAlgebra& A, const EElem& x) {
    EElem r;
    for (size_t j = 0; j < A.F.size(); ++j) {
        const FieldFactor& f = A.F[j];
        // (u + vX)^{-1} = (u - vX) / (u^2 - d v^2)
        FactorElem n = fe_sub(f, fe_mul(f, x.u[j], x.u[j]),
                              fe_mul(f, A.d[j], fe_mul(f, x.v[j], x.v[j])));
        FactorElem ninv = fe_inv(f, n);
        r.u.push_back(fe_mul(f, x.u[j], ninv));
        r.v.push_back(fe_neg(f, fe_mul(f, x.v[j], ninv)));
    }
    return r;
}

bool ee_equal(const EElem& x, const EElem& y) {
    for (size_t j = 0; j < x.u.size(); ++j) {
        for (size_t i = 0; i < x.u[j].c.size(); ++i)
            if (x.u[j].c[i] != y.u[j].c[i] || x.v[j].c[i] != y.v[j].c[i]) return false;
    }
    return true;
}

namespace {

std::vector<FactorElem> factor_basis(const FieldFactor& f) {
    std::vector<FactorElem> basis;
    for (int i = 0; i < f.degree(); ++i) {
        FactorElem e;
        e.c.assign(static_cast<size_t>(f.degree()), Rat(0));
        e.c[static_cast<size_t>(i)] = 1;
        basis.push_back(e);
    }
    return basis;
}

} // namespace

QuadraticForm trace_form(const EtaleInvolutionAlgebra& A, const FElem& a,
                         const Config& cfg) {
    if (a.size() != A.F.size()) throw domain_error("trace_form: arity mismatch");
    std::vector<Rat> diag;
    for (size_t j = 0; j < A.F.size(); ++j) {
        const FieldFactor& f = A.F[j];
        if (fe_norm(f, a[j]) == 0) throw domain_error("trace_form: a not invertible");
        auto basis = factor_basis(f);
        int deg = f.degree();
        // Tr_{E_j/Q}(a (e_i X^s) sigma(e_k X^t)) vanishes for s != t and gives
        // blocks 2 Tr(a e_i e_k), -2 Tr(a d e_i e_k) on the 1- and X-slices
        for (int slice = 0; slice < 2; ++slice) {
            Mat block(static_cast<size_t>(deg), std::vector<Rat>(static_cast<size_t>(deg)));
            FactorElem mult = a[j];
            if (slice == 1) mult = fe_neg(f, fe_mul(f, a[j], A.d[j]));
            for (int i = 0; i < deg; ++i)
                for (int k = 0; k < deg; ++k) {
                    FactorElem prod = fe_mul(f, mult, fe_mul(f, basis[static_cast<size_t>(i)], basis[static_cast<size_t>(k)]));
                    block[static_cast<size_t>(i)][static_cast<size_t>(k)] = 2 * fe_trace(f, prod);
                }
            QuadraticForm part = diagonalize(block);
            diag.insert(diag.end(), part.diag.begin(), part.diag.end());
        }
    }
    return QuadraticForm(diag);
}

int cor_term(const EtaleInvolutionAlgebra& A, const FElem& a, const Place& v,
             const Config& cfg) {
    LocalInvariants qa = invariants(trace_form(A, a, cfg), cfg);
    LocalInvariants q1 = invariants(trace_form(A, felem_one(A.F), cfg), cfg);
    return qa.hasse_at(v) * q1.hasse_at(v);
}

int cor_term_symbols(const EtaleInvolutionAlgebra& A, const FElem& a, const Place& v,
                     const Config& cfg) {
    int prod = 1;
    for (size_t j = 0; j < A.F.size(); ++j)
        for (const auto& w : ext_places(A.F[j], static_cast<int>(j), v, cfg)) {
            if (w.kind == ExtPlace::Kind::Complex) continue;
            prod *= ext_hilbert_symbol(A.F[j], a[j], A.d[j], w, cfg);
        }
    return prod;
}

std::optional<FElem> cor_flipper(const EtaleInvolutionAlgebra& A, const Place& v,
                                 const Config& cfg) {
    for (size_t j = 0; j < A.F.size(); ++j) {
        const FieldFactor& f = A.F[j];
        auto ws = ext_places(f, static_cast<int>(j), v, cfg);
        // single-completion flips first
        for (const auto& w : ws) {
            if (w.kind == ExtPlace::Kind::Complex) continue;
            auto flip = symbol_flipper(f, A.d[j], w, cfg);
            if (!flip) continue;
            FElem b = felem_one(A.F);
            b[j] = *flip;
            if (cor_term_symbols(A, b, v, cfg) == -1) return b;
        }
        // asymmetric small elements over a split place of a quadratic factor
        if (f.kind() == FieldFactor::Kind::Quadratic && v.is_finite() &&
            ws.size() == 2 && ws[0].kind == ExtPlace::Kind::SplitCopy) {
            Config small = cfg;
            small.factor_bound = 100000;
            for (long x = 1; x <= 20; ++x)
                for (long y = 1; y <= 10; ++y)
                    for (int sx : {1, -1}) {
                        FactorElem e{{Rat(sx * x), Rat(y)}};
                        Rat n = fe_norm(f, e);
                        if (n == 0) continue;
                        try {
                            (void)factor(n.get_num(), small);
                        } catch (const bound_exceeded&) {
                            continue;
                        }
                        FElem b = felem_one(A.F);
                        b[j] = e;
                        if (cor_term_symbols(A, b, v, cfg) == -1) return b;
                    }
        }
    }
    return std::nullopt;
}

EElem hilbert90_solve(const EtaleInvolutionAlgebra& A, const EElem& x, const Config& cfg) {
    EElem y;
    for (size_t j = 0; j < A.F.size(); ++j) {
        const FieldFactor& f = A.F[j];
        // x sigma(x) = u^2 - d v^2 must be 1 componentwise
        FactorElem nrm = fe_sub(f, fe_mul(f, x.u[j], x.u[j]),
                                fe_mul(f, A.d[j], fe_mul(f, x.v[j], x.v[j])));
        FactorElem one = FactorElem::from_rat(f, 1);
        if (!fe_sub(f, nrm, one).is_zero())
            throw domain_error("hilbert90_solve: x sigma(x) != 1 on factor " +
                               std::to_string(j));
        auto e = fe_sqrt(f, A.d[j]);
        if (!e) {
            // field case: 1 + x works unless x = -1, where X itself does
            FactorElem u1 = fe_add(f, x.u[j], one);
            FactorElem nrm1 = fe_sub(f, fe_mul(f, u1, u1),
                                     fe_mul(f, A.d[j], fe_mul(f, x.v[j], x.v[j])));
            if (fe_norm(f, nrm1) != 0) {
                y.u.push_back(u1);
                y.v.push_back(x.v[j]);
            } else {
                y.u.push_back(FactorElem::from_rat(f, 0));
                y.v.push_back(one);
            }
        } else {
            // split case E_j = F_j x F_j via the idempotent coordinates
            // x = (x', x'') with x' x'' = 1; take y = (x', 1)
            FactorElem xp = fe_add(f, x.u[j], fe_mul(f, *e, x.v[j]));
            FactorElem half = FactorElem::from_rat(f, Rat(1, 2));
            y.u.push_back(fe_mul(f, half, fe_add(f, xp, one)));
            y.v.push_back(fe_mul(f, fe_mul(f, half, fe_inv(f, *e)), fe_sub(f, xp, one)));
        }
    }
    // verify exactly: x = y sigma(y)^{-1}
    if (!ee_invertible(A, y)) throw domain_error("hilbert90_solve: constructed y singular");
    EElem check = ee_mul(A, y, ee_inv(A, ee_conj(A, y)));
    if (!ee_equal(check, x)) throw domain_error("hilbert90_solve: verification failed");
    return y;
}

SplitsReport splits_csa(const EtaleF& E_factors, const std::set<Place>& D_ram, int n,
                        const Config& cfg) {
    int total = 0;
    for (const auto& f : E_factors) total += f.degree();
    if (total != n) throw domain_error("splits_csa: dimension mismatch");
    if (!D_ram.empty() && D_ram.size() % 2)
        throw domain_error("splits_csa: ramification set has odd size");
    SplitsReport rep;
    for (size_t j = 0; j < E_factors.size(); ++j) {
        SplitsReport::Entry e{static_cast<int>(j), true, std::nullopt};
        for (const Place& v : D_ram) {
            for (const auto& w : ext_places(E_factors[j], static_cast<int>(j), v, cfg)) {
                if (w.local_degree % 2) {
                    e.ok = false;
                    e.failing_place = v;
                    break;
                }
            }
            if (!e.ok) break;
        }
        rep.ok = rep.ok && e.ok;
        rep.per_factor.push_back(e);
    }
    return rep;
}

namespace {

// representatives covering all sign patterns at the real embeddings of one factor
std::vector<FactorElem> factor_sign_patterns(const FieldFactor& f) {
    int r = f.real_embeddings();
    if (r == 0) return {FactorElem::from_rat(f, 1)};
    if (f.kind() == FieldFactor::Kind::Rational)
        return {FactorElem::from_rat(f, 1), FactorElem::from_rat(f, -1)};
    if (f.kind() == FieldFactor::Kind::Quadratic)
        return {FactorElem::from_rat(f, 1), FactorElem::from_rat(f, -1),
                FactorElem{{Rat(0), Rat(1)}}, FactorElem{{Rat(0), Rat(-1)}}};
    // biquadratic, totally real: collect all 16 patterns by a small sweep
    std::vector<FactorElem> out(16);
    std::vector<bool> seen(16, false);
    int found = 0;
    for (int c0 = -3; c0 <= 3 && found < 16; ++c0)
        for (int c1 = -3; c1 <= 3 && found < 16; ++c1)
            for (int c2 = -3; c2 <= 3 && found < 16; ++c2)
                for (int c3 = -3; c3 <= 3 && found < 16; ++c3) {
                    FactorElem e{{Rat(c0), Rat(c1), Rat(c2), Rat(c3)}};
                    if (e.is_zero() || fe_norm(f, e) == 0) continue;
                    int pat = 0;
                    for (int emb = 0; emb < 4; ++emb)
                        if (fe_sign_at(f, e, emb) < 0) pat |= 1 << emb;
                    if (!seen[static_cast<size_t>(pat)]) {
                        seen[static_cast<size_t>(pat)] = true;
                        out[static_cast<size_t>(pat)] = e;
                        ++found;
                    }
                }
    if (found < 16)
        throw bound_exceeded("real_sign_patterns: biquadratic sweep incomplete", 16);
    return out;
}

} // namespace

std::vector<FElem> real_sign_patterns(const EtaleF& F) {
    std::vector<FElem> out = {{}};
    for (const auto& f : F) {
        std::vector<FElem> next;
        for (const auto& partial : out)
            for (const auto& e : factor_sign_patterns(f)) {
                FElem ext = partial;
                ext.push_back(e);
                next.push_back(ext);
            }
        out = next;
    }
    return out;
}

} // namespace emb

#include "emb/factors.hpp"

#include <algorithm>
#include <cassert>

#include "emb/extsymbols.hpp"

namespace emb {

namespace {

bool squarefree(const Int& n, const Config& cfg = {}) {
    if (n == 0) return false;
    for (const auto& [p, e] : factor(abs(n), cfg))
        if (e > 1) return false;
    return true;
}

} // namespace

FieldFactor FieldFactor::rational() { return FieldFactor(Kind::Rational, 0, 0); }

FieldFactor FieldFactor::quadratic(const Int& m) {
    if (m == 0 || m == 1 || !squarefree(m))
        throw domain_error("FieldFactor: quadratic generator must be squarefree, not 0 or 1");
    return FieldFactor(Kind::Quadratic, m, 0);
}

FieldFactor FieldFactor::biquadratic(const Int& a, const Int& b) {
    if (a == 0 || a == 1 || b == 0 || b == 1 || !squarefree(a) || !squarefree(b))
        throw domain_error("FieldFactor: biquadratic generators must be squarefree, not 0 or 1");
    if (a == b) throw domain_error("FieldFactor: ab must not be a square");
    return FieldFactor(Kind::Biquadratic, a, b);
}

int FieldFactor::degree() const {
    switch (kind_) {
        case Kind::Rational: return 1;
        case Kind::Quadratic: return 2;
        case Kind::Biquadratic: return 4;
    }
    return 0;
}

int FieldFactor::real_embeddings() const {
    switch (kind_) {
        case Kind::Rational: return 1;
        case Kind::Quadratic: return m_ > 0 ? 2 : 0;
        case Kind::Biquadratic: return (m_ > 0 && b_ > 0) ? 4 : 0;
    }
    return 0;
}

std::string FieldFactor::str() const {
    switch (kind_) {
        case Kind::Rational: return "Q";
        case Kind::Quadratic: return "Q(sqrt " + m_.get_str() + ")";
        case Kind::Biquadratic:
            return "Q(sqrt " + m_.get_str() + ", sqrt " + b_.get_str() + ")";
    }
    return "?";
}

FactorElem FactorElem::from_rat(const FieldFactor& f, const Rat& x) {
    FactorElem e;
    e.c.assign(f.degree(), Rat(0));
    e.c[0] = x;
    return e;
}

bool FactorElem::is_zero() const {
    return std::all_of(c.begin(), c.end(), [](const Rat& x) { return x == 0; });
}

bool FactorElem::is_rational() const {
    for (size_t i = 1; i < c.size(); ++i)
        if (c[i] != 0) return false;
    return true;
}

std::string FactorElem::str(const FieldFactor& f) const {
    switch (f.kind()) {
        case FieldFactor::Kind::Rational: return c[0].get_str();
        case FieldFactor::Kind::Quadratic:
            return c[0].get_str() + " + " + c[1].get_str() + "*sqrt(" + f.m().get_str() + ")";
        case FieldFactor::Kind::Biquadratic:
            return c[0].get_str() + " + " + c[1].get_str() + "*sqrt(" + f.a().get_str() +
                   ") + " + c[2].get_str() + "*sqrt(" + f.b().get_str() + ") + " +
                   c[3].get_str() + "*sqrt(" + Int(f.a() * f.b()).get_str() + ")";
    }
    return "?";
}

FactorElem fe_add(const FieldFactor& f, const FactorElem& x, const FactorElem& y) {
    FactorElem r = x;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += y.c[i];
    return r;
}

FactorElem fe_sub(const FieldFactor& f, const FactorElem& x, const FactorElem& y) {
    FactorElem r = x;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] -= y.c[i];
    return r;
}

FactorElem fe_neg(const FieldFactor& f, const FactorElem& x) {
    FactorElem r = x;
    for (auto& v : r.c) v = -v;
    return r;
}

FactorElem fe_scale(const FieldFactor& f, const Rat& s, const FactorElem& x) {
    FactorElem r = x;
    for (auto& v : r.c) v *= s;
    return r;
}

FactorElem fe_mul(const FieldFactor& f, const FactorElem& x, const FactorElem& y) {
    FactorElem r;
    switch (f.kind()) {
        case FieldFactor::Kind::Rational:
            r.c = {x.c[0] * y.c[0]};
            break;
        case FieldFactor::Kind::Quadratic: {
            const Rat m(f.m());
            r.c = {x.c[0] * y.c[0] + m * x.c[1] * y.c[1],
                   x.c[0] * y.c[1] + x.c[1] * y.c[0]};
            break;
        }
        case FieldFactor::Kind::Biquadratic: {
            // basis 1, sa=sqrt(a), sb=sqrt(b), sab=sqrt(ab) with sa*sb = sab,
            // sa*sab = a*sb, sb*sab = b*sa, sab^2 = ab
            const Rat a(f.a()), b(f.b()), ab(f.a() * f.b());
            const Rat &x0 = x.c[0], &x1 = x.c[1], &x2 = x.c[2], &x3 = x.c[3];
            const Rat &y0 = y.c[0], &y1 = y.c[1], &y2 = y.c[2], &y3 = y.c[3];
            r.c = {x0 * y0 + a * x1 * y1 + b * x2 * y2 + ab * x3 * y3,
                   x0 * y1 + x1 * y0 + b * (x2 * y3 + x3 * y2),
                   x0 * y2 + x2 * y0 + a * (x1 * y3 + x3 * y1),
                   x0 * y3 + x3 * y0 + x1 * y2 + x2 * y1};
            break;
        }
    }
    return r;
}

namespace {

// conjugation flipping sqrt(a) by sa, sqrt(b) by sb (biquadratic)
FactorElem bq_conj(const FactorElem& x, int sa, int sb) {
    FactorElem r = x;
    if (sa < 0) r.c[1] = -r.c[1];
    if (sb < 0) r.c[2] = -r.c[2];
    if (sa * sb < 0) r.c[3] = -r.c[3];
    return r;
}

} // namespace

Rat fe_trace(const FieldFactor& f, const FactorElem& x) {
    return Rat(f.degree()) * x.c[0];
}

Rat fe_norm(const FieldFactor& f, const FactorElem& x) {
    switch (f.kind()) {
        case FieldFactor::Kind::Rational: return x.c[0];
        case FieldFactor::Kind::Quadratic:
            return x.c[0] * x.c[0] - Rat(f.m()) * x.c[1] * x.c[1];
        case FieldFactor::Kind::Biquadratic: {
            FactorElem p = fe_mul(f, x, bq_conj(x, -1, 1));
            FactorElem q = fe_mul(f, bq_conj(x, 1, -1), bq_conj(x, -1, -1));
            FactorElem n = fe_mul(f, p, q);
            return n.c[0];
        }
    }
    return 0;
}

FactorElem fe_inv(const FieldFactor& f, const FactorElem& x) {
    Rat n = fe_norm(f, x);
    if (n == 0) throw domain_error("fe_inv: element not invertible");
    switch (f.kind()) {
        case FieldFactor::Kind::Rational: {
            FactorElem r;
            r.c = {Rat(1) / x.c[0]};
            return r;
        }
        case FieldFactor::Kind::Quadratic: {
            FactorElem r;
            r.c = {x.c[0] / n, -x.c[1] / n};
            return r;
        }
        case FieldFactor::Kind::Biquadratic: {
            // inv = (product of the three conjugates) / norm
            FactorElem p = fe_mul(f, bq_conj(x, -1, 1),
                                  fe_mul(f, bq_conj(x, 1, -1), bq_conj(x, -1, -1)));
            return fe_scale(f, Rat(1) / n, p);
        }
    }
    throw domain_error("fe_inv: bad kind");
}

namespace {

// exact square root in Q: nullopt when not a square
std::optional<Rat> sqrt_in_Q(const Rat& x) {
    if (x < 0 || !is_rational_square(x)) return std::nullopt;
    return rational_sqrt(x);
}

// exact square root of c0 + c1 sqrt(m) in Q(sqrt m), if one exists.
// y = u + v sqrt(m): u^2 + m v^2 = c0 and 2uv = c1, so u^2 is a root of
// t^2 - c0 t + m c1^2 / 4.
std::optional<FactorElem> sqrt_in_quad(const Int& m, const Rat& c0, const Rat& c1) {
    if (c0 == 0 && c1 == 0) return FactorElem{{Rat(0), Rat(0)}};
    Rat n = c0 * c0 - Rat(m) * c1 * c1; // field norm
    auto sn = sqrt_in_Q(n);
    if (!sn) return std::nullopt;
    for (int sgn : {1, -1}) {
        Rat t = (c0 + Rat(sgn) * *sn) / 2; // candidate u^2
        if (t == 0) {
            // u = 0: y = v sqrt(m), y^2 = m v^2 = c0 needs c1 = 0
            if (c1 == 0) {
                auto v = sqrt_in_Q(c0 / Rat(m));
                if (v) return FactorElem{{Rat(0), *v}};
            }
            continue;
        }
        auto u = sqrt_in_Q(t);
        if (!u || *u == 0) continue;
        Rat v = c1 / (2 * *u);
        if (*u * *u + Rat(m) * v * v == c0) return FactorElem{{*u, v}};
    }
    return std::nullopt;
}

// exact square root in Q(sqrt a, sqrt b) via the tower L = Q(sqrt a),
// F = L(sqrt b): x = A + B sqrt(b) is a square iff N = A^2 - b B^2 is a
// square in L and one of (A ± sqrt(N))/2 is a square u^2 in L; then
// y = u + (B / 2u) sqrt(b).
std::optional<FactorElem> sqrt_in_biquad(const FieldFactor& f, const FactorElem& x) {
    FieldFactor L = FieldFactor::quadratic(f.a());
    FactorElem A{{x.c[0], x.c[1]}}, B{{x.c[2], x.c[3]}};
    auto sqrt_in_L = [&](const FactorElem& z) {
        return sqrt_in_quad(f.a(), z.c[0], z.c[1]);
    };
    if (B.is_zero()) {
        // y in L, or y = w sqrt(b) with w in L
        if (auto y = sqrt_in_L(A)) return FactorElem{{y->c[0], y->c[1], Rat(0), Rat(0)}};
        FactorElem Ab = fe_scale(L, Rat(1) / Rat(f.b()), A);
        if (auto w = sqrt_in_L(Ab)) return FactorElem{{Rat(0), Rat(0), w->c[0], w->c[1]}};
        return std::nullopt;
    }
    FactorElem N = fe_sub(L, fe_mul(L, A, A), fe_scale(L, Rat(f.b()), fe_mul(L, B, B)));
    auto sN = sqrt_in_L(N);
    if (!sN) return std::nullopt;
    for (int sgn : {1, -1}) {
        FactorElem cand = fe_scale(L, Rat(1, 2), fe_add(L, A, fe_scale(L, Rat(sgn), *sN)));
        auto u = sqrt_in_L(cand);
        if (!u || u->is_zero()) continue;
        FactorElem w = fe_mul(L, B, fe_inv(L, fe_scale(L, Rat(2), *u)));
        FactorElem y{{u->c[0], u->c[1], w.c[0], w.c[1]}};
        if (fe_sub(f, fe_mul(f, y, y), x).is_zero()) return y;
    }
    return std::nullopt;
}

} // namespace

std::optional<FactorElem> fe_sqrt(const FieldFactor& f, const FactorElem& x) {
    switch (f.kind()) {
        case FieldFactor::Kind::Rational: {
            if (x.c[0] < 0 || !is_rational_square(x.c[0])) return std::nullopt;
            return FactorElem{{rational_sqrt(x.c[0])}};
        }
        case FieldFactor::Kind::Quadratic:
            return sqrt_in_quad(f.m(), x.c[0], x.c[1]);
        case FieldFactor::Kind::Biquadratic:
            return sqrt_in_biquad(f, x);
    }
    return std::nullopt;
}

bool fe_is_square(const FieldFactor& f, const FactorElem& x, const Config& cfg) {
    if (x.is_zero()) return true;
    return fe_sqrt(f, x).has_value();
}

int fe_sign_at(const FieldFactor& f, const FactorElem& x, int e) {
    if (x.is_zero()) return 0;
    switch (f.kind()) {
        case FieldFactor::Kind::Rational:
            return x.c[0] > 0 ? 1 : -1;
        case FieldFactor::Kind::Quadratic: {
            if (f.m() < 0) throw domain_error("fe_sign_at: complex embedding");
            // sign of u + s*v*sqrt(m), s = +1 for e=0, -1 for e=1
            Rat u = x.c[0], v = e == 0 ? x.c[1] : Rat(-x.c[1]);
            if (v == 0) return u > 0 ? 1 : -1;
            if (u == 0) return v > 0 ? 1 : -1;
            if (u > 0 && v > 0) return 1;
            if (u < 0 && v < 0) return -1;
            // compare u^2 vs m v^2
            bool abs_u_wins = u * u > Rat(f.m()) * v * v;
            return (u > 0) == abs_u_wins ? (u > 0 ? 1 : -1) : (v > 0 ? 1 : -1);
        }
        case FieldFactor::Kind::Biquadratic: {
            if (f.a() < 0 || f.b() < 0) throw domain_error("fe_sign_at: complex embedding");
            int sa = (e & 2) ? -1 : 1, sb = (e & 1) ? -1 : 1;
            // interval refinement with exact rational sqrt enclosures
            for (Int t = 1024;; t *= 16) {
                auto enclose = [&t](const Int& n) {
                    Int s;
                    Int nt2 = n * t * t;
                    mpz_sqrt(s.get_mpz_t(), nt2.get_mpz_t());
                    return std::pair<Rat, Rat>(Rat(s, t), Rat(s + 1, t));
                };
                auto [la, ha] = enclose(f.a());
                auto [lb, hb] = enclose(f.b());
                auto [lab, hab] = enclose(f.a() * f.b());
                auto term = [](const Rat& c, const Rat& lo, const Rat& hi) {
                    return c >= 0 ? std::pair<Rat, Rat>(c * lo, c * hi)
                                  : std::pair<Rat, Rat>(c * hi, c * lo);
                };
                auto [l1, h1] = term(sa * x.c[1], la, ha);
                auto [l2, h2] = term(sb * x.c[2], lb, hb);
                auto [l3, h3] = term(sa * sb * x.c[3], lab, hab);
                Rat lo = x.c[0] + l1 + l2 + l3, hi = x.c[0] + h1 + h2 + h3;
                if (lo > 0) return 1;
                if (hi < 0) return -1;
                // a nonzero field element has nonzero image; refine
            }
        }
    }
    return 0;
}

std::string ExtPlace::str() const {
    std::string k;
    switch (kind) {
        case Kind::SplitCopy: k = "split"; break;
        case Kind::Inert: k = "inert"; break;
        case Kind::Ramified: k = "ram"; break;
        case Kind::Complex: k = "cx"; break;
    }
    return "w(" + base.str() + ";f" + std::to_string(factor_index) + ";" + k +
           std::to_string(copy) + ")";
}

namespace {

ExtPlace mk(const Place& v, int fi, ExtPlace::Kind k, int copy, int deg, Int q) {
    ExtPlace w;
    w.base = v;
    w.factor_index = fi;
    w.kind = k;
    w.copy = copy;
    w.local_degree = deg;
    w.residue_q = std::move(q);
    return w;
}

// local behaviour of sqrt(m) over Q_v
ExtPlace::Kind quad_local_kind(const Int& m, const Place& v) {
    if (v.is_real()) return m > 0 ? ExtPlace::Kind::SplitCopy : ExtPlace::Kind::Complex;
    const Int& p = v.prime();
    if (p == 2) {
        Int r = m % 8;
        if (r < 0) r += 8;
        if (m % 2 == 0) return ExtPlace::Kind::Ramified;
        if (r == 1) return ExtPlace::Kind::SplitCopy;
        if (r == 5) return ExtPlace::Kind::Inert;
        return ExtPlace::Kind::Ramified; // m = 3 mod 4
    }
    if (m % p == 0) return ExtPlace::Kind::Ramified;
    return legendre(m, p) == 1 ? ExtPlace::Kind::SplitCopy : ExtPlace::Kind::Inert;
}

} // namespace

std::vector<ExtPlace> ext_places(const FieldFactor& f, int fi, const Place& v,
                                 const Config& cfg) {
    std::vector<ExtPlace> out;
    switch (f.kind()) {
        case FieldFactor::Kind::Rational:
            out.push_back(mk(v, fi, ExtPlace::Kind::SplitCopy, 0, 1,
                             v.is_finite() ? v.prime() : Int(0)));
            break;
        case FieldFactor::Kind::Quadratic: {
            ExtPlace::Kind k = quad_local_kind(f.m(), v);
            if (k == ExtPlace::Kind::SplitCopy) {
                out.push_back(mk(v, fi, k, 0, 1, v.is_finite() ? v.prime() : Int(0)));
                out.push_back(mk(v, fi, k, 1, 1, v.is_finite() ? v.prime() : Int(0)));
            } else if (k == ExtPlace::Kind::Complex) {
                out.push_back(mk(v, fi, k, 0, 2, 0));
            } else if (k == ExtPlace::Kind::Inert) {
                out.push_back(mk(v, fi, k, 0, 2, v.prime() * v.prime()));
            } else {
                out.push_back(mk(v, fi, k, 0, 2, v.prime()));
            }
            break;
        }
        case FieldFactor::Kind::Biquadratic: {
            const Int a = f.a(), b = f.b(), ab = f.a() * f.b();
            if (v.is_real()) {
                if (a > 0 && b > 0) {
                    for (int e = 0; e < 4; ++e)
                        out.push_back(mk(v, fi, ExtPlace::Kind::SplitCopy, e, 1, 0));
                } else {
                    out.push_back(mk(v, fi, ExtPlace::Kind::Complex, 0, 2, 0));
                    out.push_back(mk(v, fi, ExtPlace::Kind::Complex, 1, 2, 0));
                }
                break;
            }
            bool sa = is_local_square(Rat(a), v, cfg);
            bool sb = is_local_square(Rat(b), v, cfg);
            bool sab = is_local_square(Rat(ab), v, cfg);
            if (sa && sb) {
                for (int e = 0; e < 4; ++e)
                    out.push_back(mk(v, fi, ExtPlace::Kind::SplitCopy, e, 1, v.prime()));
            } else if (sa || sb || sab) {
                // two copies of the quadratic completion generated by either
                // nonsquare generator (they agree locally)
                Int gen = sa ? b : a; // if sa, b is a nonsquare; else a is
                ExtPlace::Kind k = quad_local_kind(gen, v);
                Int q = k == ExtPlace::Kind::Inert ? v.prime() * v.prime() : v.prime();
                out.push_back(mk(v, fi, k, 0, 2, q));
                out.push_back(mk(v, fi, k, 1, 2, q));
            } else {
                // local degree 4 (only at ramified places)
                out.push_back(mk(v, fi, ExtPlace::Kind::Ramified, 0, 4, 0));
            }
            break;
        }
    }
    return out;
}

// ---------- completions: valuations, residues, square classes ----------

namespace {

// residue of a rational with p-free denominator
Int residue_mod(const Rat& x, const Int& pk) {
    Int den = x.get_den() % pk;
    if (den < 0) den += pk;
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), pk.get_mpz_t()) == 0)
        throw domain_error("residue_mod: denominator not invertible");
    Int r = (x.get_num() % pk) * inv % pk;
    if (r < 0) r += pk;
    return r;
}

// F_{p^2} = F_p[s]/(s^2 - mbar): quadratic character
int fp2_character(const Int& u, const Int& v, const Int& m, const Int& p) {
    // z^((p^2-1)/2) = N(z)^((p-1)/2) for z in F_{p^2}, N = norm to F_p
    Int n = (u * u - m * v * v) % p;
    if (n < 0) n += p;
    if (n == 0) throw domain_error("fp2_character: zero element");
    return legendre(n, p);
}

struct QuadImage {
    long val;      // valuation at the split copy
    Rat unit_rep;  // canonical unit class rep (1/u_p at odd p, 1/3/5/7 at 2)
};

// square-class data of the image of (u + v sqrt(m)) at a split copy of p.
// Scales to p-integral coordinates and raises Hensel precision until the
// valuation is certified.
QuadImage split_image_class(const Int& m, Rat u, Rat v, const Place& vp, int copy) {
    const Int& p = vp.prime();
    // clear p from denominators by an even power (does not change the class)
    long s = 0;
    if (u != 0) s = std::max(s, -val_at(u, p));
    if (v != 0) s = std::max(s, -val_at(v, p));
    s = (s + 1) / 2 * 2;
    if (s > 0) {
        Rat pw(pow_int(p, static_cast<unsigned long>(s)));
        u *= pw;
        v *= pw;
    }
    for (int K = 24;; K *= 2) {
        if (K > 4096) throw bound_exceeded("split_image_class: precision", 4096);
        Int pk = pow_int(p, K);
        Int r;
        if (p == 2) {
            Int mm = m % pk;
            if (mm < 0) mm += pk;
            r = sqrt_mod_2k(mm, K);
        } else {
            Int mm = m % pk;
            if (mm < 0) mm += pk;
            r = sqrt_mod_pk(mm, p, K);
        }
        if (copy == 1) r = pk - r;
        Rat y = u + v * Rat(r);
        if (y == 0) continue;
        long vv = val_at(y, p);
        if (vv > K - 4) continue; // not enough precision to trust it
        Rat unit = unit_part(y, p);
        if (p == 2) {
            Int u8 = residue_mod(unit, 8);
            return {vv, Rat(u8)};
        }
        Int res = residue_mod(unit, p);
        if (legendre(res, p) == 1) return {vv, Rat(1)};
        Int np = 2;
        while (legendre(np, p) != -1) ++np;
        return {vv, Rat(np)};
    }
}

// image of a biquadratic element at a 4-way split copy, same contract
QuadImage biquad_split_image_class(const FieldFactor& f, const FactorElem& x,
                                   const Place& vp, int copy) {
    const Int& p = vp.prime();
    Rat cs[4] = {x.c[0], x.c[1], x.c[2], x.c[3]};
    long s = 0;
    for (auto& cc : cs)
        if (cc != 0) s = std::max(s, -val_at(cc, p));
    s = (s + 1) / 2 * 2;
    if (s > 0) {
        Rat pw(pow_int(p, static_cast<unsigned long>(s)));
        for (auto& cc : cs) cc *= pw;
    }
    int ea = (copy & 2) ? 1 : 0, eb = (copy & 1) ? 1 : 0;
    for (int K = 24;; K *= 2) {
        if (K > 4096) throw bound_exceeded("biquad_split_image_class: precision", 4096);
        Int pk = pow_int(p, K);
        auto root = [&](const Int& n) {
            Int nn = n % pk;
            if (nn < 0) nn += pk;
            return p == 2 ? sqrt_mod_2k(nn, K) : sqrt_mod_pk(nn, p, K);
        };
        Int ra = root(f.a()), rb = root(f.b());
        if (ea) ra = pk - ra;
        if (eb) rb = pk - rb;
        Int rab = ra * rb % pk;
        Rat y = cs[0] + cs[1] * Rat(ra) + cs[2] * Rat(rb) + cs[3] * Rat(rab);
        if (y == 0) continue;
        // reduce mod p^K to keep numbers small is unnecessary at desk scale
        long vv = val_at(y, p);
        if (vv > K - 4) continue;
        Rat unit = unit_part(y, p);
        if (p == 2) return {vv, Rat(residue_mod(unit, 8))};
        Int res = residue_mod(unit, p);
        if (legendre(res, p) == 1) return {vv, Rat(1)};
        Int np = 2;
        while (legendre(np, p) != -1) ++np;
        return {vv, Rat(np)};
    }
}

} // namespace

long ext_val(const FieldFactor& f, const FactorElem& x, const ExtPlace& w,
             const Config& cfg) {
    if (x.is_zero()) throw domain_error("ext_val: zero element");
    if (!w.base.is_finite()) throw domain_error("ext_val: archimedean place");
    const Int& p = w.base.prime();
    switch (f.kind()) {
        case FieldFactor::Kind::Rational:
            return val_at(x.c[0], p);
        case FieldFactor::Kind::Quadratic: {
            switch (w.kind) {
                case ExtPlace::Kind::SplitCopy:
                    return split_image_class(f.m(), x.c[0], x.c[1], w.base, w.copy).val;
                case ExtPlace::Kind::Inert: {
                    long vu = x.c[0] == 0 ? LONG_MAX : val_at(x.c[0], p);
                    long vv = x.c[1] == 0 ? LONG_MAX : val_at(x.c[1], p);
                    return std::min(vu, vv);
                }
                case ExtPlace::Kind::Ramified: {
                    long vu = x.c[0] == 0 ? LONG_MAX : 2 * val_at(x.c[0], p);
                    long vv = x.c[1] == 0 ? LONG_MAX : 2 * val_at(x.c[1], p) + 1;
                    return std::min(vu, vv);
                }
                default:
                    throw domain_error("ext_val: complex place");
            }
        }
        case FieldFactor::Kind::Biquadratic: {
            if (w.kind == ExtPlace::Kind::SplitCopy)
                return biquad_split_image_class(f, x, w.base, w.copy).val;
            if (x.is_rational()) {
                long v0 = val_at(x.c[0], p);
                return w.kind == ExtPlace::Kind::Ramified && w.local_degree == 2
                           ? 2 * v0
                           : (w.kind == ExtPlace::Kind::Inert ? v0 : v0);
            }
            throw unsupported_error("ext_val: irrational biquadratic element at " + w.str());
        }
    }
    throw domain_error("ext_val: bad kind");
}

int ext_unit_character(const FieldFactor& f, const FactorElem& x, const ExtPlace& w,
                       const Config& cfg) {
    if (!w.base.is_finite() || w.base.is_dyadic())
        throw domain_error("ext_unit_character: tame finite places only");
    const Int& p = w.base.prime();
    if (f.kind() == FieldFactor::Kind::Quadratic) {
        if (w.kind == ExtPlace::Kind::Inert) {
            long v = ext_val(f, x, w, cfg);
            Rat pw(pow_int(p, static_cast<unsigned long>(v >= 0 ? v : -v)));
            Rat u = v >= 0 ? Rat(x.c[0] / pw) : Rat(x.c[0] * pw);
            Rat t = v >= 0 ? Rat(x.c[1] / pw) : Rat(x.c[1] * pw);
            Int mm = f.m() % p;
            if (mm < 0) mm += p;
            return fp2_character(residue_mod(u, p), residue_mod(t, p), mm, p);
        }
        if (w.kind == ExtPlace::Kind::Ramified) {
            // divide by sqrt(m)^val, residue is the constant coordinate
            FactorElem y = x;
            long v = ext_val(f, x, w, cfg);
            long v2 = v >= 0 ? v / 2 : -((-v + 1) / 2); // floor(v/2)
            long rem = v - 2 * v2;                      // 0 or 1
            Rat pw(pow_int(p, static_cast<unsigned long>(v2 >= 0 ? v2 : -v2)));
            y = fe_scale(f, v2 >= 0 ? Rat(1) / pw : pw, y);
            if (rem) {
                // y / sqrt(m) = c1 + (c0/m) sqrt(m)
                FactorElem z;
                z.c = {y.c[1], y.c[0] / Rat(f.m())};
                y = z;
            }
            return legendre(residue_mod(y.c[0], p), p);
        }
        throw domain_error("ext_unit_character: split places use base residues");
    }
    if (x.is_rational()) {
        // scalar in a quadratic-type completion of a biquadratic factor
        if (w.kind == ExtPlace::Kind::Inert)
            return 1; // norm of an F_p scalar to F_p is its square
        Rat u = unit_part(x.c[0], p);
        return legendre(residue_mod(u, p), p);
    }
    throw unsupported_error("ext_unit_character: unsupported element/place");
}

bool is_ext_square(const FieldFactor& f, const FactorElem& x, const ExtPlace& w,
                   const Config& cfg) {
    if (x.is_zero()) throw domain_error("is_ext_square: zero element");
    // archimedean
    if (w.base.is_real()) {
        if (w.kind == ExtPlace::Kind::Complex) return true;
        return fe_sign_at(f, x, w.copy) > 0;
    }
    const Int& p = w.base.prime();
    switch (f.kind()) {
        case FieldFactor::Kind::Rational:
            return is_local_square(x.c[0], w.base, cfg);
        case FieldFactor::Kind::Quadratic: {
            switch (w.kind) {
                case ExtPlace::Kind::SplitCopy: {
                    QuadImage im = split_image_class(f.m(), x.c[0], x.c[1], w.base, w.copy);
                    if (im.val % 2) return false;
                    return p == 2 ? im.unit_rep == 1 : im.unit_rep == 1;
                }
                case ExtPlace::Kind::Inert: {
                    if (p == 2) return dyadic_nonsplit_quad_square(f, x, cfg);
                    if (ext_val(f, x, w, cfg) % 2) return false;
                    return ext_unit_character(f, x, w, cfg) == 1;
                }
                case ExtPlace::Kind::Ramified: {
                    if (p == 2) return dyadic_nonsplit_quad_square(f, x, cfg);
                    if (ext_val(f, x, w, cfg) % 2) return false;
                    return ext_unit_character(f, x, w, cfg) == 1;
                }
                default:
                    return true; // complex
            }
        }
        case FieldFactor::Kind::Biquadratic: {
            if (w.kind == ExtPlace::Kind::SplitCopy) {
                QuadImage im = biquad_split_image_class(f, x, w.base, w.copy);
                return im.val % 2 == 0 && im.unit_rep == 1;
            }
            if (w.local_degree == 4)
                throw unsupported_error("is_ext_square: quartic local factor at " + w.str());
            if (x.is_rational()) {
                // x rational in a quadratic completion Q_p(sqrt(gen)):
                // square iff x or x*gen is a square in Q_p
                bool sa = is_local_square(Rat(f.a()), w.base, cfg);
                Int gen = sa ? f.b() : f.a();
                return is_local_square(x.c[0], w.base, cfg) ||
                       is_local_square(x.c[0] * Rat(gen), w.base, cfg);
            }
            throw unsupported_error("is_ext_square: irrational biquadratic element at " +
                                    w.str());
        }
    }
    throw domain_error("is_ext_square: bad kind");
}

Rat split_copy_class_rep(const FieldFactor& f, const FactorElem& x, const ExtPlace& w,
                         const Config& cfg) {
    if (w.kind != ExtPlace::Kind::SplitCopy || !w.base.is_finite())
        throw domain_error("split_copy_class_rep: finite split copies only");
    const Int& p = w.base.prime();
    QuadImage im;
    switch (f.kind()) {
        case FieldFactor::Kind::Rational: {
            long v = val_at(x.c[0], p);
            Rat u = unit_part(x.c[0], p);
            if (p == 2) {
                im = {v, Rat(residue_mod(u, 8))};
            } else {
                Int res = residue_mod(u, p);
                Int np = 2;
                while (legendre(np, p) != -1) ++np;
                im = {v, legendre(res, p) == 1 ? Rat(1) : Rat(np)};
            }
            break;
        }
        case FieldFactor::Kind::Quadratic:
            im = split_image_class(f.m(), x.c[0], x.c[1], w.base, w.copy);
            break;
        case FieldFactor::Kind::Biquadratic:
            im = biquad_split_image_class(f, x, w.base, w.copy);
            break;
        default:
            throw domain_error("split_copy_class_rep: bad kind");
    }
    Rat rep = im.unit_rep;
    if (im.val % 2) rep *= Rat(p);
    return rep;
}

} // namespace emb

#include "emb/quat.hpp"
#include <array>
#include <cstdlib>

#include <algorithm>

namespace emb {

namespace {

bool squarefree_int(const Int& n, const Config& cfg) {
    if (n == 0) return false;
    for (const auto& [p, e] : factor(abs(n), cfg))
        if (e > 1) return false;
    return true;
}

} // namespace

std::vector<Place> ram_set(const Int& alpha, const Int& beta, const Config& cfg) {
    if (alpha == 0 || beta == 0) throw domain_error("ram_set: zero parameter");
    std::vector<Place> out;
    for (const Place& v : support_places({Rat(alpha), Rat(beta)}, cfg))
        if (hilbert_symbol(Rat(alpha), Rat(beta), v, cfg) == -1) out.push_back(v);
    if (out.size() % 2)
        throw domain_error("ram_set: odd ramification set (broken reciprocity)");
    return out;
}

QuaternionAlgebra::QuaternionAlgebra(const Int& a, const Int& b, const Config& cfg)
    : alpha(a), beta(b) {
    if (!squarefree_int(a, cfg) || !squarefree_int(b, cfg))
        throw domain_error("QuaternionAlgebra: parameters must be nonzero squarefree");
    ram = ram_set(a, b, cfg);
}

bool QuaternionAlgebra::ramified_at(const Place& v) const {
    return std::find(ram.begin(), ram.end(), v) != ram.end();
}

QuaternionAlgebra quaternion_from_ramset(const std::set<Place>& R, const Config& cfg) {
    if (R.size() % 2) throw domain_error("quaternion_from_ramset: odd set is infeasible");
    std::vector<Place> want(R.begin(), R.end());
    if (R.empty()) return QuaternionAlgebra(1, 1, cfg);

    std::vector<Int> primes;
    for (const Place& v : R)
        if (v.is_finite()) primes.push_back(v.prime());
    if (primes.size() > 8)
        throw bound_exceeded("quaternion_from_ramset: set too large", 8);
    // candidate generators: signed squarefree products of the set's primes,
    // a few small auxiliaries, and 2
    std::vector<Int> vals;
    for (unsigned long mask = 0; mask < (1ul << primes.size()); ++mask) {
        Int prod = 1;
        for (size_t i = 0; i < primes.size(); ++i)
            if (mask & (1ul << i)) prod *= primes[i];
        for (const Int& extra : {Int(1), Int(2)}) {
            if (extra == 2 &&
                std::find(primes.begin(), primes.end(), 2) != primes.end())
                continue;
            vals.push_back(prod * extra);
            vals.push_back(-prod * extra);
        }
    }
    std::vector<Int> aux;
    Int q = 2;
    while (aux.size() < 12) {
        mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
        if (std::find(primes.begin(), primes.end(), q) == primes.end()) aux.push_back(q);
    }
    for (const Int& a : aux) {
        vals.push_back(a);
        vals.push_back(-a);
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());

    long tried = 0;
    for (const Int& a : vals)
        for (const Int& b : vals) {
            if (++tried > cfg.witness_cap)
                throw bound_exceeded("quaternion_from_ramset: search", cfg.witness_cap);
            if (!squarefree_int(a, cfg) || !squarefree_int(b, cfg)) continue;
            std::vector<Place> got = ram_set(a, b, cfg);
            if (std::set<Place>(got.begin(), got.end()) == R)
                return QuaternionAlgebra(a, b, cfg);
        }
    throw bound_exceeded("quaternion_from_ramset: search", cfg.witness_cap);
}

SkewHermitianForm::SkewHermitianForm(QuaternionAlgebra d, std::vector<PureQuaternion> qs)
    : D(std::move(d)), entries(std::move(qs)) {
    if (entries.empty()) throw domain_error("SkewHermitianForm: empty diagonal");
    for (int i = 0; i < dim(); ++i)
        if (nrd(i) == 0)
            throw domain_error("SkewHermitianForm: entry with zero reduced norm");
}

Rat SkewHermitianForm::nrd(int i) const {
    const PureQuaternion& q = entries[static_cast<size_t>(i)];
    // Nrd(xi + yj + zk) = -(alpha x^2 + beta y^2 - alpha beta z^2)
    return -(Rat(D.alpha) * q.x * q.x + Rat(D.beta) * q.y * q.y -
             Rat(D.alpha) * Rat(D.beta) * q.z * q.z);
}

SquareClass disc_involution(const SkewHermitianForm& h, const Config& cfg) {
    Rat prod = h.dim() % 2 ? Rat(-1) : Rat(1);
    for (int i = 0; i < h.dim(); ++i) prod *= h.nrd(i);
    return SquareClass::of(prod, cfg);
}

ZDescriptor clifford_center(const SkewHermitianForm& h, const Config& cfg) {
    SquareClass d = disc_involution(h, cfg);
    ZDescriptor z;
    z.split = d.is_one();
    z.disc = d.rep();
    return z;
}

std::vector<Place> bad_set_V(const SkewHermitianForm& h, const Config& cfg) {
    ZDescriptor z = clifford_center(h, cfg);
    std::vector<Place> out;
    for (const Place& v : h.D.ram)
        if (z.split_at(v, cfg)) out.push_back(v);
    return out;
}

std::map<Place, int> clifford_shift(const EtaleF& F, const FElem& a, const FElem& d,
                                    const ZDescriptor& Z, const Config& cfg) {
    EtaleInvolutionAlgebra A(F, d);
    QuadraticForm qa = trace_form(A, a, cfg), q1 = trace_form(A, felem_one(F), cfg);
    std::vector<Rat> data = qa.diag;
    data.insert(data.end(), q1.diag.begin(), q1.diag.end());
    std::map<Place, int> out;
    for (const Place& v : support_places(data, cfg)) {
        if (!Z.split_at(v, cfg)) {
            out[v] = 0; // restriction to a field kills the class
            continue;
        }
        out[v] = cor_term(A, a, v, cfg) == -1 ? 1 : 0;
    }
    return out;
}

bool DeltaVector::is_zero_class() const {
    bool all0 = true, all1 = true;
    for (int b : bits) {
        if (b) all0 = false;
        else all1 = false;
    }
    return all0 || all1;
}

bool DeltaVector::same_class(const DeltaVector& o) const {
    if (V.size() != o.V.size()) return false;
    for (size_t i = 0; i < V.size(); ++i)
        if (!(V[i] == o.V[i])) return false;
    bool eq = true, comp = true;
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != o.bits[i]) eq = false;
        if (bits[i] == o.bits[i]) comp = false;
    }
    return eq || comp;
}

DeltaVector DeltaVector::plus(const DeltaVector& o) const {
    DeltaVector r = *this;
    for (size_t i = 0; i < bits.size(); ++i) r.bits[i] ^= o.bits[i];
    return r;
}

DeltaVector delta_difference(const std::map<Place, int>& shift,
                             const std::vector<Place>& V) {
    DeltaVector d;
    d.V = V;
    for (const Place& v : V) {
        auto it = shift.find(v);
        d.bits.push_back(it == shift.end() ? 0 : (it->second ? 1 : 0));
    }
    return d;
}

ZDescriptor derived_center(const EtaleF& F, const FElem& d, const Config& cfg) {
    // the twisted trace form q_a of E = F[x]/(x^2-d) has determinant class
    // (-1)^m N_{F/Q}(d) and rank 2m, so its discriminant class - which cuts
    // out the Clifford center - is N_{F/Q}(d)
    Rat n = 1;
    for (size_t j = 0; j < F.size(); ++j) n *= fe_norm(F[j], d[j]);
    SquareClass c = SquareClass::of(n, cfg);
    ZDescriptor z;
    z.split = c.is_one();
    z.disc = c.rep();
    return z;
}

Place check_star(const EtaleF& F, const FElem& d, const ZDescriptor& Z,
                 const std::set<Place>& avoid, const Config& cfg) {
    return find_checkpoint_place(F, d, !Z.split, Z.disc, avoid, cfg);
}

bool check_sharp(const EtaleF& F, const FElem& d, const QuaternionAlgebra& D,
                 const Config& cfg) {
    ZDescriptor Z = derived_center(F, d, cfg);
    for (const Place& v : D.ram) {
        if (!Z.split_at(v, cfg)) continue;
        bool nonsq = false;
        for (size_t j = 0; j < F.size() && !nonsq; ++j)
            for (const auto& w : ext_places(F[j], static_cast<int>(j), v, cfg))
                if (w.kind != ExtPlace::Kind::Complex &&
                    !is_ext_square(F[j], d[j], w, cfg)) {
                    nonsq = true;
                    break;
                }
        if (!nonsq) return false;
    }
    return true;
}

NonsplitCertificate nonsplit_global_a(const QuaternionAlgebra& D, int m, const EtaleF& F,
                                      const FElem& d, const std::map<Place, FElem>& pins,
                                      const std::set<Place>& twist_places,
                                      const Config& cfg) {
    EtaleInvolutionAlgebra A(F, d);
    if (A.dim_F() != m) throw domain_error("nonsplit_global_a: dim F != m");
    NonsplitCertificate cert;
    cert.Z = derived_center(F, d, cfg);

    if (!check_sharp(F, d, D, cfg))
        throw domain_error("nonsplit_global_a: condition (#) fails");
    for (const Place& v : twist_places)
        if (!D.ramified_at(v))
            throw domain_error("nonsplit_global_a: twist places must be ramified");

    // S = ram(D) ∪ {inf} ∪ twists ∪ given pins, with twist corrections applied
    std::set<Place> S(D.ram.begin(), D.ram.end());
    S.insert(Place::infinity());
    for (const auto& [v, pin] : pins) S.insert(v);
    for (const Place& v : twist_places) S.insert(v);

    std::map<Place, FElem> corrected;
    for (const Place& v : S) {
        auto it = pins.find(v);
        FElem c = it != pins.end() ? it->second : felem_one(F);
        if (twist_places.count(v)) {
            if (cert.Z.split_at(v, cfg)) {
                auto b = cor_flipper(A, v, cfg);
                if (!b)
                    throw domain_error(
                        "nonsplit_global_a: no corestriction flip at twist place " + v.str());
                cert.twist_corrections[v] = *b;
                c = felem_mul(F, c, *b);
            } else {
                // restriction to the field Z_v kills the twist: no correction
                cert.twist_corrections[v] = felem_one(F);
            }
        }
        corrected[v] = c;
        cert.pinned.push_back(v);
    }
    cert.corrected_pins = corrected;

    std::set<Place> avoid = S;
    cert.v0 = check_star(F, d, cert.Z, avoid, cfg);
    cert.a = solve_symbols_pinned_etale(F, d, corrected, cert.v0, cfg);

    // re-verify from scratch
    bool ok = true;
    for (const auto& [v, pin] : corrected) {
        for (size_t j = 0; j < F.size(); ++j) {
            FactorElem ratio = fe_mul(F[j], cert.a[j], fe_inv(F[j], pin[j]));
            for (const auto& w : ext_places(F[j], static_cast<int>(j), v, cfg))
                if (!is_ext_square(F[j], ratio, w, cfg)) ok = false;
        }
    }
    // corestriction symbols trivial outside S ∪ {v0}
    {
        std::vector<Rat> sup;
        for (size_t j = 0; j < F.size(); ++j) {
            sup.push_back(fe_norm(F[j], d[j]));
            sup.push_back(fe_norm(F[j], cert.a[j]));
            if (F[j].kind() == FieldFactor::Kind::Quadratic) sup.push_back(Rat(F[j].m()));
            for (const auto& c : d[j].c)
                if (c != 0) sup.push_back(c);
            for (const auto& c : cert.a[j].c)
                if (c != 0) sup.push_back(c);
        }
        for (const Place& v : support_places(sup, cfg)) {
            if (S.count(v) || v == cert.v0) continue;
            for (size_t j = 0; j < F.size(); ++j)
                for (const auto& w : ext_places(F[j], static_cast<int>(j), v, cfg)) {
                    if (w.kind == ExtPlace::Kind::Complex) continue;
                    if (ext_hilbert_symbol(F[j], cert.a[j], d[j], w, cfg) != 1) ok = false;
                }
        }
    }
    // delta difference over V vanishes: a agrees with each corrected pin up
    // to squares at every v in V, so the corestriction bits cancel
    for (const Place& v : D.ram)
        if (cert.Z.split_at(v, cfg)) cert.V.push_back(v);
    for (const Place& v : cert.V) {
        int bit_a = cor_term_symbols(A, cert.a, v, cfg) == -1 ? 1 : 0;
        int bit_c = cor_term_symbols(A, corrected.at(v), v, cfg) == -1 ? 1 : 0;
        cert.delta_bits.push_back(bit_a ^ bit_c);
    }
    for (int b : cert.delta_bits)
        if (b) ok = false;
    cert.verified = ok;
    if (!ok) throw domain_error("nonsplit_global_a: certificate verification failed");
    return cert;
}

// ---------- explicit splitting at an unramified place ----------

namespace {

struct Quat {
    Rat w, x, y, z;
};

Quat qmul(const QuaternionAlgebra& D, const Quat& p, const Quat& q) {
    Rat al(D.alpha), be(D.beta);
    return Quat{
        p.w * q.w + al * p.x * q.x + be * p.y * q.y - al * be * p.z * q.z,
        p.w * q.x + p.x * q.w - be * (p.y * q.z - p.z * q.y),
        p.w * q.y + p.y * q.w + al * (p.x * q.z - p.z * q.x),
        p.w * q.z + p.z * q.w + (p.x * q.y - p.y * q.x)};
}

Rat pure_square(const QuaternionAlgebra& D, const Rat& x, const Rat& y, const Rat& z) {
    return Rat(D.alpha) * x * x + Rat(D.beta) * y * y - Rat(D.alpha) * Rat(D.beta) * z * z;
}

} // namespace

SplitPlaceForm split_place_form(const SkewHermitianForm& h, const Place& v,
                                const Config& cfg) {
    const QuaternionAlgebra& D = h.D;
    if (D.ramified_at(v)) throw domain_error("split_place_form: place is ramified");
    SplitPlaceForm out;
    out.v = v;
    out.rank = 2 * h.dim();

    // find a pure e with e^2 = gamma a nonzero local square at v
    Rat gamma;
    Rat ex, ey, ez;
    bool found = false;
    for (int box = 1; box <= 12 && !found; ++box) {
        for (long x = -box; x <= box && !found; ++x)
            for (long y = -box; y <= box && !found; ++y)
                for (long z = -box; z <= box && !found; ++z) {
                    if (x == 0 && y == 0 && z == 0) continue;
                    if (std::max({labs(x), labs(y), labs(z)}) != box) continue;
                    Rat g = pure_square(D, Rat(x), Rat(y), Rat(z));
                    if (g == 0) continue;
                    if (v.is_real() ? g > 0 : is_local_square(g, v, cfg)) {
                        gamma = g;
                        ex = x; ey = y; ez = z;
                        found = true;
                    }
                }
    }
    if (!found) throw bound_exceeded("split_place_form: no splitting element", 12);

    // orthogonal complement of e in the pure part: alpha x x' + beta y y'
    // - alpha beta z z' = 0
    Rat c1 = Rat(D.alpha) * ex, c2 = Rat(D.beta) * ey, c3 = -Rat(D.alpha) * Rat(D.beta) * ez;
    std::vector<std::array<Rat, 3>> kernel;
    if (c1 != 0) {
        kernel.push_back({-c2 / c1, Rat(1), Rat(0)});
        kernel.push_back({-c3 / c1, Rat(0), Rat(1)});
    } else if (c2 != 0) {
        kernel.push_back({Rat(1), Rat(0), Rat(0)});
        kernel.push_back({Rat(0), -c3 / c2, Rat(1)});
    } else {
        kernel.push_back({Rat(1), Rat(0), Rat(0)});
        kernel.push_back({Rat(0), Rat(1), Rat(0)});
    }
    Rat jx, jy, jz, betap;
    bool jfound = false;
    for (long s = 0; s <= 4 && !jfound; ++s)
        for (long t = -4; t <= 4 && !jfound; ++t) {
            if (s == 0 && t == 0) continue;
            Rat X = Rat(s) * kernel[0][0] + Rat(t) * kernel[1][0];
            Rat Y = Rat(s) * kernel[0][1] + Rat(t) * kernel[1][1];
            Rat Z = Rat(s) * kernel[0][2] + Rat(t) * kernel[1][2];
            if (X == 0 && Y == 0 && Z == 0) continue;
            Rat b2 = pure_square(D, X, Y, Z);
            if (b2 == 0) continue;
            jx = X; jy = Y; jz = Z; betap = b2;
            jfound = true;
        }
    if (!jfound) throw bound_exceeded("split_place_form: no orthogonal complement", 4);

    // theta = sqrt(gamma) in L = Q(sqrt(squarefree part)) or in Q
    SquareClass gc = SquareClass::of(gamma, cfg);
    std::optional<FieldFactor> L;
    FactorElem theta{{Rat(0)}};
    if (gc.is_one()) {
        theta = FactorElem{{rational_sqrt(gamma)}};
    } else {
        L = FieldFactor::quadratic(gc.sign() * gc.squarefree_part());
        Rat scale = rational_sqrt(gamma / Rat(gc.sign() * gc.squarefree_part()));
        theta = FactorElem{{Rat(0), scale}};
    }
    out.L = L;
    FieldFactor field = L ? *L : FieldFactor::rational();

    // change of basis (1, i, j, k) -> (1, e, j', k'), k' = e j'
    Quat e{Rat(0), ex, ey, ez}, jp{Rat(0), jx, jy, jz};
    Quat kp = qmul(D, e, jp);
    if (kp.w != 0) throw domain_error("split_place_form: k' not pure");
    // solve for each entry q: q = c1 e + c2 j' + c3 k' (3x3 rational system)
    Mat Mb = {{e.x, jp.x, kp.x}, {e.y, jp.y, kp.y}, {e.z, jp.z, kp.z}};
    auto solve3 = [&](const PureQuaternion& q) {
        Mat A = Mb;
        std::vector<Rat> rhs = {q.x, q.y, q.z};
        // gauss
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            while (piv < 3 && A[static_cast<size_t>(piv)][static_cast<size_t>(col)] == 0) ++piv;
            if (piv == 3) throw domain_error("split_place_form: basis degenerate");
            std::swap(A[static_cast<size_t>(col)], A[static_cast<size_t>(piv)]);
            std::swap(rhs[static_cast<size_t>(col)], rhs[static_cast<size_t>(piv)]);
            for (int r = 0; r < 3; ++r) {
                if (r == col) continue;
                Rat f = A[static_cast<size_t>(r)][static_cast<size_t>(col)] /
                        A[static_cast<size_t>(col)][static_cast<size_t>(col)];
                for (int cc = 0; cc < 3; ++cc)
                    A[static_cast<size_t>(r)][static_cast<size_t>(cc)] -=
                        f * A[static_cast<size_t>(col)][static_cast<size_t>(cc)];
                rhs[static_cast<size_t>(r)] -= f * rhs[static_cast<size_t>(col)];
            }
        }
        return std::array<Rat, 3>{rhs[0] / A[0][0], rhs[1] / A[1][1], rhs[2] / A[2][2]};
    };

    // per entry, the symmetric 2x2 block J iota(q):
    //   [ beta' (c2 - c3 theta),  -c1 theta ]
    //   [ -c1 theta,              -(c2 + c3 theta) ]
    auto fe_rat = [&](const Rat& r) { return FactorElem::from_rat(field, r); };
    std::vector<FactorElem> diag;
    for (int i = 0; i < h.dim(); ++i) {
        auto c = solve3(h.entries[static_cast<size_t>(i)]);
        FactorElem c3theta = fe_scale(field, c[2], theta);
        FactorElem A11 = fe_scale(field, betap, fe_sub(field, fe_rat(c[1]), c3theta));
        FactorElem B = fe_scale(field, -c[0], theta);
        FactorElem A22 = fe_neg(field, fe_add(field, fe_rat(c[1]), c3theta));
        // congruence-diagonalize [[A11,B],[B,A22]]
        if (!A11.is_zero()) {
            // <A11, det/A11>, det = A11 A22 - B^2
            FactorElem det = fe_sub(field, fe_mul(field, A11, A22), fe_mul(field, B, B));
            diag.push_back(A11);
            diag.push_back(fe_mul(field, det, fe_inv(field, A11)));
        } else if (!A22.is_zero()) {
            FactorElem det = fe_sub(field, fe_mul(field, A11, A22), fe_mul(field, B, B));
            diag.push_back(A22);
            diag.push_back(fe_mul(field, det, fe_inv(field, A22)));
        } else {
            // [[0,B],[B,0]] ~ <B/2, -B/2>
            diag.push_back(fe_scale(field, Rat(1, 2), B));
            diag.push_back(fe_scale(field, Rat(-1, 2), B));
        }
    }
    out.diag = diag;

    // completion of L over v on the fixed copy
    auto ws = ext_places(field, 0, v, cfg);
    const ExtPlace& w = ws[0];
    if (L && w.kind != ExtPlace::Kind::SplitCopy && !v.is_real())
        throw domain_error("split_place_form: gamma must be a local square");

    FactorElem det_el = fe_rat(Rat(1));
    for (const auto& e2 : diag) det_el = fe_mul(field, det_el, e2);
    out.det_is_square_at_v = is_ext_square(field, det_el, w, cfg);
    int hval = 1;
    if (!v.is_real()) {
        for (size_t i = 0; i < diag.size(); ++i)
            for (size_t k = i + 1; k < diag.size(); ++k)
                hval *= ext_hilbert_symbol(field, diag[i], diag[k], w, cfg);
    }
    out.hasse_at_v = hval;

    // disc check: (-1)^m * det class vs disc_involution
    {
        FactorElem delta = fe_scale(field, h.dim() % 2 ? Rat(-1) : Rat(1), det_el);
        Rat target = disc_involution(h, cfg).rep();
        FactorElem ratio = fe_mul(field, delta, fe_rat(Rat(1) / target));
        out.disc_matches_involution = is_ext_square(field, ratio, w, cfg);
    }

    if (v.is_real()) {
        int pos = 0, neg = 0;
        for (const auto& e2 : diag)
            (fe_sign_at(field, e2, w.copy) > 0 ? pos : neg)++;
        out.signature = {pos, neg};
        out.witt_index_at_v = std::min(pos, neg);
    } else {
        // witt index from (rank, det, hasse) over the completion
        int rank = out.rank;
        FactorElem det = det_el;
        int hh = hval;
        int index = 0;
        auto is_sq = [&](const FactorElem& x) { return is_ext_square(field, x, w, cfg); };
        auto sym = [&](const FactorElem& x, const FactorElem& y) {
            return ext_hilbert_symbol(field, x, y, w, cfg);
        };
        FactorElem minus1 = fe_rat(Rat(-1));
        while (rank >= 2) {
            bool iso;
            FactorElem mdet = fe_neg(field, det);
            if (rank >= 5) iso = true;
            else if (rank == 4) iso = !is_sq(det) || hh == sym(minus1, minus1);
            else if (rank == 3) iso = hh == sym(minus1, mdet);
            else iso = is_sq(mdet);
            if (!iso) break;
            hh *= sym(minus1, mdet);
            det = mdet;
            rank -= 2;
            ++index;
        }
        out.witt_index_at_v = index;
    }
    return out;
}

} // namespace emb

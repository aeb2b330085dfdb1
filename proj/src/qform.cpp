#include "emb/qform.hpp"

#include <algorithm>
#include <set>

#include "emb/solvers.hpp"

namespace emb {

std::string QuadraticForm::str() const {
    std::string s = "<";
    for (size_t i = 0; i < diag.size(); ++i) {
        if (i) s += ",";
        s += diag[i].get_str();
    }
    return s + ">";
}

QuadraticForm diagonalize(const Mat& G) {
    size_t n = G.size();
    if (n == 0) throw domain_error("diagonalize: empty matrix");
    for (const auto& row : G)
        if (row.size() != n) throw domain_error("diagonalize: not square");
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < i; ++j)
            if (G[i][j] != G[j][i]) throw domain_error("diagonalize: not symmetric");

    Mat A = G;
    std::vector<Rat> diag;
    // congruence pivoting on the leading block
    for (size_t k = 0; k < n; ++k) {
        // bring a nonzero entry to A[k][k]
        if (A[k][k] == 0) {
            size_t i = k;
            while (i < n && A[i][i] == 0) ++i;
            if (i < n) {
                std::swap(A[i], A[k]);
                for (auto& row : A) std::swap(row[i], row[k]);
            } else {
                // all remaining diagonal entries vanish
                size_t r = k, c = k;
                bool found = false;
                for (size_t ii = k; ii < n && !found; ++ii)
                    for (size_t jj = ii + 1; jj < n && !found; ++jj)
                        if (A[ii][jj] != 0) { r = ii; c = jj; found = true; }
                if (!found) throw domain_error("diagonalize: singular matrix");
                // add row/col c into row/col r: new (r,r) entry is 2 A[r][c]
                for (size_t j = k; j < n; ++j) A[r][j] += A[c][j];
                for (size_t i2 = k; i2 < n; ++i2) A[i2][r] += A[i2][c];
                std::swap(A[r], A[k]);
                for (auto& row : A) std::swap(row[r], row[k]);
            }
        }
        if (A[k][k] == 0) throw domain_error("diagonalize: singular matrix");
        for (size_t i = k + 1; i < n; ++i) {
            if (A[i][k] == 0) continue;
            Rat t = A[i][k] / A[k][k];
            for (size_t j = k; j < n; ++j) A[i][j] -= t * A[k][j];
            for (size_t j2 = k; j2 < n; ++j2) A[j2][i] -= t * A[j2][k];
        }
        diag.push_back(A[k][k]);
    }
    return QuadraticForm(diag);
}

LocalInvariants invariants(const QuadraticForm& q, const Config& cfg) {
    LocalInvariants inv;
    inv.rank = q.rank();
    Rat det(1);
    for (const auto& a : q.diag) {
        det *= a;
        if (a > 0) ++inv.sig_pos;
        else ++inv.sig_neg;
    }
    inv.det = SquareClass::of(det, cfg);
    long n = q.rank();
    Rat disc = (n * (n - 1) / 2) % 2 ? -det : det;
    inv.disc = SquareClass::of(disc, cfg);
    for (const Place& v : support_places(q.diag, cfg)) {
        int h = 1;
        for (size_t i = 0; i < q.diag.size(); ++i)
            for (size_t j = i + 1; j < q.diag.size(); ++j)
                h *= hilbert_symbol(q.diag[i], q.diag[j], v, cfg);
        inv.hasse[v] = h;
    }
    return inv;
}

QuadraticForm scale(const QuadraticForm& q, const Rat& lambda, const Config& cfg) {
    if (lambda == 0) throw domain_error("scale: zero scalar");
    std::vector<Rat> d;
    for (const auto& a : q.diag) d.push_back(lambda * a);
    QuadraticForm s(d);

    // invariant law check against recomputation
    LocalInvariants iq = invariants(q, cfg), is = invariants(s, cfg);
    Rat ln(1);
    for (int i = 0; i < q.rank(); ++i) ln *= lambda;
    if (!(SquareClass::of(ln * iq.det.rep(), cfg) == is.det))
        throw domain_error("scale: determinant law failed");
    std::vector<Rat> all = q.diag;
    all.push_back(lambda);
    for (const Place& v : support_places(all, cfg)) {
        int expect = hilbert_symbol(lambda, iq.disc.rep(), v, cfg) * iq.hasse_at(v);
        if (is.hasse_at(v) != expect)
            throw domain_error("scale: hasse scaling law failed at " + v.str());
    }
    return s;
}

bool locally_equivalent(const QuadraticForm& q1, const QuadraticForm& q2, const Place& v,
                        const Config& cfg) {
    if (q1.rank() != q2.rank()) return false;
    LocalInvariants i1 = invariants(q1, cfg), i2 = invariants(q2, cfg);
    if (v.is_real()) return i1.sig_pos == i2.sig_pos;
    return is_local_square(i1.det.rep() / i2.det.rep(), v, cfg) &&
           i1.hasse_at(v) == i2.hasse_at(v);
}

bool globally_equivalent(const QuadraticForm& q1, const QuadraticForm& q2,
                         const Config& cfg) {
    if (q1.rank() != q2.rank()) return false;
    LocalInvariants i1 = invariants(q1, cfg), i2 = invariants(q2, cfg);
    if (!(i1.det == i2.det) || i1.sig_pos != i2.sig_pos) return false;
    std::set<Place> sup;
    for (const auto& [v, h] : i1.hasse) sup.insert(v);
    for (const auto& [v, h] : i2.hasse) sup.insert(v);
    for (const Place& v : sup)
        if (i1.hasse_at(v) != i2.hasse_at(v)) return false;
    return true;
}

namespace {

// isotropy over Q_v from (rank, det class, hasse)
bool locally_isotropic(int rank, const Rat& det, int hasse, const Place& v,
                       const Config& cfg) {
    if (v.is_real()) throw domain_error("locally_isotropic: finite places only");
    if (rank >= 5) return true;
    switch (rank) {
        case 4:
            return !is_local_square(det, v, cfg) ||
                   hasse == hilbert_symbol(-1, -1, v, cfg);
        case 3: return hasse == hilbert_symbol(-1, -det, v, cfg);
        case 2: return is_local_square(-det, v, cfg);
        default: return false;
    }
}

} // namespace

bool represents(const QuadraticForm& q, const Rat& c, const std::optional<Place>& v,
                const Config& cfg) {
    if (c == 0) throw domain_error("represents: zero value");
    if (!v) {
        std::vector<Rat> all = q.diag;
        all.push_back(c);
        for (const Place& w : support_places(all, cfg))
            if (!represents(q, c, w, cfg)) return false;
        return true;
    }
    if (v->is_real()) {
        LocalInvariants iq = invariants(q, cfg);
        return c > 0 ? iq.sig_pos > 0 : iq.sig_neg > 0;
    }
    if (q.rank() >= 4) return true;
    // c represented iff q ⊥ <-c> is isotropic
    std::vector<Rat> d = q.diag;
    d.push_back(-c);
    QuadraticForm ext(d);
    LocalInvariants ie = invariants(ext, cfg);
    return locally_isotropic(ext.rank(), ie.det.rep(), ie.hasse_at(*v), *v, cfg);
}

int local_witt_index(const QuadraticForm& q, const Place& v, const Config& cfg) {
    LocalInvariants iq = invariants(q, cfg);
    if (v.is_real()) return std::min(iq.sig_pos, iq.sig_neg);
    int rank = iq.rank;
    Rat det = iq.det.rep();
    int h = iq.hasse_at(v);
    int index = 0;
    // split hyperbolic planes: q = H ⊥ q' has d(q') = -d(q) and
    // h(q') = h(q) (-1, -d(q))_v
    while (rank >= 2 && locally_isotropic(rank, det, h, v, cfg)) {
        h *= hilbert_symbol(-1, -det, v, cfg);
        det = -det;
        rank -= 2;
        ++index;
    }
    return index;
}

namespace {

// rank <= 2 per-place realizability of (det, hasse)
void check_low_rank_constraints(int n, const SquareClass& det,
                                const std::map<Place, int>& hasse, const Config& cfg) {
    if (n == 1) {
        for (const auto& [v, h] : hasse)
            if (h != 1)
                throw domain_error("build_form_with_invariants: rank 1 needs all hasse +1");
    }
    if (n == 2) {
        for (const auto& [v, h] : hasse)
            if (h == -1 && is_local_square(-det.rep(), v, cfg))
                throw domain_error(
                    "build_form_with_invariants: rank 2 with hasse -1 needs -det "
                    "nonsquare at " + v.str());
    }
}

// <w, w d>: rank-2 form with determinant class d and (w, -d)_v = h_v
QuadraticForm build_binary(const SquareClass& det, const std::map<Place, int>& hasse,
                           int neg_count, const Config& cfg) {
    Rat d = det.rep();
    std::map<Place, int> targets;
    std::vector<Rat> sup{d, Rat(2)};
    for (const auto& [v, h] : hasse) {
        if (v.is_finite()) sup.push_back(Rat(v.prime()));
    }
    for (const Place& v : support_places(sup, cfg)) {
        auto it = hasse.find(v);
        int want = it == hasse.end() ? 1 : it->second;
        if (v.is_real()) continue;
        targets[v] = want;
    }
    // archimedean: sign pattern of <w, wd> must give neg_count negatives
    // (consistency with det sign was checked by the caller)
    int want_inf = 1;
    {
        auto it = hasse.find(Place::infinity());
        if (it != hasse.end()) want_inf = it->second;
    }
    targets[Place::infinity()] = want_inf;

    Rat w0;
    try {
        w0 = prescribe_symbols(-d, targets, cfg);
    } catch (const domain_error&) {
        throw domain_error("build_form_with_invariants: rank-2 symbol data infeasible");
    }
    for (const Rat& w : {w0, Rat(-w0)}) {
        QuadraticForm cand({w, w * d});
        LocalInvariants ic = invariants(cand, cfg);
        if (ic.sig_neg != neg_count) continue;
        if (!(ic.det == SquareClass::of(d, cfg))) continue;
        bool ok = true;
        for (const auto& [v, h] : ic.hasse) {
            auto it = hasse.find(v);
            int want = it == hasse.end() ? 1 : it->second;
            if (h != want) { ok = false; break; }
        }
        for (const auto& [v, h] : hasse)
            if (ic.hasse_at(v) != h) { ok = false; break; }
        if (ok) return cand;
    }
    throw domain_error("build_form_with_invariants: rank-2 construction failed");
}

} // namespace

QuadraticForm build_form_with_invariants(int n, const SquareClass& det,
                                         const std::map<Place, int>& hasse_in,
                                         std::pair<int, int> signature,
                                         const Config& cfg) {
    auto [pos, neg] = signature;
    if (n < 1) throw domain_error("build_form_with_invariants: rank must be positive");
    if (pos < 0 || neg < 0 || pos + neg != n)
        throw domain_error("build_form_with_invariants: signature incompatible with rank");
    if (det.sign() != (neg % 2 ? -1 : 1))
        throw domain_error("build_form_with_invariants: determinant sign vs signature");

    std::map<Place, int> hasse = hasse_in;
    int h_inf = (neg * (neg - 1) / 2) % 2 ? -1 : 1;
    auto it_inf = hasse.find(Place::infinity());
    if (it_inf != hasse.end() && it_inf->second != h_inf)
        throw domain_error("build_form_with_invariants: real hasse vs signature");
    hasse[Place::infinity()] = h_inf;

    int prod = 1;
    for (const auto& [v, h] : hasse) {
        if (h != 1 && h != -1)
            throw domain_error("build_form_with_invariants: hasse value not a sign");
        prod *= h;
    }
    if (prod != 1)
        throw domain_error("build_form_with_invariants: hasse product formula violated");
    check_low_rank_constraints(n, det, hasse, cfg);

    if (n == 1) {
        QuadraticForm q({det.rep()});
        return q;
    }
    if (n == 2) return build_binary(det, hasse, neg, cfg);

    // peel signature entries down to a ternary core: q = <a> ⊥ r with
    // d(r) = a d, h_r(v) = h(v) (a, a d)_v
    std::vector<Rat> peeled;
    SquareClass dcur = det;
    std::map<Place, int> hcur = hasse;
    int pcur = pos, ncur = neg;
    auto peel = [&](const Rat& a) {
        peeled.push_back(a);
        SquareClass dnext = SquareClass::of(a * dcur.rep(), cfg);
        std::map<Place, int> hnext;
        std::set<Place> sup;
        std::vector<Rat> supdata{a, dcur.rep(), Rat(2)};
        for (const auto& [v, h] : hcur) sup.insert(v);
        for (const Place& v : support_places(supdata, cfg)) sup.insert(v);
        for (const Place& v : sup) {
            auto it = hcur.find(v);
            int h = it == hcur.end() ? 1 : it->second;
            int hn = h * hilbert_symbol(a, a * dcur.rep(), v, cfg);
            if (hn != 1 || it != hcur.end()) hnext[v] = hn;
        }
        hcur = hnext;
        dcur = dnext;
        if (a > 0) --pcur;
        else --ncur;
    };
    while (pcur + ncur > 3) {
        // keep at least one slot of each needed sign for the core
        if (pcur > 0 && (ncur <= 3)) peel(Rat(1));
        else peel(Rat(-1));
    }

    // ternary core: search a1 so the remaining binary block is feasible
    std::vector<Rat> cand_pool = {Rat(1), Rat(-1)};
    {
        std::vector<Rat> supdata{dcur.rep(), Rat(2)};
        for (const auto& [v, h] : hcur)
            if (v.is_finite()) supdata.push_back(Rat(v.prime()));
        for (const Place& v : support_places(supdata, cfg))
            if (v.is_finite()) {
                cand_pool.push_back(Rat(v.prime()));
                cand_pool.push_back(Rat(-v.prime()));
            }
        // a few composite candidates
        size_t base = cand_pool.size();
        for (size_t i = 2; i < base && i < 8; ++i)
            for (size_t j = i + 1; j < base && j < 8; ++j) {
                Rat prodc = cand_pool[i] * cand_pool[j];
                cand_pool.push_back(prodc);
                cand_pool.push_back(-prodc);
            }
    }
    for (const Rat& a1 : cand_pool) {
        if ((a1 > 0 && pcur == 0) || (a1 < 0 && ncur == 0)) continue;
        SquareClass d2 = SquareClass::of(a1 * dcur.rep(), cfg);
        // binary h-targets: h2(v) = hcur(v) * (a1, a1 dcur)_v
        std::map<Place, int> h2;
        std::set<Place> sup;
        std::vector<Rat> supdata{a1, dcur.rep(), Rat(2)};
        for (const auto& [v, h] : hcur) sup.insert(v);
        for (const Place& v : support_places(supdata, cfg)) sup.insert(v);
        bool feasible = true;
        for (const Place& v : sup) {
            auto it = hcur.find(v);
            int h = it == hcur.end() ? 1 : it->second;
            int hn = h * hilbert_symbol(a1, a1 * dcur.rep(), v, cfg);
            h2[v] = hn;
            if (v.is_finite() && hn == -1 && is_local_square(-d2.rep(), v, cfg))
                feasible = false;
        }
        if (!feasible) continue;
        int n2 = a1 > 0 ? ncur : ncur - 1;
        try {
            QuadraticForm tail = build_binary(d2, h2, n2, cfg);
            std::vector<Rat> d = peeled;
            d.push_back(a1);
            d.insert(d.end(), tail.diag.begin(), tail.diag.end());
            QuadraticForm q(d);
            // final verification against the requested data
            LocalInvariants iq = invariants(q, cfg);
            if (!(iq.det == det) || iq.sig_pos != pos || iq.sig_neg != neg) continue;
            bool ok = true;
            for (const auto& [v, h] : iq.hasse) {
                auto it = hasse.find(v);
                if ((it == hasse.end() ? 1 : it->second) != h) { ok = false; break; }
            }
            for (const auto& [v, h] : hasse)
                if (iq.hasse_at(v) != h) { ok = false; break; }
            if (ok) return q;
        } catch (const domain_error&) {
            continue;
        }
    }
    throw domain_error("build_form_with_invariants: no realization found");
}

std::optional<Rat> similar(const QuadraticForm& f, const QuadraticForm& g,
                           const Config& cfg) {
    if (f.rank() != g.rank()) return std::nullopt;
    int n = f.rank();
    LocalInvariants fi = invariants(f, cfg), gi = invariants(g, cfg);

    if (n % 2) {
        Rat lambda = gi.det.rep() / fi.det.rep();
        QuadraticForm lf = scale(f, lambda, cfg);
        if (globally_equivalent(lf, g, cfg)) return SquareClass::of(lambda, cfg).rep();
        return std::nullopt;
    }

    // even rank: determinants must already agree
    if (!(fi.det == gi.det)) return std::nullopt;
    Rat delta = fi.disc.rep();

    std::set<Place> sup;
    for (const auto& [v, h] : fi.hasse) sup.insert(v);
    for (const auto& [v, h] : gi.hasse) sup.insert(v);

    if (fi.disc.is_one()) {
        // scaling cannot move any hasse symbol
        for (const Place& v : sup)
            if (v.is_finite() && fi.hasse_at(v) != gi.hasse_at(v)) return std::nullopt;
        for (const Rat& lambda : {Rat(1), Rat(-1)}) {
            if (globally_equivalent(scale(f, lambda, cfg), g, cfg)) return lambda;
        }
        return std::nullopt;
    }

    // disc nonsquare: fix mismatches with (lambda, delta)_v = -1 via the
    // pinned symbol solver, escape place from a Chebotarev search
    std::map<Place, Rat> pins;
    std::map<Place, int> targets;
    // archimedean pin: lambda sign must map signature of f onto g
    if (fi.sig_pos == gi.sig_pos && fi.sig_neg == gi.sig_neg) {
        pins[Place::infinity()] = Rat(1);
    } else if (fi.sig_pos == gi.sig_neg && fi.sig_neg == gi.sig_pos) {
        pins[Place::infinity()] = Rat(-1);
    } else {
        return std::nullopt;
    }
    for (const Place& v : sup) {
        if (!v.is_finite()) continue;
        if (fi.hasse_at(v) == gi.hasse_at(v)) {
            targets[v] = 1;
            continue;
        }
        if (is_local_square(delta, v, cfg)) return std::nullopt; // not even locally similar
        targets[v] = -1;
    }
    std::set<Place> avoid = sup;
    avoid.insert(Place::infinity());
    Place v0 = Place::infinity();
    try {
        EtaleF F = {FieldFactor::rational()};
        FElem t = {FactorElem::from_rat(F[0], delta)};
        v0 = find_checkpoint_place(F, t, false, Rat(0), avoid, cfg);
    } catch (const bound_exceeded&) {
        return std::nullopt;
    }
    // balance the product at the escape place
    int prod = hilbert_symbol(pins[Place::infinity()], delta, Place::infinity(), cfg);
    for (const auto& [v, e] : targets) prod *= e;
    if (prod == -1) targets[v0] = -1;
    try {
        Rat lambda = solve_symbols_pinned(delta, targets, pins, cfg);
        if (globally_equivalent(scale(f, lambda, cfg), g, cfg))
            return SquareClass::of(lambda, cfg).rep();
    } catch (const domain_error&) {
    } catch (const bound_exceeded&) {
    }
    return std::nullopt;
}

} // namespace emb

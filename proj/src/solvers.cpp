#include "emb/solvers.hpp"

#include <algorithm>
#include <cassert>

namespace emb {

FElem felem_one(const EtaleF& F) {
    FElem e;
    for (const auto& f : F) e.push_back(FactorElem::from_rat(f, 1));
    return e;
}

FElem felem_from_rats(const EtaleF& F, const std::vector<Rat>& xs) {
    if (xs.size() != F.size()) throw domain_error("felem_from_rats: arity mismatch");
    FElem e;
    for (size_t j = 0; j < F.size(); ++j) e.push_back(FactorElem::from_rat(F[j], xs[j]));
    return e;
}

FElem felem_mul(const EtaleF& F, const FElem& x, const FElem& y) {
    FElem r;
    for (size_t j = 0; j < F.size(); ++j) r.push_back(fe_mul(F[j], x[j], y[j]));
    return r;
}

FElem felem_inv(const EtaleF& F, const FElem& x) {
    FElem r;
    for (size_t j = 0; j < F.size(); ++j) r.push_back(fe_inv(F[j], x[j]));
    return r;
}

bool felem_invertible(const EtaleF& F, const FElem& x) {
    for (size_t j = 0; j < F.size(); ++j)
        if (fe_norm(F[j], x[j]) == 0) return false;
    return true;
}

namespace {

// all symbols (a,x)_w on the joint support match the targets (+1 default)
bool verify_symbols(const Rat& a, const Rat& x, const std::map<Place, int>& targets,
                    const Config& cfg) {
    for (const Place& w : support_places({a, x}, cfg)) {
        auto it = targets.find(w);
        int want = it == targets.end() ? 1 : it->second;
        if (hilbert_symbol(a, x, w, cfg) != want) return false;
    }
    for (const auto& [v, want] : targets)
        if (hilbert_symbol(a, x, v, cfg) != want) return false;
    return true;
}

// can (a, unit)_v = -1 be arranged at v by choosing the unit?
bool unit_flippable(const Rat& a, const Place& v) {
    if (v.is_real()) return false;
    const Int& p = v.prime();
    long val = val_at(a, p);
    if (p != 2) return val % 2 != 0;
    if (val % 2) return true;
    // (a, u)_2 = (-1)^{eps(a_u) eps(u)}: controllable iff a_u = 3 mod 4
    Rat u = unit_part(a, p);
    Int num = u.get_num(), den = u.get_den();
    while (num % 2 == 0) num /= 2;
    while (den % 2 == 0) den /= 2;
    Int r = num * den % 4;
    if (r < 0) r += 4;
    return r == 3;
}

} // namespace

Rat prescribe_symbols(const Rat& a, const std::map<Place, int>& targets,
                      const Config& cfg) {
    if (a == 0) throw domain_error("prescribe_symbols: zero input");
    int prod = 1;
    for (const auto& [v, e] : targets) {
        if (e != 1 && e != -1) throw domain_error("prescribe_symbols: target not a sign");
        prod *= e;
        if (e == -1 && is_local_square(a, v, cfg))
            throw domain_error("prescribe_symbols: infeasible, " + v.str() +
                               " target -1 where a is a local square");
    }
    if (prod != 1)
        throw domain_error("prescribe_symbols: infeasible, product of targets is -1");

    // base set: support of a plus all targeted finite places
    std::vector<Place> S = support_places({a}, cfg);
    for (const auto& [v, e] : targets)
        if (std::find(S.begin(), S.end(), v) == S.end()) S.push_back(v);
    std::vector<Int> Sp; // finite primes of S
    for (const auto& v : S)
        if (v.is_finite()) Sp.push_back(v.prime());
    std::sort(Sp.begin(), Sp.end());

    auto want_at = [&](const Place& v) {
        auto it = targets.find(v);
        return it == targets.end() ? 1 : it->second;
    };

    long tried = 0;
    size_t nbits = Sp.size();
    if (nbits > 20) throw bound_exceeded("prescribe_symbols: support too large", 1 << 20);

    // phase 0: x = sign * (subset of support primes)
    for (unsigned long mask = 0; mask < (1ul << nbits); ++mask) {
        for (int sign : {1, -1}) {
            if (++tried > cfg.witness_cap)
                throw bound_exceeded("prescribe_symbols: witness search", cfg.witness_cap);
            Rat x(sign);
            for (size_t i = 0; i < nbits; ++i)
                if (mask & (1ul << i)) x *= Rat(Sp[i]);
            if (verify_symbols(a, x, targets, cfg)) return x;
        }
    }

    // phase 1: x = sign * subset * q with one auxiliary prime q
    for (unsigned long mask = 0; mask < (1ul << nbits); ++mask) {
        for (int sign : {1, -1}) {
            Rat x0(sign);
            for (size_t i = 0; i < nbits; ++i)
                if (mask & (1ul << i)) x0 *= Rat(Sp[i]);
            // residuals an auxiliary unit prime must reach
            bool feasible = true;
            std::vector<std::pair<Place, int>> need;
            for (const Place& v : S) {
                int r = want_at(v) * hilbert_symbol(a, x0, v, cfg);
                if (v.is_real()) {
                    if (r != 1) { feasible = false; break; }
                    continue;
                }
                if (r == -1 && !unit_flippable(a, v)) { feasible = false; break; }
                need.emplace_back(v, r);
            }
            if (!feasible) continue;
            try {
                Int q = next_prime_such_that(2, cfg.aux_prime_cap, [&](const Int& qq) {
                    if (std::find(Sp.begin(), Sp.end(), qq) != Sp.end()) return false;
                    Rat x = x0 * Rat(qq);
                    for (const auto& [v, r] : need)
                        if (hilbert_symbol(a, x, v, cfg) != want_at(v)) return false;
                    return hilbert_symbol(a, x, Place::finite(qq), cfg) == 1;
                });
                Rat x = x0 * Rat(q);
                if (verify_symbols(a, x, targets, cfg)) return x;
            } catch (const bound_exceeded&) {
                // next subset
            }
            if (++tried > cfg.witness_cap)
                throw bound_exceeded("prescribe_symbols: witness search", cfg.witness_cap);
        }
    }
    throw bound_exceeded("prescribe_symbols: witness search", cfg.witness_cap);
}

namespace {

// spanning candidates for F_w^x / squares at a single completion; pairing
// against all of them pins the square class exactly
std::vector<FactorElem> class_candidates(const FieldFactor& f, const ExtPlace& w,
                                         const Config& cfg) {
    std::vector<FactorElem> out;
    auto push_rat = [&](const Rat& r) { out.push_back(FactorElem::from_rat(f, r)); };
    if (w.base.is_real()) {
        push_rat(Rat(-1));
        return out;
    }
    if (w.kind == ExtPlace::Kind::SplitCopy) {
        for (const Rat& r : local_square_class_reps(w.base)) push_rat(r);
        return out;
    }
    const Int& p = w.base.prime();
    if (f.kind() != FieldFactor::Kind::Quadratic) {
        for (const Rat& r : local_square_class_reps(w.base)) push_rat(r);
        return out;
    }
    if (p != 2) {
        if (w.kind == ExtPlace::Kind::Inert) {
            // {1, e, p, ep} with e a nonsquare unit of F_{p^2}
            FactorElem e{{Rat(0), Rat(1)}};
            for (Int x = 0; x < p; ++x) {
                FactorElem cand{{Rat(x), Rat(1)}};
                if (!is_ext_square(f, cand, w, cfg)) { e = cand; break; }
            }
            out = {e, FactorElem::from_rat(f, Rat(p)), fe_scale(f, Rat(p), e)};
            return out;
        }
        // ramified: {u, sqrt(m), u sqrt(m)} with u a nonresidue mod p
        Int u = 2;
        while (legendre(u, p) != -1) ++u;
        FactorElem sm{{Rat(0), Rat(1)}};
        out = {FactorElem::from_rat(f, Rat(u)), sm, fe_scale(f, Rat(u), sm)};
        return out;
    }
    // dyadic nonsplit: a pool that spans the 16-element class group
    for (int t : {-1, 2, 5, 3, 7, -2})
        push_rat(Rat(t));
    for (int c0 : {0, 1, 2, 3, -1})
        for (int c1 : {1, -1}) {
            FactorElem e{{Rat(c0), Rat(c1)}};
            if (!e.is_zero() && fe_norm(f, e) != 0) out.push_back(e);
        }
    return out;
}

} // namespace

std::optional<FactorElem> symbol_flipper(const FieldFactor& f, const FactorElem& d,
                                         const ExtPlace& w, const Config& cfg) {
    if (is_ext_square(f, d, w, cfg)) return std::nullopt;
    for (const auto& cand : class_candidates(f, w, cfg))
        if (ext_hilbert_symbol(f, cand, d, w, cfg) == -1) return cand;
    // d is a nonsquare, so the pairing against d is a nontrivial character and
    // some spanning class must flip; reaching here means the pool was short
    throw bound_exceeded("symbol_flipper: class pool did not span", 32);
}

Rat solve_symbols_pinned(const Rat& t, const std::map<Place, int>& targets,
                         const std::map<Place, Rat>& pins, const Config& cfg) {
    if (t == 0) throw domain_error("solve_symbols_pinned: zero input");
    std::map<Place, int> full = targets;
    for (const auto& [v, sv] : pins) {
        if (sv == 0) throw domain_error("solve_symbols_pinned: zero pin");
        int alpha = hilbert_symbol(sv, t, v, cfg);
        auto it = full.find(v);
        if (it != full.end() && it->second != alpha)
            throw domain_error("solve_symbols_pinned: pin at " + v.str() +
                               " inconsistent with target");
        full[v] = alpha;
    }

    auto pins_ok = [&](const Rat& s) {
        for (const auto& [v, sv] : pins)
            if (!is_local_square(s / sv, v, cfg)) return false;
        return true;
    };

    if (SquareClass::of(t, cfg).is_one()) {
        for (const auto& [v, e] : full)
            if (e == -1)
                throw domain_error("solve_symbols_pinned: t is a square, target -1 infeasible");
        if (pins.empty()) return Rat(1);
        // match the pin classes by a signed product over a small prime pool
        std::vector<Rat> data{t};
        for (const auto& [v, sv] : pins) {
            data.push_back(sv);
            if (v.is_finite()) data.push_back(Rat(v.prime()));
        }
        std::vector<Int> pool;
        for (const Place& v : support_places(data, cfg))
            if (v.is_finite()) pool.push_back(v.prime());
        size_t nbits = std::min<size_t>(pool.size(), 16);
        for (unsigned long mask = 0; mask < (1ul << nbits); ++mask)
            for (int sign : {1, -1}) {
                Rat s(sign);
                for (size_t i = 0; i < nbits; ++i)
                    if (mask & (1ul << i)) s *= Rat(pool[i]);
                if (pins_ok(s)) return s;
            }
        throw bound_exceeded("solve_symbols_pinned: pin matching", 1l << nbits);
    }

    Rat s0 = prescribe_symbols(t, full, cfg);
    if (pins_ok(s0) && verify_symbols(t, s0, full, cfg)) return s0;

    // adjust by a norm from Q(sqrt t): preserves every symbol (z, t)_v = 1
    long b = 1;
    for (long box = 2; box <= 64; box *= 2) {
        for (long x = -box; x <= box; ++x) {
            for (long y = -box; y <= box; ++y) {
                for (long den : {1l, 2l, 3l}) {
                    if (++b > cfg.witness_cap)
                        throw bound_exceeded("solve_symbols_pinned: norm adjustment",
                                             cfg.witness_cap);
                    Rat xx(x, den), yy(y, den);
                    Rat z = xx * xx - t * yy * yy;
                    if (z == 0) continue;
                    Rat s = s0 / z;
                    if (!pins_ok(s)) continue;
                    if (verify_symbols(t, s, full, cfg)) return s;
                }
            }
        }
    }
    throw bound_exceeded("solve_symbols_pinned: norm adjustment", cfg.witness_cap);
}

namespace {

struct FactorProblem {
    const FieldFactor& f;
    int index;
    FactorElem t;
    std::map<Place, FactorElem> pins; // per-place pin components
    Place v0;
};

// all conditions for one factor: pins up to squares, symbols +1 at every
// completion over support places outside pins ∪ {v0}
bool verify_factor(const FactorProblem& P, const FactorElem& s, const Config& cfg) {
    if (fe_norm(P.f, s) == 0) return false;
    for (const auto& [v, pin] : P.pins) {
        FactorElem ratio = fe_mul(P.f, s, fe_inv(P.f, pin));
        for (const auto& w : ext_places(P.f, P.index, v, cfg)) {
            if (w.kind == ExtPlace::Kind::Complex) continue;
            if (!is_ext_square(P.f, ratio, w, cfg)) return false;
        }
    }
    std::vector<Rat> sup = {fe_norm(P.f, P.t), fe_norm(P.f, s)};
    if (P.f.kind() == FieldFactor::Kind::Quadratic) sup.push_back(Rat(P.f.m()));
    if (P.f.kind() == FieldFactor::Kind::Biquadratic) {
        sup.push_back(Rat(P.f.a()));
        sup.push_back(Rat(P.f.b()));
    }
    for (const auto& e : {P.t, s})
        for (const auto& c : e.c)
            if (c != 0) sup.push_back(c);
    for (const Place& v : support_places(sup, cfg)) {
        if (v == P.v0 || P.pins.count(v)) continue;
        for (const auto& w : ext_places(P.f, P.index, v, cfg)) {
            if (w.kind == ExtPlace::Kind::Complex) continue;
            if (ext_hilbert_symbol(P.f, s, P.t, w, cfg) != 1) return false;
        }
    }
    return true;
}

// Solve the factor problem by GF(2) linear algebra over a pool of generators
// with known, smooth support. Every requirement - matching a pin class at a
// completion, or a trivial symbol against t - is a linear condition on the
// exponent vector of the generators, read off through Hilbert pairings.
FactorElem solve_factor(const FactorProblem& P, const Config& cfg) {
    const FieldFactor& f = P.f;

    std::vector<FactorElem> gens = {FactorElem::from_rat(f, -1)};
    std::vector<Rat> supdata = {fe_norm(f, P.t)};
    if (f.kind() == FieldFactor::Kind::Quadratic) {
        supdata.push_back(Rat(f.m()));
        gens.push_back(FactorElem{{Rat(0), Rat(1)}}); // sqrt(m)
    }
    if (f.kind() == FieldFactor::Kind::Biquadratic) {
        supdata.push_back(Rat(f.a()));
        supdata.push_back(Rat(f.b()));
    }
    for (const auto& c : P.t.c)
        if (c != 0) supdata.push_back(c);
    for (const auto& [v, pin] : P.pins)
        if (v.is_finite()) supdata.push_back(Rat(v.prime()));
    std::set<Int> base_primes;
    for (const Place& v : support_places(supdata, cfg))
        if (v.is_finite()) base_primes.insert(v.prime());
    for (const Int& p : base_primes) gens.push_back(FactorElem::from_rat(f, Rat(p)));

    // elements with asymmetric behaviour at the split completions of the
    // pinned and support places; their norms must stay smooth so that the
    // final verification can enumerate their support
    if (f.kind() == FieldFactor::Kind::Quadratic) {
        Config small = cfg;
        small.factor_bound = 100000;
        int kept = 0;
        for (long x = 1; x <= 16 && kept < 10; ++x)
            for (long y = 1; y <= 8 && kept < 10; ++y) {
                FactorElem e{{Rat(x), Rat(y)}};
                Rat n = fe_norm(f, e);
                if (n == 0) continue;
                bool smooth = true;
                std::vector<std::pair<Int, int>> fac;
                try {
                    fac = factor(n.get_num(), small);
                } catch (const bound_exceeded&) {
                    smooth = false;
                }
                if (!smooth) continue;
                Int big = 1;
                for (const auto& [p, ee] : fac) big = std::max(big, p);
                if (big > 50000) continue;
                // keep elements whose valuations hit the base primes oddly
                bool useful = false;
                for (const auto& [p, ee] : fac)
                    if (base_primes.count(p) && ee % 2) useful = true;
                if (useful || kept < 4) {
                    gens.push_back(e);
                    ++kept;
                }
            }
    }

    auto solve_round = [&](const std::vector<FactorElem>& pool)
        -> std::optional<FactorElem> {
        // condition places: pins and the union of the supports, minus v0
        std::set<Place> places;
        std::vector<Rat> alldata = supdata;
        for (const auto& g : pool) {
            Rat n = fe_norm(f, g);
            if (n != 0) alldata.push_back(n);
            for (const auto& c : g.c)
                if (c != 0) alldata.push_back(c);
        }
        for (const Place& v : support_places(alldata, cfg)) places.insert(v);
        for (const auto& [v, pin] : P.pins) places.insert(v);
        places.erase(P.v0);

        // rows: [pairing bits of pool elements], rhs
        std::vector<std::vector<int>> rows;
        std::vector<int> rhs;
        auto add_condition = [&](const ExtPlace& w, const FactorElem& u, int target_bit) {
            std::vector<int> row;
            for (const auto& g : pool)
                row.push_back(ext_hilbert_symbol(f, g, u, w, cfg) == -1 ? 1 : 0);
            rows.push_back(row);
            rhs.push_back(target_bit);
        };
        for (const Place& v : places) {
            auto ws = ext_places(f, P.index, v, cfg);
            auto pin_it = P.pins.find(v);
            for (const auto& w : ws) {
                if (w.kind == ExtPlace::Kind::Complex) continue;
                if (pin_it != P.pins.end()) {
                    for (const auto& u : class_candidates(f, w, cfg)) {
                        int bit = ext_hilbert_symbol(f, pin_it->second, u, w, cfg) == -1;
                        add_condition(w, u, bit);
                    }
                } else {
                    if (fe_is_square(f, P.t, cfg)) continue; // symbols trivially +1
                    add_condition(w, P.t, 0);
                }
            }
        }

        // gaussian elimination over GF(2)
        size_t ncols = pool.size(), nrows = rows.size();
        std::vector<int> pivot_col;
        size_t rank = 0;
        for (size_t col = 0; col < ncols && rank < nrows; ++col) {
            size_t piv = rank;
            while (piv < nrows && !rows[piv][col]) ++piv;
            if (piv == nrows) continue;
            std::swap(rows[rank], rows[piv]);
            std::swap(rhs[rank], rhs[piv]);
            for (size_t i = 0; i < nrows; ++i) {
                if (i != rank && rows[i][col]) {
                    for (size_t j = 0; j < ncols; ++j) rows[i][j] ^= rows[rank][j];
                    rhs[i] ^= rhs[rank];
                }
            }
            pivot_col.push_back(static_cast<int>(col));
            ++rank;
        }
        for (size_t i = rank; i < nrows; ++i)
            if (rhs[i]) return std::nullopt; // inconsistent
        std::vector<int> e(ncols, 0);
        for (size_t i = 0; i < rank; ++i)
            e[static_cast<size_t>(pivot_col[i])] = rhs[i];
        FactorElem s = FactorElem::from_rat(f, 1);
        for (size_t g = 0; g < ncols; ++g)
            if (e[g]) s = fe_mul(f, s, pool[g]);
        return s;
    };

    std::vector<FactorElem> pool = gens;
    std::set<Int> used_aux;
    Int q = 2;
    for (int round = 0; round < 40; ++round) {
        if (auto s = solve_round(pool)) {
            if (verify_factor(P, *s, cfg)) return *s;
        }
        // extend the pool by the next auxiliary prime
        do {
            mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
        } while (base_primes.count(q) || used_aux.count(q));
        used_aux.insert(q);
        pool.push_back(FactorElem::from_rat(f, Rat(q)));
    }
    throw bound_exceeded("solve_symbols_pinned_etale: no solution over the generator pool",
                         40);
}

} // namespace

FElem solve_symbols_pinned_etale(const EtaleF& F, const FElem& t,
                                 const std::map<Place, FElem>& pins, const Place& v0,
                                 const Config& cfg) {
    if (F.size() != t.size()) throw domain_error("solve_symbols_pinned_etale: arity");
    if (!felem_invertible(F, t))
        throw domain_error("solve_symbols_pinned_etale: t not invertible");
    for (const auto& [v, pin] : pins)
        if (!felem_invertible(F, pin))
            throw domain_error("solve_symbols_pinned_etale: pin not invertible");
    if (pins.count(v0))
        throw domain_error("solve_symbols_pinned_etale: v0 must lie outside the pins");

    // escape-place hypothesis: every globally-nonsquare component must stay a
    // nonsquare in some completion over v0
    for (size_t j = 0; j < F.size(); ++j) {
        if (fe_is_square(F[j], t[j], cfg)) continue;
        bool ok = false;
        for (const auto& w : ext_places(F[j], static_cast<int>(j), v0, cfg))
            if (w.kind != ExtPlace::Kind::Complex && !is_ext_square(F[j], t[j], w, cfg)) {
                ok = true;
                break;
            }
        if (!ok)
            throw domain_error("solve_symbols_pinned_etale: component " + std::to_string(j) +
                               " is a square at the escape place " + v0.str());
    }

    FElem s;
    for (size_t j = 0; j < F.size(); ++j) {
        std::map<Place, FactorElem> pins_j;
        for (const auto& [v, pin] : pins) pins_j.emplace(v, pin[j]);
        FactorProblem P{F[j], static_cast<int>(j), t[j], pins_j, v0};
        s.push_back(solve_factor(P, cfg));
    }
    return s;
}

Place find_checkpoint_place(const EtaleF& F, const FElem& t, bool want_z_constraint,
                            const Rat& z_disc, const std::set<Place>& avoid,
                            const Config& cfg) {
    // globally nonsquare components
    std::vector<size_t> active;
    for (size_t j = 0; j < F.size(); ++j)
        if (!fe_is_square(F[j], t[j], cfg)) active.push_back(j);

    // stay tame: skip 2, the avoid set, and everything in the support
    std::set<Int> skip{Int(2)};
    for (const auto& v : avoid)
        if (v.is_finite()) skip.insert(v.prime());
    std::vector<Rat> sup;
    for (size_t j = 0; j < F.size(); ++j) {
        if (F[j].kind() == FieldFactor::Kind::Quadratic) sup.push_back(Rat(F[j].m()));
        if (F[j].kind() == FieldFactor::Kind::Biquadratic) {
            sup.push_back(Rat(F[j].a()));
            sup.push_back(Rat(F[j].b()));
        }
        Rat n = fe_norm(F[j], t[j]);
        if (n != 0) sup.push_back(n);
        for (const auto& c : t[j].c)
            if (c != 0) sup.push_back(c);
    }
    if (want_z_constraint && z_disc != 0) sup.push_back(z_disc);
    for (const Place& v : support_places(sup, cfg))
        if (v.is_finite()) skip.insert(v.prime());

    Int p = 2;
    for (long i = 0; i < cfg.checkpoint_prime_cap; ++i) {
        mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
        if (skip.count(p)) continue;
        Place v = Place::finite(p);
        bool ok = true;
        if (want_z_constraint && is_local_square(z_disc, v, cfg)) ok = false;
        for (size_t idx = 0; ok && idx < active.size(); ++idx) {
            size_t j = active[idx];
            bool nonsq = false;
            for (const auto& w : ext_places(F[j], static_cast<int>(j), v, cfg))
                if (!is_ext_square(F[j], t[j], w, cfg)) { nonsq = true; break; }
            if (!nonsq) ok = false;
        }
        if (ok) return v;
    }
    throw bound_exceeded("find_checkpoint_place: prime search", cfg.checkpoint_prime_cap);
}

} // namespace emb

#include "emb/split_embed.hpp"

#include <algorithm>

namespace emb {

namespace {

std::vector<Place> problem_support(const SplitEmbeddingProblem& P, const QuadraticForm& q1,
                                   const Config& cfg) {
    std::vector<Rat> data = q1.diag;
    data.insert(data.end(), P.target.diag.begin(), P.target.diag.end());
    return support_places(data, cfg);
}

} // namespace

LocalWitness local_embed_test(const SplitEmbeddingProblem& P, const Place& v,
                              const Config& cfg) {
    if (P.plus_unit_factor)
        throw domain_error("local_embed_test: reduce odd problems first");
    const auto& A = P.source;
    QuadraticForm q1 = trace_form(A, felem_one(A.F), cfg);
    LocalInvariants i1 = invariants(q1, cfg), it = invariants(P.target, cfg);

    LocalWitness out;
    if (v.is_real()) {
        for (const FElem& a : real_sign_patterns(A.F)) {
            LocalInvariants ia = invariants(trace_form(A, a, cfg), cfg);
            if (ia.sig_pos == it.sig_pos) {
                out.ok = true;
                out.a = a;
                return out;
            }
        }
        out.reason = "signature unreachable from the trace form";
        return out;
    }

    if (!is_local_square(i1.det.rep() / it.det.rep(), v, cfg)) {
        out.reason = "determinant class mismatch";
        return out;
    }
    if (i1.hasse_at(v) == it.hasse_at(v)) {
        out.ok = true;
        out.a = felem_one(A.F);
        return out;
    }
    // need a local element flipping the corestriction symbol at v; with
    // d(q_a) = d(q_1) and h_v(q_a) = h_v(q_1) cor_v(a), any flip gives the
    // local equivalence
    if (auto a = cor_flipper(A, v, cfg)) {
        out.ok = true;
        out.a = a;
        return out;
    }
    out.reason = "hasse invariant not flippable";
    return out;
}

SplitEmbeddingProblem odd_reduction(const SplitEmbeddingProblem& P, const Config& cfg) {
    if (!P.plus_unit_factor || P.target.rank() % 2 == 0)
        throw domain_error("odd_reduction: needs an odd problem of shape E' x Q");
    const auto& A = P.source;
    QuadraticForm q1 = trace_form(A, felem_one(A.F), cfg);
    LocalInvariants i1 = invariants(q1, cfg), it = invariants(P.target, cfg);

    // alpha = d / d', the forced square class of the peeled entry
    Rat alpha = SquareClass::of(it.det.rep() / i1.det.rep(), cfg).rep();
    if (!represents(P.target, alpha, std::nullopt, cfg)) {
        // name a failing place for the caller
        std::vector<Rat> data = P.target.diag;
        data.push_back(alpha);
        for (const Place& v : support_places(data, cfg))
            if (!represents(P.target, alpha, v, cfg))
                throw odd_reduction_failure(v, "peeled value not represented at " + v.str());
        throw odd_reduction_failure(Place::infinity(),
                                    "peeled value not represented (place not isolated)");
    }

    // Witt-cancel <alpha>: q' with q' perp <alpha> equivalent to the target
    SquareClass dprime = SquareClass::of(it.det.rep() / alpha, cfg);
    std::map<Place, int> hasse;
    std::vector<Rat> data = P.target.diag;
    data.push_back(alpha);
    for (const Place& v : support_places(data, cfg)) {
        if (v.is_real()) continue;
        hasse[v] = it.hasse_at(v) * hilbert_symbol(dprime.rep(), alpha, v, cfg);
    }
    int pos = it.sig_pos - (alpha > 0 ? 1 : 0);
    int neg = it.sig_neg - (alpha < 0 ? 1 : 0);
    QuadraticForm reduced = build_form_with_invariants(P.target.rank() - 1, dprime, hasse,
                                                       {pos, neg}, cfg);
    std::vector<Rat> recheck = reduced.diag;
    recheck.push_back(alpha);
    if (!globally_equivalent(QuadraticForm(recheck), P.target, cfg))
        throw domain_error("odd_reduction: cancellation verification failed");
    return SplitEmbeddingProblem(A, reduced, false);
}

namespace {

// bounded witness search: sign patterns times small prime multiples
std::optional<FElem> witness_search(const SplitEmbeddingProblem& P,
                                    const std::vector<Place>& support, const Config& cfg) {
    const auto& A = P.source;
    std::vector<Rat> primes{Rat(1)};
    for (const Place& v : support)
        if (v.is_finite()) primes.push_back(Rat(v.prime()));
    size_t np = primes.size();
    std::vector<std::vector<Rat>> scalings; // per-factor scaling choices
    for (size_t i = 0; i < np; ++i)
        for (size_t k = i; k < np; ++k) scalings.push_back({primes[i] * primes[k]});
    std::vector<Rat> flat;
    for (auto& s : scalings) flat.push_back(s[0]);
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());

    long tried = 0;
    auto patterns = real_sign_patterns(A.F);
    // iterate over per-factor scalings (cartesian, capped)
    size_t r = A.F.size();
    std::vector<size_t> idx(r, 0);
    while (true) {
        for (const auto& pat : patterns) {
            FElem a = pat;
            for (size_t j = 0; j < r; ++j)
                a[j] = fe_scale(A.F[j], flat[idx[j]], a[j]);
            if (++tried > cfg.witness_cap) return std::nullopt;
            bool inv = true;
            for (size_t j = 0; j < r; ++j)
                if (fe_norm(A.F[j], a[j]) == 0) inv = false;
            if (!inv) continue;
            if (globally_equivalent(trace_form(A, a, cfg), P.target, cfg)) return a;
        }
        size_t j = 0;
        while (j < r && ++idx[j] == flat.size()) idx[j++] = 0;
        if (j == r) return std::nullopt;
    }
}

} // namespace

ObstructionReport global_embed(const SplitEmbeddingProblem& P, const Config& cfg) {
    ObstructionReport rep;
    if (P.plus_unit_factor) {
        std::optional<SplitEmbeddingProblem> reduced;
        try {
            reduced = odd_reduction(P, cfg);
        } catch (const odd_reduction_failure& e) {
            rep.verdict = ObstructionReport::Verdict::LocallyObstructed;
            rep.bad_place = e.v;
            rep.reason = e.what();
            return rep;
        }
        ObstructionReport sub = global_embed(*reduced, cfg);
        if (sub.verdict == ObstructionReport::Verdict::Embeds) {
            // witness on E' x Q: the unit slot carries the peeled value
            LocalInvariants it = invariants(P.target, cfg);
            LocalInvariants ir = invariants(reduced->target, cfg);
            sub.witness_unit = SquareClass::of(it.det.rep() / ir.det.rep(), cfg).rep();
        }
        return sub;
    }

    const auto& A = P.source;
    QuadraticForm q1 = trace_form(A, felem_one(A.F), cfg);
    LocalInvariants i1 = invariants(q1, cfg), it = invariants(P.target, cfg);
    std::vector<Place> support = problem_support(P, q1, cfg);

    for (const Place& v : support) {
        LocalWitness lw = local_embed_test(P, v, cfg);
        rep.local_table[v] = lw;
        if (!lw.ok) {
            rep.verdict = ObstructionReport::Verdict::LocallyObstructed;
            rep.bad_place = v;
            rep.reason = lw.reason + " at " + v.str();
            return rep;
        }
    }

    // construction under the checkpoint condition: pin the bad places and
    // keep all other corestriction symbols trivial
    std::set<Place> avoid(support.begin(), support.end());
    std::optional<Place> v0;
    try {
        v0 = find_checkpoint_place(A.F, A.d, false, Rat(0), avoid, cfg);
    } catch (const bound_exceeded& e) {
        rep.bound = e.bound;
    }
    if (v0) {
        std::map<Place, FElem> pins;
        for (const Place& v : support) {
            bool bad = v.is_real() || i1.hasse_at(v) != it.hasse_at(v);
            if (bad) pins[v] = *rep.local_table[v].a;
        }
        try {
            FElem a = solve_symbols_pinned_etale(A.F, A.d, pins, *v0, cfg);
            if (globally_equivalent(trace_form(A, a, cfg), P.target, cfg)) {
                rep.verdict = ObstructionReport::Verdict::Embeds;
                rep.witness = a;
                return rep;
            }
        } catch (const bound_exceeded& e) {
            rep.bound = e.bound;
        }
    }

    // no checkpoint place (or the solver gave out): bounded direct search
    if (auto a = witness_search(P, support, cfg)) {
        rep.verdict = ObstructionReport::Verdict::Embeds;
        rep.witness = a;
        return rep;
    }
    rep.bound = rep.bound ? rep.bound : cfg.witness_cap;

    // two-prime parity pattern?
    if (A.F.size() == 2) {
        int rational = -1, quad = -1;
        for (int j = 0; j < 2; ++j) {
            if (A.F[static_cast<size_t>(j)].kind() == FieldFactor::Kind::Rational) rational = j;
            if (A.F[static_cast<size_t>(j)].kind() == FieldFactor::Kind::Quadratic) quad = j;
        }
        if (rational >= 0 && quad >= 0 && A.d[static_cast<size_t>(rational)].is_rational() &&
            A.d[static_cast<size_t>(quad)].is_rational()) {
            Rat d0 = A.d[static_cast<size_t>(rational)].c[0];
            Rat d1 = A.d[static_cast<size_t>(quad)].c[0];
            if (d0.get_den() == 1 && d1.get_den() == 1 &&
                d0.get_num() == A.F[static_cast<size_t>(quad)].m()) {
                std::set<Place> flips;
                for (const Place& v : support)
                    if (v.is_finite() && i1.hasse_at(v) != it.hasse_at(v)) flips.insert(v);
                if (auto cert = parity_obstruction(d0.get_num(), d1.get_num(), flips, cfg)) {
                    rep.verdict = ObstructionReport::Verdict::GloballyObstructed;
                    rep.certificate = cert;
                    rep.reason = "parity obstruction certificate";
                    return rep;
                }
            }
        }
    }
    rep.verdict = ObstructionReport::Verdict::Undecided;
    rep.reason = "no witness within bound, no obstruction certificate applies";
    return rep;
}

std::optional<ParityCertificate> parity_obstruction(const Int& p1, const Int& p2,
                                                    const std::set<Place>& flips,
                                                    const Config& cfg) {
    ParityCertificate cert;
    cert.p1 = p1;
    cert.p2 = p2;
    if (!is_prime(p1) || !is_prime(p2) || p1 == p2) return std::nullopt;
    if (p1 % 4 != 1 || p2 % 4 != 1) return std::nullopt;
    if (p1 % 8 != 1 && p2 % 8 != 1) return std::nullopt;
    if (legendre(p1, p2) != 1 || legendre(p2, p1) != 1) return std::nullopt;
    if (flips != std::set<Place>{Place::finite(p1), Place::finite(p2)}) return std::nullopt;
    // Q(sqrt p1, sqrt p2) unramified outside {p1, p2}: both generators are
    // 1 mod 4 so the dyadic place stays unramified; odd places outside
    // {p1, p2} do not divide p1 p2
    for (const Int& gen : {p1, p2, Int(p1 * p2)}) {
        auto ws = ext_places(FieldFactor::quadratic(gen), 0, Place::finite(2), cfg);
        if (ws[0].kind == ExtPlace::Kind::Ramified) return std::nullopt;
    }
    cert.hypotheses_ok = true;

    Place vp1 = Place::finite(p1), vp2 = Place::finite(p2), two = Place::finite(2);
    // any global witness a = (a1, a2) must satisfy (a1, p1)_{p1} = -1: the
    // second factor contributes nothing because p2 is a square there
    if (!is_local_square(Rat(p2), vp1, cfg)) return std::nullopt;
    cert.facts.push_back("p2 is a square in Q_{p1}: the flip at p1 forces (a1,p1)_{p1} = -1");
    // product formula then forces (a1, p1)_v = -1 at a second place v, and
    // that place cannot be p2, the real place, or (given the 8k+1 condition) a
    // place where the contradiction fails
    if (!is_local_square(Rat(p1), vp2, cfg)) return std::nullopt;
    cert.facts.push_back("p1 is a square in Q_{p2}: the second bad place is not p2");
    cert.facts.push_back("p1 > 0: the second bad place is not the real place");
    if (p1 % 8 == 1) {
        if (!is_local_square(Rat(p1), two, cfg)) return std::nullopt;
        cert.facts.push_back("p1 = 1 mod 8: the second bad place is not 2");
    } else {
        if (!is_local_square(Rat(p2), two, cfg)) return std::nullopt;
        cert.facts.push_back(
            "p2 = 1 mod 8: p2 is a square in every completion of Q(sqrt p1) over 2, so "
            "the contradiction also holds at 2");
    }
    // at any other place v with p1 a nonsquare, F = Q(sqrt p1, sqrt p2) being
    // unramified at v makes p2 a square in Q(sqrt p1) ⊗ Q_v, so the
    // corestriction flips there against h_v(q_a) = h_v(q): verified on a sample
    FieldFactor f2 = FieldFactor::quadratic(p1);
    FactorElem p2e = FactorElem::from_rat(f2, Rat(p2));
    Int v = 2;
    while (v < cfg.sample_bound) {
        mpz_nextprime(v.get_mpz_t(), v.get_mpz_t());
        if (v == p1 || v == p2) continue;
        Place pv = Place::finite(v);
        if (is_local_square(Rat(p1), pv, cfg)) continue;
        for (const auto& w : ext_places(f2, 0, pv, cfg))
            if (!is_ext_square(f2, p2e, w, cfg)) return std::nullopt;
        cert.sampled_places.push_back(v);
    }
    cert.facts.push_back(
        "sampled odd places with p1 nonsquare: p2 is a square in Q(sqrt p1) ⊗ Q_v, "
        "so no second bad place exists; the flip at p1 is impossible");
    cert.verified = true;
    return cert;
}

} // namespace emb

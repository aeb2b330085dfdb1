#include "emb/extsymbols.hpp"

#include <set>

namespace emb {

namespace {

// odd primes where a symbol over Q(sqrt m) can be nontrivial for the
// given elements: divisors of m, of the element norms, and of the
// coordinate denominators
std::vector<Int> quad_symbol_support(const FieldFactor& f, const FactorElem& a,
                                     const FactorElem& b, const Config& cfg) {
    std::vector<Rat> xs = {Rat(f.m()), fe_norm(f, a), fe_norm(f, b)};
    for (const auto& e : {a, b})
        for (const auto& c : e.c)
            if (c != 0) xs.push_back(Rat(1, c.get_den()));
    return odd_support(xs, cfg);
}

int tame_symbol(const FieldFactor& f, const FactorElem& a, const FactorElem& b,
                const ExtPlace& w, const Config& cfg) {
    const Int& p = w.base.prime();
    long alpha = ext_val(f, a, w, cfg), beta = ext_val(f, b, w, cfg);
    int s = 1;
    if (alpha % 2 || beta % 2) {
        if (beta % 2) s *= ext_unit_character(f, a, w, cfg);
        if (alpha % 2) s *= ext_unit_character(f, b, w, cfg);
    }
    if ((alpha % 2) && (beta % 2)) {
        // character of -1 in the residue field: trivial when |k| = p^2
        bool inert = w.residue_q == p * p;
        if (!inert && p % 4 == 3) s = -s;
    }
    return s;
}

} // namespace

int ext_hilbert_symbol(const FieldFactor& f, const FactorElem& a, const FactorElem& b,
                       const ExtPlace& w, const Config& cfg) {
    if (a.is_zero() || b.is_zero())
        throw domain_error("ext_hilbert_symbol: zero argument");

    if (w.kind == ExtPlace::Kind::Complex) return 1;
    if (w.base.is_real())
        return (fe_sign_at(f, a, w.copy) < 0 && fe_sign_at(f, b, w.copy) < 0) ? -1 : 1;

    // scalars in a quadratic-type completion of a biquadratic factor:
    // same local field as the corresponding quadratic field, so delegate
    if (f.kind() == FieldFactor::Kind::Biquadratic) {
        if (w.kind == ExtPlace::Kind::SplitCopy && w.local_degree == 1) {
            if (a.is_rational() && b.is_rational())
                return hilbert_symbol(a.c[0], b.c[0], w.base, cfg);
            Rat ra = split_copy_class_rep(f, a, w, cfg);
            Rat rb = split_copy_class_rep(f, b, w, cfg);
            return hilbert_symbol(ra, rb, w.base, cfg);
        }
        if (w.local_degree == 4)
            throw unsupported_error("unsupported-extension-symbol: quartic local factor at " +
                                    w.str());
        if (!a.is_rational() || !b.is_rational())
            throw unsupported_error(
                "unsupported-extension-symbol: irrational biquadratic arguments at " + w.str());
        bool sa = is_local_square(Rat(f.a()), w.base, cfg);
        FieldFactor g = FieldFactor::quadratic(sa ? f.b() : f.a());
        auto ws = ext_places(g, w.factor_index, w.base, cfg);
        return ext_hilbert_symbol(g, FactorElem::from_rat(g, a.c[0]),
                                  FactorElem::from_rat(g, b.c[0]), ws.at(0), cfg);
    }

    if (f.kind() == FieldFactor::Kind::Rational)
        return hilbert_symbol(a.c[0], b.c[0], w.base, cfg);

    // quadratic factor
    if (w.kind == ExtPlace::Kind::SplitCopy) {
        Rat ra = split_copy_class_rep(f, a, w, cfg);
        Rat rb = split_copy_class_rep(f, b, w, cfg);
        return hilbert_symbol(ra, rb, w.base, cfg);
    }
    if (!w.base.is_dyadic()) return tame_symbol(f, a, b, w, cfg);

    // nonsplit dyadic place: Hilbert reciprocity over Q(sqrt m).
    // The dyadic place is unique here, so its symbol is the product of the
    // symbols at all other places (tame + archimedean), which are computable.
    int prod = 1;
    for (int e = 0; e < f.real_embeddings(); ++e)
        if (fe_sign_at(f, a, e) < 0 && fe_sign_at(f, b, e) < 0) prod = -prod;
    for (const Int& p : quad_symbol_support(f, a, b, cfg)) {
        for (const auto& wp : ext_places(f, w.factor_index, Place::finite(p), cfg)) {
            if (wp.kind == ExtPlace::Kind::SplitCopy) {
                Rat ra = split_copy_class_rep(f, a, wp, cfg);
                Rat rb = split_copy_class_rep(f, b, wp, cfg);
                prod *= hilbert_symbol(ra, rb, wp.base, cfg);
            } else {
                prod *= tame_symbol(f, a, b, wp, cfg);
            }
        }
    }
    return prod;
}

bool dyadic_nonsplit_quad_square(const FieldFactor& f, const FactorElem& x,
                                 const Config& cfg) {
    const Place two = Place::finite(2);
    auto ws = ext_places(f, 0, two, cfg);
    if (ws.size() != 1 || ws[0].kind == ExtPlace::Kind::SplitCopy)
        throw domain_error("dyadic_nonsplit_quad_square: dyadic place not unique");
    const ExtPlace& w = ws[0];

    // |F_w^x / squares| = 2^(2 + [F_w:Q_2]) = 16: find four classes with a
    // full-rank Hilbert pairing matrix, then test x against them.
    std::vector<FactorElem> cands;
    for (int t : {-1, 2, 5, -2, 3, 7, 6, -5, -3, 10})
        cands.push_back(FactorElem::from_rat(f, Rat(t)));
    for (int c0 : {0, 1, 2, 3, -1})
        for (int c1 : {1, -1}) {
            FactorElem e{{Rat(c0), Rat(c1)}};
            if (!e.is_zero() && fe_norm(f, e) != 0) cands.push_back(e);
        }

    auto pair_bit = [&](const FactorElem& u, const FactorElem& v) {
        return ext_hilbert_symbol(f, u, v, w, cfg) == -1 ? 1 : 0;
    };
    // The candidate classes span F_w^x / squares iff their pairing matrix has
    // rank 4 over F_2 (the pairing is nondegenerate modulo squares).
    size_t n = cands.size();
    std::vector<std::vector<int>> m(n, std::vector<int>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j <= i; ++j) m[i][j] = m[j][i] = pair_bit(cands[i], cands[j]);
    size_t rank = 0;
    for (size_t col = 0; col < n && rank < n; ++col) {
        size_t piv = rank;
        while (piv < n && !m[piv][col]) ++piv;
        if (piv == n) continue;
        std::swap(m[rank], m[piv]);
        for (size_t i = 0; i < n; ++i)
            if (i != rank && m[i][col])
                for (size_t j = 0; j < n; ++j) m[i][j] ^= m[rank][j];
        ++rank;
    }
    if (rank != 4)
        throw bound_exceeded("dyadic_nonsplit_quad_square: candidate classes do not span",
                             static_cast<long>(n));
    // x is a square iff it pairs trivially with a spanning set
    for (const auto& t : cands)
        if (ext_hilbert_symbol(f, x, t, w, cfg) == -1) return false;
    return true;
}

} // namespace emb

#include "emb/places.hpp"

#include <algorithm>
#include <set>

namespace emb {

Place Place::finite(const Int& p) {
    if (p < 2 || !is_prime(p))
        throw domain_error("Place: " + p.get_str() + " is not prime");
    Place v;
    v.finite_ = true;
    v.p_ = p;
    return v;
}

const Int& Place::prime() const {
    if (!finite_) throw domain_error("Place: real place has no prime");
    return p_;
}

Place Place::parse(const std::string& s) {
    if (s == "inf" || s == "oo" || s == "infinity") return infinity();
    return finite(Int(s));
}

SquareClass SquareClass::of(const Rat& a, const Config& cfg) {
    if (a == 0) throw domain_error("SquareClass: zero input");
    Int n = a.get_num() * a.get_den(); // same class as a
    int sign = n < 0 ? -1 : 1;
    Int sf = 1;
    for (const auto& [p, e] : factor(abs(n), cfg))
        if (e % 2) sf *= p;
    return SquareClass(sign, sf);
}

SquareClass SquareClass::times(const SquareClass& o, const Config& cfg) const {
    return SquareClass::of(rep() * o.rep(), cfg);
}

namespace {

// exponents in the dyadic unit group: u = (-1)^eps(u) 5^omega(u) mod squares
int eps2(const Int& u) { // (u-1)/2 mod 2, u odd
    Int r = ((u - 1) / 2) % 2;
    return r == 0 ? 0 : 1;
}
int omega2(const Int& u) { // (u^2-1)/8 mod 2, u odd
    Int r = ((u * u - 1) / 8) % 2;
    return r == 0 ? 0 : 1;
}

// odd integer congruent to the unit part of a mod 2^k (k <= 3 needed)
Int dyadic_unit(const Rat& a) {
    Int num = a.get_num(), den = a.get_den();
    while (num % 2 == 0) num /= 2;
    while (den % 2 == 0) den /= 2;
    // num/den mod 8: den odd, invert mod 8
    Int d8 = den % 8;
    if (d8 < 0) d8 += 8;
    Int inv;
    mpz_invert(inv.get_mpz_t(), d8.get_mpz_t(), Int(8).get_mpz_t());
    Int u = (num % 8) * inv % 8;
    if (u <= 0) u += 8;
    return u;
}

} // namespace

int hilbert_symbol(const Rat& a, const Rat& b, const Place& v, const Config& cfg) {
    if (a == 0 || b == 0) throw domain_error("hilbert_symbol: zero argument");
    if (v.is_real()) return (a < 0 && b < 0) ? -1 : 1;
    const Int& p = v.prime();
    long alpha = val_at(a, p), beta = val_at(b, p);
    if (p == 2) {
        Int u = dyadic_unit(a), w = dyadic_unit(b);
        long e = Int(eps2(u) * eps2(w) + alpha * omega2(w) + beta * omega2(u)).get_si();
        return e % 2 ? -1 : 1;
    }
    // tame formula: (-1)^{alpha beta (p-1)/2} (u/p)^beta (w/p)^alpha
    Rat ua = unit_part(a, p), ub = unit_part(b, p);
    // unit parts are p-adic units given as rationals with p-free num/den;
    // (x/y / p) = (x/p)(y/p) since y is invertible mod p
    auto legendre_rat = [&p](const Rat& x) {
        return legendre(x.get_num(), p) * legendre(x.get_den(), p);
    };
    int s = 1;
    if ((alpha % 2) && (beta % 2) && (p % 4 == 3)) s = -s;
    if (beta % 2) s *= legendre_rat(ua);
    if (alpha % 2) s *= legendre_rat(ub);
    return s;
}

bool is_local_square(const Rat& a, const Place& v, const Config& cfg) {
    if (a == 0) throw domain_error("is_local_square: zero input");
    if (v.is_real()) return a > 0;
    const Int& p = v.prime();
    long val = val_at(a, p);
    if (val % 2) return false;
    if (p == 2) return dyadic_unit(a) == 1;
    Rat u = unit_part(a, p);
    return legendre(u.get_num(), p) * legendre(u.get_den(), p) == 1;
}

std::vector<Rat> local_square_class_reps(const Place& v) {
    if (v.is_real()) return {Rat(1), Rat(-1)};
    const Int& p = v.prime();
    if (p == 2) return {Rat(1), Rat(-1), Rat(2), Rat(-2), Rat(5), Rat(-5), Rat(10), Rat(-10)};
    Int u = 2;
    while (legendre(u, p) != -1) ++u;
    return {Rat(1), Rat(u), Rat(p), Rat(u * p)};
}

std::vector<Place> support_places(const std::vector<Rat>& xs, const Config& cfg) {
    std::set<Int> ps{Int(2)};
    for (const auto& x : xs) {
        if (x == 0) continue;
        for (const Int& part : {Int(x.get_num()), Int(x.get_den())})
            for (const auto& [p, e] : factor(part, cfg)) ps.insert(p);
    }
    std::vector<Place> out;
    for (const auto& p : ps) out.push_back(Place::finite(p));
    out.push_back(Place::infinity());
    return out;
}

} // namespace emb

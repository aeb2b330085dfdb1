#include "emb/numtheory.hpp"

#include <algorithm>
#include <set>

namespace emb {

bool is_prime(const Int& n) {
    if (n < 2) return false;
    // 50 rounds of mpz_probab_prime_p start with BPSW; no composite below
    // 2^64 passes, and our inputs stay far below that.
    int r = mpz_probab_prime_p(n.get_mpz_t(), 50);
    return r > 0;
}

std::vector<std::pair<Int, int>> factor(const Int& n, const Config& cfg) {
    if (n == 0) throw domain_error("factor: zero input");
    std::vector<std::pair<Int, int>> out;
    Int m = abs(n);
    for (Int p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (p > cfg.factor_bound)
            throw bound_exceeded("factor: trial division limit on " + m.get_str(),
                                 cfg.factor_bound);
        if (m % p == 0) {
            int e = 0;
            while (m % p == 0) { m /= p; ++e; }
            out.emplace_back(p, e);
        }
    }
    if (m > 1) out.emplace_back(m, 1);
    return out;
}

int jacobi(const Int& a, const Int& n) {
    return mpz_jacobi(a.get_mpz_t(), n.get_mpz_t());
}

int legendre(const Int& a, const Int& p) {
    return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

long val_at(const Rat& a, const Int& p) {
    if (a == 0) throw domain_error("val_at: zero input");
    Int num = a.get_num(), den = a.get_den();
    long v = 0;
    while (num % p == 0) { num /= p; ++v; }
    while (den % p == 0) { den /= p; --v; }
    return v;
}

Rat unit_part(const Rat& a, const Int& p) {
    long v = val_at(a, p);
    Rat pw(pow_int(p, static_cast<unsigned long>(v >= 0 ? v : -v)));
    Rat r = v >= 0 ? Rat(a / pw) : Rat(a * pw);
    r.canonicalize();
    return r;
}

std::vector<Int> odd_support(const std::vector<Rat>& xs, const Config& cfg) {
    std::set<Int> ps;
    for (const auto& x : xs) {
        if (x == 0) continue;
        for (const Int& part : {Int(x.get_num()), Int(x.get_den())})
            for (const auto& [p, e] : factor(part == 0 ? Int(1) : part, cfg))
                if (p != 2) ps.insert(p);
    }
    return std::vector<Int>(ps.begin(), ps.end());
}

bool is_rational_square(const Rat& a) {
    if (a <= 0) return a == 0;
    return mpz_perfect_square_p(a.get_num_mpz_t()) &&
           mpz_perfect_square_p(a.get_den_mpz_t());
}

Rat rational_sqrt(const Rat& a) {
    if (!is_rational_square(a)) throw domain_error("rational_sqrt: not a square");
    Int n, d;
    mpz_sqrt(n.get_mpz_t(), a.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), a.get_den_mpz_t());
    return Rat(n, d);
}

Int next_prime_such_that(const Int& after, long cap,
                         const std::function<bool(const Int&)>& pred) {
    Int p = after;
    for (long i = 0; i < cap; ++i) {
        mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
        if (pred(p)) return p;
    }
    throw bound_exceeded("next_prime_such_that: no prime found", cap);
}

Int sqrt_mod_pk(const Int& a, const Int& p, int k) {
    if (legendre(a, p) != 1) throw domain_error("sqrt_mod_pk: nonresidue");
    // Find a root mod p. Tonelli-Shanks.
    Int pm1 = p - 1;
    Int q = pm1;
    unsigned long s = 0;
    while (q % 2 == 0) { q /= 2; ++s; }
    Int x, z = 2;
    while (legendre(z, p) != -1) ++z;
    Int c, t, m(s), r;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), Int((q + 1) / 2).get_mpz_t(), p.get_mpz_t());
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    while (t != 1) {
        Int tt = t;
        long i = 0;
        while (tt != 1) { tt = tt * tt % p; ++i; }
        Int b = c;
        for (long j = 0; j < m.get_si() - i - 1; ++j) b = b * b % p;
        x = x * b % p;
        c = b * b % p;
        t = t * c % p;
        m = i;
    }
    // Hensel: lift through p, p^2, ..., p^k.
    Int mod = p;
    for (int i = 1; i < k; ++i) {
        Int next_mod = mod * p;
        Int f = (x * x - a) % next_mod;
        Int inv2x;
        Int twox = 2 * x % next_mod;
        if (mpz_invert(inv2x.get_mpz_t(), twox.get_mpz_t(), next_mod.get_mpz_t()) == 0)
            throw domain_error("sqrt_mod_pk: lift failed");
        x = (x - f * inv2x) % next_mod;
        if (x < 0) x += next_mod;
        mod = next_mod;
    }
    x %= mod;
    if (x < 0) x += mod;
    // normalize: root with least residue mod p in [1,(p-1)/2]
    if (x % p > p / 2) x = mod - x;
    return x;
}

Int sqrt_mod_2k(const Int& a, int k) {
    if (a % 8 != 1) throw domain_error("sqrt_mod_2k: unit not 1 mod 8");
    if (k < 3) k = 3;
    Int x = 1;
    // x^2 = a mod 2^i, lift one bit at a time: x -> x + 2^{i-1} if needed.
    for (int i = 3; i < k; ++i) {
        Int mod = Int(1) << (i + 1);
        if ((x * x - a) % mod != 0) x += Int(1) << (i - 1);
    }
    Int mod = Int(1) << k;
    x %= mod;
    if (x % 4 != 1) x = mod - x;
    return x;
}

Int pow_int(Int base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

} // namespace emb

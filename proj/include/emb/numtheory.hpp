#ifndef EMB_NUMTHEORY_HPP
#define EMB_NUMTHEORY_HPP

#include <gmpxx.h>

#include <functional>
#include <utility>
#include <vector>

#include "emb/config.hpp"
#include "emb/errors.hpp"

namespace emb {

using Int = mpz_class;
using Rat = mpq_class;

// Deterministic Miller-Rabin, exact for n < 3.3 * 10^24.
bool is_prime(const Int& n);

// Trial division up to cfg.factor_bound; throws bound_exceeded when a
// cofactor larger than the bound squared remains unfactored.
std::vector<std::pair<Int, int>> factor(const Int& n, const Config& cfg = {});

// (a/n), n odd positive. Zero when gcd(a,n) > 1.
int jacobi(const Int& a, const Int& n);
int legendre(const Int& a, const Int& p);

// p-adic valuation of a nonzero rational.
long val_at(const Rat& a, const Int& p);
// a / p^val(a), still a rational.
Rat unit_part(const Rat& a, const Int& p);

// Odd primes dividing numerator or denominator of any of the given rationals.
std::vector<Int> odd_support(const std::vector<Rat>& xs, const Config& cfg = {});

bool is_rational_square(const Rat& a);
// Exact square root of a rational square.
Rat rational_sqrt(const Rat& a);

// Smallest prime q > after satisfying pred; throws bound_exceeded after
// scanning cap primes.
Int next_prime_such_that(const Int& after, long cap,
                         const std::function<bool(const Int&)>& pred);

// x with x^2 = a mod p^k, p odd prime, (a/p) = 1, p ∤ a. Hensel lifting.
Int sqrt_mod_pk(const Int& a, const Int& p, int k);
// x with x^2 = a mod 2^k, a = 1 mod 8, normalized to x = 1 mod 4.
Int sqrt_mod_2k(const Int& a, int k);

Int pow_int(Int base, unsigned long e);

} // namespace emb

#endif

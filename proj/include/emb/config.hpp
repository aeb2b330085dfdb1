#ifndef EMB_CONFIG_HPP
#define EMB_CONFIG_HPP

namespace emb {

// Search and factorization bounds. All operations are pure functions of their
// inputs plus one of these; the defaults are sized for desk-scale inputs.
struct Config {
    long factor_bound = 10000000;       // trial-division limit
    long checkpoint_prime_cap = 1000000; // primes tested when hunting a checkpoint place
    long witness_cap = 1 << 16;         // candidates per witness search
    long aux_prime_cap = 100000;        // primes scanned for sieved auxiliary primes
    int sample_bound = 1000;            // sampled-place spot checks
};

} // namespace emb

#endif

#ifndef EMB_PLACES_HPP
#define EMB_PLACES_HPP

#include <compare>
#include <string>
#include <vector>

#include "emb/numtheory.hpp"

namespace emb {

// A place of Q: a prime p or the real place.
class Place {
public:
    Place() : finite_(false), p_(0) {} // the real place
    static Place infinity() { return Place(); }
    static Place finite(const Int& p);  // verifies primality

    bool is_finite() const { return finite_; }
    bool is_real() const { return !finite_; }
    const Int& prime() const;
    bool is_dyadic() const { return finite_ && p_ == 2; }

    std::string str() const { return finite_ ? p_.get_str() : "inf"; }
    static Place parse(const std::string& s);

    friend bool operator==(const Place& a, const Place& b) {
        return a.finite_ == b.finite_ && a.p_ == b.p_;
    }
    // finite places by prime, then the real place last
    friend bool operator<(const Place& a, const Place& b) {
        if (a.finite_ != b.finite_) return a.finite_;
        return a.p_ < b.p_;
    }

private:
    bool finite_;
    Int p_;
};

// Coset of Q^x / (Q^x)^2: a sign and a positive squarefree integer.
class SquareClass {
public:
    static SquareClass of(const Rat& a, const Config& cfg = {});
    static SquareClass one() { return SquareClass(1, 1); }

    int sign() const { return sign_; }
    const Int& squarefree_part() const { return sf_; }
    bool is_one() const { return sign_ == 1 && sf_ == 1; }
    Rat rep() const { return Rat(sign_ * sf_); }

    SquareClass times(const SquareClass& o, const Config& cfg = {}) const;

    friend bool operator==(const SquareClass& a, const SquareClass& b) {
        return a.sign_ == b.sign_ && a.sf_ == b.sf_;
    }

private:
    SquareClass(int s, Int f) : sign_(s), sf_(std::move(f)) {}
    int sign_;
    Int sf_;
};

// (a,b)_v: +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution over Q_v.
int hilbert_symbol(const Rat& a, const Rat& b, const Place& v, const Config& cfg = {});

bool is_local_square(const Rat& a, const Place& v, const Config& cfg = {});

// Representatives of Q_v^x / (Q_v^x)^2: {1,u,p,up} at odd p (u a nonresidue),
// {±1,±2,±5,±10} at 2, {1,-1} at the real place.
std::vector<Rat> local_square_class_reps(const Place& v);

// Places where any of the given rationals has nonzero valuation, plus 2 and
// the real place. Everything outside is tame for symbols built from them.
std::vector<Place> support_places(const std::vector<Rat>& xs, const Config& cfg = {});

} // namespace emb

#endif

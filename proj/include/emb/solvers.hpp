#ifndef EMB_SOLVERS_HPP
#define EMB_SOLVERS_HPP

#include <map>
#include <optional>
#include <set>

#include "emb/extsymbols.hpp"

namespace emb {

using EtaleF = std::vector<FieldFactor>;
using FElem = std::vector<FactorElem>;

FElem felem_one(const EtaleF& F);
FElem felem_from_rats(const EtaleF& F, const std::vector<Rat>& xs);
FElem felem_mul(const EtaleF& F, const FElem& x, const FElem& y);
FElem felem_inv(const EtaleF& F, const FElem& x);
bool felem_invertible(const EtaleF& F, const FElem& x);

// x with (a, x)_v = target_v at every given place, +1 at every other place.
// Requires: product of targets +1, and a a local nonsquare wherever the
// target is -1. The witness is re-verified on the joint support before
// being returned.
Rat prescribe_symbols(const Rat& a, const std::map<Place, int>& targets,
                      const Config& cfg = {});

// s with (s, t)_v = alpha_v at every place (targets as in prescribe_symbols,
// pinned places filled in from the pins), and s = s_v mod squares at every
// pinned place. Pins are local square-class representatives.
Rat solve_symbols_pinned(const Rat& t, const std::map<Place, int>& targets,
                         const std::map<Place, Rat>& pins, const Config& cfg = {});

// Etale version with an escape place: s = pins[v] mod squares componentwise
// at every pinned place, and (s, t) trivial at every place of every factor
// field outside pins ∪ {v0}. v0 must see every globally-nonsquare component
// of t as a local nonsquare (checked).
FElem solve_symbols_pinned_etale(const EtaleF& F, const FElem& t,
                                 const std::map<Place, FElem>& pins, const Place& v0,
                                 const Config& cfg = {});

// Prime v0 outside `avoid` such that every globally-nonsquare component of t
// stays a nonsquare in F ⊗ Q_{v0}, and (optionally) z_disc is a nonsquare at
// v0. Odd primes outside the support only, so v0 is tame for everything in
// sight.
Place find_checkpoint_place(const EtaleF& F, const FElem& t, bool want_z_constraint,
                            const Rat& z_disc, const std::set<Place>& avoid,
                            const Config& cfg = {});

// Element c of F_w with (c, d)_w = -1, when d is a nonsquare at w; nullopt
// when d is a local square (the pairing against d is then trivial).
std::optional<FactorElem> symbol_flipper(const FieldFactor& f, const FactorElem& d,
                                         const ExtPlace& w, const Config& cfg = {});

} // namespace emb

#endif

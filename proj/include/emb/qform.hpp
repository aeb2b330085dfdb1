#ifndef EMB_QFORM_HPP
#define EMB_QFORM_HPP

#include <map>
#include <optional>
#include <utility>

#include "emb/places.hpp"

namespace emb {

// Nondegenerate quadratic form over Q in diagonal shape.
struct QuadraticForm {
    std::vector<Rat> diag;

    explicit QuadraticForm(std::vector<Rat> d) : diag(std::move(d)) {
        if (diag.empty()) throw domain_error("QuadraticForm: empty diagonal");
        for (const auto& a : diag)
            if (a == 0) throw domain_error("QuadraticForm: zero diagonal entry");
    }
    int rank() const { return static_cast<int>(diag.size()); }
    std::string str() const;
};

struct LocalInvariants {
    int rank = 0;
    SquareClass det = SquareClass::one();
    SquareClass disc = SquareClass::one(); // (-1)^(n(n-1)/2) * det
    std::map<Place, int> hasse;            // support ∪ {2, inf}; +1 elsewhere
    int sig_pos = 0, sig_neg = 0;

    int hasse_at(const Place& v) const {
        auto it = hasse.find(v);
        return it == hasse.end() ? 1 : it->second;
    }
};

using Mat = std::vector<std::vector<Rat>>;

// symmetric congruence reduction to a diagonal form
QuadraticForm diagonalize(const Mat& G);

LocalInvariants invariants(const QuadraticForm& q, const Config& cfg = {});

// lambda * q; checks d(lambda f) = lambda^n d(f) and
// h_v(lambda f) = (lambda, disc f)_v h_v(f) against direct recomputation
QuadraticForm scale(const QuadraticForm& q, const Rat& lambda, const Config& cfg = {});

bool locally_equivalent(const QuadraticForm& q1, const QuadraticForm& q2, const Place& v,
                        const Config& cfg = {});
bool globally_equivalent(const QuadraticForm& q1, const QuadraticForm& q2,
                         const Config& cfg = {});

// does q represent c over Q_v (or over Q when v is empty)?
bool represents(const QuadraticForm& q, const Rat& c, const std::optional<Place>& v,
                const Config& cfg = {});

int local_witt_index(const QuadraticForm& q, const Place& v, const Config& cfg = {});

// a diagonal form with the requested rank, determinant class, Hasse symbols
// (+1 off the map) and real signature; throws domain_error naming the violated
// constraint when the data is inconsistent
QuadraticForm build_form_with_invariants(int n, const SquareClass& det,
                                         const std::map<Place, int>& hasse,
                                         std::pair<int, int> signature,
                                         const Config& cfg = {});

// smallest witness of similarity: lambda with lambda*f equivalent to g,
// or nullopt when the forms are not similar over Q
std::optional<Rat> similar(const QuadraticForm& f, const QuadraticForm& g,
                           const Config& cfg = {});

} // namespace emb

#endif

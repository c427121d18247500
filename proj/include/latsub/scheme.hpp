#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "latsub/gridseq.hpp"
#include "latsub/lattice.hpp"
#include "latsub/polynomial.hpp"

namespace latsub {

/// One local affine rule: fine value = sum_i weights[i] * v_{k + offsets[i]}.
struct StencilRule {
    std::vector<Point> offsets;
    std::vector<Rat> weights;

    void validate(int dim) const;  // weights sum to 1, sizes match
};

enum class SelectorKind { Fixed, EnoMinDiff, Exhaustive };

struct Selector {
    SelectorKind kind = SelectorKind::EnoMinDiff;
    int fixed_index = 0;

    static Selector fixed(int i) { return {SelectorKind::Fixed, i}; }
    static Selector eno() { return {SelectorKind::EnoMinDiff, 0}; }
    static Selector exhaustive() { return {SelectorKind::Exhaustive, 0}; }
    std::string str() const;
};

Selector parse_selector(const std::string& s);

/// Per-point rule override used by tests and certification sweeps:
/// maps (coarse base point, coset index) -> rule index.
using ChoiceFn = std::function<int(const Point&, int)>;

class SchemeSpec {
public:
    SchemeSpec(DilationMatrix M, std::vector<std::vector<StencilRule>> rules_per_coset,
               Selector selector, bool interpolatory);

    const DilationMatrix& M() const { return M_; }
    const CosetSet& cosets() const { return cosets_; }
    int dim() const { return M_.dim(); }
    long long m() const { return M_.det_abs(); }
    const std::vector<StencilRule>& rules(int coset) const { return rules_[coset]; }
    int rule_count(int coset) const { return static_cast<int>(rules_[coset].size()); }
    Selector selector() const { return selector_; }
    void set_selector(Selector s) { selector_ = s; }
    bool interpolatory() const { return interpolatory_; }
    int locality() const { return K_; }       // a_{k-Ml} = 0 when ||k-Ml||_inf > K
    Rat coefficient_bound() const { return C_; }

private:
    DilationMatrix M_;
    CosetSet cosets_;
    std::vector<std::vector<StencilRule>> rules_;
    Selector selector_;
    bool interpolatory_;
    int K_;
    Rat C_;
};

/// The paper's hexagonal and quincunx example schemes.
SchemeSpec builtin(const std::string& name);

/// Total absolute first-difference oscillation of v over the stencil's
/// points; the ENO selector minimizes it, ties broken by lowest index.
template <class T>
T eno_oscillation(const Sequence<T>& v, const Point& k, const StencilRule& rule);

template <class T>
int eno_select(const Sequence<T>& v, const Point& k, const std::vector<StencilRule>& rules);

/// Rule index the scheme's selector picks at (base k, coset).
template <class T>
int select_rule(const SchemeSpec& s, const Sequence<T>& v, const Point& k, int coset);

/// One subdivision step S(v)w. With w = v this is Sv. `choice` overrides the
/// selector when provided (used by tests and enumerators).
template <class T>
Sequence<T> subdivide_operator(const SchemeSpec& s, const Sequence<T>& v, const Sequence<T>& w,
                           const ChoiceFn* choice = nullptr);

template <class T>
Sequence<T> subdivide(const SchemeSpec& s, const Sequence<T>& v, const ChoiceFn* choice = nullptr) {
    return subdivide_operator(s, v, v, choice);
}

struct ReproductionCertificate {
    int degree = -1;   // largest certified N; -1 when even constants fail
    bool exact = false;
    struct Witness {
        Point monomial;
        bool ok;
        Polynomial output;    // P~ on success, failing residual otherwise
        std::string note;
    };
    std::vector<Witness> witnesses;
};

/// Certifies per-rule polynomial reproduction (hence selector-independent).
ReproductionCertificate reproduction_degree(const SchemeSpec& s, int n_max, bool require_exact);

}  // namespace latsub

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "latsub/scheme.hpp"

namespace latsub {

/// Finite mask: input position -> exact coefficient.
using Mask = std::map<Point, Rat>;

/// Row functional on lattice values (position -> coefficient).
using RowFun = std::map<Point, Rat>;

Rat mask_mass(const Mask& m);

/// A fine point entering one differenced output row.
struct SlotInfo {
    Point fine;    // eps_e + sum m_i x_i, on the fine grid
    Point base;    // fine = M*base + rep(coset)
    int coset;
    int nrules;
};

/// Masks for one (output coset, output component mu), per rule-choice tuple.
struct ComponentFamily {
    Point mu;
    std::vector<SlotInfo> slots;   // deduplicated fine points, sorted
    // tuple (one rule index per slot) -> per-input-component masks (size q_l)
    std::map<std::vector<int>, std::vector<Mask>> rows;
};

/// Record of the exact decompositions behind a derivation.
struct DerivationRecord {
    int systems_solved = 0;
    bool residual_zero = true;   // every decomposition reproduced its row exactly
    Rat max_row_mass;            // largest l^1 mass over all rows
};

/// The scheme for the differences S_l of the base scheme:
/// Delta^l S(v) w = S_l(v) Delta^l w.
class DifferenceScheme {
public:
    int order;                    // l >= 0 (0 = the scheme itself)
    DilationMatrix M;
    CosetSet cosets;
    DirectionSet dirs;            // canonical basis unless derived directionally
    std::vector<Point> indices;   // multiindices(dirs.count(), order)
    std::vector<std::vector<ComponentFamily>> families;  // [coset][mu index]
    std::vector<int> rule_counts; // rules per coset of the base scheme
    DerivationRecord record;

    int q() const { return static_cast<int>(indices.size()); }
    int index_of(const Point& mu) const;
    bool linear() const;
};

/// Derives S_l; requires reproduction of polynomials up to degree l-1.
DifferenceScheme derive(const SchemeSpec& s, int l);

/// Same over an arbitrary spanning direction set.
DifferenceScheme derive_directional(const SchemeSpec& s, const DirectionSet& dirs, int l);

/// Block max-row-sum norm: max l^1 mass over cosets, rule tuples, components.
Rat operator_inf_norm(const DifferenceScheme& ds);

/// Applies S_l(v) given explicit per-point rule choices.
DifferenceBlock<Rat> apply_diff(const DifferenceScheme& ds, const ChoiceFn& choice,
                                const DifferenceBlock<Rat>& w);

/// Rule choices the scheme's selector makes on data v (for apply_diff).
ChoiceFn selector_choices(const SchemeSpec& s, const RatSeq& v);

// ---- exact decomposition utilities (also used by the certifiers) ----

/// Decomposes f (sum zero) into first differences over the direction set,
/// with minimal total coefficient mass (Kantorovich / min-cost flow).
/// Component i of the result pairs with nabla_{x_i}.
std::vector<Mask> flow_decompose(const RowFun& f, const DirectionSet& dirs);

/// Minimal achievable mass: sup of f over unit-difference-bounded data.
Rat w1_cost(const RowFun& f, const DirectionSet& dirs);

/// Decomposes f orthogonal to P_{<l} into order-l difference masks
/// (canonical directions) by exact elimination in the Newton basis.
std::vector<Mask> peel_decompose(const RowFun& f, int dim, int l);

}  // namespace latsub

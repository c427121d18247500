#pragma once

#include <iosfwd>
#include <optional>

#include "latsub/boxspline.hpp"
#include "latsub/scheme.hpp"

namespace latsub {

struct CascadeState {
    int level = 0;
    RatSeq values;  // v^level; location of index k is M^{-level} k

    CascadeState() : values(0) {}
};

/// Applies `levels` subdivision steps to v0 (rational mode throughout).
CascadeState cascade(const SchemeSpec& s, const RatSeq& v0, int levels);

/// Sampled field v_j(x) = sum_k v^j_k Phi(M^j x - k) on a uniform grid over
/// the support bounding box (in limit coordinates), padded by one cell.
struct RenderField {
    std::vector<int> shape;     // samples per axis
    std::vector<double> lo, hi;
    std::vector<double> values;  // row-major, last axis fastest

    double min_value() const;
    double max_value() const;
};

RenderField render(const SchemeSpec& s, const CascadeState& state, const RenderBasis& basis,
                   const std::vector<int>& grid);

/// Point evaluation of the rendered level.
double render_at(const SchemeSpec& s, const CascadeState& state, const RenderBasis& basis,
                 const std::vector<double>& x);

void write_csv(std::ostream& out, const RenderField& f);
void write_pgm(std::ostream& out, const RenderField& f);  // 8-bit, min-max normalized

struct DecayDiagnostic {
    bool degenerate = false;     // exactly polynomial data
    std::string note;
    std::vector<Rat> level_norms;    // ||Delta^1 v^j||_inf, exact
    std::vector<Rat> ratios;         // consecutive quotients
    double rho_emp = 0;
    double s_emp = 0;
};

/// Per-level contraction ratios of first differences and the fitted
/// empirical Hoelder exponent (geometric mean over the last J/2 levels).
DecayDiagnostic empirical_holder(const SchemeSpec& s, const RatSeq& v0, int levels);

struct SobolevDecayReport {
    bool applicable = false;
    std::string note;
    std::vector<double> level_norms;  // ||D^mu (v_{j+1} - v_j)||_p on the grid
    double measured_slope = 0;        // mean log-ratio per level
    double predicted_slope = 0;       // log sigma^{|mu| - s*}
    double s_star = 0;
};

/// Derivative-difference decay of rendered levels against a box-spline
/// basis (Sobolev diagnostics); mu is a multi-index over the basis
/// directions, |mu| <= 1 uses the exact derivative masks directly.
SobolevDecayReport sobolev_decay(const SchemeSpec& s, const RatSeq& v0, int levels,
                                 const RenderBasis& basis, const Point& mu, PNorm p,
                                 double certified_s_star, int grid_per_axis = 9);

}  // namespace latsub

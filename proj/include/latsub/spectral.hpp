#pragma once

#include <optional>
#include <string>
#include <vector>

#include "latsub/diffscheme.hpp"

namespace latsub {

/// Work budget for product enumeration, in abstract units (~ mask ops).
long long work_budget_units();

struct RadiusBound {
    int order = 0;
    PNorm p = PNorm::Inf;
    int depth = 0;             // J requested
    double upper = 0;          // min over t <= depth of bound_t^{1/t}
    Rat upper_base;            // exact ||(S_l)^t|| at the argmin t
    int upper_argmin = 1;
    double lower = 0;
    std::string lower_method = "trivial";
    std::vector<Rat> per_depth;  // exact bound_t for t = 1..depth

    bool upper_is_exact() const { return upper_argmin == 1; }
    std::string upper_str() const;
};

/// Certified upper bound on rho_{p,l} by exhaustive rule-assignment
/// enumeration of j-fold products (branch-and-bound), j <= depth.
RadiusBound jsr_upper(const DifferenceScheme& ds, PNorm p, int depth);

/// Certified lower bound: exact eigenpairs of window sections of sampled
/// periodic rule words (trace bounds as fallback).
RadiusBound jsr_lower(const DifferenceScheme& ds, PNorm p, int depth);

struct SobolevEntry {
    int order = 0;            // N
    bool applicable = false;  // isotropic M and order derivable
    bool certified = false;
    double s_star = 0;        // d(1/p - log_m upper(p, N))
    std::string note;
};

struct RegularityReport {
    std::string scheme_id;
    PNorm p = PNorm::Inf;
    int depth = 0;
    int max_order = 1;
    IsotropyInfo isotropy{};
    int repro_degree = -1;        // plain reproduction
    int repro_degree_exact = -1;  // exact reproduction
    std::vector<RadiusBound> bounds_inf;  // per order l = 1..L
    std::vector<RadiusBound> bounds_one;  // filled when p in {1,2}
    bool lp_convergent = false;
    double convergence_margin = 0;  // m^{1/p} - upper(p,1)
    std::optional<double> holder_s;
    std::string holder_note;
    std::vector<SobolevEntry> sobolev;
    std::vector<std::string> notes;

    /// Upper bound used for the requested p at the given order (interpolated
    /// for p = 2).
    double upper_for_p(int order) const;
};

RegularityReport certify(const SchemeSpec& s, PNorm p, int n_max, int depth);

struct RadiusInequalityCheck {
    int n = 0;
    bool consistent = true;
    double upper_next = 0, lower_n = 0;
    Rat m_inf_norm;
    std::string detail;
};

/// Consistency of certified intervals with rho_{p,n+1} >= rho_{p,n}/||M||_inf.
RadiusInequalityCheck radius_inequality_check(const SchemeSpec& s, PNorm p, int n, int depth);

/// Best constants for the deviation inequalities of interpolatory schemes:
/// |prediction(rule) - value at M k| at coset `pred_coset`, for k in coset
/// class `case_coset`, against both one- and two-level reference norms.
struct DeviationConstants {
    struct Entry {
        int pred_coset;
        int case_coset;
        int rule;
        Rat two_level;  // vs ||Delta^1 v^{j-2}||_inf, worst-case selections
        Rat one_level;  // vs ||Delta^1 v^{j-1}||_inf
    };
    std::vector<Entry> entries;
};

DeviationConstants two_level_constants(const SchemeSpec& s);

}  // namespace latsub

#pragma once

#include <string>

#include "latsub/spectral.hpp"

namespace latsub {

inline constexpr const char* kToolVersion = "latsub 0.1.0";

struct AnalysisRequest {
    std::string scheme_path;
    std::string p = "inf";
    int max_order = 1;
    int depth = 4;
    unsigned seed = 1;
    std::string describe() const;
};

/// Human-readable regularity report; each verdict cites the bound it uses.
std::string format_report(const SchemeSpec& s, const RegularityReport& rep,
                          const AnalysisRequest& req);

/// Machine-readable twin carrying the same bounds and verdicts.
std::string report_json(const SchemeSpec& s, const RegularityReport& rep,
                        const AnalysisRequest& req);

}  // namespace latsub

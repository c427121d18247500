#include "latsub/report.hpp"

#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <sstream>

namespace latsub {

using nlohmann::json;

std::string AnalysisRequest::describe() const {
    std::ostringstream os;
    os << "analyze " << scheme_path << " --p " << p << " --max-order " << max_order
       << " --depth " << depth << " --seed " << seed;
    return os.str();
}

namespace {

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

double threshold_for(const RegularityReport& rep, long long m) {
    double inv_p = rep.p == PNorm::Inf ? 0.0 : (rep.p == PNorm::One ? 1.0 : 0.5);
    return std::pow(static_cast<double>(m), inv_p);
}

}  // namespace

std::string format_report(const SchemeSpec& s, const RegularityReport& rep,
                          const AnalysisRequest& req) {
    std::ostringstream os;
    os << "# " << kToolVersion << " regularity report\n";
    os << "# request: " << req.describe() << "\n\n";

    os << "scheme summary\n";
    os << "  dilation M =";
    for (const auto& row : s.M().entries()) {
        os << " [";
        for (size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << row[j];
        os << "]";
    }
    os << ", m = " << s.m() << "\n";
    os << "  cosets:";
    for (const auto& rep_pt : s.cosets().reps()) os << " " << point_str(rep_pt);
    os << "\n";
    os << "  interpolatory: " << (s.interpolatory() ? "yes" : "no")
       << ", locality K = " << s.locality()
       << ", coefficient bound C = " << rat_str(s.coefficient_bound()) << "\n";
    os << "  selector: " << s.selector().str() << "\n";
    os << "  isotropy: " << rep.isotropy.describe() << "\n\n";

    os << "polynomial reproduction\n";
    os << "  exact degree: " << rep.repro_degree_exact
       << ", plain degree: " << rep.repro_degree << "\n\n";

    os << "joint spectral radius bounds (depth " << rep.depth << ")\n";
    for (size_t i = 0; i < rep.bounds_inf.size(); ++i) {
        const auto& b = rep.bounds_inf[i];
        os << "  l=" << b.order << " p=inf: upper " << b.upper_str() << ", lower "
           << fmt(b.lower) << " [" << b.lower_method << "]\n";
    }
    for (size_t i = 0; i < rep.bounds_one.size(); ++i) {
        const auto& b = rep.bounds_one[i];
        os << "  l=" << b.order << " p=1:   upper " << b.upper_str() << ", lower "
           << fmt(b.lower) << " [" << b.lower_method << "]\n";
    }
    os << "\nverdicts\n";
    double thr = threshold_for(rep, s.m());
    os << "  L^" << pnorm_str(rep.p) << " convergence: " << (rep.lp_convergent ? "YES" : "not certified")
       << " (rho_{" << pnorm_str(rep.p) << ",1} upper " << fmt(rep.upper_for_p(1)) << " vs m^{1/p} = "
       << fmt(thr) << ", margin " << fmt(rep.convergence_margin) << ")\n";
    if (rep.holder_s)
        os << "  Hoelder s = " << fmt(*rep.holder_s, 4) << " (from rho_{inf,1} upper "
           << rep.bounds_inf[0].upper_str() << ", s = -log(rho)/log(m))"
           << (rep.holder_note.empty() ? "" : " [" + rep.holder_note + "]") << "\n";
    else
        os << "  Hoelder s: none (" << rep.holder_note << ")\n";
    for (const auto& e : rep.sobolev) {
        os << "  Sobolev W_" << e.order << "^" << pnorm_str(rep.p) << ": ";
        if (!e.applicable)
            os << "not applicable (" << e.note << ")";
        else
            os << (e.certified ? "certified" : "not certified") << " (s* = " << fmt(e.s_star)
               << " from rho_{" << pnorm_str(rep.p) << "," << e.order << "} upper "
               << fmt(rep.upper_for_p(e.order)) << "; need s* > " << e.order << ")";
        os << "\n";
    }
    if (!rep.notes.empty()) {
        os << "\ndiagnostics\n";
        for (const auto& n : rep.notes) os << "  - " << n << "\n";
    }
    return os.str();
}

std::string report_json(const SchemeSpec& s, const RegularityReport& rep,
                        const AnalysisRequest& req) {
    json doc;
    doc["tool"] = kToolVersion;
    doc["request"] = req.describe();
    doc["m"] = s.m();
    json dil = json::array();
    for (const auto& row : s.M().entries()) dil.push_back(row);
    doc["dilation"] = dil;
    doc["interpolatory"] = s.interpolatory();
    doc["locality_K"] = s.locality();
    doc["coefficient_bound_C"] = rat_str(s.coefficient_bound());
    doc["isotropy"] = rep.isotropy.describe();
    doc["p"] = pnorm_str(rep.p);
    doc["depth"] = rep.depth;
    doc["reproduction_degree_exact"] = rep.repro_degree_exact;
    doc["reproduction_degree"] = rep.repro_degree;

    auto bounds_json = [](const std::vector<RadiusBound>& bs) {
        json arr = json::array();
        for (const auto& b : bs) {
            json j;
            j["order"] = b.order;
            j["p"] = pnorm_str(b.p);
            j["upper"] = b.upper;
            j["upper_base"] = rat_str(b.upper_base);
            j["upper_depth"] = b.upper_argmin;
            j["lower"] = b.lower;
            j["lower_method"] = b.lower_method;
            json pd = json::array();
            for (const auto& r : b.per_depth) pd.push_back(rat_str(r));
            j["per_depth"] = pd;
            arr.push_back(j);
        }
        return arr;
    };
    doc["bounds_inf"] = bounds_json(rep.bounds_inf);
    doc["bounds_one"] = bounds_json(rep.bounds_one);

    doc["lp_convergent"] = rep.lp_convergent;
    doc["convergence_margin"] = rep.convergence_margin;
    if (rep.holder_s)
        doc["holder_s"] = *rep.holder_s;
    else
        doc["holder_s"] = nullptr;
    doc["holder_note"] = rep.holder_note;
    json sob = json::array();
    for (const auto& e : rep.sobolev) {
        json j;
        j["order"] = e.order;
        j["applicable"] = e.applicable;
        j["certified"] = e.certified;
        j["s_star"] = e.s_star;
        j["note"] = e.note;
        sob.push_back(j);
    }
    doc["sobolev"] = sob;
    doc["notes"] = rep.notes;
    return doc.dump(2) + "\n";
}

}  // namespace latsub

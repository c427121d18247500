#include "latsub/schemeio.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace latsub {

using nlohmann::json;

namespace {

Point parse_point(const json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw Error(where + ": expected an integer vector of length " + std::to_string(dim));
    Point p(dim);
    for (int i = 0; i < dim; ++i) {
        if (!j[i].is_number_integer())
            throw Error(where + "[" + std::to_string(i) + "]: expected an integer");
        p[i] = j[i].get<int>();
    }
    return p;
}

}  // namespace

SchemeSpec parse_scheme_text(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(origin + ": malformed JSON: " + e.what());
    }
    if (!doc.is_object()) throw Error(origin + ": expected a JSON object");

    if (!doc.contains("dimension") || !doc["dimension"].is_number_integer())
        throw Error(origin + ": 'dimension' (integer) is required");
    int dim = doc["dimension"].get<int>();
    if (dim < 1 || dim > 4) throw Error(origin + ": dimension must be in 1..4");

    if (!doc.contains("dilation") || !doc["dilation"].is_array() ||
        static_cast<int>(doc["dilation"].size()) != dim)
        throw Error(origin + ": 'dilation' must be a " + std::to_string(dim) + "x" +
                    std::to_string(dim) + " integer matrix");
    std::vector<std::vector<long long>> entries(dim, std::vector<long long>(dim));
    for (int i = 0; i < dim; ++i) {
        const auto& row = doc["dilation"][i];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw Error(origin + ": dilation row " + std::to_string(i) + " has wrong length");
        for (int j = 0; j < dim; ++j) {
            if (!row[j].is_number_integer())
                throw Error(origin + ": dilation[" + std::to_string(i) + "][" +
                            std::to_string(j) + "]: expected an integer");
            entries[i][j] = row[j].get<long long>();
        }
    }
    std::unique_ptr<DilationMatrix> M;
    try {
        M = std::make_unique<DilationMatrix>(entries);
    } catch (const Error& e) {
        throw Error(origin + ": dilation: " + e.what());
    }
    CosetSet cosets(*M);

    bool interpolatory = doc.value("interpolatory", false);
    Selector selector = Selector::eno();
    if (doc.contains("selector")) {
        if (!doc["selector"].is_string()) throw Error(origin + ": 'selector' must be a string");
        selector = parse_selector(doc["selector"].get<std::string>());
    }

    if (!doc.contains("rules") || !doc["rules"].is_array())
        throw Error(origin + ": 'rules' (array) is required");

    std::vector<std::vector<StencilRule>> rules(cosets.count());
    for (size_t ri = 0; ri < doc["rules"].size(); ++ri) {
        const auto& entry = doc["rules"][ri];
        std::string where = origin + ": rules[" + std::to_string(ri) + "]";
        if (!entry.is_object() || !entry.contains("coset"))
            throw Error(where + ": expected an object with 'coset'");
        Point coset = parse_point(entry["coset"], dim, where + ".coset");
        int cidx = -1;
        for (int i = 0; i < cosets.count(); ++i)
            if (cosets.rep(i) == coset) cidx = i;
        if (cidx < 0)
            throw Error(where + ": " + point_str(coset) +
                        " is not a canonical coset representative of the dilation");
        if (!rules[cidx].empty()) throw Error(where + ": duplicate coset " + point_str(coset));
        if (!entry.contains("stencils") || !entry["stencils"].is_array() ||
            entry["stencils"].empty())
            throw Error(where + ": 'stencils' (non-empty array) is required");
        for (size_t si = 0; si < entry["stencils"].size(); ++si) {
            const auto& st = entry["stencils"][si];
            std::string sw = where + ".stencils[" + std::to_string(si) + "]";
            if (!st.is_object() || !st.contains("offsets") || !st.contains("weights"))
                throw Error(sw + ": expected 'offsets' and 'weights'");
            if (!st["offsets"].is_array() || !st["weights"].is_array() ||
                st["offsets"].size() != st["weights"].size() || st["offsets"].empty())
                throw Error(sw + ": offsets/weights must be equal-length non-empty arrays");
            StencilRule rule;
            for (size_t oi = 0; oi < st["offsets"].size(); ++oi) {
                rule.offsets.push_back(
                    parse_point(st["offsets"][oi], dim, sw + ".offsets[" + std::to_string(oi) + "]"));
                const auto& wj = st["weights"][oi];
                if (!wj.is_string())
                    throw Error(sw + ".weights[" + std::to_string(oi) +
                                "]: weights are exact rational strings (\"1/4\"), not numbers");
                try {
                    rule.weights.push_back(parse_rational(wj.get<std::string>()));
                } catch (const Error& e) {
                    throw Error(sw + ".weights[" + std::to_string(oi) + "]: " + e.what());
                }
            }
            try {
                rule.validate(dim);
            } catch (const Error& e) {
                throw Error(sw + ": " + e.what());
            }
            rules[cidx].push_back(std::move(rule));
        }
    }
    for (int i = 0; i < cosets.count(); ++i) {
        if (!rules[i].empty()) continue;
        if (i == 0 && interpolatory) {
            rules[0] = {StencilRule{{zero_point(dim)}, {Rat(1)}}};
        } else {
            throw Error(origin + ": missing rule for coset " + point_str(cosets.rep(i)));
        }
    }
    try {
        return SchemeSpec(*M, rules, selector, interpolatory);
    } catch (const Error& e) {
        throw Error(origin + ": " + e.what());
    }
}

SchemeSpec parse_scheme(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scheme file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scheme_text(ss.str(), path);
}

std::string serialize_scheme(const SchemeSpec& s) {
    json doc;
    doc["dimension"] = s.dim();
    json dil = json::array();
    for (const auto& row : s.M().entries()) dil.push_back(row);
    doc["dilation"] = dil;
    doc["interpolatory"] = s.interpolatory();
    doc["selector"] = s.selector().str();
    json rules = json::array();
    for (int e = 0; e < s.cosets().count(); ++e) {
        if (e == 0 && s.interpolatory()) continue;
        json entry;
        entry["coset"] = s.cosets().rep(e);
        json stencils = json::array();
        for (const auto& rule : s.rules(e)) {
            json st;
            st["offsets"] = rule.offsets;
            json w = json::array();
            for (const auto& wt : rule.weights) w.push_back(rat_str(wt));
            st["weights"] = w;
            stencils.push_back(st);
        }
        entry["stencils"] = stencils;
        rules.push_back(entry);
    }
    doc["rules"] = rules;
    return doc.dump(2) + "\n";
}

std::string serialize_diff_scheme(const DifferenceScheme& ds) {
    json doc;
    doc["order"] = ds.order;
    json dil = json::array();
    for (const auto& row : ds.M.entries()) dil.push_back(row);
    doc["dilation"] = dil;
    json dirs = json::array();
    for (const auto& v : ds.dirs.vectors) dirs.push_back(v);
    doc["directions"] = dirs;
    json comps = json::array();
    for (const auto& mu : ds.indices) comps.push_back(mu);
    doc["components"] = comps;
    doc["max_row_mass"] = rat_str(ds.record.max_row_mass);

    json fams = json::array();
    for (int e = 0; e < ds.cosets.count(); ++e) {
        for (const auto& fam : ds.families[e]) {
            json f;
            f["coset"] = ds.cosets.rep(e);
            f["mu"] = fam.mu;
            json slots = json::array();
            for (const auto& slot : fam.slots) {
                json sj;
                sj["fine"] = slot.fine;
                sj["base"] = slot.base;
                sj["coset"] = slot.coset;
                sj["rules"] = slot.nrules;
                slots.push_back(sj);
            }
            f["slots"] = slots;
            json rows = json::array();
            for (const auto& [tuple, masks] : fam.rows) {
                json rj;
                rj["tuple"] = tuple;
                json mj = json::array();
                for (size_t ni = 0; ni < masks.size(); ++ni) {
                    if (masks[ni].empty()) continue;
                    json one;
                    one["nu"] = ds.indices[ni];
                    json entries = json::array();
                    for (const auto& [p, c] : masks[ni]) {
                        json ej;
                        ej["at"] = p;
                        ej["c"] = rat_str(c);
                        entries.push_back(ej);
                    }
                    one["entries"] = entries;
                    mj.push_back(one);
                }
                rj["masks"] = mj;
                rows.push_back(rj);
            }
            f["rows"] = rows;
            fams.push_back(f);
        }
    }
    doc["families"] = fams;
    return doc.dump(2) + "\n";
}

}  // namespace latsub

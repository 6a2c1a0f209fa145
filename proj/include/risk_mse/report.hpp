#pragma once

// MseReport serialization.  CSV carries the documented column set; JSON
// carries every MseRow field.  Numbers are printed with %.17g so a written
// value round-trips to the exact double (and re-runs diff byte-identically).

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "risk_mse/recommend.hpp"

namespace risk_mse {

inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline constexpr const char* kMseCsvHeader = "beta0,b1,b2,t,hmse1,hmse2,hmse2_limit,recommended";

inline std::string to_csv_line(const MseRow& r) {
    std::string out;
    out += format_g17(r.beta0);
    out += ',';
    out += format_g17(r.b1);
    out += ',';
    out += format_g17(r.b2);
    out += ',';
    out += std::to_string(r.t);
    out += ',';
    out += format_g17(r.hmse1);
    out += ',';
    out += format_g17(r.hmse2);
    out += ',';
    out += format_g17(r.hmse2_limit);
    out += ',';
    out += recommendation_name(r.recommended);
    return out;
}

inline std::string to_csv(const std::vector<MseRow>& rows) {
    std::string out = kMseCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += to_csv_line(r);
        out += '\n';
    }
    return out;
}

inline void to_json(nlohmann::json& j, const MseRow& r) {
    j = nlohmann::json{{"beta0", r.beta0},
                       {"b1", r.b1},
                       {"b2", r.b2},
                       {"t", r.t},
                       {"hmse1", r.hmse1},
                       {"hmse2", r.hmse2},
                       {"hmse1_simplified", r.hmse1_simplified},
                       {"hmse2_simplified", r.hmse2_simplified},
                       {"hmse2_limit", r.hmse2_limit},
                       {"recommended", recommendation_name(r.recommended)}};
    if (r.crossover)
        j["crossover"] = *r.crossover;
    else
        j["crossover"] = nullptr;
}

}  // namespace risk_mse

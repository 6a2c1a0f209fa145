#pragma once

// JSON (de)serialization for the config-facing records.
//
// ModelParams document:
//   { "lambda1": 0.1496, "lambda2": 4447.07, "beta0": -0.05,
//     "psi2": 0.9954, "b1": 0.5, "b2": 0.01 }
// Either psi2 or a calibration constant "c" must be present; when "c" is
// given, psi2 is derived via calibrate_psi.  lambda1/lambda2 may instead be
// given as covariate blocks {"x": [...], "beta": [...]} under the keys
// "frequency_covariates"/"severity_covariates" (log link).
//
// Portfolio document:
//   { "classes": [ { "weight": 0.3, "params": { ...ModelParams... } }, ... ] }
//
// ClaimHistory document:
//   { "periods": [ { "n": 2, "s": 812.5 }, ... ] }

#include <string>

#include <json.hpp>

#include "crm/moments.hpp"
#include "crm/params.hpp"

namespace crm {

using nlohmann::json;

inline json to_json(const ModelParams& p) {
    return json{{"lambda1", p.lambda1}, {"lambda2", p.lambda2}, {"beta0", p.beta0},
                {"psi2", p.psi2},       {"b1", p.b1},           {"b2", p.b2}};
}

inline ModelParams params_from_json(const json& j) {
    ModelParams p;
    auto rate_from = [&](const char* direct_key, const char* covariate_key) {
        if (j.contains(direct_key)) return j.at(direct_key).get<double>();
        if (j.contains(covariate_key)) {
            CovariateSpec spec;
            spec.x = j.at(covariate_key).at("x").get<std::vector<double>>();
            spec.beta = j.at(covariate_key).at("beta").get<std::vector<double>>();
            return a_priori_rate(spec);
        }
        throw std::invalid_argument(std::string("params: missing ") + direct_key + " (or " +
                                    covariate_key + ")");
    };
    p.lambda1 = rate_from("lambda1", "frequency_covariates");
    p.lambda2 = rate_from("lambda2", "severity_covariates");
    p.beta0 = j.value("beta0", 0.0);
    p.b1 = j.value("b1", 0.0);
    p.b2 = j.value("b2", 0.0);
    if (j.contains("psi2")) {
        p.psi2 = j.at("psi2").get<double>();
    } else if (j.contains("c")) {
        p.psi2 = calibrate_psi(j.at("c").get<double>(), p);
    } else {
        throw std::invalid_argument("params: either psi2 or c is required");
    }
    p.validate();
    return p;
}

inline json to_json(const Portfolio& pf) {
    json classes = json::array();
    for (const auto& rc : pf.classes)
        classes.push_back(json{{"weight", rc.weight}, {"params", to_json(rc.params)}});
    return json{{"classes", classes}};
}

inline Portfolio portfolio_from_json(const json& j) {
    Portfolio pf;
    for (const auto& cj : j.at("classes"))
        pf.classes.push_back({params_from_json(cj.at("params")), cj.at("weight").get<double>()});
    pf.validate();
    return pf;
}

inline json to_json(const ClaimHistory& h) {
    json periods = json::array();
    for (const auto& p : h.periods) periods.push_back(json{{"n", p.n}, {"s", p.s}});
    return json{{"periods", periods}};
}

inline ClaimHistory history_from_json(const json& j) {
    ClaimHistory h;
    for (const auto& pj : j.at("periods"))
        h.periods.push_back({pj.at("n").get<std::int64_t>(), pj.at("s").get<double>()});
    h.validate();
    return h;
}

}  // namespace crm

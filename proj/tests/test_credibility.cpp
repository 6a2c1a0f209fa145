// Unit tests for the credibility layer: structural components, premium
// quotes on claim histories, the count-based variant and its linkage to the
// frequency premium, and the numeric best-linear-predictor cross-check.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "credibility/blp.hpp"
#include "credibility/components.hpp"
#include "credibility/premium.hpp"
#include "simlab/rng.hpp"

using Catch::Matchers::WithinRel;
using credibility::Variant;

namespace {

constexpr double kLambda1 = 0.14956861922263506;  // exp(-1.9)
constexpr double kLambda2 = 4447.066747699856;    // exp(8.4)

crm::ModelParams study_params(double beta0, double b1, double b2, double psi2) {
    crm::ModelParams p;
    p.lambda1 = kLambda1;
    p.lambda2 = kLambda2;
    p.beta0 = beta0;
    p.b1 = b1;
    p.b2 = b2;
    p.psi2 = psi2;
    return p;
}

}  // namespace

TEST_CASE("hypothetical mean and synthetic observation", "[credibility]") {
    const auto p = study_params(0.0, 0.5, 0.01, 1.0);
    // Unit random effects under independence reduce to the plain mean.
    CHECK_THAT(credibility::hypothetical_mean(p, 1.0, 1.0),
               WithinRel(p.lambda1 * p.lambda2, 1e-15));
    CHECK_THROWS_AS(credibility::hypothetical_mean(p, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(credibility::hypothetical_mean(p, 1.0, -1.0), std::invalid_argument);

    auto q = study_params(-0.1, 0.5, 0.01, 1.0);
    q.lambda2 = 100.0;
    CHECK_THAT(credibility::buhlmann_observation(2, q),
               WithinRel(163.74615061559637173, 1e-13));
    CHECK(credibility::buhlmann_observation(0, q) == 0.0);
    CHECK_THROWS_AS(credibility::buhlmann_observation(-1, q), std::invalid_argument);
}

TEST_CASE("aggregate components at the worked example", "[credibility]") {
    auto p = study_params(0.0, 0.5, 0.01, 1.0);
    p.psi2 = crm::calibrate_psi(2.008e7, p);
    const auto c = credibility::components_agg(p, 3);
    CHECK_THAT(c.u, WithinRel(665.14163304436184069, 5e-13));
    CHECK_THAT(c.a, WithinRel(227842.89688459405921, 5e-13));
    CHECK_THAT(c.v, WithinRel(5961267.1128128731943, 5e-13));
    CHECK_THAT(c.z, WithinRel(0.10286677136070585226, 5e-13));
    CHECK(c.t == 3);
    CHECK(c.variant == Variant::AggregateSeverity);
}

TEST_CASE("frequency components", "[credibility]") {
    // All frequency components are free of both b2 and psi2.
    const auto c1 = credibility::components_freq(study_params(0.0, 0.5, 0.01, 1.0), 1);
    CHECK_THAT(c1.a, WithinRel(221206.69600446025166, 5e-13));
    CHECK_THAT(c1.v, WithinRel(2957929.2388223613373, 5e-13));
    CHECK_THAT(c1.z, WithinRel(0.069580760476827530561, 5e-13));

    const auto c2 = credibility::components_freq(study_params(-0.05, 1.5, 0.2, 1.0), 2);
    CHECK_THAT(c2.u, WithinRel(621.36651736096820629, 5e-13));
    CHECK_THAT(c2.a, WithinRel(546964.28730094452071, 5e-13));
    CHECK_THAT(c2.v, WithinRel(2497035.7397421030475, 5e-13));
    CHECK_THAT(c2.z, WithinRel(0.30463365236803561145, 5e-13));

    const auto other_psi =
        credibility::components_freq(study_params(-0.05, 1.5, 0.9, 42.0), 2);
    CHECK(other_psi.a == c2.a);
    CHECK(other_psi.v == c2.v);
}

TEST_CASE("count components and usage guard", "[credibility]") {
    const auto p = study_params(0.0, 0.5, 0.01, 1.0);
    const auto c = credibility::components_freq_count(p, 5);
    CHECK(c.u == p.lambda1);
    CHECK(c.v == p.lambda1);
    CHECK(c.a == p.lambda1 * p.lambda1 * 0.5);
    CHECK_THAT(c.z, WithinRel(0.27215640411601357698, 5e-13));

    CHECK_THROWS_AS(
        credibility::components_freq_count(study_params(-0.05, 0.5, 0.01, 1.0), 5),
        credibility::UsageError);
}

TEST_CASE("aggregate premium worked example", "[credibility]") {
    auto p = study_params(0.0, 0.5, 0.01, 1.0);
    p.psi2 = crm::calibrate_psi(2.008e7, p);
    crm::ClaimHistory h;
    h.periods = {{0, 0.0}, {1, 500.0}, {2, 1300.0}};
    const auto q = credibility::premium_agg(h, p);
    CHECK(q.observation_mean == 600.0);
    CHECK_THAT(q.components.z, WithinRel(0.10286677136070585226, 5e-13));
    CHECK_THAT(q.premium, WithinRel(658.44072357192447012, 5e-13));
}

TEST_CASE("frequency premium worked example", "[credibility]") {
    // The frequency premium reads only the counts; the aggregates and the
    // severity-side parameters (b2, psi2) do not enter.
    const auto p = study_params(-0.05, 1.5, 0.2, 1.0);
    crm::ClaimHistory h;
    h.periods = {{0, 0.0}, {4, 999.0}};
    const auto q = credibility::premium_freq(h, p);
    CHECK_THAT(q.observation_mean, WithinRel(14563.801229329418886 / 2.0, 5e-13));
    CHECK_THAT(q.components.z, WithinRel(0.30463365236803561145, 5e-13));
    CHECK_THAT(q.premium, WithinRel(2650.3893461444439916, 5e-13));

    crm::ClaimHistory other;
    other.periods = {{0, 0.0}, {4, 123456.0}};
    CHECK(credibility::premium_freq(other, p).premium == q.premium);
}

TEST_CASE("empty history quotes the collective premium", "[credibility]") {
    const auto p = study_params(-0.05, 1.5, 0.2, 1.0);
    const crm::ClaimHistory none;
    for (auto variant : {Variant::AggregateSeverity, Variant::Frequency}) {
        const auto q = variant == Variant::AggregateSeverity ? credibility::premium_agg(none, p)
                                                             : credibility::premium_freq(none, p);
        CHECK(q.components.z == 0.0);
        CHECK(q.observation_mean == 0.0);
        CHECK(q.premium == q.components.u);
    }
}

TEST_CASE("credibility coefficients are unbiased", "[credibility]") {
    const auto p = study_params(-0.1, 3.0, 0.4, 1.0);
    const auto c = credibility::components_agg(p, 5);
    const auto co = credibility::coefficients(c);
    CHECK(co.alpha0 == (1.0 - c.z) * c.u);
    CHECK(co.alpha_shared == c.z / 5.0);
    CHECK_THAT(co.alpha0 + 5.0 * co.alpha_shared * c.u, WithinRel(c.u, 1e-14));

    auto c0 = c;
    c0.t = 0;
    CHECK_THROWS_AS(credibility::coefficients(c0), std::invalid_argument);
}

TEST_CASE("frequency premium equals scaled count premium under independence",
          "[credibility]") {
    const auto p = study_params(0.0, 1.5, 0.3, 0.8);
    simlab::RngStream rng(2026, 7);
    for (int rep = 0; rep < 1000; ++rep) {
        crm::ClaimHistory h;
        const int t = 1 + static_cast<int>(rng.next_u64() % 10);
        for (int k = 0; k < t; ++k) {
            const auto n = static_cast<std::int64_t>(rng.next_u64() % 6);
            h.periods.push_back({n, n > 0 ? 100.0 * static_cast<double>(n) : 0.0});
        }
        const double freq = credibility::premium_freq(h, p).premium;
        const double count = credibility::premium_freq_count(h, p).premium;
        REQUIRE_THAT(freq, WithinRel(p.lambda2 * count, 1e-12));
    }
}

TEST_CASE("closed-form coefficients solve the normal equations", "[credibility][blp]") {
    const auto p = study_params(-0.05, 1.5, 0.2, 0.69110663126143244926);
    for (std::int64_t t = 1; t <= 10; ++t) {
        const auto agg = credibility::coefficients(credibility::components_agg(p, t));
        const auto x = credibility::blp_oracle(p, t, Variant::AggregateSeverity);
        REQUIRE(x.size() == static_cast<std::size_t>(t) + 1);
        CHECK_THAT(x[0], WithinRel(agg.alpha0, 1e-9));
        for (std::size_t i = 1; i < x.size(); ++i)
            CHECK_THAT(x[i], WithinRel(agg.alpha_shared, 1e-9));

        const auto freq = credibility::coefficients(credibility::components_freq(p, t));
        const auto y = credibility::blp_oracle(p, t, Variant::Frequency);
        CHECK_THAT(y[0], WithinRel(freq.alpha0, 1e-9));
        for (std::size_t i = 1; i < y.size(); ++i)
            CHECK_THAT(y[i], WithinRel(freq.alpha_shared, 1e-9));
    }
}

TEST_CASE("both frequency cross-moment paths give the same predictor", "[credibility][blp]") {
    const auto p = study_params(-0.1, 3.0, 0.4, 1.0);
    for (std::int64_t t : {1, 4, 10}) {
        const auto a = credibility::blp_oracle(p, t, Variant::Frequency,
                                               credibility::BlpMode::CredibilityWeights);
        const auto b = credibility::blp_oracle(p, t, Variant::Frequency,
                                               credibility::BlpMode::TargetProjection);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK_THAT(a[i], WithinRel(b[i], 1e-11));
    }
}

TEST_CASE("count-variant predictor matches its closed form", "[credibility][blp]") {
    const auto p = study_params(0.0, 0.5, 0.01, 1.0);
    const auto closed = credibility::coefficients(credibility::components_freq_count(p, 5));
    const auto x = credibility::blp_oracle(p, 5, Variant::FrequencyCount);
    CHECK_THAT(x[0], WithinRel(closed.alpha0, 1e-9));
    for (std::size_t i = 1; i < x.size(); ++i)
        CHECK_THAT(x[i], WithinRel(closed.alpha_shared, 1e-9));

    CHECK_THROWS_AS(
        credibility::blp_oracle(study_params(-0.05, 0.5, 0.01, 1.0), 5, Variant::FrequencyCount),
        credibility::UsageError);
}

TEST_CASE("singular normal equations are reported, not solved", "[credibility][blp]") {
    // Two identical observations make the Gram matrix rank deficient.
    const std::vector<double> a = {1.0, 1.0, 1.0, 1.0};
    const std::vector<double> b = {1.0, 1.0};
    try {
        credibility::detail::solve_normal_equations(a, b);
        FAIL("expected SingularSystemError");
    } catch (const credibility::SingularSystemError& e) {
        CHECK(e.condition_estimate > 1e12);
        CHECK(std::string(e.what()).find("singular") != std::string::npos);
    }

    CHECK_THROWS_AS(credibility::detail::solve_normal_equations({1.0, 2.0, 3.0}, {1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("solver recovers a known well-conditioned system", "[credibility][blp]") {
    // 3x3 system with a hand-checked solution x = (1, -2, 3).
    const std::vector<double> a = {4.0, 1.0, 0.5,   //
                                   1.0, 3.0, -1.0,  //
                                   0.5, -1.0, 5.0};
    const std::vector<double> b = {4.0 - 2.0 + 1.5, 1.0 - 6.0 - 3.0, 0.5 + 2.0 + 15.0};
    const auto x = credibility::detail::solve_normal_equations(a, b);
    CHECK_THAT(x[0], WithinRel(1.0, 1e-12));
    CHECK_THAT(x[1], WithinRel(-2.0, 1e-12));
    CHECK_THAT(x[2], WithinRel(3.0, 1e-12));
}

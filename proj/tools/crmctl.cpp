// crmctl: scenario-grid runner, premium quoting, Monte Carlo verification,
// and method recommendation for the dependent collective risk model engine.
//
// Exit codes: 0 success, 1 usage/config error, 2 verification failure,
// 3 infeasible grid cells.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "credibility/premium.hpp"
#include "crm/serialization.hpp"
#include "risk_mse/recommend.hpp"
#include "risk_mse/report.hpp"
#include "simlab/estimators.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitInfeasible = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Parse JSON with a line:column anchor on syntax errors (nlohmann reports a
// byte offset; translate it so config mistakes are easy to find).
nlohmann::json parse_json_text(const std::string& text, const std::string& path) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw std::runtime_error(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                 ": " + e.what());
    }
}

nlohmann::json parse_json_file(const std::string& path) {
    return parse_json_text(read_file(path), path);
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    return out;
}

// Per-unit seed so sampled work gives the same answer however the worker
// pool schedules it.
std::uint64_t derived_seed(std::uint64_t base, std::uint64_t index) {
    return base ^ simlab::splitmix64(index);
}

// Minimal fixed-size worker pool: workers pull unit indices from a shared
// counter; every result lands in a slot addressed by unit index, so outputs
// are independent of scheduling.
void run_pool(int jobs, std::size_t units, const std::function<void(std::size_t)>& work) {
    if (jobs < 1) throw std::runtime_error("--jobs must be >= 1");
    if (units == 0) return;
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= units) return;
            work(i);
        }
    };
    const int extra = static_cast<int>(std::min<std::size_t>(units, static_cast<std::size_t>(jobs))) - 1;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(extra));
    for (int k = 0; k < extra; ++k) pool.emplace_back(drain);
    drain();
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// scenario

struct GridConfig {
    std::vector<double> beta0;
    std::vector<double> b1;
    std::vector<double> b2;
    std::vector<std::int64_t> t;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double c = 0.0;  // severity-variance calibration constant, no default
    std::uint64_t seed = 1;
};

GridConfig grid_from_json(const nlohmann::json& j) {
    GridConfig g;
    const auto& grid = j.at("grid");
    g.beta0 = grid.at("beta0").get<std::vector<double>>();
    g.b1 = grid.at("b1").get<std::vector<double>>();
    g.b2 = grid.at("b2").get<std::vector<double>>();
    if (grid.contains("t")) {
        g.t = grid.at("t").get<std::vector<std::int64_t>>();
    } else {
        for (std::int64_t t = 1; t <= 10; ++t) g.t.push_back(t);
    }
    g.lambda1 = j.at("lambda1").get<double>();
    g.lambda2 = j.at("lambda2").get<double>();
    g.c = j.at("c").get<double>();  // deliberately required: see configs/
    g.seed = j.value("seed", std::uint64_t{1});
    if (g.beta0.empty() || g.b1.empty() || g.b2.empty() || g.t.empty())
        throw std::runtime_error("config: grid lists must be non-empty");
    for (std::int64_t t : g.t)
        if (t < 1) throw std::runtime_error("config: horizons must be >= 1");
    return g;
}

struct Cell {
    double beta0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
};

struct CellOutcome {
    bool feasible = false;
    std::string constraint;  // violated constraint, when infeasible
    crm::ModelParams params;
    std::vector<risk_mse::MseRow> rows;
};

CellOutcome evaluate_cell(const Cell& cell, const GridConfig& g) {
    CellOutcome out;
    crm::ModelParams p;
    p.lambda1 = g.lambda1;
    p.lambda2 = g.lambda2;
    p.beta0 = cell.beta0;
    p.b1 = cell.b1;
    p.b2 = cell.b2;
    try {
        p.psi2 = crm::calibrate_psi(g.c, p);
        p.validate();
    } catch (const std::exception& e) {
        out.constraint = e.what();
        return out;
    }
    out.feasible = true;
    out.params = p;
    out.rows.reserve(g.t.size());
    for (std::int64_t t : g.t) out.rows.push_back(risk_mse::recommend(p, t));
    return out;
}

void write_figure(const std::filesystem::path& path, const std::vector<CellOutcome>& cells,
                  double beta0, const std::vector<std::int64_t>& horizons, bool with_limit) {
    auto out = open_output(path);
    out << "beta0,b1,b2,t,hmse1,hmse2" << (with_limit ? ",hmse2_limit" : "") << "\n";
    for (const auto& cell : cells) {
        if (!cell.feasible || cell.params.beta0 != beta0) continue;
        for (std::int64_t t : horizons) {
            const double h1 = risk_mse::hmse_agg_expanded(cell.params, t);
            const double h2 = risk_mse::hmse_freq_expanded(cell.params, t);
            out << risk_mse::format_g17(cell.params.beta0) << ','
                << risk_mse::format_g17(cell.params.b1) << ','
                << risk_mse::format_g17(cell.params.b2) << ',' << t << ','
                << risk_mse::format_g17(h1) << ',' << risk_mse::format_g17(h2);
            if (with_limit) out << ',' << risk_mse::format_g17(risk_mse::hmse_freq_limit(cell.params));
            out << '\n';
        }
    }
}

struct PublishedRow {
    double beta0 = 0.0, b1 = 0.0, b2 = 0.0;
    std::int64_t t = 0;
    double hmse1 = 0.0, hmse2 = 0.0;  // in units of 1e6, as published
};

std::vector<PublishedRow> parse_published_csv(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<PublishedRow> rows;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "beta0,b1,b2,t,hmse1,hmse2")
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected header beta0,b1,b2,t,hmse1,hmse2");
            header_seen = true;
            continue;
        }
        std::istringstream fields(line);
        std::string tok;
        std::vector<double> v;
        while (std::getline(fields, tok, ',')) v.push_back(std::stod(tok));
        if (v.size() != 6)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 6 fields");
        rows.push_back({v[0], v[1], v[2], static_cast<std::int64_t>(v[3]), v[4], v[5]});
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data rows");
    return rows;
}

const char* ordering_name(double h1, double h2) {
    return risk_mse::recommendation_name(risk_mse::prefer(h1, h2));
}

// Computed-vs-published comparison.  Published values are in units of 1e6
// and are converted to raw before differencing; the binding check is the
// preference ordering, not the cell values.
int write_comparison(const std::filesystem::path& path, const std::vector<PublishedRow>& pub,
                     const GridConfig& g, std::size_t* matched, std::size_t* comparable) {
    auto out = open_output(path);
    out << "beta0,b1,b2,t,hmse1,hmse2,published_hmse1,published_hmse2,"
           "rel_dev1,rel_dev2,preferred,published_preferred,ordering_match\n";
    *matched = 0;
    *comparable = 0;
    for (const auto& row : pub) {
        crm::ModelParams p;
        p.lambda1 = g.lambda1;
        p.lambda2 = g.lambda2;
        p.beta0 = row.beta0;
        p.b1 = row.b1;
        p.b2 = row.b2;
        const double pub1 = row.hmse1 * 1e6;
        const double pub2 = row.hmse2 * 1e6;
        out << risk_mse::format_g17(row.beta0) << ',' << risk_mse::format_g17(row.b1) << ','
            << risk_mse::format_g17(row.b2) << ',' << row.t << ',';
        try {
            p.psi2 = crm::calibrate_psi(g.c, p);
            p.validate();
        } catch (const std::exception&) {
            out << ",,"
                << risk_mse::format_g17(pub1) << ',' << risk_mse::format_g17(pub2)
                << ",,,," << ordering_name(pub1, pub2) << ",infeasible\n";
            continue;
        }
        const double h1 = risk_mse::hmse_agg_expanded(p, row.t);
        const double h2 = risk_mse::hmse_freq_expanded(p, row.t);
        const char* ours = ordering_name(h1, h2);
        const char* theirs = ordering_name(pub1, pub2);
        const bool match = std::string(ours) == theirs;
        ++*comparable;
        if (match) ++*matched;
        out << risk_mse::format_g17(h1) << ',' << risk_mse::format_g17(h2) << ','
            << risk_mse::format_g17(pub1) << ',' << risk_mse::format_g17(pub2) << ','
            << risk_mse::format_g17(h1 / pub1 - 1.0) << ','
            << risk_mse::format_g17(h2 / pub2 - 1.0) << ',' << ours << ',' << theirs << ','
            << (match ? "yes" : "no") << '\n';
    }
    return kExitOk;
}

int cmd_scenario(const std::string& config_path, const std::string& out_dir, int jobs,
                 const std::string& published_path, double scale,
                 std::optional<std::uint64_t> seed_override) {
    const auto config = parse_json_file(config_path);
    GridConfig g = grid_from_json(config);
    if (seed_override) g.seed = *seed_override;

    std::vector<Cell> cells;
    for (double beta0 : g.beta0)
        for (double b1 : g.b1)
            for (double b2 : g.b2) cells.push_back({beta0, b1, b2});

    std::vector<CellOutcome> outcomes(cells.size());
    run_pool(jobs, cells.size(), [&](std::size_t i) { outcomes[i] = evaluate_cell(cells[i], g); });

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    std::vector<risk_mse::MseRow> all_rows;
    std::size_t infeasible = 0;
    for (const auto& o : outcomes) {
        if (o.feasible)
            all_rows.insert(all_rows.end(), o.rows.begin(), o.rows.end());
        else
            ++infeasible;
    }
    {
        auto out = open_output(dir / "hmse.csv");
        out << risk_mse::to_csv(all_rows);
    }
    {
        auto out = open_output(dir / "infeasible.csv");
        out << "beta0,b1,b2,constraint\n";
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (outcomes[i].feasible) continue;
            std::string reason = outcomes[i].constraint;
            for (char& ch : reason)
                if (ch == ',' || ch == '\n') ch = ';';
            out << risk_mse::format_g17(cells[i].beta0) << ','
                << risk_mse::format_g17(cells[i].b1) << ','
                << risk_mse::format_g17(cells[i].b2) << ',' << reason << '\n';
        }
    }

    // Plot data: one standard-horizon figure for the first beta0, one
    // extended-horizon figure showing the HMSE2 floor, then one figure per
    // remaining beta0 value.
    std::vector<std::int64_t> extended;
    for (std::int64_t t = 1; t <= 40; ++t) extended.push_back(t);
    int fig = 1;
    write_figure(dir / ("figure" + std::to_string(fig++) + ".csv"), outcomes, g.beta0.front(),
                 g.t, false);
    write_figure(dir / ("figure" + std::to_string(fig++) + ".csv"), outcomes, g.beta0.front(),
                 extended, true);
    for (std::size_t i = 1; i < g.beta0.size(); ++i)
        write_figure(dir / ("figure" + std::to_string(fig++) + ".csv"), outcomes, g.beta0[i],
                     g.t, false);

    std::printf("scenario: %zu cells, %zu infeasible, %zu hmse rows, seed %llu\n", cells.size(),
                infeasible, all_rows.size(), static_cast<unsigned long long>(g.seed));
    std::printf("wrote %s, %s, %d figure files\n", (dir / "hmse.csv").string().c_str(),
                (dir / "infeasible.csv").string().c_str(), fig - 1);

    if (!published_path.empty()) {
        const auto pub = parse_published_csv(published_path);
        std::size_t matched = 0, comparable = 0;
        write_comparison(dir / "comparison_vs_published.csv", pub, g, &matched, &comparable);
        std::printf("comparison: %zu/%zu preference orderings matched -> %s\n", matched,
                    comparable, (dir / "comparison_vs_published.csv").string().c_str());
    }

    if (scale != 1.0 && scale > 0.0) {
        std::printf("\npreview (values / %g):\n", scale);
        std::printf("%8s %6s %6s %4s %12s %12s\n", "beta0", "b1", "b2", "t", "hmse1", "hmse2");
        for (const auto& row : all_rows)
            if (row.t == 1 || row.t == 5 || row.t == 10)
                std::printf("%8g %6g %6g %4lld %12.4f %12.4f\n", row.beta0, row.b1, row.b2,
                            static_cast<long long>(row.t), row.hmse1 / scale, row.hmse2 / scale);
    }

    return infeasible > 0 ? kExitInfeasible : kExitOk;
}

// ---------------------------------------------------------------------------
// premium / quote

int cmd_premium(const std::string& config_path, const std::string& history_path,
                const std::string& variant) {
    const auto p = crm::params_from_json(parse_json_file(config_path));
    const auto h = crm::history_from_json(parse_json_file(history_path));
    credibility::PremiumQuote q;
    if (variant == "agg")
        q = credibility::premium_agg(h, p);
    else if (variant == "freq")
        q = credibility::premium_freq(h, p);
    else if (variant == "count")
        q = credibility::premium_freq_count(h, p);
    else
        throw std::runtime_error("--variant must be one of agg, freq, count");
    const auto coef = credibility::coefficients(q.components);
    nlohmann::json out{{"variant", credibility::variant_name(q.components.variant)},
                       {"t", q.components.t},
                       {"premium", q.premium},
                       {"z", q.components.z},
                       {"u", q.components.u},
                       {"a", q.components.a},
                       {"v", q.components.v},
                       {"alpha0", coef.alpha0},
                       {"alpha_shared", coef.alpha_shared},
                       {"observation_mean", q.observation_mean}};
    std::printf("%s\n", out.dump(2).c_str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct CheckRow {
    std::string name;
    double reference = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    bool pass = false;
};

int cmd_verify(const std::string& config_path, std::int64_t n, std::uint64_t seed, int jobs) {
    const auto p = crm::params_from_json(parse_json_file(config_path));
    if (n < 10000) throw std::runtime_error("--n must be >= 10000 for usable standard errors");
    constexpr std::int64_t kHorizon = 5;
    constexpr std::int64_t kKsSamples = 100000;

    // Units: 0 = nine-moment suite, 1..2 = premium MSE (agg, freq),
    // 3..5 = average-severity equivalence at n0 = 1, 2, 5.  Each unit owns a
    // stream seeded from (seed, unit), so results don't depend on --jobs.
    std::vector<std::vector<CheckRow>> unit_rows(6);
    run_pool(jobs, unit_rows.size(), [&](std::size_t u) {
        simlab::RngStream rng(derived_seed(seed, u), u);
        if (u == 0) {
            for (const auto& mc : simlab::moment_checks(p, n, rng)) {
                CheckRow row{mc.name, mc.closed_form, mc.estimate, mc.std_error, mc.z, false};
                row.pass = std::isfinite(mc.z) && std::fabs(mc.z) < 4.0;
                unit_rows[u].push_back(row);
            }
        } else if (u == 1 || u == 2) {
            const auto variant = (u == 1) ? credibility::Variant::AggregateSeverity
                                          : credibility::Variant::Frequency;
            const double closed = (u == 1) ? risk_mse::hmse_agg_simplified(p, kHorizon)
                                           : risk_mse::hmse_freq_simplified(p, kHorizon);
            const auto est = simlab::empirical_premium_mse(p, kHorizon, n, variant, rng);
            CheckRow row;
            row.name = std::string("premium_mse_") + ((u == 1) ? "agg" : "freq") + "_t" +
                       std::to_string(kHorizon);
            row.reference = closed;
            row.estimate = est.value;
            row.std_error = est.std_error;
            if (est.std_error > 0.0)
                row.z = (est.value - closed) / est.std_error;
            else
                row.z = (est.value == closed) ? 0.0 : std::numeric_limits<double>::infinity();
            row.pass = std::isfinite(row.z) && std::fabs(row.z) < 4.0;
            unit_rows[u].push_back(row);
        } else {
            const std::int64_t n0 = (u == 3) ? 1 : (u == 4) ? 2 : 5;
            const auto res = simlab::average_severity_equivalence_test(p, kKsSamples, n0, rng);
            CheckRow row;
            row.name = "avg_severity_ks_n0_" + std::to_string(n0);
            row.reference = res.critical_value;
            row.estimate = res.distance;
            row.std_error = 0.0;
            row.z = res.distance / res.critical_value;
            row.pass = res.pass;
            unit_rows[u].push_back(row);
        }
    });

    std::vector<CheckRow> rows;
    for (auto& u : unit_rows) rows.insert(rows.end(), u.begin(), u.end());
    if (p.b2 == 0.0) {
        // Degenerate severity effect: the frequency premium's error floor
        // must vanish identically.
        const double limit = risk_mse::hmse_freq_limit(p);
        rows.push_back({"hmse_freq_limit_zero", 0.0, limit, 0.0, 0.0, limit == 0.0});
    }

    std::printf("verify: beta0=%g b1=%g b2=%g psi2=%.17g n=%lld seed=%llu t=%lld\n", p.beta0,
                p.b1, p.b2, p.psi2, static_cast<long long>(n),
                static_cast<unsigned long long>(seed), static_cast<long long>(kHorizon));
    std::printf("%-34s %15s %15s %12s %9s %s\n", "check", "reference", "estimate", "std_error",
                "z", "status");
    bool all_pass = true;
    for (const auto& r : rows) {
        all_pass = all_pass && r.pass;
        std::printf("%-34s %15.8g %15.8g %12.5g %9.3f %s\n", r.name.c_str(), r.reference,
                    r.estimate, r.std_error, r.z, r.pass ? "ok" : "FAIL");
    }
    std::printf("verify: %s\n", all_pass ? "PASS" : "FAIL");
    return all_pass ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------
// recommend

int cmd_recommend(const std::string& config_path, std::int64_t t_max, double scale) {
    const auto p = crm::params_from_json(parse_json_file(config_path));
    if (t_max < 1) throw std::runtime_error("--tmax must be >= 1");
    const std::int64_t scan_max = std::max<std::int64_t>(t_max, 100);

    auto show = [&](double x) {
        char buf[40];
        if (scale != 1.0 && scale > 0.0)
            std::snprintf(buf, sizeof(buf), "%.4f", x / scale);
        else
            std::snprintf(buf, sizeof(buf), "%.17g", x);
        return std::string(buf);
    };

    std::printf("%4s %22s %22s %s\n", "t", "hmse1", "hmse2", "preferred");
    std::optional<std::int64_t> crossover;
    double limit = 0.0;
    for (std::int64_t t = 1; t <= t_max; ++t) {
        const auto row = risk_mse::recommend(p, t, scan_max);
        crossover = row.crossover;
        limit = row.hmse2_limit;
        std::printf("%4lld %22s %22s %s\n", static_cast<long long>(t), show(row.hmse1).c_str(),
                    show(row.hmse2).c_str(), risk_mse::recommendation_name(row.recommended));
    }
    if (crossover)
        std::printf("crossover: t=%lld\n", static_cast<long long>(*crossover));
    else
        std::printf("crossover: none up to t=%lld\n", static_cast<long long>(scan_max));
    std::printf("hmse2 limit: %s\n", show(limit).c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"credibility premium engine for the dependent collective risk model"};
    app.require_subcommand(1);

    std::string config_path, out_dir, history_path, published_path;
    std::string variant = "agg";
    int jobs = 1;
    std::int64_t n = 1000000;
    std::int64_t t_max = 10;
    double scale = 1.0;
    std::uint64_t seed = 1;
    bool seed_given = false;

    auto* scenario = app.add_subcommand("scenario", "run the scenario grid and emit reports");
    scenario->add_option("--config", config_path, "grid config JSON")->required();
    scenario->add_option("--out", out_dir, "output directory")->required();
    scenario->add_option("--jobs", jobs, "worker pool size");
    scenario->add_option("--published", published_path, "published-table CSV for comparison");
    scenario->add_option("--scale", scale, "display scaling for the stdout preview");
    scenario->add_option("--seed", seed, "override the config's seed")
        ->each([&](const std::string&) { seed_given = true; });

    auto* premium = app.add_subcommand("premium", "quote a credibility premium for a history");
    premium->alias("quote");
    premium->add_option("--config", config_path, "model params JSON")->required();
    premium->add_option("--history", history_path, "claim history JSON")->required();
    premium->add_option("--variant", variant, "agg, freq, or count");

    auto* verify = app.add_subcommand("verify", "Monte Carlo check of every closed form");
    verify->add_option("--config", config_path, "model params JSON")->required();
    verify->add_option("--n", n, "policyholders per estimate");
    verify->add_option("--seed", seed, "base RNG seed");
    verify->add_option("--jobs", jobs, "worker pool size");

    auto* recommend = app.add_subcommand("recommend", "preferred premium method per horizon");
    recommend->add_option("--config", config_path, "model params JSON")->required();
    recommend->add_option("--tmax", t_max, "horizons to display");
    recommend->add_option("--scale", scale, "display scaling (e.g. 1e6)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (scenario->parsed())
            return cmd_scenario(config_path, out_dir, jobs, published_path, scale,
                                seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
        if (premium->parsed()) return cmd_premium(config_path, history_path, variant);
        if (verify->parsed()) return cmd_verify(config_path, n, seed, jobs);
        if (recommend->parsed()) return cmd_recommend(config_path, t_max, scale);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "crmctl: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}

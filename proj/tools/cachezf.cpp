// cachezf: batch front end for the cache-aided interference management
// toolkit. Subcommands: demo, sweep, verify, bounds, exact. All reports are
// deterministic given (subcommand, config, seed).

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cachezf/converse.hpp"
#include "cachezf/json_io.hpp"
#include "cachezf/phy.hpp"
#include "cachezf/scheduler.hpp"

namespace {

using namespace cachezf;

constexpr std::uint64_t kDefaultSeed = 12345;  // documented default; override with --seed or CACHEZF_SEED
constexpr int kPermutationCutoff = 720;        // enumerate distinct demands up to this many
constexpr int kSampleCount = 100;              // seeded sample size beyond the cutoff

struct Output {
    std::string path;  // empty = stdout
    std::string format = "json";

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        f << text;
    }
};

Json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    Json j;
    try {
        f >> j;
    } catch (const Json::parse_error& e) {
        throw std::runtime_error("parse error in " + path + ": " + e.what());
    }
    return j;
}

DemandVector parse_demand(const std::string& text, const NetworkConfig& cfg) {
    DemandVector d;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) d.demands.push_back(std::stoi(token));
    d.validate(cfg);
    return d;
}

DemandVector default_demand(const NetworkConfig& cfg) {
    DemandVector d;
    for (int j = 0; j < cfg.k_r; ++j) d.demands.push_back(1 + j % cfg.n_files);
    return d;
}

std::string csv_escape_demand(const std::vector<int>& demands) {
    std::string out;
    for (std::size_t i = 0; i < demands.size(); ++i) {
        if (i) out += '|';
        out += std::to_string(demands[i]);
    }
    return out;
}

// ---------------------------------------------------------------- demo ----

// The 3x3 worked example pinned structurally: six groups of three, each
// given as the set of (file, tx_set, cached_at) triples it must deliver.
struct ExpectedTriple {
    int file;
    std::vector<int> tx_set;
    std::vector<int> cached_at;
};
const std::vector<std::vector<ExpectedTriple>> kDemoPartition = {
    {{1, {1, 2}, {2}}, {2, {2, 3}, {3}}, {3, {1, 3}, {1}}},
    {{1, {1, 2}, {3}}, {2, {1, 3}, {1}}, {3, {2, 3}, {2}}},
    {{1, {1, 3}, {2}}, {2, {1, 2}, {3}}, {3, {2, 3}, {1}}},
    {{1, {1, 3}, {3}}, {2, {2, 3}, {1}}, {3, {1, 2}, {2}}},
    {{1, {2, 3}, {2}}, {2, {1, 3}, {3}}, {3, {1, 2}, {1}}},
    {{1, {2, 3}, {3}}, {2, {1, 2}, {1}}, {3, {1, 3}, {2}}},
};

int run_demo(std::uint64_t seed, const Output& output, const PhyTolerances& tol) {
    const NetworkConfig cfg{3, 3, 3, Rational(2), Rational(1), 9};
    const DemandVector d{{1, 2, 3}};
    std::vector<std::string> mismatches;

    const auto subfiles = split_file(1, cfg);
    if (subfiles.size() != 9)
        mismatches.push_back("expected 9 base subfiles per file, got " + std::to_string(subfiles.size()));

    const auto needed = needed_subfiles(d, cfg);
    if (needed.size() != 18)
        mismatches.push_back("expected 18 needed subfiles, got " + std::to_string(needed.size()));

    const auto s = schedule(d, cfg);
    if (s.groups.size() != 6)
        mismatches.push_back("expected 6 delivery groups, got " + std::to_string(s.groups.size()));

    for (std::size_t gi = 0; gi < s.assignments.size() && gi < kDemoPartition.size(); ++gi) {
        std::set<std::tuple<int, std::vector<int>, std::vector<int>>> got, want;
        for (const auto& a : s.assignments[gi]) got.insert({a.subfile.file, a.subfile.tx_set, a.subfile.cached_at});
        for (const auto& e : kDemoPartition[gi]) want.insert({e.file, e.tx_set, e.cached_at});
        if (got != want) {
            Json got_json = Json::array(), want_json = Json::array();
            for (const auto& [file, tx, cached] : got) got_json.push_back({{"file", file}, {"tx", tx}, {"cached", cached}});
            for (const auto& [file, tx, cached] : want) want_json.push_back({{"file", file}, {"tx", tx}, {"cached", cached}});
            mismatches.push_back("group " + std::to_string(gi + 1) + " differs: got " + got_json.dump() +
                                 ", want " + want_json.dump());
        }
    }

    const auto dof = measured_dof(s);
    if (!dof || *dof != Rational(3))
        mismatches.push_back("expected sum-DoF exactly 3, got " + (dof ? to_string(*dof) : "none"));

    const auto verification = verify_schedule_seeded(s, d, seed, cfg, tol);
    if (!verification.ok) mismatches.push_back("zero-forcing verification failed");

    const auto bounds = dof_bounds(cfg);

    Json report{{"subcommand", "demo"},
                {"seed", seed},
                {"schedule", to_json(s)},
                {"verification", to_json(verification)},
                {"bounds", to_json(bounds)},
                {"mismatches", mismatches}};
    output.write(report.dump(2) + "\n");

    for (const auto& m : mismatches) std::cerr << "demo mismatch: " << m << "\n";
    return mismatches.empty() ? 0 : 1;
}

// --------------------------------------------------------------- sweep ----

std::vector<DemandVector> demand_samples(const NetworkConfig& cfg, std::uint64_t seed) {
    std::vector<DemandVector> out;
    const int n = cfg.n_files, k = cfg.k_r;
    long long permutations = 1;
    for (int i = 0; i < k && permutations <= kPermutationCutoff; ++i) permutations *= (n - i);
    if (n >= k && permutations <= kPermutationCutoff) {
        std::vector<int> demand(k);
        std::vector<bool> used(n + 1, false);
        auto recurse = [&](auto&& self, int pos) -> void {
            if (pos == k) {
                out.push_back(DemandVector{demand});
                return;
            }
            for (int f = 1; f <= n; ++f) {
                if (used[f]) continue;
                used[f] = true;
                demand[pos] = f;
                self(self, pos + 1);
                used[f] = false;
            }
        };
        recurse(recurse, 0);
        return out;
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < kSampleCount; ++i) {
        DemandVector d;
        for (int j = 0; j < k; ++j) d.demands.push_back(1 + static_cast<int>(rng() % n));
        out.push_back(std::move(d));
    }
    return out;
}

struct SweepRecord {
    NetworkConfig requested;  // as enumerated (may be oversized)
    NetworkConfig scheduled;  // after saturation, what actually ran
    DemandVector demand;
    long long delivered = 0;
    long long blocks = 0;
    Rational dof{0};
    BoundsReport bounds;
    double max_residual = 0.0;
    std::uint64_t seed = 0;
    bool pass = false;
};

Json record_to_json(const SweepRecord& r) {
    return Json{{"config", to_json(r.requested)},
                {"scheduled_config", to_json(r.scheduled)},
                {"demand", r.demand.demands},
                {"delivered", r.delivered},
                {"blocks", r.blocks},
                {"dof", rational_to_json(r.dof)},
                {"dof_lower", rational_to_json(r.bounds.dof_lower)},
                {"dof_upper", rational_to_json(r.bounds.dof_upper)},
                {"gap_ratio", rational_to_json(r.bounds.gap_ratio)},
                {"max_residual", double_to_decimal(r.max_residual)},
                {"seed", r.seed},
                {"pass", r.pass}};
}

int run_sweep(const Json& request, std::uint64_t seed, const Output& output, const PhyTolerances& tol) {
    std::vector<NetworkConfig> configs;
    if (request.contains("sweep")) {
        const auto& sw = request.at("sweep");
        int k_t_lo = 1, k_t_hi = 1, k_r_lo = 1, k_r_hi = 1;
        if (sw.contains("k_t")) {
            k_t_lo = sw.at("k_t").at(0).get<int>();
            k_t_hi = sw.at("k_t").at(1).get<int>();
        }
        if (sw.contains("k_r")) {
            k_r_lo = sw.at("k_r").at(0).get<int>();
            k_r_hi = sw.at("k_r").at(1).get<int>();
        }
        const bool include_saturated = sw.value("include_saturated", true);
        if (k_t_lo < 1 || k_r_lo < 1 || k_t_hi < k_t_lo || k_r_hi < k_r_lo)
            throw std::runtime_error("sweep: empty or invalid k_t/k_r ranges");
        // Every integer replication pair, realized with N = K_T * K_R so the
        // cache sizes stay integral.
        for (int k_t = k_t_lo; k_t <= k_t_hi; ++k_t)
            for (int k_r = k_r_lo; k_r <= k_r_hi; ++k_r)
                for (int t_t = 1; t_t <= k_t; ++t_t)
                    for (int t_r = 0; t_r <= k_r; ++t_r) {
                        if (!include_saturated && t_t + t_r > k_r) continue;
                        configs.push_back(
                            {k_t, k_r, k_t * k_r, Rational(t_t * k_r), Rational(t_r * k_t), 0});
                    }
    } else {
        configs.push_back(config_from_json(request));
    }

    std::vector<SweepRecord> records;
    bool all_pass = true;
    for (const auto& requested : configs) {
        requested.validate();
        const bool oversized = requested.t_t() + requested.t_r() > Rational(requested.k_r);
        const NetworkConfig scheduled = oversized ? saturate(requested) : requested;
        if (!scheduled.integral_t())
            throw std::runtime_error("sweep: config with fractional replication; decompose it first");
        const auto bounds = dof_bounds(requested);
        const auto demands = demand_samples(scheduled, seed);
        for (std::size_t di = 0; di < demands.size(); ++di) {
            SweepRecord rec;
            rec.requested = requested;
            rec.scheduled = scheduled;
            rec.demand = demands[di];
            rec.bounds = bounds;
            rec.seed = seed + di;
            const auto s = schedule(rec.demand, scheduled);
            rec.delivered = s.delivered;
            rec.blocks = s.total_blocks();
            const auto dof = measured_dof(s);
            rec.dof = dof.value_or(Rational(0));
            const auto verification = verify_schedule_seeded(s, rec.demand, rec.seed, scheduled, tol);
            rec.max_residual = verification.max_post_cancel_residual;
            rec.pass = verification.ok && dof.has_value() && *dof == bounds.dof_lower &&
                       bounds.gap_ratio <= Rational(2);
            all_pass = all_pass && rec.pass;
            records.push_back(std::move(rec));
        }
    }

    if (output.format == "csv") {
        std::string text =
            "k_t,k_r,n,m_t,m_r,f,t_t,t_r,demand,delivered,blocks,dof,dof_lower,dof_upper,gap,max_residual,seed\n";
        for (const auto& r : records) {
            const auto& c = r.requested;
            text += std::to_string(c.k_t) + "," + std::to_string(c.k_r) + "," + std::to_string(c.n_files) +
                    "," + to_string(c.m_t) + "," + to_string(c.m_r) + "," +
                    std::to_string(effective_f(r.scheduled)) + "," + to_string(c.t_t()) + "," +
                    to_string(c.t_r()) + "," + csv_escape_demand(r.demand.demands) + "," +
                    std::to_string(r.delivered) + "," + std::to_string(r.blocks) + "," + to_string(r.dof) +
                    "," + to_string(r.bounds.dof_lower) + "," + to_string(r.bounds.dof_upper) + "," +
                    to_string(r.bounds.gap_ratio) + "," + double_to_decimal(r.max_residual) + "," +
                    std::to_string(r.seed) + "\n";
        }
        output.write(text);
    } else {
        Json jr = Json::array();
        for (const auto& r : records) jr.push_back(record_to_json(r));
        Json report{{"subcommand", "sweep"}, {"seed", seed}, {"records", std::move(jr)}, {"all_pass", all_pass}};
        output.write(report.dump(2) + "\n");
    }

    if (!all_pass)
        for (const auto& r : records)
            if (!r.pass) {
                std::cerr << "sweep failure: " << record_to_json(r).dump() << "\n";
                break;
            }
    return all_pass ? 0 : 1;
}

// -------------------------------------------------------------- verify ----

int run_verify(const NetworkConfig& cfg, const std::string& demand_text, std::uint64_t seed,
               const Output& output, const PhyTolerances& tol) {
    const bool oversized = cfg.t_t() + cfg.t_r() > Rational(cfg.k_r);
    const NetworkConfig scheduled = oversized ? saturate(cfg) : cfg;
    const DemandVector d = demand_text.empty() ? default_demand(scheduled) : parse_demand(demand_text, scheduled);
    const auto s = schedule(d, scheduled);
    const auto verification = verify_schedule_seeded(s, d, seed, scheduled, tol);
    Json report{{"subcommand", "verify"},
                {"seed", seed},
                {"config", to_json(cfg)},
                {"scheduled_config", to_json(scheduled)},
                {"schedule", to_json(s)},
                {"verification", to_json(verification)}};
    output.write(report.dump(2) + "\n");
    return verification.ok ? 0 : 1;
}

// --------------------------------------------------------------- exact ----

int run_exact(const std::string& instance_path, int cap, const Output& output) {
    const auto inst = instance_from_json(load_json_file(instance_path));
    const int exact = min_blocks_exact(inst.packets, cap);
    const int greedy = min_blocks_greedy(inst.packets);
    Json report{{"subcommand", "exact"},
                {"instance", instance_path},
                {"packets", inst.packets.size()},
                {"exact_blocks", exact},
                {"greedy_blocks", greedy}};
    if (inst.config) report["analytic_block_lb"] = rational_to_json(analytic_block_lb(*inst.config));
    output.write(report.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cache-aided interference management: placement, scheduling, zero-forcing checks, and converse bounds"};
    app.require_subcommand(1);

    std::uint64_t seed = kDefaultSeed;
    std::string out_path;
    std::string format = "json";
    std::string config_path;
    std::string demand_text;
    std::string instance_path;
    int exact_cap = cachezf::kDefaultExactCap;
    double tol_zero = cachezf::PhyTolerances{}.tol_zero;

    app.add_option("--seed", seed, "channel seed")->envname("CACHEZF_SEED");
    app.add_option("--out", out_path, "output path (default: stdout)");
    app.add_option("--format", format, "json|csv (csv: sweep only)")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--exact-cap", exact_cap, "packet cap for the exact solver");
    app.add_option("--tol-zero", tol_zero, "relative residual tolerance for decodability");

    auto* demo = app.add_subcommand("demo", "run and check the built-in 3x3 worked example");
    auto* sweep = app.add_subcommand("sweep", "sweep configs, assert DoF formula and factor-2 gap");
    sweep->add_option("--config", config_path, "config or sweep-range JSON file")->required();
    auto* verify = app.add_subcommand("verify", "schedule one config and verify zero-forcing numerically");
    verify->add_option("--config", config_path, "config JSON file")->required();
    verify->add_option("--demand", demand_text, "comma-separated demand vector, e.g. 1,2,3");
    auto* bounds = app.add_subcommand("bounds", "achievable and converse DoF bounds for one config");
    bounds->add_option("--config", config_path, "config JSON file")->required();
    auto* exact = app.add_subcommand("exact", "solve a min-block instance exactly");
    exact->add_option("instance", instance_path, "packet instance JSON file")->required();
    for (auto* sub : {demo, sweep, verify, bounds, exact}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    const Output output{out_path, format};
    cachezf::PhyTolerances tol;
    tol.tol_zero = tol_zero;

    try {
        const auto started = std::chrono::steady_clock::now();
        int rc = 1;
        if (demo->parsed()) {
            rc = run_demo(seed, output, tol);
        } else if (sweep->parsed()) {
            rc = run_sweep(load_json_file(config_path), seed, output, tol);
        } else if (verify->parsed()) {
            if (format != "json") throw std::runtime_error("verify supports only --format json");
            rc = run_verify(cachezf::config_from_json(load_json_file(config_path)), demand_text, seed, output, tol);
        } else if (bounds->parsed()) {
            if (format != "json") throw std::runtime_error("bounds supports only --format json");
            const auto cfg = cachezf::config_from_json(load_json_file(config_path));
            cachezf::Json report{{"subcommand", "bounds"},
                                 {"config", cachezf::to_json(cfg)},
                                 {"bounds", cachezf::to_json(cachezf::dof_bounds(cfg))}};
            output.write(report.dump(2) + "\n");
            rc = 0;
        } else if (exact->parsed()) {
            if (format != "json") throw std::runtime_error("exact supports only --format json");
            rc = run_exact(instance_path, exact_cap, output);
        }
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
        std::cerr << "elapsed: " << elapsed.count() << " ms\n";  // stderr: reports stay byte-identical
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

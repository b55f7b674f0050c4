#pragma once

#include <json.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "cachezf/config.hpp"
#include "cachezf/converse.hpp"
#include "cachezf/phy.hpp"
#include "cachezf/placement.hpp"
#include "cachezf/rational.hpp"
#include "cachezf/scheduler.hpp"

namespace cachezf {

using Json = nlohmann::json;

// Rationals travel as JSON integers when exact, else "p/q" strings, so that
// nothing is ever rounded on the wire.
inline Json rational_to_json(const Rational& q) {
    if (is_integer(q)) return q.numerator();
    return to_string(q);
}

inline Rational rational_from_json(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw std::invalid_argument("expected an integer or a \"p/q\" string, got: " + j.dump());
}

/// Full double precision as a decimal string; round-trips bit-for-bit.
inline std::string double_to_decimal(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline Json to_json(const NetworkConfig& cfg) {
    Json j{{"k_t", cfg.k_t}, {"k_r", cfg.k_r}, {"n_files", cfg.n_files},
           {"m_t", rational_to_json(cfg.m_t)}, {"m_r", rational_to_json(cfg.m_r)}};
    if (cfg.f_packets > 0) j["f_packets"] = cfg.f_packets;
    return j;
}

inline NetworkConfig config_from_json(const Json& j) {
    NetworkConfig cfg;
    cfg.k_t = j.at("k_t").get<int>();
    cfg.k_r = j.at("k_r").get<int>();
    cfg.n_files = j.at("n_files").get<int>();
    cfg.m_t = rational_from_json(j.at("m_t"));
    cfg.m_r = rational_from_json(j.at("m_r"));
    cfg.f_packets = j.value("f_packets", 0LL);
    cfg.validate();
    return cfg;
}

inline Json to_json(const RefinedSubfileId& id) {
    return Json{{"file", id.file},         {"intended_rx", id.intended_rx}, {"tx_set", id.tx_set},
                {"cached_at", id.cached_at}, {"nulled_at", id.nulled_at}};
}

inline Json to_json(const Schedule& s) {
    Json groups = Json::array();
    for (std::size_t gi = 0; gi < s.groups.size(); ++gi) {
        const auto& g = s.groups[gi];
        Json assignments = Json::array();
        for (const auto& a : s.assignments[gi])
            assignments.push_back(Json{{"slot", a.slot}, {"rx", a.rx}, {"subfile", to_json(a.subfile)}});
        groups.push_back(Json{{"base_tx_set", g.base_tx_set},
                              {"rx_set", g.rx_set},
                              {"circ_perm", g.circ_perm},
                              {"assignments", std::move(assignments)}});
    }
    Json summary{{"delivered", s.delivered}, {"blocks", s.total_blocks()}};
    if (auto dof = measured_dof(s)) {
        summary["dof"] = rational_to_json(*dof);
    } else {
        summary["dof"] = "no-delivery-needed";
    }
    return Json{{"config", to_json(s.cfg)},
                {"demand", s.demand.demands},
                {"groups", std::move(groups)},
                {"summary", std::move(summary)}};
}

inline Json to_json(const BlockReport& report) {
    Json receivers = Json::array();
    for (const auto& rr : report.receivers) {
        Json terms = Json::array();
        for (const auto& t : rr.interference)
            terms.push_back(Json{{"slot", t.slot},
                                 {"magnitude", double_to_decimal(t.magnitude)},
                                 {"handled_by", t.cache_cancelled ? "cache" : "zero-forcing"}});
        receivers.push_back(Json{{"rx", rr.rx},
                                 {"desired_magnitude", double_to_decimal(rr.desired_magnitude)},
                                 {"interference", std::move(terms)},
                                 {"post_cancel_residual", double_to_decimal(rr.post_cancel_residual)},
                                 {"decodable", rr.decodable}});
    }
    return Json{{"receivers", std::move(receivers)},
                {"all_decodable", report.all_decodable},
                {"max_residual", double_to_decimal(report.max_residual)},
                {"min_desired", double_to_decimal(report.min_desired)}};
}

inline Json to_json(const VerificationReport& report) {
    return Json{{"ok", report.ok},
                {"groups_checked", report.groups_checked},
                {"max_post_cancel_residual", double_to_decimal(report.max_post_cancel_residual)},
                {"max_backsub_residual", double_to_decimal(report.max_backsub_residual)},
                {"min_desired", double_to_decimal(report.min_desired)},
                {"channel_seed", report.channel_seed},
                {"regenerated", report.regenerated},
                {"failures", report.failures}};
}

inline Json to_json(const BoundsReport& report) {
    return Json{{"dof_lower", rational_to_json(report.dof_lower)},
                {"dof_upper", rational_to_json(report.dof_upper)},
                {"gap_ratio", rational_to_json(report.gap_ratio)},
                {"analytic_blocks", rational_to_json(report.analytic_blocks)},
                {"no_delivery", report.no_delivery}};
}

inline Json to_json(const PacketInstance& p) {
    return Json{{"file", p.file},
                {"packet", p.packet},
                {"tx_holders", p.tx_holders},
                {"rx_holders", p.rx_holders},
                {"intended_rx", p.intended_rx}};
}

inline PacketInstance packet_from_json(const Json& j) {
    PacketInstance p;
    p.file = j.at("file").get<int>();
    p.packet = j.value("packet", 0);
    p.tx_holders = j.at("tx_holders").get<std::vector<int>>();
    p.rx_holders = j.value("rx_holders", std::vector<int>{});
    p.intended_rx = j.at("intended_rx").get<int>();
    std::sort(p.tx_holders.begin(), p.tx_holders.end());
    std::sort(p.rx_holders.begin(), p.rx_holders.end());
    p.validate();
    return p;
}

/// A stored min-block instance: the packet list, plus optionally the config,
/// demand, and full placement profile it came from.
struct P1Instance {
    std::vector<PacketInstance> packets;
    std::optional<NetworkConfig> config;
    std::optional<DemandVector> demand;
    std::optional<PlacementProfile> profile;
};

inline Json to_json(const PlacementProfile& profile) {
    Json entries = Json::array();
    for (const auto& [key, count] : profile.counts) {
        const auto& [file, tx_mask, rx_mask] = key;
        if (count == 0) continue;
        entries.push_back(Json{{"file", file},
                               {"tx_set", set_of(tx_mask)},
                               {"rx_set", set_of(rx_mask)},
                               {"count", count}});
    }
    return Json{{"k_t", profile.k_t},
                {"k_r", profile.k_r},
                {"n_files", profile.n_files},
                {"f_packets", profile.f_packets},
                {"entries", std::move(entries)}};
}

inline PlacementProfile profile_from_json(const Json& j) {
    PlacementProfile profile;
    profile.k_t = j.at("k_t").get<int>();
    profile.k_r = j.at("k_r").get<int>();
    profile.n_files = j.at("n_files").get<int>();
    profile.f_packets = j.at("f_packets").get<long long>();
    for (const auto& e : j.at("entries")) {
        auto tx = e.at("tx_set").get<std::vector<int>>();
        auto rx = e.value("rx_set", std::vector<int>{});
        profile.counts[{e.at("file").get<int>(), mask_of(tx), mask_of(rx)}] += e.at("count").get<long long>();
    }
    return profile;
}

inline Json to_json(const P1Instance& inst) {
    Json packets = Json::array();
    for (const auto& p : inst.packets) packets.push_back(to_json(p));
    Json j{{"packets", std::move(packets)}};
    if (inst.config) j["config"] = to_json(*inst.config);
    if (inst.demand) j["demand"] = inst.demand->demands;
    if (inst.profile) j["profile"] = to_json(*inst.profile);
    return j;
}

inline P1Instance instance_from_json(const Json& j) {
    P1Instance inst;
    for (const auto& jp : j.at("packets")) inst.packets.push_back(packet_from_json(jp));
    if (j.contains("config")) inst.config = config_from_json(j.at("config"));
    if (j.contains("demand")) inst.demand = DemandVector{j.at("demand").get<std::vector<int>>()};
    if (j.contains("profile")) inst.profile = profile_from_json(j.at("profile"));
    return inst;
}

}  // namespace cachezf

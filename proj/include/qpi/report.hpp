// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON views of the result types. Keys come out sorted (nlohmann uses std::map)
// and floats are rounded to 1e-12 so reports are byte-stable.

#include <cmath>
#include <string>

#include "json.hpp"
#include "qpi/correspondence.hpp"
#include "qpi/ktheory.hpp"
#include "qpi/laurent.hpp"
#include "qpi/wienerhopf.hpp"

namespace qpi::report {

using Json = nlohmann::json;

inline Json num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    double r = std::round(x * 1e12) / 1e12;
    if (r == 0) r = 0;  // no negative zero
    return r;
}

inline Json nums(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

inline Json check(const CheckResult& c) {
    return {{"ok", c.ok}, {"defect", num(c.defect)}, {"worst_coefficient", c.worst}};
}

inline Json gap(const GapReport& g) {
    Json entries = Json::array();
    for (const auto& e : g.entries) {
        Json j = {{"label", e.label},
                  {"invertible", e.invertible},
                  {"undecided", e.undecided},
                  {"min_singular", num(e.min_singular)},
                  {"section_sizes", e.section_sizes},
                  {"frozen_samples", e.frozen_samples},
                  {"worst_momentum", num(e.worst_momentum)}};
        if (e.theta_samples) {
            j["theta_samples"] = e.theta_samples;
            j["worst_theta"] = num(e.worst_theta);
        }
        if (!e.note.empty()) j["note"] = e.note;
        entries.push_back(j);
    }
    return {{"entries", entries}, {"all_invertible", g.all_invertible()}, {"undecided", g.undecided()}};
}

inline Json indicator(const IndicatorReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"point", row.label},
                        {"coordinates", row.coordinates},
                        {"occupied_rank", row.counts.rank()},
                        {"n_plus", row.counts.n_plus},
                        {"n_minus", row.counts.n_minus},
                        {"occupied_energies", nums(row.counts.occupied)}});
    Json j = {{"fixed_points", rows}, {"mu", r.mu}};
    j["half_mu"] = r.half_mu ? Json(*r.half_mu) : Json(nullptr);
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    return j;
}

inline Json invariants(const BoundaryInvariants& b) {
    return {{"values", b.values},   {"labels", {"a", "b", "c", "d"}}, {"pqr", b.pqr},
            {"method", b.method},   {"zero_sum", b.zero_sum},         {"pairing", b.pairing},
            {"pqr_consistent", b.pqr_consistent}};
}

inline Json corner(const CornerResult& c) {
    Json samples = Json::array();
    for (const auto& s : c.samples)
        samples.push_back({{"L", s.L},
                           {"kernel_dim", s.kernel_dim},
                           {"energies", nums(s.energies)},
                           {"weights", nums(s.weights)},
                           {"localized", s.localized},
                           {"trace", num(s.trace)},
                           {"index", s.index}});
    return {{"corner", std::string(1, c.corner)}, {"index", c.index}, {"samples", samples}};
}

inline Json flow(const SpectralFlowResult& f) {
    Json cr = Json::array();
    for (const auto& c : f.crossings)
        cr.push_back({{"theta", num(c.theta)}, {"direction", c.direction}, {"weight", num(c.weight)}});
    return {{"corner", std::string(1, f.corner)},
            {"flow", f.flow},
            {"crossings", cr},
            {"theta_samples", f.theta_samples},
            {"window", num(f.window)},
            {"min_overlap", num(f.min_overlap_seen)}};
}

inline Json winding(const Winding3Result& w) {
    return {{"raw", num(w.raw)},
            {"imag", num(w.imag)},
            {"value", w.value},
            {"patches", {num(w.patches[0]), num(w.patches[1])}},
            {"grid", {w.radial, w.angular, w.loop}},
            {"refined", w.refined}};
}

inline Json winding(const WindingInvariants& w) {
    Json spheres = Json::object();
    for (char j : kCorners) spheres[std::string(1, j)] = winding(w.spheres[corner_slot(j)]);
    return {{"invariants", invariants(w.invariants)}, {"spheres", spheres}};
}

inline Json correspondence(const CorrespondenceReport& r, bool with_timings = false) {
    Json j;
    j["dimension"] = r.dimension;
    j["status"] = to_string(r.status);
    j["pass"] = r.pass();
    j["gap"] = gap(r.gap);
    if (r.indicator) j["indicator"] = indicator(*r.indicator);
    if (r.boundary) j["boundary"] = invariants(*r.boundary);
    if (!r.corners.empty()) {
        j["corners"] = Json::array();
        for (const auto& c : r.corners) j["corners"].push_back(corner(c));
    }
    if (!r.flows.empty()) {
        j["flows"] = Json::array();
        for (const auto& f : r.flows) j["flows"].push_back(flow(f));
    }
    if (r.oracle) j["oracle"] = winding(*r.oracle);
    if (r.oracle_agrees) j["oracle_agrees"] = *r.oracle_agrees;
    if (r.indicator && r.boundary)
        j["theorem"] = {{"lhs_mod2", r.theorem.lhs}, {"rhs_mod2", r.theorem.rhs}, {"pass", r.theorem.pass}};
    j["failures"] = r.failures;
    if (with_timings) {
        Json t = Json::object();
        for (const auto& [k, v] : r.timings) t[k] = std::round(v * 1e3) / 1e3;
        j["timings"] = t;
    }
    return j;
}

inline Json factorization(const CanonicalFactorization& cf) {
    return {{"side", cf.left ? "left" : "right"},
            {"residual", num(cf.residual)},
            {"decay", num(cf.decay)},
            {"truncation", cf.truncation},
            {"plus_terms", cf.plus_coeffs.size()},
            {"minus_terms", cf.minus_coeffs.size()}};
}

inline Json ledger(const k::LedgerReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return {{"checks", checks}, {"pass", r.all_pass()}};
}

} // namespace qpi::report

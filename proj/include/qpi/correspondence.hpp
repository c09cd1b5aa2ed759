// SPDX-License-Identifier: Apache-2.0
#pragma once

// Bulk-boundary checks: the indicator against corner indices (2d) or hinge
// spectral flows (3d).

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpi/boundary.hpp"
#include "qpi/bulk.hpp"
#include "qpi/gap.hpp"
#include "qpi/winding.hpp"

namespace qpi {

struct CheckOptions {
    GapOptions gap;
    CornerOptions corner;
    SpectralFlowOptions flow;
    bool oracle = false;
    Winding3Options winding;
    FactorizationOptions factorization;
};

struct TheoremVerdict {
    int lhs = 0;  // half the indicator, mod 2
    int rhs = 0;  // value_a + value_b, mod 2
    bool pass = false;
};

enum class Status { Pass, Fail, Undecided };

inline const char* to_string(Status s) {
    switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Undecided: return "undecided";
    }
    return "?";
}

struct CorrespondenceReport {
    int dimension = 2;
    Status status = Status::Fail;
    GapReport gap;
    std::optional<IndicatorReport> indicator;
    std::optional<BoundaryInvariants> boundary;
    std::vector<CornerResult> corners;
    std::vector<SpectralFlowResult> flows;
    std::optional<WindingInvariants> oracle;
    std::optional<bool> oracle_agrees;
    TheoremVerdict theorem;
    std::vector<std::string> failures;
    std::map<std::string, double> timings;

    bool pass() const { return status == Status::Pass; }
};

namespace detail {

class Stopwatch {
public:
    explicit Stopwatch(std::map<std::string, double>& sink) : sink_(sink) {}
    template <class F>
    auto time(const std::string& name, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        struct Record {
            std::map<std::string, double>& sink;
            std::string name;
            std::chrono::steady_clock::time_point t0;
            ~Record() { sink[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
        } rec{sink_, name, t0};
        return f();
    }

private:
    std::map<std::string, double>& sink_;
};

inline int mod2(int v) { return ((v % 2) + 2) % 2; }

// shared tail: identities on the invariants and the theorem itself
inline void conclude(CorrespondenceReport& r) {
    const auto& b = *r.boundary;
    if (!b.zero_sum) r.failures.push_back("boundary invariants do not sum to zero");
    if (!b.pairing) r.failures.push_back("inversion pairing a = -c, b = -d fails");
    if (!b.pqr_consistent) r.failures.push_back("(p, q, r) does not reproduce the invariants");
    if (!r.indicator->half_mu) {
        r.failures.push_back("indicator is odd: " + r.indicator->diagnostic);
    } else {
        r.theorem.lhs = mod2(*r.indicator->half_mu);
        r.theorem.rhs = mod2(b.values[0] + b.values[1]);
        r.theorem.pass = r.theorem.lhs == r.theorem.rhs;
        if (!r.theorem.pass) r.failures.push_back("half indicator differs from a + b mod 2");
    }
    if (r.oracle_agrees && !*r.oracle_agrees) r.failures.push_back("winding oracle disagrees with the truncation");
    r.status = r.failures.empty() ? Status::Pass : Status::Fail;
}

inline bool gate_on_gap(CorrespondenceReport& r) {
    if (r.gap.undecided()) {
        r.status = Status::Undecided;
        r.failures.push_back("half-plane invertibility is undecided");
        return false;
    }
    if (!r.gap.all_invertible()) {
        r.status = Status::Fail;
        r.failures.push_back("GapViolation: a boundary operator is not invertible");
        return false;
    }
    return true;
}

} // namespace detail

inline CorrespondenceReport theorem_check_2d(const LaurentMatrix& h, const SymmetryData& sym,
                                             const CheckOptions& opt = {}) {
    CorrespondenceReport r;
    r.dimension = 2;
    detail::Stopwatch sw(r.timings);
    r.gap = sw.time("gap", [&] { return assumption_check_2d(h, opt.gap); });
    if (!detail::gate_on_gap(r)) return r;
    r.indicator = sw.time("indicator", [&] { return mu2d(h, sym); });
    std::array<int, 4> v{};
    sw.time("corners", [&] {
        for (char j : kCorners) {
            r.corners.push_back(corner_index(h, sym, j, opt.corner, &r.gap));
            v[corner_slot(j)] = r.corners.back().index;
        }
        return 0;
    });
    r.boundary = make_invariants(v, "truncation");
    if (opt.oracle) {
        r.oracle = sw.time("oracle", [&] { return winding_invariants(h, sym, opt.winding, opt.factorization); });
        r.oracle_agrees = r.oracle->invariants.values == v;
    }
    detail::conclude(r);
    return r;
}

inline CorrespondenceReport theorem_check_3d(const Family3D& fam, const SymmetryData& sym,
                                             const CheckOptions& opt = {}) {
    CorrespondenceReport r;
    r.dimension = 3;
    detail::Stopwatch sw(r.timings);
    r.gap = sw.time("gap", [&] { return assumption_check_3d(fam, opt.gap); });
    if (!detail::gate_on_gap(r)) return r;
    r.indicator = sw.time("indicator", [&] { return mu3d(fam, sym); });
    std::array<int, 4> v{};
    sw.time("flows", [&] {
        for (char j : kCorners) {
            r.flows.push_back(spectral_flow(fam, j, opt.flow, &r.gap));
            v[corner_slot(j)] = r.flows.back().flow;
        }
        return 0;
    });
    r.boundary = make_invariants(v, "truncation");
    detail::conclude(r);
    return r;
}

} // namespace qpi

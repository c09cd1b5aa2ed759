// SPDX-License-Identifier: Apache-2.0
#pragma once

// All tunable defaults in one place. A JSON file named by QPI_CONFIG overrides
// them, command line flags override that.

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpi/correspondence.hpp"

namespace qpi {

struct Config {
    // half-plane invertibility
    int frozen_samples = 64;
    std::vector<int> section_sizes{64, 128, 256};
    double singular_floor = 1e-3;
    double stabilization_band = 0.2;
    int gap_theta_samples = 64;
    int circle_grid = 64;
    // factorization
    double residual_tol = 1e-9;
    double decay_ratio = 1e-10;
    // corners
    int L = 24;
    int L_step = 8;
    double zero_tol = 1e-4;
    double loc_radius = 1.0 / 3;
    double loc_fraction = 0.6;
    // hinges
    int hinge_L = 16;
    int flow_theta_samples = 128;
    double min_overlap = 0.7;
    // winding oracle
    bool oracle = false;
    int winding_radial = 24;
    int winding_angular = 24;
    int winding_loop = 48;
    double winding_guard = 0.1;
    // indicator along homotopies
    int homotopy_samples = 11;
    // spectrum dumps
    int spectrum_momenta = 128;
    int spectrum_width = 24;
    int spectrum_levels = 8;

    GapOptions gap_options() const {
        GapOptions g;
        g.frozen_samples = frozen_samples;
        g.section_sizes = section_sizes;
        g.singular_floor = singular_floor;
        g.stabilization_band = stabilization_band;
        g.theta_samples = gap_theta_samples;
        g.circle_grid = circle_grid;
        return g;
    }

    FactorizationOptions factorization_options() const {
        FactorizationOptions f;
        f.residual_tol = residual_tol;
        f.decay_ratio = decay_ratio;
        return f;
    }

    CornerOptions corner_options() const {
        CornerOptions c;
        c.L = L;
        c.L_step = L_step;
        c.zero_tol = zero_tol;
        c.loc_radius = loc_radius;
        c.loc_fraction = loc_fraction;
        return c;
    }

    SpectralFlowOptions flow_options() const {
        SpectralFlowOptions s;
        s.L = hinge_L;
        s.theta_samples = flow_theta_samples;
        s.min_overlap = min_overlap;
        s.loc_radius = loc_radius;
        s.loc_fraction = loc_fraction;
        return s;
    }

    Winding3Options winding_options() const {
        Winding3Options w;
        w.radial = winding_radial;
        w.angular = winding_angular;
        w.loop = winding_loop;
        w.guard = winding_guard;
        return w;
    }

    CheckOptions check_options() const {
        CheckOptions c;
        c.gap = gap_options();
        c.corner = corner_options();
        c.flow = flow_options();
        c.oracle = oracle;
        c.winding = winding_options();
        c.factorization = factorization_options();
        return c;
    }
};

#define QPI_CONFIG_FIELDS(X)                                                                                         \
    X(frozen_samples) X(section_sizes) X(singular_floor) X(stabilization_band) X(gap_theta_samples) X(circle_grid)    \
        X(residual_tol) X(decay_ratio) X(L) X(L_step) X(zero_tol) X(loc_radius) X(loc_fraction) X(hinge_L)            \
            X(flow_theta_samples) X(min_overlap) X(oracle) X(winding_radial) X(winding_angular) X(winding_loop)      \
                X(winding_guard) X(homotopy_samples) X(spectrum_momenta) X(spectrum_width) X(spectrum_levels)

inline nlohmann::json to_json(const Config& c) {
    nlohmann::json j;
#define X(f) j[#f] = c.f;
    QPI_CONFIG_FIELDS(X)
#undef X
    return j;
}

// Unknown keys are rejected so that typos do not silently keep a default.
inline void apply_overrides(Config& c, const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorKind::SchemaError, "config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        try {
#define X(f)                                                                                                         \
    if (key == #f) {                                                                                                 \
        c.f = value.get<decltype(c.f)>();                                                                            \
        known = true;                                                                                                \
    }
            QPI_CONFIG_FIELDS(X)
#undef X
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::SchemaError, "config key '" + key + "': " + e.what());
        }
        if (!known) fail(ErrorKind::SchemaError, "unknown config key '" + key + "'");
    }
}

inline Config load_config() {
    Config c;
    if (const char* path = std::getenv("QPI_CONFIG"); path && *path) {
        std::ifstream in(path);
        if (!in) fail(ErrorKind::SchemaError, std::string("cannot open QPI_CONFIG file ") + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::SchemaError, std::string("QPI_CONFIG: ") + e.what());
        }
        apply_overrides(c, j);
    }
    return c;
}

} // namespace qpi

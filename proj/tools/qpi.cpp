// SPDX-License-Identifier: Apache-2.0
// Command line front end. Reports go to stdout as JSON, progress to stderr.
// Exit codes: 0 pass, 1 check failed, 2 undecided gap, 3 input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qpi/config.hpp"
#include "qpi/model_io.hpp"
#include "qpi/report.hpp"

namespace {

using namespace qpi;
using Json = nlohmann::json;

enum Exit { kPass = 0, kFail = 1, kUndecided = 2, kInput = 3 };

struct Common {
    std::string model;
    bool quiet = false;
    bool timings = false;
};

Common common;
Config config;

void progress(const std::string& msg) {
    if (!common.quiet) std::cerr << "qpi: " << msg << std::endl;
}

void emit(const std::string& command, const ModelBundle* m, Json result) {
    Json out;
    out["command"] = command;
    out["config"] = to_json(config);
    if (m) out["model"] = m->name;
    out["result"] = std::move(result);
    std::cout << out.dump(2) << std::endl;
}

ModelBundle load(bool check = true) {
    if (common.model.empty()) fail(ErrorKind::SchemaError, "--model is required");
    progress("loading " + common.model);
    return load_model(common.model, check);
}

int gap_exit(const GapReport& g) { return g.undecided() ? kUndecided : g.all_invertible() ? kPass : kFail; }

bool is_3d(const ModelBundle& m) { return m.kind == "suspension" || m.hamiltonian.nvars() == 3; }

// --- check-symmetry ---------------------------------------------------------

int cmd_check_symmetry() {
    ModelBundle m = load(false);
    Json r;
    bool ok = true;
    auto add = [&](const std::string& key, const CheckResult& c) {
        r[key] = report::check(c);
        ok = ok && c.ok;
    };
    add("hermitian", check_hermitian_on_torus(m.hamiltonian));
    if (m.has_symmetry) {
        add("inversion", check_inversion(m.hamiltonian, m.symmetry));
        r["inversion_grid_defect"] = report::num(grid_inversion_defect(m.hamiltonian, m.symmetry.inversion));
        if (m.symmetry.chiral) add("chiral", check_chiral(m.hamiltonian, m.symmetry));
        if (m.epsilon && m.symmetry.chiral) {
            add("epsilon_inversion", check_inversion(*m.epsilon, m.symmetry));
            add("epsilon_chiral", check_chiral(*m.epsilon, m.symmetry));
        }
        if (m.delta) {
            add("delta_hermitian", check_hermitian_on_torus(*m.delta));
            add("delta_inversion", check_inversion(*m.delta, m.symmetry));
        }
    } else if (m.kind != "map") {
        ok = false;
        r["symmetry"] = "missing";
    }
    r["kind"] = m.kind;
    r["pass"] = ok;
    emit("check-symmetry", &m, r);
    return ok ? kPass : kFail;
}

// --- gap-check --------------------------------------------------------------

int cmd_gap_check() {
    ModelBundle m = load();
    GapReport g;
    if (is_3d(m)) {
        progress("certifying surfaces over " + std::to_string(config.gap_theta_samples) + " theta samples");
        g = assumption_check_3d(m.family(), config.gap_options());
    } else {
        progress("certifying the four half-plane operators");
        g = assumption_check_2d(m.hamiltonian, config.gap_options());
    }
    emit("gap-check", &m, report::gap(g));
    return gap_exit(g);
}

// --- factorize --------------------------------------------------------------

struct FactorizeArgs {
    std::string var = "z";
    std::string freeze = "w=1";
    std::string dump;
    bool left = false;
};
FactorizeArgs fargs;

Complex parse_circle_point(const std::string& text) {
    double re = 0, im = 0;
    const auto comma = text.find(',');
    try {
        re = std::stod(text.substr(0, comma));
        if (comma != std::string::npos) im = std::stod(text.substr(comma + 1));
    } catch (const std::exception&) {
        fail(ErrorKind::SchemaError, "cannot parse '" + text + "' as a complex number");
    }
    const Complex v(re, im);
    if (std::abs(std::abs(v) - 1) > 1e-9) fail(ErrorKind::IndexOutOfRange, "frozen value must lie on the unit circle");
    return v;
}

int cmd_factorize() {
    ModelBundle m = load();
    if (m.hamiltonian.nvars() != 2) fail(ErrorKind::DimensionMismatch, "factorize needs a 2-variable model");
    const int var = fargs.var == "z" ? 0 : fargs.var == "w" ? 1 : -1;
    if (var < 0) fail(ErrorKind::SchemaError, "--var must be z or w");
    const auto eq = fargs.freeze.find('=');
    if (eq == std::string::npos) fail(ErrorKind::SchemaError, "--freeze expects name=value");
    const std::string fname = fargs.freeze.substr(0, eq);
    if ((var == 0 && fname != "w") || (var == 1 && fname != "z"))
        fail(ErrorKind::SchemaError, "--freeze must name the other variable");
    const Complex v = parse_circle_point(fargs.freeze.substr(eq + 1));
    const LaurentMatrix f = m.hamiltonian.fix_variable(1 - var, v);
    progress("factorizing in " + fargs.var);
    const CanonicalFactorization cf = fargs.left ? factorize_left(f, config.factorization_options())
                                                 : factorize_right(f, config.factorization_options());
    Json r = report::factorization(cf);
    r["var"] = fargs.var;
    r["freeze"] = {report::num(v.real()), report::num(v.imag())};
    if (!fargs.dump.empty()) {
        Json d;
        d["side"] = cf.left ? "left" : "right";
        d["plus"] = Json::array();
        d["minus"] = Json::array();
        for (const auto& c : cf.plus_coeffs) d["plus"].push_back(io::encode_matrix(c));
        for (const auto& c : cf.minus_coeffs) d["minus"].push_back(io::encode_matrix(c));
        std::ofstream out(fargs.dump);
        if (!out) fail(ErrorKind::SchemaError, "cannot write " + fargs.dump);
        out << d.dump() << "\n";
        r["dump"] = fargs.dump;
    }
    emit("factorize", &m, r);
    return kPass;
}

// --- indicator --------------------------------------------------------------

int dim_arg = 0;

int cmd_indicator() {
    ModelBundle m = load();
    const int dim = dim_arg ? dim_arg : m.dimension;
    Json r;
    if (dim == 3) {
        r = report::indicator(mu3d(m.family(), m.sym()));
    } else {
        if (m.hamiltonian.nvars() != 2) fail(ErrorKind::DimensionMismatch, "--dim 2 needs a 2-variable model");
        r = report::indicator(mu2d(m.hamiltonian, m.sym()));
        if (m.kind == "homotopy") {
            auto scan = homotopy_scan([&](double x) { return m.at(x); }, m.sym(),
                                      uniform_grid(m.range[0], m.range[1], config.homotopy_samples));
            Json s = Json::array();
            for (const auto& smp : scan.samples)
                s.push_back({{"r", report::num(smp.r)}, {"indicator", report::indicator(smp.report)}});
            r["homotopy"] = {{"samples", s}, {"constant", scan.constant}};
        }
    }
    emit("indicator", &m, r);
    return kPass;
}

// --- corner-index -----------------------------------------------------------

std::string oracle_arg;
std::string corner_arg;

int cmd_corner_index() {
    ModelBundle m = load();
    if (m.hamiltonian.nvars() != 2 || m.kind == "suspension")
        fail(ErrorKind::DimensionMismatch, "corner-index needs a 2d model");
    if (!oracle_arg.empty() && oracle_arg != "winding") fail(ErrorKind::SchemaError, "--oracle accepts only 'winding'");
    progress("certifying the four half-plane operators");
    const GapReport g = assumption_check_2d(m.hamiltonian, config.gap_options());
    if (g.undecided()) {
        emit("corner-index", &m, {{"gap", report::gap(g)}});
        return kUndecided;
    }
    Json r;
    r["gap"] = report::gap(g);
    std::array<int, 4> v{};
    r["corners"] = Json::array();
    for (char j : kCorners) {
        if (!corner_arg.empty() && corner_arg[0] != j) continue;
        progress(std::string("corner ") + j);
        CornerResult c = corner_index(m.hamiltonian, m.sym(), j, config.corner_options(), &g);
        v[corner_slot(j)] = c.index;
        r["corners"].push_back(report::corner(c));
    }
    int code = kPass;
    if (corner_arg.empty()) {
        r["invariants"] = report::invariants(make_invariants(v, "truncation"));
        if (!oracle_arg.empty()) {
            progress("winding oracle over the four glued spheres");
            auto w = winding_invariants(m.hamiltonian, m.sym(), config.winding_options(),
                                        config.factorization_options());
            r["oracle"] = report::winding(w);
            r["oracle_agrees"] = w.invariants.values == v;
            if (w.invariants.values != v) code = kFail;
        }
    }
    emit("corner-index", &m, r);
    return code;
}

// --- spectral-flow ----------------------------------------------------------

bool skip_gap = false;

int cmd_spectral_flow() {
    ModelBundle m = load();
    const Family3D fam = m.family();
    std::optional<GapReport> g;
    Json r;
    if (!skip_gap) {
        progress("certifying surfaces");
        g = assumption_check_3d(fam, config.gap_options());
        r["gap"] = report::gap(*g);
        if (g->undecided()) {
            emit("spectral-flow", &m, r);
            return kUndecided;
        }
    }
    std::array<int, 4> v{};
    r["flows"] = Json::array();
    for (char j : kCorners) {
        if (!corner_arg.empty() && corner_arg[0] != j) continue;
        progress(std::string("hinge ") + j);
        SpectralFlowResult f = spectral_flow(fam, j, config.flow_options(), g ? &*g : nullptr);
        v[corner_slot(j)] = f.flow;
        r["flows"].push_back(report::flow(f));
    }
    if (corner_arg.empty()) r["invariants"] = report::invariants(make_invariants(v, "truncation"));
    emit("spectral-flow", &m, r);
    return kPass;
}

// --- verify -----------------------------------------------------------------

int verify_L = 0;

int cmd_verify() {
    ModelBundle m = load();
    if (!oracle_arg.empty()) {
        if (oracle_arg != "winding") fail(ErrorKind::SchemaError, "--oracle accepts only 'winding'");
        config.oracle = true;
    }
    const int dim = dim_arg ? dim_arg : m.dimension;
    if (verify_L) (dim == 3 ? config.hinge_L : config.L) = verify_L;
    progress("running the " + std::to_string(dim) + "d correspondence check");
    CorrespondenceReport rep = dim == 3 ? theorem_check_3d(m.family(), m.sym(), config.check_options())
                                        : theorem_check_2d(m.hamiltonian, m.sym(), config.check_options());
    emit("verify", &m, report::correspondence(rep, common.timings));
    switch (rep.status) {
    case Status::Pass: return kPass;
    case Status::Undecided: return kUndecided;
    default: return kFail;
    }
}

// --- spectrum ---------------------------------------------------------------

int edge_arg = 0;
std::string hinge_arg;
std::string out_arg;
double theta_arg = 0;

int cmd_spectrum() {
    ModelBundle m = load();
    if ((edge_arg != 0) == !hinge_arg.empty()) fail(ErrorKind::SchemaError, "give exactly one of --edge or --hinge");
    if (out_arg.empty()) fail(ErrorKind::SchemaError, "--out is required");
    std::ofstream out(out_arg);
    if (!out) fail(ErrorKind::SchemaError, "cannot write " + out_arg);
    out << "param,index,energy\n";
    char buf[96];
    long rows = 0;
    if (edge_arg) {
        if (edge_arg < 1 || edge_arg > 4) fail(ErrorKind::IndexOutOfRange, "--edge must be 1..4");
        const LaurentMatrix h = is_3d(m) ? m.family().slice(theta_arg) : m.hamiltonian;
        const int M = config.spectrum_momenta;
        std::vector<Eigen::VectorXd> ev(M);
        progress("ribbon spectrum over " + std::to_string(M) + " momenta");
        parallel_for(M, [&](int k) {
            const double angle = 2 * std::numbers::pi * k / M;
            Matrix t = Matrix(toeplitz_section(edge_symbol(h, edge_arg, angle), config.spectrum_width));
            ev[k] = hermitian_eigenvalues(t);
        });
        for (int k = 0; k < M; ++k)
            for (int i = 0; i < ev[k].size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.12f,%d,%.12f\n", 2 * std::numbers::pi * k / M, i, ev[k][i]);
                out << buf;
                ++rows;
            }
    } else {
        const char j = hinge_arg[0];
        corner_slot(j);
        const Family3D fam = m.family();
        const int T = config.flow_theta_samples, levels = config.spectrum_levels;
        std::vector<std::vector<double>> ev(T);
        progress("hinge spectrum over " + std::to_string(T) + " theta samples");
        parallel_for(T, [&](int k) {
            const double th = -std::numbers::pi + 2 * std::numbers::pi * (k + 0.5) / T;
            QuarterTruncation q = truncate(fam.slice(th), j, config.hinge_L);
            ev[k] = nearest_zero_eigenpairs(q.matrix, levels, 1e-6, 1e-9).values;
        });
        for (int k = 0; k < T; ++k)
            for (size_t i = 0; i < ev[k].size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.12f,%zu,%.12f\n",
                              -std::numbers::pi + 2 * std::numbers::pi * (k + 0.5) / T, i, ev[k][i]);
                out << buf;
                ++rows;
            }
    }
    emit("spectrum", &m, {{"out", out_arg}, {"rows", rows}});
    return kPass;
}

// --- winding ----------------------------------------------------------------

int cmd_winding() {
    ModelBundle m = load();
    if (m.hamiltonian.nvars() != 2) fail(ErrorKind::DimensionMismatch, "winding needs a 2-variable symbol");
    Json r;
    if (m.kind == "map") {
        progress("degree of the transplanted map");
        r = report::winding(winding3(transplant_map(m.hamiltonian), config.winding_options()));
    } else {
        progress("winding over the four glued spheres");
        r = report::winding(
            winding_invariants(m.hamiltonian, m.sym(), config.winding_options(), config.factorization_options()));
    }
    emit("winding", &m, r);
    return kPass;
}

// --- ktable -----------------------------------------------------------------

bool kverify = false, kdump = false;

int cmd_ktable() {
    if (kverify == kdump) fail(ErrorKind::SchemaError, "give exactly one of --verify or --dump");
    if (kdump) {
        const auto& t = k::f3_table();
        std::string header = "class,K0";
        for (const auto& p : k::fixed_points_3d())
            header += ",(" + std::to_string(p[0]) + " " + std::to_string(p[1]) + " " + std::to_string(p[2]) + ")";
        std::ostream* os = &std::cout;
        std::ofstream file;
        if (!out_arg.empty()) {
            file.open(out_arg);
            if (!file) fail(ErrorKind::SchemaError, "cannot write " + out_arg);
            os = &file;
        }
        *os << header << "\n";
        for (const auto& row : t) {
            *os << row.name << "," << row.forgetful;
            for (const auto& e : row.values) *os << "," << e.str();
            *os << "\n";
        }
        return kPass;
    }
    const auto rep = k::verify_ledger();
    if (!common.quiet)
        for (const auto& c : rep.checks) std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
    emit("ktable", nullptr, report::ledger(rep));
    return rep.all_pass() ? kPass : kFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qpi: bulk-boundary correspondence checks for inversion-symmetric lattice models"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto with_model = [&](CLI::App* s) {
        s->add_option("--model", common.model, "model JSON file")->required();
        s->add_flag("--quiet", common.quiet, "suppress progress output");
    };

    auto* cs = app.add_subcommand("check-symmetry", "coefficient checks of Hermiticity and symmetries");
    with_model(cs);

    auto* gc = app.add_subcommand("gap-check", "certify invertibility of the half-plane operators");
    with_model(gc);
    gc->add_option("--theta-samples", config.gap_theta_samples, "theta samples for 3d families");
    gc->add_option("--frozen-samples", config.frozen_samples, "transverse momentum samples per edge");

    auto* fz = app.add_subcommand("factorize", "canonical factorization of a 1-variable restriction");
    with_model(fz);
    fz->add_option("--var", fargs.var, "free variable (z or w)");
    fz->add_option("--freeze", fargs.freeze, "frozen variable, e.g. w=1 or w=0,1");
    fz->add_option("--dump-coeffs", fargs.dump, "write factor coefficients to this JSON file");
    fz->add_flag("--left", fargs.left, "left instead of right factorization");

    auto* ind = app.add_subcommand("indicator", "parity counts and the symmetry indicator");
    with_model(ind);
    ind->add_option("--dim", dim_arg, "2 or 3")->check(CLI::IsMember({2, 3}));

    auto* ci = app.add_subcommand("corner-index", "chiral zero modes at the four corners");
    with_model(ci);
    ci->add_option("--L", config.L, "side length of the truncation");
    ci->add_option("--corner", corner_arg, "only this corner")->check(CLI::IsMember({"a", "b", "c", "d"}));
    ci->add_option("--oracle", oracle_arg, "cross-check with 'winding'");

    auto* sf = app.add_subcommand("spectral-flow", "spectral flow of the hinge operators");
    with_model(sf);
    sf->add_option("--L", config.hinge_L, "side length of the truncation");
    sf->add_option("--theta-samples", config.flow_theta_samples, "theta grid size");
    sf->add_option("--corner", corner_arg, "only this hinge")->check(CLI::IsMember({"a", "b", "c", "d"}));
    sf->add_flag("--no-gap-check", skip_gap, "skip the surface certification");

    auto* vf = app.add_subcommand("verify", "full bulk-boundary correspondence check");
    with_model(vf);
    vf->add_option("--dim", dim_arg, "2 or 3")->check(CLI::IsMember({2, 3}));
    vf->add_option("--L", verify_L, "truncation size: corners in 2d, hinges in 3d");
    vf->add_option("--hinge-L", config.hinge_L, "hinge truncation size (3d)");
    vf->add_option("--theta-samples", config.flow_theta_samples, "theta grid for spectral flow");
    vf->add_option("--oracle", oracle_arg, "also run the 'winding' oracle");
    vf->add_flag("--timings", common.timings, "include wall-clock timings (not byte-stable)");

    auto* sp = app.add_subcommand("spectrum", "ribbon or hinge spectra as CSV");
    with_model(sp);
    sp->add_option("--edge", edge_arg, "edge label 1..4");
    sp->add_option("--hinge", hinge_arg, "hinge corner a..d")->check(CLI::IsMember({"a", "b", "c", "d"}));
    sp->add_option("--theta", theta_arg, "slice angle for edge spectra of 3d models");
    sp->add_option("--width", config.spectrum_width, "ribbon width in unit cells");
    sp->add_option("--momenta", config.spectrum_momenta, "momentum samples");
    sp->add_option("--out", out_arg, "CSV output path")->required();

    auto* wd = app.add_subcommand("winding", "three-dimensional winding numbers on the glued spheres");
    with_model(wd);

    auto* kt = app.add_subcommand("ktable", "exact K-theory ledger");
    kt->add_flag("--verify", kverify, "run the ledger identities");
    kt->add_flag("--dump", kdump, "print the restriction table as CSV");
    kt->add_option("--out", out_arg, "write the dump to a file");
    kt->add_flag("--quiet", common.quiet, "suppress progress output");

    try {
        config = load_config();
    } catch (const Error& e) {
        std::cerr << "qpi: " << e.what() << std::endl;
        return kInput;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    try {
        if (*cs) return cmd_check_symmetry();
        if (*gc) return cmd_gap_check();
        if (*fz) return cmd_factorize();
        if (*ind) return cmd_indicator();
        if (*ci) return cmd_corner_index();
        if (*sf) return cmd_spectral_flow();
        if (*vf) return cmd_verify();
        if (*sp) return cmd_spectrum();
        if (*wd) return cmd_winding();
        if (*kt) return cmd_ktable();
    } catch (const Error& e) {
        std::cerr << "qpi: " << e.what() << std::endl;
        return e.is_input_error() ? kInput : kFail;
    } catch (const std::exception& e) {
        std::cerr << "qpi: " << e.what() << std::endl;
        return kFail;
    }
    return kInput;
}

// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON model files. Needs nlohmann/json (json.hpp) on the include path.

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpi/laurent.hpp"

namespace qpi {

using Json = nlohmann::json;

// Model kinds:
//   hamiltonian  a single 2- or 3-variable symbol
//   suspension   a 2-variable symbol plus a constant epsilon (3d family)
//   homotopy     H(r) = H + r * delta over a parameter range
//   map          an invertible symbol used only as a glued map; no symmetry needed
struct ModelBundle {
    std::string name;
    std::string provenance;
    std::string kind = "hamiltonian";
    int dimension = 2;
    LaurentMatrix hamiltonian;
    SymmetryData symmetry;
    bool has_symmetry = false;
    std::optional<LaurentMatrix> epsilon;
    std::optional<LaurentMatrix> delta;
    std::array<double, 2> range{0.0, 1.0};

    int size() const { return hamiltonian.size(); }

    LaurentMatrix at(double r) const {
        if (!delta) return hamiltonian;
        return hamiltonian + r * *delta;
    }

    Family3D family() const {
        if (kind == "suspension") return suspend(hamiltonian, symmetry, *epsilon);
        if (hamiltonian.nvars() == 3) return Family3D::laurent3(hamiltonian);
        fail(ErrorKind::DimensionMismatch, "model '" + name + "' is not three dimensional");
    }

    const SymmetryData& sym() const {
        if (!has_symmetry) fail(ErrorKind::SchemaError, "model '" + name + "' carries no symmetry data");
        return symmetry;
    }
};

namespace io {

inline Json encode_matrix(const Matrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real() + 0.0, m(i, j).imag() + 0.0});  // + 0.0 drops negative zeros
        rows.push_back(row);
    }
    return rows;
}

inline Matrix decode_matrix(const Json& j, int n, const std::string& where) {
    auto bad = [&](const std::string& why) { fail(ErrorKind::SchemaError, where + ": " + why); };
    if (!j.is_array() || int(j.size()) != n) bad("expected " + std::to_string(n) + " rows");
    Matrix m(n, n);
    for (int r = 0; r < n; ++r) {
        const Json& row = j[r];
        if (!row.is_array() || int(row.size()) != n) bad("row " + std::to_string(r) + " has the wrong length");
        for (int c = 0; c < n; ++c) {
            const Json& e = row[c];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                bad("entry (" + std::to_string(r) + "," + std::to_string(c) + ") must be [re, im]");
            }
        }
    }
    return m;
}

inline Json encode_terms(const LaurentMatrix& m) {
    Json terms = Json::array();
    for (const auto& t : m.terms()) {
        Json e = Json::array();
        for (int v = 0; v < m.nvars(); ++v) e.push_back(t.exp[v]);
        terms.push_back({{"exp", e}, {"matrix", encode_matrix(t.coeff)}});
    }
    return terms;
}

inline LaurentMatrix decode_terms(const Json& j, int n, int nvars, const std::string& where) {
    if (!j.is_array()) fail(ErrorKind::SchemaError, where + " must be an array");
    std::vector<Term> terms;
    for (size_t i = 0; i < j.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        const Json& t = j[i];
        if (!t.is_object() || !t.contains("exp") || !t.contains("matrix"))
            fail(ErrorKind::SchemaError, w + " needs 'exp' and 'matrix'");
        const Json& e = t["exp"];
        if (!e.is_array() || int(e.size()) != nvars)
            fail(ErrorKind::SchemaError, w + ".exp must have one entry per variable");
        Exponent k{0, 0, 0};
        for (int v = 0; v < nvars; ++v) {
            if (!e[v].is_number_integer()) fail(ErrorKind::SchemaError, w + ".exp must be integers");
            k[v] = e[v].get<int>();
        }
        terms.push_back({k, decode_matrix(t["matrix"], n, w + ".matrix")});
    }
    return LaurentMatrix(n, nvars, std::move(terms));
}

inline std::string defect_message(const std::string& what, const CheckResult& r) {
    std::ostringstream s;
    s << what << " fails: defect " << r.defect << " at coefficient " << r.worst;
    return s.str();
}

} // namespace io

// Validates everything the bundle invariants promise.
inline void validate(const ModelBundle& b) {
    if (b.kind == "map") return;
    const auto herm = check_hermitian_on_torus(b.hamiltonian);
    if (!herm.ok) fail(ErrorKind::NotHermitian, io::defect_message("Hermiticity", herm));
    if (b.delta) {
        const auto hd = check_hermitian_on_torus(*b.delta);
        if (!hd.ok) fail(ErrorKind::NotHermitian, io::defect_message("Hermiticity of delta", hd));
    }
    if (!b.has_symmetry) fail(ErrorKind::SchemaError, "symmetry block is required for kind " + b.kind);
    auto sym_checks = [&](const LaurentMatrix& m, const std::string& tag) {
        const auto inv = check_inversion(m, b.symmetry);
        if (!inv.ok) fail(ErrorKind::SymmetryError, io::defect_message("inversion" + tag, inv));
        if (b.symmetry.chiral) {
            const auto ch = check_chiral(m, b.symmetry);
            if (!ch.ok) fail(ErrorKind::SymmetryError, io::defect_message("chiral symmetry" + tag, ch));
        }
    };
    sym_checks(b.hamiltonian, "");
    if (b.delta) sym_checks(*b.delta, " of delta");
    if (b.kind == "suspension") {
        if (!b.symmetry.chiral) fail(ErrorKind::MissingChiral, "suspension needs a chiral operator");
        (void)b.family();
    }
}

inline ModelBundle parse_model(const Json& j, bool check = true) {
    auto need = [&](const char* key) -> const Json& {
        if (!j.contains(key)) fail(ErrorKind::SchemaError, std::string("missing key '") + key + "'");
        return j[key];
    };
    if (!j.is_object()) fail(ErrorKind::SchemaError, "model must be a JSON object");
    ModelBundle b;
    const Json& size = need("size");
    if (!size.is_number_integer() || size.get<int>() < 1) fail(ErrorKind::SchemaError, "size must be a positive integer");
    const int n = size.get<int>();
    const Json& vars = need("vars");
    if (!vars.is_array() || vars.size() < 2 || vars.size() > 3)
        fail(ErrorKind::SchemaError, "vars must list two or three variable names");
    const int nv = int(vars.size());
    b.hamiltonian = io::decode_terms(need("terms"), n, nv, "terms");
    b.name = j.value("name", std::string("unnamed"));
    b.provenance = j.value("provenance", std::string());
    b.dimension = nv;
    if (j.contains("symmetry")) {
        const Json& s = j["symmetry"];
        if (!s.is_object() || !s.contains("inversion")) fail(ErrorKind::SchemaError, "symmetry needs 'inversion'");
        Matrix inv = io::decode_matrix(s["inversion"], n, "symmetry.inversion");
        std::optional<Matrix> chiral;
        if (s.contains("chiral")) chiral = io::decode_matrix(s["chiral"], n, "symmetry.chiral");
        b.symmetry = SymmetryData(std::move(inv), std::move(chiral));
        b.has_symmetry = true;
    }
    if (j.contains("family")) {
        const Json& f = j["family"];
        const std::string kind = f.value("kind", std::string());
        if (kind == "suspension") {
            if (nv != 2) fail(ErrorKind::SchemaError, "suspension needs a 2-variable symbol");
            if (!f.contains("epsilon")) fail(ErrorKind::SchemaError, "suspension needs 'epsilon'");
            b.kind = kind;
            b.dimension = 3;
            b.epsilon = LaurentMatrix::constant(io::decode_matrix(f["epsilon"], n, "family.epsilon"), 2);
        } else if (kind == "homotopy") {
            if (!f.contains("delta_terms")) fail(ErrorKind::SchemaError, "homotopy needs 'delta_terms'");
            b.kind = kind;
            b.delta = io::decode_terms(f["delta_terms"], n, nv, "family.delta_terms");
            if (f.contains("range")) {
                const Json& r = f["range"];
                if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
                    fail(ErrorKind::SchemaError, "family.range must be [start, end]");
                b.range = {r[0].get<double>(), r[1].get<double>()};
            }
        } else if (kind == "map") {
            b.kind = kind;
        } else {
            fail(ErrorKind::SchemaError, "unknown family kind '" + kind + "'");
        }
    }
    if (check) validate(b);
    return b;
}

inline ModelBundle load_model(const std::string& path, bool check = true) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::SchemaError, "cannot open model file " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        fail(ErrorKind::SchemaError, path + ": " + e.what());
    }
    try {
        return parse_model(j, check);
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

inline Json to_json(const ModelBundle& b) {
    static const char* names[] = {"z", "w", "t"};
    Json j;
    j["name"] = b.name;
    if (!b.provenance.empty()) j["provenance"] = b.provenance;
    j["size"] = b.size();
    j["vars"] = Json::array();
    for (int v = 0; v < b.hamiltonian.nvars(); ++v) j["vars"].push_back(names[v]);
    j["terms"] = io::encode_terms(b.hamiltonian);
    if (b.has_symmetry) {
        j["symmetry"]["inversion"] = io::encode_matrix(b.symmetry.inversion);
        if (b.symmetry.chiral) j["symmetry"]["chiral"] = io::encode_matrix(*b.symmetry.chiral);
    }
    if (b.kind == "suspension") {
        j["family"] = {{"kind", "suspension"}, {"epsilon", io::encode_matrix(b.epsilon->coefficient({0, 0, 0}))}};
    } else if (b.kind == "homotopy") {
        j["family"] = {{"kind", "homotopy"}, {"delta_terms", io::encode_terms(*b.delta)}, {"range", b.range}};
    } else if (b.kind == "map") {
        j["family"] = {{"kind", "map"}};
    }
    return j;
}

namespace io {
// Pretty prints containers but keeps scalar lists and matrix rows (lists of
// [re, im] pairs) on one line.
inline bool flat(const Json& j) {
    if (!j.is_structured() || j.empty()) return true;
    if (!j.is_array()) return false;
    for (const auto& e : j)
        if (e.is_object() || (e.is_array() && !std::all_of(e.begin(), e.end(), [](const Json& x) { return x.is_primitive(); })))
            return false;
    return true;
}

inline void write_layered(std::ostream& os, const Json& j, int indent = 0) {
    if (flat(j)) {
        os << j.dump();
        return;
    }
    const std::string pad(indent, ' '), inner(indent + 2, ' ');
    const bool obj = j.is_object();
    os << (obj ? "{\n" : "[\n");
    size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        os << inner;
        if (obj) os << Json(it.key()).dump() << ": ";
        write_layered(os, *it, indent + 2);
        os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << pad << (obj ? "}" : "]");
}
} // namespace io

inline void save_model(const ModelBundle& b, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::SchemaError, "cannot write " + path);
    io::write_layered(out, to_json(b));
    out << "\n";
}

} // namespace qpi

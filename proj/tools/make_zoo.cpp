// SPDX-License-Identifier: Apache-2.0
// Writes the model zoo. Usage: make_zoo [output directory]

#include <filesystem>
#include <iostream>

#include "qpi/boundary.hpp"
#include "qpi/gap.hpp"
#include "qpi/model_io.hpp"
#include "qpi/winding.hpp"
#include "qpi/zoo.hpp"

using namespace qpi;

namespace {

ModelBundle hamiltonian(std::string name, LaurentMatrix h, std::string note) {
    ModelBundle b;
    b.name = std::move(name);
    b.provenance = std::move(note);
    b.hamiltonian = std::move(h);
    b.symmetry = zoo::paper_symmetry();
    b.has_symmetry = true;
    b.dimension = b.hamiltonian.nvars();
    return b;
}

// First seed from `start` whose chiral model has a clear bulk gap and passes the
// half-plane certification.
ModelBundle random_model(int n, std::uint64_t start) {
    for (std::uint64_t seed = start;; ++seed) {
        LaurentMatrix h = chiral_hamiltonian(zoo::random_h(seed, n, 0.35, false));
        if (torus_gap(h) < 0.2) continue;
        if (!assumption_check_2d(h).all_invertible()) continue;
        ModelBundle b;
        b.name = "random-" + std::to_string(2 * n);
        b.provenance = "random Hermitian hoppings, seed " + std::to_string(seed) + ", amplitude 0.35";
        b.hamiltonian = std::move(h);
        b.symmetry = SymmetryData(zoo::block_swap(n), zoo::block_sign(n));
        b.has_symmetry = true;
        return b;
    }
}

} // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "models";
    std::filesystem::create_directories(dir);
    auto save = [&](const ModelBundle& b) {
        validate(b);
        save_model(b, (dir / (b.name + ".json")).string());
        std::cout << "wrote " << (dir / (b.name + ".json")).string() << "\n";
    };

    save(hamiltonian("paper-2d", zoo::paper_H(), "chiral 2d model with off-diagonal block h(z, w)"));

    ModelBundle r = hamiltonian("paper-2d-r", zoo::paper_H(0.0), "gap-preserving deformation H_r, r in [0, 1]");
    r.kind = "homotopy";
    r.delta = zoo::paper_H(1.0) - zoo::paper_H(0.0);
    save(r);

    ModelBundle s = hamiltonian("paper-3d", zoo::paper_H(), "suspension H cos - Pi sin, epsilon cos - Pi sin");
    s.kind = "suspension";
    s.dimension = 3;
    s.epsilon = zoo::paper_epsilon();
    save(s);

    save(hamiltonian("trivial-eps", zoo::paper_epsilon(), "constant symbol epsilon = I"));

    ModelBundle w;
    w.name = "winding-ref";
    w.provenance = "[[z, -1/w], [w, 1/z]]; negative powers act as conjugates off the torus";
    w.kind = "map";
    w.hamiltonian = reference_symbol();
    save(w);

    save(random_model(2, 1000));
    save(random_model(3, 2000));
}

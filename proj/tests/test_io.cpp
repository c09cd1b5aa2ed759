#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "qpi/config.hpp"
#include "qpi/model_io.hpp"
#include "qpi/report.hpp"
#include "qpi/zoo.hpp"

using namespace qpi;

namespace {

std::string model(const std::string& name) { return std::string(QPI_MODEL_DIR) + "/" + name + ".json"; }
std::string data(const std::string& name) { return std::string(QPI_TEST_DATA_DIR) + "/" + name + ".json"; }

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::Undecided;
}

}  // namespace

TEST(Zoo, Paper2dLoads) {
    auto b = load_model(model("paper-2d"));
    EXPECT_EQ(b.size(), 6);
    EXPECT_EQ(b.kind, "hamiltonian");
    EXPECT_TRUE(b.hamiltonian == zoo::paper_H());
    EXPECT_EQ(b.sym().inversion, zoo::block_swap(3));
}

TEST(Zoo, Paper3dIsSuspension) {
    auto b = load_model(model("paper-3d"));
    EXPECT_EQ(b.kind, "suspension");
    EXPECT_EQ(b.dimension, 3);
    EXPECT_EQ(b.family().kind(), Family3D::Kind::Suspension);
}

TEST(Zoo, HomotopyFamilyEndpoints) {
    auto b = load_model(model("paper-2d-r"));
    EXPECT_EQ(b.kind, "homotopy");
    EXPECT_TRUE(b.at(0.0) == zoo::paper_H(0.0));
    auto d = b.at(1.0) + Complex(-1.0) * zoo::paper_H(1.0);
    EXPECT_TRUE(d.terms().empty());
}

TEST(Zoo, EveryModelRoundTrips) {
    for (const auto& entry : std::filesystem::directory_iterator(QPI_MODEL_DIR)) {
        auto b = load_model(entry.path().string());
        const auto tmp = std::filesystem::temp_directory_path() / ("qpi-roundtrip-" + b.name + ".json");
        save_model(b, tmp.string());
        auto c = load_model(tmp.string());
        std::filesystem::remove(tmp);
        EXPECT_TRUE(b.hamiltonian == c.hamiltonian) << b.name;
        EXPECT_EQ(to_json(b), to_json(c)) << b.name;
    }
}

TEST(Errors, CommutingSymmetries) {
    EXPECT_EQ(kind_of([] { load_model(data("commuting-symmetries")); }), ErrorKind::SymmetryError);
}

TEST(Errors, NotHermitian) {
    EXPECT_EQ(kind_of([] { load_model(data("not-hermitian")); }), ErrorKind::NotHermitian);
}

TEST(Errors, MissingFile) { EXPECT_EQ(kind_of([] { load_model(data("nope")); }), ErrorKind::SchemaError); }

TEST(Errors, SchemaProblems) {
    EXPECT_EQ(kind_of([] { parse_model(Json::parse(R"({"vars":["z","w"],"terms":[]})")); }), ErrorKind::SchemaError);
    EXPECT_EQ(kind_of([] { parse_model(Json::parse(R"({"size":1,"vars":["z"],"terms":[]})")); }),
              ErrorKind::SchemaError);
    EXPECT_EQ(kind_of([] {
                  parse_model(Json::parse(R"({"size":1,"vars":["z","w"],"terms":[{"exp":[0],"matrix":[[1]]}]})"));
              }),
              ErrorKind::SchemaError);
    EXPECT_EQ(kind_of([] {
                  parse_model(Json::parse(R"({"size":1,"vars":["z","w"],"terms":[{"exp":[0,0],"matrix":[["x"]]}]})"));
              }),
              ErrorKind::SchemaError);
}

TEST(Errors, InversionDefectNamesCoefficient) {
    auto j = to_json(load_model(model("paper-2d")));
    j["symmetry"] = {{"inversion", io::encode_matrix(Matrix::Identity(6, 6))}};
    try {
        parse_model(j);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SymmetryError);
        EXPECT_NE(std::string(e.what()).find("at coefficient ("), std::string::npos);
    }
}

TEST(Encoding, AcceptsPlainNumbersAndPairs) {
    auto m = io::decode_matrix(Json::parse("[[1, [0, 2]], [[0, -2], 3]]"), 2, "m");
    EXPECT_EQ(m(0, 1), Complex(0, 2));
    EXPECT_EQ(m(1, 1), Complex(3, 0));
}

TEST(Encoding, NoNegativeZeros) {
    Matrix m = Matrix::Zero(1, 1);
    m(0, 0) = Complex(-0.0, -0.0);
    EXPECT_EQ(io::encode_matrix(m).dump(), "[[[0.0,0.0]]]");
}

TEST(Encoding, TermsSortedByExponent) {
    auto terms = io::encode_terms(zoo::paper_H());
    for (size_t i = 1; i < terms.size(); ++i)
        EXPECT_LT(terms[i - 1]["exp"].get<std::vector<int>>(), terms[i]["exp"].get<std::vector<int>>());
}

TEST(Config, OverridesApply) {
    Config c;
    apply_overrides(c, Json::parse(R"({"L": 32, "oracle": true, "section_sizes": [32, 64]})"));
    EXPECT_EQ(c.L, 32);
    EXPECT_TRUE(c.oracle);
    EXPECT_EQ(c.corner_options().L, 32);
    EXPECT_EQ(c.gap_options().section_sizes, (std::vector<int>{32, 64}));
}

TEST(Config, UnknownKeyRejected) {
    Config c;
    EXPECT_EQ(kind_of([&] { apply_overrides(c, Json::parse(R"({"Ll": 3})")); }), ErrorKind::SchemaError);
    EXPECT_EQ(kind_of([&] { apply_overrides(c, Json::parse(R"({"L": "big"})")); }), ErrorKind::SchemaError);
}

TEST(Config, RoundTripsThroughJson) {
    Config c;
    c.hinge_L = 20;
    Config d;
    apply_overrides(d, to_json(c));
    EXPECT_EQ(to_json(c), to_json(d));
}

TEST(Report, NumbersRounded) {
    EXPECT_EQ(report::num(0.1 + 0.2).get<double>(), 0.3);
    EXPECT_EQ(report::num(-1e-15).dump(), "0.0");
    EXPECT_EQ(report::num(std::nan("")).get<std::string>(), "nan");
}

TEST(Report, IndicatorIsByteStable) {
    auto a = report::indicator(mu2d(zoo::paper_H(), zoo::paper_symmetry())).dump();
    auto b = report::indicator(mu2d(zoo::paper_H(), zoo::paper_symmetry())).dump();
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("\"half_mu\":1"), std::string::npos);
}

TEST(Report, KeysSorted) {
    auto j = report::indicator(mu2d(zoo::paper_H(), zoo::paper_symmetry()));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
}

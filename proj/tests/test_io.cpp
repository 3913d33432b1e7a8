#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "wecon/dataset.hpp"
#include "wecon/model.hpp"
#include "wecon/params.hpp"

using namespace wecon;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("wecon_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("instance files round-trip bitwise") {
    TempDir dir;
    for (ProblemKind k : {ProblemKind::BiTSP, ProblemKind::TriTSP, ProblemKind::BiCVRP,
                          ProblemKind::BiKP}) {
        std::vector<Instance> original;
        for (int i = 0; i < 3; ++i) original.push_back(generate_instance(k, 7, 50 + i));
        const std::string path = dir.file(kind_name(k) + ".txt");
        write_instances(path, original);
        const auto loaded = read_instances(path);
        REQUIRE(loaded.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(loaded[i].kind == original[i].kind);
            CHECK(loaded[i].n == original[i].n);
            CHECK(loaded[i].features.v == original[i].features.v);
            CHECK(loaded[i].capacity == original[i].capacity);
        }
        // identical bytes when rewritten
        const std::string path2 = dir.file(kind_name(k) + "_2.txt");
        write_instances(path2, loaded);
        std::ifstream a(path), b(path2);
        std::string sa((std::istreambuf_iterator<char>(a)), {});
        std::string sb((std::istreambuf_iterator<char>(b)), {});
        CHECK(sa == sb);
    }
}

TEST_CASE("tsplib pairing: rescale to the unit square, reject count mismatch") {
    TempDir dir;
    auto write_tsp = [&](const std::string& name, int n, double scale) {
        std::ofstream out(dir.file(name));
        out << "NAME : " << name << "\nTYPE : TSP\nDIMENSION : " << n
            << "\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n";
        for (int i = 1; i <= n; ++i)
            out << i << ' ' << i * scale << ' ' << (n - i) * scale << '\n';
        out << "EOF\n";
    };
    write_tsp("a.tsp", 5, 100.0);
    write_tsp("b.tsp", 5, 40.0);
    const Instance inst = load_tsplib_pair({dir.file("a.tsp"), dir.file("b.tsp")}, "ab5");
    CHECK(inst.kind == ProblemKind::BiTSP);
    CHECK(inst.n == 5);
    CHECK(inst.id == "ab5");
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(inst.features.at(i, j) >= 0.0);
            CHECK(inst.features.at(i, j) <= 1.0);
        }
    CHECK(inst.features.at(4, 0) == 1.0);  // max coordinate maps to 1

    write_tsp("c.tsp", 6, 100.0);
    CHECK_THROWS_WITH_AS(load_tsplib_pair({dir.file("a.tsp"), dir.file("c.tsp")}),
                         doctest::Contains("counts differ"), std::runtime_error);

    write_tsp("d.tsp", 5, 70.0);
    const Instance tri =
        load_tsplib_pair({dir.file("a.tsp"), dir.file("b.tsp"), dir.file("d.tsp")});
    CHECK(tri.kind == ProblemKind::TriTSP);
    CHECK(tri.features.cols == 6);
}

TEST_CASE("checkpoints round-trip and detect corruption") {
    TempDir dir;
    const ModelConfig cfg{.d = 16, .L = 1, .M = 2};
    auto table = init_parameters<float>(cfg, ProblemKind::BiCVRP, 13);
    const std::string path = dir.file("model.wecn");
    save_checkpoint(table, path);

    auto loaded = load_checkpoint<float>(path);
    REQUIRE(loaded.size() == table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        CHECK(loaded.params()[i].name == table.params()[i].name);
        CHECK(loaded.params()[i].shape == table.params()[i].shape);
        CHECK(loaded.params()[i].value.v == table.params()[i].value.v);
    }

    // flip one payload byte: the CRC must catch it
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(32);
    char c;
    f.seekg(32);
    f.get(c);
    f.seekp(32);
    f.put(static_cast<char>(c ^ 0x40));
    f.close();
    CHECK_THROWS_WITH_AS(load_checkpoint<float>(path), doctest::Contains("CRC"),
                         std::runtime_error);

    std::ofstream bad(dir.file("bad.wecn"), std::ios::binary);
    bad << "NOTAMAGIC";
    bad.close();
    CHECK_THROWS_WITH_AS(load_checkpoint<float>(dir.file("bad.wecn")),
                         doctest::Contains("magic"), std::runtime_error);
}

TEST_CASE("key=value config files") {
    TempDir dir;
    std::ofstream out(dir.file("m.cfg"));
    out << "# comment line\n"
        << "d=32\n"
        << "L = 2\n"
        << "decoder=cco   # trailing comment\n"
        << "\n"
        << "grf=off\n";
    out.close();
    const auto kv = read_config(dir.file("m.cfg"));
    CHECK(kv.at("d") == "32");
    CHECK(kv.at("L") == "2");
    CHECK(kv.at("decoder") == "cco");
    CHECK(kv.at("grf") == "off");
    CHECK(kv.size() == 4);
}

TEST_CASE("points CSV round-trip") {
    TempDir dir;
    const std::vector<std::vector<double>> pts{{0.25, 0.75}, {1.0 / 3.0, 2.0 / 3.0}};
    write_points_csv(dir.file("p.csv"), pts);
    const auto back = read_points_csv(dir.file("p.csv"));
    CHECK(back == pts);
}

#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "magstrict/mesh.hpp"
#include "support/oracles.hpp"

using namespace magstrict;
using Catch::Approx;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("structured mesh counts and geometry") {
    // N_elem = 2^(2r+1), N_nodes = (2^r+1)^2, h_max = sqrt(2) 2^-r
    for (int r = 1; r <= 6; ++r) {
        const Mesh mesh = build_structured_mesh(r);
        CHECK(mesh.n_elems() == (1 << (2 * r + 1)));
        CHECK(mesh.n_nodes() == ((1 << r) + 1) * ((1 << r) + 1));
        CHECK(mesh.h_max == Approx(std::sqrt(2.0) / (1 << r)).epsilon(1e-14));
        double area = 0.0;
        for (int e = 0; e < mesh.n_elems(); ++e) {
            const double v = element_volume(mesh, e);
            CHECK(v > 0.0);
            area += v;
        }
        CHECK(area == Approx(1.0).epsilon(1e-12));
        REQUIRE_NOTHROW(validate_mesh(mesh));
    }

    const Mesh m4 = build_structured_mesh(4);
    CHECK(m4.n_elems() == 512);
    CHECK(m4.n_nodes() == 289);
    const Mesh m1 = build_structured_mesh(1);
    CHECK(m1.n_elems() == 8);
    CHECK(m1.n_nodes() == 9);
}

TEST_CASE("structured mesh boundary flags") {
    const Mesh mesh = build_structured_mesh(4);
    int corners = 0;
    for (int z = 0; z < mesh.n_nodes(); ++z) {
        const Vec2 x = mesh.node2(z);
        const double max_norm = std::max(std::abs(x[0]), std::abs(x[1]));
        CHECK(bool(mesh.boundary[z]) == (max_norm == Approx(0.5).margin(1e-14)));
        if (std::abs(x[0]) == Approx(0.5).margin(1e-14) && std::abs(x[1]) == Approx(0.5).margin(1e-14)) {
            ++corners;
            CHECK(mesh.boundary[z] == 1);
        }
    }
    CHECK(corners == 4);
    // max-norm rule agrees with the topological edge rule
    const auto topo = topological_boundary_nodes(mesh);
    for (int z = 0; z < mesh.n_nodes(); ++z) CHECK(topo[z] == mesh.boundary[z]);
}

TEST_CASE("structured mesh rejects bad refinement levels") {
    CHECK_THROWS_AS(build_structured_mesh(0), ConfigError);
    CHECK_THROWS_AS(build_structured_mesh(-3), ConfigError);
    CHECK_THROWS_AS(build_structured_mesh(15), ConfigError);
}

TEST_CASE("angle condition on T_r and simple meshes") {
    for (int r = 1; r <= 6; ++r) {
        const AngleReport report = check_angle_condition(build_structured_mesh(r));
        CHECK(report.pass);
        CHECK(report.worst_entry <= 1e-12);
    }

    // single equilateral triangle: off-diagonal entries are -cot(60deg)/2
    const Mesh eq = oracles::single_triangle_mesh({0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0});
    const AngleReport eq_report = check_angle_condition(eq);
    CHECK(eq_report.pass);
    CHECK(eq_report.worst_entry == Approx(-0.2886751345948129).epsilon(1e-12));

    const Mesh obtuse = oracles::obtuse_pair_mesh();
    REQUIRE_NOTHROW(validate_mesh(obtuse));
    const AngleReport bad = check_angle_condition(obtuse);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_entry > 0.0);
    CHECK(bad.node_i == 0);
    CHECK(bad.node_j == 1);
}

TEST_CASE("mesh save/load round trip") {
    const Mesh mesh = build_structured_mesh(1);
    const std::string path = temp_path("magstrict_mesh_roundtrip.txt");
    save_mesh(mesh, path);
    const Mesh copy = load_mesh(path);
    CHECK(copy.dim == mesh.dim);
    CHECK(copy.coords == mesh.coords);
    CHECK(copy.conn == mesh.conn);
    CHECK(copy.boundary == mesh.boundary);
    CHECK(copy.h_max == Approx(mesh.h_max).epsilon(1e-15));
    std::remove(path.c_str());
}

TEST_CASE("mesh loader reports malformed input with line numbers") {
    const std::string path = temp_path("magstrict_mesh_bad.txt");

    SECTION("empty file") {
        std::ofstream(path).close();
        CHECK_THROWS_WITH(load_mesh(path), Catch::Matchers::ContainsSubstring("malformed header"));
    }
    SECTION("index out of range") {
        std::ofstream out(path);
        out << "2 3 1\n0 0\n1 0\n0 1\n0 1 3\n1\n1\n1\n";
        out.close();
        try {
            load_mesh(path);
            FAIL("expected MeshIoError");
        } catch (const MeshIoError& err) {
            CHECK(std::string(err.what()).find("index out of range") != std::string::npos);
            CHECK(err.line == 5);
        }
    }
    SECTION("non-finite coordinate") {
        std::ofstream out(path);
        out << "2 3 1\n0 0\nnan 0\n0 1\n0 1 2\n1\n1\n1\n";
        out.close();
        CHECK_THROWS_WITH(load_mesh(path), Catch::Matchers::ContainsSubstring("non-finite coordinate"));
    }
    SECTION("bad boundary flag") {
        std::ofstream out(path);
        out << "2 3 1\n0 0\n1 0\n0 1\n0 1 2\n1\n2\n1\n";
        out.close();
        CHECK_THROWS_WITH(load_mesh(path), Catch::Matchers::ContainsSubstring("boundary flag"));
    }
    std::remove(path.c_str());
}

TEST_CASE("validation catches broken meshes") {
    Mesh mesh = build_structured_mesh(1);
    SECTION("misoriented element") {
        std::swap(mesh.conn[0], mesh.conn[1]);
        CHECK_THROWS_AS(validate_mesh(mesh), InvariantError);
    }
    SECTION("orphan node") {
        mesh.coords.push_back(7.0);
        mesh.coords.push_back(7.0);
        mesh.boundary.push_back(1);
        CHECK_THROWS_WITH(validate_mesh(mesh), Catch::Matchers::ContainsSubstring("orphan"));
    }
    SECTION("wrong boundary flag") {
        mesh.boundary[0] = 0;  // (−0.5,−0.5) is a corner
        CHECK_THROWS_WITH(validate_mesh(mesh),
                          Catch::Matchers::ContainsSubstring("topological boundary"));
    }
}

TEST_CASE("3D mesh files parse but stay out of the 2D pipeline") {
    // single positively oriented tetrahedron
    const std::string path = temp_path("magstrict_mesh_tet.txt");
    {
        std::ofstream out(path);
        out << "3 4 1\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n0 1 2 3\n1\n1\n1\n1\n";
    }
    const Mesh tet = load_mesh(path);
    CHECK(tet.dim == 3);
    CHECK(tet.n_elems() == 1);
    CHECK(element_volume(tet, 0) == Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK_THROWS_AS(check_angle_condition(tet), ConfigError);
    std::remove(path.c_str());
}

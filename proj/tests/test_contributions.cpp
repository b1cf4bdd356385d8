#include <catch_amalgamated.hpp>

#include <random>

#include "magstrict/contributions.hpp"
#include "magstrict/fem.hpp"
#include "support/oracles.hpp"

using namespace magstrict;
using Catch::Approx;

TEST_CASE("pi evaluation per kind") {
    const Mesh mesh = build_structured_mesh(1);
    std::mt19937 rng(71);
    const NodalVectorField m = oracles::random_magnetization(mesh, rng);

    SECTION("zero contribution") {
        const auto out = evaluate_pi(Contribution::zero(), m);
        for (double v : out.values) CHECK(v == 0.0);
    }

    SECTION("applied field under the literal (pi carries +f) reading") {
        const auto out = evaluate_pi(Contribution::applied_field({0.0, 0.0, 1.0}), m);
        for (int z = 0; z < mesh.n_nodes(); ++z) {
            CHECK(out(z, 0) == 0.0);
            CHECK(out(z, 1) == 0.0);
            CHECK(out(z, 2) == 1.0);
        }
        const auto flipped =
            evaluate_pi(Contribution::applied_field({0.0, 0.0, 1.0}, PiSign::physical), m);
        for (int z = 0; z < mesh.n_nodes(); ++z) CHECK(flipped(z, 2) == -1.0);
    }

    SECTION("uniaxial anisotropy at the pole is +-4 e3 per convention") {
        NodalVectorField pole(mesh, 3, FieldKind::magnetization);
        for (int z = 0; z < mesh.n_nodes(); ++z) pole.set_vec3(z, {0.0, 0.0, 1.0});
        const auto literal =
            evaluate_pi(Contribution::uniaxial_anisotropy({0.0, 0.0, 1.0}, 2.0), pole);
        const auto physical = evaluate_pi(
            Contribution::uniaxial_anisotropy({0.0, 0.0, 1.0}, 2.0, PiSign::physical), pole);
        for (int z = 0; z < mesh.n_nodes(); ++z) {
            CHECK(literal(z, 2) == Approx(4.0));
            CHECK(physical(z, 2) == Approx(-4.0));
        }
    }

    SECTION("factory validation") {
        CHECK_THROWS_AS(Contribution::uniaxial_anisotropy({0.0, 0.0, 2.0}, 1.0), ConfigError);
        CHECK_THROWS_AS(
            Contribution::applied_field({std::numeric_limits<double>::infinity(), 0.0, 0.0}),
            ConfigError);
    }
}

TEST_CASE("applied-field pi has m-independent L2 norm") {
    const Mesh mesh = build_structured_mesh(2);
    const Contribution pi = Contribution::applied_field({0.3, -0.2, 0.9});
    const CsrMatrix mass = assemble_mass(mesh, 3, false);
    std::mt19937 rng(73);
    double first = -1.0;
    for (int trial = 0; trial < 5; ++trial) {
        const NodalVectorField m = oracles::random_magnetization(mesh, rng);
        const auto p = evaluate_pi(pi, m);
        const auto mp = spmv(mass, p.values);
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < mp.size(); ++i) norm_sq += mp[i] * p.values[i];
        if (first < 0.0)
            first = norm_sq;
        else
            CHECK(norm_sq == Approx(first).epsilon(1e-12));
    }
    CHECK(first == Approx(dot(pi.f, pi.f)).epsilon(1e-12));  // |Omega| = 1
}

TEST_CASE("pointwise values stay below the sup bound") {
    const Mesh mesh = build_structured_mesh(2);
    std::mt19937 rng(79);
    for (const Contribution& pi :
         {Contribution::applied_field({0.5, 0.1, -0.3}),
          Contribution::uniaxial_anisotropy({0.0, 1.0, 0.0}, 1.7),
          Contribution::uniaxial_anisotropy(normalized(Vec3{1.0, 1.0, 1.0}), 0.4, PiSign::physical)}) {
        const double sup = pi_sup_bound(pi);
        for (int trial = 0; trial < 10; ++trial) {
            const NodalVectorField m = oracles::random_magnetization(mesh, rng);
            const auto p = evaluate_pi(pi, m);
            for (int z = 0; z < mesh.n_nodes(); ++z)
                CHECK(norm(p.vec3_at(z)) <= sup * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("verify_bound analytic estimates") {
    CHECK(verify_bound(Contribution::zero(), 1.0, 1.0) == 0.0);
    CHECK(verify_bound(Contribution::applied_field({0.0, 0.0, 1.0}), 0.3, 1.0) ==
          Approx(0.3).epsilon(1e-14));
    CHECK(verify_bound(Contribution::uniaxial_anisotropy({0.0, 0.0, 1.0}, 2.0), 1.0, 1.0) ==
          Approx(16.0).epsilon(1e-14));

    // declared bound below the estimate is an error
    Contribution lowball = Contribution::applied_field({0.0, 0.0, 1.0});
    lowball.declared_bound = 0.1;
    CHECK_THROWS_AS(verify_bound(lowball, 0.3, 1.0), InvariantError);
    lowball.declared_bound = 0.5;
    CHECK(verify_bound(lowball, 0.3, 1.0) == Approx(0.3));

    CHECK_THROWS_AS(verify_bound(Contribution::zero(), 0.0, 1.0), ConfigError);
}

TEST_CASE("pi load vector matches nodal evaluation under lumping") {
    const Mesh mesh = build_structured_mesh(2);
    std::mt19937 rng(83);
    const NodalVectorField m = oracles::random_magnetization(mesh, rng);
    const Contribution pi = Contribution::uniaxial_anisotropy({0.0, 0.0, 1.0}, 1.5);

    const auto load = assemble_pi_load(mesh, pi, m, QuadratureMode::lumped);
    const auto w = lumped_mass_weights(mesh);
    const auto nodal = evaluate_pi(pi, m);
    for (int z = 0; z < mesh.n_nodes(); ++z)
        for (int c = 0; c < 3; ++c)
            CHECK(load[3 * z + c] == Approx(w[z] * nodal(z, c)).margin(1e-14));

    // consistent mode integrates the linear-in-m integrand exactly: compare
    // against the consistent mass applied to the nodal values
    const auto load_c = assemble_pi_load(mesh, pi, m, QuadratureMode::consistent);
    const CsrMatrix mass = assemble_mass(mesh, 3, false);
    const auto expected = spmv(mass, nodal.values);
    for (std::size_t i = 0; i < load_c.size(); ++i)
        CHECK(load_c[i] == Approx(expected[i]).margin(1e-12));
}

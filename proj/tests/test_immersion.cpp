#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cmc/catalog.hpp"
#include "cmc/immersion.hpp"
#include "oracle.hpp"

using namespace cmc;

namespace {

InducedOptions grid(int n) {
    InducedOptions o;
    o.nu = o.nv = n;
    return o;
}

// Compare library data against differences of the position map at a few interior samples.
void expect_matches_oracle(const ConformalImmersion& imm, const oracle::Phi& phi, double tol) {
    const auto d = induced_data(imm, grid(7));
    for (int j = 1; j < 6; j += 2)
        for (int i = 1; i < 6; i += 2) {
            const auto& s = d.at(i, j);
            const double sign = 1.0;
            auto g = oracle::fd_geometry([&](double u, double v) { return imm.position(u, v); }, phi, s.u, s.v, sign);
            if (std::abs(g.nu - s.nu) > 1e-3 || std::abs(g.H - s.H) > 1e-3 * (1 + std::abs(s.H)))
                g = oracle::fd_geometry([&](double u, double v) { return imm.position(u, v); }, phi, s.u, s.v, -1.0);
            EXPECT_NEAR(g.lambda, s.lambda, tol);
            EXPECT_NEAR(g.nu, s.nu, tol);
            EXPECT_NEAR(g.H, s.H, tol);
            EXPECT_NEAR(g.K, s.K, tol);
            EXPECT_NEAR(std::abs(g.p - s.p), 0.0, tol);
            EXPECT_NEAR(std::abs(g.h_z - s.h_z), 0.0, tol);
            EXPECT_LT(g.conformality, tol);
        }
}

const oracle::Phi flat_phi = [](double, double) { return 0.0; };

}  // namespace

TEST(InducedData, SliceOverPoincareDisk) {
    const auto d = induced_data(slice(Chart::poincare(), 0.0), grid(21));
    for (const auto& s : d.samples) {
        EXPECT_NEAR(s.nu, -1.0, 1e-15);
        EXPECT_EQ(std::abs(s.h_z), 0.0);
        EXPECT_NEAR(std::abs(s.p), 0.0, 1e-15);
        EXPECT_NEAR(s.H, 0.0, 1e-15);
        EXPECT_NEAR(s.K, 0.0, 1e-15);
        EXPECT_NEAR(s.KI, -1.0, 1e-12);
    }
}

TEST(InducedData, TiltedPlaneHandValues) {
    const double theta = oracle::pi / 3;
    const auto d = induced_data(tilted_plane(theta), grid(11));
    for (const auto& s : d.samples) {
        EXPECT_NEAR(s.lambda, 1.0, 1e-15);
        EXPECT_NEAR(std::abs(s.nu), std::cos(theta), 1e-15);
        EXPECT_NEAR(s.H, 0.0, 1e-15);
        EXPECT_NEAR(std::abs(s.p), 0.0, 1e-15);
        EXPECT_NEAR(4 * std::norm(s.h_z), std::sin(theta) * std::sin(theta), 1e-15);
        EXPECT_NEAR(4 * std::norm(s.h_z), s.lambda * (1 - s.nu * s.nu), 1e-15);
    }
}

TEST(InducedData, HyperbolicCylinderHandValues) {
    const auto d = induced_data(vertical_cylinder(Chart::poincare(), 0.75), grid(11));
    for (const auto& s : d.samples) {
        EXPECT_NEAR(s.lambda, 1.0, 1e-13);
        EXPECT_NEAR(s.nu, 0.0, 1e-15);
        EXPECT_NEAR(std::abs(s.H), 0.75, 1e-13);
        EXPECT_NEAR(s.K, 0.0, 1e-13);
        EXPECT_NEAR(std::abs(s.p), 0.375, 1e-13);
    }
}

TEST(InducedData, AgreesWithFiniteDifferenceOracle) {
    expect_matches_oracle(tilted_plane(0.7), flat_phi, 1e-6);
    expect_matches_oracle(vertical_cylinder(Chart::flat(), 0.5), flat_phi, 1e-6);
    expect_matches_oracle(vertical_cylinder(Chart::poincare(), 0.75), oracle::poincare_phi, 1e-6);
    expect_matches_oracle(vertical_plane(Chart::poincare()), oracle::poincare_phi, 1e-6);
    expect_matches_oracle(slice(Chart::poincare(), 1.0), oracle::poincare_phi, 1e-6);
}

TEST(InducedData, OracleCylinderHasHandValues) {
    const auto g = oracle::fd_geometry(oracle::hyperbolic_cylinder(0.75), oracle::poincare_phi, 0.3, 0.1);
    EXPECT_NEAR(g.lambda, 1.0, 1e-7);
    EXPECT_NEAR(std::abs(g.H), 0.75, 1e-6);
    EXPECT_NEAR(std::abs(g.p), 0.375, 1e-6);
}

TEST(InducedData, AlgebraicInvariantsHoldEverywhere) {
    for (const auto& imm : {slice(Chart::sphere(), 0.0), vertical_plane(Chart::flat()), tilted_plane(0.3),
                            vertical_cylinder(Chart::flat(), 0.5), vertical_cylinder(Chart::poincare(), 1.0)}) {
        const auto d = induced_data(imm, grid(15));
        for (const auto& s : d.samples) {
            EXPECT_LE(s.nu * s.nu, 1.0 + 1e-15);
            EXPECT_GT(s.lambda, 0.0);
            EXPECT_NEAR(4 * std::norm(s.p), s.lambda * s.lambda * (s.H * s.H - s.K), 1e-12);
            EXPECT_NEAR(s.T_norm2 + s.nu * s.nu, 1.0, 1e-12);
            EXPECT_NEAR(s.KI, s.K + s.kappa * s.nu * s.nu, 1e-12);
        }
    }
}

TEST(InducedData, Errors) {
    const auto degenerate = ConformalImmersion::analytic(
        Chart::flat(), {-1, 1, -1, 1}, [](const SurfaceJet& u, const SurfaceJet&) {
            return std::array<SurfaceJet, 3>{u * 0.0, u * 0.0, u * 0.0};
        });
    try {
        induced_data(degenerate, grid(5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate);
    }
    const auto stretched = ConformalImmersion::analytic(
        Chart::flat(), {-1, 1, -1, 1}, [](const SurfaceJet& u, const SurfaceJet& v) {
            return std::array<SurfaceJet, 3>{2.0 * u, v, SurfaceJet(0.0)};
        });
    try {
        induced_data(stretched, grid(5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::not_conformal);
    }
}

TEST(Structure, SliceResidualsVanish) {
    const auto r = verify_structure(induced_data(slice(Chart::poincare(), 0.0), grid(31)));
    ASSERT_EQ(r.entries.size(), 6u);
    for (const auto& e : r.entries) EXPECT_LT(e.max_residual, 1e-14) << e.equation_id;
}

TEST(Structure, CylinderEq6HandValue) {
    const auto d = induced_data(vertical_cylinder(Chart::poincare(), 0.75), grid(11));
    for (const auto& s : d.samples) {
        const auto lhs = s.nu_z;
        const auto rhs = -s.H * s.h_z - (2.0 / s.lambda) * s.p * std::conj(s.h_z);
        EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-15);
    }
    EXPECT_LT(verify_structure(d).at("eq6_nu_z").max_residual, 1e-15);
}

TEST(Structure, TiltedPlaneBelowTenToMinusTen) {
    const auto r = verify_structure(induced_data(tilted_plane(oracle::pi / 3), grid(101)));
    for (const auto& e : r.entries) EXPECT_LT(e.max_residual, 1e-10) << e.equation_id;
}

TEST(Structure, SampledCylinderConvergesAtSecondOrder) {
    const auto imm = vertical_cylinder(Chart::poincare(), 0.75);
    const auto coarse = induced_data(imm.sample(41, 41));
    const auto fine = induced_data(imm.sample(81, 81));
    const auto rc = verify_structure(coarse), rf = verify_structure(fine);
    for (const char* id : {"eq3_height_gradient", "eq2_gauss"}) {  // roundoff-level residuals are skipped
        const double a = rc.at(id).max_residual, b = rf.at(id).max_residual;
        if (a > 1e-9) {
            EXPECT_GT(a / b, 3.5) << id;
        }
    }
    EXPECT_TRUE(rf.pass());
}

TEST(Structure, CodazziCurvatureTermWithHz) {
    StructureOptions o;
    o.include_H_z = true;
    EXPECT_TRUE(verify_structure(induced_data(vertical_cylinder(Chart::poincare(), 0.75), grid(21)), o).pass());
}

TEST(ARDifferential, HandValues) {
    const auto slice_q = ar_differential(induced_data(slice(Chart::poincare(), 0.0), grid(11)), -1);
    for (const auto& q : slice_q.Q) EXPECT_NEAR(std::abs(q), 0.0, 1e-15);
    const auto tilt_q = ar_differential(induced_data(tilted_plane(0.5), grid(11)), 0);
    for (const auto& q : tilt_q.Q) EXPECT_NEAR(std::abs(q), 0.0, 1e-15);
    const auto d = induced_data(vertical_cylinder(Chart::poincare(), 0.75), grid(11));
    const auto q = ar_differential(d, -1);
    for (std::size_t k = 0; k < q.Q.size(); ++k) {
        EXPECT_NEAR(std::norm(d.samples[k].h_z), 0.25, 1e-14);
        EXPECT_NEAR(std::abs(q.Q[k]), 0.3125, 1e-13);
    }
    EXPECT_TRUE(q.holomorphic_expected());
    EXPECT_LT(q.max_qzbar, 1e-13);
}

TEST(ARDifferential, NotAssertedForNonconstantCurvature) {
    const Chart bumpy = Chart::custom("0.1*(x^2+y^2)", Region::disk(0, 0, 1));
    const auto q = ar_differential(induced_data(slice(bumpy, 0.0), grid(11)), -1);
    EXPECT_FALSE(q.holomorphic_expected());
}

TEST(NuIdentities, CylinderGradientIdentityCancelsExactly) {
    const auto d = induced_data(vertical_cylinder(Chart::poincare(), 0.75), grid(21));
    const auto q = ar_differential(d, -1);
    for (const auto& s : d.samples) EXPECT_NEAR(s.grad_nu2, 0.0, 1e-15);
    // RHS: -(4H^2 - 1)^2 / 4 + 4 |Q|^2 with K = 0, lambda = 1
    const double H = 0.75;
    EXPECT_NEAR(-(4 * H * H - 1) * (4 * H * H - 1) / 4 + 4 * 0.3125 * 0.3125, 0.0, 1e-15);
    EXPECT_LT(nu_gradient_identity(d, -1, q).entries.at(0).max_residual, 1e-12);
}

TEST(NuIdentities, SliceAndTiltedPlane) {
    const auto ds = induced_data(slice(Chart::poincare(), 0.0), grid(21));
    EXPECT_LT(nu_gradient_identity(ds, -1, ar_differential(ds, -1)).entries.at(0).max_residual, 1e-12);
    EXPECT_LT(nu_laplacian_identity(ds).entries.at(0).max_residual, 1e-12);
    const auto dt = induced_data(tilted_plane(oracle::pi / 4), grid(21));
    EXPECT_LT(nu_laplacian_identity(dt).entries.at(0).max_residual, 1e-14);
    try {
        nu_gradient_identity(dt, 0, ar_differential(dt, 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::hypothesis);
    }
}

TEST(NuIdentities, JacobiEqualsLaplacianResidualBitwise) {
    for (const auto& imm : {slice(Chart::poincare(), 0.2), vertical_plane(Chart::poincare()), tilted_plane(1.1),
                            vertical_cylinder(Chart::flat(), 0.5), vertical_cylinder(Chart::poincare(), 0.75),
                            vertical_cylinder(Chart::poincare(), 0.75).sample(31, 31)}) {
        const auto d = induced_data(imm, grid(25));
        const auto a = nu_laplacian_residuals(d), b = jacobi_residuals(d);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (std::isnan(a[k])) {
                EXPECT_TRUE(std::isnan(b[k]));
                continue;
            }
            EXPECT_EQ(a[k], b[k]);
        }
    }
}

TEST(NuIdentities, SampledGradientIdentityIsSecondOrder) {
    const auto imm = vertical_cylinder(Chart::poincare(), 0.75);
    double prev = 0;
    for (int n : {41, 81}) {
        const auto d = induced_data(imm.sample(n, n));
        const double r = nu_gradient_identity(d, -1, ar_differential(d, -1)).entries.at(0).max_residual;
        if (prev > 0) {
            EXPECT_GT(prev / r, 3.5);
        }
        prev = r;
    }
}

TEST(Subharmonic, SpotValueAndBounds) {
    EXPECT_NEAR(f_m(-1.0, 1.0, 1.0 / std::sqrt(2.0)), -oracle::pi / 4, 1e-15);
    EXPECT_EQ(f_m(0.0, 2.0, 0.8), 0.0);
    EXPECT_NEAR(f_m_lower_bound(1.0, 1.0 / std::sqrt(2.0)), -oracle::pi / 4, 1e-15);
    for (double nu = -1; nu <= 0; nu += 0.125) EXPECT_NEAR(f_m(nu, 1.5, 0.9), oracle::f_m(1.5, 0.9, nu), 1e-15);
}

TEST(Subharmonic, CylinderIsIdenticallyZero) {
    InducedOptions o = grid(21);
    o.nonpositive_nu = true;
    const auto p = f_subharmonic(induced_data(vertical_cylinder(Chart::poincare(), 0.75), o), 2.0);
    for (double f : p.f) EXPECT_EQ(f, 0.0);
    EXPECT_NEAR(p.min_lap_f, 0.0, 1e-14);
    EXPECT_TRUE(p.subharmonic);
    EXPECT_TRUE(p.within_bounds);
}

TEST(Subharmonic, HypothesisErrors) {
    auto kind_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::io;
    };
    InducedOptions o = grid(11);
    o.nonpositive_nu = true;
    const auto flat_cyl = induced_data(vertical_cylinder(Chart::flat(), 0.5), o);
    EXPECT_EQ(kind_of([&] { f_subharmonic(flat_cyl, 1.0); }), ErrorKind::hypothesis);
    EXPECT_EQ(kind_of([&] { f_subharmonic_from_fields({0.5}, {0.0}, 0.75, 1.0); }), ErrorKind::hypothesis);
    EXPECT_EQ(kind_of([&] { f_subharmonic_from_fields({-0.5}, {0.0}, 0.4, 1.0); }), ErrorKind::hypothesis);
    EXPECT_EQ(kind_of([&] { f_subharmonic_from_fields({-0.5}, {0.0}, 0.75, 0.0); }), ErrorKind::hypothesis);
}

TEST(GridFile, WriteReadRoundTrip) {
    const auto imm = vertical_cylinder(Chart::poincare(), 0.75).sample(17, 13);
    const std::string path = ::testing::TempDir() + "cyl.grid";
    write_immersion_grid(imm, path);
    const auto back = read_immersion_grid(path);
    EXPECT_EQ(back.samples().nu, 17);
    EXPECT_EQ(back.samples().nv, 13);
    EXPECT_EQ(back.samples().F1, imm.samples().F1);
    EXPECT_EQ(back.samples().h, imm.samples().h);
    EXPECT_EQ(back.rect(), imm.rect());
    EXPECT_EQ(induced_data(back).samples, induced_data(imm).samples);
}

TEST(GridFile, ParseErrorsCarryLocation) {
    std::istringstream bad("# cmclab immersion grid v1\nchart model=flat\nbounds 0 1 0 1\nshape 5 x\n");
    try {
        read_immersion_grid(bad);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4);
    }
}

TEST(Invariance, TranslationIsBitwiseForAnalyticAndSampled) {
    const auto imm = vertical_cylinder(Chart::poincare(), 0.75);
    for (const auto& x : {imm, imm.sample(21, 21)}) {
        const auto a = induced_data(x, grid(21)), b = induced_data(x.translated(3.25), grid(21));
        EXPECT_EQ(a.samples, b.samples);
    }
    const std::string path = ::testing::TempDir() + "shifted.grid";
    write_immersion_grid(imm.sample(9, 9).translated(2.0), path);
    const auto back = read_immersion_grid(path);
    EXPECT_EQ(back.samples().h[0], imm.position(imm.rect().u0, imm.rect().v0)[2] + 2.0);
}

TEST(Invariance, FlipNegatesNuHP) {
    const auto imm = vertical_cylinder(Chart::poincare(), 0.75).sample(21, 21);
    InducedOptions f;
    f.flip_normal = true;
    const auto a = induced_data(imm), b = induced_data(imm, f);
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        EXPECT_EQ(b.samples[k].nu, -a.samples[k].nu);
        EXPECT_EQ(b.samples[k].H, -a.samples[k].H);
        EXPECT_EQ(b.samples[k].p, -a.samples[k].p);
    }
    const auto ra = verify_structure(a), rb = verify_structure(b);
    for (std::size_t k = 0; k < ra.entries.size(); ++k) EXPECT_EQ(ra.entries[k], rb.entries[k]);
}

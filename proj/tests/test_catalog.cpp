#include <cmath>

#include <gtest/gtest.h>

#include "cmc/catalog.hpp"
#include "cmc/immersion.hpp"
#include "oracle.hpp"

using namespace cmc;

namespace {
FundamentalData data(const ConformalImmersion& imm, int n = 21) {
    InducedOptions o;
    o.nu = o.nv = n;
    return induced_data(imm, o);
}
ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::io;
}
}  // namespace

TEST(Slice, FlatAndSphere) {
    for (const auto& s : data(slice(Chart::flat(), 3.0)).samples) {
        EXPECT_EQ(s.nu, -1.0);
        EXPECT_EQ(s.KI, 0.0);
    }
    const auto d = data(slice(Chart::sphere(), 0.0));
    for (const auto& s : d.samples) EXPECT_NEAR(s.KI, 1.0, 1e-12);
    EXPECT_LT(verify_structure(d).at("eq2_gauss").max_residual, 1e-12);
}

TEST(VerticalPlane, PoincareDiameterAndFlatLine) {
    for (const auto* chart : {"poincare", "flat"}) {
        const auto d = data(vertical_plane(chart_from_config({{"model", chart}})));
        for (const auto& s : d.samples) {
            EXPECT_NEAR(s.H, 0.0, 1e-14);
            EXPECT_EQ(s.nu, 0.0);
            EXPECT_NEAR(s.lambda, 1.0, 1e-14);
            EXPECT_NEAR(std::abs(s.h_z - std::complex<double>(0, -0.5)), 0.0, 1e-15);
            EXPECT_NEAR(4 * std::norm(s.h_z), s.lambda * (1 - s.nu * s.nu), 1e-14);
            EXPECT_NEAR(s.KI, 0.0, 1e-13);
        }
    }
    EXPECT_EQ(kind_of([] { vertical_plane(Chart::custom("x*y", Region::disk(0, 0, 1))); }), ErrorKind::capability);
}

TEST(TiltedPlane, AnglesAndLimits) {
    const auto d3 = data(tilted_plane(oracle::pi / 3), 101);
    for (const auto& s : d3.samples) EXPECT_NEAR(std::abs(s.nu), 0.5, 1e-15);
    for (const auto& e : verify_structure(d3).entries) EXPECT_LT(e.max_residual, 1e-10);
    for (const auto& s : data(tilted_plane(oracle::pi / 4)).samples) {
        EXPECT_NEAR(4 * std::norm(s.h_z), 0.5, 1e-15);
        EXPECT_NEAR(1 - s.nu * s.nu, 0.5, 1e-15);
    }
    for (const auto& s : data(tilted_plane(oracle::pi / 2)).samples) EXPECT_NEAR(s.nu, 0.0, 1e-15);
    EXPECT_EQ(kind_of([] { tilted_plane(0.0); }), ErrorKind::domain);
    EXPECT_EQ(kind_of([] { tilted_plane_model(Chart::poincare(), 0.5); }), ErrorKind::capability);
}

TEST(VerticalCylinder, EuclideanUnitCircle) {
    const auto m = vertical_cylinder_model(Chart::flat(), 0.5);
    for (const auto& s : data(m.immersion).samples) {
        EXPECT_NEAR(std::abs(s.p), 0.25, 1e-14);
        EXPECT_NEAR(std::hypot(s.x, s.y), 1.0, 1e-14);
    }
}

TEST(VerticalCylinder, HyperbolicCircle) {
    const auto m = vertical_cylinder_model(Chart::poincare(), 0.75);
    const double rho = std::atanh(2.0 / 3.0);
    EXPECT_NEAR(rho, 0.8047189562170502, 1e-15);
    const auto d = data(m.immersion);
    for (const auto& s : d.samples) {
        EXPECT_NEAR(std::abs(s.p), 0.375, 1e-13);
        EXPECT_NEAR(std::hypot(s.x, s.y), std::tanh(rho / 2), 1e-14);
    }
    for (const auto& q : ar_differential(d, -1).Q) EXPECT_NEAR(std::abs(q), 0.3125, 1e-13);
    EXPECT_FALSE(m.note.empty());
}

TEST(VerticalCylinder, Eq6VanishesForAdmissibleParameters) {
    for (double k : {-1.0, -0.25, -4.0, 0.0})
        for (double H : {0.3, 0.75, 1.0, 2.5}) {
            if (k < 0 && 2 * H <= std::sqrt(-k)) continue;
            const auto d = data(vertical_cylinder(Chart::space_form(k), H), 9);
            EXPECT_LT(verify_structure(d).at("eq6_nu_z").max_residual, 1e-14) << k << " " << H;
            EXPECT_TRUE(verify_structure(d).pass());
        }
}

TEST(VerticalCylinder, OutsideExistenceRange) {
    EXPECT_EQ(kind_of([] { vertical_cylinder(Chart::poincare(), 0.5); }), ErrorKind::unsupported_curve);
    EXPECT_EQ(kind_of([] { vertical_cylinder(Chart::poincare(), 0.4); }), ErrorKind::unsupported_curve);
    EXPECT_EQ(kind_of([] { vertical_cylinder(Chart::flat(), 0.0); }), ErrorKind::unsupported_curve);
    EXPECT_EQ(kind_of([] { vertical_cylinder(Chart::sphere(), 1.0); }), ErrorKind::capability);
}

TEST(Classify, Statements) {
    const auto a = classify(0, 0);
    EXPECT_EQ(a.statement, "slice | vertical plane | tilted plane");
    EXPECT_EQ(a.kinds.size(), 3u);
    const auto b = classify(0.75, -1);
    EXPECT_EQ(b.statement, "vertical cylinder, geodesic curvature 1.5");
    ASSERT_EQ(b.kinds.size(), 1u);
    EXPECT_EQ(b.kinds[0], ModelKind::vertical_cylinder);
    EXPECT_FALSE(classify(0.4, -1).classified());
    EXPECT_EQ(classify(0.5, -1).statement, "outside theorem hypotheses");
    EXPECT_EQ(classify(-0.75, -1).statement, b.statement);
}

TEST(Catalog, ModelNames) {
    EXPECT_EQ(model_kind_from_name("vplane"), ModelKind::vertical_plane);
    EXPECT_EQ(model_kind_from_name("cylinder"), ModelKind::vertical_cylinder);
    EXPECT_FALSE(model_kind_from_name("helicoid").has_value());
}

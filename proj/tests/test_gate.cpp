#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fdr/gate.hpp"

using namespace fdr;
using doctest::Approx;

TEST_CASE("stiffness proxy") {
    Material m;
    m.youngs_modulus = 0.574e6;
    const FlapGateGeometry b{8e-3, 0.5e-3, 2e-3};
    CHECK(gate_stiffness(b, m) == Approx(1.79375e-5).epsilon(1e-12));

    FlapGateGeometry thick = b;
    thick.t *= 2.0;
    CHECK(gate_stiffness(thick, m) == Approx(8.0 * gate_stiffness(b, m)).epsilon(1e-14));

    const Device a = table1_device("A");
    const Device c = table1_device("C");
    CHECK(gate_stiffness(a.geometry.gate, a.material) > gate_stiffness(c.geometry.gate, c.material));
}

TEST_CASE("reference stiffness is Type B") {
    const Device b = table1_device("B");
    CHECK(reference_stiffness() == gate_stiffness(b.geometry.gate, b.material));
}

TEST_CASE("opening law oracle") {
    // Type B gate so that D_ref / D = 1 and k0 is the effective compliance
    const Device b = table1_device("B");
    const GateComplianceModel m{1e-10, 5e3, 1.0};
    const GateState s = opening_area(25e3, m, b.geometry.gate, b.material);
    CHECK(s.a_fg == Approx(2.0e-6).epsilon(1e-12));
    CHECK(s.open_fraction == Approx(2.0e-6).epsilon(1e-12));
}

TEST_CASE("closed at rest and below crack pressure") {
    const Device b = table1_device("B");
    const GateComplianceModel m = compliance_model(b.geometry, ModelCoefficients{});
    CHECK(opening_area(0.0, m, b.geometry.gate, b.material).a_fg == 0.0);
    CHECK(opening_area(m.crack_pressure, m, b.geometry.gate, b.material).a_fg == 0.0);
}

TEST_CASE("opening grows with pressure and saturates") {
    const Device b = table1_device("B");
    const GateComplianceModel m = compliance_model(b.geometry, ModelCoefficients{});
    CHECK(m.a_fg_max == Approx(b.geometry.gate.w * b.geometry.gate.h));
    const double a47 = opening_area(47.1e3, m, b.geometry.gate, b.material).a_fg;
    const double a21 = opening_area(21.1e3, m, b.geometry.gate, b.material).a_fg;
    const double a5 = opening_area(5.4e3, m, b.geometry.gate, b.material).a_fg;
    CHECK(a47 >= a21);
    CHECK(a21 >= a5);

    double prev = -1.0;
    for (double p = 0.0; p < 2e6; p += 1e3) {
        const GateState s = opening_area(p, m, b.geometry.gate, b.material);
        CHECK(s.a_fg >= prev);
        CHECK(s.a_fg <= m.a_fg_max);
        CHECK(s.open_fraction >= 0.0);
        CHECK(s.open_fraction <= 1.0);
        prev = s.a_fg;
    }
    CHECK(opening_area(1e9, m, b.geometry.gate, b.material).open_fraction == 1.0);
}

TEST_CASE("stiffer gates open less at equal pressure") {
    const ModelCoefficients c;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> up(9e3, 6e4);
    for (int i = 0; i < 100; ++i) {
        const double p = up(rng);
        auto open = [&](const char* id) {
            const Device d = table1_device(id);
            return opening_area(p, compliance_model(d.geometry, c), d.geometry.gate, d.material).a_fg;
        };
        CHECK(open("E") <= open("B"));
        CHECK(open("B") <= open("D"));
        CHECK(open("K") <= open("J"));
        CHECK(open("J") <= open("B"));
    }
}

TEST_CASE("opening ratio") {
    CHECK(opening_ratio(0.0, 6e-6) == 0.0);
    CHECK(opening_ratio(6e-6, 6e-6) == 1.0);
    CHECK(opening_ratio(3e-6, 6e-6) == 0.5);
}

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rdm/floquet.hpp"
#include "rdm/lattice.hpp"
#include "rdm/model.hpp"
#include "rdm/rng.hpp"
#include "rdm/spectra.hpp"

using namespace rdm;
using model::assemble_potential;
using model::approx_almost_sure_spectrum;
using model::build_omega_star;
using model::check_h1;
using model::check_h2;
using model::classify_minimizers_1d;
using model::Configuration;
using model::constant_configuration;
using model::Distribution;
using model::Geometry;
using model::ground_energy_map;
using model::periodic_configuration;
using model::SingleSite;
using model::single_site_operator;
using model::spectral_bottom_periodic;
using model::verify_bubbles;
using model::window_configuration;

namespace {

SingleSite bdm_q(double lambda) { return SingleSite{Geometry{{2}, {1}}, {lambda}}; }

Configuration bdm_omega1(double /*unused*/ = 0) {
    Geometry g{{2}, {1}};
    return constant_configuration(g, {1});
}

}  // namespace

TEST_CASE("geometry derives the displacement set, corners, and center") {
    Geometry g{{8}, {3}};
    REQUIRE(g.d == 1);
    REQUIRE(g.a_min() == Site{5});
    auto dis = g.displacements();
    REQUIRE(dis.size() == 6);
    REQUIRE(dis.front() == Site{0});
    REQUIRE(dis.back() == Site{5});
    auto cor = g.corners();
    REQUIRE(cor == std::vector<Site>{{0}, {5}});
    REQUIRE(g.center_r() == std::vector<Index>{3});
    REQUIRE(g.is_corner({0}));
    REQUIRE(g.is_corner({5}));
    REQUIRE_FALSE(g.is_corner({2}));

    Geometry g2{{4, 6}, {2, 3}};
    REQUIRE(g2.d == 2);
    REQUIRE(g2.a_min() == Site{2, 3});
    REQUIRE(g2.displacements().size() == 12);
    REQUIRE(g2.corners() == std::vector<Site>{{0, 0}, {0, 3}, {2, 0}, {2, 3}});
    REQUIRE(g2.center_r() == std::vector<Index>{1, 2});

    // a point displacement set: M = b
    Geometry gp{{3}, {3}};
    REQUIRE(gp.displacements() == std::vector<Site>{{0}});
    REQUIRE(gp.corners() == std::vector<Site>{{0}});

    REQUIRE_THROWS_AS(Geometry({2}, {3}), domain_error);         // b > M
    REQUIRE_THROWS_AS(Geometry({2}, {0}), domain_error);         // b < 1
    REQUIRE_THROWS_AS(Geometry({2, 2}, {1}), domain_error);      // rank mismatch
}

TEST_CASE("reflection symmetry of the single-site potential is checked exactly") {
    REQUIRE(check_h1(SingleSite{Geometry{{8}, {3}}, {1, 2, 1}}));
    REQUIRE_FALSE(check_h1(SingleSite{Geometry{{4}, {2}}, {1, 2}}));
    REQUIRE(check_h1(SingleSite{Geometry{{4, 4}, {2, 2}}, {1, 1, 1, 1}}));
    REQUIRE_FALSE(check_h1(SingleSite{Geometry{{4, 4}, {2, 2}}, {1, 2, 1, 1}}));
    REQUIRE(check_h1(bdm_q(3.5)));  // single-point support is trivially symmetric
    REQUIRE_THROWS_AS(SingleSite(Geometry{{4}, {2}}, {1, 2, 3}), domain_error);
}

TEST_CASE("ground energy map reproduces the two-site closed form") {
    // h^N on [1,2] with q = lambda at one site: min eig = lambda/2 - 1 - sqrt(1 + lambda^2/4)
    auto m = ground_energy_map(bdm_q(1.0), +1);
    REQUIRE(m.e0.size() == 2);
    REQUIRE(std::abs(m.e0[0] - (-1.6180339887498949)) < 1e-12);
    REQUIRE(std::abs(m.e0[1] - (-1.6180339887498949)) < 1e-12);
    REQUIRE(std::abs(m.e_min - (-1.6180339887498949)) < 1e-12);

    for (double l : {0.5, 2.0}) {
        auto ml = ground_energy_map(bdm_q(l), +1);
        double want = 0.5 * l - 1.0 - std::sqrt(1.0 + 0.25 * l * l);
        REQUIRE(std::abs(ml.e0[0] - want) < 1e-12);
        REQUIRE(std::abs(ml.e0[1] - want) < 1e-12);
    }
}

TEST_CASE("free single site leaves the ground energy at -2d everywhere") {
    auto m1 = ground_energy_map(SingleSite{Geometry{{3}, {1}}, {0.0}}, +1);
    for (double e : m1.e0) REQUIRE(std::abs(e - (-2.0)) < 1e-12);
    auto m2 = ground_energy_map(SingleSite{Geometry{{2, 2}, {1, 1}}, {0.0}}, +1);
    for (double e : m2.e0) REQUIRE(std::abs(e - (-4.0)) < 1e-12);
}

TEST_CASE("ground energy map is reflection symmetric per axis") {
    Geometry g{{8}, {3}};
    auto m = ground_energy_map(SingleSite{g, {1, 2, 1}}, +1);
    REQUIRE(m.e0.size() == 6);
    for (int a = 0; a <= 5; ++a)
        REQUIRE(std::abs(m.e0[static_cast<std::size_t>(a)] -
                         m.e0[static_cast<std::size_t>(5 - a)]) < 1e-10);
    // the flipped-sign map is symmetric too
    auto mf = ground_energy_map(SingleSite{g, {1, 2, 1}}, -1);
    for (int a = 0; a <= 5; ++a)
        REQUIRE(std::abs(mf.e0[static_cast<std::size_t>(a)] -
                         mf.e0[static_cast<std::size_t>(5 - a)]) < 1e-10);

    Geometry g2{{4, 4}, {2, 2}};
    auto m2 = ground_energy_map(SingleSite{g2, {1, 1, 1, 1}}, +1);
    Box db({0, 0}, {2, 2});
    for (std::size_t i = 0; i < db.volume(); ++i) {
        Site a = db.site(i);
        Site b = {2 - a[0], a[1]};
        Site c = {a[0], 2 - a[1]};
        REQUIRE(std::abs(m2.e0[i] - m2.e0[db.index(b)]) < 1e-10);
        REQUIRE(std::abs(m2.e0[i] - m2.e0[db.index(c)]) < 1e-10);
    }
}

TEST_CASE("energy map serializes as CSV") {
    auto m = ground_energy_map(bdm_q(1.0), +1);
    REQUIRE(model::energy_map_csv(m) ==
            "a_1,E0\n0,-1.6180339887498949\n1,-1.6180339887498949\n");
}

TEST_CASE("bubble monotonicity holds for the wide 1d cell") {
    Geometry g{{8}, {3}};
    auto rep = verify_bubbles(SingleSite{g, {1, 2, 1}}, +1);
    REQUIRE(rep.monotone);
    REQUIRE(rep.violations.empty());
    REQUIRE(rep.min_margin > 0.0);
}

TEST_CASE("bubble monotonicity holds on the 2d block") {
    Geometry g{{4, 4}, {2, 2}};
    auto rep = verify_bubbles(SingleSite{g, {1, 1, 1, 1}}, +1);
    REQUIRE(rep.monotone);
    REQUIRE(rep.violations.empty());
}

TEST_CASE("bubble checker refuses hypothesis violations") {
    // free potential: E0 is identically -2, excluded in d=1
    REQUIRE_THROWS_AS(verify_bubbles(SingleSite{Geometry{{3}, {1}}, {0.0}}, +1),
                      precondition_error);
    // d >= 2 requires a sign-definite potential
    Geometry g2{{4, 4}, {2, 2}};
    REQUIRE_THROWS_AS(verify_bubbles(SingleSite{g2, {1, -1, -1, 1}}, +1), precondition_error);
}

TEST_CASE("the alternating-corner configuration has the expected period table") {
    auto c = build_omega_star(Geometry{{2}, {1}});
    REQUIRE(c.period() == std::vector<Index>{2});
    REQUIRE(c.at({1}) == Site{1});
    REQUIRE(c.at({2}) == Site{0});
    REQUIRE(c.at({0}) == Site{0});
    REQUIRE(c.at({-1}) == Site{1});

    auto c2 = build_omega_star(Geometry{{3, 4}, {1, 2}});
    REQUIRE(c2.at({2, 2}) == Site{0, 0});
    REQUIRE(c2.at({2, 1}) == Site{0, 2});
    REQUIRE(c2.at({1, 2}) == Site{2, 0});
    REQUIRE(c2.at({1, 1}) == Site{2, 2});

    auto cp = build_omega_star(Geometry{{3}, {3}});
    REQUIRE(cp.at({7}) == Site{0});
}

TEST_CASE("configurations validate their entries") {
    Geometry g{{2}, {1}};
    REQUIRE_THROWS_AS(periodic_configuration(g, {2}, {{0}, {2}}), domain_error);
    REQUIRE_THROWS_AS(periodic_configuration(g, {2}, {{0}}), domain_error);
    auto w = window_configuration(g, Box({1}, {3}), {{0}, {1}, {1}});
    REQUIRE(w.at({2}) == Site{1});
    REQUIRE_THROWS_AS(w.at({4}), domain_error);
}

TEST_CASE("potential assembly places one translated copy per cell") {
    Geometry g{{2}, {1}};
    auto q = bdm_q(1.0);
    auto star = build_omega_star(g);

    auto v = assemble_potential(star, Box({1}, {4}), q, 2.0);
    REQUIRE(v.values == std::vector<double>{0.0, 2.0, 2.0, 0.0});

    auto v1 = assemble_potential(bdm_omega1(), Box({1}, {4}), q, 1.0);
    REQUIRE(v1.values == std::vector<double>{0.0, 1.0, 0.0, 1.0});

    // translated windows look through the same tiling
    auto vt = assemble_potential(star, Box({5}, {8}), q, 1.0);
    REQUIRE(vt.values == std::vector<double>{0.0, 1.0, 1.0, 0.0});
    auto vn = assemble_potential(star, Box({-3}, {0}), q, 1.0);
    REQUIRE(vn.values == std::vector<double>{0.0, 1.0, 1.0, 0.0});

    auto vz = assemble_potential(star, Box({1}, {4}), SingleSite{g, {0.0}}, 1.0);
    REQUIRE(vz.values == std::vector<double>{0.0, 0.0, 0.0, 0.0});

    REQUIRE_THROWS_AS(assemble_potential(star, Box({1}, {3}), q, 1.0), domain_error);
    REQUIRE_THROWS_AS(assemble_potential(star, Box({2}, {5}), q, 1.0), domain_error);

    // d=2: the four cells around the block center hold a 2x2 cluster
    Geometry g2{{2, 2}, {1, 1}};
    auto star2 = build_omega_star(g2);
    auto v2 = assemble_potential(star2, Box({1, 1}, {4, 4}), SingleSite{g2, {1.0}}, 1.0);
    Box b2({1, 1}, {4, 4});
    for (std::size_t i = 0; i < b2.volume(); ++i) {
        Site s = b2.site(i);
        bool cluster = (s[0] == 2 || s[0] == 3) && (s[1] == 2 || s[1] == 3);
        REQUIRE(v2.values[i] == (cluster ? 1.0 : 0.0));
    }

    // a window kind must cover the requested cells
    auto w = window_configuration(g, Box({1}, {2}), {{0}, {1}});
    REQUIRE_THROWS_AS(assemble_potential(w, Box({1}, {6}), q, 1.0), domain_error);
}

TEST_CASE("periodic spectral bottom matches the closed forms") {
    Geometry g{{2}, {1}};
    auto q = bdm_q(1.0);
    double bstar = spectral_bottom_periodic(build_omega_star(g), q, +1);
    REQUIRE(std::abs(bstar - (-1.618033988749895)) < 1e-10);

    double b1 = spectral_bottom_periodic(bdm_omega1(), q, +1);
    REQUIRE(std::abs(b1 - 0.5 * (1.0 - std::sqrt(17.0))) < 1e-10);
    // cross-check against the band scan of the two-periodic potential
    auto bands = floquet::bands_from_discriminant(floquet::omega_one_potential(1.0), "w1");
    REQUIRE(std::abs(b1 - bands.bands.front().lo) < 1e-9);

    double bfree = spectral_bottom_periodic(build_omega_star(g), SingleSite{g, {0.0}}, +1);
    REQUIRE(std::abs(bfree - (-2.0)) < 1e-12);
    Geometry g2{{2, 2}, {1, 1}};
    double bfree2 =
        spectral_bottom_periodic(build_omega_star(g2), SingleSite{g2, {0.0}}, +1);
    REQUIRE(std::abs(bfree2 - (-4.0)) < 1e-12);

    auto w = window_configuration(g, Box({1}, {2}), {{0}, {1}});
    REQUIRE_THROWS_AS(spectral_bottom_periodic(w, q, +1), domain_error);
}

TEST_CASE("flip identity: top of the spectrum of h0+V is minus the bottom for h0-V") {
    Geometry g{{2}, {1}};
    auto q = bdm_q(1.0);
    auto star = build_omega_star(g);
    auto v = assemble_potential(star, Box({1}, {4}), q, 1.0);
    auto plus = build_operator(Box({1}, {4}), Bc::Periodic, &v);
    auto vm = v;
    for (auto& x : vm.values) x = -x;
    auto minus = build_operator(Box({1}, {4}), Bc::Periodic, &vm);
    auto ep = spectra::eigenvalues(plus);
    auto em = spectra::eigenvalues(minus);
    REQUIRE(std::abs(ep.back() + em.front()) < 1e-10);

    // an even-period d=1 sample beyond the alternating one
    auto cfg = periodic_configuration(g, {4}, {{0}, {1}, {1}, {0}});
    auto v4 = assemble_potential(cfg, Box({1}, {8}), bdm_q(0.7), 1.0);
    auto p4 = build_operator(Box({1}, {8}), Bc::Periodic, &v4);
    auto vm4 = v4;
    for (auto& x : vm4.values) x = -x;
    auto m4 = build_operator(Box({1}, {8}), Bc::Periodic, &vm4);
    REQUIRE(std::abs(spectra::eigenvalues(p4).back() + spectra::eigenvalues(m4).front()) < 1e-10);

    Geometry g2{{2, 2}, {1, 1}};
    auto star2 = build_omega_star(g2);
    auto v2 = assemble_potential(star2, Box({1, 1}, {4, 4}), SingleSite{g2, {1.0}}, 1.0);
    auto p2 = build_operator(Box({1, 1}, {4, 4}), Bc::Periodic, &v2);
    auto vm2 = v2;
    for (auto& x : vm2.values) x = -x;
    auto m2 = build_operator(Box({1, 1}, {4, 4}), Bc::Periodic, &vm2);
    REQUIRE(std::abs(spectra::eigenvalues(p2).back() + spectra::eigenvalues(m2).front()) < 1e-10);
}

TEST_CASE("minimizer enumeration at L=2 finds exactly the two balanced configurations") {
    auto rep = classify_minimizers_1d(Geometry{{2}, {1}}, bdm_q(1.0), 2);
    REQUIRE(std::abs(rep.e_min - (-1.6180339887498949)) < 1e-9);
    REQUIRE(std::abs(rep.best - rep.e_min) < 1e-9);
    REQUIRE(rep.minimizing == std::vector<std::vector<Index>>{{0, 1}, {1, 0}});
    REQUIRE(rep.predicate_holds);
}

TEST_CASE("minimizer enumeration at odd L finds no minimizer") {
    auto rep = classify_minimizers_1d(Geometry{{2}, {1}}, bdm_q(1.0), 3);
    REQUIRE(rep.minimizing.empty());
    REQUIRE(rep.best > rep.e_min + 1e-9);
    REQUIRE(rep.predicate_holds);
}

TEST_CASE("minimizer enumeration at L=4 finds the six balanced configurations") {
    auto rep = classify_minimizers_1d(Geometry{{2}, {1}}, bdm_q(1.0), 4);
    std::vector<std::vector<Index>> want = {{0, 0, 1, 1}, {0, 1, 0, 1}, {0, 1, 1, 0},
                                            {1, 0, 0, 1}, {1, 0, 1, 0}, {1, 1, 0, 0}};
    REQUIRE(rep.minimizing == want);
    REQUIRE(rep.predicate_holds);
}

TEST_CASE("minimizers of the wider cell keep every entry at a corner") {
    // displacement set {0,1,2} has an interior point; minimizers avoid it
    auto rep = classify_minimizers_1d(Geometry{{3}, {1}}, SingleSite{Geometry{{3}, {1}}, {1.0}}, 2);
    REQUIRE_FALSE(rep.minimizing.empty());
    for (const auto& tab : rep.minimizing)
        for (Index a : tab) REQUIRE((a == 0 || a == 2));
    REQUIRE(rep.predicate_holds);
}

TEST_CASE("minimizer enumeration enforces caps and hypotheses") {
    REQUIRE_THROWS_AS(classify_minimizers_1d(Geometry{{3}, {1}}, SingleSite{Geometry{{3}, {1}}, {0.0}}, 2),
                      precondition_error);
    REQUIRE_THROWS_AS(classify_minimizers_1d(Geometry{{3}, {1}}, SingleSite{Geometry{{3}, {1}}, {1.0}}, 14),
                      resource_error);
}

TEST_CASE("corner energy bounds the Neumann bottom of every finite window") {
    Geometry g{{4}, {2}};
    SingleSite q{g, {1.0, 1.0}};
    auto map = ground_energy_map(q, +1);
    double e_corner = map.e0[static_cast<std::size_t>(Box({0}, {2}).index({2}))];
    SplitMix64 rng(515151);
    for (int trial = 0; trial < 100; ++trial) {
        Index cells = 1 + static_cast<Index>(rng.next_below(5));
        std::vector<Site> tab(static_cast<std::size_t>(cells));
        for (auto& a : tab) a = {static_cast<Index>(rng.next_below(3))};
        auto cfg = window_configuration(g, Box({1}, {cells}), tab);
        Box win({1}, {4 * cells});
        auto v = assemble_potential(cfg, win, q, 1.0);
        auto op = build_operator(win, Bc::Neumann, &v);
        double bottom = spectra::eigenvalues(op).front();
        REQUIRE(bottom >= e_corner - 1e-9);
    }
}

TEST_CASE("reflected corner ground state solves the alternating periodic problem") {
    Geometry g{{8}, {3}};
    SingleSite q{g, {1.0, 2.0, 1.0}};
    auto map = ground_energy_map(q, +1);
    double e0 = map.e0[static_cast<std::size_t>(Box({0}, {5}).index({5}))];

    auto opn = single_site_operator(q, {5}, +1);
    auto gs = spectra::ground_state(opn);
    REQUIRE(std::abs(gs.energy - e0) < 1e-10);

    // psi on [1,16]: U on the first cell, its mirror on the second
    std::vector<double> psi(16);
    for (int x = 1; x <= 8; ++x) psi[static_cast<std::size_t>(x - 1)] = gs.vector[static_cast<std::size_t>(x - 1)];
    for (int x = 9; x <= 16; ++x) psi[static_cast<std::size_t>(x - 1)] = gs.vector[static_cast<std::size_t>(16 - x)];

    auto star = build_omega_star(g);
    Box win({1}, {16});
    auto v = assemble_potential(star, win, q, 1.0);
    auto op = build_operator(win, Bc::Periodic, &v);
    auto hpsi = rdm::apply(op, psi);
    for (int x = 2; x <= 15; ++x)
        REQUIRE(std::abs(hpsi[static_cast<std::size_t>(x - 1)] - e0 * psi[static_cast<std::size_t>(x - 1)]) <=
                1e-12);
    // the wrap sites close up too, since the mirror matches the torus
    REQUIRE(std::abs(hpsi[0] - e0 * psi[0]) <= 1e-10);
    REQUIRE(std::abs(hpsi[15] - e0 * psi[15]) <= 1e-10);

    // and the periodic bottom is exactly this energy
    double bot = spectral_bottom_periodic(star, q, +1);
    REQUIRE(std::abs(bot - e0) < 1e-10);
}

TEST_CASE("distributions validate and expose the corner-weight hypothesis") {
    Geometry g{{2}, {1}};
    REQUIRE_THROWS_AS(Distribution(g, {0.5, 0.4}), domain_error);
    Distribution fair(g, {0.5, 0.5});
    REQUIRE(check_h2(fair));
    Distribution degenerate(g, {1.0, 0.0});
    REQUIRE_FALSE(check_h2(degenerate));
}

TEST_CASE("periodic-union spectrum approximation is anchored by the closed forms") {
    Geometry g{{2}, {1}};
    auto q = bdm_q(1.0);
    Distribution mu(g, {0.5, 0.5});

    auto p1 = approx_almost_sure_spectrum(mu, q, 1.0, 1);
    REQUIRE(p1.bands.size() == 2);
    REQUIRE(std::abs(p1.bands[0].lo - 0.5 * (1.0 - std::sqrt(17.0))) < 1e-9);
    REQUIRE(std::abs(p1.bands[0].hi - 0.0) < 1e-9);
    REQUIRE(std::abs(p1.bands[1].lo - 1.0) < 1e-9);
    REQUIRE(std::abs(p1.bands[1].hi - 0.5 * (1.0 + std::sqrt(17.0))) < 1e-9);

    auto p4 = approx_almost_sure_spectrum(mu, q, 1.0, 4);
    // contains the alternating-configuration bands
    auto star_bands = floquet::bands_from_discriminant(floquet::omega_star_potential(1.0), "s");
    for (const auto& sb : star_bands.bands) {
        bool inside = false;
        for (const auto& b : p4.bands)
            if (sb.lo >= b.lo - 1e-9 && sb.hi <= b.hi + 1e-9) inside = true;
        REQUIRE(inside);
    }
    // and stays inside the proved two-band spectrum
    auto proved = floquet::sigma_lambda(1.0, floquet::Mode::proved);
    for (const auto& b : p4.bands) {
        bool inside = false;
        for (const auto& pb : proved.bands)
            if (b.lo >= pb.lo - 1e-9 && b.hi <= pb.hi + 1e-9) inside = true;
        REQUIRE(inside);
    }

    // monotone in the period bound: each union is contained in the next
    auto p2 = approx_almost_sure_spectrum(mu, q, 1.0, 2);
    auto p3 = approx_almost_sure_spectrum(mu, q, 1.0, 3);
    auto contained = [](const floquet::BandStructure& small_bs,
                        const floquet::BandStructure& big_bs) {
        for (const auto& s : small_bs.bands) {
            bool inside = false;
            for (const auto& b : big_bs.bands)
                if (s.lo >= b.lo - 1e-9 && s.hi <= b.hi + 1e-9) inside = true;
            if (!inside) return false;
        }
        return true;
    };
    REQUIRE(contained(p1, p2));
    REQUIRE(contained(p2, p3));
    REQUIRE(contained(p3, p4));

    REQUIRE_THROWS_AS(approx_almost_sure_spectrum(Distribution(g, {1.0, 0.0}), q, 1.0, 2),
                      precondition_error);
    REQUIRE_THROWS_AS(approx_almost_sure_spectrum(mu, q, 1.0, 25), resource_error);
}

TEST_CASE("band list serializes with the source_config column") {
    floquet::BandStructure bs;
    bs.bands.push_back({-2.0, 0.0, "a", false, false});
    bs.bands.push_back({0.5, 2.0, "b", true, false});
    REQUIRE(model::bands_csv(bs) == "lower,upper,source_config\n-2,0,a\n0.5,2,b\n");
}

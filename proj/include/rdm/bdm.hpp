#pragma once

// Gap machinery for the one-dimensional binary displacement model: cells of
// two sites, a point mass that sits on the left (0) or right (1) site of its
// cell, coupling lambda.  The shifted square of a periodic restriction is
// five-diagonal with zero diagonal; on even rings it decouples into the pair
// h0 +/- q_omega, and an explicit positive vector certifies the spectral gap
// (-s, s) of the square, s = sqrt(4 + lambda^2).

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <vector>

#include "rdm/box.hpp"
#include "rdm/errors.hpp"
#include "rdm/floquet.hpp"
#include "rdm/lattice.hpp"
#include "rdm/spectra.hpp"

namespace rdm::bdm {

inline void check_word(const std::vector<int>& w) {
    if (w.size() < 2) throw domain_error("configuration word needs at least two cells");
    for (int x : w)
        if (x != 0 && x != 1) throw domain_error("configuration word entries must be 0 or 1");
}

// complement every cell; jump profile negates exactly
inline std::vector<int> flip(std::vector<int> w) {
    check_word(w);
    for (auto& x : w) x = 1 - x;
    return w;
}

// q(k) = lambda * (w_{k+1} - w_k), cyclic
inline std::vector<double> q_omega(const std::vector<int>& w, double lambda) {
    check_word(w);
    std::vector<double> q(w.size());
    for (std::size_t k = 0; k < w.size(); ++k)
        q[k] = lambda * static_cast<double>(w[(k + 1) % w.size()] - w[k]);
    return q;
}

// h on the window [1, 2L] under the given boundary condition: cell k occupies
// sites 2k-1, 2k and carries lambda at site 2k-1 + w_k
inline LatticeOperator restriction(const std::vector<int>& w, double lambda, Bc bc,
                                   const BuildOptions& opts = {}) {
    check_word(w);
    const auto L = static_cast<Index>(w.size());
    Box win(Site{1}, Site{2 * L});
    SiteFunction v{win, std::vector<double>(static_cast<std::size_t>(2 * L), 0.0)};
    for (std::size_t k = 0; k < w.size(); ++k)
        v.values[2 * k + static_cast<std::size_t>(w[k])] = lambda;
    return build_operator(win, bc, &v, opts);
}

inline LatticeOperator periodic_restriction(const std::vector<int>& w, double lambda,
                                            const BuildOptions& opts = {}) {
    return restriction(w, lambda, Bc::Periodic, opts);
}

// (h - lambda/2)^2 - (2 + lambda^2/4) on the torus [1, 2L].  The diagonal
// vanishes identically, the second off-diagonal is 1, and the first
// off-diagonal s(x) is zero between the two sites of a cell and
// lambda * (w_{k+1} - w_k) across the bond that leaves cell k.
struct SquaredOperator {
    int n = 0;              // 2L sites
    double lambda = 0.0;
    std::vector<double> s;  // s[x-1] couples sites x and x+1 (cyclic)
};

inline SquaredOperator build_squared_operator(const std::vector<int>& w, double lambda) {
    check_word(w);
    SquaredOperator h;
    h.n = 2 * static_cast<int>(w.size());
    h.lambda = lambda;
    h.s.assign(static_cast<std::size_t>(h.n), 0.0);
    for (std::size_t k = 0; k < w.size(); ++k)
        h.s[2 * k + 1] = lambda * static_cast<double>(w[(k + 1) % w.size()] - w[k]);
    return h;
}

// banded view for the counting routines; needs distinct offsets, so n >= 5
inline spectra::CyclicFive to_cyclic_five(const SquaredOperator& h) {
    if (h.n < 5)
        throw domain_error("the banded view needs at least five sites; use the dense form");
    spectra::CyclicFive m;
    m.n = h.n;
    m.diag.assign(static_cast<std::size_t>(h.n), 0.0);
    m.s1 = h.s;
    m.s2.assign(static_cast<std::size_t>(h.n), 1.0);
    return m;
}

// dense view; on four sites the wrapped second off-diagonals accumulate
inline spectra::DenseSym to_dense(const SquaredOperator& h) {
    spectra::DenseSym d;
    d.n = h.n;
    const auto n = static_cast<std::size_t>(h.n);
    d.a.assign(n * n, 0.0);
    auto add = [&](std::size_t i, std::size_t j, double v) {
        d.a[i * n + j] += v;
        d.a[j * n + i] += v;
    };
    for (std::size_t i = 0; i < n; ++i) {
        add(i, (i + 1) % n, h.s[i]);
        add(i, (i + 2) % n, 1.0);
    }
    return d;
}

// full spectra are only requested at desk sizes, and the counting route loses
// accuracy at the repeated eigenvalues every balanced word produces, so this
// always goes dense
inline std::vector<double> spectrum(const SquaredOperator& h) {
    return spectra::eigen_dense(to_dense(h));
}

// bottom eigenvalue by count bisection; falls back to the dense solver when a
// probe lands too close to a leading-submatrix eigenvalue for the elimination
// to stay trustworthy
inline double min_eigenvalue(const SquaredOperator& h, double tol = 1e-12) {
    if (h.n < 5) return spectrum(h).front();
    auto m = to_cyclic_five(h);
    double worst = 1.0;
    std::function<int(double)> counter = [&](double e) {
        double health = 1.0;
        int c = spectra::inertia_count(m, e, &health);
        worst = std::min(worst, health);
        return c;
    };
    auto range = spectra::gershgorin(m);
    double bottom = spectra::eigenvalue_by_count(counter, 1, range.first, range.second, tol);
    if (worst < 1e-8) return spectrum(h).front();
    return bottom;
}

// J- = h0 - q and J+ = h0 + q on the ring of cells.  Valid for even rings
// only: the unitary that splits the square into the pair ends with the
// alternating-sign flip on a cell sublattice, and an odd ring has none (three
// cells already give different spectra).
struct DecoupledPair {
    spectra::Tridiag j_minus, j_plus;
    std::vector<double> q;
};

inline DecoupledPair decouple(const std::vector<int>& w, double lambda) {
    check_word(w);
    if (w.size() % 2 != 0)
        throw precondition_error("decoupling needs an even number of cells");
    const auto L = static_cast<Index>(w.size());
    auto q = q_omega(w, lambda);
    Box ring(Site{1}, Site{L});
    SiteFunction vp{ring, q};
    auto jp = to_tridiag(build_operator(ring, Bc::Periodic, &vp));
    SiteFunction vm{ring, q};
    for (auto& x : vm.values) x = -x;
    auto jm = to_tridiag(build_operator(ring, Bc::Periodic, &vm));
    return {jm, jp, q};
}

// psi(k) = z_+^{S_k} with S_k the walk of the word, z_+ = (s + lambda) / 2.
// At every interior site  -psi(k-1) + q(k) psi(k) - psi(k+1) = -s psi(k)
// holds exactly, which pins the bottom of J+ at -s from below.
struct GapCertificate {
    double lambda = 0.0;
    double z_plus = 0.0;
    double z_minus = 0.0;
    std::vector<double> psi;  // psi[k] for k = 0 .. L
};

inline GapCertificate psi_omega(const std::vector<int>& w, double lambda) {
    if (lambda == 0.0) throw domain_error("the gap certificate needs lambda != 0");
    check_word(w);
    GapCertificate c;
    c.lambda = lambda;
    const double s = std::sqrt(4.0 + lambda * lambda);
    c.z_plus = 0.5 * (s + lambda);
    c.z_minus = 1.0 / c.z_plus;
    long long extreme = 0, run = 0;
    for (int x : w) {
        run += 2 * x - 1;
        extreme = std::max(extreme, std::llabs(run));
    }
    if (static_cast<double>(extreme) * std::abs(std::log(c.z_plus)) > 600.0)
        throw numeric_error("certificate exponent out of range for this word and lambda");
    c.psi.reserve(w.size() + 1);
    c.psi.push_back(1.0);
    run = 0;
    for (int x : w) {
        run += 2 * x - 1;
        c.psi.push_back(std::pow(c.z_plus, static_cast<double>(run)));
    }
    return c;
}

// Two independent gap checks on one word: (a) eigenvalue counts of the
// periodic restriction at both ends of the shrunk gap, (b) the bottom of the
// squared operator against -s.  They probe different matrices through
// different eliminations, so agreement is meaningful.
struct GapReport {
    bool gap_clean = false;
    double min_sq_eig = 0.0;
    int gap_count = 0;          // eigenvalues inside (G_- + 1e-9, G_+ - 1e-9)
    double count_health = 1.0;  // worst pivot quality seen by the count route
};

inline GapReport verify_gap(const std::vector<int>& w, double lambda) {
    if (lambda == 0.0) throw domain_error("gap verification needs lambda != 0");
    check_word(w);
    const double s = std::sqrt(4.0 + lambda * lambda);
    auto ed = floquet::band_edges_closed_form(lambda);
    const double lo = ed.g_minus + 1e-9;
    const double hi = ed.g_plus - 1e-9;
    auto hp = periodic_restriction(w, lambda);
    auto t = rdm::to_tridiag(hp);
    GapReport rep;
    double h_lo = 1.0, h_hi = 1.0;
    int c_lo = spectra::sturm_count(t, lo, &h_lo);
    int c_hi = spectra::sturm_count(t, hi, &h_hi);
    rep.count_health = std::min(h_lo, h_hi);
    if (rep.count_health < 1e-8) {
        auto ev = spectra::eigen_dense(rdm::to_dense(hp));
        c_lo = static_cast<int>(std::upper_bound(ev.begin(), ev.end(), lo) - ev.begin());
        c_hi = static_cast<int>(std::upper_bound(ev.begin(), ev.end(), hi) - ev.begin());
    }
    rep.gap_count = c_hi - c_lo;
    rep.min_sq_eig = min_eigenvalue(build_squared_operator(w, lambda));
    rep.gap_clean = rep.gap_count == 0 && rep.min_sq_eig >= -s - 1e-9;
    return rep;
}

}  // namespace rdm::bdm

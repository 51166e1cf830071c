#pragma once

#include <rdm/box.hpp>
#include <rdm/errors.hpp>
#include <rdm/floquet.hpp>
#include <rdm/io.hpp>
#include <rdm/lattice.hpp>
#include <rdm/parallel.hpp>
#include <rdm/spectra.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

// Displacement-model geometry and configurations: the cell Lambda = prod [1,M_i],
// the support box B = prod [1,b_i], the admissible displacement set
// Delta = prod [0, M_i-b_i], single-site potentials with the per-axis
// reflection symmetry (H1), displacement distributions with the positive
// corner-weight condition (H2), the ground-energy map a -> E0(a), and the
// periodic machinery built on top. (H1) and (H2) are spelled out in the README.
namespace rdm::model {

struct Geometry {
    std::vector<Index> M;  // cell extents per axis
    std::vector<Index> b;  // support extents per axis, 1 <= b_i <= M_i
    int d = 0;

    Geometry(std::vector<Index> M_, std::vector<Index> b_) : M(std::move(M_)), b(std::move(b_)) {
        if (M.empty() || M.size() != b.size())
            throw domain_error("geometry needs matching nonempty cell and support extents");
        d = static_cast<int>(M.size());
        for (std::size_t i = 0; i < M.size(); ++i)
            if (b[i] < 1 || b[i] > M[i])
                throw domain_error("support extent must satisfy 1 <= b_i <= M_i");
    }

    Box cell_box() const { return Box(Site(M.size(), 1), M); }
    Box support_box() const { return Box(Site(b.size(), 1), b); }

    // largest admissible displacement per axis
    Site a_min() const {
        Site a(M.size());
        for (std::size_t i = 0; i < M.size(); ++i) a[i] = M[i] - b[i];
        return a;
    }
    Box delta_box() const { return Box(Site(M.size(), 0), a_min()); }

    std::vector<Site> displacements() const {
        Box db = delta_box();
        std::vector<Site> out;
        out.reserve(db.volume());
        for (std::size_t i = 0; i < db.volume(); ++i) out.push_back(db.site(i));
        return out;
    }

    // the extreme displacements (0 or M_i-b_i per axis), collapsed along axes
    // with M_i = b_i, in lexicographic order
    std::vector<Site> corners() const {
        Site top = a_min();
        std::vector<Site> out = {Site(M.size(), 0)};
        for (std::size_t i = 0; i < M.size(); ++i) {
            if (top[i] == 0) continue;
            std::vector<Site> next;
            next.reserve(out.size() * 2);
            for (const auto& s : out) {
                next.push_back(s);
                Site t = s;
                t[i] = top[i];
                next.push_back(std::move(t));
            }
            out = std::move(next);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    bool is_corner(const Site& a) const {
        if (a.size() != M.size()) return false;
        Site top = a_min();
        for (std::size_t i = 0; i < M.size(); ++i)
            if (a[i] != 0 && a[i] != top[i]) return false;
        return true;
    }

    // least integer >= (M_i-b_i)/2: the start of the decreasing half of E0
    std::vector<Index> center_r() const {
        std::vector<Index> r(M.size());
        for (std::size_t i = 0; i < M.size(); ++i) r[i] = (M[i] - b[i] + 1) / 2;
        return r;
    }

    bool operator==(const Geometry& o) const { return M == o.M && b == o.b; }

    void check_displacement(const Site& a) const {
        if (a.size() != M.size())
            throw domain_error("displacement rank does not match the geometry");
        Site top = a_min();
        for (std::size_t i = 0; i < M.size(); ++i)
            if (a[i] < 0 || a[i] > top[i])
                throw domain_error("displacement outside the admissible set");
    }
};

struct SingleSite {
    Geometry geo;
    std::vector<double> values;  // on the support box, box index order

    SingleSite(Geometry g, std::vector<double> v) : geo(std::move(g)), values(std::move(v)) {
        if (values.size() != geo.support_box().volume())
            throw domain_error("single-site potential size does not match the support box");
    }
};

// (H1): q is invariant under t_i -> b_i - t_i + 1 on each axis, exactly.
inline bool check_h1(const SingleSite& q) {
    Box sb = q.geo.support_box();
    for (std::size_t i = 0; i < sb.volume(); ++i) {
        Site t = sb.site(i);
        for (std::size_t ax = 0; ax < t.size(); ++ax) {
            Site r = t;
            r[ax] = q.geo.b[ax] - t[ax] + 1;
            if (q.values[i] != q.values[sb.index(r)]) return false;
        }
    }
    return true;
}

// One cell with the single-site potential at displacement a, boundary faces
// counted out (the cell decoupling used throughout works with this flavour).
inline LatticeOperator single_site_operator(const SingleSite& q, const Site& a, int sign,
                                            const BuildOptions& opts = {}) {
    if (sign != 1 && sign != -1) throw domain_error("sign must be +1 or -1");
    q.geo.check_displacement(a);
    Box cell = q.geo.cell_box();
    SiteFunction v{cell, std::vector<double>(cell.volume(), 0.0)};
    Box sb = q.geo.support_box();
    for (std::size_t i = 0; i < sb.volume(); ++i) {
        Site t = sb.site(i);
        Site x(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) x[k] = a[k] + t[k];
        v.values[cell.index(x)] = sign * q.values[i];
    }
    return build_operator(cell, Bc::Neumann, &v, opts);
}

struct EnergyMap {
    Geometry geo;
    std::vector<double> e0;  // indexed in delta_box order
    double e_min = 0.0, e_max = 0.0;
};

// E0(a) for every admissible displacement a.
inline EnergyMap ground_energy_map(const SingleSite& q, int sign, int threads = 1) {
    if (!check_h1(q))
        throw precondition_error("(H1) violated: single-site potential is not reflection symmetric");
    auto dis = q.geo.displacements();
    std::vector<double> e(dis.size());
    parallel_for(dis.size(), threads, [&](std::size_t i) {
        e[i] = spectra::ground_state(single_site_operator(q, dis[i], sign)).energy;
    });
    EnergyMap m{q.geo, std::move(e), 0.0, 0.0};
    m.e_min = *std::min_element(m.e0.begin(), m.e0.end());
    m.e_max = *std::max_element(m.e0.begin(), m.e0.end());
    return m;
}

inline std::string energy_map_csv(const EnergyMap& m) {
    std::string out;
    for (int i = 1; i <= m.geo.d; ++i) out += "a_" + std::to_string(i) + ",";
    out += "E0\n";
    Box db = m.geo.delta_box();
    for (std::size_t i = 0; i < db.volume(); ++i) {
        for (Index c : db.site(i)) out += fmt_int(c) + ",";
        out += fmt17(m.e0[i]) + "\n";
    }
    return out;
}

struct BubbleViolation {
    int axis;
    Site at;  // displacement where the step toward at + e_axis fails to decrease
    double here, next;
};

struct BubbleReport {
    bool monotone = true;
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<BubbleViolation> violations;
};

// Strict decrease of E0 along each axis from the center index to the extreme
// displacement, with the other coordinates anywhere in their decreasing
// halves. Guards its hypotheses: a potential that leaves every ground energy
// at the free value carries no information, and in d >= 2 the statement is
// only claimed for sign-definite potentials.
inline BubbleReport verify_bubbles(const SingleSite& q, int sign, int threads = 1) {
    const Geometry& g = q.geo;
    if (g.d >= 2) {
        bool nonneg = true, nonpos = true, nonzero = false;
        for (double v : q.values) {
            if (v < 0.0) nonneg = false;
            if (v > 0.0) nonpos = false;
            if (v != 0.0) nonzero = true;
        }
        if (!nonzero || (!nonneg && !nonpos))
            throw precondition_error(
                "in d >= 2 the strict-decrease statement needs a sign-definite, nonzero "
                "single-site potential");
    }
    EnergyMap m = ground_energy_map(q, sign, threads);
    if (g.d == 1) {
        bool all_free = true;
        for (double e : m.e0)
            if (std::abs(e + 2.0) > 1e-8) all_free = false;
        if (all_free)
            throw precondition_error(
                "every ground energy sits at the free value; the strict-decrease statement "
                "needs a potential that actually moves them");
    }

    BubbleReport rep;
    Box db = g.delta_box();
    Site top = g.a_min();
    auto r = g.center_r();
    for (int ax = 0; ax < g.d; ++ax) {
        const auto axs = static_cast<std::size_t>(ax);
        Index amax = top[axs];
        if (r[axs] >= amax) continue;
        // odometer over the other axes, each confined to its decreasing half
        Site pos(r.begin(), r.end());
        for (;;) {
            for (Index a = r[axs]; a < amax; ++a) {
                Site lo_site = pos, hi_site = pos;
                lo_site[axs] = a;
                hi_site[axs] = a + 1;
                double here = m.e0[db.index(lo_site)];
                double next = m.e0[db.index(hi_site)];
                double margin = here - next;
                rep.min_margin = std::min(rep.min_margin, margin);
                if (margin <= 0.0) rep.violations.push_back({ax, lo_site, here, next});
            }
            int j = g.d - 1;
            for (; j >= 0; --j) {
                const auto js = static_cast<std::size_t>(j);
                if (j == ax) continue;
                if (pos[js] < top[js]) {
                    ++pos[js];
                    for (int k = j + 1; k < g.d; ++k)
                        if (k != ax) pos[static_cast<std::size_t>(k)] = r[static_cast<std::size_t>(k)];
                    break;
                }
            }
            if (j < 0) break;
        }
    }
    rep.monotone = rep.violations.empty();
    return rep;
}

enum class ConfigKind { Periodic, Window };

// A displacement configuration: either a table indexed by cell residues
// (cell k uses entry k mod K, so the table tiles the whole lattice) or an
// explicit table over a finite window of cell indices. Cells are 1-based:
// cell k covers sites (k_i-1)M_i+1 .. k_iM_i.
struct Configuration {
    Geometry geo;
    ConfigKind kind;
    Box domain;                 // residues [0, K_i-1] or the cell window
    std::vector<Site> entries;  // one displacement per domain point

    Configuration(Geometry g, ConfigKind k, Box dom, std::vector<Site> ent)
        : geo(std::move(g)), kind(k), domain(std::move(dom)), entries(std::move(ent)) {
        if (domain.dim() != geo.d)
            throw domain_error("configuration domain rank does not match the geometry");
        if (entries.size() != domain.volume())
            throw domain_error("configuration table does not match its domain");
        for (const auto& a : entries) geo.check_displacement(a);
    }

    std::vector<Index> period() const {
        if (kind != ConfigKind::Periodic)
            throw domain_error("only periodic configurations have a period");
        std::vector<Index> k(static_cast<std::size_t>(geo.d));
        for (int i = 0; i < geo.d; ++i) k[static_cast<std::size_t>(i)] = domain.extent(i);
        return k;
    }

    Site at(const Site& cell) const {
        if (cell.size() != static_cast<std::size_t>(geo.d))
            throw domain_error("cell index rank does not match the geometry");
        if (kind == ConfigKind::Periodic) {
            Site r(cell.size());
            for (std::size_t i = 0; i < cell.size(); ++i) {
                Index k = domain.extent(static_cast<int>(i));
                r[i] = ((cell[i] % k) + k) % k;
            }
            return entries[domain.index(r)];
        }
        if (!domain.contains(cell)) throw domain_error("cell outside the configuration window");
        return entries[domain.index(cell)];
    }
};

inline Configuration periodic_configuration(const Geometry& g, const std::vector<Index>& K,
                                            std::vector<Site> table) {
    if (K.size() != static_cast<std::size_t>(g.d))
        throw domain_error("period rank does not match the geometry");
    for (Index k : K)
        if (k < 1) throw domain_error("period entries must be >= 1");
    std::vector<Index> hi(K);
    for (auto& v : hi) v -= 1;
    return Configuration(g, ConfigKind::Periodic, Box(Site(K.size(), 0), hi), std::move(table));
}

inline Configuration window_configuration(const Geometry& g, const Box& cells,
                                          std::vector<Site> table) {
    return Configuration(g, ConfigKind::Window, cells, std::move(table));
}

inline Configuration constant_configuration(const Geometry& g, const Site& a) {
    return periodic_configuration(g, std::vector<Index>(static_cast<std::size_t>(g.d), 1), {a});
}

// Alternating-corner configuration: period 2 in every axis, displacement 0 on
// even cell residues and M_i-b_i on odd ones, so neighbouring cells push
// their potential copies into facing corners.
inline Configuration build_omega_star(const Geometry& g) {
    Box dom(Site(static_cast<std::size_t>(g.d), 0), Site(static_cast<std::size_t>(g.d), 1));
    Site top = g.a_min();
    std::vector<Site> table;
    table.reserve(dom.volume());
    for (std::size_t i = 0; i < dom.volume(); ++i) {
        Site r = dom.site(i);
        Site a(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) a[k] = r[k] == 0 ? 0 : top[k];
        table.push_back(std::move(a));
    }
    return Configuration(g, ConfigKind::Periodic, dom, std::move(table));
}

// The random potential restricted to a window made of whole cells: cell k
// receives one copy of lscale * q at offset omega_k.
inline SiteFunction assemble_potential(const Configuration& cfg, const Box& window,
                                       const SingleSite& q, double lscale) {
    if (!(cfg.geo == q.geo)) throw domain_error("configuration and potential geometries differ");
    const Geometry& g = cfg.geo;
    auto fmod = [](Index x, Index m) { return ((x % m) + m) % m; };
    Site klo(static_cast<std::size_t>(g.d)), khi(static_cast<std::size_t>(g.d));
    for (int i = 0; i < g.d; ++i) {
        Index m = g.M[static_cast<std::size_t>(i)];
        Index lo = window.lower(i), hi = window.upper(i);
        if (fmod(lo - 1, m) != 0 || fmod(hi, m) != 0)
            throw domain_error("window is not aligned to whole cells");
        klo[static_cast<std::size_t>(i)] = (lo - 1 - fmod(lo - 1, m)) / m + 1;
        khi[static_cast<std::size_t>(i)] = (hi - fmod(hi, m)) / m;
    }
    SiteFunction v{window, std::vector<double>(window.volume(), 0.0)};
    Box cells(klo, khi);
    Box sb = g.support_box();
    for (std::size_t c = 0; c < cells.volume(); ++c) {
        Site k = cells.site(c);
        Site a = cfg.at(k);
        for (std::size_t t = 0; t < sb.volume(); ++t) {
            Site off = sb.site(t);
            Site x(off.size());
            for (std::size_t i = 0; i < off.size(); ++i)
                x[i] = (k[i] - 1) * g.M[i] + a[i] + off[i];
            v.values[window.index(x)] += lscale * q.values[t];
        }
    }
    return v;
}

// Bottom of the spectrum of the fully periodic operator, computed on one
// period of the configuration with wrapped boundary; for periodic
// displacement fields this equals the infimum over the whole lattice.
inline double spectral_bottom_periodic(const Configuration& cfg, const SingleSite& q, int sign,
                                       const BuildOptions& opts = {}) {
    if (cfg.kind != ConfigKind::Periodic)
        throw domain_error("spectral bottom needs a periodic configuration");
    if (sign != 1 && sign != -1) throw domain_error("sign must be +1 or -1");
    auto K = cfg.period();
    Site lo(K.size(), 1), hi(K.size());
    for (std::size_t i = 0; i < K.size(); ++i) hi[i] = K[i] * cfg.geo.M[i];
    Box win(lo, hi);
    auto v = assemble_potential(cfg, win, q, static_cast<double>(sign));
    auto op = build_operator(win, Bc::Periodic, &v, opts);
    return spectra::eigenvalues(op).front();
}

struct MinimizerReport {
    double e_min = 0.0;  // min over displacements of E0, the global lower bound
    double best = 0.0;   // min over the enumerated period-L configurations
    std::vector<std::vector<Index>> minimizing;  // tables attaining e_min, lexicographic
    bool predicate_holds = false;  // see classify_minimizers_1d
};

// Enumerates every one-dimensional configuration of period L and classifies
// the exact minimizers of the periodic spectral bottom. The predicate checked
// against the enumeration: a configuration attains e_min exactly when L is
// even, every entry is an extreme displacement, and both extremes appear
// L/2 times each.
inline MinimizerReport classify_minimizers_1d(const Geometry& g, const SingleSite& q, int L,
                                              int threads = 1, std::int64_t cap = 1000000) {
    if (g.d != 1) throw domain_error("minimizer enumeration is one-dimensional");
    if (!(g == q.geo)) throw domain_error("geometry and potential differ");
    if (L < 1) throw domain_error("period must be >= 1");
    EnergyMap m = ground_energy_map(q, +1, threads);
    bool all_free = true;
    for (double e : m.e0)
        if (std::abs(e + 2.0) > 1e-8) all_free = false;
    if (all_free)
        throw precondition_error(
            "every ground energy sits at the free value; minimizer classification needs a "
            "potential that actually moves them");

    const auto nd = static_cast<std::int64_t>(g.delta_box().volume());
    std::int64_t count = 1;
    for (int i = 0; i < L; ++i) {
        if (count > cap / nd) throw resource_error("configuration enumeration exceeds the cap");
        count *= nd;
    }

    const Index amax = g.a_min()[0];
    auto table_of = [&](std::int64_t c) {
        std::vector<Index> t(static_cast<std::size_t>(L));
        for (int k = L - 1; k >= 0; --k) {
            t[static_cast<std::size_t>(k)] = static_cast<Index>(c % nd);
            c /= nd;
        }
        return t;
    };

    std::vector<double> bottoms(static_cast<std::size_t>(count));
    parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t c) {
        auto t = table_of(static_cast<std::int64_t>(c));
        std::vector<Site> sites;
        sites.reserve(t.size());
        for (Index a : t) sites.push_back({a});
        bottoms[c] =
            spectral_bottom_periodic(periodic_configuration(g, {L}, std::move(sites)), q, +1);
    });

    MinimizerReport rep;
    rep.e_min = m.e_min;
    rep.best = *std::min_element(bottoms.begin(), bottoms.end());
    rep.predicate_holds = true;
    for (std::int64_t c = 0; c < count; ++c) {
        auto t = table_of(c);
        bool attains = bottoms[static_cast<std::size_t>(c)] <= rep.e_min + 1e-9;
        std::int64_t n0 = 0, n1 = 0;
        bool corners_only = true;
        for (Index a : t) {
            if (a == 0)
                ++n0;
            else if (a == amax)
                ++n1;
            else
                corners_only = false;
        }
        bool balanced = L % 2 == 0 && corners_only && n0 == n1;
        if (attains != balanced) rep.predicate_holds = false;
        if (attains) rep.minimizing.push_back(std::move(t));
    }
    return rep;
}

struct Distribution {
    Geometry geo;
    std::vector<double> weights;  // on delta_box, box index order

    Distribution(Geometry g, std::vector<double> w) : geo(std::move(g)), weights(std::move(w)) {
        if (weights.size() != geo.delta_box().volume())
            throw domain_error("distribution table does not match the displacement set");
        double sum = 0.0;
        for (double x : weights) {
            if (x < 0.0) throw domain_error("distribution weights must be nonnegative");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw domain_error("distribution weights must sum to 1");
    }
};

// (H2): strictly positive weight on every extreme displacement.
inline bool check_h2(const Distribution& mu) {
    Box db = mu.geo.delta_box();
    for (const auto& c : mu.geo.corners())
        if (!(mu.weights[db.index(c)] > 0.0)) return false;
    return true;
}

struct EnergyGrid {
    double lo = 0.0, hi = 0.0;  // ignored when bins == 0 (auto)
    int bins = 0;
};

// Union of the periodic spectra over configurations with period at most
// max_period and entries in the support of mu; it grows with max_period and
// fills out the almost-sure spectrum from inside. In d = 1 each configuration
// contributes its exact bands from the discriminant of the transfer matrix;
// in d >= 2 each contributes the point spectrum of its wrapped restriction
// and the points are merged into intervals at the energy-grid resolution.
inline floquet::BandStructure approx_almost_sure_spectrum(const Distribution& mu,
                                                          const SingleSite& q, double lscale,
                                                          int max_period,
                                                          const EnergyGrid& grid = {},
                                                          int threads = 1,
                                                          std::int64_t cap = 1000000) {
    if (!check_h2(mu))
        throw precondition_error("(H2) violated: an extreme displacement has zero weight");
    if (!(mu.geo == q.geo)) throw domain_error("distribution and potential geometries differ");
    if (max_period < 1) throw domain_error("max period must be >= 1");
    const Geometry& g = mu.geo;
    Box db = g.delta_box();
    std::vector<Site> supp;
    for (std::size_t i = 0; i < db.volume(); ++i)
        if (mu.weights[i] > 0.0) supp.push_back(db.site(i));
    const auto ns = static_cast<std::int64_t>(supp.size());

    auto digits_tag = [&](const std::vector<std::size_t>& idx) {
        std::string s;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (i) s += ".";
            const Site& a = supp[idx[i]];
            for (std::size_t k = 0; k < a.size(); ++k) s += (k ? "_" : "") + std::to_string(a[k]);
        }
        return s;
    };

    if (g.d == 1) {
        std::int64_t total = 0, block = 1;
        for (int p = 1; p <= max_period; ++p) {
            if (block > cap / ns) throw resource_error("periodic enumeration exceeds the cap");
            block *= ns;
            total += block;
            if (total > cap) throw resource_error("periodic enumeration exceeds the cap");
        }
        std::vector<floquet::Band> all;
        for (int p = 1; p <= max_period; ++p) {
            std::int64_t n = 1;
            for (int i = 0; i < p; ++i) n *= ns;
            for (std::int64_t c = 0; c < n; ++c) {
                std::vector<std::size_t> idx(static_cast<std::size_t>(p));
                std::int64_t cc = c;
                for (int k = p - 1; k >= 0; --k) {
                    idx[static_cast<std::size_t>(k)] = static_cast<std::size_t>(cc % ns);
                    cc /= ns;
                }
                std::vector<Site> table;
                table.reserve(idx.size());
                for (auto i : idx) table.push_back(supp[i]);
                auto cfg = periodic_configuration(g, {p}, std::move(table));
                Box win({1}, {p * g.M[0]});
                auto v = assemble_potential(cfg, win, q, lscale);
                auto bs = floquet::bands_from_discriminant(
                    v.values, "p" + std::to_string(p) + "_" + digits_tag(idx), 1e-12, threads);
                all.insert(all.end(), bs.bands.begin(), bs.bands.end());
            }
        }
        floquet::BandStructure out;
        out.bands = floquet::merge_bands(std::move(all));
        return out;
    }

    // d >= 2: collect point spectra over all period vectors K in [1,max_period]^d
    std::vector<double> evs_all;
    std::vector<Index> K(static_cast<std::size_t>(g.d), 1);
    std::int64_t total = 0;
    for (;;) {
        std::int64_t vol = 1;
        for (Index k : K) vol *= k;
        std::int64_t tables = 1;
        for (std::int64_t i = 0; i < vol; ++i) {
            if (tables > cap / ns) throw resource_error("periodic enumeration exceeds the cap");
            tables *= ns;
        }
        total += tables;
        if (total > cap) throw resource_error("periodic enumeration exceeds the cap");
        std::vector<Index> hi(K);
        for (auto& x : hi) x -= 1;
        Box dom(Site(K.size(), 0), hi);
        for (std::int64_t c = 0; c < tables; ++c) {
            std::vector<Site> table;
            table.reserve(static_cast<std::size_t>(vol));
            std::int64_t cc = c;
            for (std::int64_t i = 0; i < vol; ++i) {
                table.push_back(supp[static_cast<std::size_t>(cc % ns)]);
                cc /= ns;
            }
            Configuration cfg(g, ConfigKind::Periodic, dom, std::move(table));
            Site lo(K.size(), 1), whi(K.size());
            for (std::size_t i = 0; i < K.size(); ++i) whi[i] = K[i] * g.M[i];
            Box win(lo, whi);
            auto v = assemble_potential(cfg, win, q, lscale);
            auto evs = spectra::eigenvalues(build_operator(win, Bc::Periodic, &v));
            evs_all.insert(evs_all.end(), evs.begin(), evs.end());
        }
        int ax = g.d - 1;
        for (; ax >= 0; --ax) {
            if (K[static_cast<std::size_t>(ax)] < max_period) {
                ++K[static_cast<std::size_t>(ax)];
                for (int j = ax + 1; j < g.d; ++j) K[static_cast<std::size_t>(j)] = 1;
                break;
            }
        }
        if (ax < 0) break;
    }
    std::sort(evs_all.begin(), evs_all.end());
    double glo = grid.bins > 0 ? grid.lo : evs_all.front() - 1e-6;
    double ghi = grid.bins > 0 ? grid.hi : evs_all.back() + 1e-6;
    int bins = grid.bins > 0 ? grid.bins : 2000;
    if (evs_all.front() < glo || evs_all.back() > ghi)
        throw domain_error("energy grid does not cover the computed spectra");
    double step = (ghi - glo) / bins;
    floquet::BandStructure out;
    double cur_lo = evs_all.front(), cur_hi = evs_all.front();
    for (std::size_t i = 1; i <= evs_all.size(); ++i) {
        if (i < evs_all.size() && evs_all[i] - cur_hi <= step) {
            cur_hi = evs_all[i];
        } else {
            out.bands.push_back({cur_lo, cur_hi, "periodic_union", false, false});
            if (i < evs_all.size()) cur_lo = cur_hi = evs_all[i];
        }
    }
    out.bands = floquet::merge_bands(std::move(out.bands));
    return out;
}

inline std::string bands_csv(const floquet::BandStructure& bs) {
    std::string out = "lower,upper,source_config\n";
    for (const auto& b : bs.bands) out += fmt17(b.lo) + "," + fmt17(b.hi) + "," + b.source + "\n";
    return out;
}

}  // namespace rdm::model

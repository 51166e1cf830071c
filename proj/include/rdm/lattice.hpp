#pragma once

#include <rdm/box.hpp>
#include <rdm/errors.hpp>
#include <rdm/io.hpp>

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace rdm {

// Restriction flavours for the negative adjacency operator h0 (zero diagonal,
// -1 on nearest-neighbour bonds). Truncation keeps h0 cut to the box; Neumann
// subtracts the boundary counting function, Dirichlet adds it; Periodic wraps
// every axis, with wrap bonds accumulating on short extents (an extent-2 axis
// yields a -2 coupling, an extent-1 axis a -2 diagonal shift).
enum class Bc { Truncation, Neumann, Dirichlet, Periodic };

inline const char* bc_name(Bc bc) {
    switch (bc) {
        case Bc::Truncation: return "truncation";
        case Bc::Neumann: return "neumann";
        case Bc::Dirichlet: return "dirichlet";
        case Bc::Periodic: return "periodic";
    }
    return "?";
}

// Number of box faces through a site, counted per axis; an extent-1 axis
// contributes both faces. Equals the number of nearest neighbours outside.
inline int edge_count(const Box& box, const Site& x) {
    if (!box.contains(x)) throw domain_error("site outside box");
    int c = 0;
    for (int a = 0; a < box.dim(); ++a) {
        if (x[static_cast<std::size_t>(a)] == box.lower(a)) ++c;
        if (x[static_cast<std::size_t>(a)] == box.upper(a)) ++c;
    }
    return c;
}

struct OffEntry {
    std::size_t i, j;  // i < j
    double v;
};

struct LatticeOperator {
    Box box;
    Bc bc;
    std::vector<double> diag;
    std::vector<OffEntry> off;  // sorted by (i, j), one entry per pair
};

struct BuildOptions {
    std::size_t volume_cap = 20000;
};

inline LatticeOperator build_operator(const Box& box, Bc bc,
                                      const SiteFunction* potential = nullptr,
                                      const BuildOptions& opts = {}) {
    if (box.volume() > opts.volume_cap)
        throw resource_error("box volume " + fmt_int(static_cast<Index>(box.volume())) +
                             " exceeds the cap " + fmt_int(static_cast<Index>(opts.volume_cap)) +
                             " (raise volume_cap to override)");
    if (potential) {
        if (!(potential->box == box)) throw domain_error("potential lives on a different box");
        if (potential->values.size() != box.volume())
            throw domain_error("potential value count does not match box volume");
    }
    const std::size_t n = box.volume();
    LatticeOperator op{box, bc, std::vector<double>(n, 0.0), {}};
    op.off.reserve(n * static_cast<std::size_t>(box.dim()));
    Site x;
    for (std::size_t k = 0; k < n; ++k) {
        x = box.site(k);
        for (int a = 0; a < box.dim(); ++a) {
            for (int dir : {-1, +1}) {
                Site y = x;
                y[static_cast<std::size_t>(a)] += dir;
                if (!box.contains(y)) {
                    if (bc != Bc::Periodic) continue;
                    Index lo = box.lower(a), ext = box.extent(a);
                    Index c = y[static_cast<std::size_t>(a)] - lo;
                    c = ((c % ext) + ext) % ext;
                    y[static_cast<std::size_t>(a)] = lo + c;
                }
                std::size_t j = box.index(y);
                if (j == k)
                    op.diag[k] -= 1.0;
                else if (k < j)
                    op.off.push_back({k, j, -1.0});
            }
        }
        if (bc == Bc::Neumann)
            op.diag[k] -= static_cast<double>(edge_count(box, x));
        else if (bc == Bc::Dirichlet)
            op.diag[k] += static_cast<double>(edge_count(box, x));
        if (potential) op.diag[k] += potential->values[k];
    }
    std::sort(op.off.begin(), op.off.end(), [](const OffEntry& l, const OffEntry& r) {
        return l.i != r.i ? l.i < r.i : l.j < r.j;
    });
    // merge duplicate bonds (periodic wraps on short extents)
    std::vector<OffEntry> merged;
    merged.reserve(op.off.size());
    for (const auto& e : op.off) {
        if (!merged.empty() && merged.back().i == e.i && merged.back().j == e.j)
            merged.back().v += e.v;
        else
            merged.push_back(e);
    }
    op.off = std::move(merged);
    return op;
}

inline std::vector<double> apply(const LatticeOperator& op, const std::vector<double>& u) {
    if (u.size() != op.diag.size()) throw domain_error("vector length does not match operator");
    std::vector<double> y(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) y[k] = op.diag[k] * u[k];
    for (const auto& e : op.off) {
        y[e.i] += e.v * u[e.j];
        y[e.j] += e.v * u[e.i];
    }
    return y;
}

inline SiteFunction apply(const LatticeOperator& op, const SiteFunction& u) {
    if (!(u.box == op.box)) throw domain_error("site function lives on a different box");
    return SiteFunction{u.box, apply(op, u.values)};
}

// Even reflection across the upper face of one axis: the doubled box carries
// u(x) for x in the original half and the mirror image beyond it.
inline SiteFunction reflect_extension(const SiteFunction& u, int axis) {
    if (axis < 0 || axis >= u.box.dim()) throw domain_error("reflection axis out of range");
    if (u.values.size() != u.box.volume())
        throw domain_error("site function value count does not match its box");
    Site lo(static_cast<std::size_t>(u.box.dim())), hi(static_cast<std::size_t>(u.box.dim()));
    for (int a = 0; a < u.box.dim(); ++a) {
        lo[static_cast<std::size_t>(a)] = u.box.lower(a);
        hi[static_cast<std::size_t>(a)] =
            a == axis ? 2 * u.box.upper(a) - u.box.lower(a) + 1 : u.box.upper(a);
    }
    Box big(lo, hi);
    SiteFunction out{big, std::vector<double>(big.volume())};
    for (std::size_t k = 0; k < big.volume(); ++k) {
        Site x = big.site(k);
        auto& xa = x[static_cast<std::size_t>(axis)];
        if (xa > u.box.upper(axis)) xa = 2 * u.box.upper(axis) + 1 - xa;
        out.values[k] = u.values[u.box.index(x)];
    }
    return out;
}

// Text dump "i j value" of every structural entry, both triangles plus the
// diagonal, row-major sorted, 0-based indices, 17 significant digits.
inline std::string dump_entries(const LatticeOperator& op) {
    struct Cell {
        std::size_t i, j;
        double v;
    };
    std::vector<Cell> cells;
    cells.reserve(op.diag.size() + 2 * op.off.size());
    for (std::size_t k = 0; k < op.diag.size(); ++k) cells.push_back({k, k, op.diag[k]});
    for (const auto& e : op.off) {
        cells.push_back({e.i, e.j, e.v});
        cells.push_back({e.j, e.i, e.v});
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& l, const Cell& r) {
        return l.i != r.i ? l.i < r.i : l.j < r.j;
    });
    std::string out;
    for (const auto& c : cells) {
        out += fmt_int(static_cast<Index>(c.i));
        out += ' ';
        out += fmt_int(static_cast<Index>(c.j));
        out += ' ';
        out += fmt17(c.v);
        out += '\n';
    }
    return out;
}

} // namespace rdm

// rdmlab: command-line laboratory for the displacement model.
//
// Every subcommand runs one computation, writes one deterministic output
// file (CSV or JSON, 17 significant digits), and prints a one-line summary
// with the key numbers to standard output. Diagnostics go to standard error.
//
// Exit codes: 0 success, 1 usage, 2 precondition or domain violation,
// 3 numeric failure, 4 resource limit.

#include <cctype>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rdm/bdm.hpp"
#include "rdm/errors.hpp"
#include "rdm/floquet.hpp"
#include "rdm/ids.hpp"
#include "rdm/io.hpp"
#include "rdm/lattice.hpp"
#include "rdm/model.hpp"
#include "rdm/rng.hpp"
#include "rdm/spectra.hpp"
#include "rdm/verify.hpp"

namespace {

using rdm::fmt17;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* kUsage =
    "usage: rdmlab <subcommand> [--flag value ...]\n"
    "\n"
    "subcommands\n"
    "  bands       proved or conjectured almost-sure spectrum as band intervals\n"
    "              flags: --lambda --mode proved|conjecture\n"
    "  gap         central-gap emptiness check on random configurations\n"
    "              flags: --lambda --L --samples --seed\n"
    "  bubbles     ground-energy map over displacements plus monotonicity check\n"
    "              flags: --M 8 --b 3 --q 1,2,1 --sign 1\n"
    "  minimizers  exhaustive classification of periodic spectral minimizers\n"
    "              flags: --lambda --period\n"
    "  ids         Monte Carlo integrated density of states on an energy grid\n"
    "              flags: --lambda --p --L --samples --seed --bc\n"
    "                     --grid lo:hi:n | --halfwidth --points\n"
    "  dos         pooled eigenvalue histogram (density of states)\n"
    "              flags: --lambda --p --L --samples --bins --seed --bc\n"
    "  symmetry    IDS complement-symmetry deviation at p = 1/2\n"
    "              flags: --lambda --L --samples --seed --halfwidth --points\n"
    "  edgefit     inverse-square-log increment fit at a spectral edge\n"
    "              flags: --lambda --edge eminus|gminus|gplus|eplus\n"
    "                     --side above|below --eps-lo --eps-hi --points\n"
    "                     --L --samples --seed --bc\n"
    "  walk        reflection-principle walk: exact count vs Monte Carlo\n"
    "              flags: --len --trials --seed\n"
    "  verify-all  run the acceptance checklist (report to stdout)\n"
    "              flags: --quick --threads\n"
    "\n"
    "common flags: --config FILE (key=value lines, flags win), --out PATH,\n"
    "              --format csv|json, --threads N, --seed S\n";

struct Args {
    std::string sub;
    std::map<std::string, std::string> kv;

    bool has(const std::string& k) const { return kv.count(k) != 0; }
    std::string str(const std::string& k, const std::string& dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    }
    double real(const std::string& k, double dflt) const {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(it->second, &pos);
        } catch (const std::exception&) {
            throw usage_error("flag --" + k + ": expected a number, got '" + it->second + "'");
        }
        if (pos != it->second.size())
            throw usage_error("flag --" + k + ": expected a number, got '" + it->second + "'");
        return v;
    }
    long long integer(const std::string& k, long long dflt) const {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(it->second, &pos);
        } catch (const std::exception&) {
            throw usage_error("flag --" + k + ": expected an integer, got '" + it->second + "'");
        }
        if (pos != it->second.size())
            throw usage_error("flag --" + k + ": expected an integer, got '" + it->second + "'");
        return v;
    }
    bool flag(const std::string& k) const {
        auto it = kv.find(k);
        if (it == kv.end()) return false;
        return it->second == "1" || it->second == "true" || it->second == "yes";
    }
};

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// key=value lines; '#' starts a comment; command-line flags take precedence
void merge_config_file(Args& args, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error("config " + path + ":" + std::to_string(lineno) +
                              ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw usage_error("config " + path + ":" + std::to_string(lineno) +
                                           ": empty key");
        args.kv.emplace(key, value);  // existing flag wins
    }
}

Args parse_args(int argc, char** argv) {
    if (argc < 2) throw usage_error("missing subcommand");
    Args args;
    args.sub = argv[1];
    for (int i = 2; i < argc; ++i) {
        const std::string a = argv[i];
        if (a.rfind("--", 0) != 0) throw usage_error("unexpected argument '" + a + "'");
        const std::string key = a.substr(2);
        if (key.empty()) throw usage_error("empty flag name");
        if (key == "quick") {
            args.kv[key] = "1";
        } else {
            if (i + 1 >= argc) throw usage_error("flag --" + key + " needs a value");
            args.kv[key] = argv[++i];
        }
    }
    if (args.has("config")) merge_config_file(args, args.kv.at("config"));
    return args;
}

void check_allowed(const Args& args, std::initializer_list<const char*> extra) {
    std::set<std::string> allowed{"config", "out", "format", "threads"};
    for (const char* k : extra) allowed.insert(k);
    for (const auto& [k, v] : args.kv)
        if (allowed.count(k) == 0)
            throw usage_error("unknown flag --" + k + " for subcommand " + args.sub);
}

int threads_of(const Args& args) {
    const long long t = args.integer("threads", 1);
    if (t < 1 || t > 256) throw usage_error("flag --threads: expected 1..256");
    return static_cast<int>(t);
}

std::string format_of(const Args& args) {
    const std::string f = args.str("format", "csv");
    if (f != "csv" && f != "json") throw usage_error("flag --format: expected csv or json");
    return f;
}

rdm::Bc bc_of(const Args& args, rdm::Bc dflt) {
    const std::string s = args.str("bc", "");
    if (s.empty()) return dflt;
    if (s == "dirichlet") return rdm::Bc::Dirichlet;
    if (s == "neumann") return rdm::Bc::Neumann;
    if (s == "periodic") return rdm::Bc::Periodic;
    throw usage_error("flag --bc: expected dirichlet, neumann or periodic");
}

std::vector<rdm::Index> index_list(const Args& args, const std::string& key,
                                   const std::string& dflt) {
    std::vector<rdm::Index> out;
    std::stringstream ss(args.str(key, dflt));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            out.push_back(static_cast<rdm::Index>(std::stoll(item)));
        } catch (const std::exception&) {
            throw usage_error("flag --" + key + ": expected comma-separated integers");
        }
    }
    if (out.empty()) throw usage_error("flag --" + key + ": empty list");
    return out;
}

std::vector<double> real_list(const Args& args, const std::string& key,
                              const std::string& dflt) {
    std::vector<double> out;
    std::stringstream ss(args.str(key, dflt));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw usage_error("flag --" + key + ": expected comma-separated numbers");
        }
    }
    if (out.empty()) throw usage_error("flag --" + key + ": empty list");
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw rdm::resource_error("cannot open '" + path + "' for writing");
    const std::size_t n = std::fwrite(content.data(), 1, content.size(), f);
    const int rc = std::fclose(f);
    if (n != content.size() || rc != 0)
        throw rdm::resource_error("short write to '" + path + "'");
}

std::string json_array(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt17(v[i]);
    }
    return out + "]";
}

// --grid lo:hi:n, linearly spaced
std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0, hi = 0.0;
    long long n = 0;
    char colon1 = 0, colon2 = 0;
    std::stringstream ss(spec);
    if (!(ss >> lo >> colon1 >> hi >> colon2 >> n) || colon1 != ':' || colon2 != ':' ||
        !ss.eof())
        throw usage_error("flag --grid: expected lo:hi:n");
    if (n < 2 || n > 100000 || !(lo < hi)) throw usage_error("flag --grid: need lo < hi, 2 <= n <= 100000");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) /
                                                  static_cast<double>(n - 1);
    return g;
}

std::vector<double> ids_grid(const Args& args, double lambda, int dflt_points) {
    if (args.has("grid")) return parse_grid(args.kv.at("grid"));
    const auto ed = rdm::floquet::band_edges_closed_form(lambda);
    const double halfwidth = args.real("halfwidth", ed.e_plus - 0.5 * lambda + 0.3);
    const long long points = args.integer("points", dflt_points);
    if (points < 2 || points > 100000) throw usage_error("flag --points: expected 2..100000");
    return rdm::ids::symmetric_grid(lambda, halfwidth, static_cast<int>(points));
}

int cmd_bands(const Args& args) {
    check_allowed(args, {"lambda", "mode"});
    const double lambda = args.real("lambda", 1.0);
    const std::string mode_s = args.str("mode", "proved");
    if (mode_s != "proved" && mode_s != "conjecture")
        throw usage_error("flag --mode: expected proved or conjecture");
    const auto mode = mode_s == "proved" ? rdm::floquet::Mode::proved
                                         : rdm::floquet::Mode::conjecture;
    const auto bs = rdm::floquet::sigma_lambda(lambda, mode, 1e-12, threads_of(args));
    const std::string fmt = format_of(args);
    const std::string out = args.str("out", "bands." + fmt);
    if (fmt == "csv") {
        write_file(out, rdm::floquet::band_structure_csv(bs));
    } else {
        std::string j = "{\"lambda\":" + fmt17(lambda) + ",\"mode\":\"" + mode_s +
                        "\",\"bands\":[";
        for (std::size_t i = 0; i < bs.bands.size(); ++i) {
            if (i) j += ",";
            j += "[" + fmt17(bs.bands[i].lo) + "," + fmt17(bs.bands[i].hi) + "]";
        }
        j += "]}\n";
        write_file(out, j);
    }
    std::printf("bands: lambda=%s mode=%s bands=%zu span=[%s,%s] -> %s\n",
                fmt17(lambda).c_str(), mode_s.c_str(), bs.bands.size(),
                fmt17(bs.bands.front().lo).c_str(), fmt17(bs.bands.back().hi).c_str(),
                out.c_str());
    if (bs.warning)
        std::fprintf(stderr, "warning: near-tangential band touching detected in the scan\n");
    return 0;
}

int cmd_gap(const Args& args) {
    check_allowed(args, {"lambda", "L", "samples", "seed"});
    const double lambda = args.real("lambda", 1.0);
    const int cells = static_cast<int>(args.integer("L", 100));
    const int samples = static_cast<int>(args.integer("samples", 200));
    const auto seed = static_cast<std::uint64_t>(args.integer("seed", 1));
    if (cells < 2) throw usage_error("flag --L: expected at least 2 cells");
    if (samples < 1) throw usage_error("flag --samples: expected at least 1");
    std::string csv = "sample,gap_count,min_sq_eig,count_health,clean\n";
    int clean = 0;
    double worst_floor = 1e300;
    const double s = std::sqrt(4.0 + lambda * lambda);
    for (int i = 0; i < samples; ++i) {
        auto rng = rdm::sample_stream(seed, static_cast<std::size_t>(i));
        const auto w = rdm::ids::sample_word(rng, cells, 0.5);
        const auto rep = rdm::bdm::verify_gap(w, lambda);
        clean += rep.gap_clean ? 1 : 0;
        worst_floor = std::min(worst_floor, rep.min_sq_eig + s);
        csv += rdm::fmt_int(i) + "," + rdm::fmt_int(rep.gap_count) + "," +
               fmt17(rep.min_sq_eig) + "," + fmt17(rep.count_health) + "," +
               (rep.gap_clean ? "1" : "0") + "\n";
    }
    const std::string fmt = format_of(args);
    const std::string out = args.str("out", "gap." + fmt);
    if (fmt == "csv") {
        write_file(out, csv);
    } else {
        write_file(out, "{\"lambda\":" + fmt17(lambda) + ",\"samples\":" +
                            rdm::fmt_int(samples) + ",\"clean\":" + rdm::fmt_int(clean) +
                            ",\"worst_sq_floor_margin\":" + fmt17(worst_floor) + "}\n");
    }
    std::printf("gap: lambda=%s L=%d clean=%d/%d worst_sq_floor_margin=%s -> %s\n",
                fmt17(lambda).c_str(), cells, clean, samples, fmt17(worst_floor).c_str(),
                out.c_str());
    return 0;
}

int cmd_bubbles(const Args& args) {
    check_allowed(args, {"M", "b", "q", "sign"});
    const auto M = index_list(args, "M", "8");
    const auto b = index_list(args, "b", "3");
    const auto qv = real_list(args, "q", "1,2,1");
    const long long sign = args.integer("sign", 1);
    if (sign != 1 && sign != -1) throw usage_error("flag --sign: expected 1 or -1");
    rdm::model::SingleSite q(rdm::model::Geometry(M, b), qv);
    const int threads = threads_of(args);
    const auto map = rdm::model::ground_energy_map(q, static_cast<int>(sign), threads);
    const auto rep = rdm::model::verify_bubbles(q, static_cast<int>(sign), threads);
    const std::string fmt = format_of(args);
    const std::string out = args.str("out", "bubbles." + fmt);
    if (fmt == "csv") {
        write_file(out, rdm::model::energy_map_csv(map));
    } else {
        write_file(out, std::string("{\"e_min\":") + fmt17(map.e_min) + ",\"e_max\":" +
                            fmt17(map.e_max) + ",\"monotone\":" +
                            (rep.monotone ? "true" : "false") + ",\"min_margin\":" +
                            fmt17(rep.min_margin) + ",\"e0\":" + json_array(map.e0) + "}\n");
    }
    std::printf("bubbles: d=%zu monotone=%s min_margin=%s e_min=%s -> %s\n", M.size(),
                rep.monotone ? "yes" : "no", fmt17(rep.min_margin).c_str(),
                fmt17(map.e_min).c_str(), out.c_str());
    return 0;
}

int cmd_minimizers(const Args& args) {
    check_allowed(args, {"lambda", "period"});
    const double lambda = args.real("lambda", 1.0);
    const int period = static_cast<int>(args.integer("period", 4));
    rdm::model::Geometry g({2}, {1});
    rdm::model::SingleSite q(g, {lambda});
    const auto rep = rdm::model::classify_minimizers_1d(g, q, period, threads_of(args));
    std::string csv = "index,table\n";
    for (std::size_t i = 0; i < rep.minimizing.size(); ++i) {
        csv += rdm::fmt_int(static_cast<std::int64_t>(i)) + ",";
        for (std::size_t k = 0; k < rep.minimizing[i].size(); ++k) {
            if (k) csv += " ";
            csv += rdm::fmt_int(rep.minimizing[i][k]);
        }
        csv += "\n";
    }
    const std::string fmt = format_of(args);
    const std::string out = args.str("out", "minimizers." + fmt);
    if (fmt == "csv") {
        write_file(out, csv);
    } else {
        std::string j = std::string("{\"period\":") + rdm::fmt_int(period) + ",\"e_min\":" +
                        fmt17(rep.e_min) + ",\"best\":" + fmt17(rep.best) +
                        ",\"predicate_holds\":" + (rep.predicate_holds ? "true" : "false") +
                        ",\"minimizing\":[";
        for (std::size_t i = 0; i < rep.minimizing.size(); ++i) {
            if (i) j += ",";
            j += "[";
            for (std::size_t k = 0; k < rep.minimizing[i].size(); ++k) {
                if (k) j += ",";
                j += rdm::fmt_int(rep.minimizing[i][k]);
            }
            j += "]";
        }
        j += "]}\n";
        write_file(out, j);
    }
    std::printf("minimizers: lambda=%s period=%d count=%zu e_min=%s predicate=%s -> %s\n",
                fmt17(lambda).c_str(), period, rep.minimizing.size(), fmt17(rep.e_min).c_str(),
                rep.predicate_holds ? "holds" : "VIOLATED", out.c_str());
    return 0;
}

int cmd_ids(const Args& args) {
    check_allowed(args, {"lambda", "p", "L", "samples", "seed", "bc", "grid", "halfwidth",
                         "points"});
    const double lambda = args.real("lambda", 1.0);
    const double p = args.real("p", 0.5);
    const int cells = static_cast<int>(args.integer("L", 100));
    const int samples = static_cast<int>(args.integer("samples", 200));
    const auto seed = static_cast<std::uint64_t>(args.integer("seed", 1));
    auto grid = ids_grid(args, lambda, 41);
    const auto curve = rdm::ids::estimate_ids(lambda, p, cells, samples, std::move(grid), seed,
                                              bc_of(args, rdm::Bc::Dirichlet),
                                              threads_of(args));
    const std::string fmt = format_of(args);
    const std::string out = args.str("out", "ids." + fmt);
    if (fmt == "csv") {
        write_file(out, rdm::ids::ids_csv(curve));
    } else {
        write_file(out, "{\"lambda\":" + fmt17(lambda) + ",\"p\":" + fmt17(p) +
                            ",\"L\":" + rdm::fmt_int(cells) + ",\"samples\":" +
                            rdm::fmt_int(samples) + ",\"grid\":" + json_array(curve.grid) +
                            ",\"values\":" + json_array(curve.values) + ",\"se\":" +
                            json_array(curve.se) + "}\n");
    }
    const std::size_t mid = curve.grid.size() / 2;
    std::printf("ids: lambda=%s p=%s L=%d samples=%d points=%zu mid(%s)=%s -> %s\n",
                fmt17(lambda).c_str(), fmt17(p).c_str(), cells, samples, curve.grid.size(),
                fmt17(curve.grid[mid]).c_str(), fmt17(curve.values[mid]).c_str(), out.c_str());
    return 0;
}

int cmd_dos(const Args& args) {
    check_allowed(args, {"lambda", "p", "L", "samples", "bins", "seed", "bc"});
    const double lambda = args.real("lambda", 1.0);
    const double p = args.real("p", 0.5);
    const int cells = static_cast<int>(args.integer("L", 30));
    const int samples = static_cast<int>(args.integer("samples", 80));
    const int bins = static_cast<int>(args.integer("bins", 120));
    const auto seed = static_cast<std::uint64_t>(args.integer("seed", 1));
    const auto h = rdm::ids::dos_histogram(lambda, p, cells, samples, bins, seed,
                                           bc_of(args, rdm::Bc::Periodic), threads_of(args));
    const int intervals = rdm::ids::support_intervals(h);
    const std::string fmt = format_of(args);
    const std::string out = args.str("out", "dos." + fmt);
    if (fmt == "csv") {
        write_file(out, rdm::ids::dos_csv(h));
    } else {
        write_file(out, "{\"lambda\":" + fmt17(lambda) + ",\"bins\":" + rdm::fmt_int(bins) +
                            ",\"support_intervals\":" + rdm::fmt_int(intervals) +
                            ",\"edges\":" + json_array(h.edges) + ",\"density\":" +
                            json_array(h.density) + "}\n");
    }
    std::printf("dos: lambda=%s L=%d samples=%d bins=%d support_intervals=%d -> %s\n",
                fmt17(lambda).c_str(), cells, samples, bins, intervals, out.c_str());
    return 0;
}

int cmd_symmetry(const Args& args) {
    check_allowed(args, {"lambda", "L", "samples", "seed", "halfwidth", "points"});
    const double lambda = args.real("lambda", 1.0);
    const int cells = static_cast<int>(args.integer("L", 100));
    const int samples = static_cast<int>(args.integer("samples", 500));
    const auto seed = static_cast<std::uint64_t>(args.integer("seed", 1));
    const auto ed = rdm::floquet::band_edges_closed_form(lambda);
    const double halfwidth = args.real("halfwidth", ed.e_plus - 0.5 * lambda + 0.3);
    const int points = static_cast<int>(args.integer("points", 41));
    auto grid = rdm::ids::symmetric_grid(lambda, halfwidth, points);
    const auto curve = rdm::ids::estimate_ids(lambda, 0.5, cells, samples, std::move(grid),
                                              seed, rdm::Bc::Dirichlet, threads_of(args));
    const double dev = rdm::ids::check_symmetry(curve);
    const std::string fmt = format_of(args);
    const std::string out = args.str("out", "symmetry." + fmt);
    if (fmt == "csv") {
        write_file(out, rdm::ids::ids_csv(curve));
    } else {
        write_file(out, "{\"lambda\":" + fmt17(lambda) + ",\"max_deviation\":" + fmt17(dev) +
                            ",\"grid\":" + json_array(curve.grid) + ",\"values\":" +
                            json_array(curve.values) + "}\n");
    }
    std::printf("symmetry: lambda=%s L=%d samples=%d max_deviation=%s -> %s\n",
                fmt17(lambda).c_str(), cells, samples, fmt17(dev).c_str(), out.c_str());
    return 0;
}

int cmd_edgefit(const Args& args) {
    check_allowed(args, {"lambda", "edge", "side", "eps-lo", "eps-hi", "points", "L",
                         "samples", "seed", "bc"});
    const double lambda = args.real("lambda", 1.0);
    const std::string edge_s = args.str("edge", "eminus");
    const auto ed = rdm::floquet::band_edges_closed_form(lambda);
    double e0 = 0.0;
    std::string side_dflt;
    if (edge_s == "eminus") {
        e0 = ed.e_minus;
        side_dflt = "above";
    } else if (edge_s == "gminus") {
        e0 = ed.g_minus;
        side_dflt = "below";
    } else if (edge_s == "gplus") {
        e0 = ed.g_plus;
        side_dflt = "above";
    } else if (edge_s == "eplus") {
        e0 = ed.e_plus;
        side_dflt = "below";
    } else {
        throw usage_error("flag --edge: expected eminus, gminus, gplus or eplus");
    }
    const std::string side_s = args.str("side", side_dflt);
    if (side_s != "above" && side_s != "below")
        throw usage_error("flag --side: expected above or below");
    const auto side = side_s == "above" ? rdm::ids::Side::Above : rdm::ids::Side::Below;
    const double eps_lo = args.real("eps-lo", 1e-3);
    const double eps_hi = args.real("eps-hi", 0.1);
    const int points = static_cast<int>(args.integer("points", 13));
    const int cells = static_cast<int>(args.integer("L", 400));
    const int samples = static_cast<int>(args.integer("samples", 1000));
    const auto seed = static_cast<std::uint64_t>(args.integer("seed", 1));
    auto grid = rdm::ids::edge_fit_grid(e0, side, eps_lo, eps_hi, points);
    const auto curve = rdm::ids::estimate_ids(lambda, 0.5, cells, samples, std::move(grid),
                                              seed, bc_of(args, rdm::Bc::Dirichlet),
                                              threads_of(args));
    const auto fit = rdm::ids::edge_singularity_fit(curve, e0, side, eps_lo, eps_hi);
    const std::string fmt = format_of(args);
    const std::string out = args.str("out", "edgefit." + fmt);
    if (fmt == "json") {
        write_file(out, rdm::ids::fit_json(fit) + "\n");
    } else {
        write_file(out, "edge,side,C,eps_lo,eps_hi,product_min,product_max,pass\n" +
                            fmt17(fit.edge) + "," + side_s + "," + fmt17(fit.c) + "," +
                            fmt17(fit.eps_lo) + "," + fmt17(fit.eps_hi) + "," +
                            fmt17(fit.product_min) + "," + fmt17(fit.product_max) + "," +
                            (fit.pass ? "1" : "0") + "\n");
    }
    std::printf("edgefit: lambda=%s edge=%s(%s) side=%s C=%s window=[%s,%s] pass=%s -> %s\n",
                fmt17(lambda).c_str(), edge_s.c_str(), fmt17(e0).c_str(), side_s.c_str(),
                fmt17(fit.c).c_str(), fmt17(fit.product_min).c_str(),
                fmt17(fit.product_max).c_str(), fit.pass ? "yes" : "no", out.c_str());
    return 0;
}

int cmd_walk(const Args& args) {
    check_allowed(args, {"len", "trials", "seed"});
    const int len = static_cast<int>(args.integer("len", 400));
    const int trials = static_cast<int>(args.integer("trials", 100000));
    const auto seed = static_cast<std::uint64_t>(args.integer("seed", 1));
    const auto ex = rdm::ids::walk_exact(len);
    const auto rep = rdm::ids::walk_statistics(len, trials, seed);
    const std::string fmt = format_of(args);
    const std::string out = args.str("out", "walk." + fmt);
    if (fmt == "json") {
        write_file(out, "{\"len\":" + rdm::fmt_int(len) + ",\"trials\":" +
                            rdm::fmt_int(trials) + ",\"joint_exact\":" + fmt17(ex.first) +
                            ",\"tail_exact\":" + fmt17(ex.second) + ",\"p_cond\":" +
                            fmt17(rep.p_cond) + ",\"se_cond\":" + fmt17(rep.se_cond) +
                            ",\"p_tail\":" + fmt17(rep.p_tail) + ",\"se_tail\":" +
                            fmt17(rep.se_tail) + ",\"gaussian_ref\":" +
                            fmt17(rep.gaussian_ref) + ",\"alt_ref\":" + fmt17(rep.alt_ref) +
                            "}\n");
    } else {
        write_file(out,
                   "len,trials,joint_exact,tail_exact,p_cond,se_cond,p_tail,se_tail,"
                   "gaussian_ref,alt_ref\n" +
                       rdm::fmt_int(len) + "," + rdm::fmt_int(trials) + "," + fmt17(ex.first) +
                       "," + fmt17(ex.second) + "," + fmt17(rep.p_cond) + "," +
                       fmt17(rep.se_cond) + "," + fmt17(rep.p_tail) + "," +
                       fmt17(rep.se_tail) + "," + fmt17(rep.gaussian_ref) + "," +
                       fmt17(rep.alt_ref) + "\n");
    }
    std::printf("walk: len=%d exact=%s mc=%s(se=%s) normal_limit=%s -> %s\n", len,
                fmt17(ex.second).c_str(), fmt17(rep.p_tail).c_str(),
                fmt17(rep.se_tail).c_str(), fmt17(rep.gaussian_ref).c_str(), out.c_str());
    return 0;
}

int cmd_verify_all(const Args& args) {
    check_allowed(args, {"quick", "threads"});
    const auto scale = args.flag("quick") ? rdm::verify::Scale::Quick
                                          : rdm::verify::Scale::Full;
    const auto suite = rdm::verify::run_all(scale, threads_of(args));
    const int failures = rdm::verify::print_suite(suite, stdout);
    return failures == 0 ? 0 : 1;
}

int dispatch(const Args& args) {
    if (args.sub == "bands") return cmd_bands(args);
    if (args.sub == "gap") return cmd_gap(args);
    if (args.sub == "bubbles") return cmd_bubbles(args);
    if (args.sub == "minimizers") return cmd_minimizers(args);
    if (args.sub == "ids") return cmd_ids(args);
    if (args.sub == "dos") return cmd_dos(args);
    if (args.sub == "symmetry") return cmd_symmetry(args);
    if (args.sub == "edgefit") return cmd_edgefit(args);
    if (args.sub == "walk") return cmd_walk(args);
    if (args.sub == "verify-all") return cmd_verify_all(args);
    if (args.sub == "--help" || args.sub == "-h" || args.sub == "help") {
        std::fputs(kUsage, stdout);
        return 0;
    }
    throw usage_error("unknown subcommand '" + args.sub + "'");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(parse_args(argc, argv));
    } catch (const usage_error& e) {
        std::fprintf(stderr, "rdmlab: %s\n\n%s", e.what(), kUsage);
        return 1;
    } catch (const rdm::precondition_error& e) {
        std::fprintf(stderr, "rdmlab: precondition violated: %s\n", e.what());
        return 2;
    } catch (const rdm::domain_error& e) {
        std::fprintf(stderr, "rdmlab: domain error: %s\n", e.what());
        return 2;
    } catch (const rdm::numeric_error& e) {
        std::fprintf(stderr, "rdmlab: numeric failure: %s\n", e.what());
        return 3;
    } catch (const rdm::resource_error& e) {
        std::fprintf(stderr, "rdmlab: resource limit: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "rdmlab: internal error: %s\n", e.what());
        return 3;
    }
}

/*
 * Subcommand front-end over the library: sampling, counting, exact kernel
 * evaluation, slope queries, limit-shape grids, Monte-Carlo verification,
 * Schur-Weyl generation, and SVG rendering.  Every artifact embeds the
 * resolved configuration and seed, all randomness flows through seeded
 * streams, and exit codes are stable: 0 success, 2 usage error, 3 domain
 * error, 4 budget exceeded.
 */
#include "loz/asymptotics.hpp"
#include "loz/core.hpp"
#include "loz/counting.hpp"
#include "loz/errors.hpp"
#include "loz/kernel.hpp"
#include "loz/render.hpp"
#include "loz/sampler.hpp"
#include "loz/verify.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

// ============================================================
// Shared configuration
// ============================================================

struct RunConfig {
    std::string subcommand;
    std::uint64_t seed = 0;
    std::uint64_t samples = 1;
    int threads = 0;  // 0 = all cores, resolved below
    std::string format;
    std::string out;
    std::string signature_path;
    std::string measure_path;
    std::uint64_t sweeps = 0;  // 0 = library default
    double tolerance = 4.0;
    std::string sampler = "auto";

    json to_json() const {
        return json{{"subcommand", subcommand},
                    {"seed", seed},
                    {"samples", samples},
                    {"threads", threads},
                    {"format", format},
                    {"out", out},
                    {"signature", signature_path},
                    {"measure", measure_path},
                    {"sweeps", sweeps},
                    {"tolerance", tolerance},
                    {"sampler", sampler}};
    }
};

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_artifact(const std::string& out_path, const std::string& body) {
    if (out_path.empty() || out_path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f)
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            "cannot open output file " + out_path);
    f << body;
}

// comment header carrying the resolved config for text artifacts
std::string csv_config_line(const RunConfig& cfg) {
    return "# config: " + cfg.to_json().dump() + "\n";
}

// the comment slots in after the XML declaration line
std::string svg_with_config(std::string svg, const RunConfig& cfg) {
    const std::string mark = "?>\n";
    const auto pos = svg.find(mark);
    const std::string comment =
        "<!-- config: " + cfg.to_json().dump() + " -->\n";
    if (pos == std::string::npos) return comment + svg;
    svg.insert(pos + mark.size(), comment);
    return svg;
}

// ============================================================
// File formats
// ============================================================

// line 1 = N, line 2 = N space-separated integers, strictly decreasing
loz::Signature read_signature_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            "cannot open signature file " + path);
    long long n = 0;
    if (!(f >> n) || n < 1)
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            "signature file must start with N >= 1");
    std::vector<long long> entries;
    entries.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        long long v;
        if (!(f >> v))
            throw loz::LozError(loz::ErrCode::ShapeMismatch,
                                "signature file ends before N entries", i);
        entries.push_back(v);
    }
    return loz::validate_signature(entries);
}

// {"pieces": [[a, b, q], ...]}
loz::PiecewiseDensityMeasure read_measure_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            "cannot open measure file " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            std::string("measure file is not JSON: ") +
                                e.what());
    }
    if (!j.contains("pieces") || !j["pieces"].is_array())
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            "measure file needs a pieces array");
    std::vector<loz::PiecewiseDensityMeasure::Piece> pieces;
    for (const auto& row : j["pieces"]) {
        if (!row.is_array() || row.size() != 3)
            throw loz::LozError(loz::ErrCode::ShapeMismatch,
                                "each piece must be [a, b, q]");
        pieces.push_back({row[0].get<double>(), row[1].get<double>(),
                          row[2].get<double>()});
    }
    return loz::PiecewiseDensityMeasure::checked(pieces);
}

json rows_json(const loz::GTPattern& p) {
    json rows = json::array();
    for (const auto& row : p.rows) rows.push_back(row);
    return rows;
}

loz::GTPattern read_pattern_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            "cannot open pattern file " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            std::string("pattern file is not JSON: ") +
                                e.what());
    }
    if (!j.contains("rows") || !j["rows"].is_array())
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            "pattern file needs a rows array");
    loz::GTPattern p;
    for (const auto& row : j["rows"])
        p.rows.push_back(row.get<std::vector<long long>>());
    return p;
}

const char* status_name(loz::PointStatus s) {
    switch (s) {
        case loz::PointStatus::kLiquid: return "liquid";
        case loz::PointStatus::kFrozen0: return "frozen0";
        case loz::PointStatus::kFrozen1: return "frozen1";
        default: return "degenerate";
    }
}

std::string format_rational(const loz::BigRat& v) {
    const loz::BigInt num = loz::big_num(v);
    const loz::BigInt den = loz::big_den(v);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

loz::SamplerKind parse_sampler(const std::string& name, int N) {
    if (name == "exact") return loz::SamplerKind::kExact;
    if (name == "cftp") return loz::SamplerKind::kCftp;
    if (name == "glauber") return loz::SamplerKind::kGlauber;
    return loz::sampler_for(N);
}

// "dx:dn;dx:dn" -> offset list
std::vector<std::pair<long long, int>> parse_offsets(const std::string& s) {
    std::vector<std::pair<long long, int>> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw loz::LozError(loz::ErrCode::ShapeMismatch,
                                "offset must look like dx:dn, got " + item);
        out.emplace_back(std::stoll(item.substr(0, colon)),
                         static_cast<int>(std::stoll(item.substr(colon + 1))));
    }
    if (out.empty())
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            "empty offset list " + s);
    return out;
}

// ============================================================
// Subcommand bodies
// ============================================================

int run_sample(RunConfig& cfg) {
    const loz::Signature t = read_signature_file(cfg.signature_path);
    const int N = t.n();
    const loz::SamplerKind kind = parse_sampler(cfg.sampler, N);
    const std::uint64_t sweeps =
        cfg.sweeps ? cfg.sweeps
                   : (kind == loz::SamplerKind::kGlauber
                          ? loz::default_glauber_sweeps(N)
                          : 0);
    cfg.sweeps = sweeps;

    const std::uint64_t M = cfg.samples;
    std::vector<std::string> lines(M);
    const int W = std::max(
        1, std::min(resolve_threads(cfg.threads), static_cast<int>(std::min(
                                                      M, std::uint64_t(256)))));
    std::vector<std::thread> pool;
    for (int w = 0; w < W; ++w)
        pool.emplace_back([&, w] {
            for (std::uint64_t k = static_cast<std::uint64_t>(w); k < M;
                 k += static_cast<std::uint64_t>(W)) {
                const loz::GTPattern p = loz::draw_sample(
                    t, loz::SeededStream{cfg.seed, k}, kind, sweeps);
                json line = {{"seed", cfg.seed},
                             {"stream", k},
                             {"t", t.entries},
                             {"rows", rows_json(p)}};
                lines[k] = line.dump();
            }
        });
    for (auto& th : pool) th.join();

    std::string out = json{{"config", cfg.to_json()}}.dump() + "\n";
    for (const auto& line : lines) out += line + "\n";
    write_artifact(cfg.out, out);
    return 0;
}

int run_count(const RunConfig& cfg) {
    const loz::Signature t = read_signature_file(cfg.signature_path);
    const loz::BigInt dim = loz::gt_dimension(t);
    if (cfg.format == "json") {
        json j = {{"config", cfg.to_json()}, {"dimension", dim.str()}};
        write_artifact(cfg.out, j.dump(2) + "\n");
    } else {
        write_artifact(cfg.out, dim.str() + "\n");
    }
    return 0;
}

int run_kernel(const RunConfig& cfg, const std::string& in_path,
               const std::vector<std::pair<long long, long long>>& points) {
    loz::KernelQuery q;
    if (!in_path.empty()) {
        std::ifstream f(in_path);
        if (!f)
            throw loz::LozError(loz::ErrCode::ShapeMismatch,
                                "cannot open query file " + in_path);
        json j;
        try {
            f >> j;
        } catch (const json::exception& e) {
            throw loz::LozError(loz::ErrCode::ShapeMismatch,
                                std::string("query file is not JSON: ") +
                                    e.what());
        }
        q.t = loz::validate_signature(j.at("t").get<std::vector<long long>>());
        for (const auto& pt : j.at("points"))
            q.points.emplace_back(pt.at(0).get<long long>(),
                                  pt.at(1).get<int>());
    } else {
        q.t = read_signature_file(cfg.signature_path);
        for (const auto& [x, n] : points)
            q.points.emplace_back(x, static_cast<int>(n));
    }
    if (q.points.empty())
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            "kernel needs at least one --point or --in");
    const loz::BigRat value = loz::correlation(q);
    if (cfg.format == "json") {
        json j = {{"config", cfg.to_json()},
                  {"value_num", loz::big_num(value).str()},
                  {"value_den", loz::big_den(value).str()}};
        write_artifact(cfg.out, j.dump(2) + "\n");
    } else {
        write_artifact(cfg.out, format_rational(value) + "\n");
    }
    return 0;
}

int run_slope(const RunConfig& cfg, double x, double eta) {
    const auto mu = read_measure_file(cfg.measure_path);
    const loz::SlopePoint sp = loz::classify_point(mu, x, eta);
    if (cfg.format == "json") {
        json j = {{"config", cfg.to_json()},
                  {"x", x},
                  {"eta", eta},
                  {"status", status_name(sp.status)},
                  {"p_down", sp.densities.p_down},
                  {"p_up", sp.densities.p_up},
                  {"p_hor", sp.densities.p_hor},
                  {"re_xi", sp.xi.real()},
                  {"im_xi", sp.xi.imag()}};
        write_artifact(cfg.out, j.dump(2) + "\n");
    } else {
        char buf[256];
        std::string out = "status " + std::string(status_name(sp.status)) +
                          "\n";
        std::snprintf(buf, sizeof buf,
                      "p_down %.6f\np_up %.6f\np_hor %.6f\n",
                      sp.densities.p_down, sp.densities.p_up,
                      sp.densities.p_hor);
        out += buf;
        if (sp.status == loz::PointStatus::kLiquid) {
            std::snprintf(buf, sizeof buf, "xi %.6f%+.6fi\n", sp.xi.real(),
                          sp.xi.imag());
            out += buf;
        }
        write_artifact(cfg.out, out);
    }
    return 0;
}

int run_limitshape(const RunConfig& cfg, double xmin, double xmax, int nx,
                   double emin, double emax, int neta, bool have_xrange) {
    const auto mu = read_measure_file(cfg.measure_path);
    if (!have_xrange) {
        xmin = mu.support_min() - 1.0;
        xmax = mu.support_max();
    }
    if (nx < 1 || neta < 1 || !(xmax > xmin) || !(emax > emin))
        throw loz::LozError(loz::ErrCode::ShapeMismatch,
                            "bad limit-shape grid");
    std::vector<double> xs, etas;
    for (int i = 0; i < nx; ++i)
        xs.push_back(nx == 1 ? 0.5 * (xmin + xmax)
                             : xmin + i * (xmax - xmin) / (nx - 1));
    for (int j = 0; j < neta; ++j)
        etas.push_back(neta == 1 ? 0.5 * (emin + emax)
                                 : emin + j * (emax - emin) / (neta - 1));
    const loz::SlopeField field = loz::limit_shape(mu, xs, etas);

    if (cfg.format == "svg") {
        write_artifact(cfg.out,
                       svg_with_config(loz::render_slope_field(field), cfg));
        return 0;
    }
    std::string out = csv_config_line(cfg);
    out += "x,eta,status,p_down,p_up,p_hor,re_xi,im_xi\n";
    char buf[256];
    for (std::size_t iy = 0; iy < etas.size(); ++iy)
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            const loz::SlopePoint& sp = field.points[iy][ix];
            std::snprintf(buf, sizeof buf,
                          "%.12g,%.12g,%s,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                          xs[ix], etas[iy], status_name(sp.status),
                          sp.densities.p_down, sp.densities.p_up,
                          sp.densities.p_hor, sp.xi.real(), sp.xi.imag());
            out += buf;
        }
    write_artifact(cfg.out, out);
    return 0;
}

int run_verify_bulk(const RunConfig& cfg, const std::vector<int>& Ns,
                    double x_frac, double eta_frac,
                    const std::vector<std::string>& window_specs) {
    const auto mu = read_measure_file(cfg.measure_path);
    std::vector<loz::WindowSpec> windows;
    std::size_t idx = 0;
    for (const auto& spec : window_specs) {
        loz::WindowSpec w;
        w.id = "w" + std::to_string(idx++);
        w.x_frac = x_frac;
        w.eta_frac = eta_frac;
        w.offsets = parse_offsets(spec);
        windows.push_back(std::move(w));
    }
    const auto reports =
        loz::bulk_report(mu, Ns, windows, cfg.samples, cfg.seed,
                         resolve_threads(cfg.threads));
    double max_z = 0.0;
    for (const auto& rep : reports)
        for (const auto& e : rep.entries)
            if (std::isfinite(e.zscore))
                max_z = std::max(max_z, std::abs(e.zscore));
    std::fprintf(stderr, "gate: max |z| = %.3f (tolerance %g)\n", max_z,
                 cfg.tolerance);
    if (cfg.format == "json") {
        json j = json::parse(loz::report_json(reports));
        json wrapped = {{"config", cfg.to_json()}, {"reports", j}};
        write_artifact(cfg.out, wrapped.dump(2) + "\n");
    } else {
        write_artifact(cfg.out, csv_config_line(cfg) + loz::report_csv(reports));
    }
    return 0;
}

int run_verify_lln(const RunConfig& cfg, const std::vector<int>& Ns, int nx,
                   int neta) {
    const auto mu = read_measure_file(cfg.measure_path);
    const auto reports = loz::lln_report(mu, Ns, cfg.samples, cfg.seed, nx,
                                         neta, resolve_threads(cfg.threads));
    for (const auto& rep : reports)
        std::fprintf(stderr, "N=%d max |dev| = %.4f (tolerance %g)\n", rep.N,
                     rep.max_abs_dev, cfg.tolerance);
    if (cfg.format == "json") {
        json j = json::parse(loz::lln_json(reports));
        json wrapped = {{"config", cfg.to_json()}, {"reports", j}};
        write_artifact(cfg.out, wrapped.dump(2) + "\n");
    } else {
        write_artifact(cfg.out, csv_config_line(cfg) + loz::lln_csv(reports));
    }
    return 0;
}

int run_schur_weyl(const RunConfig& cfg, int N, long long n_letters) {
    if (N < 1)
        throw loz::LozError(loz::ErrCode::ShapeMismatch, "need N >= 1");
    if (n_letters < 0) n_letters = static_cast<long long>(N) * N;
    std::string out;
    if (cfg.format == "json")
        out += json{{"config", cfg.to_json()}}.dump() + "\n";
    else
        out += csv_config_line(cfg);
    for (std::uint64_t k = 0; k < cfg.samples; ++k) {
        const loz::Signature t = loz::sample_schur_weyl(
            N, n_letters, loz::SeededStream{cfg.seed, k});
        if (cfg.format == "json") {
            out += json{{"stream", k}, {"t", t.entries}}.dump() + "\n";
        } else {
            for (int i = 0; i < t.n(); ++i)
                out += (i ? " " : "") + std::to_string(t[i]);
            out += "\n";
        }
    }
    write_artifact(cfg.out, out);
    return 0;
}

int run_render(RunConfig& cfg, const std::string& in_path,
               const std::string& tag, double scale) {
    loz::RenderStyle style;
    if (scale > 0) style.scale = scale;
    loz::GTPattern p;
    int N = 0;
    if (!in_path.empty()) {
        p = read_pattern_file(in_path);
        N = p.n();
    } else {
        const loz::Signature t = read_signature_file(cfg.signature_path);
        N = t.n();
        const loz::SamplerKind kind = parse_sampler(cfg.sampler, N);
        const std::uint64_t sweeps =
            cfg.sweeps ? cfg.sweeps
                       : (kind == loz::SamplerKind::kGlauber
                              ? loz::default_glauber_sweeps(N)
                              : 0);
        cfg.sweeps = sweeps;
        p = loz::draw_sample(t, loz::SeededStream{cfg.seed, 0}, kind, sweeps);
    }
    std::string out_path = cfg.out;
    if (out_path.empty())
        out_path = tag + "_" + std::to_string(N) + "_" +
                   std::to_string(cfg.seed) + ".svg";
    write_artifact(out_path, svg_with_config(loz::render_svg(p, style), cfg));
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uniform lozenge tilings of trapezoids: sampling, exact "
                 "kernels, limit shapes, and Monte-Carlo verification"};
    app.require_subcommand(1);

    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool wants_format,
                          const std::string& default_format) {
        sub->add_option("--seed", cfg.seed, "master seed (u64)");
        sub->add_option("--threads", cfg.threads,
                        "worker threads (default: all cores)");
        sub->add_option("--out", cfg.out, "output path (default: stdout)");
        if (wants_format)
            sub->add_option("--format", cfg.format,
                            "output format: " + default_format);
    };

    // sample
    auto* sample = app.add_subcommand(
        "sample", "draw uniform tilings as a JSONL archive");
    sample->add_option("--signature", cfg.signature_path, "signature file")
        ->required();
    sample->add_option("--samples", cfg.samples, "number of draws");
    sample->add_option("--sampler", cfg.sampler,
                       "auto|exact|cftp|glauber");
    sample->add_option("--sweeps", cfg.sweeps,
                       "glauber sweep budget (default: heuristic)");
    add_common(sample, false, "");

    // count
    auto* count = app.add_subcommand(
        "count", "count tilings with the given fixed top row");
    count->add_option("--signature", cfg.signature_path, "signature file")
        ->required();
    add_common(count, true, "text|json");

    // kernel
    auto* kernel = app.add_subcommand(
        "kernel", "exact correlation of horizontal-lozenge placements");
    std::string kernel_in;
    std::vector<std::pair<long long, long long>> kernel_points;
    kernel->add_option("--signature", cfg.signature_path, "signature file");
    kernel->add_option("--point", kernel_points,
                       "query position x n (repeatable)");
    kernel->add_option("--in", kernel_in,
                       "JSON query file {\"t\": [...], \"points\": [[x,n],...]}");
    add_common(kernel, true, "text|json");

    // slope
    auto* slope = app.add_subcommand(
        "slope", "complex slope and local densities at one scaled point");
    double slope_x = 0.0, slope_eta = 0.5;
    slope->add_option("--measure", cfg.measure_path, "profile JSON file")
        ->required();
    slope->add_option("--x", slope_x, "scaled horizontal coordinate")
        ->required();
    slope->add_option("--eta", slope_eta, "scaled level in (0,1)")->required();
    add_common(slope, true, "text|json");

    // limitshape
    auto* lshape = app.add_subcommand(
        "limitshape", "classify a grid of scaled points (CSV or SVG heat map)");
    double ls_xmin = 0.0, ls_xmax = 0.0, ls_emin = 0.05, ls_emax = 0.95;
    int ls_nx = 25, ls_neta = 13;
    lshape->add_option("--measure", cfg.measure_path, "profile JSON file")
        ->required();
    auto* xmin_opt = lshape->add_option("--xmin", ls_xmin, "grid x lower end");
    lshape->add_option("--xmax", ls_xmax, "grid x upper end");
    lshape->add_option("--emin", ls_emin, "grid eta lower end");
    lshape->add_option("--emax", ls_emax, "grid eta upper end");
    lshape->add_option("--nx", ls_nx, "grid width");
    lshape->add_option("--neta", ls_neta, "grid height");
    add_common(lshape, true, "csv|svg");

    // verify-bulk
    auto* vbulk = app.add_subcommand(
        "verify-bulk", "empirical window frequencies vs bulk predictions");
    std::vector<int> vb_Ns;
    double vb_xfrac = 0.0, vb_efrac = 0.5;
    std::vector<std::string> vb_windows;
    vbulk->add_option("--measure", cfg.measure_path, "profile JSON file")
        ->required();
    vbulk->add_option("--N", vb_Ns, "widths to study (repeatable)");
    vbulk->add_option("--samples", cfg.samples, "samples per width");
    vbulk->add_option("--x-frac", vb_xfrac, "window anchor x as fraction of N");
    vbulk->add_option("--eta-frac", vb_efrac,
                      "window anchor level as fraction of N");
    vbulk->add_option("--window", vb_windows,
                      "offset pattern dx:dn;dx:dn (repeatable)");
    vbulk->add_option("--tolerance", cfg.tolerance, "reported z gate");
    add_common(vbulk, true, "csv|json");

    // verify-lln
    auto* vlln = app.add_subcommand(
        "verify-lln", "empirical density field vs the limit shape");
    std::vector<int> vl_Ns;
    int vl_nx = 8, vl_neta = 6;
    vlln->add_option("--measure", cfg.measure_path, "profile JSON file")
        ->required();
    vlln->add_option("--N", vl_Ns, "widths to study (repeatable)");
    vlln->add_option("--samples", cfg.samples, "samples per width");
    vlln->add_option("--grid-x", vl_nx, "cells along x");
    vlln->add_option("--grid-eta", vl_neta, "cells along eta");
    vlln->add_option("--tolerance", cfg.tolerance, "reported deviation gate");
    add_common(vlln, true, "csv|json");

    // schur-weyl
    auto* sw = app.add_subcommand(
        "schur-weyl", "sample random signatures from words via RSK");
    int sw_N = 0;
    long long sw_n = -1;
    sw->add_option("--N", sw_N, "alphabet size / signature length")
        ->required();
    sw->add_option("--n", sw_n, "word length (default N^2)");
    sw->add_option("--samples", cfg.samples, "number of draws");
    add_common(sw, true, "text|json");

    // render
    auto* render = app.add_subcommand(
        "render", "render a tiling (sampled or from a pattern file) as SVG");
    std::string render_in, render_tag = "tiling";
    double render_scale = 0.0;
    render->add_option("--signature", cfg.signature_path,
                       "signature file (a sample is drawn)");
    render->add_option("--in", render_in, "pattern JSON file");
    render->add_option("--sampler", cfg.sampler, "auto|exact|cftp|glauber");
    render->add_option("--sweeps", cfg.sweeps, "glauber sweep budget");
    render->add_option("--tag", render_tag, "artifact name tag");
    render->add_option("--scale", render_scale, "pixels per lattice unit");
    add_common(render, false, "");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (sample->parsed()) {
            cfg.subcommand = "sample";
            cfg.format = "jsonl";
            cfg.threads = resolve_threads(cfg.threads);
            return run_sample(cfg);
        }
        if (count->parsed()) {
            cfg.subcommand = "count";
            if (cfg.format.empty()) cfg.format = "text";
            return run_count(cfg);
        }
        if (kernel->parsed()) {
            cfg.subcommand = "kernel";
            if (cfg.format.empty()) cfg.format = "text";
            if (kernel_in.empty() && cfg.signature_path.empty())
                throw loz::LozError(loz::ErrCode::ShapeMismatch,
                                    "kernel needs --signature or --in");
            return run_kernel(cfg, kernel_in, kernel_points);
        }
        if (slope->parsed()) {
            cfg.subcommand = "slope";
            if (cfg.format.empty()) cfg.format = "text";
            return run_slope(cfg, slope_x, slope_eta);
        }
        if (lshape->parsed()) {
            cfg.subcommand = "limitshape";
            if (cfg.format.empty()) cfg.format = "csv";
            return run_limitshape(cfg, ls_xmin, ls_xmax, ls_nx, ls_emin,
                                  ls_emax, ls_neta, xmin_opt->count() > 0);
        }
        if (vbulk->parsed()) {
            cfg.subcommand = "verify-bulk";
            if (cfg.format.empty()) cfg.format = "csv";
            if (cfg.samples == 1) cfg.samples = 2000;
            if (vb_Ns.empty()) vb_Ns = {24};
            if (vb_windows.empty()) vb_windows = {"0:0"};
            cfg.threads = resolve_threads(cfg.threads);
            return run_verify_bulk(cfg, vb_Ns, vb_xfrac, vb_efrac, vb_windows);
        }
        if (vlln->parsed()) {
            cfg.subcommand = "verify-lln";
            if (cfg.format.empty()) cfg.format = "csv";
            if (cfg.samples == 1) cfg.samples = 500;
            if (vl_Ns.empty()) vl_Ns = {24};
            cfg.threads = resolve_threads(cfg.threads);
            return run_verify_lln(cfg, vl_Ns, vl_nx, vl_neta);
        }
        if (sw->parsed()) {
            cfg.subcommand = "schur-weyl";
            if (cfg.format.empty()) cfg.format = "text";
            return run_schur_weyl(cfg, sw_N, sw_n);
        }
        if (render->parsed()) {
            cfg.subcommand = "render";
            cfg.format = "svg";
            if (render_in.empty() && cfg.signature_path.empty())
                throw loz::LozError(loz::ErrCode::ShapeMismatch,
                                    "render needs --signature or --in");
            return run_render(cfg, render_in, render_tag, render_scale);
        }
    } catch (const loz::LozError& e) {
        const json err = {{"error", loz::err_name(e.code)},
                          {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return loz::is_budget_error(e.code) ? 4 : 3;
    } catch (const std::exception& e) {
        const json err = {{"error", "internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 3;
    }
    return 2;
}

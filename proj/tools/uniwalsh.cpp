// uniwalsh: build, weight, approximate with and verify universal double Walsh series.
//
// Exit codes: 0 all verified, 2 built but some condition unverified, 3 hard error.

#include "uniwalsh/error.hpp"
#include "uniwalsh/io.hpp"
#include "uniwalsh/universal.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

using namespace uniwalsh;

namespace {

constexpr int kOk = 0;
constexpr int kUnverified = 2;
constexpr int kHardError = 3;

void print_block(const BlockRecord& b) {
    std::printf("block %zu  [%lld, %lld)  nnz=%zu  |E|=%.6f  h=%.6g\n", b.s, static_cast<long long>(b.start),
                static_cast<long long>(b.end), b.P.size(), b.E.measure(), b.h);
    b.report.print(std::cout, "  ");
}

int cmd_build(const RunConfig& cfg) {
    const Catalog cat = generate_catalog(cfg.catalog);
    std::printf("catalog: %zu entries (%zu distinct)\n", cat.entries.size(), cat.distinct);
    BuildOptions opt;
    opt.depth = cfg.depth;
    opt.limits = cfg.limits();
    BuildResult res = build_universal(cat, opt);

    SeriesFile file;
    file.config = cfg;
    file.series = res.series;
    file.blocks = res.blocks;
    file.failure = res.failure;
    file.failure_kind = res.failure_kind;
    save_series(cfg.out, file);

    bool ok = true;
    for (const auto& b : res.blocks) {
        print_block(b);
        ok = ok && b.report.all_passed();
    }
    std::printf("wrote %s (depth %zu of %zu)\n", cfg.out.c_str(), res.blocks.size(), cfg.depth);
    if (res.failure) {
        std::fprintf(stderr, "error: %s: %s\n", res.failure_kind.c_str(), res.failure->c_str());
        if (res.certificate) std::fprintf(stderr, "  %s\n", res.certificate->summary.c_str());
        return kHardError;
    }
    return ok ? kOk : kUnverified;
}

int cmd_weight(const std::string& in, std::optional<double> eps, const std::string& out) {
    SeriesFile file = load_series(in);
    if (eps) file.config.eps = *eps;
    const WeightFunction w = build_weight(file.blocks, file.config.eps);
    const Report rep = weight_check(w);
    std::printf("eps=%g n0=%d depth=%zu |E|=%.6f\n", w.eps, w.n0, w.depth, w.E.measure());
    for (std::size_t n = 1; n <= w.mu.size(); ++n) std::printf("  mu_%zu = %.6g\n", n, w.mu[n - 1]);
    rep.print(std::cout, "  ");
    file.weight = w;
    save_series(out.empty() ? in : out, file);
    return rep.all_passed() ? kOk : kUnverified;
}

int cmd_approx(const std::string& in, const std::string& target, int steps, const std::string& out) {
    const SeriesFile file = load_series(in);
    if (!file.weight) throw Error(in + ": no weight stored; run 'weight' first");
    const Grid2D f = load_target(target);
    const ApproxTrace trace = greedy_subseries(f, file.blocks, *file.weight, steps, file.config.mode);
    if (out.empty()) {
        write_trace_csv(std::cout, trace);
    } else {
        std::ofstream os(out);
        if (!os) throw Error("cannot write " + out);
        write_trace_csv(os, trace);
    }
    if (trace.failure) {
        std::fprintf(stderr, "error: TargetNotApproximable: %s\n", trace.failure->c_str());
        return kHardError;
    }
    return trace.all_verified() ? kOk : kUnverified;
}

int cmd_verify(const std::string& in) {
    const SeriesFile file = load_series(in);
    bool ok = true;
    for (const auto& b : file.blocks) {
        const Report fresh = block_check(b, file.config.mode);
        const bool same = fresh == b.report;
        std::printf("block %zu: %s%s\n", b.s, fresh.all_passed() ? "verified" : "UNVERIFIED",
                    same ? "" : " (stored margins differ)");
        fresh.print(std::cout, "  ");
        if (!fresh.all_passed() || !same) ok = false;
        if (!fresh.all_passed()) std::printf("  failed: %s\n", fresh.failures().c_str());
    }
    if (file.weight) {
        const Report wr = weight_check(*file.weight);
        std::printf("weight:\n");
        wr.print(std::cout, "  ");
        const Report tails = verify_construction(file.series, file.blocks, *file.weight, file.config.mode);
        std::printf("tail estimates:\n");
        tails.print(std::cout, "  ");
        ok = ok && wr.all_passed() && tails.all_passed();
    } else {
        const Report norms = power_norms(file.series);
        norms.print(std::cout, "  ");
        ok = ok && norms.all_passed();
    }
    if (file.failure) {
        std::printf("stored build failure: %s\n", file.failure->c_str());
        ok = false;
    }
    return ok ? kOk : kUnverified;
}

int cmd_info(const std::string& in) {
    const SeriesFile file = load_series(in);
    std::printf("format version %d, mode %s, seed %llu\n", file.version, to_string(file.config.mode),
                static_cast<unsigned long long>(file.config.seed));
    std::printf("depth %zu, nnz %zu\n", file.series.depth(), file.series.nnz());
    std::printf("N_s:");
    for (Freq n : file.series.boundaries()) std::printf(" %lld", static_cast<long long>(n));
    std::printf("\n");
    for (const auto& b : file.blocks)
        std::printf("  block %zu  [%lld, %lld)  nnz=%zu  h=%.6g  %s\n", b.s, static_cast<long long>(b.start),
                    static_cast<long long>(b.end), b.P.size(), b.h, b.report.all_passed() ? "ok" : "FAIL");
    power_norms(file.series).print(std::cout, "  ");
    if (file.weight) std::printf("weight: eps=%g n0=%d\n", file.weight->eps, file.weight->n0);
    if (file.failure) std::printf("build failure: %s\n", file.failure->c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Universal double Walsh series in weighted L1"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string mode = "strict";
    std::string series_path;
    std::optional<double> eps;

    auto* build = app.add_subcommand("build", "Construct blocks and write a series file");
    build->add_option("--depth", cfg.depth, "Number of blocks S")->capture_default_str();
    build->add_option("--epsilon", cfg.eps, "Weight parameter stored for later stages")->capture_default_str();
    build->add_option("--mode", mode, "strict or rect")->capture_default_str();
    build->add_option("--fmax", cfg.fmax, "Per-axis frequency cap")->capture_default_str();
    build->add_option("--grid-rank", cfg.grid_rank, "Working-rank cap for 1-D builds")->capture_default_str();
    build->add_option("--seed", cfg.seed)->capture_default_str();
    build->add_option("--catalog-rank", cfg.catalog.max_rank)->capture_default_str();
    build->add_option("--catalog-repeats", cfg.catalog.repeats)->capture_default_str();
    build->add_option("--out", cfg.out)->capture_default_str();

    std::string out;
    auto* weight = app.add_subcommand("weight", "Build the weight from a series file");
    weight->add_option("series", series_path)->required();
    weight->add_option("--epsilon", eps);
    weight->add_option("--out", out, "Defaults to rewriting the input");

    std::string target;
    int steps = 3;
    auto* approx = app.add_subcommand("approx", "Greedy subseries for a target; CSV trace");
    approx->add_option("series", series_path)->required();
    approx->add_option("--target", target)->required();
    approx->add_option("--steps", steps)->capture_default_str();
    approx->add_option("--out", out, "CSV path, stdout when omitted");

    auto* verify = app.add_subcommand("verify", "Re-check every stored condition");
    verify->add_option("series", series_path)->required();
    auto* info = app.add_subcommand("info", "Summary of a series file");
    info->add_option("series", series_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kHardError;
    }

    try {
        if (*build) {
            cfg.mode = parse_mode(mode);
            cfg.validate();
            return cmd_build(cfg);
        }
        if (*weight) return cmd_weight(series_path, eps, out);
        if (*approx) return cmd_approx(series_path, target, steps, out);
        if (*verify) return cmd_verify(series_path);
        if (*info) return cmd_info(series_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kHardError;
    }
    return kHardError;
}

// Command-line front end: constructs and verifies MUB families, exports
// measurement-network netlists and POVMs, runs protocol simulations, and
// evaluates key rates and rate sweeps. Exit codes: 0 success, 2 validation
// failure, 3 unphysical rate input.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mubqkd/io.hpp"
#include "mubqkd/mub.hpp"
#include "mubqkd/optics.hpp"
#include "mubqkd/protocol.hpp"
#include "mubqkd/security.hpp"

namespace fs = std::filesystem;
using namespace mubqkd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitUnphysical = 3;

fs::path default_out_dir() {
    if (const char* env = std::getenv("MUBQKD_OUT_DIR")) return fs::path(env);
    return fs::current_path();
}

FieldCtx make_ctx(int p, int n) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime (got " + std::to_string(p) + ")");
    return FieldCtx(p, n);
}

void print_field(const FieldCtx& ctx) {
    std::cout << "field: p=" << ctx.characteristic() << " N=" << ctx.degree()
              << " d=" << ctx.order() << " modulus=[";
    const auto& m = ctx.modulus();
    for (size_t i = 0; i < m.size(); ++i) std::cout << (i ? "," : "") << m[i];
    std::cout << "]\n";
}

Topology parse_topology(const std::string& name) {
    if (name == "tree") return Topology::Tree;
    if (name == "tdm") return Topology::TimeDivisionMultiplexed;
    throw std::invalid_argument("unknown topology: " + name);
}

SwitchMode parse_switch(const std::string& name) {
    if (name == "passive") return SwitchMode::Passive;
    if (name == "active") return SwitchMode::ActiveSwitch;
    throw std::invalid_argument("unknown switch mode: " + name);
}

ChannelModel parse_channel(const std::string& spec) {
    const size_t eq = spec.find('=');
    const std::string kind = spec.substr(0, eq);
    const std::string arg = eq == std::string::npos ? "" : spec.substr(eq + 1);
    if (kind == "identity") return ChannelModel::identity();
    if (kind == "depolarizing") return ChannelModel::depolarizing(std::stod(arg));
    if (kind == "correlated") return ChannelModel::correlated_shift(std::stod(arg));
    if (kind == "bell-diagonal") {
        const LambdaMatrix lambda = read_lambda_csv(arg);
        if (!lambda.physical)
            throw UnphysicalLambda("channel weights must be physical", lambda.negative_entries);
        return ChannelModel::bell_diagonal(lambda.lambda);
    }
    throw std::invalid_argument("unknown channel: " + kind);
}

int cmd_gen_mub(int p, int n, const std::string& construction, const std::string& format,
                const fs::path& out_dir) {
    const FieldCtx ctx = make_ctx(p, n);
    print_field(ctx);
    const MubFamily family = build_family(ctx, construction_from_name(construction));
    const MubReport report = verify_mub(family);

    const std::string stem = "mub_p" + std::to_string(p) + "_N" + std::to_string(n) + "_" +
                             construction_name(family.construction);
    fs::create_directories(out_dir);
    write_mub_json(out_dir / (stem + ".json"), family, report);
    if (format == "csv") write_mub_csv(out_dir / (stem + ".csv"), family);

    std::cout << "bases: " << family.bases.size() << "\n"
              << "verification: " << (report.ok ? "ok" : "FAILED")
              << " worst_unbiased=" << report.worst_unbiased_deviation
              << " worst_unitarity=" << report.worst_unitarity_deviation << "\n"
              << "wrote " << (out_dir / (stem + ".json")).string() << "\n";
    return report.ok ? kExitOk : kExitValidation;
}

int cmd_verify_mub(const fs::path& in) {
    const MubFamily family = read_mub_json(in);
    print_field(family.ctx);
    const MubReport report = verify_mub(family);
    std::cout << "verification: " << (report.ok ? "ok" : "FAILED")
              << " worst_unbiased=" << report.worst_unbiased_deviation
              << " worst_unitarity=" << report.worst_unitarity_deviation;
    if (!report.ok)
        std::cout << " worst_pair=(" << report.worst_pair_r << "," << report.worst_pair_s << ")";
    std::cout << "\n";
    return report.ok ? kExitOk : kExitValidation;
}

int cmd_netlist(int p, int n, const std::string& topology, const std::string& switch_mode,
                const fs::path& out_dir, bool with_povm) {
    const FieldCtx ctx = make_ctx(p, n);
    print_field(ctx);
    const NetworkLayout layout = build_layout(ctx, parse_topology(topology), parse_switch(switch_mode));
    validate_disjointness(layout);

    fs::create_directories(out_dir);
    const std::string stem = (with_povm ? "povm_" : "netlist_") + topology + "_" + switch_mode +
                             "_p" + std::to_string(p) + "_N" + std::to_string(n);
    write_netlist_json(out_dir / (stem + ".json"), layout);
    std::cout << "stages: " << layout.stages.size() << " devices: " << layout.device_count
              << " loss_factor: " << layout.loss_factor
              << " loss_db: " << (layout.loss_factor > 0 ? -10.0 * std::log10(layout.loss_factor) : 0.0)
              << "\n";

    if (with_povm) {
        const std::vector<CMatrix> povm = extract_povm(layout);
        write_povm_csv(out_dir / (stem + ".csv"), ctx, povm);
        // completeness check: sum of elements against the scaled identity
        CMatrix sum(ctx.order(), ctx.order());
        for (const CMatrix& e : povm)
            for (int i = 0; i < ctx.order(); ++i)
                for (int j = 0; j < ctx.order(); ++j) sum(i, j) += e(i, j);
        CMatrix target = CMatrix::identity(ctx.order());
        for (int i = 0; i < ctx.order(); ++i) target(i, i) = layout.loss_factor;
        const double dev = max_abs_diff(sum, target);
        std::cout << "povm completeness deviation: " << dev << "\n";
        if (dev > 1e-10) return kExitValidation;
    }
    std::cout << "wrote " << (out_dir / (stem + ".json")).string() << "\n";
    return kExitOk;
}

int cmd_simulate(int p, int n, long long trials, std::uint64_t seed, const std::string& channel_spec,
                 const std::string& backend, const std::string& topology,
                 const std::string& switch_mode, const std::vector<double>& basis_probs,
                 int threads, const fs::path& out_dir) {
    RunConfig config{make_ctx(p, n), trials, seed, basis_probs,
                     backend == "optics" ? MeasurementBackend::OpticsLayout
                                         : MeasurementBackend::IdealPovm,
                     parse_topology(topology), parse_switch(switch_mode), threads};
    if (backend != "optics" && backend != "ideal")
        throw std::invalid_argument("unknown backend: " + backend);
    print_field(config.ctx);
    const ChannelModel channel = parse_channel(channel_spec);

    const TallyMatrix tally = run_protocol(config, channel);
    const ErrorStats stats = stats_from_tally(config.ctx, tally);

    fs::create_directories(out_dir);
    const std::string stem = "simulate_seed" + std::to_string(seed);
    write_tally_csv(out_dir / (stem + "_tally.csv"), config.ctx, tally);
    write_error_stats_json(out_dir / (stem + "_stats.json"), config.ctx, stats);

    std::cout << "trials: " << trials << " detected: " << tally.total() << "\n";
    std::cout << "symbol errors: z=" << stats.symbol_error_z();
    for (int r = 0; r < config.ctx.order(); ++r)
        std::cout << " r" << r << "=" << stats.symbol_error(r);
    std::cout << "\naverage symbol error: " << stats.average_symbol_error() << "\n"
              << "wrote " << (out_dir / (stem + "_tally.csv")).string() << "\n";
    return kExitOk;
}

int cmd_keyrate(std::optional<int> d, std::optional<double> lambda00, std::optional<double> ebar,
                const std::string& stats_path, const std::string& lambda_path,
                const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const fs::path out = out_dir / "keyrate.json";

    if (!stats_path.empty()) {
        const ErrorStatsFile file = read_error_stats_json(stats_path);
        print_field(file.ctx);
        const LambdaMatrix lambda = lambda_from_q(file.ctx, file.stats);
        const RateReport bound =
            key_rate_avg_bound(file.ctx.order(), file.stats.average_symbol_error());
        if (lambda.physical) {
            const RateReport full = key_rate_full(lambda);
            write_rate_report_json(out, full, file.ctx.order());
            std::cout << "mode: full-lambda\nkey_rate: " << full.key_rate
                      << "\nbound_rate: " << bound.key_rate << "\n";
        } else {
            std::cout << "lambda has negative entries:";
            for (const auto& [j, k, v] : lambda.negative_entries)
                std::cout << " (" << j << "," << k << ")=" << v;
            std::cout << "\nfalling back to the average-error bound\n";
            write_rate_report_json(out, bound, file.ctx.order());
            std::cout << "mode: average-error-bound\nkey_rate: " << bound.key_rate << "\n";
        }
        std::cout << "wrote " << out.string() << "\n";
        return kExitOk;
    }
    if (!lambda_path.empty()) {
        const LambdaMatrix lambda = read_lambda_csv(lambda_path);
        const RateReport full = key_rate_full(lambda);  // throws UnphysicalLambda when not
        write_rate_report_json(out, full, lambda.d());
        std::cout << "mode: full-lambda\nkey_rate: " << full.key_rate << "\nwrote "
                  << out.string() << "\n";
        return kExitOk;
    }
    if (!d.has_value()) throw std::invalid_argument("--d is required without an input file");
    RateReport report = lambda00.has_value() ? key_rate_from_lambda00(*d, *lambda00)
                                             : key_rate_avg_bound(*d, ebar.value_or(0.0));
    write_rate_report_json(out, report, *d);
    std::cout << "mode: average-error-bound\nlambda00: " << report.lambda00
              << "\nkey_rate: " << report.key_rate << "\nwrote " << out.string() << "\n";
    return kExitOk;
}

int cmd_sweep(int d, int points, const fs::path& out_dir) {
    if (d < 2) throw std::invalid_argument("--d must be at least 2");
    std::vector<SweepRow> rows;
    rows.reserve(points);
    const double e_max = static_cast<double>(d) / (d + 1);
    for (int i = 0; i < points; ++i) {
        const double e_bar = e_max * i / points;
        rows.push_back({e_bar, correlated_rate_two_basis(d, e_bar),
                        key_rate_avg_bound(d, e_bar).key_rate,
                        correlated_rate_d_plus_1(d, e_bar)});
    }
    fs::create_directories(out_dir);
    const fs::path out = out_dir / ("sweep_d" + std::to_string(d) + ".csv");
    write_sweep_csv(out, d, rows);

    const double t_bound = threshold(d, [&](double e) { return key_rate_avg_bound(d, e).key_rate; });
    const double t_two = threshold(d, [&](double e) { return correlated_rate_two_basis(d, e); });
    std::cout << "bound-rate threshold: " << t_bound << "\n"
              << "two-basis threshold: " << t_two << "\n"
              << "wrote " << out.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"(d+1) mutually unbiased bases toolkit for high-dimensional QKD"};
    app.require_subcommand(1);

    int p = 2, n = 2;
    std::string construction = "wf", format = "json";
    std::string topology = "tdm", switch_mode = "passive";
    fs::path out_dir = default_out_dir();
    std::string in_file;

    auto add_field_opts = [&](CLI::App* cmd) {
        cmd->add_option("--p", p, "field characteristic (prime)");
        cmd->add_option("--N", n, "extension degree");
        cmd->add_option("--out", out_dir, "output directory");
    };

    CLI::App* gen = app.add_subcommand("gen-mub", "construct and verify a MUB family");
    add_field_opts(gen);
    gen->add_option("--construction", construction, "wf|durt");
    gen->add_option("--format", format, "json|csv (csv adds a flat table)");

    CLI::App* verify = app.add_subcommand("verify-mub", "re-verify an exported MUB family");
    verify->add_option("--in", in_file, "MUB JSON file")->required();

    CLI::App* netlist = app.add_subcommand("netlist", "export the measurement network");
    add_field_opts(netlist);
    netlist->add_option("--topology", topology, "tree|tdm");
    netlist->add_option("--switch", switch_mode, "passive|active");

    CLI::App* povm = app.add_subcommand("povm", "export the network POVM");
    add_field_opts(povm);
    povm->add_option("--topology", topology, "tree|tdm");
    povm->add_option("--switch", switch_mode, "passive|active");

    long long trials = 100000;
    std::uint64_t seed = 1;
    std::string channel_spec = "identity";
    std::string backend = "ideal";
    std::vector<double> basis_probs;
    int threads = 1;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo protocol run");
    add_field_opts(simulate);
    simulate->add_option("--trials", trials, "number of trials");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--channel", channel_spec,
                         "identity|depolarizing=s|correlated=e_z|bell-diagonal=FILE");
    simulate->add_option("--backend", backend, "ideal|optics");
    simulate->add_option("--topology", topology, "tree|tdm (optics backend)");
    simulate->add_option("--switch", switch_mode, "passive|active (optics backend)");
    simulate->add_option("--basis-probs", basis_probs, "d+1 selection probabilities");
    simulate->add_option("--threads", threads, "worker threads");

    int rate_d = 0;
    double lambda00 = -1.0, ebar = -1.0;
    std::string stats_path, lambda_path;
    CLI::App* keyrate = app.add_subcommand("keyrate", "asymptotic key rate");
    keyrate->add_option("--d", rate_d, "dimension");
    keyrate->add_option("--lambda00", lambda00, "dominant Bell-diagonal weight");
    keyrate->add_option("--ebar", ebar, "average symbol error over all d+1 bases");
    keyrate->add_option("--stats", stats_path, "error-stats JSON from simulate");
    keyrate->add_option("--lambda", lambda_path, "lambda CSV (j,k,value)");
    keyrate->add_option("--out", out_dir, "output directory");

    int sweep_d = 4, sweep_points = 100;
    CLI::App* sweep = app.add_subcommand("sweep", "rate-vs-error dataset");
    sweep->add_option("--d", sweep_d, "dimension");
    sweep->add_option("--points", sweep_points, "grid points");
    sweep->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (gen->parsed()) return cmd_gen_mub(p, n, construction, format, out_dir);
        if (verify->parsed()) return cmd_verify_mub(in_file);
        if (netlist->parsed()) return cmd_netlist(p, n, topology, switch_mode, out_dir, false);
        if (povm->parsed()) return cmd_netlist(p, n, topology, switch_mode, out_dir, true);
        if (simulate->parsed())
            return cmd_simulate(p, n, trials, seed, channel_spec, backend, topology, switch_mode,
                                basis_probs, threads, out_dir);
        if (keyrate->parsed())
            return cmd_keyrate(rate_d > 0 ? std::optional<int>(rate_d) : std::nullopt,
                               lambda00 >= 0 ? std::optional<double>(lambda00) : std::nullopt,
                               ebar >= 0 ? std::optional<double>(ebar) : std::nullopt, stats_path,
                               lambda_path, out_dir);
        if (sweep->parsed()) return cmd_sweep(sweep_d, sweep_points, out_dir);
    } catch (const UnphysicalLambda& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnphysical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}

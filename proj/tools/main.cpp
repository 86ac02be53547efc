#include "commands.hpp"
#include "config_file.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace bhtlab::cli;

std::filesystem::path out_dir = ".";

void add_common(CLI::App* cmd, std::uint64_t& seed)
{
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = merge_config_file(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }

    CLI::App app{"Numerical experiments on bilinear Fourier multipliers"};
    app.require_subcommand(1);
    app.add_option("--config", "Config file of key = value lines; command-line flags override it");

    VerifyBhtArgs verify;
    auto* v = app.add_subcommand("verify-bht", "Spectral BHT against the principal-value quadrature");
    v->add_option("--cases", verify.cases, "Number of seeded input pairs")->capture_default_str();
    v->add_option("--eta", verify.eta, "Inner cutoff of the principal value")->capture_default_str();
    v->add_option("--tmax", verify.tmax, "Outer cutoff of the principal value")->capture_default_str();
    add_common(v, verify.seed);

    CounterexampleArgs ce;
    auto* c = app.add_subcommand("counterexample", "Random-sign counterexample scaling and verdict");
    c->add_option("--r0", ce.r0, "Exponent of the expectation")->capture_default_str();
    c->add_option("--q0", ce.q0, "Fourier-Lebesgue exponent")->capture_default_str();
    c->add_option("--nlist", ce.nlist, "Comma-separated N values")->delimiter(',')->capture_default_str();
    c->add_option("--trials", ce.trials, "Monte Carlo trials per N")->capture_default_str();
    add_common(c, ce.seed);

    SymbolDecayArgs sd;
    auto* s = app.add_subcommand("symbol-decay", "Fourier coefficient decay of localized symbols");
    s->add_option("--delta", sd.delta, "Exponential decay rate of the symbol (0: sign symbol)")->capture_default_str();
    s->add_option("--nmax", sd.nmax, "Largest cone index")->capture_default_str();
    s->add_option("--out", out_dir, "Output directory")->capture_default_str();

    ModelBoundArgs mb;
    auto* m = app.add_subcommand("model-bound", "Domination and Hölder-ratio checks of the model paraproduct");
    m->add_option("--n", mb.n, "Comma-separated cone indices")->delimiter(',')->capture_default_str();
    m->add_option("--k", mb.k, "Comma-separated slots (default: first, middle, last)")->delimiter(',');
    m->add_option("--p1", mb.p1, "Exponent of the first input")->capture_default_str();
    m->add_option("--p2", mb.p2, "Exponent of the second input")->capture_default_str();
    m->add_option("--ensemble", mb.ensemble, "Random input pairs per collection")->capture_default_str();
    m->add_option("--triples", mb.triples, "Domination triples per cone and role")->capture_default_str();
    add_common(m, mb.seed);

    DumpTilingArgs dt;
    std::vector<double> annulus{dt.annulus.first, dt.annulus.second};
    std::vector<double> window;
    auto* d = app.add_subcommand("dump-tiling", "Whitney cover of one cone, with coverage and partition checks");
    d->add_option("--n", dt.n, "Cone index")->capture_default_str();
    d->add_option("--annulus", annulus, "rmin,rmax")->delimiter(',')->expected(2)->capture_default_str();
    d->add_option("--window", window, "Angular window lo,hi in radians")->delimiter(',')->expected(2);
    d->add_option("--points", dt.points, "Coverage sample points")->capture_default_str();
    add_common(d, dt.seed);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    std::ostream& log = std::cout;
    if (*v) {
        verify.out = out_dir;
        return run_guarded([&] { return verify_bht(verify, log); }, std::cerr);
    }
    if (*c) {
        ce.out = out_dir;
        return run_guarded([&] { return counterexample(ce, log); }, std::cerr);
    }
    if (*s) {
        sd.out = out_dir;
        return run_guarded([&] { return symbol_decay(sd, log); }, std::cerr);
    }
    if (*m) {
        mb.out = out_dir;
        return run_guarded([&] { return model_bound(mb, log); }, std::cerr);
    }
    dt.out = out_dir;
    dt.annulus = {annulus[0], annulus[1]};
    if (!window.empty()) dt.window = std::make_pair(window[0], window[1]);
    return run_guarded([&] { return dump_tiling(dt, log); }, std::cerr);
}

#include "commands.hpp"

#include "bhtlab/coefficients.hpp"
#include "bhtlab/counterexample.hpp"
#include "bhtlab/csv.hpp"
#include "bhtlab/multiplier.hpp"
#include "bhtlab/paraproduct.hpp"
#include "bhtlab/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace bhtlab::cli {

namespace {

void require(bool ok, const char* message)
{
    if (!ok) throw std::invalid_argument(message);
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
}

void add_scaling_rows(CsvTable& table, const ScalingReport& rep)
{
    for (const auto& r : rep.rows) table.add_row({rep.experiment, r.parameter, r.value, r.std_error});
}

bool brackets(const ScalingReport& rep, double target)
{
    return std::abs(rep.slope - target) <= std::max(rep.slope_ci, kExponentTolerance);
}

}  // namespace

int verify_bht(const VerifyBhtArgs& args, std::ostream& log)
{
    require(args.cases >= 1, "--cases must be at least 1");
    PvQuadratureConfig cfg;
    cfg.eta = args.eta;
    cfg.tmax = args.tmax;
    cfg.validate();

    const auto cases = oracle_suite(args.cases, args.seed, cfg);
    CsvTable table({"case_id", "rel_l2_err"});
    double worst = 0.0;
    for (const auto& c : cases) {
        table.add_row({std::int64_t{c.case_id}, c.rel_l2_err});
        worst = std::max(worst, c.rel_l2_err);
    }
    table.write(args.out / "bht_verify.csv");
    const bool pass = worst < kOracleTolerance;
    log << "verify-bht: " << cases.size() << " cases, worst relative L2 error " << format_double(worst)
        << (pass ? " (pass)" : " (FAIL)") << '\n';
    return pass ? kExitPass : kExitFail;
}

int counterexample(const CounterexampleArgs& args, std::ostream& log)
{
    require(args.nlist.size() >= 2, "--nlist needs at least two values");
    require(std::all_of(args.nlist.begin(), args.nlist.end(), [](int n) { return n >= 1; }),
            "--nlist values must be positive");
    require(args.trials >= 1, "--trials must be at least 1");
    require(args.r0 > 0.0 && args.r0 < 2.0, "--r0 must lie in (0, 2)");
    require(args.q0 >= 1.0, "--q0 must be at least 1");

    const int max_n = *std::max_element(args.nlist.begin(), args.nlist.end());
    const BumpPair bumps = make_bump_pair(counterexample_grid(max_n));
    ExpectationOptions opt;
    opt.r0 = args.r0;
    opt.n_list = args.nlist;
    opt.trials = args.trials;
    opt.seed = args.seed;
    const auto expectation = expectation_experiment(bumps, opt);
    const auto fl = fl_norm_experiment(bumps, args.q0, args.nlist, args.seed);
    const Verdict v = contradiction_summary(expectation.report, fl, args.r0, args.q0);

    CsvTable table({"experiment", "N", "value", "stderr"});
    add_scaling_rows(table, expectation.report);
    add_scaling_rows(table, fl);
    table.write(args.out / "scaling.csv");

    const bool bracketed = brackets(expectation.report, v.target_lower) && brackets(fl, 1.0 - 1.0 / args.q0);
    const bool matches = v.verdict == v.predicted;
    std::string text;
    text += "verdict = " + v.verdict + "\n";
    text += "predicted = " + v.predicted + "\n";
    text += "expectation_slope = " + format_double(expectation.report.slope) + "\n";
    text += "expectation_slope_ci = " + format_double(expectation.report.slope_ci) + "\n";
    text += "fl_slope = " + format_double(fl.slope) + "\n";
    text += "fl_slope_ci = " + format_double(fl.slope_ci) + "\n";
    text += "lower_exponent = " + format_double(v.lower) + "\n";
    text += "upper_exponent = " + format_double(v.upper) + "\n";
    text += "target_lower = " + format_double(v.target_lower) + "\n";
    text += "target_upper = " + format_double(v.target_upper) + "\n";
    text += "margin = " + format_double(v.margin) + "\n";
    text += std::string("slopes_bracket_targets = ") + (bracketed ? "yes" : "no") + "\n";
    write_text(args.out / "verdict.txt", text);

    log << "counterexample: verdict \"" << v.verdict << "\", predicted \"" << v.predicted << "\"; expectation slope "
        << format_double(expectation.report.slope) << ", FL slope " << format_double(fl.slope) << '\n';
    return bracketed && matches ? kExitPass : kExitFail;
}

int symbol_decay(const SymbolDecayArgs& args, std::ostream& log)
{
    require(args.delta >= 0.0 && std::isfinite(args.delta), "--delta must be finite and nonnegative");
    require(args.nmax >= 1, "--nmax must be at least 1");
    if (args.nmax > kMaxDecayCone) {
        throw BudgetError("--nmax " + std::to_string(args.nmax) + " exceeds the square budget (largest cone " +
                              std::to_string(kMaxDecayCone) + ")",
                          static_cast<double>(args.nmax));
    }
    const DecayOptions opt;
    const auto rep = coefficient_decay_report(args.delta, args.nmax, opt);

    CsvTable decay({"n", "slot", "maxC", "envelope"});
    for (const auto& r : rep.rows) decay.add_row({std::int64_t{r.n}, r.slot, r.max_coeff, r.envelope});
    decay.write(args.out / "coeff_decay.csv");

    const Symbol m = args.delta > 0.0 ? exp_decay_symbol(args.delta) : sign_symbol();
    const PartitionOfUnity partition(opt.annulus);
    const IndexBox box{opt.index_radius, opt.index_radius, opt.index_radius};
    CsvTable coeffs({"n", "slot", "n1", "n2", "n3", "re", "im"});
    for (const auto& r : rep.rows) {
        const auto square = representative_square(r.n, opt.radius, opt.annulus);
        const LocalizedSymbol mq(m, complete_to_cube(square), partition);
        for (const auto& c : fourier_coefficients(mq, box, opt.nodes)) {
            coeffs.add_row({std::int64_t{r.n}, r.slot, std::int64_t{c.n1}, std::int64_t{c.n2}, std::int64_t{c.n3},
                            c.value.real(), c.value.imag()});
        }
    }
    coeffs.write(args.out / "coefficients.csv");

    if (!rep.exponential_gain) log << "symbol-decay: delta = 0, no exponential gain; envelope is c0 (1 + n^-3)\n";
    double worst = 0.0;
    for (const auto& r : rep.rows) worst = std::max(worst, r.max_coeff / r.envelope);
    log << "symbol-decay: c0 = " << format_double(rep.c0) << ", largest maxC / envelope " << format_double(worst)
        << (rep.envelope_pass ? " (pass)" : " (FAIL)") << '\n';
    return rep.envelope_pass ? kExitPass : kExitFail;
}

int model_bound(const ModelBoundArgs& args, std::ostream& log)
{
    const double p = holder_target(args.p1, args.p2);
    require(!args.n.empty(), "--n needs at least one cone");
    require(std::all_of(args.n.begin(), args.n.end(), [](int n) { return n >= 1; }), "--n values must be positive");
    require(args.ensemble >= 1, "--ensemble must be at least 1");
    require(args.triples >= 1, "--triples must be at least 1");

    CsvTable table({"record", "n", "slot", "window", "tiles", "lhs", "rhs", "ratio", "pass"});
    bool all_dominated = true;
    constexpr double kDominationWindow = 4.0;
    for (std::size_t i = 0; i < args.n.size(); ++i) {
        const int n = args.n[i];
        const std::int64_t k = args.k.empty() ? 1 : args.k.front();
        const auto family = model_family(n, k);
        TileCollection coll = build_tiles(family, {-kDominationWindow, kDominationWindow});
        const Grid grid(required_model_samples(coll, kModelPeriod), kModelPeriod, -0.5 * kModelPeriod);
        if (i == 0) {
            CsvTable tiles({"l", "m", "w1lo", "w1hi", "w2lo", "w2hi", "w3lo", "w3hi"});
            for (const auto& t : coll.tiles) {
                tiles.add_row({std::int64_t{t.l}, t.m, t.omega[0].lo, t.omega[0].hi, t.omega[1].lo, t.omega[1].hi,
                               t.omega[2].lo, t.omega[2].hi});
            }
            tiles.write(args.out / "tiles.csv");
        }
        const auto count = as_int(coll.tiles.size());

        // One tile paired with its own packets: Cauchy-Schwarz holds with equality.
        TileCollection single{coll.cubes, {coll.tiles.front()}, coll.window};
        const PacketBank one(std::move(single), grid);
        const auto d1 = domination_check(one, one.packet(0, 1).samples(), one.packet(0, 2).samples(),
                                         one.packet(0, 3).samples());
        all_dominated = all_dominated && d1.pass;
        table.add_row({std::string("single_tile"), std::int64_t{n}, k, kDominationWindow, std::int64_t{1}, d1.lhs,
                       d1.rhs, d1.lhs / d1.rhs, std::int64_t{d1.pass}});

        const PacketBank bank(std::move(coll), grid);
        for (int swap = 0; swap < 2; ++swap) {
            double worst = 0.0;
            bool pass = true;
            for (int t = 0; t < args.triples; ++t) {
                const auto base = static_cast<std::uint64_t>((i * 2 + swap) * 1000 + t) * 3;
                const auto d = domination_check(bank, random_packet_sum(bank, 1, 2.0, args.seed, base),
                                                random_packet_sum(bank, 2, 2.0, args.seed, base + 1),
                                                random_packet_sum(bank, 3, 2.0, args.seed, base + 2), swap == 1);
                pass = pass && d.pass;
                worst = std::max(worst, d.lhs / d.rhs);
            }
            all_dominated = all_dominated && pass;
            table.add_row({std::string(swap ? "domination_swapped" : "domination"), std::int64_t{n}, k,
                           kDominationWindow, count, 0.0, 0.0, worst, std::int64_t{pass}});
        }
    }

    HolderOptions opt;
    opt.p1 = args.p1;
    opt.p2 = args.p2;
    opt.n_list = args.n;
    opt.slots = args.k;
    opt.ensemble = args.ensemble;
    opt.seed = args.seed;
    const auto rep = empirical_holder_bound(opt);
    for (const auto& r : rep.rows) {
        table.add_row({std::string("holder"), std::int64_t{r.n}, r.slot, r.window, as_int(r.tiles), 0.0, 0.0, r.ratio,
                       std::int64_t{1}});
    }
    const auto within = [&](double s) { return std::abs(s) <= opt.slope_tolerance; };
    table.add_row({std::string("slope_vs_n"), std::int64_t{0}, std::int64_t{0}, 0.0, std::int64_t{0}, 0.0, 0.0,
                   rep.slope_vs_n, std::int64_t{within(rep.slope_vs_n)}});
    table.add_row({std::string("slope_vs_size"), std::int64_t{0}, std::int64_t{0}, 0.0, std::int64_t{0}, 0.0, 0.0,
                   rep.slope_vs_size, std::int64_t{within(rep.slope_vs_size)}});
    table.write(args.out / "model_bound.csv");

    log << "model-bound: p = " << format_double(p) << ", domination " << (all_dominated ? "holds" : "FAILS")
        << ", slope vs n " << format_double(rep.slope_vs_n) << ", slope vs size " << format_double(rep.slope_vs_size)
        << '\n';
    return all_dominated && rep.pass ? kExitPass : kExitFail;
}

int dump_tiling(const DumpTilingArgs& args, std::ostream& log)
{
    require(args.n >= 1, "--n must be at least 1");
    const Annulus annulus{args.annulus.first, args.annulus.second};
    annulus.validate();
    const WhitneyCover cover(args.n, annulus);
    AngularWindow window = cover.window_for_budget(kSquareBudget);
    if (args.window) {
        require(args.window->first < args.window->second, "--window needs lo < hi");
        window = {args.window->first, args.window->second};
    }
    const auto coll = whitney_cover(args.n, annulus, window);

    CsvTable table({"n", "k_scale", "j1", "alpha1", "j2", "alpha2", "slot"});
    for (const auto& q : coll.squares) {
        table.add_row({std::int64_t{coll.cone}, std::int64_t{q.q1.scale}, q.q1.index, q.q1.alpha(), q.q2.index,
                       q.q2.alpha(), q.slot});
    }
    table.write(args.out / "tiling.csv");
    if (coll.squares.empty()) {
        log << "dump-tiling: empty cover for cone " << args.n << " in this annulus and window\n";
        return kExitPass;
    }

    bool slots_ok = true;
    for (const auto& q : coll.squares) {
        slots_ok = slots_ok && q.slot >= 1 && q.slot <= as_int(coll.slots.size()) &&
                   pattern_of(q) == coll.slots[static_cast<std::size_t>(q.slot - 1)];
    }
    const auto cov = coverage_check(args.n, annulus, window, args.points, args.seed);
    log << "dump-tiling: " << coll.squares.size() << " squares in " << coll.slots.size() << " slots, window ["
        << format_double(window.lo) << ", " << format_double(window.hi) << "]; coverage counts [" << cov.min_count
        << ", " << cov.max_count << "], partition error " << format_double(cov.max_partition_error) << '\n';
    return slots_ok && cov.pass ? kExitPass : kExitFail;
}

}  // namespace bhtlab::cli

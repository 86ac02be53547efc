#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bhtlab::cli {

// Exit codes shared by every command.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInput = 2;

struct VerifyBhtArgs {
    int cases = 20;
    std::uint64_t seed = 1;
    double eta = 1e-7;
    double tmax = 10.0;
    std::filesystem::path out = ".";
};

struct CounterexampleArgs {
    double r0 = 0.6;
    double q0 = 1.2;
    std::vector<int> nlist{8, 16, 32, 64, 128};
    int trials = 200;
    std::uint64_t seed = 1;
    std::filesystem::path out = ".";
};

struct SymbolDecayArgs {
    double delta = 1.0;
    int nmax = 64;
    std::filesystem::path out = ".";
};

struct ModelBoundArgs {
    std::vector<int> n{1, 2, 4, 8, 16};
    std::vector<std::int64_t> k;  // empty: first, middle and last slot
    double p1 = 2.0;
    double p2 = 2.0;
    int ensemble = 20;
    int triples = 20;  // domination triples per cone and role assignment
    std::uint64_t seed = 1;
    std::filesystem::path out = ".";
};

struct DumpTilingArgs {
    int n = 1;
    std::pair<double, double> annulus{1.0, 2.0};
    std::optional<std::pair<double, double>> window;  // angles in radians; default fits the square budget
    std::size_t points = 10000;
    std::uint64_t seed = 1;
    std::filesystem::path out = ".";
};

// Each command writes its files under args.out, reports to the stream and returns an exit code.
// Precondition failures surface as exceptions; run_guarded maps them to codes.
int verify_bht(const VerifyBhtArgs& args, std::ostream& log);
int counterexample(const CounterexampleArgs& args, std::ostream& log);
int symbol_decay(const SymbolDecayArgs& args, std::ostream& log);
int model_bound(const ModelBoundArgs& args, std::ostream& log);
int dump_tiling(const DumpTilingArgs& args, std::ostream& log);

// Runs a command body: logic and argument errors give kExitInput, other failures kExitFail.
template <class F>
int run_guarded(F&& body, std::ostream& err)
{
    try {
        return body();
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitFail;
    }
}

}  // namespace bhtlab::cli

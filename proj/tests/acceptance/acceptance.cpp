// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 9 shells out to the CLI named by RELAYCODE_CLI.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "relaycode/coding.hpp"
#include "relaycode/markov.hpp"
#include "relaycode/simulator.hpp"
#include "relaycode/systematic.hpp"

using namespace relaycode;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

SimConfig config_at(unsigned m, double p1, double p2, double p3, RelayPolicy policy,
                    std::uint64_t trials, std::uint64_t seed) {
    SimConfig c;
    c.params = {p1, p2, p3, m};
    c.relay_policy = policy;
    c.trials = trials;
    c.master_seed = seed;
    return c;
}

double mc_fraction(double p1, double p2, double p3, std::uint64_t trials) {
    const SimConfig sys = config_at(8, p1, p2, p3, RelayPolicy::systematic, trials, 2024);
    SimConfig non = sys;
    non.relay_policy = RelayPolicy::non_systematic;
    return measure_uncoded_gap(sys, non) / 8.0;
}

// 1 & 2: exact endpoints of the uncoded-fraction formula plus Monte-Carlo.
void criterion_fraction(int number, double p1, double p2, double p3, double expected) {
    const UncodedGain gain = expected_uncoded_gain({p1, p2, p3, 8});
    const bool exact_ok = std::abs(gain.fraction - expected) <= 1e-15;  // one ulp of the product
    const double mc = mc_fraction(p1, p2, p3, 100000);
    const bool mc_ok = std::abs(mc - expected) <= 0.01;
    std::ostringstream detail;
    detail << "exact=" << gain.fraction << " mc=" << mc;
    report(number, "uncoded fraction = " + std::to_string(expected), exact_ok && mc_ok,
           detail.str());
}

void criterion_degenerate() {
    bool ok = true;
    std::ostringstream detail;
    const double t_n0 = t_non_sys({0, 0.2, 0.2, 8});
    const double t_s0 = t_sys({0, 0.2, 0.2, 8});
    ok &= std::abs(t_n0 - 8.0) <= 1e-9 && std::abs(t_s0 - 8.0) <= 1e-9;
    const double t_n1 = t_non_sys({0.2, 1, 0.2, 8});
    const double t_s1 = t_sys({0.2, 1, 0.2, 8});
    ok &= std::abs(t_n1 - 10.0) <= 1e-9 && std::abs(t_s1 - 10.0) <= 1e-9;
    detail << "p1=0: " << t_n0 << "/" << t_s0 << "; p2=1: " << t_n1 << "/" << t_s1;
    report(3, "degenerate exactness (p1=0 and p2=1)", ok, detail.str());
}

void criterion_oracle_grid() {
    bool ok = true;
    std::ostringstream detail;
    const double fixed = 0.2;
    std::uint64_t seed = 31;
    for (unsigned m : {2u, 8u}) {
        for (int vary = 0; vary < 3; ++vary) {
            for (double v : {0.0, 0.2, 0.5, 0.8}) {
                ChannelParams params{fixed, fixed, fixed, m};
                (vary == 0 ? params.p1 : vary == 1 ? params.p2 : params.p3) = v;
                for (RelayPolicy policy :
                     {RelayPolicy::non_systematic, RelayPolicy::systematic}) {
                    SimConfig c;
                    c.params = params;
                    c.relay_policy = policy;
                    c.trials = 20000;
                    c.master_seed = ++seed;
                    const BatchResult b = run_batch(c);
                    const double exact = policy == RelayPolicy::systematic ? t_sys(params)
                                                                           : t_non_sys(params);
                    const double tol = std::max(3.0 * b.stderr_completion, 1e-9);
                    if (std::abs(b.mean_completion - exact) > tol) {
                        ok = false;
                        detail << " [m=" << m << " vary=p" << vary + 1 << "=" << v
                               << " policy=" << (policy == RelayPolicy::systematic ? "sys" : "non")
                               << " mc=" << b.mean_completion << " exact=" << exact << "]";
                    }
                }
            }
        }
    }
    report(4, "infinite-field Monte-Carlo within 3 SE of the exact chain on the grid", ok,
           detail.str());
}

void criterion_trends() {
    bool ok = true;
    std::ostringstream detail;
    const unsigned m = 8;
    for (int vary = 0; vary < 3; ++vary) {
        double prev_sys = -1, prev_non = -1;
        double gap_at_end = 0;
        for (int step = 0; step <= 20; ++step) {
            const double v = 0.05 * step;
            ChannelParams params{0.2, 0.2, 0.2, m};
            (vary == 0 ? params.p1 : vary == 1 ? params.p2 : params.p3) = v;
            const double tn = t_non_sys(params);
            const double ts = t_sys(params);
            if (ts < tn - 1e-9) {
                ok = false;
                detail << " [t_sys<t_non at p" << vary + 1 << "=" << v << "]";
            }
            if (tn < prev_non - 1e-9 || ts < prev_sys - 1e-9) {
                ok = false;
                detail << " [non-monotone at p" << vary + 1 << "=" << v << "]";
            }
            prev_non = tn;
            prev_sys = ts;
            gap_at_end = ts - tn;
        }
        if ((vary == 1 || vary == 2) && std::abs(gap_at_end) > 1e-8) {
            ok = false;
            detail << " [gap " << gap_at_end << " at p" << vary + 1 << "=1]";
        }
    }
    report(5, "figure-4 trend properties on the analytic sweeps", ok, detail.str());
}

void criterion_finite_field() {
    bool ok = true;
    std::ostringstream detail;
    for (RelayPolicy policy : {RelayPolicy::non_systematic, RelayPolicy::systematic}) {
        SimConfig c = config_at(8, 0.2, 0.2, 0.2, policy, 100000, 77);
        c.field_mode = FieldMode::finite(4);
        const BatchResult b = run_batch(c);
        const double exact = policy == RelayPolicy::systematic ? t_sys(c.params)
                                                               : t_non_sys(c.params);
        const double excess = b.mean_completion - exact;
        detail << (policy == RelayPolicy::systematic ? " sys" : " non") << "_excess=" << excess;
        if (excess > 0.05 * 8 || excess < -3.0 * b.stderr_completion) ok = false;
    }
    report(6, "q=2^4 Monte-Carlo within 0.05*M of the infinite-field analysis", ok, detail.str());
}

void criterion_probability_mass() {
    bool ok = true;
    std::ostringstream detail;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(0, 1);
    for (int point = 0; point < 100 && ok; ++point) {
        const unsigned m = 1 + static_cast<unsigned>(rng() % 16);
        const ChannelParams params{u(rng), u(rng), u(rng), m};
        for (const auto& [s, row] : transition_table(params)) {
            double total = 0;
            for (const auto& [succ, p] : row) total += p;
            if (std::abs(total - 1.0) > 1e-12) {
                ok = false;
                detail << "transition mass " << total << " at m=" << m;
                break;
            }
        }
        double q_total = 0;
        for (const auto& [s, q] : first_stage_distribution(params)) q_total += q;
        if (std::abs(q_total - 1.0) > 1e-12) {
            ok = false;
            detail << "first-stage mass " << q_total << " at m=" << m;
        }
    }
    report(7, "probability mass sums to 1 within 1e-12 over 100 random points", ok, detail.str());
}

void criterion_roundtrip() {
    const GaloisField gf = GaloisField::default_field();
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<unsigned> sym(0, 15);
    bool ok = true;
    int cycles = 0;
    for (std::size_t m : {1u, 4u, 8u}) {
        for (int round = 0; round < 334 && ok; ++round) {
            ++cycles;
            std::vector<std::vector<Symbol>> originals(m, std::vector<Symbol>(2));
            for (auto& p : originals)
                for (auto& s : p) s = static_cast<Symbol>(sym(rng));
            Decoder dec(gf, m, 2);
            // Interleave uncoded and coded arrivals, like the two stages.
            for (std::size_t i = 0; i < m && rng() % 4 != 0; ++i) {
                std::vector<Symbol> e(m, 0);
                e[i] = 1;
                dec.receive(encode(gf, originals, e));
            }
            int guard = 0;
            while (!dec.complete() && ++guard < 10000)
                dec.receive(encode(gf, originals, random_coding_vector(gf, m, rng)));
            ok = dec.complete() && dec.decode() == originals;
        }
    }
    report(8, "codec round-trip over " + std::to_string(cycles) + " randomized cycles", ok);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void criterion_determinism() {
    const char* cli = std::getenv("RELAYCODE_CLI");
    if (!cli) {
        report(9, "sweep determinism", false, "RELAYCODE_CLI not set");
        return;
    }
    const std::string flags =
        " sweep --vary p1 --from 0 --to 1 --step 0.25 --packets 4 --p2 0.2 --p3 0.2"
        " --trials 500 --seed 42 --field inf --out ";
    const std::string a = "acceptance_sweep_a.csv", b = "acceptance_sweep_b.csv";
    int rc = std::system((std::string(cli) + flags + a).c_str());
    rc |= std::system((std::string(cli) + flags + b).c_str());
    const std::string ca = read_file(a), cb = read_file(b);
    std::remove(a.c_str());
    std::remove(b.c_str());
    const bool ok = rc == 0 && !ca.empty() && ca == cb;
    report(9, "two identical sweep invocations produce byte-identical CSV", ok);
}

}  // namespace

int main() {
    criterion_fraction(1, 1.0, 0.2, 0.2, 0.64);
    criterion_fraction(2, 0.2, 0.0, 0.2, 0.16);
    criterion_degenerate();
    criterion_oracle_grid();
    criterion_trends();
    criterion_finite_field();
    criterion_probability_mass();
    criterion_roundtrip();
    criterion_determinism();
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}

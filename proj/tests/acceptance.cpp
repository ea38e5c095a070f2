// Acceptance suite: each criterion prints one [PASS]/[FAIL] line; the
// process exits with the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "crowd/aggregation.hpp"
#include "crowd/analysis.hpp"
#include "crowd/cliapp.hpp"
#include "crowd/inference.hpp"
#include "crowd/policy.hpp"
#include "crowd/sim.hpp"
#include "support/oracles.hpp"

using namespace crowd;

namespace {

struct Criterion {
    int id;
    std::string name;
    std::function<bool(std::string&)> run;
};

bool expect(bool ok, std::string& detail, const std::string& message) {
    if (!ok && detail.empty()) detail = message;
    return ok;
}

int hw_jobs() {
    return static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));
}

// ---------------------------------------------------------------- 1 ----

bool criterion_equivalence(std::string& detail) {
    bool ok = true;
    Rng rng(101);
    int tested = 0;
    for (int t = 0; t < 10000; ++t) {
        const int n = 2 + static_cast<int>(rng.below(15));
        std::vector<double> logodds(n);
        for (double& z : logodds) z = -6.0 + 12.0 * rng.uniform01();
        double p = 0.02 + 0.96 * rng.uniform01();
        if (std::abs(p - 0.5) < 1e-3) p = 0.55;
        std::vector<int> eligible(n);
        for (int i = 0; i < n; ++i) eligible[i] = i;
        const int by_z = select_uncertainty(logodds, eligible);
        bool unique = true;
        for (int i = 0; i < n; ++i) {
            if (i != by_z &&
                std::abs(std::abs(logodds[i]) - std::abs(logodds[by_z])) < 1e-12) {
                unique = false;
            }
        }
        if (!unique) continue;
        ++tested;
        ok &= expect(select_greedy_ig(logodds, p, eligible) == by_z, detail,
                     "greedy argmax disagreed with |z| argmin on a unique-argmin instance");
    }
    ok &= expect(tested > 9000, detail, "not enough unique-argmin instances generated");

    ExperimentConfig cfg;
    cfg.num_tasks = 50;
    cfg.budget = 500;
    cfg.labels_per_worker = 1;
    cfg.population = SkillDistribution::beta(4.0, 2.0);
    cfg.mode = OracleMode{};
    cfg.replications = 2;
    cfg.seed = 1001;
    for (int rep = 0; rep < 5; ++rep) {
        cfg.policy = PolicyKind::Uncertainty;
        const RunResult a = run_once(cfg, rep);
        cfg.policy = PolicyKind::GreedyInfoGain;
        const RunResult b = run_once(cfg, rep);
        ok &= expect(a == b, detail,
                     "oracle-mode runs diverged between uncertainty and greedy gain");
    }
    return ok;
}

// ---------------------------------------------------------------- 2 ----

bool criterion_symmetry(std::string& detail) {
    bool ok = true;
    for (int pi = 0; pi < 9; ++pi) {
        const double p = 0.55 + 0.05 * pi;
        const double peak = expected_info_gain(0.0, p);
        for (int i = 0; i <= 2000; ++i) {
            const double z = -10.0 + 0.01 * i;
            const double gap = std::abs(expected_info_gain(z, p) - expected_info_gain(-z, p));
            ok &= expect(gap < 1e-12, detail, "information gain asymmetry above 1e-12");
            if (z != 0.0) {
                ok &= expect(peak > expected_info_gain(z, p), detail,
                             "information gain not strictly maximal at z=0");
            }
        }
    }
    return ok;
}

// ---------------------------------------------------------------- 3 ----

bool criterion_closed_forms(std::string& detail) {
    bool ok = true;
    for (int pi = 0; pi < 9; ++pi) {
        const double p = 0.55 + 0.05 * pi;
        for (int r : {1, 3, 5, 7, 9, 11}) {
            const double lib = homogeneous_uniform_accuracy(p, r);
            const double ref = oracle::enumerate_majority_accuracy(p, r);
            ok &= expect(std::abs(lib - ref) <= 1e-12, detail,
                         "closed-form accuracy differs from exhaustive enumeration");
        }
        for (int levels = 1; levels <= 6; ++levels) {
            const double z_b = levels * logit(p);
            const double lib = homogeneous_expected_steps(p, z_b);
            const double ref = oracle::lattice_expected_steps(p, levels);
            ok &= expect(std::abs(lib - ref) <= 1e-9, detail,
                         "closed-form expected steps differ from the linear-system oracle");
        }
    }
    return ok;
}

// ---------------------------------------------------------------- 4 ----

bool criterion_theory_vs_mc(std::string& detail) {
    bool ok = true;
    const int n_walks = 100000;
    int seed = 4001;
    for (const bool dirac : {true, false}) {
        const SkillDistribution pop =
            dirac ? SkillDistribution::dirac(0.8) : SkillDistribution::beta(4.0, 2.0);
        const Density fv = make_vote_density(pop);
        for (const double target : {3.0, 11.0}) {
            const CalibrationResult cal = calibrate(fv, target);
            const WalkReport walk = bounded_walk(fv, cal.z_threshold);
            Rng rng(seed++);
            const auto mc = oracle::mc_bounded_walk(pop, cal.z_threshold, n_walks, rng);
            ok &= expect(std::abs(walk.expected_steps - mc.steps.mean) < 3.0 * mc.steps.se,
                         detail, "bounded-walk expected steps outside 3 SE of Monte Carlo");
            ok &= expect(std::abs(walk.exit_accuracy - mc.up_exit.mean) < 3.0 * mc.up_exit.se,
                         detail, "bounded-walk exit accuracy outside 3 SE of Monte Carlo");

            const int r = static_cast<int>(target);
            const double acc = unbounded_accuracy(fv, r);
            const auto mcu = oracle::mc_unbounded_accuracy(pop, r, n_walks, rng);
            ok &= expect(std::abs(acc - mcu.mean) < 3.0 * mcu.se, detail,
                         "unbounded accuracy outside 3 SE of Monte Carlo");
        }
    }
    return ok;
}

// ---------------------------------------------------------------- 5 ----

bool criterion_active_beats_uniform(std::string& detail) {
    bool ok = true;
    for (int pi = 0; pi < 9; ++pi) {
        const double p = 0.55 + 0.05 * pi;
        const Density fv = make_vote_density(SkillDistribution::dirac(p));
        for (int r = 3; r <= 15; r += 2) {
            const CalibrationResult cal = calibrate(fv, r);
            const double active = bounded_walk(fv, cal.z_threshold).exit_accuracy;
            const double uniform = homogeneous_uniform_accuracy(p, r);
            ok &= expect(active >= uniform, detail,
                         "calibrated active accuracy fell below uniform accuracy at p=" +
                             std::to_string(p) + ", r_u=" + std::to_string(r));
        }
    }
    return ok;
}

// ---------------------------------------------------------------- 6 ----

bool criterion_bounds(std::string& detail) {
    bool ok = true;

    // homogeneous: ruin bound dominates the exact expectation
    {
        const Density fv = make_vote_density(SkillDistribution::dirac(0.8));
        const MomentSummary m = moments(fv);
        const RhoRoot rho = rho_root(fv);
        for (int k = 1; k <= 6; ++k) {
            const double z_b = k * std::log(4.0);
            const double bound = gambler_ruin_bound(m, rho.numeric, z_b);
            ok &= expect(bound >= homogeneous_expected_steps(0.8, z_b), detail,
                         "ruin bound fell below the homogeneous closed form");
        }
        for (int r = 1; r <= 15; r += 2) {
            ok &= expect(1.0 - chernoff_bound(m, r) <= homogeneous_uniform_accuracy(0.8, r),
                         detail, "concentration bound exceeded the exact accuracy (dirac)");
        }
    }

    // heterogeneous: dominance everywhere, tightness in the drift regime
    {
        const Density fv = make_vote_density(SkillDistribution::beta(4.0, 2.0));
        const MomentSummary m = moments(fv);
        const RhoRoot rho = rho_root(fv);
        const double ratio_floor = m.gamma / m.mean;
        for (int r = 2; r <= 20; ++r) {
            ok &= expect(1.0 - chernoff_bound(m, r) <= unbounded_accuracy(fv, r), detail,
                         "concentration bound exceeded the exact accuracy (beta)");
            if (r > ratio_floor) {
                const CalibrationResult cal = calibrate(fv, r);
                const double exact = bounded_walk(fv, cal.z_threshold).expected_steps;
                const double bound = gambler_ruin_bound(m, rho.numeric, cal.z_threshold);
                ok &= expect(bound >= exact, detail,
                             "ruin bound fell below the bounded-walk expectation");
                ok &= expect(bound <= 2.0 * exact, detail,
                             "ruin bound looser than 2x in the drift regime");
            }
        }
    }
    return ok;
}

// ---------------------------------------------------------------- 7 ----

bool criterion_mean_field(std::string& detail) {
    bool ok = true;
    const Prior prior(4.0, 2.0);

    // label-flip symmetry at every iteration on 100 random stores
    Rng rng(7001);
    for (int trial = 0; trial < 100; ++trial) {
        const LabelStore store = oracle::random_store(6, 5, 0.5, rng);
        std::vector<MeanFieldState> ta, tb;
        fit(store, prior, 1e-14, 8, std::nullopt,
            [&](int, const MeanFieldState& s) { ta.push_back(s); });
        fit(store.flipped(), prior, 1e-14, 8, std::nullopt,
            [&](int, const MeanFieldState& s) { tb.push_back(s); });
        for (std::size_t k = 0; k < ta.size(); ++k) {
            for (std::size_t i = 0; i < ta[k].posteriors.size(); ++i) {
                ok &= expect(std::abs(ta[k].posteriors[i] + tb[k].posteriors[i] - 1.0) < 1e-12,
                             detail, "label-flip posterior symmetry broke");
            }
            for (std::size_t j = 0; j < ta[k].skills.size(); ++j) {
                ok &= expect(std::abs(ta[k].skills[j] - tb[k].skills[j]) < 1e-12, detail,
                             "label-flip skill invariance broke");
            }
        }
    }

    // the hand-iterated 2x2 instance
    {
        LabelStore store;
        store.insert(0, 0, Label::plus());
        store.insert(0, 1, Label::plus());
        store.insert(1, 0, Label::plus());
        store.insert(1, 1, Label::minus());
        std::vector<std::vector<double>> mu;
        std::vector<std::vector<double>> sk;
        fit(store, prior, 1e-12, 2, std::nullopt, [&](int, const MeanFieldState& s) {
            mu.push_back(s.posteriors);
            sk.push_back(s.skills);
        });
        ok &= expect(std::abs(mu[0][0] - 4.0 / 5.0) < 1e-9, detail, "toy iteration 1 mu0");
        ok &= expect(std::abs(mu[0][1] - 0.5) < 1e-9, detail, "toy iteration 1 mu1");
        ok &= expect(std::abs(sk[0][0] - 53.0 / 80.0) < 1e-9, detail, "toy iteration 1 skill");
        ok &= expect(std::abs(mu[1][0] - 2809.0 / 3538.0) < 1e-9, detail, "toy iteration 2 mu0");
        ok &= expect(std::abs(mu[1][1] - 0.5) < 1e-9, detail, "toy iteration 2 mu1");
        ok &= expect(std::abs(sk[1][0] - 9365.0 / 14152.0) < 1e-9, detail,
                     "toy iteration 2 skill");
    }

    // online replay equivalence on 100 random arrival sequences
    Rng rng2(7002);
    for (int trial = 0; trial < 100; ++trial) {
        const int tasks = 2 + static_cast<int>(rng2.below(6));
        const int workers = 2 + static_cast<int>(rng2.below(6));
        MeanFieldState state;
        state.posteriors.assign(tasks, 0.5);
        LabelStore store;
        for (int j = 0; j < workers; ++j) {
            for (int i = 0; i < tasks; ++i) {
                if (!rng2.bernoulli(0.6)) continue;
                store.insert(i, j, rng2.coin_sign() > 0 ? Label::plus() : Label::minus());
                const LabelRecord& rec = store.records().back();
                if (rec.worker >= static_cast<int>(state.skills.size())) {
                    state.skills.resize(rec.worker + 1, prior.mean());
                }
                const std::vector<double> skills_at_arrival = state.skills;
                online_update(state, store, rec, prior);
                ok &= expect(std::abs(state.posteriors[rec.task] -
                                      e_step_task(store, skills_at_arrival, rec.task)) < 1e-12,
                             detail, "online posterior inconsistent with the restricted E step");
                ok &= expect(std::abs(state.skills[rec.worker] -
                                      m_step_worker(store, state.posteriors, prior,
                                                    rec.worker)) < 1e-12,
                             detail, "online skill inconsistent with the restricted M step");
            }
        }
        const std::vector<double> direct = e_step(store, state.skills);
        std::vector<std::vector<double>> first;
        fit(store, prior, 1e-12, 1, state.skills,
            [&](int, const MeanFieldState& s) { first.push_back(s.posteriors); });
        for (std::size_t i = 0; i < direct.size(); ++i) {
            ok &= expect(std::abs(first[0][i] - direct[i]) < 1e-9, detail,
                         "replayed state disagreed with a warm-started fit iteration");
        }
    }
    return ok;
}

// ---------------------------------------------------------------- 8 ----

struct GapStats {
    double gap;
    double se;
};

GapStats policy_gap(ExperimentConfig cfg, int jobs) {
    cfg.policy = PolicyKind::Uncertainty;
    const ReplicationStats active = run_experiment(cfg, jobs);
    cfg.policy = PolicyKind::Uniform;
    const ReplicationStats uniform = run_experiment(cfg, jobs);
    return GapStats{active.mean_accuracy - uniform.mean_accuracy,
                    std::sqrt(active.standard_error * active.standard_error +
                              uniform.standard_error * uniform.standard_error)};
}

bool criterion_realistic_runs(std::string& detail) {
    bool ok = true;
    const int jobs = hw_jobs();

    ExperimentConfig desk;
    desk.num_tasks = 200;
    desk.budget = 2000;  // B/M = 10
    desk.labels_per_worker = 10;
    desk.population = SkillDistribution::beta(4.0, 2.0);
    desk.mode = InferenceMode{4.0, 2.0};
    desk.replications = 100;
    desk.seed = 8001;

    // (a) the budget figure's gap at B/M = 10
    const GapStats gap10 = policy_gap(desk, jobs);
    ok &= expect(gap10.gap > 2.0 * gap10.se, detail,
                 "active-minus-uniform gap at B/M=10 is not 2 combined SE above zero (gap=" +
                     std::to_string(gap10.gap) + ", se=" + std::to_string(gap10.se) + ")");

    // (b) the task-count figure: the gap is flat across M
    std::vector<GapStats> gaps;
    for (int m : {20, 100, 500}) {
        ExperimentConfig cfg = desk;
        cfg.num_tasks = m;
        cfg.budget = 10L * m;
        gaps.push_back(policy_gap(cfg, jobs));
    }
    for (std::size_t a = 0; a < gaps.size(); ++a) {
        for (std::size_t b = a + 1; b < gaps.size(); ++b) {
            const double spread = std::abs(gaps[a].gap - gaps[b].gap);
            const double se = std::sqrt(gaps[a].se * gaps[a].se + gaps[b].se * gaps[b].se);
            ok &= expect(spread < 3.0 * se, detail,
                         "policy gap varies across task counts by 3 combined SE (gaps " +
                             std::to_string(gaps[a].gap) + " vs " + std::to_string(gaps[b].gap) +
                             ", combined se " + std::to_string(se) + ")");
        }
    }

    // (c) the productivity figure: more labels per worker helps the
    // active policy
    auto active_at = [&](int per_worker) {
        ExperimentConfig cfg = desk;
        cfg.labels_per_worker = per_worker;
        cfg.policy = PolicyKind::Uncertainty;
        return run_experiment(cfg, jobs);
    };
    const ReplicationStats lo = active_at(2);
    const ReplicationStats hi = active_at(20);
    const double se = std::sqrt(lo.standard_error * lo.standard_error +
                                hi.standard_error * hi.standard_error);
    ok &= expect(hi.mean_accuracy - lo.mean_accuracy > 2.0 * se, detail,
                 "accuracy at 20 labels/worker did not exceed 2 labels/worker by 2 SE");
    return ok;
}

// ---------------------------------------------------------------- 9 ----

bool criterion_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    bool ok = true;
    const fs::path dir = fs::temp_directory_path() / "crowdalloc_acceptance";
    fs::create_directories(dir);

    const char* config = R"({
      "experiment_id": "determinism",
      "seed": 90,
      "population": {"type": "beta", "alpha": 4, "beta": 2},
      "analyze": {"r_u": [2, 5], "grid": {"half_width": 12, "step": 0.01}},
      "calibrate": {"r_u": [2, 5], "grid": {"half_width": 12, "step": 0.01}},
      "simulate": {"mode": "inference", "prior": {"alpha": 4, "beta": 2},
                    "tasks": 50, "budget_ratio": 6, "labels_per_worker": 5,
                    "replications": 20,
                    "sweep": {"axis": "budget_ratio", "points": [3, 6]}}
    })";
    const fs::path cfg_path = dir / "config.json";
    {
        std::ofstream f(cfg_path, std::ios::trunc);
        f << config;
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    for (const std::string sub : {"analyze", "simulate", "calibrate"}) {
        const fs::path out_a = dir / (sub + "_a.csv");
        const fs::path out_b = dir / (sub + "_b.csv");
        std::ostringstream sink_out, sink_err;
        const int code_a = run_cli({sub, "--config", cfg_path.string(), "--out", out_a.string(),
                                    "--quiet", "--jobs", "1"},
                                   sink_out, sink_err);
        const int code_b = run_cli({sub, "--config", cfg_path.string(), "--out", out_b.string(),
                                    "--quiet", "--jobs", "4"},
                                   sink_out, sink_err);
        ok &= expect(code_a == 0 && code_b == 0, detail, sub + " invocation failed");
        const std::string a = slurp(out_a);
        ok &= expect(!a.empty() && a == slurp(out_b), detail,
                     sub + " output not byte-identical across repeated invocations");
    }
    return ok;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "equivalence of the two active policies", criterion_equivalence},
        {2, "expected information gain symmetric with peak at z=0", criterion_symmetry},
        {3, "homogeneous closed forms against independent oracles", criterion_closed_forms},
        {4, "walk computations within 3 SE of Monte Carlo", criterion_theory_vs_mc},
        {5, "calibrated active accuracy dominates uniform (homogeneous)",
         criterion_active_beats_uniform},
        {6, "ruin and concentration bounds dominate and stay tight", criterion_bounds},
        {7, "mean-field symmetry, toy iteration, online replay", criterion_mean_field},
        {8, "realistic-scenario reproduction at desk scale", criterion_realistic_runs},
        {9, "byte-identical CLI output for identical config and seed", criterion_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    return failures;
}

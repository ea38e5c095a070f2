#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "crowd/domain.hpp"

namespace crowd {

struct GridSpec {
    double half_width = 12.0;  // grid covers [-half_width, +half_width]
    double step = 0.005;
};

// Probability density discretized on a uniform grid symmetric about 0.
// Node i sits at z = (i - center)*step; node mass is step * values[i].
class GridPdf {
public:
    GridPdf(double half_width, double step);

    double hi() const { return hi_; }
    double h() const { return h_; }
    int size() const { return static_cast<int>(values_.size()); }
    int center() const { return (size() - 1) / 2; }
    double z_at(int i) const { return (i - center()) * h_; }
    int mirror(int i) const { return size() - 1 - i; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double mass() const;

    double truncated_mass = 0.0;  // probability the grid could not carry

private:
    double hi_;
    double h_;
    std::vector<double> values_;
};

// Purely atomic density: sorted (position, mass) pairs. Exact carrier for
// Dirac and empirical populations, where binning atoms onto a grid would
// smear the walk.
struct AtomPdf {
    std::vector<std::pair<double, double>> atoms;

    double mass() const;
    void sort_and_merge();
    // Common magnitude when every atom sits at +/-w for a single w
    // (an atom at 0 is allowed alongside); negative when mixed.
    double single_magnitude() const;
};

using Density = std::variant<GridPdf, AtomPdf>;

struct MomentSummary {
    double mean;
    double variance;
    double gamma;  // assumed support bound of the increments
};

struct WalkOptions {
    double tol = 1e-6;     // stop once surviving interior mass drops below
    int max_steps = 20000;
    bool spectral = true;  // FFT convolution; direct summation otherwise
};

struct WalkReport {
    double expected_steps;
    double exit_accuracy;   // probability of absorbing at +z_B given l* = +1
    double residual_mass;   // interior mass left when the series was cut
    int steps_computed;
    bool converged;
};

struct CalibrationResult {
    double z_threshold;
    double achieved_steps;  // calibration objective evaluated at z_threshold
    double residual;        // |achieved - target|
};

struct RhoRoot {
    double numeric;  // root of E(rho^X) = 1 with rho != 1
    double approx;   // 2*mean/variance, reported for comparison
};

// Density of vote weights w = log(p/(1-p)) induced by the skill law:
// f_W(z) = sigmoid(z)*sigmoid(-z)*f_P(sigmoid(z)). Dirac and empirical
// populations produce exact atoms; Beta populations a grid.
Density weight_density(const SkillDistribution& pop, const GridSpec& spec = {});

// Density of signed increments given a true label of +1:
// f_V(z) = sigmoid(z) * (f_W(z) + f_W(-z)).
Density vote_density(const Density& weights);

// weight_density + vote_density in one call.
Density make_vote_density(const SkillDistribution& pop, const GridSpec& spec = {});

MomentSummary moments(const Density& f, double gamma_multiplier = 5.0);

// Iterated restrict-and-convolve computation of the absorbed walk:
// starting from f_V, mass outside (-z_B, z_B) exits at each step and the
// interior is convolved with f_V again. Expected steps carry a drift-based
// tail correction for the truncated series.
WalkReport bounded_walk(const Density& f_v, double z_threshold,
                        const WalkOptions& options = {});

// P(correct) for a fixed number of votes: mass of the steps-fold
// self-convolution of f_V above 0, counting mass at exactly 0 as half.
double unbounded_accuracy(const Density& f_v, int steps);

// Finds z_B with expected bounded-walk length equal to target_steps, by
// bisection of a monotone objective: the iterated walk for grids, the
// homogeneous closed form for single-magnitude atoms.
CalibrationResult calibrate(const Density& f_v, double target_steps,
                            const WalkOptions& options = {});

// Closed-form expected absorption time for a crowd of identical skill p.
double homogeneous_expected_steps(double p, double z_threshold);

// Closed-form majority-vote accuracy for an odd number of votes.
double homogeneous_uniform_accuracy(double p, int votes);

RhoRoot rho_root(const Density& f_v);

// Upper bound on expected absorption time from the ruin root rho0.
double gambler_ruin_bound(const MomentSummary& m, double rho0, double z_threshold);

// Upper bound on the misclassification probability of `steps` aggregated
// votes; 1 - chernoff_bound lower-bounds the accuracy.
double chernoff_bound(const MomentSummary& m, double steps);

// Convolution of equal-step grids, both routes. The two must agree to
// 1e-9; the walk uses the spectral route by default.
GridPdf convolve_direct(const GridPdf& a, const GridPdf& b);
GridPdf convolve_spectral(const GridPdf& a, const GridPdf& b);

// Nearest-node binning of atoms, for pushing atomic densities through
// grid-only pipelines.
GridPdf to_grid(const AtomPdf& a, const GridSpec& spec = {});

}  // namespace crowd

#include "crowd/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>

namespace crowd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

int next_pow2(int n) {
    int L = 1;
    while (L < n) L <<= 1;
    return L;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

// Linear convolution against a fixed kernel via zero-padded FFTs. The
// kernel spectrum is computed once, so repeated calls (one per walk step)
// cost two transforms each.
class SpectralConvolver {
public:
    SpectralConvolver(const std::vector<double>& kernel, int full_len)
        : L_(next_pow2(full_len)), nc_(L_ / 2 + 1) {
        real_.reset(fftw_alloc_real(L_));
        spec_.reset(fftw_alloc_complex(nc_));
        kernel_spec_.reset(fftw_alloc_complex(nc_));
        {
            std::lock_guard<std::mutex> lock(fftw_plan_mutex());
            fwd_ = fftw_plan_dft_r2c_1d(L_, real_.get(), spec_.get(), FFTW_ESTIMATE);
            inv_ = fftw_plan_dft_c2r_1d(L_, spec_.get(), real_.get(), FFTW_ESTIMATE);
        }
        load(kernel);
        fftw_execute(fwd_);
        std::copy_n(reinterpret_cast<const double*>(spec_.get()), 2 * nc_,
                    reinterpret_cast<double*>(kernel_spec_.get()));
    }

    ~SpectralConvolver() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }

    SpectralConvolver(const SpectralConvolver&) = delete;
    SpectralConvolver& operator=(const SpectralConvolver&) = delete;

    // result[0..out_len) = discrete linear convolution of `in` with the kernel.
    void convolve(const std::vector<double>& in, std::vector<double>& result, int out_len) {
        load(in);
        fftw_execute(fwd_);
        for (int k = 0; k < nc_; ++k) {
            const double a = spec_.get()[k][0];
            const double b = spec_.get()[k][1];
            const double c = kernel_spec_.get()[k][0];
            const double d = kernel_spec_.get()[k][1];
            spec_.get()[k][0] = a * c - b * d;
            spec_.get()[k][1] = a * d + b * c;
        }
        fftw_execute(inv_);
        result.resize(out_len);
        const double scale = 1.0 / L_;
        for (int k = 0; k < out_len; ++k) {
            result[k] = real_.get()[k] * scale;
        }
    }

    int length() const { return L_; }

    // Raw access used by the self-convolution power path.
    fftw_complex* spectrum() { return spec_.get(); }
    double* buffer() { return real_.get(); }
    void forward() { fftw_execute(fwd_); }
    void inverse() { fftw_execute(inv_); }
    void load(const std::vector<double>& v) {
        std::copy(v.begin(), v.end(), real_.get());
        std::fill(real_.get() + v.size(), real_.get() + L_, 0.0);
    }

private:
    int L_;
    int nc_;
    std::unique_ptr<double, FftwFree> real_;
    std::unique_ptr<fftw_complex, FftwFree> spec_;
    std::unique_ptr<fftw_complex, FftwFree> kernel_spec_;
    fftw_plan fwd_ = nullptr;
    fftw_plan inv_ = nullptr;
};

double lbeta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

GridPdf::GridPdf(double half_width, double step) {
    if (!(half_width > 0.0) || !(step > 0.0) || !(step < half_width)) {
        throw ConfigError("grid requires 0 < step < half_width");
    }
    const long half_n = std::lround(half_width / step);
    h_ = step;
    hi_ = static_cast<double>(half_n) * step;
    values_.assign(2 * half_n + 1, 0.0);
}

double GridPdf::mass() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * h_;
}

double AtomPdf::mass() const {
    double s = 0.0;
    for (const auto& [z, m] : atoms) s += m;
    return s;
}

void AtomPdf::sort_and_merge() {
    std::sort(atoms.begin(), atoms.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& [z, m] : atoms) {
        if (!merged.empty() && std::abs(merged.back().first - z) <= 1e-12) {
            merged.back().second += m;
        } else {
            merged.emplace_back(z, m);
        }
    }
    atoms = std::move(merged);
}

double AtomPdf::single_magnitude() const {
    double w = 0.0;
    for (const auto& [z, m] : atoms) {
        if (std::abs(z) <= 1e-12) continue;
        if (w == 0.0) {
            w = std::abs(z);
        } else if (std::abs(std::abs(z) - w) > 1e-9 * std::max(1.0, w)) {
            return -1.0;
        }
    }
    return w;
}

Density weight_density(const SkillDistribution& pop, const GridSpec& spec) {
    if (const auto* d = std::get_if<DiracSkill>(&pop.variant())) {
        AtomPdf out;
        out.atoms = {{logit(d->p), 1.0}};
        return out;
    }
    if (const auto* e = std::get_if<EmpiricalSkill>(&pop.variant())) {
        AtomPdf out;
        for (const auto& [p, m] : e->points) out.atoms.emplace_back(logit(p), m);
        out.sort_and_merge();
        return out;
    }
    const auto& b = std::get<BetaSkill>(pop.variant());
    GridPdf out(spec.half_width, spec.step);
    // Change of variables p = sigmoid(z) turns the Beta density into
    // sigmoid(z)^alpha * sigmoid(-z)^beta / B(alpha, beta).
    const double lb = lbeta(b.alpha, b.beta);
    for (int i = 0; i < out.size(); ++i) {
        const double z = out.z_at(i);
        out.values()[i] = std::exp(-b.alpha * softplus(-z) - b.beta * softplus(z) - lb);
    }
    out.truncated_mass = std::max(0.0, 1.0 - out.mass());
    return out;
}

Density vote_density(const Density& weights) {
    if (const auto* a = std::get_if<AtomPdf>(&weights)) {
        AtomPdf out;
        for (const auto& [w, m] : a->atoms) {
            out.atoms.emplace_back(w, sigmoid(w) * m);
            out.atoms.emplace_back(-w, sigmoid(-w) * m);
        }
        out.sort_and_merge();
        return out;
    }
    const auto& g = std::get<GridPdf>(weights);
    GridPdf out(g.hi(), g.h());
    for (int i = 0; i < g.size(); ++i) {
        out.values()[i] = sigmoid(g.z_at(i)) * (g.values()[i] + g.values()[g.mirror(i)]);
    }
    out.truncated_mass = g.truncated_mass;
    return out;
}

Density make_vote_density(const SkillDistribution& pop, const GridSpec& spec) {
    return vote_density(weight_density(pop, spec));
}

MomentSummary moments(const Density& f, double gamma_multiplier) {
    double total = 0.0, m1 = 0.0, m2 = 0.0;
    if (const auto* a = std::get_if<AtomPdf>(&f)) {
        for (const auto& [z, m] : a->atoms) {
            total += m;
            m1 += m * z;
            m2 += m * z * z;
        }
    } else {
        const auto& g = std::get<GridPdf>(f);
        for (int i = 0; i < g.size(); ++i) {
            const double m = g.h() * g.values()[i];
            const double z = g.z_at(i);
            total += m;
            m1 += m * z;
            m2 += m * z * z;
        }
    }
    if (!(total > 0.0)) throw ConfigError("moments of an empty density");
    const double mean = m1 / total;
    const double var = std::max(0.0, m2 / total - mean * mean);
    // gamma is a support bound, so it can never sit below |mean|.
    const double gamma = std::max(gamma_multiplier * std::sqrt(var), std::abs(mean));
    return MomentSummary{mean, var, gamma};
}

namespace {

// Fraction of the cell around a node that lies at or beyond the two
// absorbing boundaries. Nodes carry mass spread uniformly over one step,
// which makes walk outputs continuous in z_b.
struct CellSplit {
    double up;
    double down;
    double stay;
};

CellSplit split_cell(double z, double h, double z_b) {
    const double lo = z - 0.5 * h;
    const double hi = z + 0.5 * h;
    double up = std::clamp((hi - z_b) / h, 0.0, 1.0);
    double down = std::clamp((-z_b - lo) / h, 0.0, 1.0);
    if (up + down > 1.0) {  // z_b below half a step: the cell straddles both
        const double excess = up + down - 1.0;
        up -= 0.5 * excess;
        down -= 0.5 * excess;
    }
    return CellSplit{up, down, 1.0 - up - down};
}

WalkReport finish_report(double e_steps, double up_total, double down_total, double survive,
                         int steps, bool converged, double z_b, double mean) {
    if (mean > 1e-12) {
        // Drift-based estimate for the truncated tail of the series.
        e_steps += survive * (steps + 2.0 * z_b / mean);
    }
    const double exited = up_total + down_total;
    const double share = exited > 0.0 ? up_total / exited : 0.5;
    return WalkReport{e_steps, up_total + survive * share, survive, steps, converged};
}

WalkReport bounded_walk_grid(const GridPdf& fv, double z_b, const WalkOptions& opt) {
    if (!(z_b > 0.0)) throw ConfigError("walk threshold must be positive");
    if (z_b > fv.hi()) throw ConfigError("walk threshold lies outside the grid");

    const int n = fv.size();
    const int c = fv.center();
    const double h = fv.h();
    const int full_len = 2 * n - 1;
    const double mean = moments(Density{fv}).mean;

    std::unique_ptr<SpectralConvolver> conv;
    if (opt.spectral) conv = std::make_unique<SpectralConvolver>(fv.values(), full_len);

    // One-step density on the doubled index range; step 1 is f_V itself.
    std::vector<double> spread(full_len, 0.0);
    for (int i = 0; i < n; ++i) spread[i + c] = fv.values()[i];

    std::vector<double> interior(n, 0.0);
    double e_steps = 0.0, up_total = 0.0, down_total = 0.0, survive = 0.0;
    int step = 0;
    bool converged = false;

    for (step = 1; step <= opt.max_steps; ++step) {
        double up = 0.0, down = 0.0;
        std::fill(interior.begin(), interior.end(), 0.0);
        for (int k = 0; k < full_len; ++k) {
            const double v = spread[k];
            if (v == 0.0) continue;
            const double z = (k - (n - 1)) * h;
            const CellSplit cs = split_cell(z, h, z_b);
            up += v * cs.up;
            down += v * cs.down;
            if (cs.stay > 0.0) interior[k - c] += v * cs.stay;
        }
        up *= h;
        down *= h;
        e_steps += step * (up + down);
        up_total += up;
        down_total += down;

        survive = 0.0;
        for (double v : interior) survive += v;
        survive *= h;

        if (survive < opt.tol) {
            converged = true;
            break;
        }
        if (step == opt.max_steps) break;

        if (conv) {
            conv->convolve(interior, spread, full_len);
        } else {
            std::fill(spread.begin(), spread.end(), 0.0);
            for (int i = 0; i < n; ++i) {
                const double a = interior[i];
                if (a == 0.0) continue;
                for (int j = 0; j < n; ++j) {
                    spread[i + j] += a * fv.values()[j];
                }
            }
        }
        for (double& v : spread) v *= h;
    }
    return finish_report(e_steps, up_total, down_total, survive, std::min(step, opt.max_steps),
                         converged, z_b, mean);
}

struct LatticeSteps {
    double w;     // step magnitude
    double up;    // P(step = +w)
    double stay;  // P(step = 0)
    double down;  // P(step = -w)
};

LatticeSteps lattice_steps(const AtomPdf& fv) {
    const double w = fv.single_magnitude();
    if (w < 0.0) throw ConfigError("atomic density has mixed magnitudes");
    LatticeSteps s{w, 0.0, 0.0, 0.0};
    const double total = fv.mass();
    for (const auto& [z, m] : fv.atoms) {
        if (z > 1e-12) {
            s.up += m / total;
        } else if (z < -1e-12) {
            s.down += m / total;
        } else {
            s.stay += m / total;
        }
    }
    return s;
}

WalkReport bounded_walk_atoms(const AtomPdf& fv, double z_b, const WalkOptions& opt) {
    if (!(z_b > 0.0)) throw ConfigError("walk threshold must be positive");
    const LatticeSteps st = lattice_steps(fv);
    if (st.w <= 0.0) {
        // All mass at zero: the walk never moves.
        return WalkReport{kInf, 0.5, 1.0, 0, false};
    }
    // Absorption happens at the first lattice point at or beyond z_b.
    const long k_raw = std::max(1L, std::lround(std::ceil(z_b / st.w - 1e-9)));
    if (k_raw > 1000000L) throw ConfigError("walk threshold too far for the lattice");
    const int k_abs = static_cast<int>(k_raw);
    const int m = 2 * k_abs - 1;  // interior lattice points
    std::vector<double> cur(m, 0.0), nxt(m, 0.0);
    cur[k_abs - 1] = 1.0;

    const double mean = st.w * (st.up - st.down);
    double e_steps = 0.0, up_total = 0.0, down_total = 0.0, survive = 1.0;
    int step = 0;
    bool converged = false;
    for (step = 1; step <= opt.max_steps; ++step) {
        const double up = st.up * cur[m - 1];
        const double down = st.down * cur[0];
        e_steps += step * (up + down);
        up_total += up;
        down_total += down;

        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (int s = 0; s < m; ++s) {
            const double v = cur[s];
            if (v == 0.0) continue;
            if (st.stay > 0.0) nxt[s] += st.stay * v;
            if (s + 1 < m) nxt[s + 1] += st.up * v;
            if (s - 1 >= 0) nxt[s - 1] += st.down * v;
        }
        cur.swap(nxt);
        survive = 0.0;
        for (double v : cur) survive += v;
        if (survive < opt.tol) {
            converged = true;
            break;
        }
    }
    return finish_report(e_steps, up_total, down_total, survive, std::min(step, opt.max_steps),
                         converged, z_b, mean);
}

}  // namespace

WalkReport bounded_walk(const Density& f_v, double z_threshold, const WalkOptions& options) {
    if (const auto* a = std::get_if<AtomPdf>(&f_v)) {
        if (a->single_magnitude() >= 0.0) {
            return bounded_walk_atoms(*a, z_threshold, options);
        }
        return bounded_walk_grid(to_grid(*a), z_threshold, options);
    }
    return bounded_walk_grid(std::get<GridPdf>(f_v), z_threshold, options);
}

namespace {

double unbounded_accuracy_grid(const GridPdf& fv, int steps) {
    const int n = fv.size();
    const int out_len = steps * (n - 1) + 1;
    const int out_center = steps * (n - 1) / 2;

    if (steps == 1) {
        double above = 0.0;
        for (int i = fv.center() + 1; i < n; ++i) above += fv.values()[i];
        const double acc = fv.h() * (above + 0.5 * fv.values()[fv.center()]);
        return std::clamp(acc / fv.mass(), 0.0, 1.0);
    }

    // steps-fold self-convolution computed as a spectrum power.
    SpectralConvolver conv(fv.values(), out_len);
    const int L = conv.length();
    const int nc = L / 2 + 1;
    conv.load(fv.values());
    conv.forward();
    fftw_complex* spec = conv.spectrum();
    std::vector<double> base(2 * nc);
    std::copy_n(reinterpret_cast<const double*>(spec), 2 * nc, base.begin());
    for (int rep = 1; rep < steps; ++rep) {
        for (int k = 0; k < nc; ++k) {
            const double a = spec[k][0];
            const double b = spec[k][1];
            spec[k][0] = a * base[2 * k] - b * base[2 * k + 1];
            spec[k][1] = a * base[2 * k + 1] + b * base[2 * k];
        }
    }
    conv.inverse();
    const double* out = conv.buffer();
    // Continuous density carries h^(steps-1); the inverse transform 1/L.
    double above = 0.0;
    double total = 0.0;
    for (int k = 0; k < out_len; ++k) {
        total += out[k];
        if (k > out_center) above += out[k];
    }
    above += 0.5 * out[out_center];
    return std::clamp(above / total, 0.0, 1.0);
}

double unbounded_accuracy_atoms(const AtomPdf& fv, int steps) {
    const LatticeSteps st = lattice_steps(fv);
    if (st.w <= 0.0) return 0.5;
    // Exact lattice distribution of the sum after `steps` draws.
    std::vector<double> dist(2 * steps + 1, 0.0);
    dist[steps] = 1.0;
    std::vector<double> nxt(dist.size());
    for (int r = 0; r < steps; ++r) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (std::size_t s = 0; s < dist.size(); ++s) {
            const double v = dist[s];
            if (v == 0.0) continue;
            if (s + 1 < dist.size()) nxt[s + 1] += st.up * v;
            if (s >= 1) nxt[s - 1] += st.down * v;
            if (st.stay > 0.0) nxt[s] += st.stay * v;
        }
        dist.swap(nxt);
    }
    double above = 0.0;
    for (std::size_t s = steps + 1; s < dist.size(); ++s) above += dist[s];
    return above + 0.5 * dist[steps];
}

}  // namespace

double unbounded_accuracy(const Density& f_v, int steps) {
    if (steps < 1) throw ConfigError("unbounded walk needs at least one step");
    if (const auto* a = std::get_if<AtomPdf>(&f_v)) {
        if (a->single_magnitude() >= 0.0) {
            return unbounded_accuracy_atoms(*a, steps);
        }
        return unbounded_accuracy_grid(to_grid(*a), steps);
    }
    return unbounded_accuracy_grid(std::get<GridPdf>(f_v), steps);
}

namespace {

// Monotone bisection utility shared by both calibration carriers.
template <typename F>
CalibrationResult bisect_threshold(F objective, double target, double lo, double hi,
                                   double lo_value, double hi_value) {
    const double tol = 1e-3 * target;
    if (hi_value < target - tol) {
        std::ostringstream msg;
        msg << "target expected steps " << target << " unattainable: objective spans ["
            << lo_value << ", " << hi_value << "] for thresholds in [" << lo << ", " << hi
            << "]";
        throw NumericError(msg.str());
    }
    double best_z = hi, best_val = hi_value;
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double val = objective(mid);
        if (std::abs(val - target) < std::abs(best_val - target)) {
            best_z = mid;
            best_val = val;
        }
        if (std::abs(val - target) <= tol) break;
        if (val < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (std::abs(best_val - target) > tol) {
        std::ostringstream msg;
        msg << "calibration did not reach target " << target << "; best value " << best_val
            << " at threshold " << best_z;
        throw NumericError(msg.str());
    }
    return CalibrationResult{best_z, best_val, std::abs(best_val - target)};
}

}  // namespace

CalibrationResult calibrate(const Density& f_v, double target_steps,
                            const WalkOptions& options) {
    if (!(target_steps >= 1.0)) {
        throw NumericError("target expected steps unattainable: every walk takes at least one step");
    }
    if (const auto* a = std::get_if<AtomPdf>(&f_v)) {
        const double w = a->single_magnitude();
        if (w > 0.0) {
            const LatticeSteps st = lattice_steps(*a);
            if (std::abs(st.up - st.down) < 1e-12) {
                throw NumericError("calibration impossible: zero drift population");
            }
            if (target_steps == 1.0) {
                // Any threshold below the first lattice point exits in one
                // step; half the step magnitude is the canonical choice.
                return CalibrationResult{0.5 * w, 1.0, 0.0};
            }
            // The lattice walk's expected length is a step function of z_B,
            // so integer targets are generally not attainable exactly.
            // Calibrate against its continuous closed-form interpolation.
            const double p = std::max(st.up, st.down) / (st.up + st.down);
            auto objective = [&](double z) { return homogeneous_expected_steps(p, z); };
            double hi = w;
            double hi_val = objective(hi);
            int guard = 0;
            while (hi_val < target_steps && guard++ < 200) {
                hi *= 2.0;
                hi_val = objective(hi);
            }
            return bisect_threshold(objective, target_steps, 0.0, hi, 0.0, hi_val);
        }
        GridPdf g = to_grid(*a);
        return calibrate(Density{std::move(g)}, target_steps, options);
    }

    const auto& g = std::get<GridPdf>(f_v);
    auto objective = [&](double z) {
        return bounded_walk_grid(g, z, options).expected_steps;
    };
    const double hi = g.hi();
    const double hi_val = objective(hi);
    return bisect_threshold(objective, target_steps, 0.0, hi, 1.0, hi_val);
}

double homogeneous_expected_steps(double p, double z_threshold) {
    if (!(p > 0.0) || !(p < 1.0)) throw ConfigError("skill must lie strictly inside (0,1)");
    if (p == 0.5) throw ConfigError("expected steps singular at p = 0.5 (zero drift)");
    if (!(z_threshold > 0.0)) throw ConfigError("threshold must be positive");
    return (2.0 * sigmoid(z_threshold) - 1.0) * z_threshold / ((2.0 * p - 1.0) * logit(p));
}

double homogeneous_uniform_accuracy(double p, int votes) {
    if (!(p > 0.0) || !(p < 1.0)) throw ConfigError("skill must lie strictly inside (0,1)");
    if (votes < 1 || votes % 2 == 0) {
        throw ConfigError("homogeneous uniform accuracy requires an odd number of votes");
    }
    const double q = 1.0 - p;
    double acc = 0.0;
    double binom = 1.0;  // C(votes, k) maintained multiplicatively
    // Walk k downward from `votes` so the binomial update stays exact.
    for (int k = votes; k >= (votes + 1) / 2; --k) {
        acc += binom * std::pow(p, k) * std::pow(q, votes - k);
        binom = binom * k / (votes - k + 1);
    }
    return acc;
}

namespace {

struct LogMassPoint {
    double log_mass;
    double z;
};

std::vector<LogMassPoint> log_mass_points(const Density& f) {
    std::vector<LogMassPoint> pts;
    double total = 0.0;
    if (const auto* a = std::get_if<AtomPdf>(&f)) {
        total = a->mass();
        for (const auto& [z, m] : a->atoms) {
            if (m > 0.0) pts.push_back({std::log(m / total), z});
        }
    } else {
        const auto& g = std::get<GridPdf>(f);
        total = g.mass();
        for (int i = 0; i < g.size(); ++i) {
            const double m = g.h() * g.values()[i];
            if (m > 0.0) pts.push_back({std::log(m / total), g.z_at(i)});
        }
    }
    if (pts.empty()) throw ConfigError("density has no mass");
    return pts;
}

// log E(exp(t X)) over the normalized mass points.
double log_mgf(const std::vector<LogMassPoint>& pts, double t) {
    double peak = -kInf;
    for (const auto& p : pts) peak = std::max(peak, p.log_mass + t * p.z);
    double s = 0.0;
    for (const auto& p : pts) s += std::exp(p.log_mass + t * p.z - peak);
    return peak + std::log(s);
}

}  // namespace

RhoRoot rho_root(const Density& f_v) {
    const MomentSummary m = moments(f_v);
    if (std::abs(m.mean) < 1e-10) {
        throw NumericError("rho root undefined: density mean is zero");
    }
    const auto pts = log_mass_points(f_v);

    // E(rho^X) = 1 has the trivial root rho = 1; the other root sits on
    // the opposite side of 1 from the drift. Search on t = log(rho).
    const double dir = m.mean > 0.0 ? -1.0 : 1.0;
    double near = dir, far_t = dir;
    double g_near = log_mgf(pts, near);
    if (g_near > 0.0) {
        int guard = 0;
        while (g_near > 0.0 && guard++ < 200) {
            near *= 0.5;
            g_near = log_mgf(pts, near);
        }
        if (g_near > 0.0) throw NumericError("rho root sign change not found near 1");
        far_t = near * 2.0;
    } else {
        int guard = 0;
        double g_far = g_near;
        while (g_far <= 0.0 && guard++ < 60) {
            far_t *= 2.0;
            g_far = log_mgf(pts, far_t);
        }
        if (g_far <= 0.0) {
            throw NumericError("rho root sign change not found: density too one-sided");
        }
    }
    // Invariant: log-mgf <= 0 at `near`, > 0 at `far_t`.
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (near + far_t);
        if (log_mgf(pts, mid) > 0.0) {
            far_t = mid;
        } else {
            near = mid;
        }
        if (std::abs(far_t - near) < 1e-14 * std::max(1.0, std::abs(near))) break;
    }
    const double t0 = 0.5 * (near + far_t);
    return RhoRoot{std::exp(t0), 2.0 * m.mean / m.variance};
}

double gambler_ruin_bound(const MomentSummary& m, double rho0, double z_threshold) {
    if (!(m.mean > 0.0)) throw ConfigError("ruin bound requires positive drift");
    if (!(rho0 > 0.0) || rho0 == 1.0) throw ConfigError("ruin bound requires rho0 > 0, != 1");
    if (!(z_threshold > 0.0)) throw ConfigError("threshold must be positive");
    const double lt = std::log(rho0);
    const double num = std::exp((z_threshold + m.gamma) * lt) - 1.0;
    const double den = std::exp((2.0 * z_threshold + m.gamma) * lt) - 1.0;
    return ((2.0 * z_threshold + m.gamma) * num / den - z_threshold) / m.mean;
}

double chernoff_bound(const MomentSummary& m, double steps) {
    if (m.mean == 0.0) throw ConfigError("concentration bound requires nonzero mean");
    if (!(steps > 0.0)) throw ConfigError("steps must be positive");
    return 1.0 / (1.0 + steps * m.mean * m.mean / m.variance);
}

GridPdf convolve_direct(const GridPdf& a, const GridPdf& b) {
    if (std::abs(a.h() - b.h()) > 1e-15) {
        throw ConfigError("convolution requires identical grid steps");
    }
    GridPdf out(a.hi() + b.hi(), a.h());
    for (int i = 0; i < a.size(); ++i) {
        const double av = a.values()[i];
        if (av == 0.0) continue;
        for (int j = 0; j < b.size(); ++j) {
            out.values()[i + j] += av * b.values()[j];
        }
    }
    for (double& v : out.values()) v *= a.h();
    out.truncated_mass = a.truncated_mass + b.truncated_mass;
    return out;
}

GridPdf convolve_spectral(const GridPdf& a, const GridPdf& b) {
    if (std::abs(a.h() - b.h()) > 1e-15) {
        throw ConfigError("convolution requires identical grid steps");
    }
    GridPdf out(a.hi() + b.hi(), a.h());
    const int out_len = a.size() + b.size() - 1;
    SpectralConvolver conv(b.values(), out_len);
    std::vector<double> result;
    conv.convolve(a.values(), result, out_len);
    for (int k = 0; k < out_len; ++k) {
        out.values()[k] = result[k] * a.h();
    }
    out.truncated_mass = a.truncated_mass + b.truncated_mass;
    return out;
}

GridPdf to_grid(const AtomPdf& a, const GridSpec& spec) {
    GridPdf out(spec.half_width, spec.step);
    for (const auto& [z, m] : a.atoms) {
        const long idx = std::lround(z / out.h()) + out.center();
        if (idx < 0 || idx >= out.size()) {
            out.truncated_mass += m;
        } else {
            out.values()[idx] += m / out.h();
        }
    }
    return out;
}

}  // namespace crowd

#include "neurobif/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/FFT>

#include "neurobif/equilibria.hpp"
#include "neurobif/errors.hpp"
#include "neurobif/linalg.hpp"

namespace neurobif {

void NoiseSpec::validate() const
{
    if (!std::isfinite(mu0) || !std::isfinite(slope) || !std::isfinite(sigma))
        throw DomainError("noise: non-finite mean, slope or sigma");
    if (sigma < 0.0)
        throw DomainError("noise: sigma must be >= 0");
}

std::vector<double> SdeTrajectory::component(int index) const
{
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states)
        out.push_back(s(index));
    return out;
}

Vec resting_state(const ModelParams& params, double P)
{
    const SweepRange range = default_sweep(kind_of(params));
    const auto grid = linspace(range.lo, range.hi, range.n);
    const auto g = [&](double X) { return input_from_X(params, X) - P; };
    const auto brackets = bracket_scan(g, grid);
    if (brackets.empty())
        throw DomainError("resting_state: no equilibrium at P = " + std::to_string(P) + " in the sweep range");
    const double X = dichotomy_solve(g, brackets.front());
    return equilibrium_from_X(params, X).state.values;
}

SdeTrajectory simulate_sde(const ModelParams& params, const NoiseSpec& noise, double T, const Vec& x0,
                           const SdeOptions& opt)
{
    noise.validate();
    if (!(opt.dt > 0.0) || opt.dt > 1e-3 * (1.0 + 1e-12))
        throw ContractViolation("simulate_sde: dt must lie in (0, 1e-3]");
    if (!(T > 0.0) || !std::isfinite(T))
        throw ContractViolation("simulate_sde: T must be positive");
    const double steps_real = std::ceil(T / opt.dt - 1e-9);
    if (steps_real > 1e8)
        throw ContractViolation("simulate_sde: more than 1e8 steps requested");
    const long steps = static_cast<long>(steps_real);
    const long stride = std::max(1L, std::lround(opt.record_dt / opt.dt));

    const int n = dimension(params);
    Vec x = x0.size() == 0 ? resting_state(params, noise.mu0) : x0;
    if (x.size() != n)
        throw ContractViolation("simulate_sde: initial state has the wrong dimension");

    // The field is affine in P: f(x, P) = f(x, 0) + P fP.
    const ModelParams base = with_primary(params, 0.0);
    const Vec fP = primary_parameter_derivative(params, x);

    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sqdt = std::sqrt(opt.dt);

    SdeTrajectory out;
    out.model = kind_of(params);
    const auto n_rec = static_cast<std::size_t>(steps / stride + 2);
    out.times.reserve(n_rec);
    out.states.reserve(n_rec);
    out.P_inst.reserve(n_rec);

    Vec dx(n), xp(n), dxp(n);
    for (long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * opt.dt;
        const double xi = noise.sigma > 0.0 ? normal(rng) : 0.0;
        const double mu = noise.mean(t);
        if (k % stride == 0 || k == steps) {
            out.times.push_back(t);
            out.states.push_back(x);
            out.P_inst.push_back(mu + noise.sigma * xi / sqdt);
        }
        if (k == steps)
            break;
        const Vec dW = (noise.sigma * sqdt * xi) * fP;
        field(base, std::span<const double>(x.data(), n), std::span<double>(dx.data(), n));
        dx += mu * fP;
        if (opt.scheme == SdeScheme::euler_maruyama) {
            x += opt.dt * dx + dW;
        } else {
            // Additive noise: the Heun predictor-corrector keeps strong order 1
            // and is second order in the drift.
            xp = x + opt.dt * dx + dW;
            field(base, std::span<const double>(xp.data(), n), std::span<double>(dxp.data(), n));
            dxp += noise.mean(t + opt.dt) * fP;
            x += 0.5 * opt.dt * (dx + dxp) + dW;
        }
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > opt.blowup)
            throw IntegrationError("simulate_sde: state diverged", t + opt.dt);
    }
    return out;
}

std::size_t SpikeTrain::pds_count() const
{
    return static_cast<std::size_t>(std::count(pds.begin(), pds.end(), true));
}

SpikeTrain detect_spikes(const std::vector<double>& t, const std::vector<double>& x, const SpikeOptions& opt)
{
    if (t.size() != x.size())
        throw ContractViolation("detect_spikes: time and signal lengths differ");
    SpikeTrain train;
    const std::size_t n = x.size();
    if (n < 3)
        return train;

    struct Peak {
        std::size_t i;
        double amp;
    };
    std::vector<Peak> peaks;
    std::vector<double> buf;
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(x[i] > x[i - 1] && x[i] >= x[i + 1]))
            continue;
        const double wend = t[i] - opt.baseline_gap;
        if (wend - t.front() < opt.baseline_window)
            continue;
        while (t[lo] < wend - opt.baseline_window)
            ++lo;
        while (hi < n && t[hi] < wend)
            ++hi;
        if (hi < lo + 8)
            continue;
        // Median and the MAD of the samples below it: spikes are upward, so
        // only the lower half measures the background spread and rhythmic
        // discharges do not lift the threshold above the next spike.
        const std::size_t stride = std::max<std::size_t>(1, (hi - lo) / 1000);
        buf.clear();
        for (std::size_t k = lo; k < hi; k += stride)
            buf.push_back(x[k]);
        const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
        std::nth_element(buf.begin(), mid, buf.end());
        const double med = *mid;
        if (x[i] - med < opt.min_amplitude)
            continue;
        std::size_t m = 0;
        for (double v : buf)
            if (v < med)
                buf[m++] = med - v;
        if (m == 0)
            continue;
        buf.resize(m);
        const auto lmid = buf.begin() + static_cast<std::ptrdiff_t>(m / 2);
        std::nth_element(buf.begin(), lmid, buf.end());
        const double sd = 1.4826 * *lmid;
        if (x[i] > med + opt.threshold_sd * sd)
            peaks.push_back({i, x[i] - med});
    }

    // Maxima closer than the refractory period form one event; the largest
    // is its time. Maxima separated by a dip of pds_dip * amplitude count
    // as distinct discharges.
    for (std::size_t p = 0; p < peaks.size();) {
        std::size_t e = p, best = p;
        while (e + 1 < peaks.size() && t[peaks[e + 1].i] - t[peaks[e].i] < opt.refractory) {
            ++e;
            if (peaks[e].amp > peaks[best].amp)
                best = e;
        }
        const double tb = t[peaks[best].i];
        int count = 0;
        double last_top = 0.0;
        std::size_t last_i = 0;
        for (std::size_t q = p; q <= e; ++q) {
            if (std::abs(t[peaks[q].i] - tb) > opt.pds_factor * opt.refractory)
                continue;
            if (count == 0) {
                count = 1;
                last_top = x[peaks[q].i];
                last_i = peaks[q].i;
                continue;
            }
            const double trough = *std::min_element(x.begin() + static_cast<std::ptrdiff_t>(last_i),
                                                    x.begin() + static_cast<std::ptrdiff_t>(peaks[q].i));
            const double dip = std::min(last_top, x[peaks[q].i]) - trough;
            if (dip >= opt.pds_dip * peaks[best].amp)
                ++count;
            if (x[peaks[q].i] > last_top || dip >= opt.pds_dip * peaks[best].amp)
                last_top = x[peaks[q].i];
            last_i = peaks[q].i;
        }
        if (train.times.empty() || tb - train.times.back() >= opt.refractory) {
            train.times.push_back(tb);
            train.amplitudes.push_back(peaks[best].amp);
            train.pds.push_back(count >= 2);
        }
        p = e + 1;
    }
    return train;
}

SpikeTrain detect_spikes(const SdeTrajectory& traj, const SpikeOptions& opt)
{
    return detect_spikes(traj.times, traj.component(x_index(traj.model)), opt);
}

std::vector<OscillationEpoch> detect_oscillations(const std::vector<double>& t, const std::vector<double>& x,
                                                  const SpikeTrain& spikes, const OscillationOptions& opt)
{
    std::vector<OscillationEpoch> epochs;
    if (t.size() < 3 || t.size() != x.size())
        return epochs;
    const double hop = 0.5 * opt.window;

    struct Win {
        double start, end, freq;
        bool ok;
    };
    std::vector<Win> wins;
    std::size_t i0 = 0;
    for (double ws = t.front(); ws + opt.window <= t.back() + 1e-12; ws += hop) {
        const double we = ws + opt.window;
        while (i0 < t.size() && t[i0] < ws)
            ++i0;
        std::size_t i1 = i0;
        double sum = 0.0, sumsq = 0.0;
        while (i1 < t.size() && t[i1] < we) {
            sum += x[i1];
            sumsq += x[i1] * x[i1];
            ++i1;
        }
        const double m = static_cast<double>(i1 - i0);
        Win w{ws, we, 0.0, false};
        if (m >= 3) {
            const double mean = sum / m;
            const double sd = std::sqrt(std::max(0.0, sumsq / m - mean * mean));
            // Upward mean crossings with a hysteresis of half a std.
            int crossings = 0;
            bool below = x[i0] < mean;
            for (std::size_t k = i0; k < i1; ++k) {
                if (below && x[k] > mean + 0.5 * sd) {
                    ++crossings;
                    below = false;
                } else if (!below && x[k] < mean - 0.5 * sd) {
                    below = true;
                }
            }
            w.freq = crossings / opt.window * opt.a;
            const bool spike_free = std::none_of(spikes.times.begin(), spikes.times.end(),
                                                 [&](double s) { return s >= ws && s < we; });
            w.ok = sd >= opt.min_std && mean >= opt.min_mean && w.freq >= opt.band_lo_hz && w.freq < opt.band_hi_hz && spike_free;
        }
        wins.push_back(w);
    }

    for (std::size_t k = 0; k < wins.size();) {
        if (!wins[k].ok) {
            ++k;
            continue;
        }
        std::size_t e = k;
        double fsum = 0.0;
        while (e < wins.size() && wins[e].ok)
            fsum += wins[e++].freq;
        const OscillationEpoch ep{wins[k].start, wins[e - 1].end, fsum / static_cast<double>(e - k)};
        if (ep.end - ep.start >= opt.min_duration)
            epochs.push_back(ep);
        k = e;
    }
    return epochs;
}

namespace {

// Spikes whose local inter-spike intervals (up to two on each side) are
// regular and in the rate band.
std::vector<bool> rhythmic_flags(const SpikeTrain& spikes, const SegmentOptions& opt, double a)
{
    const std::size_t n = spikes.size();
    std::vector<bool> flags(n, false);
    if (n < 2)
        return flags;
    std::vector<double> isi(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        isi[i] = spikes.times[i + 1] - spikes.times[i];
    for (std::size_t i = 0; i < n; ++i) {
        // ISIs touching spike i have indices i-1 and i; widen by one.
        const long lo = std::max(0L, static_cast<long>(i) - 2);
        const long hi = std::min(static_cast<long>(n) - 2, static_cast<long>(i) + 1);
        if (hi - lo + 1 < 3)
            continue;
        double s = 0.0, s2 = 0.0;
        for (long k = lo; k <= hi; ++k) {
            s += isi[static_cast<std::size_t>(k)];
            s2 += isi[static_cast<std::size_t>(k)] * isi[static_cast<std::size_t>(k)];
        }
        const double m = static_cast<double>(hi - lo + 1);
        const double mean = s / m;
        const double cv = std::sqrt(std::max(0.0, s2 / m - mean * mean)) / mean;
        const double rate = a / mean;
        flags[i] = cv < opt.cv_max && rate >= opt.rate_lo_hz && rate < opt.rate_hi_hz;
    }
    return flags;
}

}  // namespace

std::vector<Phase> segment_phases(const SdeTrajectory& traj, const SpikeTrain& spikes, const SegmentOptions& opt)
{
    std::vector<Phase> phases;
    if (traj.times.empty())
        return phases;
    const double t0 = traj.times.front();
    const double t1 = traj.times.back();
    if (spikes.size() == 0) {
        phases.push_back({"normal", t0, t1});
        return phases;
    }

    const auto flags = rhythmic_flags(spikes, opt, opt.oscillation.a);
    std::size_t best_start = 0, best_len = 0;
    for (std::size_t i = 0; i < flags.size();) {
        if (!flags[i]) {
            ++i;
            continue;
        }
        std::size_t e = i;
        while (e < flags.size() && flags[e])
            ++e;
        if (e - i > best_len) {
            best_len = e - i;
            best_start = i;
        }
        i = e;
    }

    const double first = spikes.times.front();
    if (first > t0)
        phases.push_back({"normal", t0, first});
    if (best_len < static_cast<std::size_t>(std::max(1, opt.min_seizure_spikes))) {
        phases.push_back({"onset", first, t1});
        return phases;
    }

    const double sz_start = spikes.times[best_start];
    const double sz_end = spikes.times[best_start + best_len - 1];
    if (sz_start > first)
        phases.push_back({"onset", first, sz_start});

    const auto x = traj.component(x_index(traj.model));
    const auto epochs = detect_oscillations(traj.times, x, spikes, opt.oscillation);
    const auto post = std::find_if(epochs.begin(), epochs.end(),
                                   [&](const OscillationEpoch& e) { return e.start >= sz_end - opt.oscillation.window; });
    if (post == epochs.end()) {
        phases.push_back({"seizure", sz_start, t1});
        return phases;
    }
    const double post_start = std::max(sz_end, post->start);
    phases.push_back({"seizure", sz_start, post_start});
    phases.push_back({"post", post_start, t1});
    return phases;
}

bool SeizureResult::has_all_phases() const
{
    static const char* order[] = {"normal", "onset", "seizure", "post"};
    if (phases.size() != 4)
        return false;
    for (std::size_t i = 0; i < 4; ++i)
        if (phases[i].name != order[i])
            return false;
    return true;
}

SeizureResult seizure_scenario(double j, const NoiseSpec& noise, double T, const SegmentOptions& opt,
                               const SdeOptions& sde)
{
    if (noise.slope < 0.0)
        throw ContractViolation("seizure_scenario: slope must be >= 0");
    ModelParams params = preset("jr-default");
    set_param(params, "j", j);
    SeizureResult r;
    r.trajectory = simulate_sde(params, noise, T, {}, sde);
    r.spikes = detect_spikes(r.trajectory, opt.spikes);
    r.phases = segment_phases(r.trajectory, r.spikes, opt);
    return r;
}

NoiseSpectrum linear_noise_spectrum(const ModelParams& params, double X, double a)
{
    const Mat J = jacobian_at_X(params, X);
    const Spectrum sp = eigen(J);
    if (sp.eigenvalues.size() > 0 && sp.eigenvalues(0).real() >= 0.0)
        throw ContractViolation("linear_noise_spectrum: equilibrium is not stable");
    NoiseSpectrum out;
    const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < sp.eigenvalues.size(); ++k) {
        const auto lam = sp.eigenvalues(k);
        if (lam.imag() <= 1e-9 * scale)
            continue;
        // Sorted by descending real part: the first complex one is least damped.
        out.resonant = true;
        out.eigenvalue = lam;
        out.peak_hz = lam.imag() / (2.0 * std::numbers::pi) * a;
        out.damping = std::abs(lam.real()) * a;
        break;
    }

    // |e_X^T (i w - J)^-1 dF/dP|^2 on a grid up to well past the fastest mode,
    // then a parabolic refinement of the maximum.
    const Equilibrium eq = equilibrium_from_X(params, X);
    const Vec b = primary_parameter_derivative(with_primary(params, eq.P), eq.state.values);
    const int ix = x_index(kind_of(params));
    double w_max = 1.0;
    for (Eigen::Index k = 0; k < sp.eigenvalues.size(); ++k)
        w_max = std::max(w_max, 3.0 * std::abs(sp.eigenvalues(k)));
    const Eigen::MatrixXcd Jc = J.cast<std::complex<double>>();
    const Eigen::VectorXcd bc = b.cast<std::complex<double>>();
    auto gain = [&](double w) {
        Eigen::MatrixXcd M = -Jc;
        M.diagonal().array() += std::complex<double>(0.0, w);
        return std::norm(M.partialPivLu().solve(bc)(ix));
    };
    constexpr int grid = 4000;
    std::vector<double> g(grid + 1);
    for (int k = 0; k <= grid; ++k)
        g[k] = gain(w_max * k / grid);
    const auto best = std::max_element(g.begin(), g.end()) - g.begin();
    if (best > 0 && best < grid) {
        const double h = w_max / grid;
        const double den = g[best - 1] - 2.0 * g[best] + g[best + 1];
        const double shift = den < 0.0 ? 0.5 * (g[best - 1] - g[best + 1]) / den : 0.0;
        out.response_peak_hz = (static_cast<double>(best) + shift) * h / (2.0 * std::numbers::pi) * a;
    }
    return out;
}

double periodogram_peak(const std::vector<double>& x, double dt, double a, double min_hz)
{
    if (x.size() < 16)
        throw ContractViolation("periodogram_peak: signal too short");
    std::size_t nseg = 1;
    while (nseg * 2 <= std::min<std::size_t>(x.size(), 1 << 14))
        nseg *= 2;
    double mean = 0.0;
    for (double v : x)
        mean += v;
    mean /= static_cast<double>(x.size());

    // Welch: Hann-windowed, half-overlapping segments.
    Eigen::FFT<double> fft;
    std::vector<double> seg(nseg), power(nseg / 2 + 1, 0.0);
    std::vector<std::complex<double>> spec;
    for (std::size_t s = 0; s + nseg <= x.size(); s += nseg / 2) {
        for (std::size_t k = 0; k < nseg; ++k) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nseg));
            seg[k] = w * (x[s + k] - mean);
        }
        fft.fwd(spec, seg);
        for (std::size_t k = 0; k < power.size(); ++k)
            power[k] += std::norm(spec[k]);
    }
    const double df = a / (static_cast<double>(nseg) * dt);
    std::size_t best = 0;
    for (std::size_t k = 1; k < power.size(); ++k)
        if (k * df >= min_hz && (best == 0 || power[k] > power[best]))
            best = k;
    return static_cast<double>(best) * df;
}

}  // namespace neurobif

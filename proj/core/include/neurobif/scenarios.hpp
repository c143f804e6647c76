#pragma once

// Noise-driven simulations: Brownian input P, spike/PDS detection, the
// seizure sweep with a drifting mean and the linear noise spectrum of a
// stable focus.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "neurobif/model.hpp"

namespace neurobif {

// P(tau) = mu0 + slope tau + sigma dW/dtau.
struct NoiseSpec {
    double mu0 = 0.0;
    double slope = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;

    double mean(double tau) const { return mu0 + slope * tau; }
    void validate() const;
};

enum class SdeScheme { heun, euler_maruyama };

struct SdeOptions {
    SdeScheme scheme = SdeScheme::heun;
    double dt = 1e-3;
    double record_dt = 1e-2;   // sampling of the returned path (multiple of dt)
    double blowup = 1e6;
};

struct SdeTrajectory {
    ModelKind model = ModelKind::jansen_rit;
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<double> P_inst;   // input seen by the step that starts at times[i]

    std::size_t size() const { return times.size(); }
    std::vector<double> component(int index) const;
};

// Lowest-X equilibrium of the manifold at input P (the resting state).
Vec resting_state(const ModelParams& params, double P);

// Fixed-step SDE integration; the noise enters only the equation carrying P.
// Default is stochastic Heun (explicit trapezoid with the Euler-Maruyama
// increment), so sigma = 0 gives a second-order deterministic run.
// x0 empty: start from resting_state at mu0.
SdeTrajectory simulate_sde(const ModelParams& params, const NoiseSpec& noise, double T, const Vec& x0 = {},
                           const SdeOptions& opt = {});

struct SpikeOptions {
    double baseline_window = 50.0;
    double baseline_gap = 10.0;   // skipped before each peak so the upstroke stays out of the baseline
    double refractory = 2.0;
    double threshold_sd = 4.0;
    double min_amplitude = 2.5;   // absolute floor above the baseline mean
    double pds_factor = 1.5;   // PDS: >= 2 maxima within pds_factor * refractory
    double pds_dip = 0.25;     // trough between discharges, fraction of the amplitude
};

struct SpikeTrain {
    std::vector<double> times;
    std::vector<double> amplitudes;   // peak minus baseline median
    std::vector<bool> pds;

    std::size_t size() const { return times.size(); }
    std::size_t pds_count() const;
};

// Local maxima of `x` above the baseline of the trailing window
// [t - gap - window, t - gap) by threshold_sd robust standard deviations
// (median; 1.4826 x median deviation of the samples below it) and by at
// least min_amplitude. Maxima closer than the
// refractory period form one event (largest kept); the event is a PDS when
// it holds >= 2 discharges separated by a dip.
SpikeTrain detect_spikes(const std::vector<double>& t, const std::vector<double>& x, const SpikeOptions& opt = {});
SpikeTrain detect_spikes(const SdeTrajectory& traj, const SpikeOptions& opt = {});

struct OscillationOptions {
    double window = 40.0;        // analysis window, dimensionless time
    double min_duration = 100.0; // an epoch spans at least this much time
    double min_std = 0.15;       // X standard deviation inside a window
    double min_mean = 2.5;       // window mean of X: the alpha cycle lives on the upper sheet
    double band_lo_hz = 8.0;
    double band_hi_hz = 13.0;
    double a = 100.0;
};

struct OscillationEpoch {
    double start = 0.0;
    double end = 0.0;
    double freq_hz = 0.0;
};

// Runs of windows whose mean-crossing frequency lies in the band, whose
// spread exceeds min_std and whose mean exceeds min_mean; windows holding a
// spike are excluded.
std::vector<OscillationEpoch> detect_oscillations(const std::vector<double>& t, const std::vector<double>& x,
                                                  const SpikeTrain& spikes, const OscillationOptions& opt = {});

struct Phase {
    std::string name;   // normal, onset, seizure, post
    double start = 0.0;
    double end = 0.0;
};

struct SegmentOptions {
    SpikeOptions spikes;
    OscillationOptions oscillation;
    double cv_max = 0.3;
    double rate_lo_hz = 0.5;   // delta-theta
    double rate_hi_hz = 8.0;
    int min_seizure_spikes = 5;
};

// Deterministic function of the path: normal until the first spike, onset
// until the longest rhythmic run starts, seizure over the run, post once a
// sustained alpha epoch follows.
std::vector<Phase> segment_phases(const SdeTrajectory& traj, const SpikeTrain& spikes, const SegmentOptions& opt = {});

struct SeizureResult {
    SdeTrajectory trajectory;
    SpikeTrain spikes;
    std::vector<Phase> phases;

    bool has_all_phases() const;
};

SeizureResult seizure_scenario(double j, const NoiseSpec& noise, double T, const SegmentOptions& opt = {},
                               const SdeOptions& sde = {});

struct NoiseSpectrum {
    bool resonant = false;   // false: no complex pair ("no resonance")
    double peak_hz = 0.0;
    double damping = 0.0;    // |Re lambda| a, 1/s
    std::complex<double> eigenvalue{};
    // argmax over f > 0 of |H(f)|^2, H the transfer from the noisy input to
    // X; 0 when the response is low-pass. Equals peak_hz for a lightly damped
    // pair, drifts away from it as the damping grows.
    double response_peak_hz = 0.0;
};

// Predicted spectral peak of noise-driven fluctuations around the stable
// equilibrium X of the manifold.
NoiseSpectrum linear_noise_spectrum(const ModelParams& params, double X, double a = 100.0);

// Frequency (Hz) of the largest periodogram bin of a uniformly sampled
// signal, mean removed; bins below min_hz are ignored.
double periodogram_peak(const std::vector<double>& x, double dt, double a = 100.0, double min_hz = 0.5);

}  // namespace neurobif

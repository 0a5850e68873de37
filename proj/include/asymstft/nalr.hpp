#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace asymstft {

/// Audiometric catalog frequencies, Hz.
inline constexpr std::array<double, 6> kAudiogramFrequencies = {
    250.0, 500.0, 1000.0, 2000.0, 4000.0, 6000.0};

/// Hearing levels in dB HL at the catalog frequencies, one ear.
struct Audiogram {
  std::array<double, 6> levels_db_hl{};
};

/// Builds an audiogram from six levels, clamping each to [0, 120] dB HL.
/// Throws ParameterError on a wrong count or non-finite values.
Audiogram make_audiogram(std::span<const double> levels);

/// Reads one audiogram per line (six whitespace-separated dB HL values,
/// ordered by catalog frequency; blank lines ignored). One line per ear.
std::vector<Audiogram> load_audiogram_file(const std::string& path);

/// NAL-R insertion gains in dB at the catalog frequencies:
/// X = 0.05*(HL500 + HL1000 + HL2000),
/// gain(f) = max(0, X + 0.31*HL(f) + k(f)),
/// k = [-17, -8, 1, -1, -2, -2] dB.
std::array<double, 6> nalr_gains(const Audiogram& audiogram);

/// Linear-phase FIR realization of a per-frequency gain target. The
/// target magnitude interpolates gains_db linearly on a log-frequency
/// axis with flat extension below 250 Hz and above 6000 Hz, sampled on
/// nfir/2+1 uniform frequency points with zero phase; the impulse
/// response (nfir+1 taps, exactly symmetric about tap nfir/2) comes from
/// an inverse real DFT with center shift. The sampled target is refined
/// by a fixed damped iteration so the realized magnitude matches
/// gains_db at the catalog frequencies.
/// Requires even nfir >= 32 and sample_rate >= 12000.
std::vector<double> design_fir(const std::array<double, 6>& gains_db,
                               int nfir, double sample_rate);

/// A complete prescription: gains, FIR taps, and the filter group delay.
struct NalrPrescription {
  std::array<double, 6> gains_db{};
  std::vector<double> fir;  // nfir + 1 taps
  int delay = 0;            // nfir / 2 samples
};

inline constexpr int kDefaultNfir = 220;

NalrPrescription make_prescription(const Audiogram& audiogram,
                                   int nfir = kDefaultNfir,
                                   double sample_rate = 32000.0);

/// Convolves the signal with the prescription FIR and compensates the
/// group delay; output length equals input length.
std::vector<double> apply_amplification(std::span<const double> signal,
                                        const NalrPrescription& prescription);

/// Convenience: prescribes for one ear, then amplifies.
std::vector<double> apply_amplification(std::span<const double> signal,
                                        const Audiogram& ear,
                                        int nfir = kDefaultNfir,
                                        double sample_rate = 32000.0);

/// Per-channel amplification, one ear's audiogram per channel.
/// Throws ShapeError when channel and ear counts differ.
std::vector<std::vector<double>> apply_amplification(
    const std::vector<std::vector<double>>& channels,
    std::span<const Audiogram> ears, int nfir = kDefaultNfir,
    double sample_rate = 32000.0);

/// Magnitude response of an FIR in dB at one frequency (direct
/// evaluation of the transfer function on the unit circle).
double fir_response_db(std::span<const double> fir, double frequency,
                       double sample_rate);

}  // namespace asymstft

#pragma once

// Teleportation of a coherent-state qubit a|beta> + b|-beta> onto spin 1.
//
// Mode labels follow the optical layout: 0 is the probe pulse, 4 the channel
// half after reflection from cavity 1, 5 the input, 6/7 the beam-splitter
// outputs, 8/9 the same pulses after reflection from cavities 2/3.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cvdv/gates.hpp"
#include "cvdv/rng.hpp"
#include "cvdv/states.hpp"

namespace cvdv {

inline constexpr SpinId kAncillaSpinA{2};
inline constexpr SpinId kAncillaSpinB{3};
inline constexpr ModeId kProbeMode{0};
inline constexpr ModeId kChannelMode{4};
inline constexpr ModeId kInputMode{5};
inline constexpr ModeId kSplitModeA{6};
inline constexpr ModeId kSplitModeB{7};
inline constexpr ModeId kDetectModeA{8};
inline constexpr ModeId kDetectModeB{9};

struct BlochAngles {
  double theta = 0.0;
  double phi = 0.0;
};

// Haar-uniform point: cos(theta) uniform on [-1, 1], phi uniform on [0, 2pi).
BlochAngles random_bloch(Rng& rng);

struct InputQubit {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
  double beta = 0.0;

  // a = cos(theta/2), b = sin(theta/2) e^{i phi}
  static InputQubit from_bloch(const BlochAngles& angles, double beta);

  // Throws std::invalid_argument unless |a|^2 + |b|^2 = 1 within 1e-12 and
  // beta >= 0.
  void validate() const;

  SpinVector target() const { return {a, b}; }
};

enum class PeakClass { Upsilon, Xi };

const char* to_string(PeakClass c);

// (|up>_1 |alpha>_4 + |down>_1 |-alpha>_4)/sqrt2, made by reflecting
// |alpha>_0 off cavity 1 prepared in (|up> + |down>)/sqrt2.
HybridKet build_channel(double alpha);

// N (a|beta>_5 + b|-beta>_5), normalized. Throws ZeroNorm when degenerate.
HybridKet prepare_input(const InputQubit& q);

// (|up> + |down>)/sqrt2 on one spin.
HybridKet plus_state(SpinId spin);

// Snapshots of the exact evolution.
struct ProtocolStages {
  HybridKet channel;      // spin 1, mode 4
  HybridKet after_split;  // spin 1, modes 6 and 7
  HybridKet after_cp;     // spins 1-3, modes 8 and 9
  HybridKet final_state;  // after the microwave pulses on spins 2 and 3
};

ProtocolStages evolve_stages(const HybridKet& channel, const HybridKet& input);
HybridKet evolve_to_final(const HybridKet& channel, const HybridKet& input);

// Born probabilities of (spin2, spin3), indexed 2*spin2 + spin3 with up = 0.
std::array<double, 4> spin_sector_probabilities(const HybridKet& ket);

struct SpinReadout {
  Spin spin2;
  Spin spin3;
  HybridKet collapsed;  // spins 2 and 3 removed, renormalized
  double probability;
};

SpinReadout measure_spins(const HybridKet& ket, Rng& rng);

// Marginal position density of one mode of a (not necessarily normalized)
// ket, divided by the ket's squared norm. With real amplitudes on the mode it
// is a finite sum of unit-width Gaussians w_j exp(-(x - c_j)^2).
class HomodyneDensity {
 public:
  HomodyneDensity(const HybridKet& ket, ModeId mode);

  double operator()(double x) const;
  void evaluate(std::span<const double> xs, std::span<double> out) const;

  // Largest |mean position| among the mode's coherent components.
  double reach() const { return reach_; }
  bool is_gaussian_sum() const { return real_; }
  const std::vector<double>& centers() const { return centers_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  bool real_ = true;
  double reach_ = 0.0;
  std::vector<double> centers_;
  std::vector<double> weights_;
  // General complex case: distinct amplitudes and their Gram matrix.
  std::vector<Complex> amps_;
  std::vector<Complex> gram_;
  double scale_ = 1.0;
};

HomodyneDensity homodyne_density(const HybridKet& ket, ModeId mode);

inline constexpr std::size_t kHomodyneGridPoints = 1u << 14;
inline constexpr double kHomodyneMargin = 8.0;

struct HomodyneSample {
  double x;
  HybridKet collapsed;  // mode removed, renormalized
};

// Inverse-CDF draw on [-(reach + 8), reach + 8] with 2^14 points.
HomodyneSample sample_homodyne(const HybridKet& ket, ModeId mode, Rng& rng);

// Xi if |x| <= alpha, Upsilon otherwise. Requires alpha > beta >= 0;
// throws DegenerateGeometry when alpha <= beta.
PeakClass classify_peak(double x, double alpha, double beta);

// Correction for one measurement pattern. Throws InvalidCombination when both
// modes fall in the same class.
CorrectionOp select_correction(Spin spin2, Spin spin3, PeakClass class8, PeakClass class9);

struct MeasurementOutcome {
  Spin spin2 = Spin::Up;
  Spin spin3 = Spin::Up;
  double x8 = 0.0;
  double x9 = 0.0;
  PeakClass class8 = PeakClass::Upsilon;
  PeakClass class9 = PeakClass::Xi;
};

struct TeleportationRecord {
  std::uint64_t seed = 0;
  InputQubit input;
  MeasurementOutcome outcome;
  // Empty for a heralded failure.
  std::optional<CorrectionOp> correction;
  SpinVector final_state{};
  // Overlap with the target; for a heralded failure, of the uncorrected state.
  double fidelity = 0.0;
  bool heralded = false;
};

class FailedTrial : public Error {
 public:
  explicit FailedTrial(TeleportationRecord record)
      : Error("FailedTrial: measurement pattern outside the correction table"), record_(std::move(record)) {}

  const TeleportationRecord& record() const { return record_; }

 private:
  TeleportationRecord record_;
};

// One full trial. Throws FailedTrial when class8 == class9.
TeleportationRecord run_teleportation(double alpha, const InputQubit& q, Rng& rng);

}  // namespace cvdv
